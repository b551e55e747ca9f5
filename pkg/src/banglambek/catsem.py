"""Morphism terms of the free monoidal biclosed category with a coalgebra modality.

Objects are kept in a strict normal form: tensor products are flattened and
the unit is dropped, so ``A (x) (B (x) I)`` and ``(A (x) B)`` are the same
object.  Terms are plain trees; nothing is checked at construction time,
``typecheck`` does that.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Union

from .formula import Atom, Bang, Empty, Formula, Over, Tensor, Under
from .prover import Derivation, Rule, expected_premises


class TranslationError(TypeError):
    pass


########################################################################################################################
# Objects
########################################################################################################################

@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self): return self.name


@dataclass(frozen=True)
class TensorOb:
    """A product of at least two non-unit, non-product factors (build with ``tensor_ob``)."""
    factors: tuple

    def __str__(self): return '(' + ' * '.join(map(str, self.factors)) + ')'


@dataclass(frozen=True)
class HomR:
    """``left => right``, the object of ``left \\ right``."""
    left: object
    right: object

    def __str__(self): return f'({self.left} => {self.right})'


@dataclass(frozen=True)
class HomL:
    """``left <= right``, the object of ``left / right``."""
    left: object
    right: object

    def __str__(self): return f'({self.left} <= {self.right})'


@dataclass(frozen=True)
class BangOb:
    body: object

    def __str__(self): return f'!{self.body}'


ObjectExpr = Union[Base, TensorOb, HomR, HomL, BangOb]
Unit = TensorOb(())


def tensor_ob(*objs) -> ObjectExpr:
    flat = []
    for o in objs:
        flat.extend(factors(o))
    if len(flat) == 1:
        return flat[0]
    return TensorOb(tuple(flat))


def factors(obj) -> tuple:
    """The list of non-product factors of ``obj`` (empty for the unit)."""
    if isinstance(obj, TensorOb):
        return obj.factors
    return (obj,)


def object_of(f: Formula) -> ObjectExpr:
    match f:
        case Atom(name):
            return Base(name)
        case Empty():
            return Unit
        case Tensor(l, r):
            return tensor_ob(object_of(l), object_of(r))
        case Under(a, b):
            return HomR(object_of(a), object_of(b))
        case Over(b, a):
            return HomL(object_of(b), object_of(a))
        case Bang(body):
            return BangOb(object_of(body))
    raise TypeError(f'not a formula: {f!r}')


def context_object(formulas) -> ObjectExpr:
    return tensor_ob(*(object_of(f) for f in formulas))


########################################################################################################################
# Terms
########################################################################################################################

@dataclass(frozen=True)
class Id:
    obj: object

    @property
    def dom(self): return self.obj

    @property
    def cod(self): return self.obj


@dataclass(frozen=True)
class Compose:
    """``g . f``: first ``f``, then ``g``."""
    g: object
    f: object

    @property
    def dom(self): return self.f.dom

    @property
    def cod(self): return self.g.cod


@dataclass(frozen=True)
class TensorM:
    f: object
    g: object

    @property
    def dom(self): return tensor_ob(self.f.dom, self.g.dom)

    @property
    def cod(self): return tensor_ob(self.f.cod, self.g.cod)


@dataclass(frozen=True)
class EvalR:
    """``A (x) (A => B) -> B``."""
    a: object
    b: object

    @property
    def dom(self): return tensor_ob(self.a, HomR(self.a, self.b))

    @property
    def cod(self): return self.b


@dataclass(frozen=True)
class EvalL:
    """``(A <= B) (x) B -> A``."""
    a: object
    b: object

    @property
    def dom(self): return tensor_ob(HomL(self.a, self.b), self.b)

    @property
    def cod(self): return self.a


def _drop_prefix(obj, prefix):
    fs, ps = factors(obj), factors(prefix)
    if fs[:len(ps)] != ps:
        return None
    return tensor_ob(*fs[len(ps):])


def _drop_suffix(obj, suffix):
    fs, ss = factors(obj), factors(suffix)
    if len(ss) > len(fs) or fs[len(fs) - len(ss):] != ss:
        return None
    return tensor_ob(*fs[:len(fs) - len(ss)])


@dataclass(frozen=True)
class CurryL:
    """From ``f: A (x) C -> B`` to ``C -> (A => B)``; ``arg`` is ``A``."""
    f: object
    arg: object

    @property
    def dom(self):
        rest = _drop_prefix(self.f.dom, self.arg)
        return rest if rest is not None else self.f.dom

    @property
    def cod(self): return HomR(self.arg, self.f.cod)


@dataclass(frozen=True)
class CurryR:
    """From ``g: C (x) B -> A`` to ``C -> (A <= B)``; ``arg`` is ``B``."""
    f: object
    arg: object

    @property
    def dom(self):
        rest = _drop_suffix(self.f.dom, self.arg)
        return rest if rest is not None else self.f.dom

    @property
    def cod(self): return HomL(self.f.cod, self.arg)


@dataclass(frozen=True)
class CoDelta:
    """Comonoid comultiplication ``!A -> !A (x) !A``."""
    a: object

    @property
    def dom(self): return BangOb(self.a)

    @property
    def cod(self): return tensor_ob(BangOb(self.a), BangOb(self.a))


@dataclass(frozen=True)
class CoUnit:
    """Comonoid counit ``!A -> I``."""
    a: object

    @property
    def dom(self): return BangOb(self.a)

    @property
    def cod(self): return Unit


@dataclass(frozen=True)
class ComonadDelta:
    """``!A -> !!A``."""
    a: object

    @property
    def dom(self): return BangOb(self.a)

    @property
    def cod(self): return BangOb(BangOb(self.a))


@dataclass(frozen=True)
class ComonadEps:
    """``!A -> A``."""
    a: object

    @property
    def dom(self): return BangOb(self.a)

    @property
    def cod(self): return self.a


@dataclass(frozen=True)
class SigmaR:
    """``A (x) !B -> !B (x) A``."""
    a: object
    b: object

    @property
    def dom(self): return tensor_ob(self.a, BangOb(self.b))

    @property
    def cod(self): return tensor_ob(BangOb(self.b), self.a)


@dataclass(frozen=True)
class SigmaL:
    """``!A (x) B -> B (x) !A``."""
    a: object
    b: object

    @property
    def dom(self): return tensor_ob(BangOb(self.a), self.b)

    @property
    def cod(self): return tensor_ob(self.b, BangOb(self.a))


@dataclass(frozen=True)
class LaxM:
    """``!A (x) !B -> !(A (x) B)``."""
    a: object
    b: object

    @property
    def dom(self): return tensor_ob(BangOb(self.a), BangOb(self.b))

    @property
    def cod(self): return BangOb(tensor_ob(self.a, self.b))


@dataclass(frozen=True)
class LaxUnit:
    """The nullary part of the lax structure, ``I -> !I``."""

    @property
    def dom(self): return Unit

    @property
    def cod(self): return BangOb(Unit)


@dataclass(frozen=True)
class BangMap:
    f: object

    @property
    def dom(self): return BangOb(self.f.dom)

    @property
    def cod(self): return BangOb(self.f.cod)


MorphTerm = Union[Id, Compose, TensorM, EvalR, EvalL, CurryL, CurryR, CoDelta, CoUnit, ComonadDelta,
                  ComonadEps, SigmaR, SigmaL, LaxM, LaxUnit, BangMap]
PRIMITIVES = (EvalR, EvalL, CoDelta, CoUnit, ComonadDelta, ComonadEps, SigmaR, SigmaL, LaxM, LaxUnit)
_OBJECT_TYPES = (Base, TensorOb, HomR, HomL, BangOb)


def is_object(o) -> bool:
    if isinstance(o, Base):
        return isinstance(o.name, str)
    if isinstance(o, TensorOb):
        return len(o.factors) != 1 and all(is_object(f) and not isinstance(f, TensorOb) for f in o.factors)
    if isinstance(o, (HomR, HomL)):
        return is_object(o.left) and is_object(o.right)
    if isinstance(o, BangOb):
        return is_object(o.body)
    return False


def typecheck(t) -> bool:
    """True iff every composite in ``t`` has matching domains and codomains."""
    try:
        return _typecheck(t)
    except (AttributeError, TypeError):
        return False


def _typecheck(t) -> bool:
    match t:
        case Id(obj):
            return is_object(obj)
        case Compose(g, f):
            return _typecheck(g) and _typecheck(f) and f.cod == g.dom
        case TensorM(f, g):
            return _typecheck(f) and _typecheck(g)
        case CurryL(f, arg):
            return _typecheck(f) and is_object(arg) and _drop_prefix(f.dom, arg) is not None
        case CurryR(f, arg):
            return _typecheck(f) and is_object(arg) and _drop_suffix(f.dom, arg) is not None
        case BangMap(f):
            return _typecheck(f)
        case LaxUnit():
            return True
        case EvalR(a, b) | EvalL(a, b) | SigmaR(a, b) | SigmaL(a, b) | LaxM(a, b):
            return is_object(a) and is_object(b)
        case CoDelta(a) | CoUnit(a) | ComonadDelta(a) | ComonadEps(a):
            return is_object(a)
    return False


########################################################################################################################
# Smart constructors used by the translation
########################################################################################################################

def compose(*terms):
    """``compose(h, g, f)`` is ``h . g . f``; identities are dropped."""
    kept = [t for t in terms if not isinstance(t, Id)]
    if not kept:
        return terms[-1]
    return reduce(lambda g, f: Compose(g, f), kept)


def tensor(*terms):
    """Tensor of terms, merging identities and dropping identities on the unit."""
    kept = [t for t in terms if not (isinstance(t, Id) and t.obj == Unit)]
    if not kept:
        return Id(Unit)
    out = [kept[0]]
    for t in kept[1:]:
        last = out[-1]
        if isinstance(last, Id) and isinstance(t, Id):
            out[-1] = Id(tensor_ob(last.obj, t.obj))
        else:
            out.append(t)
    return reduce(lambda f, g: TensorM(f, g), out)


def _in_context(left, term, right):
    return tensor(Id(context_object(left)), term, Id(context_object(right)))


def translate(d: Derivation):
    """The morphism ``[[Gamma]] -> [[A]]`` a derivation of ``Gamma |- A`` denotes."""
    want = expected_premises(d.conclusion, d.rule, d.meta) if isinstance(d, Derivation) else None
    if want is None or [p.conclusion for p in d.premises] != want:
        raise TranslationError(f'not a valid rule instance: {d.rule} at {d.conclusion}')
    ant, succ = d.conclusion.antecedent, d.conclusion.succedent
    subs = [translate(p) for p in d.premises]
    rule = d.rule

    if rule is Rule.Axiom:
        term = Id(object_of(succ))
    elif rule is Rule.SlashR:
        term = CurryR(subs[0], object_of(succ.right))
    elif rule is Rule.BackslashR:
        term = CurryL(subs[0], object_of(succ.left))
    elif rule is Rule.SlashL:
        i, k = d.meta
        arg, rest = subs
        b, a = object_of(ant[i].left), object_of(ant[i].right)
        apply = compose(EvalL(b, a), tensor(Id(HomL(b, a)), arg))
        term = compose(rest, _in_context(ant[:i], apply, ant[i + 1 + k:]))
    elif rule is Rule.BackslashL:
        i, k = d.meta
        arg, rest = subs
        a, b = object_of(ant[i].left), object_of(ant[i].right)
        apply = compose(EvalR(a, b), tensor(arg, Id(HomR(a, b))))
        term = compose(rest, _in_context(ant[:i - k], apply, ant[i + 1:]))
    elif rule is Rule.BangL:
        (i,) = d.meta
        term = compose(subs[0], _in_context(ant[:i], ComonadEps(object_of(ant[i].body)), ant[i + 1:]))
    elif rule is Rule.BangR:
        term = compose(BangMap(subs[0]), _promote(ant))
    elif rule is Rule.Perm1:
        src, dst = d.meta
        swap = SigmaR(context_object(ant[dst:src]), object_of(ant[src].body))
        term = compose(subs[0], _in_context(ant[:dst], swap, ant[src + 1:]))
    elif rule is Rule.Perm2:
        src, dst = d.meta
        swap = SigmaL(object_of(ant[src].body), context_object(ant[src + 1:dst + 1]))
        term = compose(subs[0], _in_context(ant[:src], swap, ant[dst + 1:]))
    elif rule is Rule.Contr:
        (i,) = d.meta
        term = compose(subs[0], _in_context(ant[:i], CoDelta(object_of(ant[i].body)), ant[i + 1:]))
    else:
        raise TranslationError(f'unknown rule {rule!r}')

    if term.dom != context_object(ant) or term.cod != object_of(succ):
        raise TranslationError(f'ill-typed translation at {rule.name} node {d.conclusion}')
    return term


def _promote(ant):
    """``!A1 (x) ... (x) !An -> !(!A1 (x) ... (x) !An)``: delta on each factor, then fold with m."""
    if not ant:
        return LaxUnit()
    bodies = [object_of(f.body) for f in ant]
    term = tensor(*(ComonadDelta(b) for b in bodies))
    inner = BangOb(bodies[0])
    for j in range(1, len(bodies)):
        rest = Id(tensor_ob(*(BangOb(BangOb(b)) for b in bodies[j + 1:])))
        term = compose(tensor(LaxM(inner, BangOb(bodies[j])), rest), term)
        inner = tensor_ob(inner, BangOb(bodies[j]))
    return term


########################################################################################################################
# Printing
########################################################################################################################

def sexpr(t) -> str:
    """One constructor per node, e.g. ``(compose (eval-l NP N) (id (NP <= N)))``."""
    match t:
        case Id(obj):
            return f'(id {obj})'
        case Compose(g, f):
            return f'(compose {sexpr(g)} {sexpr(f)})'
        case TensorM(f, g):
            return f'(tensor {sexpr(f)} {sexpr(g)})'
        case EvalR(a, b):
            return f'(eval-r {a} {b})'
        case EvalL(a, b):
            return f'(eval-l {a} {b})'
        case CurryL(f, arg):
            return f'(curry-l {arg} {sexpr(f)})'
        case CurryR(f, arg):
            return f'(curry-r {arg} {sexpr(f)})'
        case CoDelta(a):
            return f'(codelta {a})'
        case CoUnit(a):
            return f'(counit {a})'
        case ComonadDelta(a):
            return f'(delta {a})'
        case ComonadEps(a):
            return f'(epsilon {a})'
        case SigmaR(a, b):
            return f'(sigma-r {a} {b})'
        case SigmaL(a, b):
            return f'(sigma-l {a} {b})'
        case LaxM(a, b):
            return f'(lax-m {a} {b})'
        case LaxUnit():
            return '(lax-unit)'
        case BangMap(f):
            return f'(bang {sexpr(f)})'
    raise TypeError(f'not a morphism term: {t!r}')


def count(t, kind) -> int:
    """Number of nodes of constructor class ``kind`` in ``t``."""
    n = 1 if isinstance(t, kind) else 0
    for child in _children(t):
        n += count(child, kind)
    return n


def subterms(t):
    """All nodes of ``t``, root first."""
    yield t
    for child in _children(t):
        yield from subterms(child)


def _children(t):
    match t:
        case Compose(g, f):
            return (g, f)
        case TensorM(f, g):
            return (f, g)
        case CurryL(f, _) | CurryR(f, _) | BangMap(f):
            return (f,)
    return ()
