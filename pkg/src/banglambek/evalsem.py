"""Quantisation: morphism terms evaluated as maps between real vector spaces.

An object's space is an array shape.  Atoms get a dimension from a
``SpaceAssignment``; products concatenate shapes; ``A => B`` has shape
``shape(A) + shape(B)`` and ``B <= A`` has ``shape(B) + shape(A)``; ``!A`` has
the shape the modality assigns.

The evaluator keeps the state as a list of blocks, each holding either an
array over a run of adjacent factors or a closure for a single hom factor.
Maps are applied blockwise when they line up with block boundaries and on
the merged array otherwise.  Currying produces closures, so a curried body is
re-run on the actual argument when it is applied; that keeps the nonlinear
full-copy baseline exact on unentangled inputs.  Closures are turned into
arrays (through basis vectors) only when an array is unavoidable.
"""
from __future__ import annotations

import warnings
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from math import prod

import numpy as np

from .catsem import (
    Base, BangMap, BangOb, CoDelta, ComonadDelta, ComonadEps, Compose, CoUnit, CurryL, CurryR, EvalL, EvalR,
    HomL, HomR, Id, LaxM, LaxUnit, SigmaL, SigmaR, TensorM, TensorOb, count, factors, object_of,
    translate, typecheck,
)
from .formula import Formula, Lexicon
from .modality import Modality, ModalityError
from .prover import SearchBudget, UnknownWordError, derive_phrase
from .tensor import ShapeError

class EvaluationError(ValueError):
    pass


class NonlinearityError(EvaluationError):
    """A nonlinear map met an input it cannot act on faithfully."""


class NoDerivationError(EvaluationError):
    pass


########################################################################################################################
# Spaces
########################################################################################################################

@dataclass
class SpaceAssignment:
    dims: dict = field(default_factory=dict)

    def __post_init__(self):
        for atom, d in self.dims.items():
            if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
                raise ValueError(f'dimension of {atom} must be a positive integer, got {d!r}')

    @classmethod
    def uniform(cls, atoms, d: int) -> SpaceAssignment:
        return cls({a: d for a in atoms})

    def dim(self, atom: str) -> int:
        try:
            return self.dims[atom]
        except KeyError:
            raise EvaluationError(f'no dimension assigned to atom {atom}') from None

    def shape(self, obj, modality: Modality) -> tuple:
        return object_shape(obj, self, modality)


def object_shape(obj, spaces: SpaceAssignment, modality: Modality) -> tuple:
    match obj:
        case Base(name):
            return (spaces.dim(name),)
        case TensorOb(fs):
            return sum((object_shape(f, spaces, modality) for f in fs), ())
        case HomR(a, b) | HomL(a, b):
            return object_shape(a, spaces, modality) + object_shape(b, spaces, modality)
        case BangOb(body):
            return tuple(modality.bang_shape(object_shape(body, spaces, modality)))
    raise TypeError(f'not an object: {obj!r}')


def object_dim(obj, spaces, modality) -> int:
    return prod(object_shape(obj, spaces, modality))


########################################################################################################################
# Word functions and closures
########################################################################################################################

@dataclass(frozen=True)
class WordFunction:
    """A word meaning given as a Python function instead of a tensor.

    ``fn`` receives the argument of the hom (an array, or a callable when the
    argument is itself a hom) and returns the result in the same convention.
    Set ``linear=False`` if the function is not linear, so the evaluator never
    replaces it by its matrix.
    """
    fn: Callable
    linear: bool = True

    def __call__(self, x):
        return self.fn(x)


class _Closure:
    obj = None
    linear = True

    def call(self, arg):
        raise NotImplementedError


@dataclass
class _Block:
    objs: tuple
    value: object      # ndarray over the joint shape of objs, or a _Closure


@dataclass
class _State:
    blocks: list
    scale: float = 1.0

    def width(self):
        return sum(len(b.objs) for b in self.blocks)


def _hom_parts(obj):
    """(argument object, result object) of a hom."""
    if isinstance(obj, HomL):
        return obj.right, obj.left
    if isinstance(obj, HomR):
        return obj.left, obj.right
    raise EvaluationError(f'not a hom object: {obj}')


class _CurryClosure(_Closure):
    def __init__(self, engine, term, captured):
        self.engine, self.term, self.captured = engine, term, list(captured)
        self.obj = term.cod
        nonlinear_body = not engine.modality.linear and count(term.f, CoDelta) > 0
        self.linear = not nonlinear_body and all(
            b.value.linear for b in self.captured if isinstance(b.value, _Closure))

    def call(self, arg: _State) -> _State:
        if isinstance(self.term, CurryR):
            st = _State(self.captured + arg.blocks, arg.scale)
        else:
            st = _State(arg.blocks + self.captured, arg.scale)
        self.engine.run(self.term.f, st, 0)
        return st


class _FnClosure(_Closure):
    def __init__(self, engine, obj, fn, linear=True):
        self.engine, self.obj, self.fn, self.linear = engine, obj, fn, linear

    def call(self, arg: _State) -> _State:
        a, r = _hom_parts(self.obj)
        out = self.fn(self.engine.to_python(arg, a))
        return self.engine.from_python(out, r)


########################################################################################################################
# Engine
########################################################################################################################

def _apply_mid(fn, z: np.ndarray, n_pre: int, n_op: int) -> np.ndarray:
    """Apply a batched ``fn: (N, *op) -> (N, *out)`` to the middle axes of ``z``."""
    pre, op, post = z.shape[:n_pre], z.shape[n_pre:n_pre + n_op], z.shape[n_pre + n_op:]
    p, q = prod(pre), prod(post)
    x = z.reshape((p,) + op + (q,))
    x = np.moveaxis(x, -1, 1).reshape((p * q,) + op)
    y = fn(x)
    out = y.shape[1:]
    y = np.moveaxis(y.reshape((p, q) + out), 1, -1)
    return y.reshape(pre + out + post)


class _Engine:
    def __init__(self, spaces: SpaceAssignment, modality: Modality):
        self.spaces, self.modality = spaces, modality

    def shape(self, obj) -> tuple:
        return object_shape(obj, self.spaces, self.modality)

    def shapes(self, objs) -> tuple:
        return sum((self.shape(o) for o in objs), ())

    # -- conversions ---------------------------------------------------------------------------------------------------

    def materialize(self, c: _Closure) -> np.ndarray:
        if not c.linear:
            raise NonlinearityError('cannot replace a nonlinear function by a matrix; '
                                    'apply it to an argument instead')
        a, r = _hom_parts(c.obj)
        ashape, rshape = self.shape(a), self.shape(r)
        m = prod(ashape)
        rows = []
        for k in range(m):
            e = np.zeros(m)
            e[k] = 1.0
            rows.append(self.joint(c.call(self.state_of(e.reshape(ashape), a)), r).reshape(-1))
        mat = np.stack(rows) if rows else np.zeros((0, prod(rshape)))
        if isinstance(c.obj, HomR):
            return mat.reshape(ashape + rshape)
        return mat.T.reshape(rshape + ashape)

    def array_of(self, block: _Block) -> np.ndarray:
        return self.materialize(block.value) if isinstance(block.value, _Closure) else block.value

    def merge(self, blocks) -> _Block:
        objs = sum((b.objs for b in blocks), ())
        arr = np.array(1.0)
        for b in blocks:
            arr = np.multiply.outer(arr, self.array_of(b))
        return _Block(objs, arr)

    def joint(self, st: _State, obj) -> np.ndarray:
        want = self.shape(obj)
        arr = self.merge(st.blocks).value * st.scale
        if arr.shape != want:
            raise ShapeError(f'result has shape {arr.shape}, expected {want}')
        return arr

    def state_of(self, value, obj) -> _State:
        """State holding a single value for ``obj`` (array or closure)."""
        fs = factors(obj)
        if isinstance(value, _Closure):
            return _State([_Block(fs, value)])
        arr = np.asarray(value, dtype=np.float64)
        want = self.shape(obj)
        if arr.shape != want:
            raise ShapeError(f'value for {obj} has shape {arr.shape}, expected {want}')
        if not fs:
            return _State([], float(arr))
        return _State([_Block(fs, arr)])

    def from_python(self, value, obj) -> _State:
        if isinstance(value, _Closure):
            return self.state_of(value, obj)
        if callable(value) and not isinstance(value, np.ndarray):
            if not isinstance(obj, (HomL, HomR)):
                raise EvaluationError(f'a function was given for non-hom object {obj}')
            return _State([_Block((obj,), self.closure_of(value, obj))])
        return self.state_of(value, obj)

    def closure_of(self, fn, obj) -> _Closure:
        linear = getattr(fn, 'linear', True)
        return _FnClosure(self, obj, fn, linear)

    def to_python(self, st: _State, obj):
        if len(st.blocks) == 1 and isinstance(st.blocks[0].value, _Closure) and st.scale == 1.0:
            return self.callable_of(st.blocks[0].value)
        return self.joint(st, obj)

    def callable_of(self, c: _Closure):
        if isinstance(c, _FnClosure):
            return c.fn
        a, r = _hom_parts(c.obj)

        def fn(x):
            return self.to_python(c.call(self.from_python(x, a)), r)
        return WordFunction(fn, c.linear)

    # -- structural recursion ------------------------------------------------------------------------------------------

    def run(self, t, st: _State, lo: int) -> None:
        match t:
            case Id():
                return
            case Compose(g, f):
                self.run(f, st, lo)
                self.run(g, st, lo)
            case TensorM(f, g):
                self.run(f, st, lo)
                self.run(g, st, lo + len(factors(f.cod)))
            case _:
                self.primitive(t, st, lo)

    def _span(self, st: _State, lo: int, hi: int):
        """Blocks overlapping factors [lo, hi): (first, stop, start factor of first, end factor of last).

        For an empty range the result is empty, positioned at the boundary at
        ``lo`` if there is one, or on the block containing ``lo`` otherwise.
        """
        pos = 0
        first = stop = None
        start = end = lo
        for k, b in enumerate(st.blocks):
            w = len(b.objs)
            b_lo, b_hi = pos, pos + w
            if lo == hi:
                if b_lo == lo:
                    return k, k, lo, lo
                if b_lo < lo < b_hi:
                    return k, k + 1, b_lo, b_hi
            elif b_hi > lo and b_lo < hi:
                if first is None:
                    first, start = k, b_lo
                stop, end = k + 1, b_hi
            pos = b_hi
        if lo == hi:
            if lo > pos:
                raise EvaluationError('range outside the state')
            return len(st.blocks), len(st.blocks), lo, lo
        if first is None or end < hi:
            raise EvaluationError(f'factor range [{lo}, {hi}) outside the state')
        return first, stop, start, end

    def _boundary(self, st: _State, at: int) -> bool:
        pos = 0
        for b in st.blocks:
            if pos == at:
                return True
            pos += len(b.objs)
        return pos == at

    def primitive(self, t, st: _State, lo: int) -> None:
        n_in = len(factors(t.dom))
        hi = lo + n_in
        i, j, s, e = self._span(st, lo, hi)
        aligned = s == lo and e == hi
        mod = self.modality

        if mod.identity_functor and self._relabel(t, st, lo, hi, i, j, s):
            return
        if aligned and isinstance(t, SigmaR) and self._boundary(st, hi - 1):
            st.blocks[i:j] = st.blocks[j - 1:j] + st.blocks[i:j - 1]
            return
        if aligned and isinstance(t, SigmaL) and self._boundary(st, lo + 1):
            st.blocks[i:j] = st.blocks[i + 1:j] + st.blocks[i:i + 1]
            return
        if isinstance(t, CoDelta) and mod.split_delta and aligned and j - i == 1:
            b = st.blocks[i]
            st.blocks[i:j] = [b, _Block(b.objs, b.value)]
            return
        if isinstance(t, (EvalL, EvalR)) and aligned:
            k = i if isinstance(t, EvalL) else j - 1
            hom = st.blocks[k]
            if isinstance(hom.value, _Closure) and len(hom.objs) == 1:
                args = st.blocks[i + 1:j] if isinstance(t, EvalL) else st.blocks[i:j - 1]
                res = hom.value.call(_State(list(args)))
                st.blocks[i:j] = res.blocks
                st.scale *= res.scale
                return
        if isinstance(t, (CurryL, CurryR)) and aligned:
            st.blocks[i:j] = [_Block((t.cod,), _CurryClosure(self, t, st.blocks[i:j]))]
            return
        if isinstance(t, BangMap) and mod.identity_functor and aligned and j - i == 1 \
                and not isinstance(st.blocks[i].value, _Closure):
            inner = _State([_Block(factors(t.f.dom), st.blocks[i].value)])
            if not factors(t.f.dom):
                inner = _State([], float(st.blocks[i].value))
            self.run(t.f, inner, 0)
            st.blocks[i:j] = [_Block((t.cod,), self.joint(inner, t.f.cod))]
            return
        self._general(t, st, lo, hi, i, j, s)

    def _relabel(self, t, st, lo, hi, i, j, s) -> bool:
        """Maps that are identities on coordinates under identity-functor modalities."""
        if isinstance(t, (ComonadDelta, ComonadEps)) or (isinstance(t, BangMap) and isinstance(t.f, Id)):
            new = factors(t.cod)
        elif isinstance(t, LaxM):
            new = (t.cod,)
            if j - i > 1:
                st.blocks[i:j] = [self.merge(st.blocks[i:j])]
                j = i + 1
        elif isinstance(t, LaxUnit):
            if i == j:
                st.blocks.insert(i, _Block((t.cod,), np.array(1.0)))
                return True
            new = (t.cod,)
        else:
            return False
        b = st.blocks[i]
        if isinstance(b.value, _Closure):
            if len(new) != 1 or not isinstance(new[0], (HomL, HomR)):
                b = self.merge([b])
            else:
                st.blocks[i] = _Block(new, b.value)
                return True
        off = lo - s
        st.blocks[i] = _Block(b.objs[:off] + new + b.objs[off + (hi - lo):], b.value)
        return True

    def _general(self, t, st, lo, hi, i, j, s) -> None:
        z = self.merge(st.blocks[i:j])
        pre, post = z.objs[:lo - s], z.objs[hi - s:]
        arr = _apply_mid(lambda x: self.dense(t, x), z.value, len(self.shapes(pre)), len(self.shape(t.dom)))
        objs = pre + factors(t.cod) + post
        if objs:
            st.blocks[i:j] = [_Block(objs, arr)]
        else:
            st.blocks[i:j] = []
            st.scale *= float(arr)

    # -- dense batched evaluation: (N, *dom) -> (N, *cod) -----------------------------------------------------------

    def dense(self, t, x: np.ndarray) -> np.ndarray:
        n = x.shape[0]
        mod = self.modality
        match t:
            case Id():
                return x
            case Compose(g, f):
                return self.dense(g, self.dense(f, x))
            case TensorM(f, g):
                df, dg = len(self.shape(f.dom)), len(self.shape(g.dom))
                y = _apply_mid(lambda v: self.dense(f, v), x, 1, df)
                return _apply_mid(lambda v: self.dense(g, v), y, 1 + len(self.shape(f.cod)), dg)
            case EvalR(a, b):
                sa, sb = self.shape(a), self.shape(b)
                m = prod(sa)
                y = np.einsum('niib->nb', x.reshape(n, m, m, prod(sb)))
                return y.reshape((n,) + sb)
            case EvalL(b, a):
                sa, sb = self.shape(a), self.shape(b)
                m = prod(sa)
                y = np.einsum('nbii->nb', x.reshape(n, prod(sb), m, m))
                return y.reshape((n,) + sb)
            case CurryR(f, arg) | CurryL(f, arg):
                sa, sc = self.shape(arg), self.shape(t.dom)
                m, c = prod(sa), prod(sc)
                eye = np.eye(m)
                xf = x.reshape(n, c)
                if isinstance(t, CurryR):
                    z = (xf[:, None, :, None] * eye[None, :, None, :]).reshape((n * m,) + sc + sa)
                else:
                    z = (eye[None, :, :, None] * xf[:, None, None, :]).reshape((n * m,) + sa + sc)
                y = self.dense(f, z)
                sr = self.shape(f.cod)
                y = y.reshape(n, m, prod(sr))
                if isinstance(t, CurryR):
                    return np.swapaxes(y, 1, 2).reshape((n,) + sr + sa)
                return y.reshape((n,) + sa + sr)
            case CoDelta(a):
                if not mod.linear:
                    raise NonlinearityError(f'{mod.name} copying needs the copied factor !{a} unentangled '
                                            f'from the rest of the state')
                sb = self.shape(t.dom)
                return mod.delta(x.reshape(n, -1)).reshape((n,) + sb + sb)
            case CoUnit():
                return mod.counit(x.reshape(n, -1))
            case ComonadDelta():
                return mod.comonad_delta(x.reshape(n, -1)).reshape((n,) + self.shape(t.cod))
            case ComonadEps(a):
                return mod.epsilon(x.reshape(n, -1), self.shape(a))
            case SigmaR() | SigmaL():
                fs = factors(t.dom)
                first = (fs[:-1] if isinstance(t, SigmaR) else fs[:1])
                p = prod(self.shapes(first))
                y = x.reshape(n, p, -1).swapaxes(1, 2)
                return y.reshape((n,) + self.shape(t.cod))
            case LaxM(a, b):
                if not mod.identity_functor:
                    mod.lax_m(None, None)
                return x.reshape((n,) + self.shape(t.cod))
            case LaxUnit():
                if not mod.identity_functor:
                    mod.lax_unit()
                return x.reshape((n,) + self.shape(t.cod))
            case BangMap(f):
                if isinstance(f, Id):
                    return x
                if not mod.identity_functor:
                    raise EvaluationError('the action of ! on a non-identity map is not specified by the model')
                return self.dense(f, x.reshape((n,) + self.shape(f.dom))).reshape((n,) + self.shape(t.cod))
        raise TypeError(f'not a morphism term: {t!r}')


def evaluate(term, spaces: SpaceAssignment, modality: Modality, inputs):
    """Evaluate ``term`` on ``inputs`` and return an array of the codomain's shape.

    ``inputs`` is either one array of the domain's full shape or a list with
    one entry per domain factor; list entries may be arrays or, for hom
    factors, callables (see ``WordFunction``).
    """
    if not typecheck(term):
        raise EvaluationError('term does not typecheck')
    modality.check_term(term)
    eng = _Engine(spaces, modality)
    fs = factors(term.dom)
    if isinstance(inputs, (list, tuple)):
        if len(inputs) != len(fs):
            raise ShapeError(f'expected {len(fs)} input factors, got {len(inputs)}')
        st = _State([])
        for obj, v in zip(fs, inputs):
            sub = eng.from_python(v, obj)
            st.blocks.extend(sub.blocks)
            st.scale *= sub.scale
    else:
        st = eng.state_of(inputs, term.dom)
    eng.run(term, st, 0)
    return eng.joint(st, term.cod)


########################################################################################################################
# Word tensors and phrases
########################################################################################################################

def parse_word_tensors(text: str) -> dict:
    """Blocks of ``word<TAB>shape d1,d2,...`` followed by the entries in row-major order."""
    out = {}
    word = shape = None
    values: list = []
    header_line = 0

    def flush():
        if word is None:
            return
        need = prod(shape)
        if len(values) != need:
            raise ValueError(f'line {header_line}: {word} needs {need} numbers for shape {shape}, '
                             f'got {len(values)}')
        if word in out:
            warnings.warn(f'word tensor {word!r} given twice; the last one wins', stacklevel=3)
        out[word] = np.array(values, dtype=np.float64).reshape(shape)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        if '\t' in raw and 'shape' in raw.split('\t', 1)[1]:
            flush()
            w, rest = raw.split('\t', 1)
            rest = rest.strip()
            if not rest.startswith('shape'):
                raise ValueError(f'line {lineno}: expected "shape d1,d2,..." after the word')
            dims = rest[len('shape'):].strip()
            try:
                shape = tuple(int(d) for d in dims.split(',')) if dims else ()
            except ValueError:
                raise ValueError(f'line {lineno}: bad shape {dims!r}') from None
            if any(d < 1 for d in shape):
                raise ValueError(f'line {lineno}: dimensions must be positive')
            word, values, header_line = w.strip(), [], lineno
            continue
        if word is None:
            raise ValueError(f'line {lineno}: numbers before any word header')
        try:
            values.extend(float(v) for v in line.split())
        except ValueError:
            raise ValueError(f'line {lineno}: not a number in {line!r}') from None
    flush()
    return out


def load_word_tensors(path) -> dict:
    with open(path, encoding='utf-8') as fh:
        return parse_word_tensors(fh.read())


def format_word_tensors(tensors: Mapping) -> str:
    lines = []
    for w, t in tensors.items():
        t = np.asarray(t, dtype=np.float64)
        lines.append(f'{w}\tshape {",".join(map(str, t.shape))}')
        lines.append(' '.join(f'{v:.17g}' for v in t.ravel()))
    return '\n'.join(lines) + '\n'


def _fits(value, obj, spaces, modality) -> bool:
    if callable(value) and not isinstance(value, np.ndarray):
        return isinstance(obj, (HomL, HomR))
    try:
        return np.shape(value) == object_shape(obj, spaces, modality)
    except EvaluationError:
        return False


def interpret_phrase(words, tensors: Mapping, typelex: Lexicon, goal: Formula, modality: Modality,
                     spaces: SpaceAssignment, budget: SearchBudget = None, all_derivations: bool = False):
    """Prove the phrase, translate the derivation and evaluate it on the word meanings.

    Only derivations whose type choice matches the shapes of the given word
    tensors are used.  Returns the goal vector of the first such derivation,
    or a list of ``(PhraseDerivation, vector)`` pairs with ``all_derivations=True``.
    """
    words = list(words)
    missing = [w for w in words if w not in tensors]
    if missing:
        raise UnknownWordError(missing)
    budget = budget or SearchBudget()
    found = derive_phrase(words, typelex, goal, budget)
    if not found:
        raise NoDerivationError(f'no derivation of {" ".join(words)} as {goal} within the search budget')
    # the modality may leave structure open that a derivation needs; report that before shapes
    supported, rejected = [], None
    for pd in found:
        term = translate(pd.derivation)
        try:
            modality.check_term(term)
        except ModalityError as e:
            rejected = rejected or e
            continue
        supported.append((pd, term))
    if not supported:
        raise rejected
    usable = [(pd, term) for pd, term in supported if _all_fit(words, pd.types, tensors, spaces, modality)]
    if not usable:
        raise ShapeError('no derivation has types matching the shapes of the word tensors')
    results = []
    for pd, term in usable if all_derivations else usable[:1]:
        results.append((pd, evaluate(term, spaces, modality, [tensors[w] for w in words])))
    return results if all_derivations else results[0][1]


def _all_fit(words, types, tensors, spaces, modality) -> bool:
    return all(_fits(tensors[w], object_of(f), spaces, modality) for w, f in zip(words, types))
