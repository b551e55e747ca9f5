import random

import numpy as np
import pytest

from banglambek.catsem import (
    Base, BangOb, CoDelta, ComonadEps, Compose, CurryR, EvalL, EvalR, HomL, HomR, Id, LaxM, LaxUnit, SigmaL, SigmaR,
    TensorM, TensorOb, TranslationError, Unit, context_object, count, factors, object_of, sexpr, subterms,
    tensor_ob, translate, typecheck,
)
from banglambek.evalsem import SpaceAssignment, evaluate, object_shape
from banglambek.fixtures import GOAL, PHRASE, lexicon
from banglambek.formula import Bang, Empty, Sequent, parse_formula, parse_sequent
from banglambek.modality import Cogebra
from banglambek.prover import Derivation, Rule, SearchBudget, check, derive_phrase, prove

from oracles import random_derivable

A, B, NP, N, S = Base('A'), Base('B'), Base('NP'), Base('N'), Base('S')


def test_object_of_examples():
    assert object_of(parse_formula('!NP')) == BangOb(NP)
    assert object_of(Empty()) == Unit
    assert object_of(parse_formula('S/!NP')) == HomL(S, BangOb(NP))
    assert object_of(parse_formula('A\\B')) == HomR(A, B)
    assert object_of(parse_formula('(A,B),A')) == TensorOb((A, B, A))


def test_tensor_ob_is_strict():
    assert tensor_ob() == Unit
    assert tensor_ob(A) == A
    assert tensor_ob(A, Unit, tensor_ob(B, A)) == TensorOb((A, B, A))
    assert factors(Unit) == ()
    assert factors(tensor_ob(A, B)) == (A, B)
    assert context_object([]) == Unit


def test_typecheck_examples():
    assert not typecheck(Compose(EvalL(NP, N), Id(S)))
    t = SigmaR(A, B)
    assert t.dom == TensorOb((A, BangOb(B)))
    assert typecheck(t)
    assert typecheck(Compose(EvalL(NP, N), Id(TensorOb((HomL(NP, N), N)))))
    assert not typecheck(CurryR(EvalR(A, B), B))
    assert typecheck(LaxUnit())
    assert typecheck(TensorM(LaxM(A, B), SigmaL(A, B)))


def test_translate_single_slash_left():
    t = translate(prove(parse_sequent('NP/N, N |- NP'))[0])
    assert t == EvalL(NP, N)
    assert sexpr(t) == '(eval-l NP N)'


def test_translate_contraction_counts():
    t = translate(prove(parse_sequent('!A, A\\(A\\B) |- B'), SearchBudget(20, 1, 1))[0])
    assert typecheck(t)
    assert count(t, CoDelta) == 1
    assert count(t, ComonadEps) == 2
    assert all(s.a == A for s in subterms(t) if isinstance(s, (CoDelta, ComonadEps)))


def test_translate_promotion_of_empty_context():
    t = translate(prove(parse_sequent('|- !(A/A)'))[0])
    assert t.dom == Unit and t.cod == BangOb(HomL(A, A))
    assert count(t, LaxUnit) == 1


def test_translate_rejects_invalid_derivation():
    bad = Derivation(Sequent((parse_formula('N'),), parse_formula('NP')), Rule.Axiom)
    with pytest.raises(TranslationError):
        translate(bad)


def test_parasitic_gap_term():
    d = derive_phrase(PHRASE, lexicon(), GOAL, SearchBudget(60, 2, 1))[0].derivation
    t = translate(d)
    assert typecheck(t)
    assert t.cod == NP
    assert t.dom == context_object(d.conclusion.antecedent)
    assert count(t, CoDelta) == 1
    assert next(s for s in subterms(t) if isinstance(s, CoDelta)).a == NP


def test_typed_soundness_on_random_derivations():
    rng = random.Random(5)
    for _ in range(300):
        s = random_derivable(rng, steps=10)
        for d in prove(s, SearchBudget(30, 1, 3)):
            t = translate(d)
            assert typecheck(t), s
            assert t.dom == context_object(s.antecedent)
            assert t.cod == object_of(s.succedent)


def _round_trip(d: Derivation, j: int, k: int) -> Derivation:
    """``d`` below a Perm1 moving the !-formula at ``j`` to ``k`` and a Perm2 moving it back."""
    ant = list(d.conclusion.antecedent)
    moved = ant[:]
    moved.insert(k, moved.pop(j))
    mid = Sequent(tuple(moved), d.conclusion.succedent)
    if k < j:
        inner = Derivation(mid, Rule.Perm2, (d,), (k, j))
        return Derivation(d.conclusion, Rule.Perm1, (inner,), (j, k))
    inner = Derivation(mid, Rule.Perm1, (d,), (k, j))
    return Derivation(d.conclusion, Rule.Perm2, (inner,), (j, k))


def test_perm_round_trip_evaluates_to_identity():
    spaces = SpaceAssignment({'A': 2, 'B': 3, 'C': 2})
    mod = Cogebra()
    rng = np.random.default_rng(0)
    for text in ['!A, B, A\\(B\\C) |- C', '!A, A\\(A\\B) |- B', 'B, !A, (B\\(A\\C)) |- C']:
        d = prove(parse_sequent(text), SearchBudget(20, 1, 1))[0]
        ant = d.conclusion.antecedent
        j = next(i for i, f in enumerate(ant) if isinstance(f, Bang))
        for k in range(len(ant)):
            if k == j:
                continue
            rt = _round_trip(d, j, k)
            assert check(rt)
            t0, t1 = translate(d), translate(rt)
            x = rng.standard_normal(object_shape(t0.dom, spaces, mod))
            np.testing.assert_allclose(evaluate(t1, spaces, mod, x), evaluate(t0, spaces, mod, x), atol=1e-12)


def test_sexpr_one_constructor_per_node():
    t = translate(prove(parse_sequent('!A, A\\(A\\B) |- B'), SearchBudget(20, 1, 1))[0])
    text = sexpr(t)
    assert text.count('(') == text.count(')')
    nodes = list(subterms(t))
    assert text.count('(') >= len(nodes)
