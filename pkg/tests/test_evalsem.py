import random
import warnings

import numpy as np
import pytest

from banglambek.catsem import (
    Base, BangMap, BangOb, CoDelta, ComonadEps, Compose, CurryL, CurryR, EvalL, EvalR, HomL, HomR, Id, SigmaL,
    SigmaR, TensorM, subterms, tensor_ob,
)
from banglambek.evalsem import (
    EvaluationError, NoDerivationError, NonlinearityError, SpaceAssignment, WordFunction, evaluate,
    format_word_tensors, interpret_phrase, object_dim, object_shape, parse_word_tensors,
)
from banglambek.experiment import CopyModel, copy_model_vector
from banglambek.fixtures import GOAL, PHRASE, lexicon, spaces, that_fock_tensor, word_meanings
from banglambek.formula import parse_formula, parse_lexicon
from banglambek.modality import CofreeInspired, Cogebra, Fock, FullCopy, ModalityError
from banglambek.prover import UnknownWordError
from banglambek.tensor import ShapeError

from oracles import matrix_of
from termgen import DIMS, SPACES, random_domain, random_term

A, B, NP, N = Base('A'), Base('B'), Base('NP'), Base('N')


def rand(rng, obj, mod=Cogebra()):
    return rng.standard_normal(object_shape(obj, SPACES, mod))


def test_eval_left_is_matrix_vector():
    sp = SpaceAssignment({'NP': 3, 'N': 2})
    m, v = np.arange(6.0).reshape(3, 2), np.array([1.0, -1.0])
    np.testing.assert_allclose(evaluate(EvalL(NP, N), sp, Cogebra(), [m, v]), m @ v)
    np.testing.assert_allclose(evaluate(EvalL(NP, N), sp, Cogebra(), np.multiply.outer(m, v)), m @ v)


def test_eval_right_is_vector_matrix():
    sp = SpaceAssignment({'NP': 2, 'S': 3})
    m, v = np.arange(6.0).reshape(2, 3), np.array([2.0, 1.0])
    np.testing.assert_allclose(evaluate(EvalR(NP, Base('S')), sp, Cogebra(), [v, m]), v @ m)


def test_input_validation():
    with pytest.raises(ShapeError):
        evaluate(EvalL(A, B), SPACES, Cogebra(), [np.ones((2, 3))])
    with pytest.raises(EvaluationError):
        evaluate(Compose(EvalL(A, B), Id(A)), SPACES, Cogebra(), np.ones(2))
    with pytest.raises(ValueError):
        SpaceAssignment({'A': 0})


@pytest.mark.parametrize('kind,mod', [('cogebra', Cogebra()), ('cofree', CofreeInspired(0.5))])
def test_agrees_with_matrix_oracle(kind, mod):
    rng = random.Random(11)
    nrng = np.random.default_rng(11)
    for _ in range(150):
        t = random_term(rng, random_domain(rng), 3)
        x = rand(nrng, t.dom)
        got = evaluate(t, SPACES, mod, x)
        np.testing.assert_allclose(got.ravel(), matrix_of(t, DIMS, kind, 0.5) @ x.ravel(), atol=1e-9)


def test_fock_agrees_with_matrix_oracle():
    rng = random.Random(12)
    nrng = np.random.default_rng(12)
    mod = Fock()
    done = 0
    while done < 80:
        t = random_term(rng, random_domain(rng), 3, lax=False)
        try:
            mod.check_term(t)
        except ModalityError:
            continue
        if any(object_dim(o, SPACES, mod) > 1024 for s in subterms(t) for o in (s.dom, s.cod)):
            continue
        x = rand(nrng, t.dom, mod)
        got = evaluate(t, SPACES, mod, x)
        np.testing.assert_allclose(got.ravel(), matrix_of(t, DIMS, 'fock') @ x.ravel(), atol=1e-9)
        done += 1


def test_functoriality():
    rng = random.Random(13)
    nrng = np.random.default_rng(13)
    mod = Cogebra()
    for _ in range(100):
        f = random_term(rng, random_domain(rng), 2)
        g = random_term(rng, f.cod, 2)
        x = rand(nrng, f.dom)
        np.testing.assert_allclose(evaluate(Compose(g, f), SPACES, mod, x),
                                   evaluate(g, SPACES, mod, evaluate(f, SPACES, mod, x)), atol=1e-9)
        h = random_term(rng, random_domain(rng), 2)
        y = rand(nrng, h.dom)
        np.testing.assert_allclose(evaluate(TensorM(f, h), SPACES, mod, np.multiply.outer(x, y)),
                                   np.multiply.outer(evaluate(f, SPACES, mod, x), evaluate(h, SPACES, mod, y)),
                                   atol=1e-9)
        np.testing.assert_allclose(evaluate(BangMap(Compose(g, f)), SPACES, mod, x),
                                   evaluate(Compose(BangMap(g), BangMap(f)), SPACES, mod, x), atol=1e-9)


def test_identity_is_neutral():
    rng = np.random.default_rng(1)
    t = Compose(EvalL(A, B), Id(tensor_ob(HomL(A, B), B)))
    x = rand(rng, t.dom)
    np.testing.assert_allclose(evaluate(t, SPACES, Cogebra(), x), evaluate(EvalL(A, B), SPACES, Cogebra(), x))


def test_swap_involution():
    rng = np.random.default_rng(2)
    for mod in (Cogebra(), Fock(), FullCopy()):
        for a, b in ((A, B), (HomR(A, B), A), (BangOb(A), B)):
            t = Compose(SigmaL(b, a), SigmaR(a, b))
            x = rand(rng, t.dom, mod)
            np.testing.assert_allclose(evaluate(t, SPACES, mod, x), x, atol=1e-12)
            swapped = evaluate(SigmaR(a, b), SPACES, mod, x)
            na = len(object_shape(a, SPACES, mod))
            np.testing.assert_allclose(swapped, np.moveaxis(x, list(range(na)), list(range(-na, 0))), atol=0)


def test_curry_adjunction():
    rng = random.Random(14)
    nrng = np.random.default_rng(14)
    mod = Cogebra()
    for _ in range(60):
        c = random_domain(rng)
        x = Base(rng.choice(sorted(DIMS)))
        # left: f : X (x) C -> Y equals ev . (id (x) curry f)
        f = random_term(rng, tensor_ob(x, c), 2)
        back = Compose(EvalR(x, f.cod), TensorM(Id(x), CurryL(f, x)))
        z = rand(nrng, f.dom)
        np.testing.assert_allclose(evaluate(back, SPACES, mod, z), evaluate(f, SPACES, mod, z), atol=1e-9)
        # right: g : C (x) X -> Y equals ev . (curry g (x) id)
        g = random_term(rng, tensor_ob(c, x), 2)
        back = Compose(EvalL(g.cod, x), TensorM(CurryR(g, x), Id(x)))
        z = rand(nrng, g.dom)
        np.testing.assert_allclose(evaluate(back, SPACES, mod, z), evaluate(g, SPACES, mod, z), atol=1e-9)
        # uniqueness: currying ev . (id (x) h) gives h back
        h = CurryL(f, x)
        again = CurryL(Compose(EvalR(x, f.cod), TensorM(Id(x), h)), x)
        z = rand(nrng, c)
        np.testing.assert_allclose(evaluate(again, SPACES, mod, z), evaluate(h, SPACES, mod, z), atol=1e-9)


def test_full_copy_of_a_product():
    v = np.array([1.0, 2.0])
    t = Compose(TensorM(ComonadEps(A), ComonadEps(A)), CoDelta(A))
    np.testing.assert_allclose(evaluate(t, SPACES, FullCopy(), v), np.outer(v, v))
    np.testing.assert_allclose(evaluate(t, SPACES, Cogebra(), v), np.diag(v))
    # entangled with another factor: copying is not defined on the joint tensor
    joint = np.arange(6.0).reshape(2, 3)
    with pytest.raises(NonlinearityError):
        evaluate(TensorM(CoDelta(A), Id(B)), SPACES, FullCopy(), joint)
    w = np.array([1.0, 0.0, -1.0])
    got = evaluate(TensorM(CoDelta(A), Id(B)), SPACES, FullCopy(), [v, w])
    np.testing.assert_allclose(got, np.einsum('i,j,k->ijk', v, v, w))


def test_word_function_input():
    sp = SpaceAssignment({'NP': 2, 'N': 2})
    the = WordFunction(lambda n: 2 * n)
    np.testing.assert_allclose(evaluate(EvalL(NP, N), sp, Cogebra(), [the, np.array([1.0, 2.0])]), [2, 4])


def test_the_paper():
    lex = lexicon()
    sp = spaces(2)
    paper = np.array([1.0, 2.0])
    for mod in (Cogebra(), FullCopy(), Fock()):
        got = interpret_phrase(['the', 'paper'], {'the': np.eye(2), 'paper': paper}, lex, GOAL, mod, sp)
        np.testing.assert_allclose(got, paper)
    got = interpret_phrase(['the', 'paper'], {'the': 2 * np.eye(2), 'paper': paper}, lex, GOAL, Cogebra(), sp)
    np.testing.assert_allclose(got, [2, 4])


def test_interpret_errors():
    lex = lexicon()
    sp = spaces(2)
    with pytest.raises(UnknownWordError):
        interpret_phrase(['the', 'paper'], {'the': np.eye(2)}, lex, GOAL, Cogebra(), sp)
    with pytest.raises(ShapeError):
        interpret_phrase(['the', 'paper'], {'the': np.eye(3), 'paper': np.ones(2)}, lex, GOAL, Cogebra(), sp)
    with pytest.raises(NoDerivationError):
        interpret_phrase(['paper', 'the'], {'the': np.eye(2), 'paper': np.ones(2)}, lex, GOAL, Cogebra(), sp)


def test_interpret_picks_fitting_type():
    lex = parse_lexicon('bank\tN\nbank\tN/N\nriver\tN\n')
    sp = SpaceAssignment({'N': 2})
    words = {'bank': np.array([[0.0, 1.0], [1.0, 0.0]]), 'river': np.array([3.0, 4.0])}
    got = interpret_phrase(['bank', 'river'], words, lex, parse_formula('N'), Cogebra(), sp)
    np.testing.assert_allclose(got, [4, 3])


def _inputs(d, seed, diagonal=False):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal(d), rng.standard_normal(d)
    c = rng.standard_normal((d, d))
    dm = np.diag(rng.standard_normal(d)) if diagonal else rng.standard_normal((d, d))
    return a, b, c, dm


def _phrase(mod, a, b, c, dm, callable_that=False):
    words = word_meanings(a, b, c, dm, callable_that=callable_that)
    return interpret_phrase(PHRASE, words, lexicon(), GOAL, mod, spaces(len(a)))


def test_parasitic_gap_under_full_copy():
    a, b, c, dm = _inputs(3, 0)
    got = _phrase(FullCopy(), a, b, c, dm, callable_that=True)
    np.testing.assert_allclose(got, copy_model_vector(CopyModel.Full, a, b, c, dm), atol=1e-9)
    with pytest.raises(NonlinearityError):
        _phrase(FullCopy(), a, b, c, dm)


def test_parasitic_gap_under_cogebra():
    a, b, c, dm = _inputs(3, 1)
    expect = sum(a[i] * (np.eye(3)[i] * (c @ b)) * (dm @ np.eye(3)[i]) for i in range(3))
    for callable_that in (False, True):
        np.testing.assert_allclose(_phrase(Cogebra(), a, b, c, dm, callable_that), expect, atol=1e-9)
    # with a diagonal gerund matrix both cogebra formulas agree with the evaluation
    a, b, c, dm = _inputs(3, 2, diagonal=True)
    got = _phrase(Cogebra(), a, b, c, dm)
    for model in (CopyModel.CogebraA, CopyModel.CogebraB):
        np.testing.assert_allclose(got, copy_model_vector(model, a, b, c, dm), atol=1e-9)


def test_cogebra_and_full_differ_by_the_formula_difference():
    a, b, c, dm = _inputs(4, 3, diagonal=True)
    diff = _phrase(FullCopy(), a, b, c, dm, True) - _phrase(Cogebra(), a, b, c, dm)
    expect = copy_model_vector(CopyModel.Full, a, b, c, dm) - copy_model_vector(CopyModel.CogebraA, a, b, c, dm)
    np.testing.assert_allclose(diff, expect, atol=1e-9)
    assert np.linalg.norm(diff) > 1e-3


def test_parasitic_gap_under_cofree():
    a, b, c, dm = _inputs(3, 4)
    one = np.ones(3)
    expect = a * (c @ b) * (dm @ one) + one * (c @ b) * (dm @ a)
    np.testing.assert_allclose(_phrase(CofreeInspired(), a, b, c, dm), expect, atol=1e-9)
    np.testing.assert_allclose(_phrase(CofreeInspired(2.0), a, b, c, dm), 2 * expect, atol=1e-9)


def test_parasitic_gap_under_fock():
    # the derivation needs no promotion, so fock interprets it once !NP has its Fock shape
    a, b, c, dm = _inputs(3, 5)
    words = dict(word_meanings(a, b, c, dm), that=that_fock_tensor(3))
    got = interpret_phrase(PHRASE, words, lexicon(), GOAL, Fock(), spaces(3))
    np.testing.assert_allclose(got, _phrase(Cogebra(), a, b, c, dm), atol=1e-9)
    with pytest.raises(ShapeError):
        _phrase(Fock(), a, b, c, dm)


def test_promotion_under_fock_is_rejected():
    lex = parse_lexicon('gap\t!NP\nwants\tS/!!NP\n')
    words = {'gap': np.ones(4), 'wants': np.ones((2, 16))}
    sp = SpaceAssignment({'NP': 2, 'S': 2})
    with pytest.raises(ModalityError, match='lax monoidal structure not specified'):
        interpret_phrase(['wants', 'gap'], words, lex, parse_formula('S'), Fock(), sp)
    got = interpret_phrase(['wants', 'gap'], {'gap': np.ones(2), 'wants': np.eye(2)}, lex, parse_formula('S'),
                           Cogebra(), sp)
    np.testing.assert_allclose(got, [1, 1])


def test_word_tensor_files():
    words = {'the': np.eye(2), 'paper': np.array([1.0, -0.5]), 'that': np.arange(16.0).reshape(2, 2, 2, 2)}
    back = parse_word_tensors(format_word_tensors(words))
    assert list(back) == list(words)
    for w in words:
        np.testing.assert_array_equal(back[w], words[w])
    text = '# comment\nJohn\tshape 2\n1 2\n\nJohn\tshape 2\n3\n4\n'
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        got = parse_word_tensors(text)
    assert len(caught) == 1
    np.testing.assert_array_equal(got['John'], [3, 4])
    for bad in ('John\tshape 2\n1 2 3\n', '1 2\n', 'John\tshape 0\n', 'John\tshape 2\n1 x\n'):
        with pytest.raises(ValueError):
            parse_word_tensors(bad)
