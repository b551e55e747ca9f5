import json
import warnings
from importlib import resources

import numpy as np
import pytest

from banglambek.experiment import (
    CopyModel, DataError, GapEntry, MissingWordError, compose_phrase, copy_model_vector, load_dataset, load_triples,
    load_verbs, parse_dataset, parse_embeddings, prep_combine, run_disambiguation, verbs_from_triples,
)
from banglambek.evalsem import format_word_tensors

from synthetic import synthetic_dataset

HEADER = 'group_id,head_noun,subject,amb_verb,prep,gerund_verb,meaning1,meaning2,correct\n'

# head noun A, subject B, verb C, gerund D; expected vectors worked out by hand
CASES = [
    (dict(a=[1, 2], b=[1, 1], c=np.eye(2), d=np.eye(2)),
     {CopyModel.Full: [1, 4], CopyModel.CogebraA: [1, 2], CopyModel.CogebraB: [1, 2],
      CopyModel.CofreeInspired: [4, 9]}),
    (dict(a=[2, -1], b=[1, 3], c=[[0, 1], [1, 0]], d=[[2, 0], [1, 1]]),
     {CopyModel.Full: [24, -1], CopyModel.CogebraA: [12, -2], CopyModel.CogebraB: [12, 1],
      CopyModel.CofreeInspired: [56, 2]}),
]


def entry(**kw):
    base = dict(group_id='g', head_noun='n', subject=('s',), amb_verb='v', prep='after', gerund_verb='ger',
                meaning1='m1', meaning2='m2', correct=1)
    base.update(kw)
    return GapEntry(**base)


@pytest.mark.parametrize('inputs,expected', CASES)
def test_hand_computed_cases(inputs, expected):
    emb = {'n': np.array(inputs['a'], float), 's': np.array(inputs['b'], float)}
    verbs = {'v': np.array(inputs['c'], float), 'ger': np.array(inputs['d'], float)}
    for model, want in expected.items():
        np.testing.assert_allclose(compose_phrase(entry(), model, emb, verbs), want, atol=1e-12)


def test_add_mode():
    a, b, c, d = np.array([2.0, -1]), np.array([1.0, 3]), np.array([[0.0, 1], [1, 0]]), np.array([[2.0, 0], [1, 1]])
    np.testing.assert_allclose(copy_model_vector(CopyModel.Full, a, b, c, d, 'add'), [10, 0], atol=1e-12)
    with pytest.raises(ValueError):
        prep_combine(a, b, 'concat')


def test_zero_gerund_annihilates_cogebra_a():
    rng = np.random.default_rng(0)
    a, b, c = rng.standard_normal(3), rng.standard_normal(3), rng.standard_normal((3, 3))
    np.testing.assert_array_equal(copy_model_vector(CopyModel.CogebraA, a, b, c, np.zeros((3, 3))), np.zeros(3))


def test_cofree_symmetry():
    rng = np.random.default_rng(1)
    b, c = rng.standard_normal(3), rng.standard_normal((3, 3))
    one = np.ones(3)
    half = one * (c @ b) + c @ one
    np.testing.assert_allclose(copy_model_vector(CopyModel.CofreeInspired, one, b, c, c), half * half, atol=1e-12)


def test_subject_words_are_summed():
    emb = {'n': np.array([1.0, 2.0]), 'young': np.array([1.0, 0.0]), 'woman': np.array([0.0, 1.0])}
    verbs = {'v': np.eye(2), 'ger': np.eye(2)}
    got = compose_phrase(entry(subject='young woman'), CopyModel.Full, emb, verbs)
    np.testing.assert_allclose(got, [1, 4])
    with pytest.raises(MissingWordError):
        compose_phrase(entry(subject='old woman'), CopyModel.Full, emb, verbs)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        copy_model_vector(CopyModel.Full, np.ones(2), np.ones(2), np.eye(3), np.eye(2))


def test_exact_meaning_scores_one():
    entries, emb, verbs = synthetic_dataset(10, 4, mix=1.0, seed=3)
    for e in entries:
        verbs[e.amb_verb] = verbs[e.meaning1]
    entries = [GapEntry(**{**e.__dict__, 'correct': 1}) for e in entries]
    for model in CopyModel:
        assert run_disambiguation(entries, model, emb, verbs).score == 1.0


def test_ties_score_half():
    entries, emb, verbs = synthetic_dataset(6, 4, seed=4)
    for e in entries:
        verbs[e.meaning2] = verbs[e.meaning1]
    for model in CopyModel:
        rep = run_disambiguation(entries, model, emb, verbs)
        assert rep.score == 0.5 and len(rep.entries) == 6


def test_zero_phrase_is_skipped():
    entries, emb, verbs = synthetic_dataset(4, 3, seed=5)
    emb[entries[0].head_noun] = np.zeros(3)
    rep = run_disambiguation(entries, CopyModel.CogebraA, emb, verbs)
    assert [g for g, _ in rep.skipped] == ['g0']
    assert len(rep.entries) == 3
    del emb[entries[1].subject[0]]
    rep = run_disambiguation(entries, CopyModel.Full, emb, verbs)
    assert [g for g, _ in rep.skipped] == ['g0', 'g1']


def test_score_properties():
    entries, emb, verbs = synthetic_dataset(20, 8, mix=0.6, seed=6)
    for model in CopyModel:
        for metric in ('cosine', 'euclidean'):
            rep = run_disambiguation(entries, model, emb, verbs, metric=metric)
            assert 0.0 <= rep.score <= 1.0
            assert all(e.score in (0.0, 0.5, 1.0) for e in rep.entries)
            assert rep.score == pytest.approx(np.mean([e.score for e in rep.entries]))
            # swapping the labels turns wins into losses
            flipped = [GapEntry(**{**e.__dict__, 'correct': 3 - e.correct}) for e in entries]
            assert run_disambiguation(flipped, model, emb, verbs, metric=metric).score == pytest.approx(
                1 - rep.score)
    with pytest.raises(ValueError):
        run_disambiguation(entries, CopyModel.Full, emb, verbs, metric='manhattan')
    with pytest.raises(ValueError):
        run_disambiguation([], CopyModel.Full, emb, verbs)


def test_synthetic_mixture():
    entries, emb, verbs = synthetic_dataset(20, 8, mix=0.9, seed=0)
    scores = {m: run_disambiguation(entries, m, emb, verbs).score for m in CopyModel}
    assert all(s >= 0.9 for s in scores.values())
    assert scores[CopyModel.CogebraA] >= scores[CopyModel.CogebraB]


def test_report_output():
    entries, emb, verbs = synthetic_dataset(3, 3, seed=7)
    rep = run_disambiguation(entries, CopyModel.CogebraA, emb, verbs)
    data = json.loads(rep.to_json())
    assert data['model'] == 'cogebra-a' and data['scored'] == 3
    assert rep.to_json() == run_disambiguation(entries, CopyModel.CogebraA, emb, verbs).to_json()
    assert 'score' in rep.to_table().splitlines()[-1]


def test_bundled_examples():
    path = resources.files('banglambek').joinpath('data/gap_examples.csv')
    rows = load_dataset(path)
    assert [r.group_id for r in rows] == ['accounts', 'nails']
    assert rows[0].subject == ('local', 'government')
    assert (rows[0].amb_verb, rows[0].meaning1, rows[0].meaning2) == ('file', 'register', 'smooth')
    assert [r.correct for r in rows] == [1, 2]


def test_dataset_errors():
    assert parse_dataset(HEADER) == []
    with pytest.raises(DataError) as err:
        parse_dataset(HEADER + 'a,n,s,v,p,g,m1,m2,1\nb,n,s,v,p,g,m1,m2,3\n')
    assert err.value.line == 3
    with pytest.raises(DataError):
        parse_dataset('group_id,head_noun\nx,y\n')
    with pytest.raises(DataError):
        parse_dataset(HEADER + 'a,n,,v,p,g,m1,m2,1\n')


def test_embeddings():
    t = parse_embeddings('2 3\ncat 1 2 3\ndog 0 0 1\n')
    assert sorted(t) == ['cat', 'dog']
    np.testing.assert_array_equal(t['cat'], [1, 2, 3])
    assert sorted(parse_embeddings('cat 1 2\ndog 3 4\n')) == ['cat', 'dog']
    with pytest.raises(DataError) as err:
        parse_embeddings('cat 1 2\ndog 3\n')
    assert err.value.line == 2
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        t = parse_embeddings('cat 1 2\ncat 5 6\n')
    assert len(caught) == 1
    np.testing.assert_array_equal(t['cat'], [5, 6])
    with pytest.raises(DataError):
        parse_embeddings('cat 1 2\n', format='headered')
    with pytest.raises(DataError):
        parse_embeddings('cat 1 x\n')


def test_verb_files(tmp_path):
    p = tmp_path / 'verbs.txt'
    p.write_text(format_word_tensors({'file': np.eye(2), 'cut': np.ones((2, 2))}))
    verbs = load_verbs(p, dim=2)
    np.testing.assert_array_equal(verbs['cut'], np.ones((2, 2)))
    with pytest.raises(DataError):
        load_verbs(p, dim=3)
    p.write_text(format_word_tensors({'file': np.ones((2, 3))}))
    with pytest.raises(DataError):
        load_verbs(p)


def test_triples(tmp_path):
    p = tmp_path / 'triples.txt'
    p.write_text('# verb subject object\nfile clerk report\nfile clerk form\ncut woman nail\n')
    emb = {'clerk': np.array([1.0, 0.0]), 'report': np.array([0.0, 1.0]), 'form': np.array([1.0, 1.0]),
           'woman': np.array([2.0, 0.0])}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always')
        verbs = verbs_from_triples(load_triples(p), emb)
    assert len(caught) == 1
    np.testing.assert_array_equal(verbs['file'], [[1, 2], [0, 0]])
    assert 'cut' not in verbs
    p.write_text('file clerk\n')
    with pytest.raises(DataError):
        load_triples(p)
