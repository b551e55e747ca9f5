"""The parasitic-gap phrase "the paper that John signed without reading" with copy-object word meanings.

All atoms get the same dimension ``d``.  With head noun vector ``A``, subject
``B``, verb matrix ``C`` and gerund matrix ``D`` the word meanings are chosen so
that the phrase evaluates to ``(x1 * CB) * (D x2)`` (elementwise), where
``x1 (x) x2`` is the copy of ``A`` made by the modality.
"""
from __future__ import annotations

from importlib import resources

import numpy as np

from .evalsem import SpaceAssignment, WordFunction
from .formula import Lexicon, parse_formula, parse_lexicon

PHRASE = ('the', 'paper', 'that', 'John', 'signed', 'without', 'reading')
GOAL = parse_formula('NP')


def lexicon_text() -> str:
    return resources.files('banglambek').joinpath('data/parasitic_gap.lex').read_text(encoding='utf-8')


def lexicon() -> Lexicon:
    return parse_lexicon(lexicon_text())


def spaces(d: int) -> SpaceAssignment:
    return SpaceAssignment.uniform(('N', 'NP', 'S'), d)


def signed_tensor(c) -> np.ndarray:
    """``(NP\\S)/NP`` with ``signed(subj, obj) = obj * (C subj)``; axes (subject, S, object)."""
    c = np.asarray(c, dtype=np.float64)
    d = c.shape[0]
    return np.einsum('kj,kl->jkl', c, np.eye(d))


def without_tensor(d: int) -> np.ndarray:
    """``((NP\\S)\\(NP\\S))/NP``: ``without(vp, obj)(subj) = (subj . vp) * obj``."""
    eye = np.eye(d)
    return np.einsum('ac,bd,de->abcde', eye, eye, eye)


def that_tensor(d: int) -> np.ndarray:
    """``(N\\N)/(S/!NP)`` sending a clause ``F`` to ``n -> F n`` (axes: N in, N out, S, !NP)."""
    eye = np.eye(d)
    return np.einsum('bk,al->abkl', eye, eye)


def that_fock_tensor(d: int) -> np.ndarray:
    """``that`` for the Fock modality, where ``!NP`` has dimension ``2^d``: feeds the clause the layer-1 copy of n."""
    t = np.zeros((d, d, d, 1 << d))
    for i in range(d):
        for k in range(d):
            t[i, k, k, 1 << i] = 1.0
    return t


def _that(clause):
    if callable(clause):
        return WordFunction(lambda n: clause(n), getattr(clause, 'linear', True))
    return WordFunction(lambda n: np.asarray(clause) @ n)


that_function = WordFunction(_that)


def word_meanings(a, b, c, dmat, callable_that: bool = False) -> dict:
    a = np.asarray(a, dtype=np.float64)
    d = a.shape[0]
    return {
        'the': np.eye(d),
        'paper': a,
        'that': that_function if callable_that else that_tensor(d),
        'John': np.asarray(b, dtype=np.float64),
        'signed': signed_tensor(c),
        'without': without_tensor(d),
        'reading': np.asarray(dmat, dtype=np.float64),
    }
