"""Coalgebra modalities on finite-dimensional real spaces.

Every strategy works on flat coordinate arrays whose last axis is the space
``!V``; any leading axes are treated as a batch.  The identity-functor kinds
(Cogebra, CofreeInspired, FullCopy) have ``!V = V`` and trivial comonad and
lax monoidal structure.  Fock sends an n-dimensional space to its exterior
algebra of dimension ``2^n``.
"""
from __future__ import annotations

from math import prod

import numpy as np

from .fock import FockTensor, fock_dim


class ModalityError(ValueError):
    """A construct the chosen modality does not give a meaning to."""


LAX_UNSUPPORTED = 'lax monoidal structure not specified by the model'


########################################################################################################################
# Standalone maps on single vectors
########################################################################################################################

def _vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f'expected a vector, got shape {v.shape}')
    return v


def cogebra_delta(v) -> np.ndarray:
    """Basis copying ``e_i -> e_i (x) e_i`` extended linearly, i.e. ``diag(v)``."""
    return np.diag(_vector(v))


def cofree_delta(v, k: float = 1.0) -> np.ndarray:
    """``v (x) k1 + k1 (x) v`` with ``k1`` the constant-``k`` vector."""
    v = _vector(v)
    kv = np.full_like(v, float(k))
    return np.multiply.outer(v, kv) + np.multiply.outer(kv, v)


def full_delta(v) -> np.ndarray:
    """``v (x) v``; quadratic in ``v``, so not a linear map."""
    v = _vector(v)
    return np.multiply.outer(v, v)


def counit_e(v) -> float:
    """Coordinate sum: every basis vector goes to 1."""
    return float(_vector(v).sum())


########################################################################################################################
# Strategies
########################################################################################################################

class Modality:
    name = 'abstract'
    identity_functor = True
    linear = True
    categorical = True
    # FullCopy keeps the two copies of an unentangled factor as separate factors
    split_delta = False

    def space_map(self, n: int) -> int:
        return n

    def bang_shape(self, shape: tuple) -> tuple:
        return tuple(shape)

    def delta(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def counit(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64).sum(axis=-1)

    def epsilon(self, x: np.ndarray, shape: tuple = None) -> np.ndarray:
        """Comonad counit ``!A -> A``; ``shape`` is the shape of ``A``."""
        x = np.asarray(x, dtype=np.float64)
        return x if shape is None else x.reshape(x.shape[:-1] + tuple(shape))

    def comonad_delta(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=np.float64)

    def lax_m(self, a, b) -> np.ndarray:
        return np.multiply.outer(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))

    def lax_unit(self) -> np.ndarray:
        return np.array(1.0)

    def check_term(self, term) -> None:
        """Raise ``ModalityError`` if ``term`` uses structure this modality leaves open."""

    def __repr__(self):
        return f'{type(self).__name__}()'

    def __str__(self):
        return self.name


class Cogebra(Modality):
    name = 'cogebra'

    def delta(self, x):
        x = np.asarray(x, dtype=np.float64)
        return x[..., :, None] * np.eye(x.shape[-1])


class CofreeInspired(Modality):
    """Copying ``v -> v (x) k1 + k1 (x) v`` with coordinate-sum counit; not a comonoid in general."""

    def __init__(self, k: float = 1.0):
        k = float(k)
        if not np.isfinite(k):
            raise ValueError('k must be finite')
        self.k = k

    @property
    def name(self):
        return 'cofree' if self.k == 1.0 else f'cofree:{self.k:g}'

    def delta(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self.k * (x[..., :, None] + x[..., None, :])

    def __repr__(self):
        return f'CofreeInspired(k={self.k!r})'

    def __eq__(self, other):
        return isinstance(other, CofreeInspired) and other.k == self.k

    def __hash__(self):
        return hash(('cofree', self.k))


class FullCopy(Modality):
    """``v -> v (x) v``.  A baseline only: it is nonlinear, so it is not a coalgebra modality."""
    name = 'full'
    linear = False
    categorical = False
    split_delta = True

    def delta(self, x):
        x = np.asarray(x, dtype=np.float64)
        return x[..., :, None] * x[..., None, :]


class Fock(Modality):
    """Exterior algebra with the group-like comultiplication on wedge monomials.

    The comonad counit is the projection onto the first layer.  Neither the
    comonad comultiplication nor a lax monoidal structure is given, so any term
    built by promotion is rejected.
    """
    name = 'fock'
    identity_functor = False

    def space_map(self, n):
        return fock_dim(n)

    def bang_shape(self, shape):
        return (fock_dim(prod(shape)),)

    def delta(self, x):
        x = np.asarray(x, dtype=np.float64)
        return x[..., :, None] * np.eye(x.shape[-1])

    def epsilon(self, x, shape=None):
        x = np.asarray(x, dtype=np.float64)
        n = x.shape[-1].bit_length() - 1
        if x.shape[-1] != 1 << n:
            raise ValueError(f'last axis {x.shape[-1]} is not a Fock space dimension')
        out = x[..., [1 << i for i in range(n)]]
        return out if shape is None else out.reshape(x.shape[:-1] + tuple(shape))

    def comonad_delta(self, x):
        raise ModalityError('comonad comultiplication not specified by the model')

    def lax_m(self, a, b):
        raise ModalityError(LAX_UNSUPPORTED)

    def lax_unit(self):
        raise ModalityError(LAX_UNSUPPORTED)

    def check_term(self, term):
        from ..catsem import BangMap, ComonadDelta, Id, LaxM, LaxUnit, count, subterms
        if count(term, LaxM) or count(term, LaxUnit) or count(term, ComonadDelta):
            raise ModalityError(f'{LAX_UNSUPPORTED}: promotion (!R) needs m and the comonad '
                                f'comultiplication, neither of which fock provides')
        for t in subterms(term):
            if isinstance(t, BangMap) and not isinstance(t.f, Id):
                raise ModalityError('the action of ! on a non-identity map is not specified by the model')

    # convenience on FockTensor values
    def group_delta(self, x: FockTensor) -> np.ndarray:
        return self.delta(x.coeffs)


def lax_m(modality: Modality, a, b) -> np.ndarray:
    return modality.lax_m(a, b)


def parse_modality(text: str) -> Modality:
    """``cogebra``, ``cofree``, ``cofree:<k>``, ``full`` or ``fock``."""
    s = text.strip().lower()
    if s == 'cogebra':
        return Cogebra()
    if s == 'full':
        return FullCopy()
    if s == 'fock':
        return Fock()
    if s == 'cofree':
        return CofreeInspired()
    if s.startswith('cofree:'):
        try:
            return CofreeInspired(float(s[len('cofree:'):]))
        except ValueError:
            raise ValueError(f'bad k in modality {text!r}') from None
    raise ValueError(f'unknown modality {text!r}; expected cogebra, cofree[:k], full or fock')
