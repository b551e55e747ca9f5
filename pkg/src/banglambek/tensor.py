"""Dense real tensors.  A tensor is a float64 ``numpy.ndarray``; a scalar has shape ``()``."""
from __future__ import annotations

import numpy as np

Tensor = np.ndarray

EXACT_TOL = 1e-9
PIPELINE_TOL = 1e-6


class ShapeError(ValueError):
    pass


class ZeroVectorError(ValueError):
    pass


def as_tensor(x) -> Tensor:
    t = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(t)):
        raise ValueError('tensor entries must be finite')
    return t


def outer(a, b) -> Tensor:
    return np.multiply.outer(as_tensor(a), as_tensor(b))


def contract(a, b, axes) -> Tensor:
    """Sum over paired axes ``[(axis_of_a, axis_of_b), ...]``; unpaired axes of ``a`` come first."""
    a, b = as_tensor(a), as_tensor(b)
    pairs = list(axes)
    for i, j in pairs:
        if not (-a.ndim <= i < a.ndim and -b.ndim <= j < b.ndim):
            raise ShapeError(f'axis pair ({i}, {j}) out of range for shapes {a.shape}, {b.shape}')
        if a.shape[i] != b.shape[j]:
            raise ShapeError(f'cannot contract axis {i} (extent {a.shape[i]}) '
                             f'with axis {j} (extent {b.shape[j]})')
    return np.tensordot(a, b, axes=([i for i, _ in pairs], [j for _, j in pairs]))


def cosine(a, b) -> float:
    a, b = as_tensor(a).ravel(), as_tensor(b).ravel()
    if a.shape != b.shape:
        raise ShapeError(f'shape mismatch {a.shape} vs {b.shape}')
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVectorError('cosine of a zero vector is undefined')
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def euclidean(a, b) -> float:
    a, b = as_tensor(a).ravel(), as_tensor(b).ravel()
    if a.shape != b.shape:
        raise ShapeError(f'shape mismatch {a.shape} vs {b.shape}')
    return float(np.linalg.norm(a - b))
