"""Fermionic Fock space (exterior algebra) of an n-dimensional space.

Basis monomials ``e_{i1} ^ ... ^ e_{ik}`` with ``i1 < ... < ik`` are stored as
bitmasks; coefficient vectors are indexed by the mask itself, so the basis
order is the masks ascending as unsigned integers.  Layer ``k`` holds the
masks of popcount ``k``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

MAX_GENERATORS = 16
DUAL_CODELTA_MAX = 3


class FockError(ValueError):
    pass


def fock_dim(n: int) -> int:
    if not isinstance(n, int) or n < 1:
        raise FockError(f'generator dimension must be a positive integer, got {n!r}')
    return 1 << n


def popcount(mask: int) -> int:
    return bin(mask).count('1')


def layer_masks(n: int, k: int) -> list[int]:
    return [m for m in range(1 << n) if popcount(m) == k]


def wedge_sign(a: int, b: int) -> int:
    """Sign of ``mono(a) ^ mono(b)`` after sorting; 0 when the monomials share a generator."""
    if a & b:
        return 0
    inversions = 0
    j = 0
    while b >> j:
        if (b >> j) & 1:
            # generators of a with a larger index than j
            inversions += popcount(a >> (j + 1))
        j += 1
    return -1 if inversions & 1 else 1


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if (mask >> i) & 1)


@dataclass(frozen=True, eq=False)
class FockTensor:
    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        fock_dim(self.n)
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.shape != (1 << self.n,):
            raise FockError(f'expected {1 << self.n} coefficients for n={self.n}, got shape {c.shape}')
        object.__setattr__(self, 'coeffs', c)

    @classmethod
    def zero(cls, n: int) -> FockTensor:
        return cls(n, np.zeros(fock_dim(n)))

    @classmethod
    def basis(cls, n: int, indices=()) -> FockTensor:
        """The monomial on the given (0-based) generators, in increasing order."""
        idx = tuple(indices)
        if len(set(idx)) != len(idx) or any(not 0 <= i < n for i in idx) or list(idx) != sorted(idx):
            raise FockError(f'monomial indices must be distinct, increasing and below {n}: {idx}')
        c = np.zeros(fock_dim(n))
        c[mask_of(idx)] = 1.0
        return cls(n, c)

    @classmethod
    def one(cls, n: int) -> FockTensor:
        return cls.basis(n, ())

    @classmethod
    def from_vector(cls, v) -> FockTensor:
        """Inject a vector of V into the first layer."""
        v = np.asarray(v, dtype=np.float64).ravel()
        c = np.zeros(fock_dim(len(v)))
        c[[1 << i for i in range(len(v))]] = v
        return cls(len(v), c)

    def layer(self, k: int) -> np.ndarray:
        return self.coeffs[layer_masks(self.n, k)]

    def homogeneous_degree(self):
        """The layer this tensor lives in, or None if it is zero or mixed."""
        nz = [popcount(m) for m in np.flatnonzero(self.coeffs)]
        return nz[0] if nz and all(k == nz[0] for k in nz) else None

    def __add__(self, other):
        _same_n(self, other)
        return FockTensor(self.n, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _same_n(self, other)
        return FockTensor(self.n, self.coeffs - other.coeffs)

    def __mul__(self, s):
        return FockTensor(self.n, self.coeffs * float(s))

    __rmul__ = __mul__

    def __neg__(self):
        return FockTensor(self.n, -self.coeffs)

    def __xor__(self, other):
        return wedge_product(self, other)

    def __eq__(self, other):
        return isinstance(other, FockTensor) and self.n == other.n and np.array_equal(self.coeffs, other.coeffs)

    def allclose(self, other, atol=1e-9) -> bool:
        return self.n == other.n and np.allclose(self.coeffs, other.coeffs, rtol=0, atol=atol)

    def __str__(self):
        return format_fock(self)


def _same_n(x: FockTensor, y: FockTensor):
    if x.n != y.n:
        raise FockError(f'generator dimension mismatch: {x.n} vs {y.n}')


@lru_cache(maxsize=None)
def multiplication_table(n: int) -> np.ndarray:
    """``M[c, a, b]`` with ``mono(a) ^ mono(b) = M[c, a, b] mono(c)``; entries in {-1, 0, 1}."""
    if n > MAX_GENERATORS // 2:
        raise FockError(f'multiplication table for n={n} is too large')
    d = fock_dim(n)
    table = np.zeros((d, d, d), dtype=np.int8)
    for a in range(d):
        for b in range(d):
            s = wedge_sign(a, b)
            if s:
                table[a | b, a, b] = s
    table.setflags(write=False)
    return table


def multiplication_matrix(n: int) -> np.ndarray:
    """The ``2^n x (2^n)^2`` matrix of the wedge product on the flattened pair basis."""
    d = fock_dim(n)
    return multiplication_table(n).reshape(d, d * d)


def wedge_product(x: FockTensor, y: FockTensor) -> FockTensor:
    _same_n(x, y)
    out = np.zeros(fock_dim(x.n))
    for a in np.flatnonzero(x.coeffs):
        for b in np.flatnonzero(y.coeffs):
            s = wedge_sign(int(a), int(b))
            if s:
                out[a | b] += s * x.coeffs[a] * y.coeffs[b]
    return FockTensor(x.n, out)


def fock_eps(x: FockTensor) -> np.ndarray:
    """Projection onto the first layer, as a vector of V."""
    return x.coeffs[[1 << i for i in range(x.n)]].copy()


def fock_group_delta(x: FockTensor) -> np.ndarray:
    """Group-like comultiplication: each basis monomial ``b`` goes to ``b (x) b``."""
    return np.diag(x.coeffs)


def fock_counit(x: FockTensor) -> float:
    """The counit matching the group-like comultiplication: every monomial goes to 1."""
    return float(x.coeffs.sum())


def fock_dual_codelta(x: FockTensor) -> np.ndarray:
    """Transpose of the wedge multiplication applied to ``x``, as a ``2^n x 2^n`` array."""
    if x.n > DUAL_CODELTA_MAX:
        raise FockError(f'dual comultiplication is limited to n <= {DUAL_CODELTA_MAX} generators, got {x.n}')
    d = fock_dim(x.n)
    return (multiplication_matrix(x.n).T.astype(np.float64) @ x.coeffs).reshape(d, d)


########################################################################################################################
# Text form: "2*e1^e3 - e2 + 1"  (generators are 1-based in text)
########################################################################################################################

_TERM_RE = re.compile(r'\s*([+-])?\s*(?:(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)\s*\*?\s*)?'
                      r'(e\d+(?:\s*\^\s*e\d+)*|1)?\s*')


def parse_fock(text: str, n: int) -> FockTensor:
    """Parse a linear combination of monomials, or ``n``/``2^n`` comma-separated numbers."""
    s = text.strip()
    if not s:
        raise FockError('empty Fock tensor')
    if ',' in s or re.fullmatch(r'[-+0-9.eE\s]+', s) and not re.search(r'e\d', s):
        vals = [float(v) for v in s.split(',')]
        if len(vals) == fock_dim(n):
            return FockTensor(n, np.array(vals))
        if len(vals) == n:
            return FockTensor.from_vector(vals)
        raise FockError(f'expected {n} or {fock_dim(n)} numbers, got {len(vals)}')
    out = np.zeros(fock_dim(n))
    pos = 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise FockError(f'cannot parse Fock tensor at position {pos}: {s[pos:]!r}')
        sign = -1.0 if m.group(1) == '-' else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        mono = m.group(3) or '1'
        if mono == '1':
            gens = []
        else:
            gens = [int(g) - 1 for g in re.findall(r'e(\d+)', mono)]
        if any(not 0 <= g < n for g in gens):
            raise FockError(f'generator out of range 1..{n} in {mono!r}')
        if len(set(gens)) == len(gens):
            # reorder into increasing order, tracking the sign of the sort
            perm_sign = 1
            g = list(gens)
            for i in range(len(g)):
                for j in range(len(g) - 1 - i):
                    if g[j] > g[j + 1]:
                        g[j], g[j + 1] = g[j + 1], g[j]
                        perm_sign = -perm_sign
            out[mask_of(g)] += sign * coef * perm_sign
        pos = m.end()
    return FockTensor(n, out)


def format_monomial(mask: int) -> str:
    idx = indices_of(mask)
    return '^'.join(f'e{i + 1}' for i in idx) if idx else '1'


def format_fock(x: FockTensor, digits: int = 9) -> str:
    parts = []
    for m in range(len(x.coeffs)):
        c = x.coeffs[m]
        if c == 0:
            continue
        mono = format_monomial(m)
        mag = f'{abs(c):.{digits}g}'
        term = mono if mag == '1' and mono != '1' else (mag if mono == '1' else f'{mag}*{mono}')
        parts.append(('-' if c < 0 else '+', term))
    if not parts:
        return '0'
    head = ('-' if parts[0][0] == '-' else '') + parts[0][1]
    return head + ''.join(f' {s} {t}' for s, t in parts[1:])


def layer_sizes(n: int) -> list[int]:
    return [comb(n, k) for k in range(n + 1)]
