"""Daubechies filters, scaling-function moments and cascade sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "WaveletFamily",
    "build_family",
    "monomial_moments",
    "scaling_function_values",
    "UnsupportedOrderError",
]

MAX_ORDER = 10


class UnsupportedOrderError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WaveletFamily:
    """Orthonormal Daubechies family with ``order`` vanishing moments.

    ``lowpass`` has length ``2 * order`` and sums to sqrt(2); the highpass
    filter is the quadrature mirror ``g_k = (-1)^k h_{L-1-k}``.
    """

    order: int
    lowpass: np.ndarray

    @property
    def highpass(self) -> np.ndarray:
        h = self.lowpass
        k = np.arange(len(h))
        return (-1.0) ** k * h[::-1]

    @property
    def length(self) -> int:
        return len(self.lowpass)

    @property
    def support(self) -> tuple[int, int]:
        """Support of the scaling function, ``[0, 2 * order - 1]``."""
        return 0, self.length - 1

    @property
    def bandwidth(self) -> int:
        """Largest shift with overlapping scaling functions."""
        return self.length - 2

    def __eq__(self, other):
        return isinstance(other, WaveletFamily) and self.order == other.order

    def __hash__(self):
        return hash(("db", self.order))

    def __repr__(self):
        return f"WaveletFamily(order={self.order})"


def _daubechies_lowpass(order: int) -> np.ndarray:
    if order == 1:
        return np.array([1.0, 1.0]) / math.sqrt(2.0)
    # spectral factorization of P(y) = sum_k C(N-1+k, k) y^k,  y = sin^2(w/2)
    poly = [math.comb(order - 1 + k, k) for k in range(order)]
    y_roots = np.roots(poly[::-1])
    z_roots = []
    for y in y_roots:
        # y = (2 - z - 1/z) / 4  ->  z^2 - (2 - 4y) z + 1 = 0; keep the root inside the unit disk
        b = 2.0 - 4.0 * y
        disc = np.sqrt(b * b - 4.0 + 0j)
        z1, z2 = (b + disc) / 2.0, (b - disc) / 2.0
        z_roots.append(z1 if abs(z1) < 1.0 else z2)
    h = np.real(np.poly([-1.0] * order + z_roots))
    return h / h.sum() * math.sqrt(2.0)


@lru_cache(maxsize=None)
def build_family(order: int) -> WaveletFamily:
    """Daubechies family with ``order`` vanishing moments (1 is Haar)."""
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_ORDER:
        raise UnsupportedOrderError(f"unsupported wavelet order {order!r}; expected 1..{MAX_ORDER}")
    h = _daubechies_lowpass(int(order))
    h.setflags(write=False)
    return WaveletFamily(int(order), h)


def _moments(h: np.ndarray, max_degree: int) -> np.ndarray:
    # M_m (1 - 2^-m) = 2^-(m+1) sqrt(2) sum_{r<m} C(m,r) M_r sum_k h_k k^(m-r)
    k = np.arange(len(h), dtype=float)
    filt = [float(np.sum(h * k ** s)) for s in range(max_degree + 1)]
    m_ = [1.0]
    for m in range(1, max_degree + 1):
        acc = sum(math.comb(m, r) * m_[r] * filt[m - r] for r in range(m))
        m_.append(math.sqrt(2.0) * acc / 2.0 ** (m + 1) / (1.0 - 2.0 ** -m))
    return np.array(m_)


def monomial_moments(family: WaveletFamily, max_degree: int) -> np.ndarray:
    """``M[m] = int x^m phi(x) dx`` for ``m = 0..max_degree``, from the filter alone."""
    if max_degree < 0 or max_degree > 2 * family.order:
        raise ValueError(f"max_degree must lie in [0, {2 * family.order}]")
    return _moments(family.lowpass, max_degree)


def _integer_values(h: np.ndarray, deriv: int) -> np.ndarray:
    # phi^(d)(n), n = 0..L-1, is the eigenvector of sqrt(2) 2^d h_{2i-j} for eigenvalue 1
    L = len(h)
    A = np.zeros((L, L))
    for i in range(L):
        for j in range(L):
            if 0 <= 2 * i - j < L:
                A[i, j] = math.sqrt(2.0) * h[2 * i - j]
    w, v = np.linalg.eig(A)
    idx = int(np.argmin(np.abs(w - 2.0 ** -deriv)))
    vec = np.real(v[:, idx])
    n = np.arange(L, dtype=float)
    if deriv == 0:
        vec = vec / vec.sum()
    else:
        # sum_n (-n)^d / d! phi^(d)(n) = 1  (polynomial reproduction of x^d)
        vec = vec / (np.sum((-n) ** deriv * vec) / math.factorial(deriv))
    return vec


@lru_cache(maxsize=64)
def scaling_function_values(family: WaveletFamily, level: int, deriv: int = 0) -> np.ndarray:
    """Samples of ``phi`` (or its derivative) at ``x = m / 2**level`` on the support.

    Computed with the cascade algorithm from the exact integer values.  The
    returned array has ``(L - 1) * 2**level + 1`` entries and is read-only.
    Haar is sampled as the left-closed indicator of ``[0, 1)``.
    """
    h = family.lowpass
    L = len(h)
    if family.order == 1:
        if deriv:
            raise ValueError("Haar scaling function has no derivative")
        vals = np.zeros(2 ** level + 1)
        vals[:-1] = 1.0
        vals.setflags(write=False)
        return vals
    if deriv >= family.order:
        raise ValueError("derivative order exceeds smoothness of the family")
    vals = _integer_values(h, deriv)
    scale = math.sqrt(2.0) * 2.0 ** deriv
    for s in range(1, level + 1):
        n = (L - 1) * 2 ** s + 1
        new = np.zeros(n)
        m = np.arange(n)
        step = 2 ** (s - 1)
        for k in range(L):
            idx = m - k * step
            ok = (idx >= 0) & (idx < len(vals))
            new[ok] += h[k] * vals[idx[ok]]
        vals = new * scale
    vals.setflags(write=False)
    return vals
