"""Connection coefficients of Daubechies scaling functions.

Two tables are provided.  :func:`moment_connection` returns

    J[r, a](n) = int x^r phi(x) phi^(a)(x - n) dx,        |n| <= L - 2,

which is everything needed to project ``x^r d^a`` onto a scaling space.  The
classic derivative coefficients follow from ``r = 0`` by integration by parts.
Both come from the refinement equation: each ``J[r, a]`` satisfies a linear
system whose scale ambiguity is removed by the polynomial-reproduction
condition ``sum_n M^a_n J[r, a](n) = a! M_r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .filters import WaveletFamily, _moments

__all__ = ["ConnectionCoefficients", "connection_coefficients", "moment_connection", "SmoothnessError"]


class SmoothnessError(ValueError):
    """Requested derivative order exceeds what the wavelet family supports."""


def _transfer(h: np.ndarray, power: int) -> np.ndarray:
    # T_p[n, m] = sum over 2n + l - k = m of h_k h_l k^p
    L = len(h)
    B = L - 2
    size = 2 * B + 1
    T = np.zeros((size, size))
    for i, n in enumerate(range(-B, B + 1)):
        for k in range(L):
            wk = h[k] * float(k) ** power
            for l in range(L):
                m = 2 * n + l - k
                if -B <= m <= B:
                    T[i, m + B] += wk * h[l]
    return T


@lru_cache(maxsize=None)
def _moment_connection_cached(order: int, lowpass: bytes, max_power: int, deriv: int):
    h = np.frombuffer(lowpass, dtype=float)
    B = len(h) - 2
    shifts = np.arange(-B, B + 1)
    M = _moments(h, max(max_power, deriv) + 1)
    transfers = [_transfer(h, p) for p in range(max_power + 1)]
    # M^a_n = int x^a phi(x - n) dx
    reproduce = np.array([sum(math.comb(deriv, t) * float(n) ** (deriv - t) * M[t]
                              for t in range(deriv + 1)) for n in shifts])
    eye = np.eye(len(shifts))
    tables = []
    for r in range(max_power + 1):
        c = 2.0 ** (deriv - r)
        lhs = eye - c * transfers[0]
        rhs = np.zeros(len(shifts))
        for s in range(r):
            rhs += c * math.comb(r, s) * (transfers[r - s] @ tables[s])
        system = np.vstack([lhs, reproduce])
        target = np.append(rhs, math.factorial(deriv) * M[r])
        sol = np.linalg.lstsq(system, target, rcond=None)[0]
        if r == 0:
            # phi^(a) pairs with phi: J[0,a](-n) = (-1)^a J[0,a](n)
            sol = 0.5 * (sol + (-1) ** deriv * sol[::-1])
        tables.append(sol)
    out = np.array(tables)
    out.setflags(write=False)
    return shifts, out


def moment_connection(family: WaveletFamily, max_power: int, deriv: int) -> tuple[np.ndarray, np.ndarray]:
    """Table ``J[r, n]`` for ``r = 0..max_power`` and shifts ``n = -(L-2)..(L-2)``.

    Returns ``(shifts, table)`` with ``table.shape == (max_power + 1, len(shifts))``.
    """
    if deriv < 0 or max_power < 0:
        raise ValueError("orders must be non-negative")
    if deriv >= family.order:
        raise SmoothnessError(
            f"derivative order {deriv} needs at least {deriv + 1} vanishing moments "
            f"(family has {family.order})")
    return _moment_connection_cached(family.order, family.lowpass.tobytes(), max_power, deriv)


@dataclass(frozen=True)
class ConnectionCoefficients:
    """Banded table ``values[k] = int phi^(d1)(x - k) phi^(d2)(x) dx`` for ``k in offsets``.

    With this convention the Galerkin matrix ``<phi_k^(d1), phi_l^(d2)>`` has
    entries ``values[k - l]`` (scaled by the grid spacing).
    """

    d1: int
    d2: int
    offsets: np.ndarray
    values: np.ndarray

    def __getitem__(self, k: int) -> float:
        B = (len(self.offsets) - 1) // 2
        if abs(k) > B:
            return 0.0
        return float(self.values[k + B])

    def periodic_matrix(self, n: int, spacing: float = 1.0) -> np.ndarray:
        """Dense ``n x n`` periodized matrix ``<phi_k^(d1), phi_l^(d2)>`` on a grid of given spacing."""
        mat = np.zeros((n, n))
        for k in range(n):
            for off, val in zip(self.offsets, self.values):
                mat[k, (k - off) % n] += val
        return mat / spacing ** (self.d1 + self.d2)

    def to_text(self) -> str:
        lines = [f"# connection coefficients d1={self.d1} d2={self.d2}", "# k value"]
        lines += [f"{int(k)} {v!r}" for k, v in zip(self.offsets, self.values)]
        return "\n".join(lines) + "\n"


def connection_coefficients(family: WaveletFamily, d1: int, d2: int) -> ConnectionCoefficients:
    """Derivative connection coefficients, banded to ``|k| <= 2 N_v - 2``.

    Raises :class:`SmoothnessError` unless ``d1 + d2 < N_v``.
    """
    if d1 < 0 or d2 < 0:
        raise ValueError("derivative orders must be non-negative")
    if d1 + d2 >= family.order:
        raise SmoothnessError(
            f"d1 + d2 = {d1 + d2} requires more than {family.order} vanishing moments")
    shifts, table = moment_connection(family, 0, d1 + d2)
    # int phi^(d1)(x-k) phi^(d2)(x) dx = (-1)^d1 int phi(x-k) phi^(d1+d2)(x) dx = (-1)^d1 J(-k)
    values = (-1) ** d1 * table[0][::-1].copy()
    values.setflags(write=False)
    return ConnectionCoefficients(d1, d2, shifts.copy(), values)
