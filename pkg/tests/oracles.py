"""Independent reference computations used by the tests.

Nothing here calls into the package's numerical kernels: filters come from
closed forms (or PyWavelets when installed), scaling functions from a
separate cascade implementation, and oscillator eigenfunctions from the
Laguerre closed form.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import sympy as sp
from scipy.special import eval_laguerre

SQRT3 = math.sqrt(3.0)

#: Daubechies-2 lowpass filter in closed form, normalized to sum sqrt(2)
DB2 = np.array([1 + SQRT3, 3 + SQRT3, 3 - SQRT3, 1 - SQRT3]) / (4 * math.sqrt(2.0))

#: Daubechies-3 lowpass filter (standard tabulated values)
DB3 = np.array([0.33267055295008263, 0.8068915093110925, 0.45987750211849154,
                -0.13501102001025458, -0.08544127388202666, 0.03522629188570953])


def wigner_oscillator(n: int, q, p, hbar: float = 1.0):
    """Wigner function of the n-th oscillator eigenstate (m = omega = 1)."""
    r2 = (np.asarray(q) ** 2 + np.asarray(p) ** 2) / hbar
    return (-1) ** n / (math.pi * hbar) * np.exp(-r2) * eval_laguerre(n, 2.0 * r2)


def wigner_oscillator_sympy(n: int, hbar=sp.Integer(1)):
    q, p = sp.symbols("q p", real=True)
    r2 = (q ** 2 + p ** 2) / hbar
    return q, p, (-1) ** n / (sp.pi * hbar) * sp.exp(-r2) * sp.assoc_laguerre(n, 0, 2 * r2)


def apply_operator_sympy(op, expr, q, p):
    """Apply a PhaseSpaceOperator to a sympy expression term by term."""
    total = sp.Integer(0)
    for coeff, dq, dp in op.terms:
        c = sp.Integer(0)
        for (a, b), v in coeff:
            v = complex(v)
            c += (sp.nsimplify(v.real) + sp.I * sp.nsimplify(v.imag)) * q ** a * p ** b
        d = expr
        if dq:
            d = sp.diff(d, q, dq)
        if dp:
            d = sp.diff(d, p, dp)
        total += c * d
    return total


def coherent_wigner(q, p, q0, p0, hbar=1.0):
    return np.exp(-((q - q0) ** 2 + (p - p0) ** 2) / hbar) / (math.pi * hbar)


def cascade(h: np.ndarray, level: int, deriv: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Values of phi^(deriv) at x = m / 2**level on [0, L-1] by the cascade algorithm.

    Returns ``(x, values)``.
    """
    h = np.asarray(h, dtype=float)
    L = len(h)
    # integer samples: eigenvector of M[i, j] = sqrt(2) h[2i - j] for eigenvalue 2**-deriv
    M = np.zeros((L, L))
    for i in range(L):
        for j in range(L):
            k = 2 * i - j
            if 0 <= k < L:
                M[i, j] = math.sqrt(2) * h[k]
    w, V = np.linalg.eig(M)
    v = np.real(V[:, np.argmin(np.abs(w - 2.0 ** -deriv))])
    n = np.arange(L)
    v = v / (np.sum(v) if deriv == 0 else np.sum((-n) ** deriv * v) / math.factorial(deriv))
    # refine: phi(x / 2**(s+1)) from phi at level s
    vals = {0: v}
    cur = v
    for s in range(1, level + 1):
        size = (L - 1) * 2 ** s + 1
        new = np.zeros(size)
        for m in range(size):
            acc = 0.0
            # phi(m / 2**s) = sqrt2 2^d sum_k h_k phi(m / 2**(s-1) - k)
            for k in range(L):
                idx = m - k * 2 ** (s - 1)
                if 0 <= idx < len(cur):
                    acc += h[k] * cur[idx]
            new[m] = math.sqrt(2) * 2 ** deriv * acc
        cur = new
    x = np.arange(len(cur)) / 2 ** level
    return x, cur


def cascade_fast(h: np.ndarray, level: int, deriv: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized variant of :func:`cascade` for fine levels."""
    h = np.asarray(h, dtype=float)
    L = len(h)
    x0, cur = cascade(h, 0, deriv)
    for s in range(1, level + 1):
        size = (L - 1) * 2 ** s + 1
        new = np.zeros(size)
        step = 2 ** (s - 1)
        m = np.arange(size)
        for k in range(L):
            idx = m - k * step
            ok = (idx >= 0) & (idx < len(cur))
            new[ok] += h[k] * cur[idx[ok]]
        cur = math.sqrt(2) * 2 ** deriv * new
    return np.arange(len(cur)) / 2 ** level, cur


def connection_quadrature(h: np.ndarray, k: int, level: int = 18) -> float:
    """``int phi(x - k) phi'(x) dx`` by Riemann sums of cascade samples on a ``2**-level`` grid."""
    _, phi = cascade_fast(h, level, 0)
    _, dphi = cascade_fast(h, level, 1)
    s = 2 ** level
    shift = k * s
    n = len(phi)
    # phi(x - k) at x = m/s is phi[m - shift]
    lo, hi = max(0, shift), min(n, n + shift)
    if lo >= hi:
        return 0.0
    return float(np.dot(phi[lo - shift:hi - shift], dphi[lo:hi]) / s)


def moment_quadrature(h: np.ndarray, power: int, level: int = 14) -> float:
    x, phi = cascade_fast(h, level, 0)
    return float(np.sum(x ** power * phi) / 2 ** level)


def exact_moyal_star(f: dict, g: dict, hbar: Fraction) -> dict:
    """Reference Moyal product on dict-of-monomials with Fraction/complex-free rational input.

    Uses the exponential formula expanded with sympy; coefficients are sympy numbers.
    """
    q, p = sp.symbols("q p")
    F = sum(sp.Rational(c) * q ** a * p ** b for (a, b), c in f.items())
    G = sum(sp.Rational(c) * q ** a * p ** b for (a, b), c in g.items())
    hb = sp.Rational(hbar)
    total = 0
    deg = max(sp.Poly(F, q, p).total_degree(), sp.Poly(G, q, p).total_degree())
    for n in range(deg + 1):
        term = 0
        for k in range(n + 1):
            term += (sp.binomial(n, k) * (-1) ** k
                     * sp.diff(F, q, n - k, p, k) * sp.diff(G, q, k, p, n - k))
        total += (sp.I * hb / 2) ** n / sp.factorial(n) * term
    poly = sp.Poly(sp.expand(total), q, p)
    return {m: c for m, c in zip(poly.monoms(), poly.coeffs())}
