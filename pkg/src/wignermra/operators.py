"""Finite differential operators acting on Wigner functions.

For a polynomial Hamiltonian the star products ``H * W`` and ``W * H`` are
finite-order differential operators in ``W``.  They are built here by the
Bopp substitution

    H * W = H(q + (i hbar/2) d_p,  p - (i hbar/2) d_q) W
    W * H = H(q - (i hbar/2) d_p,  p + (i hbar/2) d_q) W

with the shifted operators Weyl-ordered (McCoy's formula), which reproduces
the kinetic block ``p^2/2m + (hbar/2i)(p/m) d_q - (hbar^2/8m) d_q^2`` and the
shifted potential ``U(q - (hbar/2i) d_p)`` of the stationary equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

from sympy.polys.domains import QQ_I

from .symbols import PolySymbol, _to_exact, format_symbol

__all__ = [
    "PhaseSpaceOperator",
    "HamiltonianSpec",
    "left_star_operator",
    "right_star_operator",
    "stationary_split",
    "evolution_operator",
    "format_operator",
]

Order = tuple[int, int]


class PhaseSpaceOperator:
    """``sum c(q, p) d_q^dq d_p^dp`` with polynomial coefficients.

    Terms are keyed by ``(dq, dp)``; duplicate orders are merged and zero
    coefficients dropped.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Order, PolySymbol] | None = None):
        merged: dict[Order, PolySymbol] = {}
        for (dq, dp), c in (terms or {}).items():
            if dq < 0 or dp < 0:
                raise ValueError("derivative orders must be non-negative")
            key = (int(dq), int(dp))
            merged[key] = merged[key] + c if key in merged else c
        self._terms = {k: c for k, c in merged.items() if not c.is_zero()}

    @classmethod
    def identity(cls, *, exact: bool = False) -> "PhaseSpaceOperator":
        return cls({(0, 0): PolySymbol.constant(1, exact=exact)})

    @classmethod
    def multiplication(cls, c: PolySymbol) -> "PhaseSpaceOperator":
        return cls({(0, 0): c})

    @classmethod
    def derivative(cls, dq: int = 0, dp: int = 0, *, exact: bool = False) -> "PhaseSpaceOperator":
        return cls({(dq, dp): PolySymbol.constant(1, exact=exact)})

    @property
    def terms(self) -> list[tuple[PolySymbol, int, int]]:
        """Sorted list of ``(coefficient, dq, dp)``."""
        return [(c, dq, dp) for (dq, dp), c in sorted(self._terms.items())]

    def coefficient(self, dq: int, dp: int) -> PolySymbol:
        return self._terms.get((dq, dp), PolySymbol.zero())

    def orders(self) -> list[Order]:
        return sorted(self._terms)

    def max_order(self) -> int:
        return max((dq + dp for dq, dp in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_real(self) -> bool:
        return all(c.is_real() for c in self._terms.values())

    def __len__(self):
        return len(self._terms)

    def __add__(self, other: "PhaseSpaceOperator") -> "PhaseSpaceOperator":
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return PhaseSpaceOperator(terms)

    def __neg__(self):
        return PhaseSpaceOperator({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "PhaseSpaceOperator":
        return PhaseSpaceOperator({k: c * s for k, c in self._terms.items()})

    def real(self) -> "PhaseSpaceOperator":
        return PhaseSpaceOperator({k: c.real() for k, c in self._terms.items()})

    def imag(self) -> "PhaseSpaceOperator":
        return PhaseSpaceOperator({k: c.imag() for k, c in self._terms.items()})

    def __matmul__(self, other: "PhaseSpaceOperator") -> "PhaseSpaceOperator":
        """Operator composition ``self o other`` (Leibniz rule on the coefficients)."""
        out: dict[Order, PolySymbol] = {}
        for (aq, ap), c1 in self._terms.items():
            for (bq, bp), c2 in other._terms.items():
                for gq in range(aq + 1):
                    for gp in range(ap + 1):
                        dc = c2.deriv(gq, gp)
                        if dc.is_zero():
                            continue
                        w = math.comb(aq, gq) * math.comb(ap, gp)
                        key = (aq - gq + bq, ap - gp + bp)
                        term = c1 * dc * w
                        out[key] = out[key] + term if key in out else term
        return PhaseSpaceOperator(out)

    def __pow__(self, n: int) -> "PhaseSpaceOperator":
        exact = next(iter(self._terms.values())).exact if self._terms else False
        out = PhaseSpaceOperator.identity(exact=exact)
        for _ in range(n):
            out = out @ self
        return out

    def apply(self, w: PolySymbol) -> PolySymbol:
        """Act on a polynomial symbol."""
        out = PolySymbol.zero(exact=w.exact)
        for (dq, dp), c in self._terms.items():
            out = out + c * w.deriv(dq, dp)
        return out

    def allclose(self, other: "PhaseSpaceOperator", tol: float = 1e-12) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(self.coefficient(*k).allclose(other.coefficient(*k), tol) for k in keys)

    def __eq__(self, other):
        if not isinstance(other, PhaseSpaceOperator):
            return NotImplemented
        return self._terms == other._terms

    def __repr__(self):
        return "PhaseSpaceOperator(\n  " + "\n  ".join(format_operator(self).splitlines()) + "\n)"


def format_operator(op: PhaseSpaceOperator) -> str:
    """One line per term: ``coeff(q,p) d^a/dq^a d^b/dp^b``."""
    if op.is_zero():
        return "0"
    lines = []
    for (dq, dp), c in sorted(op._terms.items(), key=lambda t: (t[0][0] + t[0][1], -t[0][0])):
        parts = [f"[{format_symbol(c)}]"]
        if dq:
            parts.append(f"d^{dq}/dq^{dq}")
        if dp:
            parts.append(f"d^{dp}/dp^{dp}")
        lines.append(" ".join(parts))
    return "\n".join(lines)


@dataclass(frozen=True)
class HamiltonianSpec:
    """Polynomial Hamiltonian ``H = p^2/2m + U(q)`` or an explicit symbol.

    All quantities are dimensionless.  ``time_dependence``, when given, maps a
    time to the full symbol ``H(q, p, t)`` and overrides ``symbol``.
    """

    mass: float = 1.0
    potential: PolySymbol = field(default_factory=lambda: PolySymbol({(2, 0): 0.5}))
    hbar: float = 1.0
    symbol: PolySymbol | None = None
    time_dependence: Callable[[float], PolySymbol] | None = None

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.potential.degree_in("p") > 0:
            raise ValueError("potential must depend on q only")

    @classmethod
    def oscillator(cls, mass: float = 1.0, omega: float = 1.0, hbar: float = 1.0) -> "HamiltonianSpec":
        return cls(mass=mass, potential=PolySymbol({(2, 0): 0.5 * mass * omega ** 2}), hbar=hbar)

    @property
    def is_time_dependent(self) -> bool:
        return self.time_dependence is not None

    def symbol_at(self, t: float = 0.0) -> PolySymbol:
        if self.time_dependence is not None:
            return self.time_dependence(t)
        if self.symbol is not None:
            return self.symbol
        exact = self.potential.exact
        kinetic = PolySymbol({(0, 2): 1}, exact=exact) / (2 * self.mass)
        return kinetic + self.potential


def _as_symbol(H, t: float) -> tuple[PolySymbol, object]:
    if isinstance(H, HamiltonianSpec):
        return H.symbol_at(t), H.hbar
    raise TypeError("expected a HamiltonianSpec")


def _bopp_operator(symbol: PolySymbol, hbar, sign: int) -> PhaseSpaceOperator:
    exact = symbol.exact
    half_i_hbar = (_to_exact(hbar) * QQ_I(0, 1) / QQ_I(2, 0)) if exact else 0.5j * hbar
    one = PolySymbol.constant(1, exact=exact)
    Q = PhaseSpaceOperator({(0, 0): PolySymbol.q(exact=exact),
                            (0, 1): one * (half_i_hbar * sign)})
    P = PhaseSpaceOperator({(0, 0): PolySymbol.p(exact=exact),
                            (1, 0): one * (-half_i_hbar * sign)})
    q_pows = {0: PhaseSpaceOperator.identity(exact=exact)}
    p_pows = {0: PhaseSpaceOperator.identity(exact=exact)}

    def qpow(k):
        if k not in q_pows:
            q_pows[k] = qpow(k - 1) @ Q
        return q_pows[k]

    def ppow(k):
        if k not in p_pows:
            p_pows[k] = ppow(k - 1) @ P
        return p_pows[k]

    total = PhaseSpaceOperator()
    for (a, b), c in symbol:
        # Weyl ordering of Q^a P^b:  2^-a sum_k C(a,k) Q^k P^b Q^(a-k)
        weyl = PhaseSpaceOperator()
        for k in range(a + 1):
            weyl = weyl + (qpow(k) @ ppow(b) @ qpow(a - k)).scale(math.comb(a, k))
        scale = (c / QQ_I(2 ** a, 0)) if exact else c / 2 ** a
        total = total + weyl.scale(scale)
    return total


def left_star_operator(H: HamiltonianSpec, t: float = 0.0) -> PhaseSpaceOperator:
    """Operator ``W -> H * W``."""
    symbol, hbar = _as_symbol(H, t)
    return _bopp_operator(symbol, hbar, +1)


def right_star_operator(H: HamiltonianSpec, t: float = 0.0) -> PhaseSpaceOperator:
    """Operator ``W -> W * H``."""
    symbol, hbar = _as_symbol(H, t)
    return _bopp_operator(symbol, hbar, -1)


def stationary_split(H: HamiltonianSpec, t: float = 0.0) -> tuple[PhaseSpaceOperator, PhaseSpaceOperator]:
    """Split ``H *`` into real operators: ``H * W = real_op(W) + i imag_op(W)`` for real W.

    The stationary problem is ``real_op(W) = eps W`` together with ``imag_op(W) = 0``.
    """
    symbol, _ = _as_symbol(H, t)
    if not symbol.is_real():
        raise ValueError("stationary split needs a real Hamiltonian symbol")
    op = left_star_operator(H, t)
    return op.real(), op.imag()


def evolution_operator(H: HamiltonianSpec, t: float = 0.0) -> PhaseSpaceOperator:
    """Generator ``L`` of ``dW/dt = (H * W - W * H) / (i hbar)``."""
    symbol, hbar = _as_symbol(H, t)
    if not symbol.is_real():
        raise ValueError("evolution needs a real Hamiltonian symbol")
    diff = left_star_operator(H, t) - right_star_operator(H, t)
    if symbol.exact:
        factor = QQ_I(1, 0) / (QQ_I(0, 1) * _to_exact(hbar))
        return diff.scale(factor).real()
    return diff.scale(1.0 / (1j * hbar)).real()
