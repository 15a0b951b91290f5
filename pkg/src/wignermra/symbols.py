"""Polynomial phase-space symbols and the Moyal star product.

A :class:`PolySymbol` is a sparse polynomial in ``(q, p)`` with complex
coefficients.  Two coefficient rings are supported: complex floats (the
default) and exact Gaussian rationals (``exact=True``), which are used by the
property checks where associativity has to hold exactly.

The star product uses the Weyl/Moyal kernel

    f * g = sum_n hbar**n B_n(f, g),
    B_n(f, g) = (1/n!) (i/2)**n sum_k C(n, k) (-1)**k
                (d_q^{n-k} d_p^k f) (d_q^k d_p^{n-k} g),

so that ``B_0 = fg`` and ``B_1 = (i/2){f, g}``.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Number
from typing import Iterator, Mapping

import numpy as np
from sympy.polys.domains import QQ, QQ_I

__all__ = [
    "PolySymbol",
    "HbarGradedSymbol",
    "poisson_bracket",
    "bidifferential_term",
    "moyal_star",
    "moyal_bracket",
    "star_graded",
    "parse_symbol",
    "format_symbol",
]

#: float-mode coefficients with smaller magnitude are dropped
ZERO_TOL = 1e-14

Monomial = tuple[int, int]


# ---------------------------------------------------------------------------
# coefficient helpers
# ---------------------------------------------------------------------------

def _is_exact(c) -> bool:
    return isinstance(c, QQ_I.dtype)


def _to_exact(c):
    """Convert a scalar to an exact Gaussian rational (floats converted bit-exactly)."""
    if _is_exact(c):
        return c
    if isinstance(c, (int, Fraction)):
        f = Fraction(c)
        return QQ_I(QQ(f.numerator, f.denominator), 0)
    if isinstance(c, (float, np.floating)):
        f = Fraction(float(c))
        return QQ_I(QQ(f.numerator, f.denominator), 0)
    c = complex(c)
    re_, im_ = Fraction(c.real), Fraction(c.imag)
    return QQ_I(QQ(re_.numerator, re_.denominator), QQ(im_.numerator, im_.denominator))


def _to_complex(c) -> complex:
    if _is_exact(c):
        re_, im_ = _exact_parts(c)
        return complex(float(re_), float(im_))
    return complex(c)


def _exact_parts(c) -> tuple[Fraction, Fraction]:
    return (Fraction(int(c.x.numerator), int(c.x.denominator)),
            Fraction(int(c.y.numerator), int(c.y.denominator)))


def _is_zero(c, exact: bool) -> bool:
    if exact:
        return not c
    return abs(c) < ZERO_TOL


def _conj(c, exact: bool):
    if exact:
        return QQ_I(c.x, -c.y)
    return c.conjugate()


def _falling(n: int, k: int) -> int:
    """n (n-1) ... (n-k+1); zero when k > n."""
    if k > n:
        return 0
    return math.perm(n, k)


@lru_cache(maxsize=None)
def _kernel(a: int, b: int, c: int, d: int, n: int) -> int:
    """Integer part of B_n(q^a p^b, q^c p^d); the result monomial is q^{a+c-n} p^{b+d-n}."""
    total = 0
    for k in range(n + 1):
        total += (math.comb(n, k) * (-1) ** k
                  * _falling(a, n - k) * _falling(b, k)
                  * _falling(c, k) * _falling(d, n - k))
    return total


@lru_cache(maxsize=None)
def _star_prefactor(n: int, exact: bool):
    """(i/2)**n / n!"""
    re_im = [(1, 0), (0, 1), (-1, 0), (0, -1)][n % 4]
    denom = 2 ** n * math.factorial(n)
    if exact:
        return QQ_I(QQ(re_im[0], denom), QQ(re_im[1], denom))
    return complex(re_im[0], re_im[1]) / denom


@lru_cache(maxsize=None)
def _weight(a: int, b: int, c: int, d: int, n: int, exact: bool):
    """Full scalar weight of ``q^{a+c-n} p^{b+d-n}`` in ``B_n(q^a p^b, q^c p^d)``, or None if zero."""
    k = _kernel(a, b, c, d, n)
    if k == 0:
        return None
    if exact:
        return _star_prefactor(n, True) * QQ_I(k, 0)
    return _star_prefactor(n, False) * k


# ---------------------------------------------------------------------------
# PolySymbol
# ---------------------------------------------------------------------------

class PolySymbol:
    """Immutable sparse polynomial ``sum c[a, b] q**a p**b``.

    Parameters
    ----------
    terms : mapping, optional
        ``{(q_exponent, p_exponent): coefficient}``.
    exact : bool
        Store coefficients as exact Gaussian rationals.
    """

    __slots__ = ("_terms", "_exact", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None, *, exact: bool = False):
        clean: dict[Monomial, object] = {}
        for (a, b), c in (terms or {}).items():
            a, b = int(a), int(b)
            if a < 0 or b < 0:
                raise ValueError(f"negative exponent in monomial {(a, b)}")
            c = _to_exact(c) if exact else complex(_to_complex(c))
            if (a, b) in clean:
                c = clean[(a, b)] + c
            clean[(a, b)] = c
        self._terms = {m: c for m, c in clean.items() if not _is_zero(c, exact)}
        self._exact = exact
        self._hash = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def _raw(cls, terms: dict, exact: bool) -> "PolySymbol":
        # trusted construction: coefficients already in the right ring
        obj = cls.__new__(cls)
        obj._terms = {m: c for m, c in terms.items() if not _is_zero(c, exact)}
        obj._exact = exact
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, c, *, exact: bool = False) -> "PolySymbol":
        return cls({(0, 0): c}, exact=exact)

    @classmethod
    def q(cls, power: int = 1, *, exact: bool = False) -> "PolySymbol":
        return cls({(power, 0): 1}, exact=exact)

    @classmethod
    def p(cls, power: int = 1, *, exact: bool = False) -> "PolySymbol":
        return cls({(0, power): 1}, exact=exact)

    @classmethod
    def zero(cls, *, exact: bool = False) -> "PolySymbol":
        return cls._raw({}, exact)

    # -- basic properties ---------------------------------------------------
    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def terms(self) -> dict[Monomial, object]:
        return dict(self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((a + b for a, b in self._terms), default=-1)

    def degree_in(self, var: str) -> int:
        idx = {"q": 0, "p": 1}[var]
        return max((m[idx] for m in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def is_real(self) -> bool:
        if self._exact:
            return all(c.y == 0 for c in self._terms.values())
        return all(c.imag == 0 for c in self._terms.values())

    def coeff(self, a: int, b: int):
        return self._terms.get((a, b), QQ_I(0, 0) if self._exact else 0j)

    def __iter__(self) -> Iterator[tuple[Monomial, object]]:
        return iter(sorted(self._terms.items()))

    def __len__(self) -> int:
        return len(self._terms)

    # -- ring conversions -----------------------------------------------------
    def to_exact(self) -> "PolySymbol":
        if self._exact:
            return self
        return PolySymbol(self._terms, exact=True)

    def to_float(self) -> "PolySymbol":
        if not self._exact:
            return self
        return PolySymbol({m: _to_complex(c) for m, c in self._terms.items()})

    def _coerce(self, other) -> "PolySymbol":
        if isinstance(other, PolySymbol):
            if other._exact == self._exact:
                return other
            return other.to_float()
        if isinstance(other, (Number, np.number)) or _is_exact(other):
            return PolySymbol.constant(other, exact=self._exact)
        return NotImplemented

    def _common(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented, NotImplemented
        a = self if self._exact == other._exact else self.to_float()
        return a, other

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        a, b = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        out = dict(a._terms)
        for m, c in b._terms.items():
            out[m] = out[m] + c if m in out else c
        return PolySymbol._raw(out, a._exact)

    __radd__ = __add__

    def __neg__(self):
        return PolySymbol._raw({m: -c for m, c in self._terms.items()}, self._exact)

    def __sub__(self, other):
        a, b = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (Number, np.number)) or _is_exact(other):
            s = _to_exact(other) if self._exact else complex(_to_complex(other))
            return PolySymbol._raw({m: c * s for m, c in self._terms.items()}, self._exact)
        a, b = self._common(other)
        if a is NotImplemented:
            return NotImplemented
        out: dict[Monomial, object] = {}
        for (a1, b1), c1 in a._terms.items():
            for (a2, b2), c2 in b._terms.items():
                m = (a1 + a2, b1 + b2)
                out[m] = out[m] + c1 * c2 if m in out else c1 * c2
        return PolySymbol._raw(out, a._exact)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if self._exact:
            return self * (QQ_I(1, 0) / _to_exact(scalar))
        return self * (1.0 / complex(scalar))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = PolySymbol.constant(1, exact=self._exact)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (Number, np.number)):
            other = PolySymbol.constant(other, exact=self._exact)
        if not isinstance(other, PolySymbol):
            return NotImplemented
        if self._exact != other._exact:
            return self.to_float().allclose(other.to_float(), tol=0.0)
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted((m, str(c)) for m, c in self._terms.items())))
        return self._hash

    def allclose(self, other, tol: float = 1e-12) -> bool:
        """Coefficient-wise comparison, ``max |c - c'| <= tol``."""
        diff = (self.to_float() - (other.to_float() if isinstance(other, PolySymbol) else other))
        return diff.max_abs() <= tol

    def max_abs(self) -> float:
        return max((abs(_to_complex(c)) for c in self._terms.values()), default=0.0)

    # -- calculus -----------------------------------------------------------
    def deriv(self, dq: int = 0, dp: int = 0) -> "PolySymbol":
        """Partial derivative ``d_q^dq d_p^dp``."""
        out = {}
        for (a, b), c in self._terms.items():
            f = _falling(a, dq) * _falling(b, dp)
            if f:
                out[(a - dq, b - dp)] = c * f
        return PolySymbol._raw(out, self._exact)

    def conj(self) -> "PolySymbol":
        return PolySymbol._raw({m: _conj(c, self._exact) for m, c in self._terms.items()},
                               self._exact)

    def real(self) -> "PolySymbol":
        if self._exact:
            return PolySymbol._raw({m: QQ_I(c.x, 0) for m, c in self._terms.items()}, True)
        return PolySymbol._raw({m: complex(c.real, 0.0) for m, c in self._terms.items()}, False)

    def imag(self) -> "PolySymbol":
        if self._exact:
            return PolySymbol._raw({m: QQ_I(c.y, 0) for m, c in self._terms.items()}, True)
        return PolySymbol._raw({m: complex(c.imag, 0.0) for m, c in self._terms.items()}, False)

    def __call__(self, q, p=0.0):
        """Evaluate on scalars or broadcastable arrays."""
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        out = np.zeros(np.broadcast(q, p).shape, dtype=complex)
        for (a, b), c in self._terms.items():
            out = out + _to_complex(c) * q ** a * p ** b
        if self.is_real():
            out = out.real
        return out[()] if out.ndim == 0 else out

    def __repr__(self):
        return f"PolySymbol({format_symbol(self)!r}{', exact=True' if self._exact else ''})"

    def __str__(self):
        return format_symbol(self)


# ---------------------------------------------------------------------------
# graded symbols
# ---------------------------------------------------------------------------

class HbarGradedSymbol:
    """Formal power series in hbar truncated to finitely many orders.

    ``orders[n]`` is the coefficient of ``hbar**n``; trailing zero orders are
    trimmed on construction.
    """

    __slots__ = ("orders",)

    def __init__(self, orders):
        orders = list(orders)
        while orders and orders[-1].is_zero():
            orders.pop()
        self.orders: tuple[PolySymbol, ...] = tuple(orders)

    def __len__(self):
        return len(self.orders)

    def __getitem__(self, n: int) -> PolySymbol:
        return self.orders[n]

    def evaluate(self, hbar) -> PolySymbol:
        if not self.orders:
            return PolySymbol.zero()
        exact = self.orders[0].exact
        h = _to_exact(hbar) if exact else hbar
        out = PolySymbol.zero(exact=exact)
        power = QQ_I(1, 0) if exact else 1.0
        for term in self.orders:
            out = out + term * power
            power = power * h
        return out

    def __sub__(self, other: "HbarGradedSymbol") -> "HbarGradedSymbol":
        n = max(len(self), len(other))
        exact = (self.orders or other.orders or [PolySymbol.zero()])[0].exact
        zero = PolySymbol.zero(exact=exact)
        a = list(self.orders) + [zero] * (n - len(self))
        b = list(other.orders) + [zero] * (n - len(other))
        return HbarGradedSymbol([x - y for x, y in zip(a, b)])

    def nonzero_orders(self) -> list[int]:
        return [n for n, term in enumerate(self.orders) if not term.is_zero()]

    def __repr__(self):
        return "HbarGradedSymbol([" + ", ".join(format_symbol(t) for t in self.orders) + "])"


# ---------------------------------------------------------------------------
# brackets and star product
# ---------------------------------------------------------------------------

def poisson_bracket(f: PolySymbol, g: PolySymbol) -> PolySymbol:
    """{f, g} = f_q g_p - f_p g_q."""
    return f.deriv(1, 0) * g.deriv(0, 1) - f.deriv(0, 1) * g.deriv(1, 0)


def bidifferential_term(f: PolySymbol, g: PolySymbol, n: int) -> PolySymbol:
    """The n-th Moyal bidifferential operator ``B_n(f, g)``.

    ``B_0(f, g) = fg`` and ``B_1(f, g) = (i/2){f, g}``.
    """
    if n < 0:
        raise ValueError("order must be non-negative")
    f, g = f._common(g)
    exact = f.exact
    out: dict[Monomial, object] = {}
    for (a, b), cf in f._terms.items():
        if a + b < n:
            continue
        for (c, d), cg in g._terms.items():
            if c + d < n:
                continue
            w = _weight(a, b, c, d, n, exact)
            if w is None:
                continue
            m = (a + c - n, b + d - n)
            val = cf * cg * w
            out[m] = out[m] + val if m in out else val
    return PolySymbol._raw(out, exact)


def star_graded(f: PolySymbol, g: PolySymbol) -> HbarGradedSymbol:
    """All nonvanishing bidifferential orders of ``f * g``."""
    top = min(f.degree, g.degree)
    return HbarGradedSymbol([bidifferential_term(f, g, n) for n in range(max(top, 0) + 1)])


def moyal_star(f: PolySymbol, g: PolySymbol, hbar) -> PolySymbol:
    """Moyal product ``f * g`` at a numeric hbar (exact when hbar and f, g are exact)."""
    return star_graded(f, g).evaluate(hbar)


def moyal_bracket(f: PolySymbol, g: PolySymbol, hbar) -> PolySymbol:
    """``(f * g - g * f) / (i hbar)``; only odd orders of the star product survive."""
    graded = star_graded(f, g)
    if not graded.orders:
        return PolySymbol.zero(exact=f.exact and g.exact)
    exact = graded.orders[0].exact
    h = _to_exact(hbar) if exact else hbar
    out = PolySymbol.zero(exact=exact)
    # B_n(g, f) = (-1)**n B_n(f, g), so the difference keeps 2 B_n for odd n
    two_over_i = QQ_I(0, -2) if exact else -2j
    power = QQ_I(1, 0) if exact else 1.0
    for n, term in enumerate(graded.orders):
        if n % 2 == 1:
            out = out + term * (two_over_i * power)
        if n >= 1:
            power = power * h
    return out


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

def _fmt_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _fmt_coeff(c, exact: bool) -> tuple[str, str]:
    """Return (sign, magnitude text) for a coefficient."""
    if exact:
        re_, im_ = _exact_parts(c)
        if im_ == 0:
            return ("-" if re_ < 0 else "+"), _fmt_fraction(abs(re_))
        im_txt = ("+" if im_ >= 0 else "-") + _fmt_fraction(abs(im_)) + "j"
        return "+", f"({_fmt_fraction(re_)}{im_txt})"
    if c.imag == 0:
        return ("-" if c.real < 0 else "+"), repr(abs(c.real))
    im_txt = ("+" if c.imag >= 0 else "-") + repr(abs(c.imag)) + "j"
    return "+", f"({c.real!r}{im_txt})"


def format_symbol(f: PolySymbol) -> str:
    """Render as signed monomials ``c * q^a * p^b`` joined by ``+``/``-``."""
    if f.is_zero():
        return "0"
    parts = []
    for (a, b), c in sorted(f._terms.items(), key=lambda t: (t[0][0] + t[0][1], -t[0][0])):
        sign, mag = _fmt_coeff(c, f.exact)
        factors = [mag] if (mag not in ("1", "1.0") or not (a or b)) else []
        if a:
            factors.append("q" if a == 1 else f"q^{a}")
        if b:
            factors.append("p" if b == 1 else f"p^{b}")
        body = " * ".join(factors)
        if not parts:
            parts.append(("-" if sign == "-" else "") + body)
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


_TOKEN = re.compile(
    r"""\s*(?:
        (?P<complex>\([^()]*\))
      | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?)
      | (?P<var>[qp])(?:\s*\^\s*(?P<pow>\d+))?
      | (?P<op>[*+\-−])
    )""",
    re.VERBOSE,
)


def _parse_real(txt: str, exact: bool):
    if "/" in txt:
        num, den = txt.split("/")
        val = Fraction(num) / Fraction(den)
        return val if exact else float(val)
    return Fraction(txt) if exact else float(txt)


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_COMPLEX = re.compile(rf"(?P<re>[+-]?{_NUM})?(?P<im>[+-]?(?:{_NUM})?j)?")


def _parse_complex(txt: str, exact: bool):
    body = txt.strip()[1:-1].replace(" ", "").replace("−", "-")
    m = _COMPLEX.fullmatch(body)
    if not body or m is None:
        raise ValueError(f"cannot parse complex coefficient {txt!r}")
    re_, im_ = Fraction(0), Fraction(0)
    if m.group("re"):
        r = m.group("re")
        re_ = -_parse_real(r[1:], True) if r[0] == "-" else _parse_real(r.lstrip("+"), True)
    if m.group("im"):
        i = m.group("im")[:-1]
        neg = i.startswith("-")
        i = i.lstrip("+-")
        im_ = _parse_real(i, True) if i else Fraction(1)
        im_ = -im_ if neg else im_
    if exact:
        return QQ_I(QQ(re_.numerator, re_.denominator), QQ(im_.numerator, im_.denominator))
    return complex(float(re_), float(im_))


def parse_symbol(text: str, *, exact: bool = False) -> PolySymbol:
    """Parse the text produced by :func:`format_symbol`.

    Accepts terms such as ``-0.5 * q^2 * p``, ``3/4*p^2``, ``(0+0.5j) * q``
    and bare monomials ``q p^3``.  Unicode minus is accepted.
    """
    pos, terms = 0, {}
    text = text.strip()
    if text in ("", "0"):
        return PolySymbol.zero(exact=exact)
    sign, coeff, a, b, seen = 1, None, 0, 0, False

    def flush():
        nonlocal sign, coeff, a, b, seen
        if not seen:
            raise ValueError(f"empty term in {text!r}")
        c = coeff if coeff is not None else (Fraction(1) if exact else 1.0)
        c = c * sign
        key = (a, b)
        terms[key] = terms[key] + c if key in terms else c
        sign, coeff, a, b, seen = 1, None, 0, 0, False

    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ValueError(f"unexpected input at {text[pos:]!r}")
        pos = m.end()
        if m.group("op") in ("+", "-", "−"):
            if seen:
                flush()
            if m.group("op") != "+":
                sign = -sign
        elif m.group("op") == "*":
            continue
        elif m.group("complex"):
            coeff = _parse_complex(m.group("complex"), exact) * (coeff if coeff is not None else 1)
            seen = True
        elif m.group("number"):
            val = _parse_real(m.group("number"), exact)
            coeff = val * (coeff if coeff is not None else 1)
            seen = True
        else:
            power = int(m.group("pow") or 1)
            if m.group("var") == "q":
                a += power
            else:
                b += power
            seen = True
    flush()
    return PolySymbol(terms, exact=exact)
