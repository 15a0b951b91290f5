"""Randomized property suite for the Moyal star product."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .symbols import (PolySymbol, _to_exact, bidifferential_term, moyal_bracket, moyal_star,
                      poisson_bracket, star_graded)

__all__ = ["CheckOutcome", "StarCheckReport", "random_symbol", "star_property_suite", "broken_star"]

StarFn = Callable[[PolySymbol, PolySymbol, object], PolySymbol]


@dataclass
class CheckOutcome:
    name: str
    count: int = 0
    failures: int = 0
    max_error: float = 0.0
    examples: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, err: float, what: str) -> None:
        self.count += 1
        self.max_error = max(self.max_error, float(err))
        if not ok:
            self.failures += 1
            if len(self.examples) < 3:
                self.examples.append(what)


@dataclass
class StarCheckReport:
    outcomes: list[CheckOutcome]
    settings: dict

    @property
    def passed(self) -> bool:
        return all(o.passed for o in self.outcomes)

    def to_text(self) -> str:
        lines = [f"# star-product property suite: {'PASS' if self.passed else 'FAIL'}"]
        lines += [f"# {k} = {v}" for k, v in sorted(self.settings.items())]
        lines.append("# check count failures max_error")
        for o in self.outcomes:
            lines.append(f"{o.name} {o.count} {o.failures} {o.max_error:.3e}")
            lines += [f"#   counterexample: {e}" for e in o.examples]
        return "\n".join(lines) + "\n"


def random_symbol(rng: np.random.Generator, max_degree: int, *, exact: bool = False,
                  n_terms: int | None = None) -> PolySymbol:
    """Random polynomial with total degree at most ``max_degree``.

    Exact symbols get Gaussian-rational coefficients with small denominators;
    floating symbols get coefficients uniform in ``[-1, 1]`` (real and
    imaginary parts).
    """
    monos = [(a, d - a) for d in range(max_degree + 1) for a in range(d + 1)]
    n_terms = n_terms or int(rng.integers(1, len(monos) + 1))
    picks = rng.choice(len(monos), size=min(n_terms, len(monos)), replace=False)
    terms = {}
    for i in sorted(picks):
        if exact:
            re_ = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7)))
            im_ = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))) if rng.random() < 0.3 else 0
            terms[monos[i]] = _to_exact(complex(0)) + _to_exact(re_) + _to_exact(im_) * _to_exact(1j)
        else:
            im_ = rng.uniform(-1, 1) if rng.random() < 0.3 else 0.0
            terms[monos[i]] = complex(rng.uniform(-1, 1), im_) if im_ else rng.uniform(-1, 1)
    return PolySymbol(terms, exact=exact)


def broken_star(f: PolySymbol, g: PolySymbol, hbar) -> PolySymbol:
    """Negative control: the Moyal product with the second-order term's sign flipped."""
    out = moyal_star(f, g, hbar)
    b2 = bidifferential_term(f, g, 2)
    h2 = _to_exact(hbar) ** 2 if out.exact else hbar ** 2
    return out - b2 * h2 * 2


def star_property_suite(n_triples: int = 200, max_degree: int = 4, hbars=(0.5, 1.0, 2.0), *,
                        seed: int = 0, float_tol: float = 1e-12, exact: bool = True,
                        star: StarFn | None = None) -> StarCheckReport:
    """Associativity, self-bracket and first-order grading on random triples.

    Triple ``i`` uses ``hbars[i % len(hbars)]``.  In exact mode the symbols
    and hbar are Gaussian rationals and every identity must hold exactly; in
    floating mode associativity is checked with relative tolerance
    ``float_tol`` (relative to ``max(1, max |coefficient|)``).
    """
    star = star or moyal_star
    rng = np.random.default_rng(seed)
    assoc_exact = CheckOutcome("associativity_exact")
    assoc_float = CheckOutcome("associativity_float")
    self_bracket = CheckOutcome("self_bracket_zero")
    first_order = CheckOutcome("first_order_poisson")
    half_i = _to_exact(0.5j)
    for i in range(n_triples):
        hbar = hbars[i % len(hbars)]
        if exact:
            f, g, h = (random_symbol(rng, max_degree, exact=True) for _ in range(3))
            hb = _to_exact(Fraction(hbar).limit_denominator(10 ** 6))
            lhs, rhs = star(star(f, g, hb), h, hb), star(f, star(g, h, hb), hb)
            diff = lhs - rhs
            assoc_exact.record(diff.is_zero(), diff.max_abs(), f"hbar={hbar} f={f} g={g} h={h}")
            br = moyal_bracket(f, f, hb)
            self_bracket.record(br.is_zero(), br.max_abs(), f"H={f}")
            graded = star_graded(f, g)
            b1 = graded[1] if len(graded) > 1 else PolySymbol.zero(exact=True)
            d1 = b1 - poisson_bracket(f, g) * half_i
            first_order.record(d1.is_zero(), d1.max_abs(), f"f={f} g={g}")
            f, g, h = f.to_float(), g.to_float(), h.to_float()
        else:
            f, g, h = (random_symbol(rng, max_degree) for _ in range(3))
        lhs, rhs = star(star(f, g, hbar), h, hbar), star(f, star(g, h, hbar), hbar)
        scale = max(1.0, lhs.max_abs(), rhs.max_abs())
        err = (lhs - rhs).max_abs() / scale
        assoc_float.record(err <= float_tol, err, f"hbar={hbar} f={f} g={g} h={h}")
        if not exact:
            br = moyal_bracket(f, f, hbar)
            self_bracket.record(br.max_abs() <= float_tol * max(1.0, f.max_abs() ** 2), br.max_abs(), f"H={f}")
            graded = star_graded(f, g)
            b1 = graded[1] if len(graded) > 1 else PolySymbol.zero()
            d1 = (b1 - poisson_bracket(f, g) * 0.5j).max_abs()
            first_order.record(d1 <= float_tol, d1, f"f={f} g={g}")
    outcomes = ([assoc_exact] if exact else []) + [assoc_float, self_bracket, first_order]
    settings = {"n_triples": n_triples, "max_degree": max_degree, "hbars": list(hbars), "seed": seed,
                "float_tol": float_tol, "exact": exact}
    return StarCheckReport(outcomes, settings)
