"""Scalar characterization of Wigner fields.

Densities (purity, negativity, centre value) are evaluated on the field
rescaled to unit integral whenever the integral is not negligible, so that an
L2-normalized eigenmode and its Wigner-normalized version give the same
report.  Coefficient statistics (entropy, participation ratio, level
fractions) are scale invariant.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .mra.basis import CoefficientField, grid, synthesize
from .mra.filters import monomial_moments
from .symbols import PolySymbol, _to_complex

__all__ = ["Thresholds", "DiagnosticsReport", "integrate", "report", "coefficient_entropy",
           "participation_ratio", "classify", "LABELS"]

LABELS = ("waveleton", "intermediate", "chaotic-like")


@dataclass(frozen=True)
class Thresholds:
    """Classification thresholds (fractions of ``log(dim)`` for the entropy)."""

    waveleton_entropy: float = 0.4
    chaotic_entropy: float = 0.8
    top_level_fraction: float = 0.10

    def __post_init__(self):
        if not 0 < self.waveleton_entropy <= self.chaotic_entropy <= 1:
            raise ValueError("need 0 < waveleton_entropy <= chaotic_entropy <= 1")
        if not 0 < self.top_level_fraction <= 1:
            raise ValueError("top_level_fraction must lie in (0, 1]")


@dataclass
class DiagnosticsReport:
    norm: float
    purity: float | None
    negativity: float
    coefficient_entropy: float
    participation_ratio: float
    level_fractions: list[float]
    label: str
    center_value: float
    l2_norm: float
    dim: int
    normalized: bool
    metadata: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return asdict(self)

    def to_text(self) -> str:
        rec = self.to_record()
        lines = []
        for key, val in rec.items():
            if key == "metadata":
                for k2, v2 in sorted(val.items()):
                    lines.append(f"meta.{k2}: {v2}")
                continue
            if isinstance(val, float):
                val = f"{val:.12g}"
            elif isinstance(val, list):
                val = " ".join(f"{v:.6e}" for v in val)
            lines.append(f"{key}: {val}")
        return "\n".join(lines) + "\n"


def _axis_moments(basis, axis: int, degree: int) -> np.ndarray:
    """``m[a, k] = int x^a phi_{j,k}(x) dx`` along one axis."""
    n = basis.size
    L = basis.half_width[axis]
    h = 2.0 * L / n
    M = monomial_moments(basis.family, degree)
    left = -L + h * np.arange(n)
    out = np.zeros((degree + 1, n))
    for a in range(degree + 1):
        for r in range(a + 1):
            out[a] += math.comb(a, r) * left ** (a - r) * h ** r * M[r]
    return out * math.sqrt(h)


def integrate(field: CoefficientField, weight: PolySymbol | None = None, *, resolution: int | None = None):
    """``int weight(q, p) W(q, p) dq dp`` over the box.

    Monomials of degree up to ``2 N_v`` per axis are integrated exactly from
    the scaling-function moments; higher degrees fall back to a rectangle
    rule on the synthesized grid.  Returns a float for real weights and
    fields, a complex number otherwise.
    """
    weight = PolySymbol.constant(1.0) if weight is None else weight
    basis = field.basis
    if weight.is_zero():
        return 0.0
    c = field.to_scaling()
    max_q, max_p = weight.degree_in("q"), weight.degree_in("p")
    if max(max_q, max_p) <= 2 * basis.family.order:
        mq = _axis_moments(basis, 0, max_q)
        mp = _axis_moments(basis, 1, max_p)
        total = 0.0
        for (a, b), coef in weight:
            total = total + _to_complex(coef) * (mq[a] @ c @ mp[b])
    else:
        R = resolution or 4 * basis.size
        W = synthesize(field, R)
        qs, ps = grid(basis, R)
        Q, P = np.meshgrid(qs, ps, indexing="ij")
        dA = (qs[1] - qs[0]) * (ps[1] - ps[0])
        total = np.sum(weight(Q, P) * W) * dA
    total = complex(total)
    if total.imag == 0.0 or (weight.is_real() and np.isrealobj(c)):
        return total.real
    return total


def coefficient_entropy(vec: np.ndarray) -> float:
    """Shannon entropy (nats) of ``p = |c|^2 / sum |c|^2``."""
    w = np.abs(np.asarray(vec).ravel()) ** 2
    total = w.sum()
    if total == 0:
        raise ValueError("entropy of a zero field is undefined")
    p = w[w > 0] / total
    return float(max(-np.sum(p * np.log(p)), 0.0))


def participation_ratio(vec: np.ndarray) -> float:
    w = np.abs(np.asarray(vec).ravel()) ** 2
    total = w.sum()
    if total == 0:
        raise ValueError("participation ratio of a zero field is undefined")
    return float(total ** 2 / np.sum(w ** 2))


def classify(entropy: float, dim: int, top_fraction: float, thresholds: Thresholds = Thresholds()) -> str:
    scale = math.log(dim) if dim > 1 else 1.0
    if entropy <= thresholds.waveleton_entropy * scale and top_fraction < thresholds.top_level_fraction:
        return "waveleton"
    if entropy >= thresholds.chaotic_entropy * scale:
        return "chaotic-like"
    return "intermediate"


def report(field: CoefficientField, hbar: float = 1.0, *, thresholds: Thresholds | None = None,
           resolution: int | None = None) -> DiagnosticsReport:
    """Compute every diagnostic of ``field``.

    Raises
    ------
    ValueError
        For an identically zero field.
    """
    thresholds = thresholds or Thresholds()
    basis = field.basis
    vec = field.to_vector()
    l2 = float(np.linalg.norm(vec))
    if l2 == 0:
        raise ValueError("cannot report on a zero field")
    norm = float(np.real(integrate(field)))
    R = resolution or 2 * basis.size
    W = np.real(synthesize(field, R))
    qs, ps = grid(basis, R)
    dA = (qs[1] - qs[0]) * (ps[1] - ps[0])
    # unit-integral rescaling unless the integral is negligible against the L1 mass
    l1 = float(np.sum(np.abs(W)) * dA)
    normalized = abs(norm) > 1e-8 * max(l1, 1e-300)
    s = 1.0 / norm if normalized else 1.0
    purity = 2.0 * math.pi * hbar * l2 ** 2 * s ** 2 if normalized else None
    Ws = W * s
    negativity = float(max(np.sum(np.abs(Ws)) * dA - np.sum(Ws) * dA, 0.0))
    iq, ip = int(np.argmin(np.abs(qs))), int(np.argmin(np.abs(ps)))
    energies = field.level_energies()
    total = sum(energies.values())
    fractions = [energies[i] / total for i in basis.levels]
    entropy = coefficient_entropy(vec)
    top = fractions[-1] if len(fractions) > 1 else 0.0
    label = classify(entropy, vec.size, top, thresholds)
    return DiagnosticsReport(
        norm=norm, purity=purity, negativity=negativity, coefficient_entropy=entropy,
        participation_ratio=participation_ratio(vec), level_fractions=fractions, label=label,
        center_value=float(Ws[iq, ip]), l2_norm=l2, dim=int(vec.size), normalized=bool(normalized),
        metadata={"hbar": float(hbar), "resolution": int(R), "levels": f"{basis.coarsest}..{basis.finest}"},
    )
