"""Periodized tensor-product wavelet bases on a phase-space box.

Coordinates: along each axis the box ``[-L, L)`` holds ``2**j`` cells of
width ``h = 2L / 2**j`` at level ``j`` and the scaling functions are

    phi_{j,k}(x) = h**-0.5 phi((x + L)/h - k),   k = 0 .. 2**j - 1,

periodized with period ``2L``.

Level convention for the multiresolution split: the block labelled
``coarsest`` is the scaling block ``V_c x V_c``; the block labelled ``i > c``
holds the three detail subbands of ``V_i x V_i`` not already in
``V_{i-1} x V_{i-1}``.  Summing the blocks of levels ``c..j`` therefore gives
the finest space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .filters import WaveletFamily, build_family, scaling_function_values

__all__ = [
    "MraBasis",
    "CoefficientField",
    "SUBBANDS",
    "ResolutionError",
    "analyze",
    "synthesize",
    "level_split",
    "grid",
    "dwt_step",
    "idwt_step",
    "wavedec",
    "waverec",
]

#: detail subbands, first letter is the q axis (S = scaling, W = wavelet)
SUBBANDS = ("SW", "WS", "WW")


class ResolutionError(ValueError):
    pass


@dataclass(frozen=True)
class MraBasis:
    """Wavelet family plus box ``[-L_q, L_q) x [-L_p, L_p)`` and level range."""

    family: WaveletFamily = field(default_factory=lambda: build_family(3))
    half_width: tuple[float, float] = (5.0, 5.0)
    coarsest: int = 3
    finest: int = 7
    boundary: str = "periodic"

    def __post_init__(self):
        if self.boundary != "periodic":
            raise ValueError("only periodic boundary treatment is implemented")
        if not 1 <= self.coarsest <= self.finest:
            raise ValueError(f"need 1 <= coarsest <= finest, got {self.coarsest}, {self.finest}")
        lq, lp = self.half_width
        if not (lq > 0 and lp > 0):
            raise ValueError("box half widths must be positive")
        object.__setattr__(self, "half_width", (float(lq), float(lp)))

    @classmethod
    def create(cls, order: int = 3, half_width: float | tuple[float, float] = 5.0,
               coarsest: int = 3, finest: int = 7) -> "MraBasis":
        if np.isscalar(half_width):
            half_width = (float(half_width), float(half_width))
        return cls(build_family(order), tuple(half_width), coarsest, finest)

    @property
    def size(self) -> int:
        """Scaling functions per axis at the finest level."""
        return 2 ** self.finest

    @property
    def dim(self) -> int:
        return self.size ** 2

    def spacing(self, level: int | None = None) -> tuple[float, float]:
        n = 2 ** (self.finest if level is None else level)
        return 2 * self.half_width[0] / n, 2 * self.half_width[1] / n

    @property
    def levels(self) -> list[int]:
        return list(range(self.coarsest, self.finest + 1))

    def with_levels(self, coarsest: int | None = None, finest: int | None = None) -> "MraBasis":
        return MraBasis(self.family, self.half_width,
                        self.coarsest if coarsest is None else coarsest,
                        self.finest if finest is None else finest)

    def to_dict(self) -> dict:
        return {"order": self.family.order, "half_width_q": self.half_width[0],
                "half_width_p": self.half_width[1], "coarsest": self.coarsest,
                "finest": self.finest, "boundary": self.boundary}

    @classmethod
    def from_dict(cls, d: dict) -> "MraBasis":
        return cls(build_family(int(d["order"])), (float(d["half_width_q"]), float(d["half_width_p"])),
                   int(d["coarsest"]), int(d["finest"]))


# ---------------------------------------------------------------------------
# 1D periodic filter bank
# ---------------------------------------------------------------------------

def dwt_step(x: np.ndarray, family: WaveletFamily, axis: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """One periodic analysis step along ``axis``: ``a_k = sum_m h_m x_{2k+m}``."""
    x = np.moveaxis(np.asarray(x), axis, 0)
    n = x.shape[0]
    if n % 2:
        raise ResolutionError(f"cannot split odd length {n}")
    k2 = 2 * np.arange(n // 2)
    approx = np.zeros((n // 2,) + x.shape[1:], dtype=x.dtype)
    detail = np.zeros_like(approx)
    for m, (hm, gm) in enumerate(zip(family.lowpass, family.highpass)):
        rows = x[(k2 + m) % n]
        approx += hm * rows
        detail += gm * rows
    return np.moveaxis(approx, 0, axis), np.moveaxis(detail, 0, axis)


def idwt_step(approx: np.ndarray, detail: np.ndarray, family: WaveletFamily, axis: int = 0) -> np.ndarray:
    """Inverse of :func:`dwt_step`."""
    a = np.moveaxis(np.asarray(approx), axis, 0)
    d = np.moveaxis(np.asarray(detail), axis, 0)
    half = a.shape[0]
    n = 2 * half
    out = np.zeros((n,) + a.shape[1:], dtype=np.result_type(a, d))
    k2 = 2 * np.arange(half)
    for m, (hm, gm) in enumerate(zip(family.lowpass, family.highpass)):
        np.add.at(out, (k2 + m) % n, hm * a + gm * d)
    return np.moveaxis(out, 0, axis)


def wavedec(x: np.ndarray, family: WaveletFamily, levels: int, axis: int = 0) -> list[np.ndarray]:
    """Multilevel periodic decomposition ``[approx, detail_coarse, ..., detail_fine]``."""
    details = []
    a = np.asarray(x)
    for _ in range(levels):
        a, d = dwt_step(a, family, axis)
        details.append(d)
    return [a] + details[::-1]


def waverec(coeffs: list[np.ndarray], family: WaveletFamily, axis: int = 0) -> np.ndarray:
    a = coeffs[0]
    for d in coeffs[1:]:
        a = idwt_step(a, d, family, axis)
    return a


def _dwt2(c: np.ndarray, family: WaveletFamily):
    lo_q, hi_q = dwt_step(c, family, axis=0)
    ss, sw = dwt_step(lo_q, family, axis=1)
    ws, ww = dwt_step(hi_q, family, axis=1)
    return ss, np.stack([sw, ws, ww])


def _idwt2(ss: np.ndarray, bands: np.ndarray, family: WaveletFamily) -> np.ndarray:
    sw, ws, ww = bands
    lo_q = idwt_step(ss, sw, family, axis=1)
    hi_q = idwt_step(ws, ww, family, axis=1)
    return idwt_step(lo_q, hi_q, family, axis=0)


# ---------------------------------------------------------------------------
# coefficient field
# ---------------------------------------------------------------------------

class CoefficientField:
    """Wavelet coefficients of a phase-space function.

    ``coarse`` is the ``2**c x 2**c`` scaling block; ``details[i]`` has shape
    ``(3, 2**(i-1), 2**(i-1))`` with subbands ordered as :data:`SUBBANDS`.
    """

    def __init__(self, basis: MraBasis, coarse: np.ndarray, details: dict[int, np.ndarray],
                 metadata: dict | None = None):
        nc = 2 ** basis.coarsest
        coarse = np.asarray(coarse)
        if coarse.shape != (nc, nc):
            raise ResolutionError(f"coarse block must be {(nc, nc)}, got {coarse.shape}")
        for i in basis.levels[1:]:
            m = 2 ** (i - 1)
            if i not in details or np.shape(details[i]) != (3, m, m):
                raise ResolutionError(f"detail block for level {i} must have shape {(3, m, m)}")
        self.basis = basis
        self.coarse = coarse
        self.details = {i: np.asarray(details[i]) for i in basis.levels[1:]}
        self.metadata = dict(metadata or {})

    # -- constructors -------------------------------------------------------
    @classmethod
    def zeros(cls, basis: MraBasis, dtype=float) -> "CoefficientField":
        nc = 2 ** basis.coarsest
        return cls(basis, np.zeros((nc, nc), dtype),
                   {i: np.zeros((3, 2 ** (i - 1), 2 ** (i - 1)), dtype) for i in basis.levels[1:]})

    @classmethod
    def from_scaling(cls, basis: MraBasis, coeffs: np.ndarray, metadata: dict | None = None) -> "CoefficientField":
        """From finest-level scaling coefficients ``c[k_q, k_p]``."""
        c = np.asarray(coeffs)
        if c.shape != (basis.size, basis.size):
            raise ResolutionError(f"expected {(basis.size, basis.size)} scaling coefficients, got {c.shape}")
        details = {}
        for i in range(basis.finest, basis.coarsest, -1):
            c, bands = _dwt2(c, basis.family)
            details[i] = bands
        return cls(basis, c, details, metadata)

    @classmethod
    def from_vector(cls, basis: MraBasis, vec: np.ndarray, metadata: dict | None = None) -> "CoefficientField":
        """Inverse of :meth:`to_vector`."""
        vec = np.asarray(vec)
        nc = 2 ** basis.coarsest
        pos = nc * nc
        coarse = vec[:pos].reshape(nc, nc)
        details = {}
        for i in basis.levels[1:]:
            m = 2 ** (i - 1)
            details[i] = vec[pos:pos + 3 * m * m].reshape(3, m, m)
            pos += 3 * m * m
        if pos != vec.size:
            raise ResolutionError(f"vector has {vec.size} entries, basis needs {pos}")
        return cls(basis, coarse, details, metadata)

    # -- views ----------------------------------------------------------------
    def to_scaling(self) -> np.ndarray:
        c = self.coarse
        for i in self.basis.levels[1:]:
            c = _idwt2(c, self.details[i], self.basis.family)
        return c

    def to_vector(self) -> np.ndarray:
        parts = [self.coarse.ravel()] + [self.details[i].ravel() for i in self.basis.levels[1:]]
        return np.concatenate(parts)

    def block(self, level: int) -> np.ndarray:
        if level == self.basis.coarsest:
            return self.coarse
        return self.details[level]

    @property
    def dtype(self):
        return np.result_type(self.coarse, *self.details.values())

    @property
    def size(self) -> int:
        return self.basis.dim

    # -- algebra --------------------------------------------------------------
    def _map(self, fn) -> "CoefficientField":
        return CoefficientField(self.basis, fn(self.coarse),
                                {i: fn(d) for i, d in self.details.items()}, dict(self.metadata))

    def _zip(self, other: "CoefficientField", fn) -> "CoefficientField":
        if other.basis != self.basis:
            raise ResolutionError("fields live on different bases")
        return CoefficientField(self.basis, fn(self.coarse, other.coarse),
                                {i: fn(d, other.details[i]) for i, d in self.details.items()})

    def __add__(self, other):
        return self._zip(other, np.add)

    def __sub__(self, other):
        return self._zip(other, np.subtract)

    def __neg__(self):
        return self._map(np.negative)

    def __mul__(self, s):
        return self._map(lambda a: a * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self._map(lambda a: a / s)

    def copy(self) -> "CoefficientField":
        return CoefficientField(self.basis, self.coarse.copy(),
                                {i: d.copy() for i, d in self.details.items()}, dict(self.metadata))

    def dot(self, other: "CoefficientField") -> complex | float:
        """L2 inner product ``<self, other>`` (orthonormal basis)."""
        return np.vdot(self.to_vector(), other.to_vector())

    def norm(self) -> float:
        """L2 norm on the box."""
        return float(np.linalg.norm(self.to_vector()))

    def level_energies(self) -> dict[int, float]:
        return {i: float(np.sum(np.abs(self.block(i)) ** 2)) for i in self.basis.levels}

    def __repr__(self):
        return f"CoefficientField(levels={self.basis.coarsest}..{self.basis.finest}, norm={self.norm():.6g})"


def level_split(field: CoefficientField, level: int) -> CoefficientField:
    """Projection onto the level-``level`` block; the coarsest block carries the scaling part."""
    basis = field.basis
    if not basis.coarsest <= level <= basis.finest:
        raise ValueError(f"level {level} outside [{basis.coarsest}, {basis.finest}]")
    out = CoefficientField.zeros(basis, field.dtype)
    if level == basis.coarsest:
        out.coarse = field.coarse.copy()
    else:
        out.details[level] = field.details[level].copy()
    out.metadata = {"level": level}
    return out


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _check_resolution(basis: MraBasis, resolution: int | None) -> tuple[int, int]:
    R = basis.size if resolution is None else int(resolution)
    if R < basis.size or R & (R - 1):
        raise ResolutionError(
            f"resolution must be a power of two >= {basis.size}, got {resolution}")
    return R, int(round(math.log2(R // basis.size)))


def grid(basis: MraBasis, resolution: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Sample nodes ``x_t = -L + t * 2L / R`` along q and p."""
    R, _ = _check_resolution(basis, resolution)
    lq, lp = basis.half_width
    return -lq + 2 * lq * np.arange(R) / R, -lp + 2 * lp * np.arange(R) / R


def _sampling_matrix(family: WaveletFamily, n: int, sub: int, spacing: float) -> np.ndarray:
    """``S[t, k] = h^-1/2 phi_per(t / 2**sub - k)`` for ``t < n 2**sub``."""
    s = 2 ** sub
    R = n * s
    vals = scaling_function_values(family, sub)
    S = np.zeros((R, n))
    offs = np.arange(len(vals))
    for k in range(n):
        np.add.at(S[:, k], (offs + k * s) % R, vals)
    return S / math.sqrt(spacing)


def synthesize(field: CoefficientField, resolution: int | None = None) -> np.ndarray:
    """Samples ``W(q_t, p_u)`` on the :func:`grid` of the given resolution."""
    basis = field.basis
    R, sub = _check_resolution(basis, resolution)
    hq, hp = basis.spacing()
    c = field.to_scaling()
    Sq = _sampling_matrix(basis.family, basis.size, sub, hq)
    Sp = Sq if hp == hq else _sampling_matrix(basis.family, basis.size, sub, hp)
    return Sq @ c @ Sp.T


def _deconvolve(samples: np.ndarray, family: WaveletFamily, axis: int, spacing: float) -> np.ndarray:
    # samples_t = h^-1/2 sum_k c_k phi(t - k): circulant in t
    R = samples.shape[axis]
    kern = np.zeros(R)
    vals = scaling_function_values(family, 0)
    for m, v in enumerate(vals):
        kern[m % R] += v
    spec = np.fft.fft(kern)
    shape = [1, 1]
    shape[axis] = R
    out = np.fft.ifft(np.fft.fft(samples, axis=axis) / spec.reshape(shape), axis=axis)
    out = out * math.sqrt(spacing)
    return out.real if np.isrealobj(samples) else out


def analyze(data, basis: MraBasis, resolution: int | None = None, oversample: int = 3) -> CoefficientField:
    """Coefficients from samples on :func:`grid` or from a callable ``f(Q, P)``.

    Samples are interpolated exactly by the scaling space at their own
    resolution and then projected orthogonally onto the finest level of
    ``basis``; for data that already lies in that space this inverts
    :func:`synthesize`.
    """
    if callable(data):
        R = basis.size * 2 ** oversample if resolution is None else resolution
        qs, ps = grid(basis, R)
        Q, P = np.meshgrid(qs, ps, indexing="ij")
        samples = np.asarray(data(Q, P))
    else:
        samples = np.asarray(data)
        if samples.ndim != 2 or samples.shape[0] != samples.shape[1]:
            raise ResolutionError(f"expected a square sample array, got {samples.shape}")
        R = samples.shape[0]
    R, sub = _check_resolution(basis, R)
    lq, lp = basis.half_width
    c = _deconvolve(samples, basis.family, 0, 2 * lq / R)
    c = _deconvolve(c, basis.family, 1, 2 * lp / R)
    for _ in range(sub):
        lo, _hi = dwt_step(c, basis.family, axis=0)
        c, _hi = dwt_step(lo, basis.family, axis=1)
    return CoefficientField.from_scaling(basis, c)
