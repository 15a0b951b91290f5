"""Slow/fast decomposition of trajectories in space and time.

Spatially, a field splits into the levels ``<= M`` (slow) and the individual
finer detail levels (fast).  Temporally, the time series of every coefficient
is expanded in a periodic 1D wavelet basis; the scaling space with ``2**N``
coefficients is the slow part and each finer temporal detail level is a fast
part.  Temporal detail level ``l`` has ``2**l`` coefficients and collects
oscillations of roughly ``2**(l-1)`` to ``2**l`` cycles over the record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..mra.basis import CoefficientField, wavedec, waverec
from ..mra.filters import WaveletFamily, build_family
from .evolution import Trajectory

__all__ = ["SlowFastSplit", "InsufficientSamplesError", "slow_fast_split", "temporal_decomposition"]


class InsufficientSamplesError(ValueError):
    pass


@dataclass
class SlowFastSplit:
    """Result of :func:`slow_fast_split`; every part is a list of fields, one per time."""

    times: list[float]
    N: int
    M: int
    spatial_slow: list[CoefficientField]
    spatial_fast: dict[int, list[CoefficientField]]
    temporal_slow: list[CoefficientField]
    temporal_fast: dict[int, list[CoefficientField]]
    metadata: dict = field(default_factory=dict)

    @staticmethod
    def _sum(slow, fast):
        out = [f.copy() for f in slow]
        for parts in fast.values():
            out = [a + b for a, b in zip(out, parts)]
        return out

    def spatial_reconstruction(self) -> list[CoefficientField]:
        return self._sum(self.spatial_slow, self.spatial_fast)

    def temporal_reconstruction(self) -> list[CoefficientField]:
        return self._sum(self.temporal_slow, self.temporal_fast)

    def energies(self) -> dict[str, float]:
        """Energy (sum over times of squared norms) of every part."""
        def e(fields):
            return float(sum(f.norm() ** 2 for f in fields))
        out = {"spatial_slow": e(self.spatial_slow), "temporal_slow": e(self.temporal_slow)}
        out.update({f"spatial_fast_{i}": e(v) for i, v in self.spatial_fast.items()})
        out.update({f"temporal_fast_{l}": e(v) for l, v in self.temporal_fast.items()})
        return out

    def summary(self) -> str:
        lines = [f"# slow/fast split N={self.N} M={self.M} samples={len(self.times)}", "# part energy"]
        lines += [f"{k} {v:.12e}" for k, v in self.energies().items()]
        return "\n".join(lines) + "\n"


def temporal_decomposition(series: np.ndarray, family: WaveletFamily | None = None
                           ) -> tuple[np.ndarray, list[np.ndarray], int]:
    """Periodic wavelet analysis of ``series`` along axis 0.

    The series is extended symmetrically to the next power of two ``2**K``
    (no extension if it already has that length) and decomposed fully:
    returns ``(approx, details, K)`` with ``details[l]`` holding ``2**l``
    coefficients, ``l = 0..K-1``.
    """
    family = family or build_family(3)
    T = series.shape[0]
    K = max(0, math.ceil(math.log2(T))) if T > 1 else 0
    padded = _extend(series, 2 ** K)
    coeffs = wavedec(padded, family, K, axis=0)
    return coeffs[0], coeffs[1:], K


def _extend(series: np.ndarray, length: int) -> np.ndarray:
    T = series.shape[0]
    if T == length:
        return series
    # half-sample symmetric extension, repeated as often as needed
    mirror = np.concatenate([series, series[::-1]], axis=0)
    reps = -(-length // mirror.shape[0])
    return np.concatenate([mirror] * reps, axis=0)[:length]


def _project_levels(approx, details, family, keep) -> np.ndarray:
    coeffs = [approx if keep(-1) else np.zeros_like(approx)]
    coeffs += [d if keep(l) else np.zeros_like(d) for l, d in enumerate(details)]
    return waverec(coeffs, family, axis=0)


def slow_fast_split(traj: Trajectory, N: int, M: int, *, family: WaveletFamily | None = None) -> SlowFastSplit:
    """Split a uniformly sampled trajectory into slow and fast parts.

    Parameters
    ----------
    traj : Trajectory
        Uniformly sampled trajectory.
    N : int
        Temporal slow level: the scaling space with ``2**N`` coefficients.
    M : int
        Spatial slow level: levels ``coarsest..M``.
    family : WaveletFamily, optional
        Temporal wavelet (default: order 3).

    Notes
    -----
    Both splits are orthogonal decompositions, so ``slow + sum(fast)``
    reproduces the trajectory up to round-off.
    """
    T = len(traj)
    if T == 0:
        raise InsufficientSamplesError("empty trajectory")
    if N < 0 or 2 ** N > T:
        raise InsufficientSamplesError(f"2**N = {2 ** N} exceeds the {T} available samples")
    if T > 2:
        steps = np.diff(traj.times)
        if np.ptp(steps) > 1e-9 * max(steps.max(), 1.0):
            raise ValueError("trajectory must be uniformly sampled")
    basis = traj.basis
    if not basis.coarsest <= M <= basis.finest:
        raise ValueError(f"M={M} outside [{basis.coarsest}, {basis.finest}]")
    family = family or build_family(3)

    # spatial
    spatial_slow, spatial_fast = [], {i: [] for i in basis.levels if i > M}
    for f in traj.fields:
        slow = f.copy()
        for i in spatial_fast:
            part = CoefficientField.zeros(basis, f.dtype)
            part.details[i] = f.details[i].copy()
            spatial_fast[i].append(part)
            slow.details[i] = np.zeros_like(f.details[i])
        spatial_slow.append(slow)

    # temporal
    V = traj.vectors()
    approx, details, K = temporal_decomposition(V, family)
    N_eff = min(N, K)
    slow_v = _project_levels(approx, details, family, lambda l: l < N_eff)[:T]
    temporal_slow = [CoefficientField.from_vector(basis, v) for v in slow_v]
    temporal_fast = {}
    for l in range(N_eff, K):
        part = _project_levels(approx, details, family, lambda m, l=l: m == l)[:T]
        temporal_fast[l] = [CoefficientField.from_vector(basis, v) for v in part]
    meta = {"temporal_levels": K, "padded_length": 2 ** K, "samples": T}
    return SlowFastSplit(list(traj.times), N, M, spatial_slow, spatial_fast,
                         temporal_slow, temporal_fast, meta)
