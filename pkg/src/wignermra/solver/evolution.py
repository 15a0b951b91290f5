"""Time evolution of Wigner fields under the Moyal equation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..mra.basis import CoefficientField, MraBasis, analyze
from ..operators import HamiltonianSpec, evolution_operator
from .assembly import assemble
from .stationary import integral_weights, operator_norm_bound

__all__ = [
    "Trajectory",
    "StepSizeError",
    "InstabilityError",
    "evolve",
    "evolution_matrix",
    "coherent_state",
    "rotated_coherent_state",
    "stable_step",
]

log = logging.getLogger(__name__)

# RK4 is stable on the imaginary axis up to |z| = 2 sqrt(2)
RK4_IMAG_LIMIT = 2.0 * math.sqrt(2.0)


class StepSizeError(ValueError):
    """The requested step violates the stability bound of the explicit scheme."""


class InstabilityError(ArithmeticError):
    """The field norm grew beyond the allowed factor during integration."""


@dataclass
class Trajectory:
    """Sampled solution ``W(t)``.

    ``log`` holds one record per integration step (``t``, ``integral``,
    ``l2``, ``integral_drift``), where ``integral_drift`` is the running
    maximum of ``|int W(t) - int W(0)|`` and therefore non-decreasing.
    """

    times: list[float] = field(default_factory=list)
    fields: list[CoefficientField] = field(default_factory=list)
    log: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def append(self, t: float, f: CoefficientField) -> None:
        if self.times and not t > self.times[-1]:
            raise ValueError("trajectory times must be strictly increasing")
        self.times.append(float(t))
        self.fields.append(f)

    def __len__(self):
        return len(self.times)

    @property
    def basis(self) -> MraBasis:
        return self.fields[0].basis

    def vectors(self) -> np.ndarray:
        """Array ``(n_times, dim)`` of wavelet coefficient vectors."""
        return np.array([f.to_vector() for f in self.fields])

    def uniform(self) -> "Trajectory":
        """Copy without the trailing snapshot when it falls off the regular sampling grid.

        With ``snapshot_every > 1`` the final step is always stored, which can
        break uniform spacing; the time-scale split needs uniform samples.
        """
        out = Trajectory(list(self.times), list(self.fields), self.log, dict(self.metadata))
        if len(out) > 2:
            steps = np.diff(out.times)
            if abs(steps[-1] - steps[0]) > 1e-9 * max(steps[0], 1.0):
                out.times.pop()
                out.fields.pop()
        return out

    @property
    def max_drift(self) -> float:
        return max((r["integral_drift"] for r in self.log), default=0.0)

    def conservation_table(self) -> str:
        lines = ["# step t integral l2 integral_drift"]
        for i, r in enumerate(self.log):
            lines.append(f"{i} {r['t']:.12g} {r['integral']:.17g} {r['l2']:.17g} {r['integral_drift']:.6e}")
        return "\n".join(lines) + "\n"


def evolution_matrix(H: HamiltonianSpec, basis: MraBasis, t: float = 0.0) -> sp.csr_matrix:
    """Galerkin matrix of ``W -> (H * W - W * H) / (i hbar)``."""
    return assemble(evolution_operator(H, t), basis)


def stable_step(H: HamiltonianSpec, basis: MraBasis, safety: float = 0.9) -> float:
    """Largest step satisfying the RK4 bound for the operator at ``t = 0``."""
    bound = operator_norm_bound(evolution_matrix(H, basis))
    return math.inf if bound == 0 else safety * RK4_IMAG_LIMIT / bound


def coherent_state(basis: MraBasis, q0: float = 0.0, p0: float = 0.0, hbar: float = 1.0,
                   mass: float = 1.0, omega: float = 1.0) -> CoefficientField:
    """Projection of the oscillator coherent state centred at ``(q0, p0)``."""
    return analyze(lambda q, p: _coherent(q, p, q0, p0, hbar, mass, omega), basis)


def rotated_coherent_state(basis: MraBasis, t: float, q0: float = 0.0, p0: float = 0.0,
                           hbar: float = 1.0, mass: float = 1.0, omega: float = 1.0) -> CoefficientField:
    """Exact oscillator evolution of :func:`coherent_state` to time ``t`` (classical transport)."""
    c, s = math.cos(omega * t), math.sin(omega * t)
    qt = q0 * c + p0 / (mass * omega) * s
    pt = p0 * c - mass * omega * q0 * s
    return coherent_state(basis, qt, pt, hbar, mass, omega)


def _coherent(q, p, q0, p0, hbar, mass, omega):
    a = mass * omega
    return np.exp(-(a * (q - q0) ** 2 + (p - p0) ** 2 / a) / hbar) / (math.pi * hbar)


def evolve(W0: CoefficientField, H: HamiltonianSpec, t_end: float, dt: float, *,
           snapshot_every: int = 1, growth_limit: float = 10.0, check_step: bool = True) -> Trajectory:
    """Integrate ``dW/dt = L W`` with the classical fourth-order Runge-Kutta scheme.

    Parameters
    ----------
    W0 : CoefficientField
        Initial field; its basis is used throughout.
    H : HamiltonianSpec
        Hamiltonian; time-dependent symbols are re-assembled at every stage time.
    t_end, dt : float
        Final time and nominal step.  The step is shortened so that an
        integer number of steps lands exactly on ``t_end``.
    snapshot_every : int
        Store every n-th field (the first and last are always kept).
    growth_limit : float
        Abort when ``||W(t)|| > growth_limit * ||W0||``.

    Raises
    ------
    StepSizeError
        If ``dt`` exceeds ``2 sqrt(2) / ||L||`` (upper bound of the norm).
    InstabilityError
        On norm blow-up.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    basis = W0.basis
    n_steps = int(math.ceil(t_end / dt - 1e-12)) if t_end > 0 else 0
    h = t_end / n_steps if n_steps else dt

    cache: dict[float, sp.csr_matrix] = {}

    def G(t):
        key = 0.0 if not H.is_time_dependent else float(t)
        if key not in cache:
            if H.is_time_dependent and len(cache) > 8:
                cache.clear()
            cache[key] = evolution_matrix(H, basis, key)
        return cache[key]

    if check_step and n_steps:
        bound = operator_norm_bound(G(0.0))
        if h * bound > RK4_IMAG_LIMIT:
            raise StepSizeError(
                f"dt={h:.4g} exceeds the stability bound {RK4_IMAG_LIMIT / bound:.4g} "
                f"(||L|| <= {bound:.4g})")

    weights = integral_weights(basis)
    c = W0.to_scaling().ravel().astype(float if np.isrealobj(W0.to_scaling()) else complex)
    shape = (basis.size, basis.size)
    norm0 = float(np.linalg.norm(c))
    integral0 = float(np.real(weights @ c))
    traj = Trajectory(metadata={"dt": h, "steps": n_steps, "t_end": float(t_end),
                                "time_dependent": H.is_time_dependent})
    traj.append(0.0, W0.copy())
    drift = 0.0
    traj.log.append({"t": 0.0, "integral": integral0, "l2": norm0 ** 2, "integral_drift": 0.0})

    for step in range(1, n_steps + 1):
        t = (step - 1) * h
        if H.is_time_dependent:
            Ga, Gb, Gc = G(t), G(t + 0.5 * h), G(t + h)
        else:
            Ga = Gb = Gc = G(0.0)
        k1 = Ga @ c
        k2 = Gb @ (c + 0.5 * h * k1)
        k3 = Gb @ (c + 0.5 * h * k2)
        k4 = Gc @ (c + h * k3)
        c = c + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_new = step * h
        nrm = float(np.linalg.norm(c))
        if not np.isfinite(nrm) or (norm0 > 0 and nrm > growth_limit * norm0):
            raise InstabilityError(
                f"norm grew by a factor {nrm / norm0 if norm0 else math.inf:.3g} at step {step} "
                f"(t={t_new:.4g}, dt={h:.4g}); reduce dt")
        integral = float(np.real(weights @ c))
        drift = max(drift, abs(integral - integral0))
        traj.log.append({"t": t_new, "integral": integral, "l2": nrm ** 2, "integral_drift": drift})
        if step % snapshot_every == 0 or step == n_steps:
            traj.append(t_new, CoefficientField.from_scaling(basis, c.reshape(shape)))
    return traj
