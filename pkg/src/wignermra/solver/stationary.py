"""Stationary Wigner eigenmodes (star-genvalue problem) and their superpositions."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from ..io import load_npz, save_npz
from ..mra.basis import CoefficientField, MraBasis
from ..operators import HamiltonianSpec
from ..symbols import format_symbol, parse_symbol
from .assembly import GalerkinSystem, build_system

__all__ = [
    "Eigenmode",
    "EigenmodeSet",
    "EigensolverError",
    "NoPhysicalModesError",
    "solve_stationary",
    "superpose_modes",
    "integral_weights",
    "operator_norm_bound",
]

log = logging.getLogger(__name__)


class EigensolverError(RuntimeError):
    pass


class NoPhysicalModesError(RuntimeError):
    """Every candidate failed the imaginary-part residual test."""

    def __init__(self, message: str, residuals: list[tuple[float, float]]):
        super().__init__(message)
        self.residuals = residuals


@dataclass
class Eigenmode:
    energy: float
    field: CoefficientField
    imag_residual: float
    normalization: float

    def wigner(self) -> CoefficientField:
        """Field rescaled to unit phase-space integral."""
        return self.field / self.normalization


@dataclass
class EigenmodeSet:
    """Eigenmodes sorted by energy.

    Each ``field`` is L2-normalized and its sign chosen so that its integral
    over the box, stored as ``normalization``, is non-negative.
    """

    modes: list[Eigenmode]
    basis: MraBasis
    hamiltonian: HamiltonianSpec | None = None
    rejected: list[tuple[float, float]] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.modes)

    def __getitem__(self, n: int) -> Eigenmode:
        return self.modes[n]

    def __iter__(self):
        return iter(self.modes)

    @property
    def energies(self) -> np.ndarray:
        return np.array([m.energy for m in self.modes])

    def wigner(self, n: int) -> CoefficientField:
        return self.modes[n].wigner()

    def project(self, field: CoefficientField) -> np.ndarray:
        """Coefficients ``<mode_n, field>`` (modes are orthonormal)."""
        return np.array([m.field.dot(field) for m in self.modes])

    # -- serialization ---------------------------------------------------------
    def save(self, stem) -> None:
        """Write ``<stem>.npz`` (coefficients) and ``<stem>.json`` (metadata)."""
        stem = str(stem)
        vecs = np.array([m.field.to_vector() for m in self.modes])
        save_npz(stem + ".npz", vectors=vecs, energies=self.energies)
        meta = {
            "basis": self.basis.to_dict(),
            "hamiltonian": _hamiltonian_dict(self.hamiltonian),
            "modes": [{"energy": m.energy, "imag_residual": m.imag_residual,
                       "normalization": m.normalization} for m in self.modes],
            "rejected": [list(r) for r in self.rejected],
            "metadata": self.metadata,
        }
        with open(stem + ".json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, stem) -> "EigenmodeSet":
        stem = str(stem)
        with open(stem + ".json") as fh:
            meta = json.load(fh)
        vecs = load_npz(stem + ".npz")["vectors"]
        basis = MraBasis.from_dict(meta["basis"])
        modes = [Eigenmode(d["energy"], CoefficientField.from_vector(basis, v), d["imag_residual"],
                           d["normalization"]) for d, v in zip(meta["modes"], vecs)]
        H = meta["hamiltonian"]
        ham = None
        if H is not None:
            ham = HamiltonianSpec(mass=H["mass"], hbar=H["hbar"], potential=parse_symbol(H["potential"]),
                                  symbol=parse_symbol(H["symbol"]) if H["symbol"] else None)
        return cls(modes, basis, ham, [tuple(r) for r in meta["rejected"]], meta["metadata"])


def _hamiltonian_dict(H: HamiltonianSpec | None):
    if H is None:
        return None
    return {"mass": H.mass, "hbar": float(H.hbar), "potential": format_symbol(H.potential),
            "symbol": format_symbol(H.symbol) if H.symbol is not None else None}


def integral_weights(basis: MraBasis) -> np.ndarray:
    """Vector ``w`` with ``int W = w . c`` for finest-level scaling coefficients ``c``.

    ``int phi_{j,k} = h**0.5``, so the weights are constant.
    """
    hq, hp = basis.spacing()
    return np.full(basis.dim, np.sqrt(hq * hp))


def operator_norm_bound(M) -> float:
    """Upper bound ``sqrt(||M||_1 ||M||_inf)`` of the spectral norm of a sparse matrix."""
    if M.nnz == 0:
        return 0.0
    a = abs(M)
    return float(np.sqrt(a.sum(axis=0).max() * a.sum(axis=1).max()))


def _lowest_eigenpairs(A, k: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    n = A.shape[0]
    if k >= n - 1 or n <= 400:
        w, v = sla.eigh(A.toarray(), subset_by_index=[0, min(k, n) - 1])
        return w, v
    v0 = np.random.default_rng(seed).standard_normal(n)
    try:
        w, v = spla.eigsh(A, k=k, which="SA", v0=v0, tol=0.0, maxiter=max(20 * n, 5000))
    except spla.ArpackNoConvergence as exc:
        raise EigensolverError(f"eigensolver did not converge for k={k}") from exc
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def _clusters(w: np.ndarray, rel_gap: float) -> list[np.ndarray]:
    groups, start = [], 0
    for i in range(1, len(w) + 1):
        if i == len(w) or w[i] - w[i - 1] > rel_gap * max(1.0, abs(w[i - 1])):
            groups.append(np.arange(start, i))
            start = i
    return groups


def _fix_sign(vec: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, float]:
    integral = float(weights @ vec)
    if integral < 0 or (integral == 0 and vec[np.argmax(np.abs(vec))] < 0):
        vec, integral = -vec, -integral
    return vec, integral


def solve_stationary(H: HamiltonianSpec, basis: MraBasis, n_modes: int, *, tau: float = 1e-3,
                     cluster_gap: float = 0.05, seed: int = 0,
                     system: GalerkinSystem | None = None,
                     max_candidates: int | None = None) -> EigenmodeSet:
    """Lowest physical solutions of ``H * W = eps W``.

    The symmetrized real part ``A`` is diagonalized from the bottom of its
    spectrum.  Eigenvalues closer than ``cluster_gap`` (relative) form a
    cluster; inside each cluster the combinations with the smallest
    imaginary-part residual are found by an SVD of ``C V``, kept when the
    residual is at most ``tau``, and re-diagonalized in ``A``.  Candidates are
    doubled (up to ``max_candidates``, default ``max(16 n_modes, 64)``) until
    ``n_modes`` modes are accepted from complete clusters.

    The residual is componentwise relative, ``||C w|| / || |C| |w| ||`` with
    ``|.|`` taken entrywise, i.e. the imaginary-part defect measured against
    the size of the terms of ``C`` on the support of ``w``.  Exact solutions
    have ``C w = 0``; spurious combinations (for the oscillator, the
    non-rotationally-symmetric eigenfunctions of ``A``; in general the
    symmetrized transition fields at ``(E_m + E_n) / 2``) have ``||C w||`` of
    the order of an energy gap.  A normwise measure ``||C w|| / ||C||`` is
    not used because ``||C||`` is dominated by the box corners for
    polynomial potentials and would admit such spurious modes.

    Raises
    ------
    NoPhysicalModesError
        If no candidate passes; the exception carries ``(energy, residual)``
        of every rejected candidate.
    EigensolverError
        If the iterative eigensolver fails to converge.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be at least 1")
    system = system or build_system(H, basis)
    A, C = system.A, system.C
    n = A.shape[0]
    weights = integral_weights(basis)
    abs_C = abs(C)

    def residual(vec):
        num = float(np.linalg.norm(C @ vec))
        den = float(np.linalg.norm(abs_C @ np.abs(vec)))
        return num / den if den > 0 else 0.0

    k = min(max(4 * n_modes, 16), n)
    cap = min(max_candidates or max(16 * n_modes, 64), n)
    while True:
        w, V = _lowest_eigenpairs(A, k, seed)
        groups = _clusters(w, cluster_gap)
        accepted, rejected = [], []
        complete = k >= n
        for gi, idx in enumerate(groups):
            last_group = gi == len(groups) - 1
            if last_group and not complete:
                break
            Vc = V[:, idx]
            _, _, vh = np.linalg.svd(C @ Vc, full_matrices=False)
            good = []
            for x in vh:
                vec = Vc @ x.conj()
                res = residual(vec)
                if res <= tau:
                    good.append((vec, res))
                else:
                    rejected.append((float(vec @ (A @ vec)), res))
            if good:
                G = np.column_stack([g[0] for g in good])
                ew, ev = np.linalg.eigh(G.T @ (A @ G))
                for e, coeff in zip(ew, ev.T):
                    vec = G @ coeff
                    vec /= np.linalg.norm(vec)
                    res = residual(vec)
                    accepted.append((float(e), vec, res))
            if len(accepted) >= n_modes:
                break
        if len(accepted) >= n_modes or k >= cap:
            break
        k = min(2 * k, cap)
        log.debug("increasing eigen candidates to %d", k)
    if not accepted:
        raise NoPhysicalModesError(
            f"all {len(rejected)} candidates rejected by the residual filter (tau={tau})", rejected)
    accepted.sort(key=lambda t: t[0])
    modes = []
    for e, vec, res in accepted[:n_modes]:
        vec, integral = _fix_sign(vec, weights)
        f = CoefficientField.from_scaling(basis, vec.reshape(basis.size, basis.size))
        modes.append(Eigenmode(e, f, res, integral))
    meta = dict(system.metadata, candidates=int(k), tau=tau, cluster_gap=cluster_gap, seed=seed)
    if len(modes) < n_modes:
        log.warning("only %d of %d requested modes passed the residual filter", len(modes), n_modes)
    return EigenmodeSet(modes, basis, H, rejected, meta)


def superpose_modes(modes: EigenmodeSet, weights) -> CoefficientField:
    """``sum_n a_n U^n`` over the leading modes; the weights are kept in the metadata."""
    weights = np.asarray(weights)
    if weights.ndim != 1 or len(weights) > len(modes):
        raise ValueError(f"got {weights.size} weights for {len(modes)} modes")
    vec = sum(a * m.field.to_vector() for a, m in zip(weights, modes.modes))
    if isinstance(vec, int):
        vec = np.zeros(modes.basis.dim)
    out = CoefficientField.from_vector(modes.basis, vec)
    out.metadata["weights"] = [complex(a) if np.iscomplexobj(weights) else float(a) for a in weights]
    return out
