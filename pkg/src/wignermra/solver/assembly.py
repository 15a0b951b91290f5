"""Galerkin projection of phase-space operators onto the finest scaling space."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from ..mra.basis import MraBasis
from ..mra.connection import SmoothnessError, moment_connection
from ..mra.filters import WaveletFamily
from ..operators import HamiltonianSpec, PhaseSpaceOperator, stationary_split
from ..symbols import _to_complex

__all__ = ["axis_matrix", "assemble", "GalerkinSystem", "build_system", "export_coo"]


@lru_cache(maxsize=256)
def _axis_matrix(family: WaveletFamily, n: int, half_width: float, power: int, deriv: int) -> sp.csr_matrix:
    shifts, J = moment_connection(family, power, deriv)
    h = 2.0 * half_width / n
    rows, cols, vals = [], [], []
    edges = -half_width + h * np.arange(n)
    for k in range(n):
        for col, d in enumerate(shifts):
            # place the pair (k, k+d) on the side of the seam holding its midpoint,
            # so that mirrored entries see the same coordinate
            base = edges[k] - 2.0 * half_width * math.floor((k + d / 2.0) / n)
            val = 0.0
            for r in range(power + 1):
                val += math.comb(power, r) * base ** (power - r) * h ** r * J[r, col]
            if val != 0.0:
                rows.append(k)
                cols.append((k + d) % n)
                vals.append(val / h ** deriv)
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    mat.sum_duplicates()
    return mat


def axis_matrix(basis: MraBasis, axis: int, power: int, deriv: int) -> sp.csr_matrix:
    """1D Galerkin matrix ``<phi_k, x^power d^deriv phi_l>`` along ``axis`` (0 = q, 1 = p)."""
    if deriv >= basis.family.order:
        raise SmoothnessError(
            f"derivative order {deriv} needs more than {basis.family.order} vanishing moments")
    return _axis_matrix(basis.family, basis.size, basis.half_width[axis], power, deriv)


def assemble(op: PhaseSpaceOperator, basis: MraBasis) -> sp.csr_matrix:
    """Sparse matrix of ``op`` on the finest tensor scaling basis.

    Unknowns are ordered ``k_q * n + k_p`` (row-major over ``(k_q, k_p)``).
    Entries are exact Galerkin projections; each monomial term is a Kronecker
    product of two banded 1D matrices, so the bandwidth does not grow with the
    level.
    """
    n = basis.size
    total = sp.csr_matrix((n * n, n * n), dtype=complex if not op.is_real() else float)
    for coeff, dq, dp in op.terms:
        for (a, b), c in coeff:
            c = _to_complex(c)
            if c.imag == 0.0:
                c = c.real
            term = sp.kron(axis_matrix(basis, 0, a, dq), axis_matrix(basis, 1, b, dp), format="csr")
            total = total + c * term
    total = total.tocsr()
    total.sum_duplicates()
    return total


@dataclass
class GalerkinSystem:
    """Projected stationary operators: ``A`` (symmetrized real part) and ``C`` (imaginary part)."""

    A: sp.csr_matrix
    C: sp.csr_matrix
    basis: MraBasis
    metadata: dict = field(default_factory=dict)


def build_system(H: HamiltonianSpec, basis: MraBasis, t: float = 0.0) -> GalerkinSystem:
    real_op, imag_op = stationary_split(H, t)
    A = assemble(real_op, basis)
    A = ((A + A.T) * 0.5).tocsr()
    C = assemble(imag_op, basis)
    n = basis.dim
    meta = {
        "level": basis.finest,
        "dim": n,
        "fill_ratio": A.nnz / float(n * n),
        "max_nnz_per_row": int(np.diff(A.indptr).max(initial=0)),
    }
    return GalerkinSystem(A, C, basis, meta)


def export_coo(mat: sp.spmatrix) -> str:
    """Coordinate text form, one ``row col value`` line per stored entry."""
    coo = sp.coo_matrix(mat)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"# shape {coo.shape[0]} {coo.shape[1]} nnz {coo.nnz}"]
    for i in order:
        v = coo.data[i]
        txt = repr(float(v)) if np.isrealobj(coo.data) else f"{v.real!r} {v.imag!r}"
        lines.append(f"{coo.row[i]} {coo.col[i]} {txt}")
    return "\n".join(lines) + "\n"
