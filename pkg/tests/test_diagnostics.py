import math

import numpy as np
import pytest

from wignermra.diagnostics import (Thresholds, classify, coefficient_entropy, integrate, participation_ratio,
                                   report)
from wignermra.mra import CoefficientField, MraBasis, analyze, grid
from wignermra.operators import HamiltonianSpec
from wignermra.solver import solve_stationary, superpose_modes
from wignermra.symbols import PolySymbol

from oracles import wigner_oscillator

q, p = PolySymbol.q(), PolySymbol.p()


@pytest.fixture(scope="module")
def basis():
    return MraBasis.create(5, 4.5, 3, 6)


@pytest.fixture(scope="module")
def modes(basis):
    return solve_stationary(HamiltonianSpec.oscillator(), basis, 6)


# --- integration -----------------------------------------------------------------------------------------------


def test_integrate_ground_mode(modes):
    assert integrate(modes.wigner(0)) == pytest.approx(1.0, abs=1e-6)


def test_integrate_zero_field(basis):
    assert integrate(CoefficientField.zeros(basis)) == 0.0


def test_integrate_odd_weight_on_even_field(basis):
    # narrow enough that the periodic seam at |q| = L contributes below round-off
    f = analyze(lambda Q, P: np.exp(-2 * Q ** 2 - 2 * P ** 2), basis)
    assert abs(integrate(f, q)) < 1e-10
    assert abs(integrate(f, q * p ** 2)) < 1e-10


def test_integrate_gaussian_moments(basis):
    f = analyze(lambda Q, P: np.exp(-Q ** 2 - P ** 2) / math.pi, basis)
    assert integrate(f) == pytest.approx(1.0, abs=1e-6)
    assert integrate(f, q ** 2 + p ** 2) == pytest.approx(1.0, abs=1e-5)
    # degree beyond the exact moment range uses the grid rule
    assert integrate(f, q ** 12) == pytest.approx(math.gamma(6.5) / math.sqrt(math.pi), rel=1e-3)


def test_energy_expectation_of_mode(modes):
    H = 0.5 * (q ** 2 + p ** 2)
    for n in range(3):
        assert integrate(modes.wigner(n), H) == pytest.approx(n + 0.5, rel=1e-3)


# --- coefficient statistics ------------------------------------------------------------------------------------


def test_single_coefficient(basis):
    f = CoefficientField.zeros(basis)
    f.details[5][1, 3, 4] = 2.0
    rep = report(f)
    assert rep.coefficient_entropy == 0.0
    assert rep.participation_ratio == 1.0
    f2 = CoefficientField.zeros(basis)
    f2.coarse[2, 2] = 1.0
    assert report(f2).label == "waveleton"


@pytest.mark.parametrize("K", [1, 2, 7, 100])
def test_uniform_entropy(K):
    v = np.zeros(500)
    v[:K] = -3.0
    assert coefficient_entropy(v) == pytest.approx(math.log(K), abs=1e-12)
    assert participation_ratio(v) == pytest.approx(K)


def test_zero_field_rejected(basis):
    with pytest.raises(ValueError):
        report(CoefficientField.zeros(basis))
    with pytest.raises(ValueError):
        coefficient_entropy(np.zeros(3))


def test_classify_thresholds():
    d = 4096
    assert classify(0.1, d, 0.0) == "waveleton"
    assert classify(0.1, d, 0.5) == "intermediate"
    assert classify(0.9 * math.log(d), d, 0.0) == "chaotic-like"
    assert classify(0.6 * math.log(d), d, 0.0) == "intermediate"
    with pytest.raises(ValueError):
        Thresholds(0.9, 0.5)


# --- physics ---------------------------------------------------------------------------------------------------


def test_mode_one_negativity_and_center(modes):
    rep = report(modes.wigner(1))
    assert rep.negativity > 0
    assert rep.center_value < 0
    assert rep.center_value == pytest.approx(-1 / math.pi, rel=5e-2)


def test_pure_mode_purity(modes):
    for n in range(6):
        assert report(modes.wigner(n)).purity == pytest.approx(1.0, abs=2e-2)
    # the L2-normalized eigenvector gives the same density diagnostics
    assert report(modes[0].field).purity == pytest.approx(report(modes.wigner(0)).purity, rel=1e-12)


def test_mixture_purity_against_quadrature(modes, basis):
    mix = modes.wigner(0) * (1 / 6)
    for n in range(1, 6):
        mix = mix + modes.wigner(n) * (1 / 6)
    rep = report(mix)
    # direct quadrature of the closed-form averaged density
    R = 4 * basis.size
    qs, ps = grid(basis, R)
    Q, P = np.meshgrid(qs, ps, indexing="ij")
    Wmix = sum(wigner_oscillator(n, Q, P) for n in range(6)) / 6
    oracle = 2 * math.pi * np.sum(Wmix ** 2) * (qs[1] - qs[0]) * (ps[1] - ps[0])
    assert oracle == pytest.approx(1 / 6, rel=1e-6)
    assert rep.purity == pytest.approx(oracle, rel=1e-2)
    assert rep.purity < min(report(modes.wigner(n)).purity for n in range(6))


def test_entropy_ordering(modes, basis):
    e0 = report(modes.wigner(0)).coefficient_entropy
    sup = superpose_modes(modes, [1 / math.sqrt(6)] * 6)
    e_sup = report(sup).coefficient_entropy
    rng = np.random.default_rng(0)
    rnd = CoefficientField.from_vector(basis, rng.normal(size=basis.dim))
    rnd = rnd * (sup.norm() / rnd.norm())
    e_rnd = report(rnd).coefficient_entropy
    assert e0 < e_sup < e_rnd
    assert report(modes.wigner(0)).label == "waveleton"
    assert report(rnd).label == "chaotic-like"


def test_report_deterministic_and_serializable(modes):
    a, b = report(modes.wigner(2)), report(modes.wigner(2))
    assert a.to_record() == b.to_record()
    text = a.to_text()
    assert "coefficient_entropy:" in text and "label:" in text
    assert abs(sum(a.level_fractions) - 1.0) < 1e-12
