from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from wignermra.checks import random_symbol
from wignermra.operators import (HamiltonianSpec, PhaseSpaceOperator, evolution_operator, format_operator,
                                 left_star_operator, right_star_operator, stationary_split)
from wignermra.symbols import PolySymbol, moyal_bracket, moyal_star, parse_symbol

from oracles import apply_operator_sympy, wigner_oscillator_sympy

q, p = PolySymbol.q(), PolySymbol.p()
qe, pe = PolySymbol.q(exact=True), PolySymbol.p(exact=True)


def exact_spec(potential, mass=Fraction(1), hbar=Fraction(1), symbol=None):
    return HamiltonianSpec(mass=mass, potential=potential, hbar=hbar, symbol=symbol)


def test_operator_algebra():
    D = PhaseSpaceOperator.derivative(1, 0)
    Q = PhaseSpaceOperator.multiplication(q)
    # [d_q, q] = 1
    comm = D @ Q - Q @ D
    assert comm.allclose(PhaseSpaceOperator.identity())
    assert (D ** 2).orders() == [(2, 0)]
    assert (D ** 2).apply(q ** 3).allclose(6 * q)


def test_kinetic_block_term_for_term():
    m, hbar = 2.0, 0.5
    H = HamiltonianSpec(mass=m, potential=PolySymbol.zero(), hbar=hbar)
    real_op, imag_op = stationary_split(H)
    assert real_op.orders() == [(0, 0), (2, 0)]
    assert real_op.coefficient(0, 0).allclose(p ** 2 / (2 * m))
    assert real_op.coefficient(2, 0).allclose(PolySymbol.constant(-hbar ** 2 / (8 * m)))
    assert imag_op.orders() == [(1, 0)]
    assert imag_op.coefficient(1, 0).allclose(-hbar / (2 * m) * p)


def test_quadratic_potential_shift():
    H = HamiltonianSpec(mass=1.0, potential=0.5 * q ** 2, hbar=1.0)
    real_op, imag_op = stationary_split(H)
    assert real_op.coefficient(0, 2).allclose(PolySymbol.constant(-1 / 8))
    assert imag_op.coefficient(0, 1).allclose(0.5 * q)


@pytest.mark.parametrize("potential", ["0.5 * q^2", "0.5 * q^2 + 0.1 * q^4", "q^3 - q", "0"])
def test_split_parity(potential):
    H = HamiltonianSpec(potential=parse_symbol(potential))
    real_op, imag_op = stationary_split(H)
    assert all((dq + dp) % 2 == 0 for dq, dp in real_op.orders())
    assert all((dq + dp) % 2 == 1 for dq, dp in imag_op.orders())
    assert real_op.is_real() and imag_op.is_real()


def _random_H_symbols():
    yield qe ** 2 / 2 + pe ** 2 / 2
    yield pe ** 2 / 2 + qe ** 4 * Fraction(1, 10) + qe ** 2 / 2
    yield qe ** 2 * pe + pe ** 3 * Fraction(1, 3) - qe * pe ** 2


@pytest.mark.parametrize("hbar", [Fraction(1, 2), Fraction(1), Fraction(2)])
def test_bopp_equals_star_exact(hbar):
    rng = np.random.default_rng(7)
    for Hs in _random_H_symbols():
        H = exact_spec(PolySymbol.zero(exact=True), hbar=hbar, symbol=Hs)
        L, R = left_star_operator(H), right_star_operator(H)
        for _ in range(8):
            W = random_symbol(rng, 4, exact=True)
            assert L.apply(W) == moyal_star(Hs, W, hbar)
            assert R.apply(W) == moyal_star(W, Hs, hbar)


def test_evolution_operator_matches_bracket():
    rng = np.random.default_rng(3)
    hbar = Fraction(1, 3)
    Hs = pe ** 2 / 2 + qe ** 4 * Fraction(1, 5)
    H = exact_spec(PolySymbol.zero(exact=True), hbar=hbar, symbol=Hs)
    G = evolution_operator(H)
    for _ in range(10):
        W = random_symbol(rng, 5, exact=True)
        assert G.apply(W) == moyal_bracket(Hs, W, hbar)


def test_oscillator_evolution_is_classical_rotation():
    G = evolution_operator(HamiltonianSpec.oscillator())
    assert set(G.orders()) == {(1, 0), (0, 1)}
    assert G.coefficient(1, 0).allclose(-1 * p)
    assert G.coefficient(0, 1).allclose(q)


def test_quartic_evolution_has_third_derivative():
    G = evolution_operator(HamiltonianSpec(potential=q ** 4, hbar=1.0))
    assert G.coefficient(0, 1).allclose(4 * q ** 3)
    assert G.coefficient(0, 3).allclose(-1.0 * q)


def test_function_of_H_is_stationary():
    # W = H^2 is a function of H, so it commutes with H under the Moyal bracket for quadratic H
    H = HamiltonianSpec.oscillator()
    W = (q ** 2 + p ** 2) ** 2
    assert evolution_operator(H).apply(W).allclose(PolySymbol.zero())


@pytest.mark.parametrize("n", range(4))
def test_laguerre_modes_solve_stationary_equation(n):
    """Closed-form oscillator Wigner functions satisfy both real equations."""
    real_op, imag_op = stationary_split(HamiltonianSpec.oscillator())
    qs, ps, W = wigner_oscillator_sympy(n)
    lhs_real = apply_operator_sympy(real_op, W, qs, ps)
    lhs_imag = apply_operator_sympy(imag_op, W, qs, ps)
    assert sp.simplify(lhs_real - (n + sp.Rational(1, 2)) * W) == 0
    assert sp.simplify(lhs_imag) == 0


def test_time_dependent_hamiltonian():
    H = HamiltonianSpec(time_dependence=lambda t: p ** 2 / 2 + (1 + t) * q ** 2 / 2)
    assert H.is_time_dependent
    G0, G1 = evolution_operator(H, 0.0), evolution_operator(H, 1.0)
    assert G1.coefficient(0, 1).allclose(2 * q)
    assert G0.coefficient(0, 1).allclose(q)


def test_validation():
    with pytest.raises(ValueError):
        HamiltonianSpec(mass=0.0)
    with pytest.raises(ValueError):
        HamiltonianSpec(hbar=-1.0)
    with pytest.raises(ValueError):
        HamiltonianSpec(potential=q * p)
    with pytest.raises(ValueError):
        stationary_split(HamiltonianSpec(symbol=PolySymbol({(1, 0): 1j})))


def test_format_operator_lists_terms():
    text = format_operator(stationary_split(HamiltonianSpec.oscillator())[0])
    assert "d^2/dq^2" in text or "dq^2" in text
