import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import CAVITY_RULES, cold_transmission, transmission
from qdecp.errors import ContractError, DegenerateCoefficientsError
from qdecp.qdcavity import (
    FIG3_PARAMS,
    IDEAL_COEFFS,
    CavityParams,
    DegradationModel,
    ScatteringCoeffs,
    efficiency_factors,
    ideal_interaction,
    nonideal_scattering,
    scattering_coeffs,
)
from qdecp.statevec import Direction, Polarization, apply, basis_index, basis_state

R, L = Polarization.R, Polarization.L
UP, DOWN = Direction.UP, Direction.DOWN
FIG3 = ScatteringCoeffs(t=-0.16, r=0.84, t0=-0.8, r0=0.2)

rate = st.floats(0, 2, allow_nan=False)


def grid(rng, n=100):
    return [CavityParams(*row) for row in rng.uniform(0, 2, size=(n, 5))]


def test_fig3_spot_values():
    c = scattering_coeffs(FIG3_PARAMS)
    assert abs(c.t - transmission(0.5, 0.1, 0.5, 0, 0)) < 1e-15
    assert abs(c.t0 - cold_transmission(0.5, 0)) < 1e-15
    for got, want in [(c.t, -0.16), (c.r, 0.84), (c.t0, -0.8), (c.r0, 0.2)]:
        assert abs(got - want) < 1e-12


def test_zero_coupling_is_cold_cavity():
    for delta in (-1.3, 0.0, 0.7):
        c = scattering_coeffs(CavityParams.resonant(kappa_s=0.3, gamma=0.2, g=0.0, delta=delta))
        assert c.t == c.t0 and c.r == c.r0


def test_coefficients_match_oracle_on_grid(rng):
    for p in grid(rng):
        c = scattering_coeffs(p)
        ref = transmission(p.kappa_s, p.gamma, p.g, p.delta_c, p.delta_x)
        assert abs(c.t - ref) < 1e-12
        assert abs(c.t0 - cold_transmission(p.kappa_s, p.delta_c)) < 1e-12
        assert abs(c.r - c.t - 1) < 1e-12
        assert abs(c.r0 - c.t0 - 1) < 1e-12
        assert abs(c.r) ** 2 + abs(c.t) ** 2 <= 1 + 1e-12
        assert abs(c.r0) ** 2 + abs(c.t0) ** 2 <= 1 + 1e-12


def test_small_coupling_continuity(rng):
    for p in grid(rng):
        small = CavityParams(p.kappa_s, p.gamma, 1e-8, p.delta_c, p.delta_x)
        assert abs(scattering_coeffs(small).t - scattering_coeffs(p).t0) < 1e-6


def test_params_validation():
    with pytest.raises(ContractError):
        CavityParams(kappa_s=-0.1)
    with pytest.raises(ContractError):
        CavityParams(kappa=2.0)
    with pytest.raises(ContractError):
        CavityParams(delta_c=math.inf)


def test_ideal_map_matches_rule_table():
    u = ideal_interaction()
    for (pol, d, s1), (pol2, d2, sign) in CAVITY_RULES.items():
        for s2 in (0, 1):
            src = basis_index(0 if pol == "R" else 1, 0 if d == "u" else 1, 0 if s1 == "u" else 1, s2)
            dst = basis_index(0 if pol2 == "R" else 1, 0 if d2 == "u" else 1,
                              0 if s1 == "u" else 1, s2)
            col = np.zeros(16)
            col[dst] = sign
            np.testing.assert_array_equal(u[:, src].real, col)


def test_ideal_examples():
    u = ideal_interaction()
    out = apply(u, basis_state(R, UP, 0, 1))
    np.testing.assert_array_equal(out.amplitudes, basis_state(L, DOWN, 0, 1).amplitudes)
    out = apply(u, basis_state(R, DOWN, 0, 0))
    np.testing.assert_array_equal(out.amplitudes, -basis_state(R, DOWN, 0, 0).amplitudes)


def test_ideal_map_involution_and_unitary():
    u = ideal_interaction()
    np.testing.assert_array_equal(u @ u, np.eye(16))
    assert np.abs(u.conj().T @ u - np.eye(16)).max() < 1e-12


def test_nonideal_hot_branch():
    m = nonideal_scattering(FIG3)
    out = apply(m, basis_state(R, UP, 0, 0))
    expected = 0.84 * basis_state(L, DOWN, 0, 0).amplitudes - 0.16 * basis_state(R, UP, 0, 0).amplitudes
    np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)
    assert 1 - out.norm2 == pytest.approx(1 - (0.84 ** 2 + 0.16 ** 2), abs=1e-12)
    assert 1 - out.norm2 == pytest.approx(0.2688, abs=1e-12)


def test_nonideal_cold_branch():
    out = apply(nonideal_scattering(FIG3), basis_state(R, DOWN, 0, 1))
    expected = -0.8 * basis_state(R, DOWN, 0, 1).amplitudes + 0.2 * basis_state(L, UP, 0, 1).amplitudes
    np.testing.assert_allclose(out.amplitudes, expected, atol=1e-15)


def test_nonideal_ideal_limit_equals_ideal_map():
    assert np.abs(nonideal_scattering(IDEAL_COEFFS) - ideal_interaction()).max() <= 1e-12


def test_nonideal_never_amplifies(rng):
    states = rng.standard_normal((100, 16)) + 1j * rng.standard_normal((100, 16))
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    for p in grid(rng):
        out = states @ nonideal_scattering(scattering_coeffs(p)).T
        assert (np.linalg.norm(out, axis=1) <= 1 + 1e-12).all()


def test_efficiency_ratio():
    refl, trans = efficiency_factors(FIG3, DegradationModel.NORMALIZED_RATIO)
    assert refl == pytest.approx(0.84 / math.sqrt(0.84 ** 2 + 0.2 ** 2), abs=1e-15)
    assert refl == pytest.approx(0.97281, abs=1e-5)
    assert trans == pytest.approx(0.98058, abs=1e-5)


def test_efficiency_squared():
    refl, trans = efficiency_factors(FIG3, DegradationModel.SQUARED_MAGNITUDE)
    assert refl == pytest.approx(0.7056, abs=1e-15)
    assert trans == pytest.approx(0.64, abs=1e-15)


@pytest.mark.parametrize("model", [DegradationModel.NORMALIZED_RATIO,
                                   DegradationModel.SQUARED_MAGNITUDE])
def test_efficiency_lossless(model):
    assert efficiency_factors(IDEAL_COEFFS, model) == (1.0, 1.0)


def test_efficiency_degenerate():
    with pytest.raises(DegenerateCoefficientsError):
        efficiency_factors(ScatteringCoeffs(0, 0, 0, 0), DegradationModel.NORMALIZED_RATIO)
    with pytest.raises(ContractError):
        efficiency_factors(FIG3, DegradationModel.IDEAL)


@given(rate, rate, rate, rate)
def test_efficiencies_in_unit_interval(ks, gamma, g, delta):
    c = scattering_coeffs(CavityParams.resonant(ks, gamma, g, delta))
    for model in (DegradationModel.NORMALIZED_RATIO, DegradationModel.SQUARED_MAGNITUDE):
        for f in efficiency_factors(c, model):
            assert 0.0 <= f <= 1.0 + 1e-12
