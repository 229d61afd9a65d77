import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import round_probs_exact
from fractions import Fraction
from qdecp.errors import BasisMismatchError
from qdecp.optics import DetectorId, hwp45, hwp45_inverse, route_and_detect
from qdecp.qdcavity import FIG3_PARAMS, ideal_interaction, nonideal_scattering, scattering_coeffs
from qdecp.statevec import (
    Direction,
    Polarization,
    PureState,
    apply,
    basis_state,
    fidelity,
    phi_minus,
    phi_plus,
    photon,
    tensor,
    two_spin,
)

H = 1 / math.sqrt(2)


def after_cavity(alpha, cavity=None):
    beta = math.sqrt(1 - alpha * alpha)
    s = tensor(photon(alpha, beta), two_spin(up_up=alpha, down_down=beta))
    return hwp45(apply(ideal_interaction() if cavity is None else cavity, s))


def clicks_by_id(s):
    return {c.detector: c for c in route_and_detect(s)}


def test_hwp_on_circular_photons():
    np.testing.assert_allclose(hwp45(photon(1, 0)).amplitudes, [H, H])
    np.testing.assert_allclose(hwp45(photon(0, 1)).amplitudes, [H, -H])
    assert hwp45(photon(1, 0)).basis == "HV"


def test_hwp_rejects_linear_basis():
    with pytest.raises(BasisMismatchError):
        hwp45(hwp45(photon(1, 0)))


def test_hwp_inverse_roundtrip(rng):
    for _ in range(100):
        v = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        s = PureState(v / np.linalg.norm(v), "RL")
        assert np.abs(hwp45_inverse(hwp45(s)).amplitudes - s.amplitudes).max() < 1e-12


def test_round_one_detector_probabilities():
    c = clicks_by_id(after_cavity(0.8))
    exact = round_probs_exact(Fraction(4, 5), Fraction(3, 5))
    for det in ("D1", "D2", "D3", "D4"):
        assert c[DetectorId(det)].probability == pytest.approx(float(exact[det]), abs=1e-12)
    assert c[DetectorId.D1].probability == pytest.approx(0.2304, abs=1e-12)
    assert c[DetectorId.D3].probability == pytest.approx(0.2696, abs=1e-12)
    assert c[DetectorId.LOSS].probability == pytest.approx(0.0, abs=1e-12)


def test_product_state_never_reaches_up_detectors():
    c = clicks_by_id(after_cavity(1.0))
    assert c[DetectorId.D1].probability == 0 and c[DetectorId.D2].probability == 0
    assert c[DetectorId.D1].spins is None
    assert c[DetectorId.D3].probability == pytest.approx(0.5, abs=1e-12)
    assert c[DetectorId.D4].probability == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.05, 0.3, 0.5, 0.8, 0.99])
def test_up_detectors_herald_bell_states(alpha):
    c = clicks_by_id(after_cavity(alpha))
    assert fidelity(c[DetectorId.D1].spins, phi_plus()) == pytest.approx(1, abs=1e-12)
    assert fidelity(c[DetectorId.D2].spins, phi_minus()) == pytest.approx(1, abs=1e-12)


def test_lossy_completeness():
    s = after_cavity(0.8, nonideal_scattering(scattering_coeffs(FIG3_PARAMS)))
    clicks = route_and_detect(s)
    det = sum(c.probability for c in clicks if c.detector is not DetectorId.LOSS)
    assert det == pytest.approx(s.norm2, abs=1e-12)
    assert clicks[-1].probability == pytest.approx(1 - s.norm2, abs=1e-12)
    assert clicks[-1].probability > 0.2


@settings(max_examples=200)
@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=32, max_size=32))
def test_probability_completeness(xs):
    v = np.array(xs[:16]) + 1j * np.array(xs[16:])
    if np.linalg.norm(v) < 1e-3:
        v[0] = 1
    s = hwp45(PureState(v / np.linalg.norm(v), "RL"))
    total = sum(c.probability for c in route_and_detect(s))
    assert total == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("index", range(16))
def test_routing_exclusivity(index):
    s = PureState(np.eye(16)[index], "HV")
    nonzero = [c for c in route_and_detect(s) if c.probability > 0]
    assert len(nonzero) == 1
