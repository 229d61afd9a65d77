"""Wave plate, polarizing beam splitters and the four detectors."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from qdecp.errors import BasisMismatchError, ContractError
from qdecp.statevec import Direction, Polarization, PureState, project_photon

_S = 1 / np.sqrt(2)


class DetectorId(Enum):
    D1 = "D1"
    D2 = "D2"
    D3 = "D3"
    D4 = "D4"
    LOSS = "Loss"


# PBS transmits H and reflects V on each output path.
DETECTOR_PORTS = {
    DetectorId.D1: (Direction.UP, Polarization.H),
    DetectorId.D2: (Direction.UP, Polarization.V),
    DetectorId.D3: (Direction.DOWN, Polarization.H),
    DetectorId.D4: (Direction.DOWN, Polarization.V),
}


def _mix(s: PureState, new_basis: str) -> PureState:
    if s.dim not in (2, 16):
        raise ContractError("wave plate acts on a photon-carrying state")
    a = s.amplitudes
    if s.dim == 2:
        out = np.array([a[0] + a[1], a[0] - a[1]]) * _S
    else:
        first, second = a[:8], a[8:]
        out = np.concatenate([first + second, first - second]) * _S
    return PureState(out, new_basis, s.direction)


def hwp45(s: PureState) -> PureState:
    """Circular to linear: a_H = (a_R + a_L)/sqrt2, a_V = (a_R - a_L)/sqrt2.

    Acts identically on both propagation directions and both spins.
    """
    if s.basis != "RL":
        raise BasisMismatchError(f"wave plate expects R/L input, got {s.basis}")
    return _mix(s, "HV")


def hwp45_inverse(s: PureState) -> PureState:
    if s.basis != "HV":
        raise BasisMismatchError(f"inverse wave plate expects H/V input, got {s.basis}")
    return _mix(s, "RL")


@dataclass(frozen=True)
class Click:
    detector: DetectorId
    probability: float
    spins: PureState | None


def route_and_detect(s: PureState) -> list[Click]:
    """Born probabilities and conditional spin states for D1..D4, then Loss.

    The Loss entry carries whatever norm the input is missing.
    """
    if s.basis != "HV":
        raise BasisMismatchError("route_and_detect needs the photon in the H/V basis")
    clicks = []
    for det, (d, pol) in DETECTOR_PORTS.items():
        p, spins = project_photon(s, pol, d)
        clicks.append(Click(det, p, spins))
    loss = max(0.0, 1.0 - s.norm2)
    clicks.append(Click(DetectorId.LOSS, loss, None))
    return clicks
