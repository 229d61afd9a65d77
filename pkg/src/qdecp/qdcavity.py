"""Quantum-dot / microcavity scattering.

Rates are in units of the input/output decay rate kappa, which is fixed to 1.
Frequencies enter only through the detunings of the cavity mode and of the
trion transition from the probe photon.

A photon-spin combination is "hot" when the photon's spin angular momentum
matches the trion transition selected by the electron spin. Hot combinations
are reflected (polarization and direction flip); cold ones are transmitted
with a pi phase. With finite coupling and side leakage each combination
splits into a reflected and a transmitted part with amplitudes (r, t) for
hot and (r0, t0) for cold, and the missing norm is lost to leaky modes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from qdecp.errors import ContractError, DegenerateCoefficientsError, SingularParametersError
from qdecp.statevec import basis_index


@dataclass(frozen=True)
class CavityParams:
    kappa_s: float = 0.0
    gamma: float = 0.0
    g: float = 0.0
    delta_c: float = 0.0
    delta_x: float = 0.0
    kappa: float = 1.0

    def __post_init__(self):
        if self.kappa != 1.0:
            raise ContractError("rates are expressed in units of kappa; kappa must be 1")
        for name in ("kappa_s", "gamma", "g"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ContractError(f"{name} must be finite and >= 0, got {v!r}")
        for name in ("delta_c", "delta_x"):
            if not math.isfinite(getattr(self, name)):
                raise ContractError(f"{name} must be finite")

    @classmethod
    def resonant(cls, kappa_s=0.0, gamma=0.0, g=0.0, delta=0.0) -> CavityParams:
        """Cavity and trion share one detuning from the probe."""
        return cls(kappa_s=kappa_s, gamma=gamma, g=g, delta_c=delta, delta_x=delta)


# Parameters of the leaky-cavity curve: kappa_s = 0.5, g = 0.5, gamma = 0.1.
FIG3_PARAMS = CavityParams.resonant(kappa_s=0.5, gamma=0.1, g=0.5)


@dataclass(frozen=True)
class ScatteringCoeffs:
    t: complex
    r: complex
    t0: complex
    r0: complex

    def as_dict(self) -> dict[str, complex]:
        return {"t": self.t, "r": self.r, "t0": self.t0, "r0": self.r0}


# Lossless limit: hot combinations fully reflect, cold ones transmit with a sign flip.
IDEAL_COEFFS = ScatteringCoeffs(t=0j, r=1 + 0j, t0=-1 + 0j, r0=0j)


def _transmission(p: CavityParams, g: float) -> complex:
    cavity = 1j * p.delta_c + p.kappa + p.kappa_s / 2
    if g == 0:
        # uncoupled dot: the dipole factor cancels exactly
        return -p.kappa / cavity
    dipole = 1j * p.delta_x + p.gamma / 2
    denom = dipole * cavity + g * g
    if denom == 0:
        raise SingularParametersError(f"vanishing denominator for {p}")
    return -p.kappa * dipole / denom


def scattering_coeffs(p: CavityParams) -> ScatteringCoeffs:
    """Hot (coupled, g) and cold (g = 0) reflection/transmission amplitudes."""
    t = _transmission(p, p.g)
    t0 = _transmission(p, 0.0)
    return ScatteringCoeffs(t=t, r=1 + t, t0=t0, r0=1 + t0)


# (pol, dir, s1) combos that couple to the trion; all others are cold.
HOT_COMBOS = frozenset({(0, 0, 0), (1, 1, 0), (0, 1, 1), (1, 0, 1)})


def is_hot(pol: int, direction: int, s1: int) -> bool:
    return (pol, direction, s1) in HOT_COMBOS


def _flip(index: int) -> int:
    # reflection inverts both polarization and direction
    return index ^ 0b1100


def _scattering_matrix(hot_refl, hot_trans, cold_refl, cold_trans) -> np.ndarray:
    m = np.zeros((16, 16), dtype=complex)
    for pol in (0, 1):
        for d in (0, 1):
            for s1 in (0, 1):
                refl, trans = ((hot_refl, hot_trans) if is_hot(pol, d, s1)
                               else (cold_refl, cold_trans))
                for s2 in (0, 1):
                    i = basis_index(pol, d, s1, s2)
                    m[_flip(i), i] += refl
                    m[i, i] += trans
    return m


def ideal_interaction() -> np.ndarray:
    """Signed permutation for a perfect cavity: hot combos reflect, cold ones pick up -1."""
    return _scattering_matrix(1.0, 0.0, 0.0, -1.0).real.astype(complex)


def nonideal_scattering(c: ScatteringCoeffs) -> np.ndarray:
    """Sub-unitary scattering map for finite coupling and leakage."""
    return _scattering_matrix(c.r, c.t, c.r0, c.t0)


class DegradationModel(Enum):
    IDEAL = "ideal"
    NORMALIZED_RATIO = "ratio"
    SQUARED_MAGNITUDE = "squared"
    EXACT_SIM = "exact-sim"


def efficiency_factors(c: ScatteringCoeffs, model: DegradationModel) -> tuple[float, float]:
    """Per-pass (reflection, transmission) efficiency used to degrade P_K.

    ``NORMALIZED_RATIO`` gives |r|/sqrt(|r0|^2+|r|^2) and |t0|/sqrt(|t0|^2+|t|^2);
    ``SQUARED_MAGNITUDE`` gives |r|^2 and |t0|^2.
    """
    r, r0, t, t0 = abs(c.r), abs(c.r0), abs(c.t), abs(c.t0)
    if r == r0 == t == t0 == 0:
        raise DegenerateCoefficientsError(f"zero coefficients in {c}")
    if model is DegradationModel.NORMALIZED_RATIO:
        rn = math.hypot(r0, r)
        tn = math.hypot(t0, t)
        # a channel with no amplitude at all contributes nothing
        return (r / rn if rn else 0.0), (t0 / tn if tn else 0.0)
    if model is DegradationModel.SQUARED_MAGNITUDE:
        return r * r, t0 * t0
    raise ContractError(f"no per-pass efficiency for model {model}")
