"""Closed-form success probabilities and alpha sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from qdecp.errors import ContractError
from qdecp.protocol import EntangledPair, branch_tree_exact
from qdecp.qdcavity import (
    IDEAL_COEFFS,
    CavityParams,
    DegradationModel,
    ScatteringCoeffs,
    efficiency_factors,
    scattering_coeffs,
)


def _ideal_terms(alpha: float, k_max: int) -> tuple[list[float], bool]:
    """P_1..P_kmax for the lossless cavity, plus an underflow flag.

    P_K = 2 (a b)^(2^(K-1)) / prod_{j=2..K} (a^(2^(j-1)) + b^(2^(j-1))) with
    a = alpha^2, b = 1 - alpha^2. Each j contributes the factor
    (ab)^m / (a^2m + b^2m) = rho^m / (1 + rho^2m), m = 2^(j-2), rho = a/b <= 1,
    which keeps every intermediate in [0, 1/2].
    """
    if not 0.0 <= alpha <= 1.0:
        raise ContractError(f"alpha must lie in [0, 1], got {alpha!r}")
    if k_max < 1:
        raise ContractError("K must be >= 1")
    a = alpha * alpha
    b = 1.0 - a
    if a > b:
        a, b = b, a
    if a == 0.0:
        return [0.0] * k_max, False
    rho = a / b
    p = 2.0 * a * b
    terms = [p]
    rho_m = rho
    for _ in range(2, k_max + 1):
        p *= rho_m / (1.0 + rho_m * rho_m)
        terms.append(p)
        rho_m *= rho_m
    underflow = terms[-1] == 0.0
    return terms, underflow


def p_k_ideal(alpha: float, k: int) -> float:
    """Success probability of round ``k`` for a perfect cavity."""
    if k < 1:
        raise ContractError("K must be >= 1")
    return _ideal_terms(alpha, k)[0][-1]


def p_k_degraded(alpha: float, k: int, coeffs: ScatteringCoeffs,
                 model: DegradationModel) -> float:
    """Ideal P_K times one reflection and K-1 transmission efficiencies."""
    if model in (DegradationModel.IDEAL, DegradationModel.EXACT_SIM):
        raise ContractError(f"p_k_degraded does not handle model {model}")
    refl, trans = efficiency_factors(coeffs, model)
    return trans ** (k - 1) * refl * p_k_ideal(alpha, k)


@dataclass
class ProtocolReport:
    alpha: float
    K: int
    per_round: list[tuple[int, float]]
    model: DegradationModel
    params: CavityParams | None = None
    underflow: bool = False
    fidelities: list[float | None] = field(default_factory=list)

    @property
    def cumulative(self) -> float:
        return math.fsum(p for _, p in self.per_round)


Cavity = CavityParams | ScatteringCoeffs | None


def _resolve(cavity: Cavity) -> tuple[CavityParams | None, ScatteringCoeffs | None]:
    if isinstance(cavity, CavityParams):
        return cavity, scattering_coeffs(cavity)
    return None, cavity


def protocol_report(alpha: float, k_max: int, cavity: Cavity,
                    model: DegradationModel) -> ProtocolReport:
    """Per-round and cumulative success for one alpha under one model.

    ``cavity`` is either physical parameters or precomputed coefficients;
    None stands for the lossless cavity.
    """
    if k_max < 1:
        raise ContractError("K_max must be >= 1")
    params, coeffs = _resolve(cavity)
    fids: list = []
    if model is DegradationModel.IDEAL:
        terms, underflow = _ideal_terms(alpha, k_max)
    elif model is DegradationModel.EXACT_SIM:
        tree = branch_tree_exact(EntangledPair.from_alpha(alpha), k_max, coeffs)
        terms, underflow = tree.success_masses(), False
        fids = [tree.success_fidelity(d) for d in range(1, k_max + 1)]
    else:
        if coeffs is None:
            coeffs = IDEAL_COEFFS
        ideal, underflow = _ideal_terms(alpha, k_max)
        refl, trans = efficiency_factors(coeffs, model)
        terms = [trans ** (k - 1) * refl * p for k, p in enumerate(ideal, start=1)]
    return ProtocolReport(alpha, k_max, list(enumerate(terms, start=1)), model,
                          params, underflow, fids)


def p_total(alpha: float, k_max: int, cavity: Cavity = None,
            model: DegradationModel = DegradationModel.IDEAL) -> float:
    """Sum of the first ``k_max`` per-round success probabilities."""
    return protocol_report(alpha, k_max, cavity, model).cumulative


def sweep_alpha(grid, k_max: int, cavity: Cavity,
                model: DegradationModel) -> list[ProtocolReport]:
    for a in grid:
        if not 0.0 < a < 1.0:
            raise ContractError(f"sweep grid values must lie in (0, 1), got {a!r}")
    return [protocol_report(float(a), k_max, cavity, model) for a in grid]
