"""Invariant suites run by ``qdecp verify``.

Each suite returns the worst absolute deviation it saw; a suite passes when
that deviation is within its tolerance. Random inputs come from a fixed
seed so repeated runs print identical numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from qdecp.analytics import p_k_ideal, p_total
from qdecp.optics import DetectorId, hwp45, hwp45_inverse, route_and_detect
from qdecp.protocol import EntangledPair, branch_tree_exact, run_round
from qdecp.qdcavity import (
    IDEAL_COEFFS,
    CavityParams,
    ideal_interaction,
    nonideal_scattering,
    scattering_coeffs,
)
from qdecp.statevec import PureState, apply, fidelity, phi_plus

ALPHAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1 / math.sqrt(2)]

# per-suite default tolerances; the g -> 0 limit is only first order in g^2
DEFAULT_TOLERANCES = {
    "involution": 1e-12,
    "coefficients": 1e-12,
    "g-limit": 1e-6,
    "ideal-limit": 1e-12,
    "norm-preservation": 1e-12,
    "born-completeness": 1e-12,
    "loss-monotonicity": 1e-12,
    "hwp-inverse": 1e-12,
    "bell-output": 1e-12,
    "closed-form-vs-tree": 1e-12,
    "symmetry": 1e-12,
}


@dataclass(frozen=True)
class SuiteResult:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance


def random_state(rng: np.random.Generator, dim: int = 16, basis: str | None = "RL") -> PureState:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v), basis if dim != 4 else None)


def random_params(rng: np.random.Generator, n: int = 100) -> list[CavityParams]:
    vals = rng.uniform(0.0, 2.0, size=(n, 5))
    return [CavityParams(kappa_s=k, gamma=gm, g=g, delta_c=dc, delta_x=dx)
            for k, gm, g, dc, dx in vals]


def _involution(u, rng):
    eye = np.eye(16)
    return max(np.abs(u @ u - eye).max(), np.abs(u.conj().T @ u - eye).max())


def _coefficients(u, rng):
    err = 0.0
    for p in random_params(rng):
        c = scattering_coeffs(p)
        err = max(err, abs(c.r - 1 - c.t), abs(c.r0 - 1 - c.t0))
    return err


def _g_limit(u, rng):
    err = 0.0
    for p in random_params(rng):
        c0 = scattering_coeffs(p)
        small = scattering_coeffs(CavityParams(p.kappa_s, p.gamma, 1e-8, p.delta_c, p.delta_x))
        err = max(err, abs(small.t - c0.t0))
    return err


def _ideal_limit(u, rng):
    return np.abs(nonideal_scattering(IDEAL_COEFFS) - u).max()


def _norm_preservation(u, rng):
    err = 0.0
    for _ in range(1000):
        s = random_state(rng)
        err = max(err, abs(apply(u, s).norm2 - s.norm2), abs(hwp45(s).norm2 - s.norm2))
    return err


def _born_completeness(u, rng):
    err = 0.0
    lossy = nonideal_scattering(scattering_coeffs(CavityParams.resonant(0.5, 0.1, 0.5)))
    for i in range(1000):
        s = random_state(rng)
        out = hwp45(apply(lossy if i % 2 else u, s))
        clicks = route_and_detect(out)
        det = math.fsum(c.probability for c in clicks if c.detector is not DetectorId.LOSS)
        loss = 1.0 - out.norm2
        err = max(err, abs(det - out.norm2), abs(det + loss - 1.0))
    return err


def _loss_monotonicity(u, rng):
    states = [random_state(rng) for _ in range(100)]
    worst = 0.0
    for p in random_params(rng):
        m = nonideal_scattering(scattering_coeffs(p))
        for s in states:
            out = m @ s.amplitudes
            worst = max(worst, np.linalg.norm(out) - math.sqrt(s.norm2))
    return max(worst, 0.0)


def _hwp_inverse(u, rng):
    err = 0.0
    for _ in range(100):
        s = random_state(rng)
        err = max(err, np.abs(hwp45_inverse(hwp45(s)).amplitudes - s.amplitudes).max())
    return err


def _bell_output(u, rng):
    err = 0.0
    for a in ALPHAS:
        for o in run_round(EntangledPair.from_alpha(a), interaction=u):
            if o.detector in (DetectorId.D1, DetectorId.D2) and o.probability > 0:
                err = max(err, abs(1.0 - fidelity(o.post_pair.to_state(), phi_plus())))
    return err


def _closed_form_vs_tree(u, rng):
    err = 0.0
    for a in ALPHAS:
        tree = branch_tree_exact(EntangledPair.from_alpha(a), 5, interaction=u)
        for k in range(1, 6):
            err = max(err, abs(tree.success_mass(k) - p_k_ideal(a, k)),
                      abs(tree.total_mass(k) - 1.0))
    return err


def _symmetry(u, rng):
    err = 0.0
    for a in ALPHAS + [0.05, 0.33, 0.95]:
        err = max(err, abs(p_total(a, 5) - p_total(math.sqrt(1 - a * a), 5)))
    return err


SUITES: dict[str, Callable] = {
    "involution": _involution,
    "coefficients": _coefficients,
    "g-limit": _g_limit,
    "ideal-limit": _ideal_limit,
    "norm-preservation": _norm_preservation,
    "born-completeness": _born_completeness,
    "loss-monotonicity": _loss_monotonicity,
    "hwp-inverse": _hwp_inverse,
    "bell-output": _bell_output,
    "closed-form-vs-tree": _closed_form_vs_tree,
    "symmetry": _symmetry,
}


def run_suites(tolerance: float | None = None, interaction: np.ndarray | None = None,
               seed: int = 2012) -> list[SuiteResult]:
    """Run every suite. ``tolerance`` overrides all per-suite defaults.

    ``interaction`` replaces the lossless cavity matrix, which lets tests
    inject a corrupted map and watch the suites catch it.
    """
    u = ideal_interaction() if interaction is None else np.asarray(interaction)
    results = []
    for name, fn in SUITES.items():
        rng = np.random.default_rng([seed, len(results)])
        try:
            err = float(fn(u, rng))
        except Exception:
            # a corrupted map can break downstream contracts outright
            err = math.inf
        tol = DEFAULT_TOLERANCES[name] if tolerance is None else tolerance
        results.append(SuiteResult(name, err, tol))
    return results
