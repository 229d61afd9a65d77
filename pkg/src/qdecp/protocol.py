"""Round-by-round concentration: photon prep, cavity, optics, detection, recursion.

Alice encodes the pair's own amplitudes onto a photon, scatters it off the
cavity holding spin 1, and reads it out behind a wave plate and two PBSs.
D1/D2 herald a maximally entangled pair. D3/D4 leave a pair with squared
amplitudes, which is fed back in with a fresh photon. Classical feedback to
Bob is modelled only by the detector tag on each outcome.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from qdecp.errors import ContractError
from qdecp.optics import DetectorId, hwp45, route_and_detect
from qdecp.qdcavity import ScatteringCoeffs, ideal_interaction, nonideal_scattering
from qdecp.statevec import (
    Direction,
    PureState,
    apply,
    canonical_phase,
    fidelity,
    phi_plus,
    photon,
    tensor,
    two_spin,
)

PAIR_TOL = 1e-12


@dataclass(frozen=True)
class EntangledPair:
    """``a|up,up> + b|down,down>``."""

    a: complex
    b: complex

    def __post_init__(self):
        n2 = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(n2 - 1.0) > PAIR_TOL:
            raise ContractError(f"pair not normalized: |a|^2+|b|^2 = {n2!r}")

    @classmethod
    def from_alpha(cls, alpha: float) -> EntangledPair:
        if not 0.0 <= alpha <= 1.0:
            raise ContractError(f"alpha must lie in [0, 1], got {alpha!r}")
        return cls(complex(alpha), complex(math.sqrt(1.0 - alpha * alpha)))

    @classmethod
    def normalized(cls, a: complex, b: complex) -> EntangledPair:
        n = math.hypot(abs(a), abs(b))
        if n == 0:
            raise ContractError("cannot normalize a zero pair")
        return cls(complex(a) / n, complex(b) / n)

    @classmethod
    def from_state(cls, s: PureState, tol: float = 1e-12) -> EntangledPair:
        if s.dim != 4:
            raise ContractError("pair extraction needs a two-spin state")
        amps = s.amplitudes
        if abs(amps[1]) > tol or abs(amps[2]) > tol:
            raise ContractError(f"state has anti-correlated components: {amps}")
        return cls.normalized(amps[0], amps[3])

    def to_state(self) -> PureState:
        return two_spin(up_up=self.a, down_down=self.b)

    def canonical(self) -> EntangledPair:
        a, b = canonical_phase(np.array([self.a, self.b]))
        return EntangledPair(complex(a), complex(b))


class Classification(Enum):
    SUCCESS = "success"
    RECYCLE = "recycle"
    LOSS = "loss"


_CLASS_OF = {
    DetectorId.D1: Classification.SUCCESS,
    DetectorId.D2: Classification.SUCCESS,
    DetectorId.D3: Classification.RECYCLE,
    DetectorId.D4: Classification.RECYCLE,
    DetectorId.LOSS: Classification.LOSS,
}


@dataclass(frozen=True)
class RoundOutcome:
    detector: DetectorId
    probability: float
    post_pair: EntangledPair | None

    @property
    def classification(self) -> Classification:
        return _CLASS_OF[self.detector]

    @property
    def fidelity(self) -> float | None:
        """Fidelity of the post-measurement pair with Phi+."""
        if self.post_pair is None:
            return None
        return fidelity(self.post_pair.to_state(), phi_plus())


def prepare_round_photon(pair: EntangledPair) -> PureState:
    """Photon whose R/L amplitudes copy the pair's, travelling Down into the cavity."""
    n = math.hypot(abs(pair.a), abs(pair.b))
    if n == 0:
        raise ContractError("cannot encode a zero pair onto a photon")
    return photon(pair.a / n, pair.b / n, "RL", Direction.DOWN)


def phase_correct(o: RoundOutcome) -> RoundOutcome:
    """Spin-1 phase flip after D2/D4 so every pair carries a plus sign."""
    if o.post_pair is None or o.detector not in (DetectorId.D2, DetectorId.D4):
        return o
    flipped = EntangledPair(o.post_pair.a, -o.post_pair.b).canonical()
    return RoundOutcome(o.detector, o.probability, flipped)


def cavity_map(coeffs: ScatteringCoeffs | None) -> np.ndarray:
    return ideal_interaction() if coeffs is None else nonideal_scattering(coeffs)


def run_round(pair: EntangledPair, coeffs: ScatteringCoeffs | None = None,
              *, interaction: np.ndarray | None = None) -> list[RoundOutcome]:
    """One concentration round. ``coeffs=None`` means the lossless cavity.

    Returns the four detector outcomes, plus a Loss outcome when
    scattering coefficients are supplied. ``interaction`` overrides the
    cavity matrix (used for fault injection).
    """
    u = interaction if interaction is not None else cavity_map(coeffs)
    state = tensor(prepare_round_photon(pair), pair.to_state())
    state = hwp45(apply(u, state))
    outcomes = []
    for click in route_and_detect(state):
        if click.detector is DetectorId.LOSS and coeffs is None and interaction is None:
            continue
        post = None if click.spins is None else EntangledPair.from_state(click.spins)
        outcomes.append(phase_correct(RoundOutcome(click.detector, click.probability, post)))
    return outcomes


@dataclass(frozen=True)
class TreeNode:
    path: tuple[DetectorId, ...]
    probability: float  # unconditional probability of the whole path
    outcome: RoundOutcome

    @property
    def classification(self) -> Classification:
        return self.outcome.classification


@dataclass
class BranchTree:
    root: EntangledPair
    depth: int
    levels: list[list[TreeNode]] = field(default_factory=list)

    def nodes(self, depth: int, cls: Classification | None = None) -> list[TreeNode]:
        return [n for n in self.levels[depth - 1] if cls is None or n.classification is cls]

    def mass(self, depth: int, cls: Classification) -> float:
        return math.fsum(n.probability for n in self.nodes(depth, cls))

    def success_mass(self, depth: int) -> float:
        return self.mass(depth, Classification.SUCCESS)

    def success_masses(self) -> list[float]:
        return [self.success_mass(d) for d in range(1, self.depth + 1)]

    def total_mass(self, depth: int) -> float:
        """Absorbed success/loss mass up to ``depth`` plus live recycle mass at ``depth``."""
        absorbed = [n.probability for d in range(1, depth + 1) for n in self.levels[d - 1]
                    if n.classification is not Classification.RECYCLE]
        live = [n.probability for n in self.nodes(depth, Classification.RECYCLE)]
        return math.fsum(absorbed + live)

    def success_fidelity(self, depth: int) -> float | None:
        """Probability-weighted fidelity with Phi+ of the successes at ``depth``."""
        nodes = [n for n in self.nodes(depth, Classification.SUCCESS) if n.outcome.post_pair]
        w = math.fsum(n.probability for n in nodes)
        if w == 0:
            return None
        return math.fsum(n.probability * n.outcome.fidelity for n in nodes) / w


def branch_tree_exact(pair: EntangledPair, rounds: int,
                      coeffs: ScatteringCoeffs | None = None,
                      *, interaction: np.ndarray | None = None) -> BranchTree:
    """Enumerate every detector path to ``rounds`` rounds.

    Every recycle path is kept separately, so under leakage the D3 and D4
    branches are followed with their own (distorted) conditional pairs.
    """
    if rounds < 1:
        raise ContractError("rounds must be >= 1")
    tree = BranchTree(root=pair, depth=rounds)
    frontier = [((), 1.0, pair)]
    for _ in range(rounds):
        level = []
        nxt = []
        for path, weight, p in frontier:
            for o in run_round(p, coeffs, interaction=interaction):
                node = TreeNode(path + (o.detector,), weight * o.probability, o)
                level.append(node)
                if o.classification is Classification.RECYCLE and o.post_pair is not None:
                    nxt.append((node.path, node.probability, o.post_pair))
        tree.levels.append(level)
        frontier = nxt
    return tree


@dataclass
class RoundStats:
    round: int
    success: float
    recycle: float
    loss: float
    fidelity: float | None = None


@dataclass
class SimulationReport:
    pair: EntangledPair
    rounds: list[RoundStats]

    @property
    def per_round(self) -> list[float]:
        return [r.success for r in self.rounds]

    @property
    def cumulative(self) -> float:
        return math.fsum(self.per_round)


def _pair_key(p: EntangledPair) -> tuple[float, float, float, float]:
    c = p.canonical()
    return tuple(round(v, 13) for v in (c.a.real, c.a.imag, c.b.real, c.b.imag))


def run_protocol(pair: EntangledPair, rounds: int,
                 coeffs: ScatteringCoeffs | None = None) -> SimulationReport:
    """Iterate rounds, merging recycle branches that leave identical pairs.

    In the lossless case D3 and D4 collapse onto one pair after phase
    correction, so the frontier never grows beyond a single state.
    """
    if rounds < 1:
        return SimulationReport(pair, [])
    stats = []
    frontier = {_pair_key(pair): (pair, 1.0)}
    for k in range(1, rounds + 1):
        succ, rec, loss, fid_w = [], [], [], []
        nxt: dict = {}
        for p, w in frontier.values():
            for o in run_round(p, coeffs):
                mass = w * o.probability
                cls = o.classification
                if cls is Classification.SUCCESS:
                    succ.append(mass)
                    if o.post_pair is not None:
                        fid_w.append(mass * o.fidelity)
                elif cls is Classification.LOSS:
                    loss.append(mass)
                else:
                    rec.append(mass)
                    if o.post_pair is not None and mass > 0:
                        key = _pair_key(o.post_pair)
                        prev = nxt.get(key, (o.post_pair, 0.0))
                        nxt[key] = (prev[0], prev[1] + mass)
        s = math.fsum(succ)
        fid = math.fsum(fid_w) / s if s > 0 else None
        stats.append(RoundStats(k, s, math.fsum(rec), math.fsum(loss), fid))
        frontier = nxt
    return SimulationReport(pair, stats)


@dataclass
class MonteCarloReport:
    pair: EntangledPair
    trials: int
    seed: int
    success: list[int]
    recycle: list[int]
    loss: list[int]

    def frequency(self, counts: list[int]) -> list[float]:
        return [c / self.trials for c in counts]

    def stderr(self, counts: list[int]) -> list[float]:
        return [math.sqrt(f * (1 - f) / self.trials) for f in self.frequency(counts)]

    @property
    def success_frequency(self) -> float:
        return sum(self.success) / self.trials

    @property
    def success_stderr(self) -> float:
        f = self.success_frequency
        return math.sqrt(f * (1 - f) / self.trials)


def monte_carlo(pair: EntangledPair, rounds: int, coeffs: ScatteringCoeffs | None,
                trials: int, seed: int) -> MonteCarloReport:
    """Sample one detector click per surviving trial per round.

    Trials sitting on the same conditional pair are sampled together with
    one vectorized draw, which is distributionally identical to drawing
    them one by one.
    """
    if trials < 1:
        raise ContractError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    success, recycle, loss = [], [], []
    groups = {_pair_key(pair): (pair, trials)}
    for _ in range(rounds):
        n_succ = n_rec = n_loss = 0
        nxt: dict = {}
        for p, n in groups.values():
            outcomes = run_round(p, coeffs)
            probs = np.array([max(o.probability, 0.0) for o in outcomes])
            draws = rng.choice(len(outcomes), size=n, p=probs / probs.sum())
            counts = np.bincount(draws, minlength=len(outcomes))
            for o, c in zip(outcomes, counts):
                c = int(c)
                if c == 0:
                    continue
                cls = o.classification
                if cls is Classification.SUCCESS:
                    n_succ += c
                elif cls is Classification.LOSS:
                    n_loss += c
                else:
                    n_rec += c
                    key = _pair_key(o.post_pair)
                    prev = nxt.get(key, (o.post_pair, 0))
                    nxt[key] = (prev[0], prev[1] + c)
        success.append(n_succ)
        recycle.append(n_rec)
        loss.append(n_loss)
        groups = nxt
    return MonteCarloReport(pair, trials, seed, success, recycle, loss)
