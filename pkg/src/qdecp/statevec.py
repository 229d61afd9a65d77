"""Dense pure-state algebra for one photon and two electron spins.

The composite space is ordered as polarization x direction x spin1 x spin2,
giving the canonical index ``pol*8 + dir*4 + s1*2 + s2``. In the circular
basis R=0, L=1; in the linear basis H=0, V=1. Direction Up=0, Down=1 and
spin up=0, down=1.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

from qdecp.errors import BasisMismatchError, ContractError, UndefinedFidelityError

NORM_TOL = 1e-12


class Polarization(Enum):
    R = ("RL", 0)
    L = ("RL", 1)
    H = ("HV", 0)
    V = ("HV", 1)

    @property
    def basis(self) -> str:
        return self.value[0]

    @property
    def bit(self) -> int:
        return self.value[1]


class Direction(IntEnum):
    UP = 0
    DOWN = 1


class Spin(IntEnum):
    UP = 0
    DOWN = 1


def basis_index(pol: int | Polarization, direction: int, s1: int, s2: int) -> int:
    if isinstance(pol, Polarization):
        pol = pol.bit
    for v in (pol, direction, s1, s2):
        if v not in (0, 1):
            raise ContractError(f"basis label out of range: {v!r}")
    return int(pol) * 8 + int(direction) * 4 + int(s1) * 2 + int(s2)


def basis_labels(index: int) -> tuple[int, int, int, int]:
    """Inverse of :func:`basis_index`: ``(pol, dir, s1, s2)`` bits."""
    if not 0 <= index < 16:
        raise ContractError(f"basis index out of range: {index}")
    return (index >> 3) & 1, (index >> 2) & 1, (index >> 1) & 1, index & 1


@dataclass(frozen=True, eq=False)
class PureState:
    """Immutable amplitude vector, possibly sub-normalized after loss.

    ``basis`` tags the photon factor ("RL" or "HV") and is None for bare
    two-spin states. ``direction`` is only meaningful for a bare photon
    (dimension 2) that has not yet been combined with the spins.
    """

    amplitudes: np.ndarray
    basis: str | None = None
    direction: Direction | None = None

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size not in (2, 4, 16):
            raise ContractError(f"unsupported dimension {amps.size}")
        if amps.size in (2, 16) and self.basis not in ("RL", "HV"):
            raise ContractError("photon-carrying states need a basis tag 'RL' or 'HV'")
        if amps.size == 4 and self.basis is not None:
            raise ContractError("two-spin states carry no photon basis")
        n2 = float(np.vdot(amps, amps).real)
        if not np.isfinite(n2) or n2 > 1.0 + NORM_TOL:
            raise ContractError(f"squared norm {n2!r} exceeds 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def amplitude(self, pol, direction, s1, s2) -> complex:
        if self.dim != 16:
            raise ContractError("amplitude lookup by labels needs the 16-dim space")
        if isinstance(pol, Polarization) and pol.basis != self.basis:
            raise BasisMismatchError(f"state is in {self.basis}, asked for {pol.name}")
        return complex(self.amplitudes[basis_index(pol, direction, s1, s2)])

    def with_amplitudes(self, amps) -> PureState:
        return PureState(amps, self.basis, self.direction)

    def __repr__(self):
        amps = np.array2string(self.amplitudes, precision=6, suppress_small=True)
        return f"PureState(dim={self.dim}, basis={self.basis}, amplitudes={amps})"


def photon(a0: complex, a1: complex, basis: str = "RL",
           direction: Direction = Direction.DOWN) -> PureState:
    """Single photon ``a0|R> + a1|L>`` (or ``|H>``/``|V>`` for basis HV)."""
    return PureState([a0, a1], basis, Direction(direction))


def two_spin(up_up: complex = 0, up_down: complex = 0,
             down_up: complex = 0, down_down: complex = 0) -> PureState:
    return PureState([up_up, up_down, down_up, down_down])


def basis_state(pol: Polarization, direction: int, s1: int, s2: int) -> PureState:
    amps = np.zeros(16, dtype=complex)
    amps[basis_index(pol, direction, s1, s2)] = 1.0
    return PureState(amps, pol.basis)


def phi_plus() -> PureState:
    return two_spin(up_up=1 / np.sqrt(2), down_down=1 / np.sqrt(2))


def phi_minus() -> PureState:
    return two_spin(up_up=1 / np.sqrt(2), down_down=-1 / np.sqrt(2))


def canonical_phase(amps: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first nonzero amplitude is real positive."""
    amps = np.asarray(amps, dtype=complex)
    nz = np.flatnonzero(amps)
    if nz.size == 0:
        return amps.copy()
    lead = amps[nz[0]]
    if lead.imag == 0:
        return amps if lead.real > 0 else -amps
    return amps * np.exp(-1j * np.angle(lead))


def tensor(ph: PureState, spins: PureState, direction: Direction | None = None) -> PureState:
    """Photon (dim 2, circular basis) times two spins (dim 4) -> dim 16."""
    if ph.dim != 2 or spins.dim != 4:
        raise ContractError(f"tensor needs dims (2, 4), got ({ph.dim}, {spins.dim})")
    if ph.basis != "RL":
        raise BasisMismatchError("photon must be in the circular R/L basis")
    for name, st in (("photon", ph), ("spins", spins)):
        if abs(st.norm2 - 1.0) > NORM_TOL:
            raise ContractError(f"{name} not normalized (|psi|^2 = {st.norm2!r})")
    d = direction if direction is not None else ph.direction
    if d is None:
        raise ContractError("photon direction not declared")
    out = np.zeros(16, dtype=complex)
    for pol in (0, 1):
        base = pol * 8 + int(d) * 4
        out[base:base + 4] = ph.amplitudes[pol] * spins.amplitudes
    return PureState(out, "RL")


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2 after normalizing both arguments."""
    if a.dim != b.dim:
        raise ContractError(f"dimension mismatch {a.dim} vs {b.dim}")
    na, nb = a.norm2, b.norm2
    if na == 0.0 or nb == 0.0:
        raise UndefinedFidelityError("fidelity of a zero-norm state")
    ov = np.vdot(a.amplitudes, b.amplitudes)
    return float(min(1.0, abs(ov) ** 2 / (na * nb)))


def apply(op, s: PureState) -> PureState:
    """Apply a linear map (square matrix) without renormalizing."""
    op = np.asarray(op)
    if op.shape != (s.dim, s.dim):
        raise ContractError(f"operator shape {op.shape} does not act on dim {s.dim}")
    return s.with_amplitudes(op @ s.amplitudes)


def photon_block(s: PureState, pol: Polarization, direction: int) -> np.ndarray:
    if s.dim != 16:
        raise ContractError("projection needs the 16-dim photon+spins space")
    if pol.basis != s.basis:
        raise BasisMismatchError(f"state is in {s.basis} basis, projector is {pol.name}")
    base = pol.bit * 8 + int(direction) * 4
    return s.amplitudes[base:base + 4]


def project_photon(s: PureState, pol: Polarization,
                   direction: int) -> tuple[float, PureState | None]:
    """Condition on the photon being found in ``(pol, direction)``.

    The probability is the squared norm of the matching block, so for a
    sub-normalized input the four outcomes sum to the surviving norm. A
    branch with no amplitude returns ``(0.0, None)``.
    """
    block = photon_block(s, pol, direction)
    prob = float(np.vdot(block, block).real)
    if prob == 0.0:
        return 0.0, None
    spins = canonical_phase(block / np.sqrt(prob))
    return prob, PureState(spins)
