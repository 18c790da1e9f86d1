"""Physical states and processes: premeasurement, branching states, Haar-random
comparison states, environment scrambling, hazy environments and the collision
model of gradual record formation.

All randomness comes from ``numpy.random.default_rng(seed)``; identical seeds
give bit-identical amplitudes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    CapacityExceeded,
    DimensionMismatch,
    InfeasibleOverlap,
    NotNormalized,
    TooFewSubsystems,
)
from .hilbert import (
    APPARATUS,
    MAX_DIM,
    SYSTEM,
    DensityOperator,
    StateVector,
    SubsystemLayout,
    apply_unitary,
    check_capacity,
    env,
    tensor_compose,
)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of R fixed."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def equal_overlap_records(n_branches: int, overlap: float, dim: int) -> np.ndarray:
    """``n_branches`` unit vectors in C^dim with pairwise overlap ``overlap``.

    Rows of the Cholesky factor of the Gram matrix (ones on the diagonal,
    ``overlap`` elsewhere), zero-padded to ``dim``.  ``overlap == 1`` gives
    identical records ``|0>``.
    """
    if not 0.0 <= overlap <= 1.0:
        raise ValueError(f"record overlap must lie in [0, 1], got {overlap}")
    out = np.zeros((n_branches, dim), dtype=np.complex128)
    if overlap == 1.0:
        out[:, 0] = 1.0
        return out
    if n_branches > dim:
        raise InfeasibleOverlap(
            f"{n_branches} records with overlap {overlap} need dimension >= {n_branches}, "
            f"got {dim}")
    gram = np.full((n_branches, n_branches), overlap) + (1.0 - overlap) * np.eye(n_branches)
    out[:, :n_branches] = np.linalg.cholesky(gram)
    return out


@dataclass(frozen=True, eq=False)
class BranchSpec:
    """Branch amplitudes plus either a uniform record overlap or explicit records.

    ``records`` has shape ``(n_env, D, env_dim)``: ``records[j, k]`` is the
    state of environment subsystem j+1 in branch k.
    """

    branch_amplitudes: tuple[complex, ...]
    n_env: int
    env_dim: int = 2
    record_overlap: float | None = 0.0
    records: np.ndarray | None = None

    def __post_init__(self):
        amps = tuple(complex(a) for a in self.branch_amplitudes)
        object.__setattr__(self, "branch_amplitudes", amps)
        if not amps:
            raise ValueError("at least one branch is required")
        if abs(sum(abs(a) ** 2 for a in amps) - 1.0) > 1e-10:
            raise NotNormalized("branch amplitudes must satisfy sum |a_k|^2 = 1")
        if self.n_env < 0:
            raise ValueError("n_env must be >= 0")
        if self.env_dim < 2:
            raise ValueError("env_dim must be >= 2")
        if self.records is not None:
            rec = np.array(self.records, dtype=np.complex128)
            if rec.shape != (self.n_env, len(amps), self.env_dim):
                raise DimensionMismatch(
                    f"records shape {rec.shape}, expected {(self.n_env, len(amps), self.env_dim)}")
            if np.max(np.abs(np.linalg.norm(rec, axis=2) - 1.0), initial=0.0) > 1e-10:
                raise NotNormalized("record vectors must be normalized")
            rec.setflags(write=False)
            object.__setattr__(self, "records", rec)
            object.__setattr__(self, "record_overlap", None)
        elif self.record_overlap is None or not 0.0 <= self.record_overlap <= 1.0:
            raise ValueError(f"record overlap must lie in [0, 1], got {self.record_overlap}")

    @classmethod
    def qubit(cls, alpha: complex, n_env: int, record_overlap: float = 0.0) -> "BranchSpec":
        """Two branches with amplitudes alpha and sqrt(1 - |alpha|^2)."""
        beta = math.sqrt(max(0.0, 1.0 - abs(alpha) ** 2))
        return cls((alpha, beta), n_env, 2, record_overlap)

    @property
    def n_branches(self) -> int:
        return len(self.branch_amplitudes)

    def record_family(self) -> np.ndarray:
        if self.records is not None:
            return self.records
        fam = equal_overlap_records(self.n_branches, self.record_overlap, self.env_dim)
        return np.broadcast_to(fam, (self.n_env,) + fam.shape)

    def layout(self) -> SubsystemLayout:
        return SubsystemLayout.build(self.n_env, system_dim=self.n_branches,
                                     env_dim=self.env_dim)


def build_branching_state(spec: BranchSpec) -> StateVector:
    """Sum over k of a_k |k> |e_k^(1)> ... |e_k^(N)>."""
    layout = spec.layout()
    check_capacity(layout)
    records = spec.record_family()
    block = spec.env_dim ** spec.n_env
    amps = np.zeros(layout.total_dim, dtype=np.complex128)
    for k, a in enumerate(spec.branch_amplitudes):
        if a == 0:
            continue
        rec = reduce(np.kron, (records[j, k] for j in range(spec.n_env)), np.ones(1))
        amps[k * block:(k + 1) * block] = a * rec
    return StateVector(layout, amps)


def ghz_state(n_env: int) -> StateVector:
    """Even two-branch state with perfect records on ``n_env`` qubits."""
    return build_branching_state(BranchSpec.qubit(1 / math.sqrt(2), n_env, 0.0))


def _require_single(state: StateVector) -> int:
    if len(state.layout) != 1:
        raise DimensionMismatch("expected a single-subsystem system state")
    return state.dims[0]


def controlled_shift(control_dim: int, target_dim: int) -> np.ndarray:
    """|k>|j> -> |k>|j + k mod target_dim>."""
    u = np.zeros((control_dim * target_dim,) * 2, dtype=np.complex128)
    for k in range(control_dim):
        for j in range(target_dim):
            u[k * target_dim + (j + k) % target_dim, k * target_dim + j] = 1.0
    return u


def premeasure(system_state: StateVector, blank_record_dim: int) -> StateVector:
    """Couple a blank record |0> to the system so that |k>|0> -> |k>|k>."""
    d = _require_single(system_state)
    if d > blank_record_dim:
        raise DimensionMismatch(f"record dimension {blank_record_dim} < system dimension {d}")
    blank = np.zeros(blank_record_dim)
    blank[0] = 1.0
    joint = tensor_compose([system_state, StateVector.single(blank)],
                           roles=(SYSTEM, APPARATUS))
    return apply_unitary(joint, controlled_shift(d, blank_record_dim), (0, 1))


def haar_random_state(layout: SubsystemLayout, seed: int) -> StateVector:
    """Normalized vector of i.i.d. standard complex Gaussian amplitudes."""
    layout.require_complete()
    check_capacity(layout)
    rng = np.random.default_rng(seed)
    n = layout.total_dim
    amps = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return StateVector(layout, amps / np.linalg.norm(amps))


@dataclass(frozen=True)
class ScrambleConfig:
    rounds: int
    seed: int

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be >= 0")


def scramble_environment(state: StateVector, config: ScrambleConfig) -> StateVector:
    """Apply ``rounds`` Haar-random unitaries, each on a uniformly drawn pair of
    environment subsystems.  The system and any ancillas are never touched."""
    envs = state.layout.env_indices
    if len(envs) < 2:
        raise TooFewSubsystems("scrambling needs at least two environment subsystems")
    rng = np.random.default_rng(config.seed)
    for _ in range(config.rounds):
        i, j = rng.choice(len(envs), size=2, replace=False)
        pair = (envs[i], envs[j])
        u = haar_unitary(state.dims[pair[0]] * state.dims[pair[1]], rng)
        state = apply_unitary(state, u, pair)
    return state


@dataclass(frozen=True)
class CollisionSchedule:
    n_steps: int
    record_angle: float

    def __post_init__(self):
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if not 0.0 <= self.record_angle <= math.pi / 2 + 1e-15:
            raise ValueError("record_angle must lie in [0, pi/2]")


def controlled_rotation(theta: float) -> np.ndarray:
    """Leave the record at |0> for control |0>; rotate it to cos(t)|0> + sin(t)|1> for |1>."""
    c, s = math.cos(theta), math.sin(theta)
    u = np.eye(4, dtype=np.complex128)
    u[2:, 2:] = [[c, -s], [s, c]]
    return u


def iter_collisions(system_state: StateVector, schedule: CollisionSchedule) -> Iterator[StateVector]:
    """Yield the joint state after each collision t = 1..n_steps."""
    if _require_single(system_state) != 2:
        raise DimensionMismatch("the collision model needs a qubit system")
    if 2 ** (schedule.n_steps + 1) > MAX_DIM:
        raise CapacityExceeded(f"{schedule.n_steps} collisions exceed the qubit budget")
    u = controlled_rotation(schedule.record_angle)
    fresh = StateVector.single([1.0, 0.0])
    state = system_state
    for _ in range(schedule.n_steps):
        state = tensor_compose([state, fresh])
        state = apply_unitary(state, u, (0, len(state.layout) - 1))
        yield state


def run_collision_model(system_state: StateVector, schedule: CollisionSchedule) -> StateVector:
    state = system_state
    for state in iter_collisions(system_state, schedule):
        pass
    return state


def init_hazy_environment(p: float, n_env: int) -> list[DensityOperator]:
    """``n_env`` copies of p|0><0| + (1 - p) I/2."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"purity parameter must lie in [0, 1], got {p}")
    rho = p * np.diag([1.0, 0.0]) + (1 - p) * np.eye(2) / 2
    return [DensityOperator(SubsystemLayout((2,), (env(j),)), rho)
            for j in range(1, n_env + 1)]


def purify(rho: DensityOperator) -> np.ndarray:
    """Amplitudes of sum_i sqrt(l_i) |v_i>|i> on (subsystem, ancilla), ancilla of equal dimension."""
    evals, vecs = np.linalg.eigh(rho.matrix)
    evals = np.clip(evals, 0.0, None)
    d = rho.dim
    amps = np.zeros((d, d), dtype=np.complex128)
    for i in range(d):
        amps[:, i] = math.sqrt(evals[i]) * vecs[:, i]
    return amps.reshape(-1)


def hazy_branching_state(branch_amplitudes: Sequence[complex],
                         hazy: Sequence[DensityOperator]) -> StateVector:
    """Perfect controlled-NOT records written into partially mixed environment qubits.

    Each hazy qubit is the first half of a purification; its partner is an
    ``ancilla(j)`` subsystem that fragments never include.  Layout order is
    system, env(1..N), ancilla(1..N).
    """
    n = len(hazy)
    if len(branch_amplitudes) != 2:
        raise DimensionMismatch("hazy records are defined for a qubit system")
    layout = SubsystemLayout.build(n, n_ancilla=n)
    check_capacity(layout)
    pairs = reduce(np.kron, (purify(r) for r in hazy), np.ones(1))
    # (E1 A1)(E2 A2)... -> E1..En A1..An
    pairs = pairs.reshape((2,) * (2 * n)).transpose(
        list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))).reshape(-1)
    amps = np.kron(np.asarray(branch_amplitudes, dtype=np.complex128), pairs)
    state = StateVector.normalized(layout, amps)
    cnot = controlled_shift(2, 2)
    for e in layout.env_indices:
        state = apply_unitary(state, cnot, (0, e))
    return state
