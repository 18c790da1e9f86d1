"""Mechanical checks of the derivations behind pointer states and Born's rule.

* repeatability: a unitary that leaves u and v untouched while writing
  distinguishable records exists only if <u|v> = 0;
* pointer observables: the common eigenbasis of the system operators in an
  interaction sum_i S_i (x) A_i;
* envariance: a phase shift or swap on the system undone by a counter-operation
  on a disjoint entangled partner;
* Born's rule: uneven amplitudes sqrt(mu), sqrt(nu) fine-grained into mu + nu
  envariantly equiprobable branches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dynamics import controlled_rotation, controlled_shift, haar_unitary
from .errors import (
    CapacityExceeded,
    DimensionMismatch,
    FoundationsViolation,
    InvalidLabels,
    NoCommonEigenbasis,
    NotNormalized,
    ToleranceUnreachable,
    WrongSupport,
)
from .hilbert import (
    APPARATUS,
    MAX_DIM,
    SYSTEM,
    DensityOperator,
    StateVector,
    SubsystemLayout,
    apply_unitary,
    clean_spectrum,
    env,
    partial_trace,
    tensor_compose,
)

ENVARIANCE_TOL = 1e-10


# -- repeatability ----------------------------------------------------------

@dataclass(frozen=True)
class RecordPair:
    """System overlap <u|v> and record overlap <A_u|A_v> of one measurement."""

    overlap_sys: complex
    overlap_rec: complex

    def __post_init__(self):
        if abs(self.overlap_sys) > 1 + 1e-12 or abs(self.overlap_rec) > 1 + 1e-12:
            raise ValueError("overlaps must have magnitude <= 1")


def repeatability_consistent(pair: RecordPair, tol: float = 1e-10) -> bool:
    """Whether <u|v> (1 - <A_u|A_v>) vanishes, as unitarity demands."""
    return abs(pair.overlap_sys * (1 - pair.overlap_rec)) <= tol


def _blank(dim: int) -> np.ndarray:
    b = np.zeros(dim, dtype=np.complex128)
    b[0] = 1.0
    return b


def extract_record(u: np.ndarray, copier: np.ndarray) -> tuple[np.ndarray, float]:
    """Run ``copier`` on |u>|0> and split the output as |u>|a> + remainder.

    Returns the (unnormalized) record ``a = (<u| x I) out`` and the remainder
    norm, which is the distance of the output from the product form |u>|x>.
    """
    u = np.asarray(u, dtype=np.complex128)
    d = u.shape[0]
    r = copier.shape[0] // d
    out = (copier @ np.kron(u, _blank(r))).reshape(d, r)
    a = u.conj() @ out
    dev = math.sqrt(max(0.0, 1.0 - float(np.vdot(a, a).real)))
    return a, dev


def record_pair(u: np.ndarray, v: np.ndarray, copier: np.ndarray) -> RecordPair:
    a_u, _ = extract_record(u, copier)
    a_v, _ = extract_record(v, copier)
    na, nb = np.linalg.norm(a_u), np.linalg.norm(a_v)
    rec = np.vdot(a_u, a_v) / (na * nb) if na > 1e-12 and nb > 1e-12 else 1.0
    return RecordPair(complex(np.vdot(u, v)), complex(rec))


def copier_residual(u: np.ndarray, v: np.ndarray, copier: np.ndarray,
                    target: float = 0.0) -> float:
    """max(distance from |u>|A_u>, |v>|A_v>) + max(0, |<A_u|A_v>| - target)."""
    a_u, dev_u = extract_record(u, copier)
    a_v, dev_v = extract_record(v, copier)
    na, nb = np.linalg.norm(a_u), np.linalg.norm(a_v)
    q = abs(np.vdot(a_u, a_v)) / (na * nb) if na > 1e-12 and nb > 1e-12 else 0.0
    return max(dev_u, dev_v) + max(0.0, q - target)


def copier_residual_floor(overlap: float, target: float = 0.0) -> float:
    """Lower bound on ``copier_residual`` for states with |<u|v>| = ``overlap``.

    Writing out = |u>|a_u> + e with |e| <= eps, unitarity gives
    s (1 - q) <= 2 eps + eps^2, so eps + max(0, q - target) is minimized at
    eps = sqrt(1 + s (1 - target)) - 1.
    """
    return math.sqrt(1.0 + abs(overlap) * (1.0 - target)) - 1.0


def _complete_basis(u: np.ndarray) -> np.ndarray:
    """Unitary whose first column is u."""
    d = u.shape[0]
    m = np.eye(d, dtype=np.complex128)
    m[:, 0] = u
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def adapted_copier(u: np.ndarray, record_dim: int | None = None) -> np.ndarray:
    """Controlled-shift copier in an orthonormal basis starting with u."""
    d = u.shape[0]
    r = record_dim or d
    b = np.kron(_complete_basis(np.asarray(u, dtype=np.complex128)), np.eye(r))
    return b @ controlled_shift(d, r) @ b.conj().T


def _random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (z + z.conj().T) / 2
    return h / np.linalg.norm(h)


def _expi(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def copier_search(u: StateVector | np.ndarray, v: StateVector | np.ndarray, trials: int,
                  seed: int, target: float = 0.0) -> float:
    """Best ``copier_residual`` found by a randomized search over unitaries on
    system (x) record, record dimension equal to the system dimension.

    Starts from the controlled copy adapted to u, then alternates Haar-random
    proposals with local perturbations of the incumbent.
    """
    u = np.asarray(getattr(u, "amplitudes", u), dtype=np.complex128)
    v = np.asarray(getattr(v, "amplitudes", v), dtype=np.complex128)
    if u.shape != v.shape or u.ndim != 1:
        raise DimensionMismatch("u and v must be single-subsystem states of equal dimension")
    d = u.shape[0]
    dim = d * d
    rng = np.random.default_rng(seed)
    best_u = adapted_copier(u)
    best = copier_residual(u, v, best_u, target)
    for t in range(trials):
        if t % 2 == 0:
            cand = haar_unitary(dim, rng)
        else:
            scale = 10.0 ** rng.uniform(-4, 0)
            cand = _expi(scale * _random_hermitian(dim, rng)) @ best_u
        res = copier_residual(u, v, cand, target)
        if res < best:
            best, best_u = res, cand
    return best


def random_repeatable_triple(rng: np.random.Generator, dim: int = 2
                             ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Random (u, v, copier) with the copier satisfying |s>|0> -> |s>|A_s> for s = u, v.

    Half the draws use orthogonal u, v and a basis-controlled copier with
    random record unitaries; the rest use generic u, v and a copier acting on
    the record alone.
    """
    if rng.random() < 0.5:
        basis = haar_unitary(dim, rng)
        u, v = basis[:, 0], basis[:, 1]
        copier = np.zeros((dim * dim,) * 2, dtype=np.complex128)
        for i in range(dim):
            proj = np.outer(basis[:, i], basis[:, i].conj())
            copier += np.kron(proj, haar_unitary(dim, rng))
    else:
        u = haar_unitary(dim, rng)[:, 0]
        v = haar_unitary(dim, rng)[:, 0]
        copier = np.kron(np.eye(dim), haar_unitary(dim, rng))
    return u, v, copier


# -- pointer observables ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class PointerProblem:
    """System operators S_i of an interaction H_SA = sum_i S_i (x) A_i."""

    terms: tuple[tuple[np.ndarray, str], ...]
    system_dim: int

    def __post_init__(self):
        terms = []
        for mat, label in self.terms:
            m = np.asarray(mat, dtype=np.complex128)
            if m.shape != (self.system_dim, self.system_dim):
                raise DimensionMismatch(f"term {label!r} has shape {m.shape}")
            if np.max(np.abs(m - m.conj().T)) > 1e-10:
                raise ValueError(f"term {label!r} is not Hermitian")
            terms.append((m, str(label)))
        object.__setattr__(self, "terms", tuple(terms))


def _canonical_span(v: np.ndarray, tol: float = 1e-8) -> list[np.ndarray]:
    """Orthonormal basis of span(v), Gram-Schmidt over projected unit vectors in index order."""
    k = v.shape[1]
    proj = v @ v.conj().T
    out: list[np.ndarray] = []
    for i in range(v.shape[0]):
        x = proj[:, i].copy()
        for b in out:
            x -= np.vdot(b, x) * b
        nrm = np.linalg.norm(x)
        if nrm > tol:
            x /= nrm
            lead = x[np.argmax(np.abs(x) > 1e-10)]
            out.append(x * (abs(lead) / lead))
        if len(out) == k:
            break
    return out


def pointer_observable(problem: PointerProblem, tol: float = 1e-8) -> list[np.ndarray]:
    """Common eigenbasis of all S_i.

    Vectors are ordered by their eigenvalue tuples (first term first,
    descending).  Degenerate common eigenspaces get the lowest-index
    canonical basis, with the leading nonzero component real and positive.
    """
    mats = [m for m, _ in problem.terms]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            comm = mats[i] @ mats[j] - mats[j] @ mats[i]
            if np.linalg.norm(comm) > tol:
                raise NoCommonEigenbasis(
                    f"terms {problem.terms[i][1]!r} and {problem.terms[j][1]!r} do not commute")

    blocks: list[tuple[np.ndarray, tuple[float, ...]]] = [
        (np.eye(problem.system_dim, dtype=np.complex128), ())]
    for s in mats:
        refined = []
        for v, key in blocks:
            h = v.conj().T @ s @ v
            w, vecs = np.linalg.eigh((h + h.conj().T) / 2)
            start = 0
            for stop in range(1, len(w) + 1):
                if stop == len(w) or w[stop] - w[stop - 1] > tol:
                    refined.append((v @ vecs[:, start:stop], key + (float(np.mean(w[start:stop])),)))
                    start = stop
        blocks = refined

    blocks.sort(key=lambda b: tuple(-x for x in b[1]))
    basis = [vec for v, _ in blocks for vec in _canonical_span(v)]

    mat = np.column_stack(basis)
    if np.max(np.abs(mat.conj().T @ mat - np.eye(len(basis)))) > 1e-10:
        raise FoundationsViolation("pointer basis is not orthonormal")
    for s in mats:
        d = mat.conj().T @ s @ mat
        if np.max(np.abs(d - np.diag(np.diag(d)))) > tol:
            raise FoundationsViolation("a term is not diagonal in the pointer basis")
    return basis


# -- envariance --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LocalOp:
    """A unitary acting on the listed subsystems (first target most significant)."""

    matrix: np.ndarray
    targets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=np.complex128))

    def apply(self, state: StateVector) -> StateVector:
        return apply_unitary(state, self.matrix, self.targets)


def shift_operator(dim: int, phi: float, basis_labels: tuple[int, int] = (0, 1)) -> np.ndarray:
    """|a><a| + e^{i phi} |b><b|, identity on other basis states."""
    a, b = basis_labels
    if a == b or not (0 <= a < dim and 0 <= b < dim):
        raise InvalidLabels(f"labels {basis_labels} invalid for dimension {dim}")
    u = np.eye(dim, dtype=np.complex128)
    u[b, b] = np.exp(1j * phi)
    return u


def phase_shift(state: StateVector, phi: float, subsystem: int,
                basis_labels: tuple[int, int] = (0, 1)) -> StateVector:
    if not 0 <= subsystem < len(state.layout):
        raise InvalidLabels(f"no subsystem {subsystem}")
    u = shift_operator(state.dims[subsystem], phi, basis_labels)
    return apply_unitary(state, u, (subsystem,))


def swap_operator(dim: int, a: int = 0, b: int = 1, phase: float = 0.0) -> np.ndarray:
    """|a> -> e^{i phase}|b>, |b> -> e^{-i phase}|a>, identity elsewhere."""
    u = np.eye(dim, dtype=np.complex128)
    u[[a, b], [a, b]] = 0.0
    u[b, a] = np.exp(1j * phase)
    u[a, b] = np.exp(-1j * phase)
    return u


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    diff = rho.matrix - sigma.matrix
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2))))


@dataclass(frozen=True)
class EnvarianceReport:
    global_fidelity: float
    rho_S_distance: float

    @property
    def holds(self) -> bool:
        return self.global_fidelity >= 1.0 - ENVARIANCE_TOL


def _ops(op: LocalOp | Sequence[LocalOp]) -> list[LocalOp]:
    return [op] if isinstance(op, LocalOp) else list(op)


def envariance_check(state: StateVector, op_on_S: LocalOp | Sequence[LocalOp],
                     counter_on_E: LocalOp | Sequence[LocalOp],
                     side: Sequence[int] | None = None,
                     local_distance: bool = True) -> EnvarianceReport:
    """Apply ``op_on_S`` then ``counter_on_E`` and compare with the input.

    ``side`` lists the subsystems the first operation may touch (default: the
    system alone); the counter-operation must avoid all of them.
    ``rho_S_distance`` is the trace distance between the reduced states of
    ``side`` before and after ``op_on_S`` alone.
    """
    side = tuple(sorted(side)) if side is not None else (state.layout.system_index,)
    ops, counters = _ops(op_on_S), _ops(counter_on_E)
    for o in ops:
        if not set(o.targets) <= set(side):
            raise WrongSupport(f"operation on {o.targets} leaves the system side {side}")
    for o in counters:
        if set(o.targets) & set(side):
            raise WrongSupport(f"counter-operation on {o.targets} touches the system side {side}")
    shifted = state
    for o in ops:
        shifted = o.apply(shifted)
    restored = shifted
    for o in counters:
        restored = o.apply(restored)
    fid = float(abs(np.vdot(state.amplitudes, restored.amplitudes)))
    dist = 0.0
    if local_distance:
        dist = trace_distance(partial_trace(state, side), partial_trace(shifted, side))
    return EnvarianceReport(global_fidelity=fid, rho_S_distance=dist)


# -- decoherence ---------------------------------------------------------------

def decohered_rho_SA(alpha: complex, beta: complex, record_overlap: float) -> DensityOperator:
    """Reduced state of S and A after A's pointer states are monitored by E.

    Built mechanically: premeasure S into A, then imprint a record with
    overlap ``record_overlap`` on a qubit environment, then trace E out.
    """
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-10:
        raise NotNormalized("|alpha|^2 + |beta|^2 must equal 1")
    if not 0.0 <= record_overlap <= 1.0:
        raise ValueError("record overlap must lie in [0, 1]")
    s = StateVector.single([alpha, beta])
    blank = StateVector.single([1.0, 0.0])
    sa = apply_unitary(tensor_compose([s, blank], roles=(SYSTEM, APPARATUS)),
                       controlled_shift(2, 2), (0, 1))
    sae = tensor_compose([sa, StateVector.single([1.0, 0.0])],
                         roles=(SYSTEM, APPARATUS, env(1)))
    theta = math.acos(min(1.0, record_overlap))
    sae = apply_unitary(sae, controlled_rotation(theta), (1, 2))
    rho = partial_trace(sae, (0, 1))
    return DensityOperator(rho.layout, rho.matrix)


# -- Born's rule via fine-graining --------------------------------------------

@dataclass(frozen=True)
class FinegrainSpec:
    mu: int
    nu: int

    def __post_init__(self):
        if self.mu < 1 or self.nu < 1:
            raise ValueError("mu and nu must be positive integers")
        if 2 * (self.mu + self.nu) ** 2 > MAX_DIM:
            raise CapacityExceeded(f"mu + nu = {self.mu + self.nu} exceeds the state budget")

    @property
    def n_branches(self) -> int:
        return self.mu + self.nu


def _branch_label(spec: FinegrainSpec, k: int) -> int:
    return 0 if k < spec.mu else 1


def _branch_swap(spec: FinegrainSpec, perm: Sequence[int]) -> tuple[LocalOp, LocalOp]:
    """Permute fine-grained branches k -> perm[k]: one op on (S, A), the counter on E."""
    n = spec.n_branches
    sa = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    e = np.zeros((n, n), dtype=np.complex128)
    for k, pk in enumerate(perm):
        e[pk, k] = 1.0
    # each branch basis state |s_k a_k> maps to |s_perm(k) a_perm(k)>; the rest of
    # (S, A) is permuted consistently so the operator stays unitary
    src = [_branch_label(spec, k) * n + k for k in range(n)]
    dst = [_branch_label(spec, perm[k]) * n + perm[k] for k in range(n)]
    rest_src = [i for i in range(2 * n) if i not in set(src)]
    rest_dst = [i for i in range(2 * n) if i not in set(dst)]
    for a, b in zip(src + rest_src, dst + rest_dst):
        sa[b, a] = 1.0
    return LocalOp(sa, (0, 1)), LocalOp(e, (2,))


def finegrain_state(spec: FinegrainSpec, verify: str = "generators") -> StateVector:
    """Equal-amplitude state sum_k |s_k a_k e_k> / sqrt(mu + nu), s_k = up for k < mu.

    ``verify`` controls the internal envariance check: ``"generators"`` swaps
    an adjacent pair and cycles all branches (together these generate every
    branch permutation), ``"pairs"`` checks every pair explicitly, ``"none"``
    skips the check.
    """
    n = spec.n_branches
    layout = SubsystemLayout((2, n, n), (SYSTEM, APPARATUS, env(1)))
    amps = np.zeros((2, n, n), dtype=np.complex128)
    for k in range(n):
        amps[_branch_label(spec, k), k, k] = 1.0 / math.sqrt(n)
    state = StateVector(layout, amps.reshape(-1))

    if verify == "none" or n == 1:
        return state
    if verify == "generators":
        perms = [[1, 0] + list(range(2, n)), [(k + 1) % n for k in range(n)]]
    elif verify == "pairs":
        perms = []
        for a in range(n):
            for b in range(a + 1, n):
                p = list(range(n))
                p[a], p[b] = b, a
                perms.append(p)
    else:
        raise ValueError(f"unknown verify mode {verify!r}")
    for perm in perms:
        op, counter = _branch_swap(spec, perm)
        report = envariance_check(state, op, counter, side=(0, 1), local_distance=False)
        if not report.holds:
            raise FoundationsViolation(
                f"branch permutation {perm} not undone by its counter-permutation "
                f"(fidelity {report.global_fidelity:.3g})")
    return state


def born_probabilities(spec: FinegrainSpec) -> tuple[Fraction, Fraction]:
    """Count equiprobable fine-grained branches carrying each pointer label."""
    state = finegrain_state(spec)
    amps = state.tensor()
    support = np.argwhere(np.abs(amps) > 1e-12)
    weights = np.abs(amps[tuple(support.T)]) ** 2
    if np.max(weights) - np.min(weights) > 1e-12:
        raise FoundationsViolation("fine-grained branches are not equiprobable")
    up = int(np.sum(support[:, 0] == 0))
    total = len(support)
    p_up, p_down = Fraction(up, total), Fraction(total - up, total)
    alpha_sq = math.sqrt(spec.mu / (spec.mu + spec.nu)) ** 2
    if abs(float(p_up) - alpha_sq) > 1e-12:
        raise FoundationsViolation(f"branch count {p_up} disagrees with |alpha|^2 = {alpha_sq}")
    return p_up, p_down


@dataclass(frozen=True)
class RationalApprox:
    value: Fraction
    error: float

    @property
    def mu(self) -> int:
        return self.value.numerator

    @property
    def nu(self) -> int:
        return self.value.denominator - self.value.numerator


def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """Fraction with the smallest denominator in [lo, hi], 0 < lo <= hi."""
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    return fl + 1 / _simplest_between(1 / (hi - fl), 1 / (lo - fl))


def born_incommensurate(alpha_sq: float, tol: float, max_denominator: int) -> RationalApprox:
    """Simplest mu / (mu + nu) within ``tol`` of ``alpha_sq``, with mu, nu >= 1."""
    if not 0.0 < alpha_sq < 1.0:
        raise ValueError("alpha_sq must lie strictly between 0 and 1")
    if tol < 0:
        raise ValueError("tol must be non-negative")
    x, t = Fraction(alpha_sq), Fraction(tol)
    lo, hi = x - t, x + t
    if lo <= 0 and hi >= 1:
        best = Fraction(1, 2)
    elif lo <= 0:
        best = Fraction(1, math.ceil(1 / hi))
    elif hi >= 1:
        best = 1 - Fraction(1, math.ceil(1 / (1 - lo)))
    else:
        best = _simplest_between(lo, hi)
    if best.denominator > max_denominator:
        raise ToleranceUnreachable(
            f"no mu/(mu+nu) with mu+nu <= {max_denominator} within {tol} of {alpha_sq}")
    return RationalApprox(best, abs(float(best - x)))


# -- randomized envariance suite -------------------------------------------------

def random_even_state(rng: np.random.Generator, n_env: int, random_phases: bool = True
                      ) -> tuple[StateVector, np.ndarray, float]:
    """Even two-branch state with random orthonormal records on each environment qubit.

    Returns the state, the records (shape ``(n_env, 2, 2)``) and the relative
    branch phase.
    """
    from .dynamics import BranchSpec, build_branching_state

    records = np.stack([haar_unitary(2, rng).T for _ in range(n_env)])
    phases = rng.uniform(0, 2 * math.pi, size=2) if random_phases else np.zeros(2)
    amps = np.exp(1j * phases) / math.sqrt(2)
    state = build_branching_state(BranchSpec(tuple(amps), n_env, 2, records=records))
    return state, records, float(phases[1] - phases[0])


def counterswap_ops(state: StateVector, records: np.ndarray, rel_phase: float = 0.0,
                    sign: float = 1.0) -> list[LocalOp]:
    """Exchange the two record states on every environment qubit.

    The first qubit also absorbs the relative branch phase so that an even
    state with unequal phases is restored exactly.  ``sign = -1`` corrupts
    the operation (negative control).
    """
    ops = []
    for j, pos in enumerate(state.layout.env_indices):
        w = records[j].T
        if j == 0:
            p = swap_operator(2, 0, 1, rel_phase)
            p[0, 1] *= sign
        else:
            p = swap_operator(2)
        ops.append(LocalOp(w @ p @ w.conj().T, (pos,)))
    return ops


def countershift_op(state: StateVector, records: np.ndarray, phi: float) -> LocalOp:
    """Phase -phi on the 'down' record of the first environment qubit."""
    w = records[0].T
    return LocalOp(w @ shift_operator(2, -phi) @ w.conj().T, (state.layout.env_indices[0],))


def envariance_suite(n_states: int, seed: int, max_env: int = 6,
                     counter_sign: float = 1.0) -> list[dict]:
    """Swap/counterswap and phase/countershift restoration on random even states.

    Alternate states use equal phases (raw form) and random branch phases
    (phase-aligned counterswap).
    """
    rng = np.random.default_rng(seed)
    sigma_x = swap_operator(2)
    out = []
    for i in range(n_states):
        n_env = int(rng.integers(1, max_env + 1))
        state, records, rel = random_even_state(rng, n_env, random_phases=bool(i % 2))
        s = state.layout.system_index
        swap = envariance_check(state, LocalOp(sigma_x, (s,)),
                                counterswap_ops(state, records, rel, counter_sign))
        phi = float(rng.uniform(0, 2 * math.pi))
        phase = envariance_check(state, LocalOp(shift_operator(2, phi), (s,)),
                                 countershift_op(state, records, phi))
        out.append({"n_env": n_env, "phases": "random" if i % 2 else "equal",
                    "swap_fidelity": swap.global_fidelity, "swap_rho_S_distance": swap.rho_S_distance,
                    "phase_fidelity": phase.global_fidelity,
                    "phase_rho_S_distance": phase.rho_S_distance})
    return out
