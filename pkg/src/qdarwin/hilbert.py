"""Dense multipartite pure states, reduced density operators and partial traces.

Basis ordering: subsystem 0 owns the most significant digit of the flat
amplitude index, i.e. ``amplitudes.reshape(layout.dims)[i0, i1, ...]``.

Every subsystem carries a role tag: ``"system"``, ``"apparatus"``,
``"env(j)"`` for environment subsystem j = 1..N, or ``"ancilla(j)"`` for
purifying partners that no observer can intercept.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (
    CapacityExceeded,
    DimensionMismatch,
    EmptyInput,
    InvalidDensity,
    InvalidIndices,
    InvalidLayout,
    LayoutMismatch,
    NotNormalized,
    NotUnitary,
)

SYSTEM = "system"
APPARATUS = "apparatus"
MAX_QUBITS = 24
MAX_DIM = 2**MAX_QUBITS

NORM_TOL = 1e-10
UNITARY_TOL = 1e-8
EIG_CLAMP = 1e-10
EIG_CUTOFF = 1e-12

_INDEXED_ROLE = re.compile(r"^(env|ancilla)\((\d+)\)$")


def env(j: int) -> str:
    return f"env({j})"


def ancilla(j: int) -> str:
    return f"ancilla({j})"


def _parse_role(tag: str) -> tuple[str, int]:
    if tag in (SYSTEM, APPARATUS):
        return tag, 0
    match = _INDEXED_ROLE.match(tag)
    if match is None:
        raise InvalidLayout(f"unknown role tag {tag!r}")
    return match.group(1), int(match.group(2))


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered subsystem dimensions with role tags.

    A layout may describe a subset of a larger system (the retained part of a
    reduced state); ``require_complete`` checks the stricter whole-system
    invariants.
    """

    dims: tuple[int, ...]
    roles: tuple[str, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        roles = tuple(self.roles)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "roles", roles)
        if len(dims) != len(roles):
            raise InvalidLayout("dims and roles differ in length")
        if any(d < 2 for d in dims):
            raise InvalidLayout(f"every subsystem dimension must be >= 2, got {dims}")
        parsed = [_parse_role(r) for r in roles]
        kinds = [k for k, _ in parsed]
        if kinds.count(SYSTEM) > 1:
            raise InvalidLayout("more than one system subsystem")
        if kinds.count(APPARATUS) > 1:
            raise InvalidLayout("more than one apparatus subsystem")
        for kind in ("env", "ancilla"):
            js = [j for k, j in parsed if k == kind]
            if len(set(js)) != len(js):
                raise InvalidLayout(f"duplicate {kind} index")
            if any(j < 1 for j in js):
                raise InvalidLayout(f"{kind} indices start at 1")

    @classmethod
    def build(cls, n_env: int, system_dim: int = 2, env_dim: int = 2,
              apparatus_dim: int | None = None, n_ancilla: int = 0) -> "SubsystemLayout":
        """System first, then the optional apparatus, environment, ancillas."""
        dims = [system_dim]
        roles = [SYSTEM]
        if apparatus_dim is not None:
            dims.append(apparatus_dim)
            roles.append(APPARATUS)
        dims += [env_dim] * n_env
        roles += [env(j) for j in range(1, n_env + 1)]
        dims += [env_dim] * n_ancilla
        roles += [ancilla(j) for j in range(1, n_ancilla + 1)]
        return cls(tuple(dims), tuple(roles))

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=object)) if self.dims else 1

    @property
    def system_index(self) -> int | None:
        return self.roles.index(SYSTEM) if SYSTEM in self.roles else None

    @property
    def apparatus_index(self) -> int | None:
        return self.roles.index(APPARATUS) if APPARATUS in self.roles else None

    def _indexed(self, kind: str) -> tuple[int, ...]:
        tagged = []
        for i, tag in enumerate(self.roles):
            k, j = _parse_role(tag)
            if k == kind:
                tagged.append((j, i))
        return tuple(i for _, i in sorted(tagged))

    @property
    def env_indices(self) -> tuple[int, ...]:
        """Positions of env(1), env(2), ... in order of their environment index."""
        return self._indexed("env")

    @property
    def ancilla_indices(self) -> tuple[int, ...]:
        return self._indexed("ancilla")

    @property
    def n_env(self) -> int:
        return len(self.env_indices)

    def require_complete(self) -> None:
        if self.system_index is None:
            raise InvalidLayout("a complete layout needs exactly one system subsystem")
        for kind in ("env", "ancilla"):
            js = [_parse_role(self.roles[i])[1] for i in range(len(self))
                  if _parse_role(self.roles[i])[0] == kind]
            if js != list(range(1, len(js) + 1)):
                raise InvalidLayout(f"{kind} indices must run 1..N in order, got {js}")

    def sub(self, keep: Sequence[int]) -> "SubsystemLayout":
        return SubsystemLayout(tuple(self.dims[i] for i in keep),
                               tuple(self.roles[i] for i in keep))

    def complement(self, keep: Iterable[int]) -> tuple[int, ...]:
        keep = set(keep)
        return tuple(i for i in range(len(self)) if i not in keep)

    def check_indices(self, idx: Sequence[int], *, allow_empty: bool = False) -> tuple[int, ...]:
        """Validate a strictly increasing list of subsystem positions."""
        idx = tuple(int(i) for i in idx)
        if not idx and not allow_empty:
            raise InvalidIndices("index list is empty")
        if any(i < 0 or i >= len(self) for i in idx):
            raise InvalidIndices(f"indices {idx} out of range for {len(self)} subsystems")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise InvalidIndices(f"indices {idx} must be strictly increasing")
        return idx


def check_capacity(layout: SubsystemLayout) -> None:
    if layout.total_dim > MAX_DIM:
        raise CapacityExceeded(
            f"total dimension {layout.total_dim} exceeds 2^{MAX_QUBITS}")


@dataclass(frozen=True)
class FragmentSelection:
    """A set of environment subsystems, given by their positions in a layout."""

    indices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    def validate(self, layout: SubsystemLayout) -> tuple[int, ...]:
        layout.check_indices(self.indices, allow_empty=True)
        envs = set(layout.env_indices)
        bad = [i for i in self.indices if i not in envs]
        if bad:
            raise InvalidIndices(f"positions {bad} are not environment subsystems")
        return self.indices

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class StateVector:
    layout: SubsystemLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        self.layout.require_complete()
        check_capacity(self.layout)
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != self.layout.total_dim:
            raise DimensionMismatch(
                f"{amps.shape[0]} amplitudes for total dimension {self.layout.total_dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"state norm {norm!r} differs from 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, layout: SubsystemLayout, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise NotNormalized("zero vector")
        return cls(layout, amps / norm)

    @classmethod
    def single(cls, amplitudes) -> "StateVector":
        """One-subsystem state, e.g. ``StateVector.single([0.6, 0.8])``.

        Its role is ``system``; ``tensor_compose`` renumbers repeated system
        tags as environment subsystems.
        """
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        return cls(SubsystemLayout((amps.shape[0],), (SYSTEM,)), amps)

    @classmethod
    def basis(cls, layout: SubsystemLayout, digits: Sequence[int]) -> "StateVector":
        amps = np.zeros(layout.total_dim, dtype=np.complex128)
        amps[np.ravel_multi_index(tuple(digits), layout.dims)] = 1.0
        return cls(layout, amps)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.layout.dims

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)

    def __len__(self) -> int:
        return self.amplitudes.shape[0]

    def __repr__(self) -> str:
        return f"StateVector(dims={self.layout.dims})"


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def clean_spectrum(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a (nearly) Hermitian PSD matrix with tiny negatives clamped to 0."""
    evals = np.linalg.eigvalsh(_hermitize(m))
    evals[(evals < 0) & (evals >= -EIG_CLAMP)] = 0.0
    return evals


def entropy_bits(evals: np.ndarray) -> float:
    p = evals[evals > EIG_CUTOFF]
    # an eigenvalue of 1 + eps would give a tiny negative entropy
    return max(0.0, float(-np.sum(p * np.log2(p)))) if p.size else 0.0


@dataclass(frozen=True, eq=False)
class DensityOperator:
    layout: SubsystemLayout
    matrix: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        n = self.layout.total_dim
        if m.shape != (n, n):
            raise DimensionMismatch(f"matrix shape {m.shape} does not match dimension {n}")
        if self.check:
            if np.max(np.abs(m - m.conj().T)) > NORM_TOL:
                raise InvalidDensity("matrix is not Hermitian")
            if abs(np.trace(m) - 1.0) > NORM_TOL:
                raise InvalidDensity(f"trace {np.trace(m).real:.3g} differs from 1")
            if np.min(np.linalg.eigvalsh(_hermitize(m))) < -EIG_CLAMP:
                raise InvalidDensity("matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return clean_spectrum(self.matrix)

    def __repr__(self) -> str:
        return f"DensityOperator(dims={self.layout.dims})"


def _relabel(roles: Sequence[str]) -> tuple[str, ...]:
    """Keep the first system/apparatus tag; every other subsystem becomes env(j)."""
    out = []
    seen_sys = seen_app = False
    n_env = 0
    for tag in roles:
        if tag == SYSTEM and not seen_sys:
            seen_sys = True
            out.append(tag)
        elif tag == APPARATUS and not seen_app:
            seen_app = True
            out.append(tag)
        else:
            n_env += 1
            out.append(env(n_env))
    return tuple(out)


def tensor_compose(parts: Sequence[StateVector], roles: Sequence[str] | None = None) -> StateVector:
    """Tensor product of ``parts`` in order.

    Without explicit ``roles`` the part roles are concatenated, keeping the
    first ``system`` and ``apparatus`` tags and renumbering everything else
    as environment subsystems.
    """
    if not parts:
        raise EmptyInput("tensor_compose needs at least one part")
    dims = tuple(d for p in parts for d in p.layout.dims)
    if roles is None:
        roles = _relabel([r for p in parts for r in p.layout.roles])
    layout = SubsystemLayout(dims, tuple(roles))
    check_capacity(layout)
    amps = reduce(np.kron, (p.amplitudes for p in parts))
    return StateVector(layout, amps)


def _check_unitary(u: np.ndarray) -> None:
    dev = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if dev > UNITARY_TOL:
        raise NotUnitary(f"u u^dagger deviates from identity by {dev:.3g}")


def apply_unitary(state: StateVector, u, targets: Sequence[int]) -> StateVector:
    """Apply ``u`` on ``targets`` (in the given order), identity elsewhere."""
    u = np.asarray(u, dtype=np.complex128)
    targets = tuple(int(t) for t in targets)
    n = len(state.layout)
    if not targets or len(set(targets)) != len(targets) or any(t < 0 or t >= n for t in targets):
        raise InvalidIndices(f"bad target list {targets}")
    d = int(np.prod([state.dims[t] for t in targets]))
    if u.shape != (d, d):
        raise DimensionMismatch(f"unitary shape {u.shape} but targets span dimension {d}")
    _check_unitary(u)
    out = kernels.apply_local(state.amplitudes, state.dims, targets, u)
    return StateVector(state.layout, out)


def bipartition(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    """Amplitude matrix with rows over ``keep`` and columns over the rest."""
    rest = state.layout.complement(keep)
    return kernels.gather(state.amplitudes, state.dims, tuple(keep), rest)


def partial_trace(state: StateVector, keep: Sequence[int]) -> DensityOperator:
    keep = state.layout.check_indices(keep)
    m = bipartition(state, keep)
    rho = _hermitize(m @ m.conj().T)
    return DensityOperator(state.layout.sub(keep), rho, check=False)


def schmidt_spectrum(state: StateVector, keep: Sequence[int]) -> np.ndarray:
    """Nonzero-padded Schmidt coefficients squared, from the smaller side of the cut."""
    keep = state.layout.check_indices(keep, allow_empty=True)
    m = bipartition(state, keep)
    if m.shape[0] <= m.shape[1]:
        gram = m @ m.conj().T
    else:
        gram = m.conj().T @ m
    return clean_spectrum(gram)


def entropy_of_kept(state: StateVector, keep: Sequence[int]) -> float:
    """Entropy in bits of the reduced state on ``keep`` (pure ``state``)."""
    keep = state.layout.check_indices(keep, allow_empty=True)
    if not keep or len(keep) == len(state.layout):
        return 0.0
    return entropy_bits(schmidt_spectrum(state, keep))


def fidelity(a: StateVector, b: StateVector) -> float:
    """Overlap magnitude |<a|b>|, insensitive to global phase."""
    if a.layout != b.layout:
        raise LayoutMismatch("states live on different layouts")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes))))
