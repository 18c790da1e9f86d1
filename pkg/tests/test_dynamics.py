import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdarwin.dynamics import (
    BranchSpec, CollisionSchedule, ScrambleConfig, build_branching_state, controlled_rotation,
    controlled_shift, equal_overlap_records, ghz_state, haar_random_state, haar_unitary,
    hazy_branching_state, init_hazy_environment, iter_collisions, premeasure, purify,
    run_collision_model, scramble_environment,
)
from qdarwin.errors import (
    CapacityExceeded, DimensionMismatch, InfeasibleOverlap, NotNormalized, TooFewSubsystems,
)
from qdarwin.hilbert import (
    APPARATUS, SYSTEM, StateVector, SubsystemLayout, entropy_of_kept, fidelity, partial_trace,
)


def test_haar_unitary_is_unitary(rng):
    for d in (2, 3, 4, 7):
        u = haar_unitary(d, rng)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(d), atol=1e-13)


def test_haar_unitary_first_moment(rng):
    # E|u_00|^2 = 1/d for the Haar measure
    vals = [abs(haar_unitary(3, rng)[0, 0]) ** 2 for _ in range(4000)]
    assert abs(np.mean(vals) - 1 / 3) < 0.02


@pytest.mark.parametrize("c", [0.0, 0.3, 0.5, 0.9, 1.0])
@pytest.mark.parametrize("k", [2, 3])
def test_equal_overlap_records(c, k):
    recs = equal_overlap_records(k, c, 4)
    gram = recs.conj() @ recs.T
    expect = np.full((k, k), c) + (1 - c) * np.eye(k)
    np.testing.assert_allclose(gram, expect, atol=1e-14)


def test_infeasible_overlap():
    with pytest.raises(InfeasibleOverlap):
        equal_overlap_records(3, 0.5, 2)
    equal_overlap_records(3, 1.0, 2)


class TestBranching:
    def test_ghz_amplitudes(self):
        s = ghz_state(3)
        ref = np.zeros(16)
        ref[0] = ref[15] = 1 / math.sqrt(2)
        np.testing.assert_allclose(s.amplitudes, ref, atol=1e-15)

    def test_explicit_sum(self, rng):
        alpha, beta, c = 0.6, 0.8, 0.4
        spec = BranchSpec.qubit(alpha, 3, c)
        e0, e1 = equal_overlap_records(2, c, 2)
        ref = alpha * np.kron([1, 0], np.kron(e0, np.kron(e0, e0))) \
            + beta * np.kron([0, 1], np.kron(e1, np.kron(e1, e1)))
        np.testing.assert_allclose(build_branching_state(spec).amplitudes, ref, atol=1e-14)

    def test_system_coherence_decays_with_overlap(self):
        # off-diagonal of rho_S is alpha beta* c^N
        for c in (0.0, 0.5, 0.9):
            rho = partial_trace(build_branching_state(BranchSpec.qubit(0.6, 4, c)), (0,)).matrix
            assert abs(rho[0, 1] - 0.48 * c**4) < 1e-13
            assert abs(rho[0, 0] - 0.36) < 1e-13

    def test_explicit_records(self):
        recs = np.zeros((2, 2, 3))
        recs[:, 0, 0] = 1
        recs[:, 1, 2] = 1
        spec = BranchSpec((0.6, 0.8), 2, env_dim=3, records=recs)
        s = build_branching_state(spec)
        assert s.layout.dims == (2, 3, 3)
        assert abs(s.amplitudes[0] - 0.6) < 1e-15 and abs(s.amplitudes[-1] - 0.8) < 1e-15
        with pytest.raises(DimensionMismatch):
            BranchSpec((0.6, 0.8), 3, env_dim=3, records=recs)

    def test_validation(self):
        with pytest.raises(NotNormalized):
            BranchSpec((0.6, 0.6), 2)
        with pytest.raises(ValueError):
            BranchSpec.qubit(0.6, 2, 1.5)

    def test_capacity(self):
        with pytest.raises(CapacityExceeded):
            build_branching_state(BranchSpec.qubit(0.6, 24))


def test_premeasure():
    sys_state = StateVector.single([0.6, 0.8])
    s = premeasure(sys_state, 2)
    assert s.layout.roles == (SYSTEM, APPARATUS)
    np.testing.assert_allclose(s.amplitudes, [0.6, 0, 0, 0.8], atol=1e-15)
    s3 = premeasure(StateVector.single([0.6, 0.8]), 3)
    np.testing.assert_allclose(s3.amplitudes, [0.6, 0, 0, 0, 0.8, 0], atol=1e-15)
    with pytest.raises(DimensionMismatch):
        premeasure(StateVector.single([1, 0, 0]), 2)


def test_controlled_shift_is_permutation():
    u = controlled_shift(3, 4)
    assert np.allclose(u @ u.T, np.eye(12))
    assert set(np.abs(u).sum(axis=0)) == {1.0}


def test_haar_state_deterministic():
    lay = SubsystemLayout.build(4)
    a, b = haar_random_state(lay, 9), haar_random_state(lay, 9)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert not np.array_equal(a.amplitudes, haar_random_state(lay, 10).amplitudes)


class TestScramble:
    def test_system_untouched(self):
        s = ghz_state(5)
        out = scramble_environment(s, ScrambleConfig(50, 3))
        np.testing.assert_allclose(partial_trace(out, (0,)).matrix,
                                   partial_trace(s, (0,)).matrix, atol=1e-12)
        assert fidelity(out, s) < 0.99

    def test_zero_rounds_identity(self):
        s = ghz_state(3)
        assert np.array_equal(scramble_environment(s, ScrambleConfig(0, 1)).amplitudes,
                              s.amplitudes)

    def test_needs_two_env(self):
        with pytest.raises(TooFewSubsystems):
            scramble_environment(ghz_state(1), ScrambleConfig(3, 0))

    def test_ancillas_untouched(self):
        s = hazy_branching_state((0.6, 0.8), init_hazy_environment(0.5, 3))
        out = scramble_environment(s, ScrambleConfig(30, 1))
        anc = s.layout.ancilla_indices
        np.testing.assert_allclose(partial_trace(out, (0,) + anc).matrix,
                                   partial_trace(s, (0,) + anc).matrix, atol=1e-12)


class TestCollisions:
    def test_rotation_unitary(self):
        u = controlled_rotation(0.3)
        np.testing.assert_allclose(u @ u.T, np.eye(4), atol=1e-15)

    def test_full_angle_gives_ghz(self):
        s = run_collision_model(StateVector.single([1, 1] / np.sqrt(2)),
                                CollisionSchedule(6, math.pi / 2))
        assert abs(fidelity(s, ghz_state(6)) - 1) < 1e-12

    def test_matches_branching_state(self):
        theta = math.pi / 4
        s = run_collision_model(StateVector.single([0.6, 0.8]), CollisionSchedule(8, theta))
        recs = np.zeros((8, 2, 2))
        recs[:, 0] = [1, 0]
        recs[:, 1] = [math.cos(theta), math.sin(theta)]
        ref = build_branching_state(BranchSpec((0.6, 0.8), 8, records=recs))
        assert abs(fidelity(s, ref) - 1) < 1e-12

    def test_iterates_each_step(self):
        states = list(iter_collisions(StateVector.single([0.6, 0.8]), CollisionSchedule(4, 0.4)))
        assert [len(s.layout) for s in states] == [2, 3, 4, 5]
        # system entropy grows as coherence decays like cos(theta)^t
        h = [entropy_of_kept(s, (0,)) for s in states]
        assert all(a < b for a, b in zip(h, h[1:]))

    def test_guards(self):
        with pytest.raises(DimensionMismatch):
            list(iter_collisions(StateVector.single([1, 0, 0]), CollisionSchedule(2, 0.1)))
        with pytest.raises(CapacityExceeded):
            list(iter_collisions(StateVector.single([1, 0]), CollisionSchedule(30, 0.1)))
        with pytest.raises(ValueError):
            CollisionSchedule(3, 2.0)


class TestHazy:
    def test_purify_reproduces_rho(self):
        rho = init_hazy_environment(0.3, 1)[0]
        amps = purify(rho).reshape(2, 2)
        np.testing.assert_allclose(amps @ amps.conj().T, rho.matrix, atol=1e-15)

    def test_pure_limit_matches_branching(self):
        s = hazy_branching_state((0.6, 0.8), init_hazy_environment(1.0, 3))
        envs = s.layout.env_indices
        rho = partial_trace(s, (0,) + envs).matrix
        ref = build_branching_state(BranchSpec.qubit(0.6, 3)).amplitudes
        np.testing.assert_allclose(rho, np.outer(ref, ref.conj()), atol=1e-13)

    def test_env_marginals_are_mixtures(self):
        s = hazy_branching_state((0.6, 0.8), init_hazy_environment(0.4, 2))
        assert s.layout.roles[-2:] == ("ancilla(1)", "ancilla(2)")
        rho_s = partial_trace(s, (0,)).matrix
        np.testing.assert_allclose(np.diag(rho_s).real, [0.36, 0.64], atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.05, 0.999), c=st.floats(0.0, 1.0), n=st.integers(1, 6))
def test_branching_invariants(alpha, c, n):
    s = build_branching_state(BranchSpec.qubit(alpha, n, c))
    rho = partial_trace(s, (0,)).matrix
    beta = math.sqrt(1 - alpha**2)
    # populations fixed by the branch amplitudes, coherence by c^N
    assert abs(rho[0, 0] - alpha**2) < 1e-12
    assert abs(rho[0, 1] - alpha * beta * c**n) < 1e-12
    # every environment qubit is symmetric: all single-qubit marginals agree
    marg = [partial_trace(s, (k,)).matrix for k in s.layout.env_indices]
    for m in marg[1:]:
        np.testing.assert_allclose(m, marg[0], atol=1e-12)
