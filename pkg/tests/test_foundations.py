import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdarwin.dynamics import BranchSpec, build_branching_state, ghz_state, haar_unitary
from qdarwin.errors import (
    FoundationsViolation, InvalidLabels, NoCommonEigenbasis, ToleranceUnreachable, WrongSupport,
)
from qdarwin.foundations import (
    FinegrainSpec, LocalOp, PointerProblem, RecordPair, _branch_swap, adapted_copier,
    born_incommensurate, born_probabilities, copier_residual, copier_residual_floor,
    copier_search, counterswap_ops, decohered_rho_SA, envariance_check, envariance_suite,
    finegrain_state, phase_shift, pointer_observable, random_even_state,
    random_repeatable_triple, record_pair, repeatability_consistent, shift_operator,
    swap_operator,
)
from qdarwin.hilbert import StateVector, partial_trace

SX = np.array([[0, 1], [1, 0]])
SZ = np.diag([1.0, -1.0])


class TestRepeatability:
    def test_orthogonal_states_any_records(self):
        assert repeatability_consistent(RecordPair(0.0, 0.3))

    def test_overlapping_states_need_identical_records(self):
        assert repeatability_consistent(RecordPair(0.6, 1.0))
        assert not repeatability_consistent(RecordPair(0.6, 0.5))

    def test_random_triples(self, rng):
        for _ in range(300):
            u, v, c = random_repeatable_triple(rng)
            pair = record_pair(u, v, c)
            assert abs(pair.overlap_sys * (1 - pair.overlap_rec)) < 1e-10

    def test_adapted_copier_copies_u(self):
        u = np.array([0.6, 0.8j])
        c = adapted_copier(u)
        np.testing.assert_allclose(c @ c.conj().T, np.eye(4), atol=1e-14)
        # perfect record of u: no deviation
        v = np.array([0.8, -0.6j])
        assert copier_residual(u, v, c) == pytest.approx(0.0, abs=1e-12)

    def test_floor_values(self):
        assert copier_residual_floor(0.0) == 0.0
        assert copier_residual_floor(0.6) == pytest.approx(0.26491106406735176, abs=1e-15)
        assert copier_residual_floor(1.0) == pytest.approx(math.sqrt(2) - 1, abs=1e-15)

    def test_search_golden(self):
        u, v = np.array([1.0, 0.0]), np.array([0.6, 0.8])
        best = copier_search(u, v, 10_000, seed=7)
        assert best == pytest.approx(0.4286346970588177, abs=1e-9)
        assert best >= copier_residual_floor(0.6)

    def test_search_limits(self):
        u = np.array([1.0, 0.0])
        assert copier_search(u, np.array([0.0, 1.0]), 50, seed=0) == pytest.approx(0.0, abs=1e-12)
        assert copier_search(u, u, 50, seed=0) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(s=st.floats(0.05, 0.99), seed=st.integers(0, 2**32 - 1))
def test_no_copier_beats_floor(s, seed):
    rng = np.random.default_rng(seed)
    u = np.array([1.0, 0.0])
    v = np.array([s, math.sqrt(1 - s * s)])
    for _ in range(20):
        assert copier_residual(u, v, haar_unitary(4, rng)) >= copier_residual_floor(s) - 1e-12


class TestPointer:
    def test_sigma_z(self):
        basis = pointer_observable(PointerProblem(((SZ, "z"),), 2))
        np.testing.assert_allclose(np.column_stack(basis), np.eye(2), atol=1e-12)

    def test_sigma_x(self):
        basis = pointer_observable(PointerProblem(((SX, "x"),), 2))
        np.testing.assert_allclose(basis[0], [2**-0.5, 2**-0.5], atol=1e-12)
        np.testing.assert_allclose(basis[1], [2**-0.5, -2**-0.5], atol=1e-12)

    def test_degenerate_refined_by_second_term(self):
        a = np.diag([1.0, 1.0, 0.0])
        b = np.diag([0.0, 2.0, 5.0])
        basis = pointer_observable(PointerProblem(((a, "a"), (b, "b")), 3))
        # (1,2) block first, split by b descending, then the a=0 state
        np.testing.assert_allclose(np.abs(np.column_stack(basis)),
                                   np.eye(3)[:, [1, 0, 2]], atol=1e-12)

    def test_non_commuting(self):
        with pytest.raises(NoCommonEigenbasis):
            pointer_observable(PointerProblem(((SZ, "z"), (SX, "x")), 2))


class TestEnvariance:
    def test_phase_on_system_undone_on_environment(self):
        s = build_branching_state(BranchSpec.qubit(0.6, 2))
        phi = 1.1
        rep = envariance_check(s, LocalOp(shift_operator(2, phi), (0,)),
                               LocalOp(shift_operator(2, -phi), (1,)))
        assert rep.holds and rep.rho_S_distance < 1e-12

    def test_swap_uneven_state_not_envariant(self):
        s = build_branching_state(BranchSpec.qubit(0.6, 1))
        rep = envariance_check(s, LocalOp(SX, (0,)), LocalOp(SX, (1,)))
        assert not rep.holds
        assert rep.global_fidelity == pytest.approx(2 * 0.6 * 0.8, abs=1e-12)

    def test_swap_even_state(self):
        s = ghz_state(3)
        rep = envariance_check(s, LocalOp(SX, (0,)), [LocalOp(SX, (k,)) for k in (1, 2, 3)])
        assert rep.holds

    def test_support_rules(self):
        s = ghz_state(2)
        with pytest.raises(WrongSupport):
            envariance_check(s, LocalOp(SX, (1,)), LocalOp(SX, (2,)))
        with pytest.raises(WrongSupport):
            envariance_check(s, LocalOp(SX, (0,)), LocalOp(SX, (0,)))

    def test_labels(self):
        with pytest.raises(InvalidLabels):
            shift_operator(2, 0.1, (0, 0))
        with pytest.raises(InvalidLabels):
            phase_shift(ghz_state(1), 0.1, 5)

    def test_suite(self):
        rows = envariance_suite(30, seed=0)
        assert {r["phases"] for r in rows} == {"equal", "random"}
        assert min(r["swap_fidelity"] for r in rows) >= 1 - 1e-10
        assert min(r["phase_fidelity"] for r in rows) >= 1 - 1e-10
        # a local operation on S alone never changes rho_S of an even decohered state
        assert max(r["swap_rho_S_distance"] for r in rows) < 1e-10

    def test_fault_injection_detected(self):
        rows = envariance_suite(10, seed=0, counter_sign=-1.0)
        assert max(r["swap_fidelity"] for r in rows) < 1 - 1e-3


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5))
def test_counterswap_restores_random_even_states(seed, n):
    rng = np.random.default_rng(seed)
    state, records, rel = random_even_state(rng, n)
    rep = envariance_check(state, LocalOp(SX, (0,)), counterswap_ops(state, records, rel))
    assert rep.global_fidelity >= 1 - 1e-10


class TestDecoherence:
    def test_coherence_scales_with_overlap(self):
        rho = decohered_rho_SA(0.6, 0.8, 0.5).matrix
        assert rho[0, 0].real == pytest.approx(0.36, abs=1e-14)
        assert rho[3, 3].real == pytest.approx(0.64, abs=1e-14)
        assert abs(rho[0, 3]) == pytest.approx(0.24, abs=1e-14)
        assert abs(decohered_rho_SA(0.6, 0.8, 0.0).matrix[0, 3]) < 1e-14

    def test_phase_of_alpha_invisible_when_decohered(self):
        a = decohered_rho_SA(0.6, 0.8, 0.0).matrix
        b = decohered_rho_SA(0.6j, 0.8, 0.0).matrix
        np.testing.assert_allclose(a, b, atol=1e-14)


class TestBorn:
    def test_small_cases(self):
        assert born_probabilities(FinegrainSpec(1, 3)) == (Fraction(1, 4), Fraction(3, 4))
        assert born_probabilities(FinegrainSpec(2, 3)) == (Fraction(2, 5), Fraction(3, 5))
        assert born_probabilities(FinegrainSpec(1, 1)) == (Fraction(1, 2), Fraction(1, 2))

    @pytest.mark.parametrize("mu, nu", [(1, 2), (3, 2), (2, 5)])
    def test_generators_and_pairs_agree(self, mu, nu):
        spec = FinegrainSpec(mu, nu)
        a = finegrain_state(spec, verify="generators")
        b = finegrain_state(spec, verify="pairs")
        assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_reduced_state_diagonal(self):
        rho = partial_trace(finegrain_state(FinegrainSpec(3, 4)), (0,)).matrix
        np.testing.assert_allclose(np.diag(rho).real, [3 / 7, 4 / 7], atol=1e-14)
        assert abs(rho[0, 1]) < 1e-15

    def test_branch_swap_is_unitary_and_envariant(self):
        spec = FinegrainSpec(2, 3)
        op, counter = _branch_swap(spec, [3, 1, 4, 0, 2])
        np.testing.assert_allclose(op.matrix @ op.matrix.T, np.eye(10))
        state = finegrain_state(spec)
        assert envariance_check(state, op, counter, side=(0, 1), local_distance=False).holds

    def test_validation(self):
        with pytest.raises(ValueError):
            FinegrainSpec(0, 1)
        with pytest.raises(ValueError):
            finegrain_state(FinegrainSpec(1, 2), verify="bogus")

    def test_incommensurate(self):
        r = born_incommensurate(0.5 ** 0.5, 1e-3, 1000)
        assert (r.mu, r.nu, r.value) == (29, 12, Fraction(29, 41))
        assert r.error <= 1e-3
        assert born_incommensurate(0.25, 0.0, 10).value == Fraction(1, 4)
        assert born_incommensurate(1 / 3, 1e-12, 10).value == Fraction(1, 3)
        with pytest.raises(ToleranceUnreachable):
            born_incommensurate(0.5 ** 0.5, 1e-9, 100)
        with pytest.raises(ValueError):
            born_incommensurate(1.0, 0.1, 10)


def _brute_simplest(x, tol, max_den):
    for den in range(2, max_den + 1):
        for num in range(1, den):
            if abs(Fraction(num, den) - Fraction(x)) <= Fraction(tol):
                return Fraction(num, den)
    return None


@settings(max_examples=60, deadline=None)
@given(x=st.floats(0.01, 0.99), tol=st.floats(1e-4, 0.05))
def test_incommensurate_matches_brute_force(x, tol):
    oracle = _brute_simplest(x, tol, 400)
    if oracle is None:
        with pytest.raises(ToleranceUnreachable):
            born_incommensurate(x, tol, 400)
        return
    assert born_incommensurate(x, tol, 400).value.denominator == oracle.denominator


@settings(max_examples=40, deadline=None)
@given(mu=st.integers(1, 12), nu=st.integers(1, 12))
def test_born_counts_match_squared_amplitude(mu, nu):
    p_up, p_down = born_probabilities(FinegrainSpec(mu, nu))
    assert p_up + p_down == 1
    assert p_up == Fraction(mu, mu + nu)
    rho = partial_trace(finegrain_state(FinegrainSpec(mu, nu), verify="none"), (0,)).matrix
    assert abs(rho[0, 0].real - float(p_up)) < 1e-12
