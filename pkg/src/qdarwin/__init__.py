"""Quantum Darwinism toolkit: branching states, partial-information curves,
redundancy, envariance and Born-rule counting on small pure states."""
from .errors import *  # noqa: F401,F403
from .hilbert import (
    APPARATUS, SYSTEM, DensityOperator, FragmentSelection, StateVector, SubsystemLayout,
    ancilla, apply_unitary, bipartition, entropy_of_kept, env, fidelity, partial_trace,
    schmidt_spectrum, tensor_compose,
)
from .dynamics import (
    BranchSpec, CollisionSchedule, ScrambleConfig, build_branching_state, ghz_state,
    haar_random_state, hazy_branching_state, init_hazy_environment, iter_collisions,
    premeasure, run_collision_model, scramble_environment,
)
from .infotheory import (
    PartialInfoCurve, RedundancyResult, fragment_information, mutual_information,
    partial_information_plot, plateau_deviation, redundancy, von_neumann_entropy,
)
from .foundations import (
    FinegrainSpec, LocalOp, PointerProblem, born_incommensurate, born_probabilities,
    copier_search, decohered_rho_SA, envariance_check, envariance_suite, finegrain_state,
    pointer_observable,
)
from .kernels import BACKEND

__version__ = "0.1.0"
