"""Bi-invariant word norms, partial quasimorphisms and asymptotic-cone
functionals on concrete group families, with exact small-instance oracles."""

from .groups import (
    FamilyMismatchError,
    FreeWord,
    GroupElement,
    GroupError,
    Heisenberg,
    HEISENBERG_A,
    HEISENBERG_B,
    LatticeVector,
    Permutation,
    commutator,
    conjugate,
    cycle_decomposition,
    decode,
    group_inv,
    group_mul,
    power,
)
from .kernels import ACTIVE_BACKEND, NUMBA_AVAILABLE
from .norms import (
    GeneratingSet,
    GroupContext,
    NormInterval,
    bfs_word_norm,
    cancellation_norm,
    check_conjugation_invariance,
    commutator_length_bounds,
    conjugate_product_search,
    free_cancellation_context,
    heisenberg_context,
    integer_line_context,
    l1_norm,
    lattice_context,
    symmetric_transposition_context,
    transposition_norm,
)
from .pqm import (
    LimitScheme,
    PqmHandle,
    antisymmetrise,
    brooks_qm,
    c_trick_witness,
    defect_estimate,
    detect_undistorted,
    fekete_limit,
    generator_bound,
    homogenise,
    homogeneity_check,
    lipschitz_estimate,
    mcshane_extend,
    SubadditiveCorrection,
    walk_build,
)
from .cone import (
    ConePoint,
    abelian_cl_cone_check,
    cone_dist,
    cone_norm,
    eta,
    length_vs_word_check,
    lift_function,
    pullback_defect,
)

__version__ = "0.1.0"
