"""Idempotent semiring algebra.

Built-in semirings and residuation (:mod:`.semiring`), finite ordered
structures and their normal completion (:mod:`.order`), tropical matrices
and Bellman solvers (:mod:`.linalg`), x*-functional duality
(:mod:`.duality`) and sampled idempotent calculus (:mod:`.calculus`).
"""
from . import errors
from .errors import (
    AxiomViolation, DivergenceError, DomainError, GraphError, InconsistentPrescriptionError,
    NoBoundError, NotInvertibleError, NotSeparableError, ParseError, RegularityError, ShapeError,
    SizeError, TropicalisError, UnsupportedCarrierError, ZeroFunctionalError,
)
from .kernels import BACKEND
from .semiring import (
    BOOL, DESCRIPTORS, MINMAX, NEG_INF, POS_INF, RMAX, RMAXHAT, RMIN, RMINHAT, ZMAX,
    SemiringDescriptor, adjoin_bottom, deformed_add, get_semiring, sr_add, sr_inf, sr_inv,
    sr_leq, sr_mul, sr_residual, sr_sup,
)
from .order import (
    CayleyStructure, CutLattice, FinitePoset, complete_semiring, is_a_homomorphism,
    is_integrally_closed, low_set, macneille_completion, o_closure, standard_order, up_set,
    validate_semifield, validate_semigroup, validate_semiring,
)
from .linalg import (
    BellmanSolution, TropMatrix, TropVector, kleene_star, mat_add, mat_mul, shortest_paths,
    solve_bellman, validate_semimodule, vec_scale,
)
from .duality import (
    FunctionalRep, GeneratorSet, double_dual, dual_add, dual_scale, functional_apply,
    hahn_banach_extend, project_lower, project_upper, recover_generator, riesz_fischer,
    scalar_product, separate, skew_product, xstar_eval,
)
from .calculus import (
    HJState, SampledFunction, cole_hopf_evolve, hopf_lax_step, idem_integral,
    idem_integral_wrt, idem_measure, inf_convolution, legendre, sup_convolution,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
