"""Finite-scale experiments on homogeneous and inhomogeneous Diophantine exponents."""

from .bounds import (
    BoundInterval,
    HatBranch,
    SandwichTarget,
    bl_lower,
    german_hat_bounds_sim,
    german_hat_transpose_lower,
    german_mult_hat_upper,
    kleinbock_hyperplane_dual,
    manifold_inhom_lower_dual,
    manifold_inhom_lower_sim,
    manifold_mult_inhom_lower_dual,
    manifold_mult_inhom_lower_sim,
    matrix_inhom_lower,
    matrix_mult_inhom_lower,
    sandwich_hyperplane,
    zhang_hyperplane_mult,
    zhang_hyperplane_sim,
)
from .core import (
    INF,
    Matrix,
    PrecisionReal,
    ScaledPow2,
    TargetShift,
    fundamental_representative,
    nearest_integer_distance,
    parse_scalar,
    plus_product,
    product_norm,
)
from .errors import (
    BudgetExceeded,
    ConfigError,
    ConstructionError,
    DiophlabError,
    DimensionError,
    DomainError,
    InsufficientLadder,
    PrecisionError,
    PrecisionExhausted,
    PreconditionFailed,
)
from .estimator import ExponentEstimate, Kind, LadderSpec, estimate_exponent, specialize_dual, \
    specialize_simultaneous
from .search import ApproxWitness, Objective, SearchConfig, Strategy, best_multiplicative, \
    best_supnorm, min_ladder
from .transference import (
    LambdaParam,
    RateKind,
    WeightedTime,
    delta_membership,
    enumerate_T,
    eta0,
    round_trip,
    step1_reduce,
    step2_reduce,
)
from .witnesses import (
    ConstructedPoint,
    HyperplaneSpec,
    hyperplane_point,
    hyperplane_with_exponent,
    liouville_number,
    quadratic_irrational,
    verify_oracle,
)

__version__ = "0.1.0"
