"""Exact chain-complex algebra, Novikov numbers, and cocycle-carrying flow
diagnostics on the circle and flat tori."""

from .polynomials import MultiPoly
from .exact_linalg import (
    EvaluationAt,
    GenericPoint,
    PolyMatrix,
    ReductionIp,
    SnfResult,
    field_rank,
    rank_at_ideal,
    smith_normal_form,
)
from .complexes import (
    ChainMap,
    ComplexError,
    FiltrationSpec,
    FreeChainComplex,
    PoincarePolynomial,
    filtration_polynomials,
    homology,
    mapping_cone,
    prime_comparison,
    skeletal_filtration,
    verify_complex,
)
from .twisted import (
    LocalSystem,
    NovikovReport,
    TwistedComplex,
    TwistError,
    WeightedCWComplex,
    build_twisted,
    circle_complex,
    evaluated_homology,
    novikov_numbers,
    projective_plane_complex,
    reduced_homology_mod_p,
    sphere_complex,
    torsion_numbers,
    torus_complex,
)
from .flows import (
    AlphaFlowParams,
    ChainPath,
    Chart,
    CocycleRep,
    CertReport,
    FlowError,
    FlowModel,
    SamplingPlan,
    Trajectory,
    certify_alpha_flow,
    integrate_chain,
    integrate_cocycle,
    integrate_flow,
    load_model,
)
from .chain_graph import (
    ChainGraph,
    build_chain_graph,
    chain_recurrent_components,
    detect_gradient_like,
    pi_morse_report,
)
from .conley import (
    CriticalManifold,
    HyperbolicFixedPoint,
    PeriodicOrbit,
    index_poincare,
    sum_index_poincare,
)
from .report import (
    MorseVerdict,
    VanishingVerdict,
    euler_check,
    main_equality_check,
    morse_smale_check,
    novikov_inequality_check,
    vanishing_check,
)

__version__ = "0.1.0"
