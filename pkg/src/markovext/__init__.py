"""Multi-source randomness extraction in the Markov side-information model.

Concrete two-source and seeded extractors over GF(2^n), the security
calculus that carries a plain extractor guarantee into classical and quantum
Markov models, and exact desk-scale verification oracles (brute-force
statistical distances, small density-operator simulations).
"""

__version__ = "0.1.0"

from .bitfield import BitString, FieldElement, gf_mul, gf_pow, inner_product_mod2
from .errors import (
    CertificationError,
    CompositionError,
    ConstructionError,
    DomainError,
    InvalidArgumentError,
    MarkovExtError,
    ResourceBudgetError,
)
from .extractors import (
    ExtractorDescriptor,
    ExtractorFamily,
    TrevisanParams,
    WeakDesign,
    compose,
    deor_descriptor,
    deor_error,
    deor_extract,
    inner_product_descriptor,
    parity_seeded_descriptor,
    rsh_one_bit,
    trevisan_descriptor,
    trevisan_extract,
    trevisan_params,
    weak_design_build,
)
from .paramcalc import (
    CompositionPlan,
    FeasibilityReport,
    SecurityAssessment,
    SecurityModel,
    SmoothParams,
    classical_markov_transfer,
    deor_quantum_corollary,
    quantum_markov_transfer,
    raz_quantum_feasible,
    smooth_transfer,
    solve_self_consistent_error,
    subnormalized_transfer,
    trevisan_composition_plan,
)
from .sources import (
    FlatSource,
    MarkovSourceTable,
    build_markov_table,
    conditional_distance_given_guess,
    distinguishing_event_statistic,
    hmin_conditional,
    random_flat_source,
    random_joint,
    statistical_distance_from_uniform,
)
from .qsim import (
    CcqBlock,
    CcqMarkovState,
    DensityOperator,
    apply_extractor_channel,
    assemble,
    channel_monotonicity_check,
    conditional_mutual_information,
    from_markov_table,
    hmin_cq,
    markov_cmi,
    partial_trace,
    random_ccq_markov_state,
    random_channel,
    tensor,
    trace_distance,
    verify_quantum_bound,
    von_neumann_entropy,
)
