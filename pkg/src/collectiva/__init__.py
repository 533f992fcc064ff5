"""collectiva: finite probability spaces, marginal-feasibility polytopes,
frequency collectives, compression-based complexity, signed weight systems,
and p-adic metrics — with exact rational arithmetic wherever the inputs are
exact and explicit tolerances wherever they are not."""

from .errors import (
    CapacityError,
    CodecIntegrityError,
    CollectivaError,
    ConstructionError,
    InputError,
    NotMeasurableError,
    NullConditioningError,
)
from .finite_prob import (
    Event,
    EventAlgebra,
    FiniteProbabilitySpace,
    Partition,
    RandomVariable,
    SampleSpace,
    build_algebra,
    conditional,
    conditional_space,
    distribution,
    expectation,
    independent,
    is_measurable,
    partition_from_rv,
    probability,
    total_probability,
)
from .marginals import (
    CorrelationTriple,
    FeasibilityVerdict,
    JointPMF,
    MarginalFamily,
    boole_bell_value,
    check_no_signaling,
    correlation_facets,
    joint_exists,
    kolmogorov_consistency,
    marginalize,
    triple_to_family,
)
from .collectives import (
    BINARY,
    FrequencyTrace,
    LabelAlphabet,
    PlaceSelectionRule,
    TrialSequence,
    apply_selection,
    detect_stabilization,
    frequencies,
    frequency_probability,
    kamke_adversary,
    log_checkpoints,
    mix,
    randomness_check,
    rule_from_spec,
    ville_generator,
)
from .complexity import (
    Codec,
    ComplexityEstimate,
    arith_codec,
    as_bits,
    battery_passed,
    deflate_codec,
    estimate_K,
    estimate_K_conditional,
    martin_lof_dip_scan,
    run_battery,
)
from .signed_prob import (
    BUNDLED_SPACES,
    BUNDLED_VARIABLES,
    SignedProbabilitySpace,
    complement_excess,
    conditional_signed,
    expectation_signed,
    jordan,
    mean_law_table,
    sum_distribution,
    weak_lln_check,
)
from .padic import (
    PAdicContext,
    PAdicExpansion,
    compare_convergence,
    detect_padic_stabilization,
    frequency_path_realizer,
    padic_distance,
    padic_expand,
    padic_valuation,
)

__version__ = "0.1.0"

__all__ = [
    "BINARY",
    "BUNDLED_SPACES",
    "BUNDLED_VARIABLES",
    "CapacityError",
    "Codec",
    "CodecIntegrityError",
    "CollectivaError",
    "ComplexityEstimate",
    "ConstructionError",
    "CorrelationTriple",
    "Event",
    "EventAlgebra",
    "FeasibilityVerdict",
    "FiniteProbabilitySpace",
    "FrequencyTrace",
    "InputError",
    "JointPMF",
    "LabelAlphabet",
    "MarginalFamily",
    "NotMeasurableError",
    "NullConditioningError",
    "PAdicContext",
    "PAdicExpansion",
    "Partition",
    "PlaceSelectionRule",
    "RandomVariable",
    "SampleSpace",
    "SignedProbabilitySpace",
    "TrialSequence",
    "apply_selection",
    "arith_codec",
    "as_bits",
    "battery_passed",
    "boole_bell_value",
    "build_algebra",
    "check_no_signaling",
    "compare_convergence",
    "complement_excess",
    "conditional",
    "conditional_signed",
    "conditional_space",
    "correlation_facets",
    "deflate_codec",
    "detect_padic_stabilization",
    "detect_stabilization",
    "distribution",
    "estimate_K",
    "estimate_K_conditional",
    "expectation",
    "expectation_signed",
    "frequencies",
    "frequency_path_realizer",
    "frequency_probability",
    "independent",
    "is_measurable",
    "joint_exists",
    "jordan",
    "kamke_adversary",
    "kolmogorov_consistency",
    "log_checkpoints",
    "marginalize",
    "martin_lof_dip_scan",
    "mean_law_table",
    "mix",
    "padic_distance",
    "padic_expand",
    "padic_valuation",
    "partition_from_rv",
    "probability",
    "randomness_check",
    "rule_from_spec",
    "run_battery",
    "sum_distribution",
    "total_probability",
    "triple_to_family",
    "ville_generator",
    "weak_lln_check",
]
