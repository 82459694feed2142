"""Bell-inequality correlations for spin pairs on curved-spacetime geodesics.

The pipeline: integrate two geodesics from a shared emission event, carry
the right-hand measurement directions to the left detector by parallel
transport, project them in a local tetrad to get a weight w and arrival
direction, then evaluate the weighted singlet correlation -(a.b) w^2, the
three-setting inequality it can violate, and Monte Carlo hidden-variable
models that cannot.
"""

from .correlations import (
    InequalityReport,
    SettingsTriple,
    ViolationAngles,
    find_max_violation,
    generalized_bell_check,
    quantum_correlation,
    violation_condition,
    weighted_difference,
)
from .errors import (
    BadNormalization,
    BasePointMismatch,
    CommonOriginMismatch,
    ConfigError,
    DegenerateBasis,
    DegenerateD,
    HorizonApproach,
    HorizonDomain,
    InsufficientSamples,
    InvalidChart,
    ParseError,
    PipelineError,
    SimulatorError,
    StaticFrameUnavailable,
    StepFailure,
    ValidationError,
    ZeroVector,
)
from .frames import (
    Direction3,
    LocalFrame,
    ProjectionResult,
    build_comoving_frame,
    build_static_frame,
    embed_direction,
    make_projection,
    project_to_frame,
    tetrad_components,
)
from .geodesics import GeodesicPath, StopCondition, integrate_geodesic
from .geometry import (
    ChristoffelSymbols,
    FourVector,
    MetricSpec,
    MetricTensor,
    SpacetimePoint,
    christoffel_at,
    finite_difference_christoffel,
    inner,
    metric_at,
    minkowski_point,
    same_event,
    schwarzschild_point,
)
from .lhv import (
    LHVAuditReport,
    LHVModel,
    MCEstimate,
    correlation_mc,
    lhv_inequality_audit,
    make_sign_model,
    verify_anticorrelation,
)
from .scenario import (
    RunReport,
    ScenarioConfig,
    config_from_dict,
    csv_row,
    flat_baseline_config,
    load_config,
    report_to_dict,
    report_to_json,
    report_to_text,
    rows_to_csv,
    run_horizon_sweep,
    run_scenario,
    run_sweep,
    schwarzschild_demo_config,
)
from .transport import TransportedVector, parallel_transport, transport_R_to_L

__version__ = "0.1.0"
