"""Analysis and simulation of one-dimensional diffusions with degenerate coefficients.

The package classifies boundary points of an SDE ``dX = b(X)dt + sigma(X)dB``
through its scale function and speed measure, predicts the long-run behavior of
the process, runs the decreasing-step Euler scheme, and checks empirically that
weighted empirical measures converge to the predicted invariant measure.
"""

from .model import (
    Interval,
    DiffusionSpec,
    PowerLawProfile,
    GrowthBounds,
    ValidationReport,
    validate_spec,
    brownian,
    ornstein_uhlenbeck,
    double_well,
    root_diffusion,
    make_powerlaw_spec,
    estimate_powerlaw,
    spec_from_json,
    spec_to_json,
)
from .quadrature import (
    QuadratureResult,
    ImproperVerdict,
    LimitPolicy,
    EvaluationError,
    integrate,
    improper_limit,
    limit_at_boundary,
)
from .feller import (
    Nature,
    Attainability,
    ErgodicKind,
    ScaleSpeedTable,
    BoundaryVerdict,
    ErgodicVerdict,
    build_scale_speed,
    hitting_probability,
    expected_exit_time,
    green_exit_time,
    classify_boundary,
    classify_powerlaw,
    ergodic_verdict,
)
from .lyapunov import (
    LyapunovCandidate,
    ConditionReport,
    generator_apply,
    check_repulsive,
    check_strongly_repulsive,
    check_attractive,
    check_euler_hypotheses,
    canonical_repulsive_V,
    canonical_strong_V,
    lyapunov_classification,
)
from .euler import (
    StepSequence,
    NoiseModel,
    EulerChain,
    TrajectorySummary,
    DivergenceError,
    make_chain,
    step,
    simulate,
    check_step_condition,
    crossing_probability_bound,
    mc_hitting_probability,
)
from .measures import (
    WeightSequence,
    WeightedHistogram,
    ReferenceDensity,
    HistogramObserver,
    RatioObserver,
    l1_distance,
    side_l1_distance,
    side_mass,
    ratio_ergodic_estimate,
    stability_check,
)
from .vdp2d import (
    VdpConfig,
    Histogram2D,
    vdp_drift_truncated,
    vdp_sigma,
    simulate_vdp,
)

__version__ = "0.1.0"
