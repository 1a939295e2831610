"""Multi-stakeholder performance-fairness front analysis for threshold policies."""

from .errors import (
    AnchorError,
    ConfigError,
    DataError,
    GainUndefinedError,
    MetricUndefinedError,
    ModeError,
    RowError,
    SchemaError,
    SplitError,
)
from .moo import (
    Anchors,
    Front,
    GainCurve,
    ObjectivePoint,
    anchors,
    fairness_gain,
    hypervolume,
    nhv,
    pareto_front,
    project,
)
from .policy import (
    BETA_HARD,
    DEFAULT_BETAS,
    DeterministicPolicy,
    GridSpec,
    MixturePolicy,
    Policy,
    StochasticPolicy,
    policy_from_descriptor,
)
from .population import (
    DgmConfig,
    Individual,
    Population,
    export_csv,
    gen_synthetic_credit,
    gen_synthetic_hiring,
    ingest_csv,
    split,
)
from .predictive import accuracy, eo_disparity, group_tprs
from .stakeholders import (
    CREDIT_DM,
    CREDIT_DS,
    HIRING_DM,
    HIRING_DS,
    StakeholderSpec,
    UtilityMatrix,
    UtilityVector,
    credit_spec,
    egalitarian,
    eval_utilities,
    from_cost_form,
    hiring_spec,
    rawlsian,
    unfairness,
)
from .theory import (
    RegimeReport,
    alignment,
    asymmetry_ratio,
    classify_regime,
    curvature_violations,
    hull,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
