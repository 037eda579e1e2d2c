"""Nested sampling for Bayesian evidence with mean-shift cluster-aware search."""

from .config import RunConfig, SimulateSpec, load_config, parse_config, serialize_config
from .dataio import read_data, simulate_dataset, write_data
from .engine import (
    CombinedResult,
    DiscardedSample,
    NestedRun,
    Quadrature,
    SamplerConfig,
    accumulate_evidence,
    bayesian_complexity,
    combine_runs,
    information_gain,
    run_nested,
    shrinkage_log_volume,
)
from .errors import ConfigError, DataError, NestshiftError, SearchBudgetExhausted
from .meanshift import (
    ClusterConfig,
    ClusterResult,
    Kernel,
    assign_labels,
    cluster_live_points,
    cluster_sigmas,
    denormalize_points,
    mean_shift,
    normalize_points,
)
from .models import (
    DataKind,
    Dataset,
    ModelFamily,
    ModelSpec,
    ParameterSpace,
    gaussian_log_likelihood,
    log_likelihood,
    make_loglike,
    model_eval,
    poisson_log_likelihood,
    sample_prior,
)
from .posterior import (
    HistResult,
    JointHistResult,
    ParamSummary,
    WeightedPosterior,
    combine_posteriors,
    joint_hist,
    marginal_hist,
    summarize,
    to_posterior,
    weighted_quantile,
)
from .report import run_analysis, run_kscan, write_kscan_outputs, write_outputs
from .walker import (
    LivePointSet,
    WalkOutcome,
    find_new_point,
    lawn_mower_walk,
    propose_step,
    strategy_recenter,
    strategy_synthesize,
)

__version__ = "0.1.0"
