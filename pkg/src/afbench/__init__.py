"""afbench: a dense-network engine and activation-function benchmark."""

from .activations import (
    KINDS,
    TRAINABLE_KINDS,
    ActivationSpec,
    deriv_input,
    deriv_param,
    forward,
    init_param,
    is_trainable,
)
from .data import Dataset, IdxFormatError, load_idx, synth_blobs
from .experiment import (
    RankReport,
    ResultTable,
    TrialSpec,
    baseline_score,
    build_rank_report,
    emit_report,
    fractional_rank,
    make_trials,
    mean_rank,
    relative_improvement,
    run_matrix,
)
from .network import (
    PRESET_NAMES,
    PRESET_WIDTHS,
    Network,
    NetworkConfig,
    TrainConfig,
    evaluate,
    preset_config,
    softmax_cross_entropy,
    train_epoch,
    train_model,
)
from .numerics import Matrix, RandomStream, derive_seed

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "TRAINABLE_KINDS",
    "ActivationSpec",
    "Dataset",
    "IdxFormatError",
    "Matrix",
    "Network",
    "NetworkConfig",
    "PRESET_NAMES",
    "PRESET_WIDTHS",
    "RandomStream",
    "RankReport",
    "ResultTable",
    "TrainConfig",
    "TrialSpec",
    "baseline_score",
    "build_rank_report",
    "deriv_input",
    "deriv_param",
    "derive_seed",
    "emit_report",
    "evaluate",
    "forward",
    "fractional_rank",
    "init_param",
    "is_trainable",
    "load_idx",
    "make_trials",
    "mean_rank",
    "preset_config",
    "relative_improvement",
    "run_matrix",
    "softmax_cross_entropy",
    "synth_blobs",
    "train_epoch",
    "train_model",
    "__version__",
]
