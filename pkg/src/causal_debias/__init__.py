"""Human-in-the-loop causal debiasing for tabular datasets.

Workflow: discover a causal structure from data, refine it interactively,
mark biased edges for weakening or removal, simulate a debiased dataset
from the edited model, and quantify the effect on fairness, utility and
distortion.
"""

from .causal import Pdag, apply_meek_rules, orient_v_structures, pc_discover
from .data import ColumnSchema, Dataset, load_csv, standardize, write_csv
from .debias import (
    generate_debiased,
    rescale_categorical,
    rescale_numeric,
    simulate_categorical_node,
    simulate_numeric_node,
)
from .metrics import (
    GroupSpec,
    Selection,
    classifier_fairness,
    evaluate,
    fourfold,
    gower_distortion,
    individual_bias,
    statistical_parity_diff,
)
from .model import (
    CausalModel,
    Edit,
    affected_nodes,
    apply_edit,
    build_model,
    edit_log_view,
    find_paths,
    set_stage,
)
from .regress import (
    LinearFit,
    LogitFit,
    bic,
    ci_test,
    fit_linear,
    fit_logit,
    train_logistic_classifier,
)
from .synth import SyntheticSpec, default_hiring_spec, generate_synthetic, generate_synthetic_hiring

__version__ = "0.1.0"

__all__ = [
    "Pdag", "apply_meek_rules", "orient_v_structures", "pc_discover",
    "ColumnSchema", "Dataset", "load_csv", "standardize", "write_csv",
    "generate_debiased", "rescale_categorical", "rescale_numeric",
    "simulate_categorical_node", "simulate_numeric_node",
    "GroupSpec", "Selection", "classifier_fairness", "evaluate", "fourfold",
    "gower_distortion", "individual_bias", "statistical_parity_diff",
    "CausalModel", "Edit", "affected_nodes", "apply_edit", "build_model",
    "edit_log_view", "find_paths", "set_stage",
    "LinearFit", "LogitFit", "bic", "ci_test", "fit_linear", "fit_logit",
    "train_logistic_classifier",
    "SyntheticSpec", "default_hiring_spec", "generate_synthetic",
    "generate_synthetic_hiring",
    "__version__",
]
