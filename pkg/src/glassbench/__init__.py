"""glassbench: glass models, post-hoc explainers, and model diagnostics."""

from .compare import model_compare
from .data import (BINARY, CATEGORICAL, NUMERIC, REGRESSION, Dataset,
                   data_quality, feature_select, load_csv, prepare, save_csv,
                   summarize)
from .diagnose import (DIAGNOSTIC_TESTS, accuracy, fairness, model_diagnose,
                       overfit_underfit, reliability, resilience, robustness,
                       weakspot)
from .errors import (CapabilityError, ConfigError, ConflictError, DataError,
                     NotFoundError, PersistenceError, WorkbenchError)
from .experiment import (Experiment, emit_report, execute_test, load_experiment,
                         run_pipeline, save_experiment)
from .explain import (EXPLAIN_METHODS, ale, lime_explain, model_explain, pdp,
                      pfi, shap_explain)
from .interpret import interpret_global, interpret_local
from .metrics import metric_set
from .models import (ModelSpec, TrainedModel, load_model, purify,
                     read_scores_csv, register, save_model, train)

__version__ = "0.1.0"

__all__ = [
    "BINARY", "CATEGORICAL", "NUMERIC", "REGRESSION",
    "CapabilityError", "ConfigError", "ConflictError", "DataError",
    "Dataset", "DIAGNOSTIC_TESTS", "EXPLAIN_METHODS", "Experiment",
    "ModelSpec", "NotFoundError", "PersistenceError", "TrainedModel",
    "WorkbenchError", "accuracy", "ale", "data_quality", "emit_report",
    "execute_test", "fairness", "feature_select", "interpret_global",
    "interpret_local", "lime_explain", "load_csv", "load_experiment",
    "load_model", "metric_set", "model_compare", "model_diagnose",
    "model_explain", "overfit_underfit", "pdp", "pfi", "prepare", "purify",
    "read_scores_csv", "register", "reliability", "resilience", "robustness",
    "run_pipeline", "save_csv", "save_experiment", "save_model", "shap_explain",
    "summarize", "train", "weakspot",
]
