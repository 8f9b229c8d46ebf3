from .config import ConfigError, ExperimentConfig, config_from_dict, load_config
from .harness import BudgetExceededFractionTooHigh, ExperimentReport, run_experiment
from .report import emit_report

__all__ = [
    "ConfigError", "ExperimentConfig", "config_from_dict", "load_config",
    "BudgetExceededFractionTooHigh", "ExperimentReport", "run_experiment", "emit_report",
]
