"""Downstream analyses of a trained model and the regional priority table."""

from .diagnostics import (
    Correlation,
    ResidualSummary,
    actual_vs_predicted_export,
    correlation_matrix,
    read_actual_vs_predicted,
    residual_summary,
    write_correlation,
    write_residuals,
)
from .priority import (
    Priority,
    PriorityConfig,
    PriorityRecord,
    Severity,
    classify_score,
    compare_to_reference,
    default_priority_config,
    parse_priority_config,
    priority_score,
    rank_priority,
    read_priority_config,
    read_priority_records,
    reference_records,
    write_mismatch_report,
    write_priorities,
)
from .sensitivity import (
    BASELINE,
    Scenario,
    ScenarioSummary,
    SensitivityReport,
    default_scenarios,
    parse_scenarios,
    perturb,
    read_scenarios,
    sensitivity_scan,
    write_sensitivity,
)

__all__ = [
    "BASELINE",
    "Correlation",
    "Priority",
    "PriorityConfig",
    "PriorityRecord",
    "ResidualSummary",
    "Scenario",
    "ScenarioSummary",
    "SensitivityReport",
    "Severity",
    "actual_vs_predicted_export",
    "classify_score",
    "compare_to_reference",
    "correlation_matrix",
    "default_priority_config",
    "default_scenarios",
    "parse_priority_config",
    "parse_scenarios",
    "perturb",
    "priority_score",
    "rank_priority",
    "read_actual_vs_predicted",
    "read_priority_config",
    "read_priority_records",
    "read_scenarios",
    "residual_summary",
    "sensitivity_scan",
    "reference_records",
    "write_correlation",
    "write_mismatch_report",
    "write_priorities",
    "write_residuals",
    "write_sensitivity",
]
