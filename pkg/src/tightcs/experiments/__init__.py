"""Signal generation, seeded experiments, Monte Carlo probes and reports."""

from .harness import (
    CellSummary,
    ExperimentPlan,
    MethodRule,
    TrialRecord,
    aggregate_records,
    load_plan,
    run_experiment,
    run_trial,
)
from .probability import EVENTS, ProbeResult, empirical_probability
from .report import CSV_FIELDS, emit_report, parse_csv, plot_blocks, read_records, records_to_csv
from .signals import SignalSpec, generate_signal

__all__ = [
    "CellSummary", "ExperimentPlan", "MethodRule", "TrialRecord", "aggregate_records",
    "load_plan", "run_experiment", "run_trial", "EVENTS", "ProbeResult",
    "empirical_probability", "CSV_FIELDS", "emit_report", "parse_csv", "plot_blocks",
    "read_records", "records_to_csv", "SignalSpec", "generate_signal",
]
