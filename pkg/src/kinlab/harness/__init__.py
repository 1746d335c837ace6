"""Sweeps, rate fits, acceptance verdicts and file I/O."""
from .config import SweepConfig, criterion_configs, load_config
from .fitting import RateFit, fit_rate, fit_records, sup_over_time
from .records import SweepRecord, read_csv, write_csv
from .report import AcceptanceReport, Verdict, acceptance_report, evaluate
from .snapshots import read_snapshot, write_snapshot
from .sweep import run_pair, run_sweep

__all__ = [
    "AcceptanceReport", "RateFit", "SweepConfig", "SweepRecord", "Verdict", "acceptance_report", "criterion_configs",
    "evaluate", "fit_rate", "fit_records", "load_config", "read_csv", "read_snapshot", "run_pair", "run_sweep",
    "sup_over_time", "write_csv", "write_snapshot",
]
