"""Run configuration, ensemble orchestration, comparison with theory, sweeps and validation."""

from .compare import ComparisonReport, Tolerances, compare_run
from .config import RunConfig, load_config
from .runner import RunResult, config_from_manifest, run_ensemble, verify_outputs
from .sweep import SweepPoint, sweep, write_figures
from .validate import ValidationReport, validate
from .watchdog import DivergenceWatchdog, WatchdogConfig

__all__ = [
    "ComparisonReport",
    "DivergenceWatchdog",
    "RunConfig",
    "RunResult",
    "SweepPoint",
    "Tolerances",
    "ValidationReport",
    "WatchdogConfig",
    "compare_run",
    "config_from_manifest",
    "load_config",
    "run_ensemble",
    "sweep",
    "validate",
    "verify_outputs",
    "write_figures",
]
