from lindbladcraft.ensemble.analysis import (
    ErrorReport,
    WeakOrderEstimate,
    error_vs_exact,
    estimate_weak_order,
    significantly_less,
    step_count,
)
from lindbladcraft.ensemble.io import write_meta_json, write_results_csv
from lindbladcraft.ensemble.runner import (
    EnsembleEstimate,
    ObservableEstimate,
    RunFlags,
    run_ensemble,
)
from lindbladcraft.ensemble.trajectory import TrajectoryRecord, TrajectoryState, run_trajectory

__all__ = (
    "EnsembleEstimate",
    "ErrorReport",
    "ObservableEstimate",
    "RunFlags",
    "TrajectoryRecord",
    "TrajectoryState",
    "WeakOrderEstimate",
    "error_vs_exact",
    "estimate_weak_order",
    "run_ensemble",
    "run_trajectory",
    "significantly_less",
    "step_count",
    "write_meta_json",
    "write_results_csv",
)
