from camstyle.evaluation.core import (
    RankingEvaluation,
    distance_matrix,
    evaluate,
    protocol_filter,
    write_report,
)
from camstyle.evaluation.kernels import active_kernel, available_kernels

__all__ = [
    "RankingEvaluation",
    "distance_matrix",
    "evaluate",
    "protocol_filter",
    "write_report",
    "active_kernel",
    "available_kernels",
]
