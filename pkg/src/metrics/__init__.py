"""
Objectives and Metrics
======================

SDR loss, SI-SDR(i), ERLE and evaluation reports.
"""

from .erle import ERLE_FRAME, ERLE_HOP, ErleSeries, erle_curve, erle_frame_params, write_erle_csv
from .objectives import DB_CAP, EPS, near_end_estimate, sdr, sdr_loss, si_sdr, si_sdri
from .report import SUBSETS, ExampleMetrics, MetricReport, embedding_deviation_map, erle_points, summarize

__all__ = [
    "DB_CAP",
    "EPS",
    "ERLE_FRAME",
    "ERLE_HOP",
    "ErleSeries",
    "ExampleMetrics",
    "MetricReport",
    "SUBSETS",
    "embedding_deviation_map",
    "erle_curve",
    "erle_frame_params",
    "erle_points",
    "near_end_estimate",
    "sdr",
    "sdr_loss",
    "si_sdr",
    "si_sdri",
    "summarize",
    "write_erle_csv",
]
