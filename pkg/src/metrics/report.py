"""
Metric Reports
==============

Per-example metrics, per-subset summaries and embedding deviation maps.
"""

import math
from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, Field, computed_field

from ..autodiff import Tensor
from .erle import ErleSeries

SUBSETS = ("SS", "SN", "NS", "NN")

# (time s, dB) pairs
ErlePoints = list[tuple[float, float]]


def erle_points(series: ErleSeries) -> ErlePoints:
    return [(float(t), float(v)) for t, v in zip(series.times, series.values)]


class ExampleMetrics(BaseModel):
    """Metrics of one evaluated scene."""

    scene_id: str
    subset: str
    si_sdr_in: float = Field(..., description="SI-SDR of the unprocessed mixture against the near-end (dB)")
    si_sdr_out: float = Field(..., description="SI-SDR of the near-end estimate (dB)")
    sdr_echo: float = Field(..., description="SDR of the echo estimate (dB)")
    erle_mean: float = Field(..., description="Mean frame-wise ERLE (dB)")
    erle_series: ErlePoints = Field(default_factory=list, description="Frame-wise ERLE as (time s, dB)")

    @computed_field  # type: ignore[prop-decorator]
    @property
    def si_sdri(self) -> float:
        """SI-SDR improvement of the near-end estimate (dB)."""
        return self.si_sdr_out - self.si_sdr_in


class MetricReport(BaseModel):
    """Evaluation result over a manifest."""

    config_hash: str = ""
    estimator: str = "model"
    examples: list[ExampleMetrics] = Field(default_factory=list)
    subset_si_sdri: dict[str, Optional[float]] = Field(default_factory=dict)
    mean_si_sdri: Optional[float] = None
    mean_erle: Optional[float] = None
    erle_series: ErlePoints = Field(default_factory=list, description="Frame-wise ERLE averaged over examples")

    def to_json(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2))
        return path

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "MetricReport":
        return cls.model_validate_json(Path(path).read_text())

    def table_row(self) -> dict[str, str]:
        """SS, SN, NS, NN and mean SI-SDRi, blank where a subset is empty."""
        row = {s: _fmt(self.subset_si_sdri.get(s)) for s in SUBSETS}
        row["mean"] = _fmt(self.mean_si_sdri)
        return row


def _fmt(value: Optional[float]) -> str:
    return "" if value is None or math.isnan(value) else f"{value:.2f}"


def mean_erle_series(examples: list[ExampleMetrics]) -> ErlePoints:
    """Frame-wise mean over examples, truncated to the shortest series."""
    series = [e.erle_series for e in examples if e.erle_series]
    if not series:
        return []
    frames = min(len(s) for s in series)
    stacked = np.array([s[:frames] for s in series])
    return [(float(t), float(v)) for t, v in zip(stacked[0, :, 0], stacked[:, :, 1].mean(axis=0))]


def summarize(
    examples: list[ExampleMetrics], config_hash: str = "", estimator: str = "model"
) -> MetricReport:
    """Subset means and the mean over all examples."""
    subset_means: dict[str, Optional[float]] = {}
    for subset in SUBSETS:
        values = [e.si_sdri for e in examples if e.subset == subset]
        subset_means[subset] = float(np.mean(values)) if values else None
    return MetricReport(
        config_hash=config_hash,
        estimator=estimator,
        examples=examples,
        subset_si_sdri=subset_means,
        mean_si_sdri=float(np.mean([e.si_sdri for e in examples])) if examples else None,
        mean_erle=float(np.mean([e.erle_mean for e in examples])) if examples else None,
        erle_series=mean_erle_series(examples),
    )


def embedding_deviation_map(embeddings: Union[Tensor, np.ndarray]) -> np.ndarray:
    """|E - mean_t(E)| per channel and frame; exactly zero for constant rows."""
    values = embeddings.data if isinstance(embeddings, Tensor) else np.asarray(embeddings)
    if values.ndim != 2:
        raise ValueError(f"Embeddings must be 2-D, got shape {values.shape}")
    offsets = values - values[:, :1]
    return np.abs(offsets - offsets.mean(axis=1, keepdims=True))
