"""
Metric and report schemas
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class ConfusionCounts(BaseModel):
    """#TP, #FP, #TN, #FN of one classified set"""

    model_config = ConfigDict(frozen=True)

    tp: int = Field(0, ge=0)
    fp: int = Field(0, ge=0)
    tn: int = Field(0, ge=0)
    fn: int = Field(0, ge=0)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


class BugRankOutcome(BaseModel):
    """Rank of the first bug-finding test of a bug; None stands for infinite"""

    model_config = ConfigDict(frozen=True)

    bug_id: str
    first_tp_rank: Optional[int] = Field(None, ge=1)

    @property
    def is_infinite(self) -> bool:
        return self.first_tp_rank is None


class FoundAtK(BaseModel):
    """Found@K as a bug count and as the count divided by the number of bugs"""

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1)
    count: float = Field(..., ge=0.0)
    fraction: float = Field(..., ge=0.0, le=1.0)


class BugOverlap(BaseModel):
    """Bugs found by two approaches in the same run"""

    model_config = ConfigDict(frozen=True)

    both: int = 0
    only_first: int = 0
    only_second: int = 0


class KindMetrics(BaseModel):
    """Metrics restricted to one oracle kind"""

    confusion: ConfusionCounts
    bug_found: int
    fpr: float
    precision: float
    found_at_k: Dict[int, FoundAtK] = Field(default_factory=dict)


class RunMetrics(BaseModel):
    """Metrics of one prefix-generation run"""

    run_id: int
    confusion: ConfusionCounts
    bug_found: int
    fpr: float
    precision: float
    found_at_k: Dict[int, FoundAtK] = Field(default_factory=dict)
    found_at_k_by_seed: Dict[int, List[float]] = Field(default_factory=dict)
    by_oracle_kind: Dict[str, KindMetrics] = Field(default_factory=dict)


class AggregateMetrics(BaseModel):
    """Means across runs (and, for the seed layer, across ranking seeds)"""

    tp: float = 0.0
    fp: float = 0.0
    tn: float = 0.0
    fn: float = 0.0
    bug_found: float = 0.0
    fpr: float = 0.0
    precision: float = 0.0
    found_at_k: Dict[int, FoundAtK] = Field(default_factory=dict)
    found_at_k_seed_mean: Dict[int, float] = Field(default_factory=dict)


class MetricsReport(BaseModel):
    """Per-run and aggregate metrics of one approach"""

    approach: str
    ranking: str
    bug_count: int
    runs: List[RunMetrics] = Field(default_factory=list)
    aggregate: AggregateMetrics = Field(default_factory=AggregateMetrics)
    by_oracle_kind: Dict[str, AggregateMetrics] = Field(default_factory=dict)

    def metric_values(self, name: str) -> List[float]:
        """
        Per-run values of a metric, in run order

        Args:
            name: bug_found, precision, fpr, tp, fp, tn, fn or found_at_<k>

        Returns:
            One value per run

        Raises:
            KeyError: for unknown metric names or K values not in the report
        """
        values = []
        for run in self.runs:
            if name in ("tp", "fp", "tn", "fn"):
                values.append(float(getattr(run.confusion, name)))
            elif name in ("bug_found", "precision", "fpr"):
                values.append(float(getattr(run, name)))
            elif name.startswith("found_at_"):
                k = int(name[len("found_at_"):])
                values.append(run.found_at_k[k].count)
            else:
                raise KeyError(name)
        return values

    def seed_values(self, k: int) -> List[float]:
        """Per-seed Found@K counts, run by run"""
        values: List[float] = []
        for run in self.runs:
            values.extend(run.found_at_k_by_seed[k])
        return values

    def metric_names(self) -> List[str]:
        names = ["bug_found", "precision", "fpr", "tp", "fp"]
        if self.runs:
            names.extend(f"found_at_{k}" for k in sorted(self.runs[0].found_at_k))
        return names
