"""
Report file schemas
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from oracle_rank.schemas.metrics import BugOverlap, MetricsReport
from oracle_rank.schemas.stats import ComparisonResult

CONVENTIONS = {
    "fpr": "FP / (FP + TN); 0 when FP + TN = 0",
    "precision": "TP / (TP + FP); 0 when TP + FP = 0",
    "found_at_k.count": "bugs whose first TP is ranked within the top K",
    "found_at_k.fraction": "found_at_k.count divided by the number of bugs",
    "found_at_k_by_seed": "found_at_k.count of the ranking of each seed",
    "first_tp_rank": "infinite when a bug has no ranked TP",
    "p_value": "two-sided Wilcoxon signed-rank; significant when p < alpha",
}


class OverlapReport(BaseModel):
    """Bugs found by the generated tests and by the NoException baseline"""

    runs: List[BugOverlap] = Field(default_factory=list)
    mean_both: float = 0.0
    mean_only_first: float = 0.0
    mean_only_second: float = 0.0


class EvaluationReport(BaseModel):
    """Content of report.json"""

    config: Dict[str, Any]
    conventions: Dict[str, str] = Field(default_factory=lambda: dict(CONVENTIONS))
    bug_count: int
    approaches: Dict[str, MetricsReport]
    comparison: List[ComparisonResult] = Field(default_factory=list)
    overlap: Optional[OverlapReport] = None


class ComparisonReport(BaseModel):
    """Content of comparison.json"""

    level: str
    approach: str
    report_a: str
    report_b: str
    alpha: float
    results: List[ComparisonResult] = Field(default_factory=list)
