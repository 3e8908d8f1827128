"""
Сервис статистических сводок
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from app.analysis.alignment import Bin, Side
from app.analysis.stats import (
    CategorySummary, KsRow, MedianCI, RepositorySummary, ks_category_pairs,
    summarize_categories, summarize_repositories
)
from app.config import PipelineConfig
from .alignment_service import read_alignment_rows, read_repositories
from .artifacts import ArtifactStore, StageResult
from .ingest_service import load_records
from .survival_service import DURATIONS_FILE, read_durations

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.csv"
KS_FILE = "ks_tests.csv"
BINS_FILE = "bins.csv"
REPOSITORY_SUMMARY_FILE = "repository_summary.csv"

SUMMARY_METRICS = ("conversations", "prompts", "prompt_tokens", "answer_tokens")
SUMMARY_HEADER = (
    ("category", "changes")
    + tuple(f"{metric}_{part}" for metric in SUMMARY_METRICS for part in ("median", "ci_lo", "ci_hi"))
    + ("median_survival_all_days", "median_survival_influenced_days")
)
KS_HEADER = ("side", "first", "second", "m", "n", "statistic", "p_value", "alpha", "decision")
BINS_HEADER = ("category", "side", "bin", "count")
REPOSITORY_SUMMARY_HEADER = ("category", "metric", "repositories", "median", "ci_lo", "ci_hi")


@dataclass
class StatsRun:
    """Результаты стадии stats"""
    summaries: List[CategorySummary] = field(default_factory=list)
    ks_rows: List[KsRow] = field(default_factory=list)
    repositories: List[RepositorySummary] = field(default_factory=list)
    result: StageResult = field(default_factory=lambda: StageResult(stage="stats"))


def _ci_cells(ci: Optional[MedianCI]) -> Tuple:
    if ci is None:
        return (None, None, None)
    return (ci.median, ci.lo, ci.hi)


class StatsService:
    """Сервис стадии stats"""

    def __init__(self, config: PipelineConfig, store: Optional[ArtifactStore] = None):
        self.config = config
        self.store = store or ArtifactStore(config.output_dir)

    def run(self) -> StatsRun:
        """Сводка по категориям, критерии KS, интервалы и характеристики репозиториев"""
        records = load_records(self.store)
        rows = read_alignment_rows(self.store)
        ratios = [row.ratios for row in rows if row.is_aligned]
        durations = read_durations(self.store) if self.store.exists(DURATIONS_FILE) else []
        repositories = read_repositories(self.store)

        run = StatsRun()
        run.summaries = summarize_categories(records, ratios, durations, self.config.ci_level)
        run.ks_rows = ks_category_pairs(ratios, self.config.alpha)
        run.repositories = summarize_repositories(records, repositories, self.config.ci_level)

        self.store.write_csv(SUMMARY_FILE, SUMMARY_HEADER, [
            (summary.category, summary.changes)
            + _ci_cells(summary.conversations)
            + _ci_cells(summary.prompts)
            + _ci_cells(summary.prompt_tokens)
            + _ci_cells(summary.answer_tokens)
            + (summary.median_survival_all, summary.median_survival_influenced)
            for summary in run.summaries
        ])
        self.store.write_csv(KS_FILE, KS_HEADER, [
            (
                row.side, row.first, row.second,
                row.result.m if row.result else None,
                row.result.n if row.result else None,
                row.result.statistic if row.result else None,
                row.result.p_value if row.result else None,
                self.config.alpha, row.decision,
            )
            for row in run.ks_rows
        ])
        self.store.write_csv(BINS_FILE, BINS_HEADER, [
            (summary.category, side, b, (summary.bins_pre if side == Side.PRE else summary.bins_post)[b])
            for summary in run.summaries
            for side in Side
            for b in Bin
        ])
        self.store.write_csv(REPOSITORY_SUMMARY_FILE, REPOSITORY_SUMMARY_HEADER, [
            row for summary in run.repositories for row in _repository_rows(summary)
        ])

        run.result.counts = {
            "changes": sum(summary.changes for summary in run.summaries),
            "aligned": len(ratios),
            "ks_rows": len(run.ks_rows),
            "not_applicable": sum(1 for row in run.ks_rows if row.result is None),
        }
        run.result.files = [SUMMARY_FILE, KS_FILE, BINS_FILE, REPOSITORY_SUMMARY_FILE]
        logger.info(f"Statistics written: {run.result.counts}")
        return run


def _repository_rows(summary: RepositorySummary) -> List[Tuple]:
    metrics = [("commits", summary.commits), ("authors", summary.authors), ("age_days", summary.age_days)]
    metrics += sorted(summary.extra.items())
    return [
        (summary.category, name, summary.repositories) + _ci_cells(ci)
        for name, ci in metrics
    ]
