"""
Сервис сопоставления изменений с перепиской
"""

import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from app.analysis.alignment import AlignmentResult, ChangeRatios, influence_ratios
from app.config import PipelineConfig
from app.dataset.schemas import Category, ChangeLink, ChangeRecord, RecordStatus
from app.exceptions import ChangeUnresolvableError, GitCommandError
from app.git.bridge import GitBridge
from app.git.cache import CloneCache
from app.git.schemas import LineKind, RepositoryStats, ResolvedChange
from .artifacts import ArtifactStore, StageResult, format_value, parse_bool
from .ingest_service import load_records

logger = logging.getLogger(__name__)

ALIGNMENT_FILE = "alignment.csv"
LINES_FILE = "lines.csv"
REPOSITORIES_FILE = "repositories.csv"

ALIGNMENT_HEADER = (
    "category", "repo_url", "change_id", "via", "status", "reason", "ambiguous",
    "base_commit", "head_commit",
    "matched_pre", "eligible_pre", "rho_pre", "bin_pre", "degenerate_pre",
    "matched_post", "eligible_post", "rho_post", "bin_post", "degenerate_post",
)
LINES_HEADER = (
    "category", "repo_url", "change_id", "via", "head_commit",
    "file_path", "line_no", "influenced", "score", "segment",
)
REPOSITORIES_HEADER = (
    "repo_url", "main_branch", "tip_commit", "commit_count", "author_count", "age_days", "metrics",
)


class ChangeStatus(Enum):
    """Итог обработки изменения"""
    ALIGNED = "ALIGNED"
    EXPIRED_LINK = "EXPIRED_LINK"
    MALFORMED = "MALFORMED"
    NOT_MERGED = "NOT_MERGED"
    CHANGE_UNRESOLVABLE = "CHANGE_UNRESOLVABLE"
    CLONE_FAILED = "CLONE_FAILED"
    GIT_ERROR = "GIT_ERROR"
    FAILED = "FAILED"


@dataclass
class ChangeOutcome:
    """Результат обработки одной записи (или одной ссылки issue)"""
    record: ChangeRecord
    status: ChangeStatus
    reason: str = ""
    link: Optional[ChangeLink] = None
    change: Optional[ResolvedChange] = None
    alignment: Optional[AlignmentResult] = None

    @property
    def via(self) -> str:
        if self.link is None:
            return ""
        return f"{self.link.category.value}:{self.link.change_id}"


@dataclass
class RepositoryContext:
    """Подготовленный клон репозитория"""
    repo_url: str
    bridge: Optional[GitBridge] = None
    main_branch: str = ""
    tip_commit: str = ""
    error: str = ""


@dataclass(frozen=True)
class AlignmentRow:
    """Строка alignment.csv, прочитанная следующими стадиями"""
    category: Optional[Category]
    repo_url: str
    change_id: str
    via: str
    status: str
    ratios: ChangeRatios

    @property
    def is_aligned(self) -> bool:
        return self.status == ChangeStatus.ALIGNED.value


@dataclass(frozen=True)
class LineLabel:
    """Строка lines.csv"""
    category: Optional[Category]
    repo_url: str
    change_id: str
    via: str
    head_commit: str
    file_path: str
    line_no: int
    influenced: bool


@dataclass
class AlignmentRun:
    """Все результаты стадии align"""
    outcomes: List[ChangeOutcome] = field(default_factory=list)
    repositories: List[RepositoryStats] = field(default_factory=list)
    result: StageResult = field(default_factory=lambda: StageResult(stage="align"))


def _category(text: str) -> Optional[Category]:
    return Category(text) if text else None


def read_alignment_rows(store: ArtifactStore) -> List[AlignmentRow]:
    """Чтение alignment.csv"""
    rows: List[AlignmentRow] = []
    for row in store.read_csv(ALIGNMENT_FILE):
        category = _category(row["category"])
        aligned = row["status"] == ChangeStatus.ALIGNED.value
        rows.append(AlignmentRow(
            category=category,
            repo_url=row["repo_url"],
            change_id=row["change_id"],
            via=row["via"],
            status=row["status"],
            ratios=ChangeRatios(
                category=category,
                matched_pre=int(row["matched_pre"]) if aligned else 0,
                eligible_pre=int(row["eligible_pre"]) if aligned else 0,
                matched_post=int(row["matched_post"]) if aligned else 0,
                eligible_post=int(row["eligible_post"]) if aligned else 0,
            ),
        ))
    return rows


def read_line_labels(store: ArtifactStore) -> List[LineLabel]:
    """Чтение lines.csv"""
    return [
        LineLabel(
            category=_category(row["category"]),
            repo_url=row["repo_url"],
            change_id=row["change_id"],
            via=row["via"],
            head_commit=row["head_commit"],
            file_path=row["file_path"],
            line_no=int(row["line_no"]),
            influenced=parse_bool(row["influenced"]),
        )
        for row in store.read_csv(LINES_FILE)
    ]


def read_repositories(store: ArtifactStore) -> List[RepositoryStats]:
    """Чтение repositories.csv"""
    repositories: List[RepositoryStats] = []
    for row in store.read_csv(REPOSITORIES_FILE):
        metrics: List[Tuple[str, float]] = []
        for item in filter(None, row["metrics"].split(";")):
            name, _, value = item.partition("=")
            metrics.append((name, float(value)))
        repositories.append(RepositoryStats(
            repo_url=row["repo_url"],
            main_branch=row["main_branch"],
            tip_commit=row["tip_commit"],
            commit_count=int(row["commit_count"]),
            author_count=int(row["author_count"]),
            age_days=float(row["age_days"]),
            extra=tuple(metrics),
        ))
    return repositories


def progress_enabled() -> bool:
    """Полосы прогресса только в терминале"""
    return sys.stderr.isatty()


class AlignmentService:
    """Сервис стадии align"""

    def __init__(self, config: PipelineConfig, store: Optional[ArtifactStore] = None,
                 cache: Optional[CloneCache] = None):
        self.config = config
        self.store = store or ArtifactStore(config.output_dir)
        self.cache = cache or CloneCache(config.clone_cache_dir, refresh=config.refresh_clones)

    def run(self, records: Optional[List[ChangeRecord]] = None) -> AlignmentRun:
        """Сопоставление всех записей и запись alignment.csv, lines.csv, repositories.csv"""
        if records is None:
            records = load_records(self.store)

        live = [record for record in records if record.is_live]
        repositories = self.prepare_repositories(sorted({record.repo_url for record in live}))

        run = AlignmentRun()
        with ThreadPoolExecutor(max_workers=self.config.parallelism) as executor:
            aligned = executor.map(lambda record: self.align_record(record, repositories), live)
            by_record = dict(zip(
                (id(record) for record in live),
                tqdm(aligned, total=len(live), desc="align", unit="change", disable=not progress_enabled()),
            ))

        for record in records:
            if record.is_live:
                run.outcomes.extend(by_record[id(record)])
            else:
                status = (
                    ChangeStatus.MALFORMED if record.status == RecordStatus.MALFORMED
                    else ChangeStatus.EXPIRED_LINK
                )
                run.outcomes.append(ChangeOutcome(record, status, record.diagnostic or "conversation unavailable"))

        run.repositories = self.collect_repository_stats(records, repositories)
        self._write(run)

        counts: Dict[str, int] = {status.value: 0 for status in ChangeStatus}
        for outcome in run.outcomes:
            counts[outcome.status.value] += 1
        run.result.counts = counts
        run.result.skipped = sum(
            1 for outcome in run.outcomes
            if outcome.record.is_live and outcome.status != ChangeStatus.ALIGNED
        )
        run.result.files = [ALIGNMENT_FILE, LINES_FILE, REPOSITORIES_FILE]
        logger.info(
            f"Aligned {counts[ChangeStatus.ALIGNED.value]} changes, skipped {run.result.skipped}"
        )
        return run

    # ------------------------------------------------------------------
    # Репозитории

    def prepare_repositories(self, urls: Sequence[str]) -> Dict[str, RepositoryContext]:
        """Клонирование при необходимости и выбор основной ветки"""
        contexts: Dict[str, RepositoryContext] = {}
        for url in tqdm(urls, desc="clone", unit="repo", disable=not progress_enabled()):
            context = RepositoryContext(repo_url=url)
            try:
                clone_dir = self.cache.ensure_clone(url)
            except GitCommandError as e:
                logger.warning(f"Cannot clone {url}: {e}")
                context.error = str(e)
                contexts[url] = context
                continue

            bridge = GitBridge(clone_dir, repo_url=url)
            context.bridge = bridge
            context.main_branch = bridge.resolve_main_branch(self.config.main_branch_override)
            context.tip_commit = bridge.rev_parse(context.main_branch) or ""
            contexts[url] = context
        return contexts

    def collect_repository_stats(self, records: Sequence[ChangeRecord],
                                 repositories: Dict[str, RepositoryContext]) -> List[RepositoryStats]:
        """Характеристики клонов вместе с заранее полученными метриками"""
        metrics: Dict[str, Tuple[Tuple[str, float], ...]] = {}
        for record in records:
            if record.metadata.repository and record.repo_url not in metrics:
                metrics[record.repo_url] = record.metadata.repository

        stats: List[RepositoryStats] = []
        for url in sorted(repositories):
            context = repositories[url]
            if context.bridge is None:
                continue
            try:
                stats.append(context.bridge.repository_stats(context.main_branch, metrics.get(url, ())))
            except GitCommandError as e:
                logger.warning(f"Cannot collect statistics of {url}: {e}")
        return stats

    # ------------------------------------------------------------------
    # Изменения

    def align_record(self, record: ChangeRecord,
                     repositories: Dict[str, RepositoryContext]) -> List[ChangeOutcome]:
        """Сопоставление записи; для issue по каждой закрывающей ссылке"""
        context = repositories[record.repo_url]
        if context.bridge is None:
            return [ChangeOutcome(record, ChangeStatus.CLONE_FAILED, context.error)]

        if record.category == Category.ISSUE:
            links = record.metadata.closed_by
            if not links:
                logger.warning(f"Issue {record.change_id} has no closing change")
                return [ChangeOutcome(record, ChangeStatus.CHANGE_UNRESOLVABLE, "no closing change")]
            if len(links) > 1:
                logger.warning(f"Issue {record.change_id} is closed by {len(links)} changes; analyzing all")
            return [self.align_change(record, context, link) for link in links]

        return [self.align_change(record, context)]

    def align_change(self, record: ChangeRecord, context: RepositoryContext,
                     link: Optional[ChangeLink] = None) -> ChangeOutcome:
        """Разрешение, проверка слияния, diff и сопоставление одного изменения"""
        bridge = context.bridge
        if bridge is None:
            return ChangeOutcome(record, ChangeStatus.CLONE_FAILED, context.error, link=link)
        outcome = ChangeOutcome(record, ChangeStatus.ALIGNED, link=link)
        try:
            change = bridge.resolve_change(record, link, context.main_branch)
            outcome.change = change
            if not bridge.is_merged(change, context.main_branch):
                logger.warning(f"{change.label} is not merged into {context.main_branch}")
                outcome.status, outcome.reason = ChangeStatus.NOT_MERGED, f"not merged into {context.main_branch}"
                return outcome

            image = bridge.extract_hunks(change, self.config.diff_context)
            outcome.alignment = influence_ratios(
                change, image.hunks, self.config.threshold, self.config.normalize_whitespace
            )
        except ChangeUnresolvableError as e:
            logger.warning(f"Cannot resolve {record.change_id}: {e}")
            outcome.status, outcome.reason = ChangeStatus.CHANGE_UNRESOLVABLE, str(e)
        except GitCommandError as e:
            logger.warning(f"git failed for {record.change_id}: {e}")
            outcome.status, outcome.reason = ChangeStatus.GIT_ERROR, str(e)
        except Exception as e:
            if getattr(e, "fatal", False):
                raise
            logger.error(f"Unexpected failure on {record.change_id}: {e}", exc_info=True)
            outcome.status, outcome.reason = ChangeStatus.FAILED, str(e)
        return outcome

    # ------------------------------------------------------------------
    # Запись

    def _write(self, run: AlignmentRun) -> None:
        self.store.write_csv(ALIGNMENT_FILE, ALIGNMENT_HEADER, [_alignment_row(o) for o in run.outcomes])
        self.store.write_csv(LINES_FILE, LINES_HEADER, [
            row for outcome in run.outcomes for row in _line_rows(outcome)
        ])
        self.store.write_csv(REPOSITORIES_FILE, REPOSITORIES_HEADER, [
            (
                stats.repo_url, stats.main_branch, stats.tip_commit, stats.commit_count,
                stats.author_count, stats.age_days,
                ";".join(f"{name}={format_value(float(value))}" for name, value in stats.extra),
            )
            for stats in run.repositories
        ])


def _alignment_row(outcome: ChangeOutcome) -> Tuple:
    record, change, alignment = outcome.record, outcome.change, outcome.alignment
    head = (
        outcome.via,
        outcome.status,
        outcome.reason,
        change.ambiguous if change else None,
        change.base_commit if change else None,
        change.head_commit if change else None,
    )
    if alignment is None:
        ratios: Tuple = (None,) * 10
    else:
        r = alignment.ratios
        ratios = (
            r.matched_pre, r.eligible_pre, r.rho_pre, r.bin_pre, r.degenerate_pre,
            r.matched_post, r.eligible_post, r.rho_post, r.bin_post, r.degenerate_post,
        )
    return (record.category, record.repo_url, record.change_id) + head + ratios


def _line_rows(outcome: ChangeOutcome) -> List[Tuple]:
    alignment = outcome.alignment
    if alignment is None:
        return []
    record = outcome.record

    rows = []
    for hunk in alignment.hunks:
        matches = {match.hunk_line.line_no: match for match in hunk.post_matches}
        segment = str(hunk.post_segment.ref) if hunk.post_segment else None
        for line in hunk.post_lines:
            if line.kind != LineKind.ADDED:
                continue
            match = matches.get(line.line_no)
            rows.append((
                record.category, record.repo_url, record.change_id, outcome.via,
                alignment.change.head_commit, hunk.file_path, line.line_no,
                match is not None, match.score if match else None,
                segment if match else None,
            ))
    return sorted(rows, key=lambda row: (row[5], row[6]))
