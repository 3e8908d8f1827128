"""
Сервис анализа выживаемости строк
"""

import logging
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from tqdm import tqdm

from app.analysis.survival import (
    DurationSample, build_samples, curve_points, kaplan_meier, median_survival, split_cohorts
)
from app.config import PipelineConfig
from app.dataset.schemas import Category
from app.exceptions import FileNotAtRevisionError, GitCommandError
from app.git.bridge import GitBridge
from app.git.cache import CloneCache
from app.git.schemas import LineFate
from .alignment_service import LineLabel, progress_enabled, read_line_labels, read_repositories
from .artifacts import ArtifactStore, StageResult, parse_bool

logger = logging.getLogger(__name__)

DURATIONS_FILE = "durations.csv"
SURVIVAL_FILE = "survival.csv"
CURVES_DIR = "curves"

DURATIONS_HEADER = (
    "category", "repo_url", "change_id", "via", "file_path", "line_no", "influenced",
    "event", "duration_days", "duration_seconds", "clamped", "birth_commit", "death_commit",
)
SURVIVAL_HEADER = ("cohort", "samples", "events", "censored", "median_days")

GroupKey = Tuple[str, str, str, str, str]


@dataclass
class FileGroup:
    """Строки одного файла одного изменения"""
    repo_url: str
    change_id: str
    via: str
    head_commit: str
    file_path: str
    labels: List[LineLabel] = field(default_factory=list)


@dataclass
class GroupOutcome:
    """Судьбы строк файла или причина пропуска"""
    group: FileGroup
    fates: List[LineFate] = field(default_factory=list)
    samples: List[DurationSample] = field(default_factory=list)
    unresolved: int = 0


@dataclass
class SurvivalRun:
    """Результаты стадии survive"""
    samples: List[DurationSample] = field(default_factory=list)
    result: StageResult = field(default_factory=lambda: StageResult(stage="survive"))


def read_durations(store: ArtifactStore) -> List[DurationSample]:
    """Чтение durations.csv"""
    return [
        DurationSample(
            duration=float(row["duration_days"]),
            event=parse_bool(row["event"]),
            influenced=parse_bool(row["influenced"]),
            category=Category(row["category"]) if row["category"] else None,
            clamped=parse_bool(row["clamped"]),
            file_path=row["file_path"],
            line_no=int(row["line_no"]),
            change_id=row["change_id"],
        )
        for row in store.read_csv(DURATIONS_FILE)
    ]


def group_labels(labels: List[LineLabel]) -> List[FileGroup]:
    """Группировка строк по (репозиторий, изменение, ссылка, head, файл)"""
    groups: "OrderedDict[GroupKey, FileGroup]" = OrderedDict()
    for label in labels:
        key = (label.repo_url, label.change_id, label.via, label.head_commit, label.file_path)
        if key not in groups:
            groups[key] = FileGroup(*key)
        groups[key].labels.append(label)
    return list(groups.values())


class SurvivalService:
    """Сервис стадии survive"""

    def __init__(self, config: PipelineConfig, store: Optional[ArtifactStore] = None,
                 cache: Optional[CloneCache] = None):
        self.config = config
        self.store = store or ArtifactStore(config.output_dir)
        self.cache = cache or CloneCache(config.clone_cache_dir)

    def run(self) -> SurvivalRun:
        """Обратный blame для добавленных строк, длительности и кривые по когортам"""
        labels = read_line_labels(self.store)
        tips = {stats.repo_url: stats.tip_commit for stats in read_repositories(self.store)}
        groups = group_labels(labels)

        bridges: Dict[str, Optional[GitBridge]] = {}
        for url in sorted({group.repo_url for group in groups}):
            try:
                bridges[url] = GitBridge(self.cache.ensure_clone(url), repo_url=url)
            except GitCommandError as e:
                logger.warning(f"Cannot open clone of {url}: {e}")
                bridges[url] = None

        with ThreadPoolExecutor(max_workers=self.config.parallelism) as executor:
            outcomes = list(tqdm(
                executor.map(lambda group: self.track_group(group, bridges, tips), groups),
                total=len(groups), desc="survive", unit="file", disable=not progress_enabled(),
            ))

        run = SurvivalRun()
        rows = []
        for outcome in outcomes:
            run.samples.extend(outcome.samples)
            run.result.skipped += outcome.unresolved
            rows.extend(_duration_rows(outcome))
        self.store.write_csv(DURATIONS_FILE, DURATIONS_HEADER, rows)

        cohort_rows = self.write_curves(run.samples)
        self.store.write_csv(SURVIVAL_FILE, SURVIVAL_HEADER, cohort_rows)

        events = sum(1 for sample in run.samples if sample.event)
        run.result.counts = {
            "lines": len(run.samples),
            "events": events,
            "censored": len(run.samples) - events,
            "clamped": sum(1 for sample in run.samples if sample.clamped),
            "unresolved": run.result.skipped,
        }
        run.result.files = [DURATIONS_FILE, SURVIVAL_FILE] + [
            f"{CURVES_DIR}/{row[0]}.json" for row in cohort_rows
        ]
        logger.info(f"Tracked {len(run.samples)} lines: {run.result.counts}")
        return run

    def track_group(self, group: FileGroup, bridges: Dict[str, Optional[GitBridge]],
                    tips: Dict[str, str]) -> GroupOutcome:
        """Судьбы строк одного файла; ошибки делают строки UNRESOLVED"""
        outcome = GroupOutcome(group)
        bridge = bridges.get(group.repo_url)
        tip = tips.get(group.repo_url)
        if bridge is None or not tip:
            logger.warning(f"{group.repo_url}: no clone or tip, {len(group.labels)} lines unresolved")
            outcome.unresolved = len(group.labels)
            return outcome

        line_numbers = [label.line_no for label in group.labels]
        try:
            fates = bridge.reverse_blame(group.head_commit, group.file_path, line_numbers, tip)
        except (FileNotAtRevisionError, GitCommandError) as e:
            logger.warning(f"{group.change_id} {group.file_path}: {e}")
            outcome.unresolved = len(group.labels)
            return outcome

        labels = {(label.file_path, label.line_no): (label.influenced, label.category) for label in group.labels}
        outcome.fates = fates
        outcome.samples = build_samples(fates, labels, change_id=group.change_id)
        outcome.unresolved = len(group.labels) - len(fates)
        return outcome

    def write_curves(self, samples: List[DurationSample]) -> List[Tuple]:
        """curves/<когорта>.json и строки survival.csv"""
        self.store.remove_tree(CURVES_DIR)
        rows: List[Tuple] = []
        for cohort, members in split_cohorts(samples).items():
            if not members:
                logger.warning(f"Cohort {cohort.name} is empty")
                self.store.write_json(f"{CURVES_DIR}/{cohort.name}.json", {"cohort": cohort.name, "points": []})
                rows.append((cohort.name, 0, 0, 0, None))
                continue

            curve = kaplan_meier(members)
            points = [[t, s] for t, s in curve_points(curve)]
            self.store.write_json(f"{CURVES_DIR}/{cohort.name}.json", {"cohort": cohort.name, "points": points})
            rows.append((cohort.name, curve.samples, curve.event_count, curve.censored, median_survival(curve)))
        return rows


def _duration_rows(outcome: GroupOutcome) -> List[Tuple]:
    group = outcome.group
    categories = {label.line_no: label.category for label in group.labels}
    rows = []
    for fate, sample in zip(outcome.fates, outcome.samples):
        end = fate.tip_time if fate.death_time is None else fate.death_time
        rows.append((
            categories.get(fate.line_no), group.repo_url, group.change_id, group.via,
            fate.file_path, fate.line_no, sample.influenced, sample.event,
            sample.duration, max(end - fate.birth_time, 0), sample.clamped,
            fate.birth_commit, fate.death_commit,
        ))
    return rows
