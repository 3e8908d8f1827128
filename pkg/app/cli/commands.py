"""
Команды конвейера: ingest, clone, align, survive, stats, run
"""

import logging
from datetime import datetime, timezone
from typing import Callable, Dict

from app.config import PipelineConfig
from app.exceptions import GitCommandError
from app.git.cache import CloneCache
from app.services import (
    AlignmentService, ArtifactStore, IngestService, StageResult, StatsService, SurvivalService
)
from app.services.ingest_service import load_records

logger = logging.getLogger(__name__)

Command = Callable[[PipelineConfig], StageResult]


def _finish(config: PipelineConfig, store: ArtifactStore, result: StageResult,
            started_at: datetime) -> StageResult:
    store.write_manifest()
    store.write_run_metadata(result, config.as_dict(), started_at)
    logger.info(f"Stage {result.stage} finished with exit code {result.exit_code}")
    return result


def cmd_ingest(config: PipelineConfig) -> StageResult:
    """Загрузка и проверка набора данных"""
    started_at = datetime.now(timezone.utc)
    store = ArtifactStore(config.output_dir)
    _, _, result = IngestService(config, store).run()
    return _finish(config, store, result, started_at)


def cmd_clone(config: PipelineConfig) -> StageResult:
    """Клонирование репозиториев живых записей в кэш"""
    started_at = datetime.now(timezone.utc)
    store = ArtifactStore(config.output_dir)
    records = load_records(store)
    cache = CloneCache(config.clone_cache_dir, refresh=config.refresh_clones)

    result = StageResult(stage="clone")
    urls = sorted({record.repo_url for record in records if record.is_live})
    cloned = 0
    for url in urls:
        try:
            cache.ensure_clone(url)
            cloned += 1
        except GitCommandError as e:
            logger.warning(f"Cannot clone {url}: {e}")
            result.skipped += 1
    result.counts = {"repositories": len(urls), "cloned": cloned, "failed": result.skipped}
    return _finish(config, store, result, started_at)


def cmd_align(config: PipelineConfig) -> StageResult:
    """Сопоставление изменений с перепиской"""
    started_at = datetime.now(timezone.utc)
    store = ArtifactStore(config.output_dir)
    run = AlignmentService(config, store).run()
    return _finish(config, store, run.result, started_at)


def cmd_survive(config: PipelineConfig) -> StageResult:
    """Анализ выживаемости добавленных строк"""
    started_at = datetime.now(timezone.utc)
    store = ArtifactStore(config.output_dir)
    run = SurvivalService(config, store).run()
    return _finish(config, store, run.result, started_at)


def cmd_stats(config: PipelineConfig) -> StageResult:
    """Сводные таблицы и критерии Колмогорова-Смирнова"""
    started_at = datetime.now(timezone.utc)
    store = ArtifactStore(config.output_dir)
    run = StatsService(config, store).run()
    return _finish(config, store, run.result, started_at)


def cmd_run(config: PipelineConfig) -> StageResult:
    """Все стадии подряд"""
    started_at = datetime.now(timezone.utc)
    store = ArtifactStore(config.output_dir)
    total = StageResult(stage="run")
    for name, command in PIPELINE.items():
        result = command(config)
        total.skipped += result.skipped
        total.files.extend(result.files)
        total.counts.update({f"{name}.{key}": value for key, value in result.counts.items()})
    return _finish(config, store, total, started_at)


PIPELINE: Dict[str, Command] = {
    "ingest": cmd_ingest,
    "clone": cmd_clone,
    "align": cmd_align,
    "survive": cmd_survive,
    "stats": cmd_stats,
}

COMMANDS: Dict[str, Command] = {**PIPELINE, "run": cmd_run}
