"""
Сервис загрузки набора данных
"""

import logging
from typing import List, Optional, Tuple

from app.config import PipelineConfig
from app.dataset.loader import (
    IngestReport, dataset_document, dump_document, load_dataset, load_dataset_with_report
)
from app.dataset.schemas import ChangeRecord, RecordStatus
from .artifacts import ArtifactStore, StageResult

logger = logging.getLogger(__name__)

RECORDS_FILE = "records.json"
INGEST_FILE = "ingest.csv"

INGEST_HEADER = (
    "category", "repo_url", "change_id", "status", "conversations", "prompts", "diagnostic",
)


def sort_records(records: List[ChangeRecord]) -> List[ChangeRecord]:
    """Порядок (category, repo_url, change_id)"""
    return sorted(records, key=lambda record: record.key)


def load_records(store: ArtifactStore) -> List[ChangeRecord]:
    """Нормализованные записи, сохраненные стадией ingest"""
    return load_dataset(store.require(RECORDS_FILE))


class IngestService:
    """Сервис стадии ingest"""

    def __init__(self, config: PipelineConfig, store: Optional[ArtifactStore] = None):
        self.config = config
        self.store = store or ArtifactStore(config.output_dir)

    def run(self) -> Tuple[List[ChangeRecord], IngestReport, StageResult]:
        """Загрузка, проверка и запись нормализованных записей"""
        records, report = load_dataset_with_report(self.config.dataset_path)
        records = sort_records(records)

        self.store.write_text(RECORDS_FILE, dump_document(dataset_document(records)))
        self.store.write_csv(INGEST_FILE, INGEST_HEADER, [
            (
                record.category,
                record.repo_url,
                record.change_id,
                record.status,
                len(record.conversations),
                sum(conversation.prompt_count for conversation in record.conversations),
                record.diagnostic,
            )
            for record in records
        ])

        result = StageResult(
            stage="ingest",
            counts={status.value: report.count(status) for status in RecordStatus},
            skipped=report.count(RecordStatus.MALFORMED),
            files=[RECORDS_FILE, INGEST_FILE],
        )
        logger.info(f"Ingested {report.total} records: {result.counts}")
        return records, report, result
