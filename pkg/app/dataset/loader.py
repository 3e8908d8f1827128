"""
Загрузка, проверка и экспорт набора данных
"""

import hashlib
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

from pydantic import ValidationError

from app.exceptions import DatasetError, SchemaVersionError
from .models import SCHEMA_VERSION, DatasetModel, EntryModel
from .schemas import (
    Category, ChangeLink, ChangeMetadata, ChangeRecord, CodeListing,
    Conversation, RecordStatus, Turn
)

logger = logging.getLogger(__name__)


@dataclass
class IngestReport:
    """Итоги загрузки набора данных"""
    counts: Dict[RecordStatus, int] = field(default_factory=dict)
    diagnostics: List[Tuple[int, str]] = field(default_factory=list)

    @property
    def total(self) -> int:
        """Всего записей"""
        return sum(self.counts.values())

    def count(self, status: RecordStatus) -> int:
        """Количество записей с заданным статусом"""
        return self.counts.get(status, 0)


def token_count(text: str) -> int:
    """Количество токенов, разделенных пробельными символами"""
    return len(text.split())


def load_dataset(path: Path) -> List[ChangeRecord]:
    """Загрузка набора данных, по одной записи на каждый элемент entries"""
    records, _ = load_dataset_with_report(path)
    return records


def load_dataset_with_report(path: Path) -> Tuple[List[ChangeRecord], IngestReport]:
    """Загрузка набора данных вместе с отчетом о статусах"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = json.load(f)
    except OSError as e:
        raise DatasetError(f"Cannot read dataset {path}: {e}") from e
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise DatasetError(f"Dataset {path} is not valid JSON: {e}") from e

    if not isinstance(document, dict):
        raise DatasetError(f"Dataset {path} must contain a JSON object")

    found = document.get("schema_version")
    if found != SCHEMA_VERSION:
        raise SchemaVersionError(SCHEMA_VERSION, found)

    try:
        dataset = DatasetModel.model_validate(document)
    except ValidationError as e:
        raise DatasetError(f"Dataset {path} has an invalid layout: {_describe(e)}") from e

    records = [parse_entry(entry) for entry in dataset.entries]

    report = IngestReport(counts=Counter(record.status for record in records))
    for index, record in enumerate(records):
        if record.diagnostic:
            report.diagnostics.append((index, record.diagnostic))
            logger.warning(f"Entry {index} is malformed: {record.diagnostic}")

    logger.info(
        f"Loaded {len(records)} records from {path}: "
        + ", ".join(f"{status.value}={report.count(status)}" for status in RecordStatus)
    )
    return records, report


def parse_entry(entry: Any) -> ChangeRecord:
    """Преобразование одного элемента entries в запись"""
    try:
        model = EntryModel.model_validate(entry)
    except ValidationError as e:
        return _malformed(entry, _describe(e))

    metadata = _metadata(model)
    category = Category(model.category)

    if model.conversations is None:
        return ChangeRecord(
            category=category,
            repo_url=model.repo_url,
            change_id=model.change_id,
            status=RecordStatus.EXPIRED_LINK,
            metadata=metadata,
        )

    conversations = tuple(
        Conversation(
            conversation_id=conversation.conversation_id,
            turns=tuple(
                Turn(
                    prompt_text=turn.prompt,
                    answer_text=turn.answer,
                    listings=tuple(
                        CodeListing(content=listing.content, language_hint=listing.language)
                        for listing in turn.listings
                    ),
                )
                for turn in conversation.turns
            ),
        )
        for conversation in model.conversations
    )

    # Переписки без единой пары считаются утраченными
    has_turns = any(conversation.turns for conversation in conversations)
    return ChangeRecord(
        category=category,
        repo_url=model.repo_url,
        change_id=model.change_id,
        conversations=conversations,
        status=RecordStatus.LIVE if has_turns else RecordStatus.EXPIRED_LINK,
        metadata=metadata,
    )


def filter_live(records: Iterable[ChangeRecord]) -> List[ChangeRecord]:
    """Только записи со статусом LIVE, порядок сохраняется"""
    return [record for record in records if record.status == RecordStatus.LIVE]


def export_dataset(records: Iterable[ChangeRecord], path: Path) -> None:
    """Запись набора данных в схеме версии "1" """
    document = dataset_document(records)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_document(document))


def dataset_document(records: Iterable[ChangeRecord]) -> Dict[str, Any]:
    """Документ набора данных для записи"""
    return {
        "schema_version": SCHEMA_VERSION,
        "entries": [record_to_entry(record) for record in records],
    }


def dump_document(document: Dict[str, Any]) -> str:
    """Детерминированная сериализация JSON"""
    return json.dumps(document, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def record_to_entry(record: ChangeRecord) -> Any:
    """Обратное преобразование записи в элемент entries"""
    if record.status == RecordStatus.MALFORMED:
        return record.raw

    entry: Dict[str, Any] = {
        "category": record.category.value if record.category else None,
        "repo_url": record.repo_url,
        "change_id": record.change_id,
        "conversations": None,
    }
    if record.status == RecordStatus.LIVE or record.conversations:
        entry["conversations"] = [
            {
                "conversation_id": conversation.conversation_id,
                "turns": [
                    {
                        "prompt": turn.prompt_text,
                        "answer": turn.answer_text,
                        "listings": [
                            {"language": listing.language_hint, "content": listing.content}
                            for listing in turn.listings
                        ],
                    }
                    for turn in conversation.turns
                ],
            }
            for conversation in record.conversations
        ]

    if not record.metadata.is_empty:
        meta = record.metadata
        entry["metadata"] = {
            "merged": meta.merged,
            "head_commit": meta.head_commit,
            "base_commit": meta.base_commit,
            "target_branch": meta.target_branch,
            "closed_by": [
                {"category": link.category.value, "change_id": link.change_id}
                for link in meta.closed_by
            ],
            "repository": dict(meta.repository),
        }
    return entry


def _metadata(model: EntryModel) -> ChangeMetadata:
    if model.metadata is None:
        return ChangeMetadata()
    meta = model.metadata
    return ChangeMetadata(
        merged=meta.merged,
        head_commit=meta.head_commit,
        base_commit=meta.base_commit,
        target_branch=meta.target_branch,
        closed_by=tuple(
            ChangeLink(category=Category(link.category), change_id=link.change_id)
            for link in meta.closed_by
        ),
        repository=tuple(sorted(meta.repository.items())),
    )


def malformed_entry_id(entry: Any) -> str:
    """Идентификатор записи без change_id по ее содержимому, не по позиции"""
    canonical = json.dumps(entry, ensure_ascii=False, sort_keys=True)
    return "entry-" + hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


def _malformed(entry: Any, diagnostic: str) -> ChangeRecord:
    category: Optional[Category] = None
    repo_url = ""
    change_id = malformed_entry_id(entry)
    if isinstance(entry, dict):
        try:
            category = Category(entry.get("category"))
        except ValueError:
            category = None
        if isinstance(entry.get("repo_url"), str):
            repo_url = entry["repo_url"]
        if isinstance(entry.get("change_id"), str) and entry["change_id"]:
            change_id = entry["change_id"]

    return ChangeRecord(
        category=category,
        repo_url=repo_url,
        change_id=change_id,
        status=RecordStatus.MALFORMED,
        diagnostic=diagnostic,
        raw=entry,
    )


def _describe(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<entry>"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)
