"""
Dataset package для работы с набором данных переписок
"""

from .schemas import (
    Category, RecordStatus, ChangeRecord, Conversation, Turn, CodeListing,
    ChangeLink, ChangeMetadata
)
from .loader import (
    IngestReport, load_dataset, load_dataset_with_report, filter_live,
    export_dataset, token_count
)

__all__ = [
    "Category",
    "RecordStatus",
    "ChangeRecord",
    "Conversation",
    "Turn",
    "CodeListing",
    "ChangeLink",
    "ChangeMetadata",
    "IngestReport",
    "load_dataset",
    "load_dataset_with_report",
    "filter_live",
    "export_dataset",
    "token_count",
]
