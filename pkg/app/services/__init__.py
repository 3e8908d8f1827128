"""
Services package: стадии конвейера
"""

from .artifacts import ArtifactStore, StageResult
from .ingest_service import IngestService
from .alignment_service import AlignmentService, ChangeStatus
from .survival_service import SurvivalService
from .stats_service import StatsService

__all__ = [
    "ArtifactStore",
    "StageResult",
    "IngestService",
    "AlignmentService",
    "ChangeStatus",
    "SurvivalService",
    "StatsService",
]
