"""
Git package для работы с клонами репозиториев
"""

from .schemas import (
    LineKind, ResolvedChange, HunkLine, HunkImage, DiffImage, BlameEntry,
    LineFate, RepositoryStats
)
from .runner import GitRunner
from .cache import CloneCache
from .bridge import GitBridge

__all__ = [
    "LineKind",
    "ResolvedChange",
    "HunkLine",
    "HunkImage",
    "DiffImage",
    "BlameEntry",
    "LineFate",
    "RepositoryStats",
    "GitRunner",
    "CloneCache",
    "GitBridge",
]
