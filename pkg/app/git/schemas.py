"""
Python схемы (dataclasses) для данных из git
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from app.dataset.schemas import ChangeLink, ChangeRecord


EMPTY_TREE_SHA = "4b825dc642cb6eb9a060e54bf8d69288fbee4904"


class LineKind(Enum):
    """Тип строки фрагмента diff"""
    CONTEXT = "CONTEXT"
    REMOVED = "REMOVED"
    ADDED = "ADDED"


@dataclass(frozen=True)
class ResolvedChange:
    """Изменение, разрешенное в пару коммитов"""
    record: ChangeRecord
    base_commit: str
    head_commit: str
    merged: bool = False
    via: Optional[ChangeLink] = None
    ambiguous: bool = False

    @property
    def label(self) -> str:
        """Описание для журналов и таблиц"""
        if self.via is None:
            return self.record.change_id
        return f"{self.record.change_id}->{self.via.category.value}:{self.via.change_id}"


@dataclass(frozen=True)
class HunkLine:
    """Строка одной из сторон фрагмента"""
    line_no: int
    content: str
    kind: LineKind


@dataclass
class HunkImage:
    """Фрагмент diff: пред- и пост-образ с номерами строк"""
    file_path: str
    pre_start: int
    pre_count: int
    post_start: int
    post_count: int
    pre_lines: List[HunkLine] = field(default_factory=list)
    post_lines: List[HunkLine] = field(default_factory=list)

    @property
    def added_lines(self) -> List[HunkLine]:
        """Добавленные строки пост-образа"""
        return [line for line in self.post_lines if line.kind == LineKind.ADDED]

    @property
    def removed_lines(self) -> List[HunkLine]:
        """Удаленные строки пред-образа"""
        return [line for line in self.pre_lines if line.kind == LineKind.REMOVED]


@dataclass
class DiffImage:
    """Результат разбора diff"""
    hunks: List[HunkImage] = field(default_factory=list)
    binary_files: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class BlameEntry:
    """Строка вывода git blame --porcelain"""
    commit: str
    orig_line: int
    final_line: int
    committer_time: int
    filename: str
    content: str
    boundary: bool = False


@dataclass(frozen=True)
class LineFate:
    """Судьба строки: рождение, смерть или цензурирование"""
    file_path: str
    line_no: int
    birth_commit: str
    birth_time: int
    censored: bool
    content: str
    tip_time: int
    death_commit: Optional[str] = None
    death_time: Optional[int] = None

    def __post_init__(self) -> None:
        if self.censored == (self.death_time is not None):
            raise ValueError("LineFate must be either censored or have a death_time")


@dataclass(frozen=True)
class RepositoryStats:
    """Характеристики репозитория по клону"""
    repo_url: str
    main_branch: str
    tip_commit: str
    commit_count: int
    author_count: int
    age_days: float
    extra: Tuple[Tuple[str, float], ...] = ()
