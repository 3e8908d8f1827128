"""
Python схемы (dataclasses) для записей набора данных
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple


class Category(Enum):
    """Тип изменения"""
    COMMIT = "commit"
    PULL_REQUEST = "pull_request"
    ISSUE = "issue"


class RecordStatus(Enum):
    """Статус записи набора данных"""
    LIVE = "LIVE"
    EXPIRED_LINK = "EXPIRED_LINK"
    MALFORMED = "MALFORMED"


@dataclass(frozen=True)
class CodeListing:
    """Листинг кода из переписки"""
    content: str
    language_hint: Optional[str] = None


@dataclass(frozen=True)
class Turn:
    """Пара запрос/ответ"""
    prompt_text: str = ""
    answer_text: str = ""
    listings: Tuple[CodeListing, ...] = ()


@dataclass(frozen=True)
class Conversation:
    """Переписка с ChatGPT"""
    conversation_id: str
    turns: Tuple[Turn, ...] = ()

    @property
    def prompt_count(self) -> int:
        """Количество запросов в переписке"""
        return sum(1 for turn in self.turns if turn.prompt_text.strip())


@dataclass(frozen=True)
class ChangeLink:
    """Ссылка issue на закрывающий коммит или pull request"""
    category: Category
    change_id: str


@dataclass(frozen=True)
class ChangeMetadata:
    """Дополнительные сведения об изменении, полученные заранее"""
    merged: Optional[bool] = None
    head_commit: Optional[str] = None
    base_commit: Optional[str] = None
    target_branch: Optional[str] = None
    closed_by: Tuple[ChangeLink, ...] = ()
    repository: Tuple[Tuple[str, float], ...] = ()

    @property
    def is_empty(self) -> bool:
        """Нет ни одного заполненного поля"""
        return self == ChangeMetadata()


@dataclass(frozen=True)
class ChangeRecord:
    """Запись набора данных: изменение и связанные переписки"""
    category: Optional[Category]
    repo_url: str
    change_id: str
    conversations: Tuple[Conversation, ...] = ()
    status: RecordStatus = RecordStatus.LIVE
    metadata: ChangeMetadata = field(default_factory=ChangeMetadata)
    diagnostic: Optional[str] = None
    raw: Optional[Dict[str, Any]] = field(default=None, compare=False, hash=False)

    @property
    def key(self) -> Tuple[str, str, str]:
        """Ключ сортировки (category, repo_url, change_id)"""
        category = self.category.value if self.category else ""
        return (category, self.repo_url, self.change_id)

    @property
    def is_live(self) -> bool:
        """Запись пригодна для анализа"""
        return self.status == RecordStatus.LIVE

    @property
    def turns(self) -> List[Turn]:
        """Все пары запрос/ответ во всех переписках"""
        return [turn for conversation in self.conversations for turn in conversation.turns]
