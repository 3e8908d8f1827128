"""
Pydantic модели входной схемы набора данных (версия "1")
"""

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


SCHEMA_VERSION = "1"


class ListingModel(BaseModel):
    """Листинг кода"""
    model_config = ConfigDict(extra="forbid")

    language: Optional[str] = None
    content: str = Field(min_length=1)


class TurnModel(BaseModel):
    """Пара запрос/ответ"""
    model_config = ConfigDict(extra="forbid")

    prompt: str = ""
    answer: str = ""
    listings: List[ListingModel] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_not_empty(self) -> "TurnModel":
        if not self.prompt and not self.answer:
            raise ValueError("turn must have a prompt or an answer")
        return self


class ConversationModel(BaseModel):
    """Переписка"""
    model_config = ConfigDict(extra="forbid")

    conversation_id: str
    turns: List[TurnModel] = Field(default_factory=list)


class LinkModel(BaseModel):
    """Ссылка на закрывающее изменение"""
    model_config = ConfigDict(extra="forbid")

    category: Literal["commit", "pull_request"]
    change_id: str = Field(min_length=1)


class MetadataModel(BaseModel):
    """Дополнительные сведения об изменении"""
    model_config = ConfigDict(extra="forbid")

    merged: Optional[bool] = None
    head_commit: Optional[str] = None
    base_commit: Optional[str] = None
    target_branch: Optional[str] = None
    closed_by: List[LinkModel] = Field(default_factory=list)
    repository: Dict[str, float] = Field(default_factory=dict)


class EntryModel(BaseModel):
    """Запись набора данных"""
    model_config = ConfigDict(extra="forbid")

    category: Literal["commit", "pull_request", "issue"]
    repo_url: str = Field(min_length=1)
    change_id: str = Field(min_length=1)
    conversations: Optional[List[ConversationModel]] = None
    metadata: Optional[MetadataModel] = None


class DatasetModel(BaseModel):
    """Документ набора данных; записи проверяются по одной"""

    schema_version: str
    entries: List[Any]
