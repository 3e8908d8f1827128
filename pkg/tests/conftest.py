"""
Конфигурация pytest и общие фикстуры
"""

import shutil
from pathlib import Path
from typing import Any, Callable, List, Optional

import pytest

from app.config import PipelineConfig
from app.dataset.schemas import (
    Category, ChangeMetadata, ChangeRecord, CodeListing, Conversation, RecordStatus, Turn
)
from scripts.make_fixture_repo import Fixture, build_fixture


def pytest_collection_modifyitems(config: Any, items: List[Any]) -> None:
    """Тесты с маркером git пропускаются, если git не установлен"""
    if shutil.which("git"):
        return
    skip = pytest.mark.skip(reason="git binary is not available")
    for item in items:
        if "git" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def fixture_env(tmp_path_factory: pytest.TempPathFactory) -> Fixture:
    """Тестовый репозиторий (7 коммитов, одно слияние) и набор данных"""
    return build_fixture(tmp_path_factory.mktemp("fixture"))


@pytest.fixture(scope="session")
def fixture_repo(fixture_env: Fixture) -> Path:
    """Путь к тестовому репозиторию"""
    return fixture_env.repo


@pytest.fixture(scope="session")
def fixture_dataset(fixture_env: Fixture) -> Path:
    """Путь к набору данных тестового репозитория"""
    return fixture_env.dataset


@pytest.fixture
def pipeline_config(tmp_path: Path, fixture_dataset: Path) -> PipelineConfig:
    """Конфигурация с каталогами во временной папке"""
    config = PipelineConfig(
        dataset_path=fixture_dataset,
        clone_cache_dir=tmp_path / "cache",
        output_dir=tmp_path / "out",
    )
    config.validate()
    return config


@pytest.fixture
def make_record() -> Callable[..., ChangeRecord]:
    """Фабрика записей с одной перепиской"""

    def factory(
        category: Category = Category.COMMIT,
        change_id: str = "abc123",
        repo_url: str = "https://example.com/repo.git",
        prompt: str = "",
        answer: str = "",
        listings: Optional[List[str]] = None,
        turns: Optional[List[Turn]] = None,
        metadata: Optional[ChangeMetadata] = None,
        status: RecordStatus = RecordStatus.LIVE,
    ) -> ChangeRecord:
        if turns is None:
            turns = [Turn(
                prompt_text=prompt,
                answer_text=answer,
                listings=tuple(CodeListing(content) for content in (listings or [])),
            )]
        return ChangeRecord(
            category=category,
            repo_url=repo_url,
            change_id=change_id,
            conversations=(Conversation("conv-1", tuple(turns)),),
            status=status,
            metadata=metadata or ChangeMetadata(),
        )

    return factory
