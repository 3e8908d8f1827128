"""
Тесты конфигурации
"""

import json
import os
from pathlib import Path
from unittest.mock import patch

import pytest

import app.config
from app.config import PipelineConfig, get_config
from app.exceptions import ConfigurationError


@pytest.fixture(autouse=True)
def reset_global_config():
    """Глобальная конфигурация не переживает тест"""
    app.config.config = None
    yield
    app.config.config = None


@pytest.fixture
def clean_env():
    """Окружение без переменных CHATLINEAGE_"""
    env = {k: v for k, v in os.environ.items() if not k.startswith("CHATLINEAGE_")}
    with patch.dict(os.environ, env, clear=True):
        yield


class TestPipelineConfig:
    """Тесты PipelineConfig"""

    def test_defaults(self, clean_env):
        """Значения по умолчанию"""
        config = PipelineConfig.from_env()
        assert config.threshold == 0.6
        assert config.diff_context == 3
        assert config.normalize_whitespace is True
        assert config.alpha == 0.05
        assert config.ci_level == 0.95
        assert config.parallelism == 1
        assert config.main_branch_override is None

    def test_from_env(self, clean_env):
        """Значения из окружения приводятся к типам полей"""
        with patch.dict(os.environ, {
            "CHATLINEAGE_THRESHOLD": "0.8",
            "CHATLINEAGE_PARALLELISM": "4",
            "CHATLINEAGE_REFRESH_CLONES": "true",
            "CHATLINEAGE_OUTPUT_DIR": "/tmp/results",
        }):
            config = PipelineConfig.from_env()
        assert config.threshold == 0.8
        assert config.parallelism == 4
        assert config.refresh_clones is True
        assert config.output_dir == Path("/tmp/results")

    def test_invalid_env_value(self, clean_env):
        """Нечисловое значение"""
        with patch.dict(os.environ, {"CHATLINEAGE_PARALLELISM": "many"}):
            with pytest.raises(ConfigurationError):
                PipelineConfig.from_env()

    def test_unknown_file_key(self, tmp_path):
        """Неизвестный ключ в файле"""
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"treshold": 0.7}), encoding="utf-8")
        with pytest.raises(ConfigurationError) as exc_info:
            PipelineConfig.from_file(path)
        assert "treshold" in str(exc_info.value)

    @pytest.mark.parametrize("field,value", [
        ("threshold", 0.0),
        ("threshold", 1.1),
        ("diff_context", -1),
        ("parallelism", 0),
        ("alpha", 1.0),
        ("ci_level", 0.0),
        ("log_level", "LOUD"),
    ])
    def test_validation(self, tmp_path, field, value):
        """Значения вне допустимых диапазонов"""
        config = PipelineConfig(output_dir=tmp_path / "out", clone_cache_dir=tmp_path / "cache")
        with pytest.raises(ConfigurationError):
            config.with_overrides(**{field: value}).validate()

    def test_validate_creates_directories(self, tmp_path):
        """Каталоги результатов и кэша создаются"""
        config = PipelineConfig(output_dir=tmp_path / "out", clone_cache_dir=tmp_path / "cache")
        config.validate()
        assert (tmp_path / "out").is_dir()
        assert (tmp_path / "cache").is_dir()

    def test_as_dict(self, tmp_path):
        """Пути сериализуются строками"""
        data = PipelineConfig(output_dir=tmp_path).as_dict()
        assert data["output_dir"] == str(tmp_path)
        assert data["threshold"] == 0.6


class TestGetConfig:
    """Тесты порядка источников"""

    def test_precedence(self, tmp_path, clean_env):
        """Окружение < файл < флаги"""
        path = tmp_path / "config.json"
        path.write_text(json.dumps({
            "threshold": 0.7,
            "alpha": 0.01,
            "output_dir": str(tmp_path / "out"),
            "clone_cache_dir": str(tmp_path / "cache"),
        }), encoding="utf-8")

        with patch.dict(os.environ, {"CHATLINEAGE_THRESHOLD": "0.9", "CHATLINEAGE_DIFF_CONTEXT": "5"}):
            config = get_config(path, alpha=0.1, parallelism=None)

        assert config.diff_context == 5
        assert config.threshold == 0.7
        assert config.alpha == 0.1
        assert config.parallelism == 1

    def test_cached_instance(self, tmp_path, clean_env):
        """Без аргументов возвращается сохраненная конфигурация"""
        first = get_config(output_dir=tmp_path / "out", clone_cache_dir=tmp_path / "cache")
        assert get_config() is first
