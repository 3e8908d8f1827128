"""
Конфигурация конвейера
"""

import json
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from app.exceptions import ConfigurationError

load_dotenv()

ENV_PREFIX = "CHATLINEAGE_"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class PipelineConfig:
    """Класс конфигурации конвейера"""

    # Paths
    dataset_path: Path = Path("dataset.json")
    clone_cache_dir: Path = Path(".cache/clones")
    output_dir: Path = Path("out")

    # Alignment settings
    threshold: float = 0.6
    diff_context: int = 3
    normalize_whitespace: bool = True

    # Git settings
    main_branch_override: Optional[str] = None
    refresh_clones: bool = False

    # Statistics settings
    alpha: float = 0.05
    ci_level: float = 0.95

    # Runtime settings
    parallelism: int = 1
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> "PipelineConfig":
        """Создание конфигурации из переменных окружения"""
        values: Dict[str, Any] = {}
        for f in fields(cls):
            raw = os.getenv(ENV_PREFIX + f.name.upper())
            if raw is not None and raw != "":
                values[f.name] = raw
        return cls()._coerced(values)

    @classmethod
    def from_file(cls, path: Path) -> "PipelineConfig":
        """Создание конфигурации из JSON-файла"""
        return cls()._coerced(read_config_file(path))

    def with_overrides(self, **overrides: Any) -> "PipelineConfig":
        """Новая конфигурация с переопределенными значениями (None пропускаются)"""
        return self._coerced({k: v for k, v in overrides.items() if v is not None})

    def _coerced(self, values: Dict[str, Any]) -> "PipelineConfig":
        known = {f.name: f for f in fields(self)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ConfigurationError(f"Unknown config keys: {', '.join(unknown)}")

        converted: Dict[str, Any] = {}
        for name, value in values.items():
            default = getattr(self, name)
            try:
                converted[name] = _convert(name, value, default)
            except (TypeError, ValueError) as e:
                raise ConfigurationError(f"Invalid value for {name}: {value!r}") from e
        return replace(self, **converted)

    def validate(self) -> None:
        """Проверка инвариантов конфигурации"""
        if not 0 < self.threshold <= 1:
            raise ConfigurationError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.diff_context < 0:
            raise ConfigurationError(f"diff_context must be >= 0, got {self.diff_context}")
        if self.parallelism < 1:
            raise ConfigurationError(f"parallelism must be >= 1, got {self.parallelism}")
        if not 0 < self.alpha < 1:
            raise ConfigurationError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0 < self.ci_level < 1:
            raise ConfigurationError(f"ci_level must be in (0, 1), got {self.ci_level}")
        if self.log_level.upper() not in LOG_LEVELS:
            raise ConfigurationError(f"log_level must be one of {', '.join(LOG_LEVELS)}, got {self.log_level}")

        for directory in (self.output_dir, self.clone_cache_dir):
            try:
                directory.mkdir(parents=True, exist_ok=True)
            except OSError as e:
                raise ConfigurationError(f"Cannot create directory {directory}: {e}") from e

    def as_dict(self) -> Dict[str, Any]:
        """Представление для файла метаданных запуска"""
        result: Dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            result[f.name] = str(value) if isinstance(value, Path) else value
        return result


def read_config_file(path: Path) -> Dict[str, Any]:
    """Чтение JSON-файла конфигурации"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot read config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file {path} must contain a JSON object")
    return data


def _convert(name: str, value: Any, default: Any) -> Any:
    if name == "main_branch_override":
        return str(value) if value else None
    if isinstance(default, bool):
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("true", "1", "yes"):
            return True
        if text in ("false", "0", "no"):
            return False
        raise ValueError(value)
    if isinstance(default, Path):
        return Path(value)
    if isinstance(default, int):
        if isinstance(value, bool):
            raise TypeError(value)
        return int(value)
    if isinstance(default, float):
        return float(value)
    return str(value)


# Глобальная конфигурация
config: Optional[PipelineConfig] = None


def get_config(config_path: Optional[Path] = None, **overrides: Any) -> PipelineConfig:
    """Получение конфигурации: окружение < файл < флаги"""
    global config
    if config is None or config_path is not None or overrides:
        built = PipelineConfig.from_env()
        if config_path is not None:
            built = built._coerced(read_config_file(config_path))
        built = built.with_overrides(**overrides)
        built.validate()
        config = built
    return config
