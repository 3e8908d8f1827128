"""
Хранилище артефактов стадий: атомарная запись CSV/JSON, MANIFEST.json
"""

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from app.exceptions import MissingArtifactError

logger = logging.getLogger(__name__)

MANIFEST_FILE = "MANIFEST.json"
RUN_METADATA_FILE = "run_metadata.json"
EXCLUDED_FROM_MANIFEST = {MANIFEST_FILE, RUN_METADATA_FILE}


@dataclass
class StageResult:
    """Итоги стадии конвейера"""
    stage: str
    counts: Dict[str, int] = field(default_factory=dict)
    skipped: int = 0
    files: List[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        """0 - успех, 1 - завершено с пропусками"""
        return 1 if self.skipped else 0


def format_value(value: Any) -> str:
    """Стабильное текстовое представление значения ячейки CSV"""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def parse_bool(text: str) -> bool:
    """Обратное преобразование для format_value(bool)"""
    return text == "true"


def parse_optional_float(text: str) -> Optional[float]:
    """Пустая ячейка - None"""
    return float(text) if text else None


class ArtifactStore:
    """Файлы стадий в output_dir"""

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)

    def path(self, name: str) -> Path:
        """Абсолютный путь артефакта"""
        return self.output_dir / name

    def exists(self, name: str) -> bool:
        return self.path(name).exists()

    def require(self, name: str) -> Path:
        """Путь к входному артефакту; MissingArtifactError если его нет"""
        path = self.path(name)
        if not path.exists():
            raise MissingArtifactError(f"Required artifact {path} is missing; run the previous stage first")
        return path

    def write_text(self, name: str, text: str) -> Path:
        """Атомарная запись: временный файл и os.replace"""
        target = self.path(name)
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, temp_path = tempfile.mkstemp(suffix=".tmp", prefix=target.name + ".", dir=target.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(temp_path, target)
        except BaseException:
            if os.path.exists(temp_path):
                os.unlink(temp_path)
            raise
        logger.debug(f"Wrote {target}")
        return target

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """CSV с заголовком (RFC 4180, UTF-8)"""
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(value) for value in row])
        return self.write_text(name, buffer.getvalue())

    def write_json(self, name: str, data: Any) -> Path:
        """JSON с сортировкой ключей"""
        return self.write_text(name, json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True) + "\n")

    def read_csv(self, name: str) -> List[Dict[str, str]]:
        """Строки CSV как словари"""
        path = self.require(name)
        with open(path, "r", encoding="utf-8", newline="") as f:
            return list(csv.DictReader(f))

    def read_json(self, name: str) -> Any:
        path = self.require(name)
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    def remove_tree(self, name: str) -> None:
        """Удаление устаревших файлов каталога артефактов"""
        directory = self.path(name)
        if directory.is_dir():
            for child in sorted(directory.iterdir()):
                if child.is_file():
                    child.unlink()

    def write_manifest(self) -> Dict[str, str]:
        """MANIFEST.json: относительный путь -> sha256 для всех артефактов"""
        manifest: Dict[str, str] = {}
        for path in sorted(self.output_dir.rglob("*")):
            if not path.is_file() or path.suffix == ".tmp":
                continue
            relative = path.relative_to(self.output_dir).as_posix()
            if relative in EXCLUDED_FROM_MANIFEST:
                continue
            manifest[relative] = hashlib.sha256(path.read_bytes()).hexdigest()
        self.write_json(MANIFEST_FILE, manifest)
        return manifest

    def write_run_metadata(self, result: StageResult, settings: Dict[str, Any],
                           started_at: datetime) -> None:
        """Файл сведений о запуске; в MANIFEST не входит"""
        self.write_json(RUN_METADATA_FILE, {
            "stage": result.stage,
            "started_at": started_at.isoformat(timespec="seconds"),
            "finished_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "counts": result.counts,
            "skipped": result.skipped,
            "files": result.files,
            "config": settings,
        })
