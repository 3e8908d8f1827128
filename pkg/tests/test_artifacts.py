"""
Тесты хранилища артефактов
"""

import json
from datetime import datetime, timezone
from enum import Enum

import pytest

from app.exceptions import MissingArtifactError
from app.services.artifacts import (
    MANIFEST_FILE, RUN_METADATA_FILE, ArtifactStore, StageResult, format_value
)


class Color(Enum):
    RED = "red"


class TestFormatValue:
    """Тесты представления ячеек"""

    @pytest.mark.parametrize("value,expected", [
        (None, ""),
        (True, "true"),
        (False, "false"),
        (Color.RED, "red"),
        (0.25, "0.25"),
        (1 / 3, "0.333333333333"),
        (3, "3"),
        ("text", "text"),
    ])
    def test_values(self, value, expected):
        """Стабильное представление"""
        assert format_value(value) == expected


class TestArtifactStore:
    """Тесты ArtifactStore"""

    def test_csv_round_trip(self, tmp_path):
        """Заголовок и строки"""
        store = ArtifactStore(tmp_path)
        store.write_csv("table.csv", ("name", "value", "flag"), [("a, b", 0.5, True), ("c", None, False)])
        rows = store.read_csv("table.csv")
        assert rows == [
            {"name": "a, b", "value": "0.5", "flag": "true"},
            {"name": "c", "value": "", "flag": "false"},
        ]

    def test_no_temporary_files_left(self, tmp_path):
        """После записи остается только целевой файл"""
        store = ArtifactStore(tmp_path)
        store.write_json("nested/data.json", {"b": 1, "a": 2})
        assert [p.name for p in (tmp_path / "nested").iterdir()] == ["data.json"]
        assert list(json.loads((tmp_path / "nested" / "data.json").read_text()).keys()) == ["a", "b"]

    def test_require_missing(self, tmp_path):
        """Нет входного артефакта"""
        with pytest.raises(MissingArtifactError):
            ArtifactStore(tmp_path).require("lines.csv")

    def test_manifest_excludes_itself_and_metadata(self, tmp_path):
        """MANIFEST.json без себя и файла сведений о запуске"""
        store = ArtifactStore(tmp_path)
        store.write_text("a.csv", "x\n")
        store.write_text("curves/all.json", "{}\n")
        store.write_run_metadata(StageResult("ingest"), {}, datetime.now(timezone.utc))
        manifest = store.write_manifest()

        assert sorted(manifest) == ["a.csv", "curves/all.json"]
        assert RUN_METADATA_FILE not in manifest
        assert json.loads((tmp_path / MANIFEST_FILE).read_text()) == manifest

    def test_remove_tree(self, tmp_path):
        """Удаление устаревших файлов каталога"""
        store = ArtifactStore(tmp_path)
        store.write_text("curves/old.json", "{}\n")
        store.remove_tree("curves")
        assert list((tmp_path / "curves").iterdir()) == []


class TestStageResult:
    """Тесты кода завершения"""

    def test_exit_codes(self):
        """0 без пропусков, 1 с пропусками"""
        assert StageResult("align").exit_code == 0
        assert StageResult("align", skipped=2).exit_code == 1
