#!/usr/bin/env python3
"""
Скрипт для создания тестового репозитория и набора данных

История основной ветки (время коммиттера от BASE_TIME, шаг - сутки):
    c1  calc.py и README.md
    c2  mathutil.py: функция clamp из ответа в переписке (6 строк)
    c3  notes.txt
    f1  (ветка feature) строка в README.md
    c4  удаление строк 2-3 mathutil.py
    m5  слияние feature (--no-ff)
    c6  вторая строка notes.txt
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict

# Добавляем корневую папку проекта в путь
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from app.git.runner import GitRunner

BASE_TIME = 1_700_000_000
DAY = 86400

CLAMP_LISTING = """def clamp(value, low, high):
    if value < low:
        return low
    if value > high:
        return high
    return value
"""

CLAMP_AFTER_C4 = """def clamp(value, low, high):
    if value > high:
        return high
    return value
"""


@dataclass
class Fixture:
    """Созданный репозиторий и набор данных"""
    repo: Path
    dataset: Path
    commits: Dict[str, str] = field(default_factory=dict)
    times: Dict[str, int] = field(default_factory=dict)


def _git(repo: Path, timestamp: int = BASE_TIME) -> GitRunner:
    date = f"@{timestamp} +0000"
    return GitRunner(repo, env={
        "GIT_AUTHOR_NAME": "Fixture Author",
        "GIT_AUTHOR_EMAIL": "author@example.com",
        "GIT_COMMITTER_NAME": "Fixture Author",
        "GIT_COMMITTER_EMAIL": "author@example.com",
        "GIT_AUTHOR_DATE": date,
        "GIT_COMMITTER_DATE": date,
    })


def _write(repo: Path, name: str, content: str) -> None:
    (repo / name).write_text(content, encoding="utf-8")


def _commit(fixture: Fixture, name: str, day: int, message: str) -> None:
    timestamp = BASE_TIME + day * DAY
    git = _git(fixture.repo, timestamp)
    git.run("add", "-A")
    git.run("-c", "commit.gpgsign=false", "commit", "-q", "-m", message)
    fixture.commits[name] = git.run("rev-parse", "HEAD").strip()
    fixture.times[name] = timestamp


def build_repository(repo: Path, dataset: Path) -> Fixture:
    """Создание репозитория с историей из docstring модуля"""
    repo.mkdir(parents=True, exist_ok=True)
    fixture = Fixture(repo=repo, dataset=dataset)
    git = _git(repo)
    git.run("init", "-q")
    git.run("symbolic-ref", "HEAD", "refs/heads/main")

    _write(repo, "calc.py", "def add(a, b):\n    return a + b\n")
    _write(repo, "README.md", "# Fixture\n\nA tiny repository.\n")
    _commit(fixture, "c1", 0, "Add calculator")

    _write(repo, "mathutil.py", CLAMP_LISTING)
    _commit(fixture, "c2", 1, "Add clamp helper")

    _write(repo, "notes.txt", "first note\n")
    _commit(fixture, "c3", 2, "Add notes")

    git.run("checkout", "-q", "-b", "feature")
    _write(repo, "README.md", "# Fixture\n\nA tiny repository.\nFeature docs\n")
    _commit(fixture, "f1", 3, "Document feature")

    git.run("checkout", "-q", "main")
    _write(repo, "mathutil.py", CLAMP_AFTER_C4)
    _commit(fixture, "c4", 4, "Drop lower bound check")

    merge_time = BASE_TIME + 5 * DAY
    _git(repo, merge_time).run(
        "-c", "commit.gpgsign=false", "merge", "-q", "--no-ff", "-m", "Merge feature", "feature"
    )
    fixture.commits["m5"] = git.run("rev-parse", "HEAD").strip()
    fixture.times["m5"] = merge_time

    _write(repo, "notes.txt", "first note\nsecond note\n")
    _commit(fixture, "c6", 6, "Extend notes")
    return fixture


def build_short_lived_repository(repo: Path) -> Fixture:
    """Строка добавлена в s2 и удалена следующим коммитом s3"""
    repo.mkdir(parents=True, exist_ok=True)
    fixture = Fixture(repo=repo, dataset=repo / "unused.json")
    git = _git(repo)
    git.run("init", "-q")
    git.run("symbolic-ref", "HEAD", "refs/heads/main")

    _write(repo, "config.ini", "[main]\n")
    _commit(fixture, "s1", 0, "Add config")

    _write(repo, "config.ini", "[main]\ndebug = true\n")
    _commit(fixture, "s2", 1, "Enable debug")

    _write(repo, "config.ini", "[main]\n")
    _commit(fixture, "s3", 2, "Disable debug")
    return fixture


def dataset_document(fixture: Fixture) -> Dict:
    """Набор данных: живые commit и pull request, утраченная ссылка"""
    repo_url = str(fixture.repo)
    return {
        "schema_version": "1",
        "entries": [
            {
                "category": "commit",
                "repo_url": repo_url,
                "change_id": fixture.commits["c2"],
                "conversations": [{
                    "conversation_id": "conv-clamp",
                    "turns": [{
                        "prompt": "Write a clamp function in Python",
                        "answer": "Here is a clamp function:",
                        "listings": [{"language": "python", "content": CLAMP_LISTING}],
                    }],
                }],
            },
            {
                "category": "commit",
                "repo_url": repo_url,
                "change_id": fixture.commits["c3"],
                "conversations": None,
            },
            {
                "category": "pull_request",
                "repo_url": repo_url,
                "change_id": "1",
                "conversations": [{
                    "conversation_id": "conv-docs",
                    "turns": [{
                        "prompt": "What belongs in a changelog?",
                        "answer": "List user visible changes per release.",
                        "listings": [],
                    }],
                }],
                "metadata": {
                    "merged": True,
                    "head_commit": fixture.commits["f1"],
                    "target_branch": "main",
                    "repository": {"stars": 3, "forks": 1},
                },
            },
        ],
    }


def build_fixture(root: Path) -> Fixture:
    """Репозиторий в root/repo и набор данных root/dataset.json"""
    fixture = build_repository(root / "repo", root / "dataset.json")
    with open(fixture.dataset, "w", encoding="utf-8") as f:
        json.dump(dataset_document(fixture), f, indent=2)
    return fixture


def main() -> None:
    """Основная функция"""
    parser = argparse.ArgumentParser(description="Create the fixture repository and dataset")
    parser.add_argument("root", type=Path, help="target directory")
    args = parser.parse_args()

    fixture = build_fixture(args.root)
    print(f"✅ Репозиторий: {fixture.repo}")
    print(f"✅ Набор данных: {fixture.dataset}")
    for name, sha in fixture.commits.items():
        print(f"   {name}: {sha}")


if __name__ == "__main__":
    main()
