"""
CLI package: разбор аргументов и команды конвейера
"""

import argparse
from pathlib import Path
from typing import Any, Dict

from .commands import COMMANDS, cmd_align, cmd_clone, cmd_ingest, cmd_run, cmd_stats, cmd_survive

COMMAND_HELP = {
    "ingest": "load and validate the dataset",
    "clone": "mirror-clone referenced repositories into the cache",
    "align": "match diff hunks against conversations",
    "survive": "track added lines with reverse blame",
    "stats": "category summaries and KS tests",
    "run": "run every stage in order",
}


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file")
    parser.add_argument("--dataset", dest="dataset_path", type=Path, help="dataset JSON")
    parser.add_argument("--cache", dest="clone_cache_dir", type=Path, help="clone cache directory")
    parser.add_argument("--out", dest="output_dir", type=Path, help="output directory")
    parser.add_argument("--threshold", type=float, help="line similarity threshold, (0, 1]")
    parser.add_argument("--context", dest="diff_context", type=int, help="diff context lines")
    parser.add_argument("--jobs", dest="parallelism", type=int, help="parallel changes")
    parser.add_argument("--main-branch", dest="main_branch_override", help="main branch name")
    parser.add_argument("--refresh", dest="refresh_clones", action="store_true", default=None,
                        help="fetch existing clones")
    parser.add_argument("--log-level", dest="log_level", help="logging level")


def build_parser() -> argparse.ArgumentParser:
    """Парсер командной строки с подкомандами"""
    parser = argparse.ArgumentParser(
        prog="chatlineage",
        description="Provenance of chat-assisted code changes and survival of the lines they added",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _add_common_arguments(subparsers.add_parser(name, help=COMMAND_HELP[name]))
    return parser


def config_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Значения флагов для PipelineConfig.with_overrides"""
    values = vars(args).copy()
    values.pop("command", None)
    values.pop("config", None)
    return values


__all__ = [
    "build_parser",
    "config_overrides",
    "COMMANDS",
    "cmd_ingest",
    "cmd_clone",
    "cmd_align",
    "cmd_survive",
    "cmd_stats",
    "cmd_run",
]
