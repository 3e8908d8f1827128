"""
Запуск git как подпроцесса
"""

import logging
import os
import subprocess
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from app.exceptions import GitCommandError

logger = logging.getLogger(__name__)

GIT_ENV: Dict[str, str] = {
    "LC_ALL": "C",
    "LANG": "C",
    "GIT_PAGER": "cat",
    "GIT_TERMINAL_PROMPT": "0",
    "GIT_CONFIG_NOSYSTEM": "1",
}


class GitRunner:
    """Обертка над командной строкой git с фиксированной локалью"""

    def __init__(self, repo_path: Optional[Path] = None, git_binary: str = "git",
                 env: Optional[Dict[str, str]] = None):
        self.repo_path = repo_path
        self.git_binary = git_binary
        self.env = dict(env or {})

    def argv(self, *args: str) -> List[str]:
        """Полная командная строка"""
        argv = [self.git_binary, "-c", "core.quotepath=off"]
        if self.repo_path is not None:
            argv += ["-C", str(self.repo_path)]
        return argv + list(args)

    def run(self, *args: str, check: bool = True) -> str:
        """Выполнение команды и возврат stdout"""
        completed = self._execute(args)
        if check and completed.returncode != 0:
            raise GitCommandError(self.argv(*args), completed.returncode, completed.stderr)
        return completed.stdout

    def succeeds(self, *args: str) -> bool:
        """Команда завершилась с кодом 0"""
        completed = self._execute(args)
        if completed.returncode not in (0, 1):
            raise GitCommandError(self.argv(*args), completed.returncode, completed.stderr)
        return completed.returncode == 0

    def _execute(self, args: Sequence[str]) -> "subprocess.CompletedProcess[str]":
        argv = self.argv(*args)
        logger.debug(f"Running {' '.join(argv)}")
        env = dict(os.environ)
        env.update(GIT_ENV)
        env.update(self.env)
        try:
            return subprocess.run(
                argv,
                capture_output=True,
                encoding="utf-8",
                errors="replace",
                env=env,
                check=False,
            )
        except OSError as e:
            raise GitCommandError(argv, -1, str(e)) from e
