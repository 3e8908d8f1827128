"""
Кэш клонов репозиториев: <cache_root>/<url-hash>/ и файл meta
"""

import fcntl
import hashlib
import json
import logging
import shutil
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

from app.exceptions import GitCommandError
from .runner import GitRunner

logger = logging.getLogger(__name__)

META_FILE = "meta"


class CloneCache:
    """Кэш зеркальных клонов с блокировкой на каталог репозитория"""

    def __init__(self, cache_root: Path, refresh: bool = False):
        self.cache_root = Path(cache_root)
        self.refresh = refresh

    @staticmethod
    def url_hash(url: str) -> str:
        """Имя каталога клона"""
        return hashlib.sha256(url.encode("utf-8")).hexdigest()[:16]

    def repo_dir(self, url: str) -> Path:
        """Каталог клона для URL"""
        return self.cache_root / self.url_hash(url)

    def clone_dir(self, url: str) -> Path:
        """Каталог git внутри каталога клона"""
        return self.repo_dir(url) / "repo.git"

    def meta_path(self, url: str) -> Path:
        """Путь к файлу meta"""
        return self.repo_dir(url) / META_FILE

    def has_clone(self, url: str) -> bool:
        """Клон уже есть в кэше"""
        return self.meta_path(url).exists() and self.clone_dir(url).exists()

    def read_meta(self, url: str) -> Optional[Dict[str, Any]]:
        """Содержимое файла meta"""
        path = self.meta_path(url)
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as f:
            data: Dict[str, Any] = json.load(f)
        return data

    @contextmanager
    def lock(self, url: str) -> Iterator[None]:
        """Эксклюзивная блокировка каталога репозитория"""
        self.cache_root.mkdir(parents=True, exist_ok=True)
        lock_file = self.cache_root / f"{self.url_hash(url)}.lock"
        with open(lock_file, "w") as f:
            fcntl.flock(f.fileno(), fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(f.fileno(), fcntl.LOCK_UN)

    def ensure_clone(self, url: str) -> Path:
        """Клонирование (или обновление) репозитория, возвращает путь к клону"""
        with self.lock(url):
            clone_dir = self.clone_dir(url)
            if self.has_clone(url):
                if self.refresh:
                    logger.info(f"Fetching {url}")
                    GitRunner(clone_dir).run("fetch", "--prune", "origin")
                    self._write_meta(url)
                return clone_dir

            repo_dir = self.repo_dir(url)
            if repo_dir.exists():
                # Остатки прерванного клонирования
                shutil.rmtree(repo_dir)
            repo_dir.mkdir(parents=True)

            logger.info(f"Cloning {url} into {clone_dir}")
            try:
                GitRunner().run("clone", "--mirror", "--quiet", url, str(clone_dir))
            except GitCommandError:
                shutil.rmtree(repo_dir, ignore_errors=True)
                raise
            self._write_meta(url)
            return clone_dir

    def _write_meta(self, url: str) -> None:
        meta = {
            "url": url,
            "fetched_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        with open(self.meta_path(url), "w", encoding="utf-8") as f:
            json.dump(meta, f, indent=2)
