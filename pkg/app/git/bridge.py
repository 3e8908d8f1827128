"""
Работа с клоном репозитория: разрешение изменений, diff, обратный blame
"""

import logging
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.dataset.schemas import Category, ChangeLink, ChangeMetadata, ChangeRecord
from app.exceptions import (
    ChangeUnresolvableError, ConfigurationError, FileNotAtRevisionError, GitCommandError
)
from .parsers import parse_blame_porcelain, parse_log_timestamps, parse_unified_diff
from .runner import GitRunner
from .schemas import (
    EMPTY_TREE_SHA, BlameEntry, DiffImage, LineFate, RepositoryStats, ResolvedChange
)

logger = logging.getLogger(__name__)

DEFAULT_BRANCHES = ("main", "master")


class GitBridge:
    """Запросы к одному клону репозитория"""

    def __init__(self, repo_path: Path, repo_url: str = ""):
        self.repo_path = Path(repo_path)
        self.repo_url = repo_url
        self.git = GitRunner(self.repo_path)

    # ------------------------------------------------------------------
    # Ревизии

    def rev_parse(self, ref: str) -> Optional[str]:
        """SHA коммита для ссылки или None"""
        if not ref or ref.startswith("-"):
            return None
        out = self.git.run("rev-parse", "--verify", "--quiet", f"{ref}^{{commit}}", check=False)
        sha = out.strip()
        return sha or None

    def parents(self, sha: str) -> List[str]:
        """Родители коммита по порядку"""
        out = self.git.run("rev-list", "--parents", "-n", "1", sha)
        return out.split()[1:]

    def merge_base(self, a: str, b: str) -> Optional[str]:
        """Общий предок двух коммитов"""
        out = self.git.run("merge-base", a, b, check=False)
        return out.strip() or None

    def is_ancestor(self, ancestor: str, descendant: str) -> bool:
        """ancestor достижим из descendant (или совпадает с ним)"""
        return self.git.succeeds("merge-base", "--is-ancestor", ancestor, descendant)

    def commit_time(self, sha: str) -> int:
        """Время коммиттера (UTC, секунды)"""
        out = self.git.run("log", "-1", "--format=%H %ct", sha)
        return parse_log_timestamps(out)[0][1]

    @lru_cache(maxsize=None)
    def empty_tree(self) -> str:
        """SHA пустого дерева для формата объектов клона"""
        try:
            return self.git.run("hash-object", "-t", "tree", "/dev/null").strip()
        except GitCommandError:
            return EMPTY_TREE_SHA

    @lru_cache(maxsize=None)
    def first_parent_chain(self, tip: str, since: Optional[str] = None) -> Tuple[Tuple[str, int], ...]:
        """Цепочка первых родителей до tip, от старых к новым"""
        revision = f"{since}..{tip}" if since else tip
        out = self.git.run("log", "--first-parent", "--format=%H %ct", revision)
        return tuple(reversed(parse_log_timestamps(out)))

    def file_exists(self, revision: str, file_path: str) -> bool:
        """Файл присутствует в ревизии"""
        out = self.git.run("ls-tree", "--name-only", revision, "--", file_path, check=False)
        return file_path in out.splitlines()

    # ------------------------------------------------------------------
    # Основная ветка

    def main_branch_candidates(self, override: Optional[str] = None) -> List[str]:
        """Кандидаты в основную ветку по порядку"""
        if override:
            return [override]
        candidates: List[str] = []
        head = self.git.run("symbolic-ref", "--quiet", "HEAD", check=False).strip()
        if head:
            candidates.append(head.removeprefix("refs/heads/"))
        for name in DEFAULT_BRANCHES:
            if name not in candidates:
                candidates.append(name)
        return candidates

    def resolve_main_branch(self, override: Optional[str] = None) -> str:
        """Имя основной ветки; ConfigurationError если ни один кандидат не найден"""
        candidates = self.main_branch_candidates(override)
        for name in candidates:
            if self.rev_parse(name):
                return name
        raise ConfigurationError(
            f"No main branch in {self.repo_url or self.repo_path}; tried: {', '.join(candidates)}"
        )

    # ------------------------------------------------------------------
    # Изменения

    def resolve_change(self, record: ChangeRecord, link: Optional[ChangeLink] = None,
                       main_branch: Optional[str] = None) -> ResolvedChange:
        """Разрешение записи в пару (base, head)"""
        if record.category == Category.ISSUE:
            links = record.metadata.closed_by
            if link is None:
                if len(links) != 1:
                    raise ChangeUnresolvableError(
                        f"Issue {record.change_id} has {len(links)} closing changes; pass one link"
                    )
                link = links[0]
            base, head = self._resolve(link.category, link.change_id, ChangeMetadata(), main_branch)
            return ResolvedChange(
                record=record, base_commit=base, head_commit=head,
                via=link, ambiguous=len(links) > 1,
            )

        if record.category is None:
            raise ChangeUnresolvableError(f"Record {record.change_id} has no category")
        base, head = self._resolve(record.category, record.change_id, record.metadata, main_branch)
        return ResolvedChange(record=record, base_commit=base, head_commit=head)

    def _resolve(self, category: Category, change_id: str, metadata: ChangeMetadata,
                 main_branch: Optional[str]) -> Tuple[str, str]:
        if category == Category.COMMIT:
            base, head = self._resolve_commit(change_id)
        elif category == Category.PULL_REQUEST:
            base, head = self._resolve_pull_request(change_id, metadata, main_branch)
        else:
            raise ChangeUnresolvableError(f"Cannot resolve {category.value} {change_id} directly")
        if base == head:
            raise ChangeUnresolvableError(f"{category.value} {change_id} resolves to an empty range")
        return base, head

    def _resolve_commit(self, change_id: str) -> Tuple[str, str]:
        head = self.rev_parse(change_id)
        if head is None:
            raise ChangeUnresolvableError(f"Commit {change_id} not found in {self.repo_url}")
        parents = self.parents(head)
        base = parents[0] if parents else self.empty_tree()
        return base, head

    def _resolve_pull_request(self, change_id: str, metadata: ChangeMetadata,
                              main_branch: Optional[str]) -> Tuple[str, str]:
        head = None
        if metadata.head_commit:
            head = self.rev_parse(metadata.head_commit)
        if head is None:
            head = self.rev_parse(f"refs/pull/{change_id}/head")
        if head is None:
            raise ChangeUnresolvableError(f"Pull request {change_id} head not found in {self.repo_url}")

        if metadata.base_commit:
            base = self.rev_parse(metadata.base_commit)
            if base is None:
                raise ChangeUnresolvableError(f"Base {metadata.base_commit} of PR {change_id} not found")
            return base, head

        target = metadata.target_branch or main_branch or self.resolve_main_branch()
        tip = self.rev_parse(target)
        if tip is None:
            raise ChangeUnresolvableError(f"Target branch {target} of PR {change_id} not found")

        base = self.merge_base(head, tip)
        if base is None:
            raise ChangeUnresolvableError(f"PR {change_id} shares no history with {target}")

        if base == head:
            # Ветка уже влита: берем состояние до коммита слияния
            merge = self._first_containing(tip, head)
            if merge is not None and merge != head:
                merge_parents = self.parents(merge)
                if merge_parents:
                    base = self.merge_base(merge_parents[0], head) or base
            if base == head:
                parents = self.parents(head)
                base = parents[0] if parents else self.empty_tree()
        return base, head

    def _first_containing(self, tip: str, sha: str) -> Optional[str]:
        chain = [commit for commit, _ in self.first_parent_chain(tip)]
        return self._first_descendant(chain, sha)

    def _first_descendant(self, chain: Sequence[str], sha: str) -> Optional[str]:
        """Первый коммит цепочки, содержащий sha (двоичный поиск)"""
        lo, hi = 0, len(chain)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.is_ancestor(sha, chain[mid]):
                hi = mid
            else:
                lo = mid + 1
        return chain[lo] if lo < len(chain) else None

    def is_merged(self, rc: ResolvedChange, main_branch: str) -> bool:
        """Изменение присутствует в основной ветке"""
        record = rc.record
        if rc.via is None and record.category == Category.PULL_REQUEST and record.metadata.merged:
            return True

        tip = self.rev_parse(main_branch)
        if tip is None:
            raise ConfigurationError(
                f"Main branch not found in {self.repo_url or self.repo_path}; tried: {main_branch}"
            )
        return rc.head_commit == tip or self.is_ancestor(rc.head_commit, tip)

    def extract_hunks(self, rc: ResolvedChange, context: int = 3) -> DiffImage:
        """Фрагменты unified diff между base и head"""
        out = self.git.run(
            "diff", "--no-color", "--no-ext-diff", "--no-renames",
            f"-U{context}", rc.base_commit, rc.head_commit, "--",
        )
        image = parse_unified_diff(out)
        if image.binary_files:
            logger.warning(
                f"{rc.label}: skipped {len(image.binary_files)} binary files"
            )
        return image

    # ------------------------------------------------------------------
    # Обратный blame

    def reverse_blame(self, head: str, file_path: str, lines: Iterable[int], tip: str) -> List[LineFate]:
        """Судьба строк файла из head на пути head..tip основной ветки"""
        line_numbers = sorted(set(lines))
        if not line_numbers:
            return []
        if not self.file_exists(head, file_path):
            raise FileNotAtRevisionError(head, file_path)

        tip_sha = self.rev_parse(tip)
        if tip_sha is None:
            raise ConfigurationError(f"Tip {tip} not found in {self.repo_url or self.repo_path}")
        tip_time = self.commit_time(tip_sha)

        ranges = line_range_options(line_numbers)
        births = self._blame(ranges, [head], file_path)

        if head == tip_sha:
            terminals: Dict[int, BlameEntry] = {}
        else:
            terminals = self._reverse_blame_entries(ranges, head, tip_sha, file_path)

        chain = self.first_parent_chain(tip_sha, head)
        chain_index = {sha: i for i, (sha, _) in enumerate(chain)}
        chain_shas = [sha for sha, _ in chain]

        fates: List[LineFate] = []
        for line_no in line_numbers:
            birth = births.get(line_no)
            if birth is None:
                logger.warning(f"{file_path}:{line_no} missing from blame at {head[:10]}")
                continue

            terminal = terminals.get(line_no)
            death: Optional[Tuple[str, int]] = None
            if terminal is not None and terminal.commit != tip_sha:
                if terminal.commit in chain_index:
                    death = chain[chain_index[terminal.commit] + 1]
                else:
                    successor = self._first_descendant(chain_shas, terminal.commit)
                    if successor is not None:
                        death = chain[chain_index[successor]]
                    else:
                        logger.warning(
                            f"{file_path}:{line_no}: no mainline successor of {terminal.commit[:10]}"
                        )

            fates.append(LineFate(
                file_path=file_path,
                line_no=line_no,
                birth_commit=birth.commit,
                birth_time=birth.committer_time,
                censored=death is None,
                content=birth.content,
                tip_time=tip_time,
                death_commit=death[0] if death else None,
                death_time=death[1] if death else None,
            ))
        return fates

    def _reverse_blame_entries(self, ranges: List[str], head: str, tip: str,
                               file_path: str) -> Dict[int, BlameEntry]:
        revision = f"{head}..{tip}"
        try:
            return self._blame(ranges, ["--reverse", revision, "--first-parent"], file_path)
        except GitCommandError as e:
            # head вне цепочки первых родителей tip
            logger.debug(f"First-parent reverse blame failed, retrying: {e}")
            return self._blame(ranges, ["--reverse", revision], file_path)

    def _blame(self, ranges: List[str], revision_args: List[str], file_path: str) -> Dict[int, BlameEntry]:
        out = self.git.run("blame", "--porcelain", *ranges, *revision_args, "--", file_path)
        return {entry.final_line: entry for entry in parse_blame_porcelain(out)}

    # ------------------------------------------------------------------
    # Характеристики репозитория

    def repository_stats(self, main_branch: str,
                         extra: Sequence[Tuple[str, float]] = ()) -> RepositoryStats:
        """Число коммитов, авторов и возраст истории основной ветки"""
        tip = self.rev_parse(main_branch)
        if tip is None:
            raise ConfigurationError(f"Main branch {main_branch} not found in {self.repo_url}")

        commit_count = int(self.git.run("rev-list", "--count", tip).strip())
        emails = self.git.run("log", "--format=%ae", tip).splitlines()
        authors = {email.strip().lower() for email in emails if email.strip()}
        roots = parse_log_timestamps(self.git.run("log", "--max-parents=0", "--format=%H %ct", tip))
        tip_time = self.commit_time(tip)
        first_time = min((timestamp for _, timestamp in roots), default=tip_time)

        return RepositoryStats(
            repo_url=self.repo_url,
            main_branch=main_branch,
            tip_commit=tip,
            commit_count=commit_count,
            author_count=len(authors),
            age_days=max(tip_time - first_time, 0) / 86400.0,
            extra=tuple(extra),
        )


def line_range_options(line_numbers: Sequence[int]) -> List[str]:
    """Опции -L для множества строк, соседние строки объединяются"""
    options: List[str] = []
    start = prev = None
    for line_no in sorted(set(line_numbers)):
        if start is None:
            start = prev = line_no
        elif line_no == prev + 1:
            prev = line_no
        else:
            options.append(f"-L{start},{prev}")
            start = prev = line_no
    if start is not None:
        options.append(f"-L{start},{prev}")
    return options
