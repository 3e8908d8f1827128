"""
Разбор машиночитаемого вывода git: unified diff, blame --porcelain, log
"""

import re
from typing import Dict, List, Optional, Tuple

from .schemas import BlameEntry, DiffImage, HunkImage, HunkLine, LineKind


HUNK_HEADER = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")
BLAME_HEADER = re.compile(r"^([0-9a-f]{40}|[0-9a-f]{64}) (\d+) (\d+)(?: (\d+))?$")
DEV_NULL = "/dev/null"


class DiffParseError(ValueError):
    """Некорректный unified diff"""


class BlameParseError(ValueError):
    """Некорректный вывод git blame --porcelain"""


def parse_unified_diff(text: str) -> DiffImage:
    """Разбор вывода git diff на фрагменты по файлам"""
    image = DiffImage()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    current_file: Optional[str] = None
    old_path: Optional[str] = None
    i = 0
    while i < len(lines):
        line = lines[i]

        if line.startswith("diff --git "):
            current_file = _path_from_git_header(line)
            old_path = None
        elif line.startswith("Binary files ") or line == "GIT binary patch":
            if current_file is not None:
                image.binary_files.append(current_file)
        elif line.startswith("--- "):
            old_path = _strip_prefix(line[4:], "a/")
        elif line.startswith("+++ "):
            new_path = _strip_prefix(line[4:], "b/")
            if new_path is not None:
                current_file = new_path
            elif old_path is not None:
                current_file = old_path
        elif line.startswith("@@"):
            if current_file is None:
                raise DiffParseError(f"Hunk without file header: {line}")
            hunk, consumed = _parse_hunk(current_file, lines, i)
            image.hunks.append(hunk)
            i += consumed
            continue

        i += 1

    return image


def _parse_hunk(file_path: str, lines: List[str], start: int) -> Tuple[HunkImage, int]:
    header = lines[start]
    match = HUNK_HEADER.match(header)
    if not match:
        raise DiffParseError(f"Invalid hunk header format: {header}")

    pre_start = int(match.group(1))
    pre_count = int(match.group(2)) if match.group(2) is not None else 1
    post_start = int(match.group(3))
    post_count = int(match.group(4)) if match.group(4) is not None else 1

    hunk = HunkImage(
        file_path=file_path,
        pre_start=pre_start,
        pre_count=pre_count,
        post_start=post_start,
        post_count=post_count,
    )

    # Для пустой стороны git указывает строку перед вставкой
    pre_no = pre_start if pre_count else pre_start + 1
    post_no = post_start if post_count else post_start + 1
    pre_left, post_left = pre_count, post_count

    i = start + 1
    while i < len(lines) and (pre_left > 0 or post_left > 0):
        line = lines[i]
        marker, content = (line[:1], line[1:]) if line else (" ", "")

        if marker == " ":
            hunk.pre_lines.append(HunkLine(pre_no, content, LineKind.CONTEXT))
            hunk.post_lines.append(HunkLine(post_no, content, LineKind.CONTEXT))
            pre_no += 1
            post_no += 1
            pre_left -= 1
            post_left -= 1
        elif marker == "-":
            hunk.pre_lines.append(HunkLine(pre_no, content, LineKind.REMOVED))
            pre_no += 1
            pre_left -= 1
        elif marker == "+":
            hunk.post_lines.append(HunkLine(post_no, content, LineKind.ADDED))
            post_no += 1
            post_left -= 1
        elif marker == "\\":
            pass
        else:
            raise DiffParseError(f"Unexpected line in hunk of {file_path}: {line!r}")
        i += 1

    if pre_left > 0 or post_left > 0:
        raise DiffParseError(f"Truncated hunk in {file_path}: {header}")

    # "\ No newline at end of file" после последней строки
    while i < len(lines) and lines[i].startswith("\\"):
        i += 1

    return hunk, i - start


def _path_from_git_header(line: str) -> Optional[str]:
    rest = line[len("diff --git "):]
    # Без переименований пути a/ и b/ совпадают
    if rest.startswith("a/") and len(rest) % 2 == 1:
        half = (len(rest) - 1) // 2
        left, right = rest[:half], rest[half + 1:]
        if left[2:] == right[2:] and right.startswith("b/"):
            return left[2:]
    return None


def _strip_prefix(path: str, prefix: str) -> Optional[str]:
    path = path.rstrip("\t")
    if path == DEV_NULL:
        return None
    if path.startswith(prefix):
        return path[len(prefix):]
    return path


def parse_blame_porcelain(text: str) -> List[BlameEntry]:
    """Разбор вывода git blame --porcelain (в том числе --reverse)"""
    entries: List[BlameEntry] = []
    commit_info: Dict[str, Dict[str, str]] = {}

    lines = text.split("\n")
    i = 0
    while i < len(lines):
        line = lines[i]
        if not line:
            i += 1
            continue

        match = BLAME_HEADER.match(line)
        if not match:
            raise BlameParseError(f"Unexpected blame header: {line!r}")

        commit = match.group(1)
        orig_line = int(match.group(2))
        final_line = int(match.group(3))
        info = commit_info.setdefault(commit, {})

        i += 1
        while i < len(lines) and not lines[i].startswith("\t"):
            key, _, value = lines[i].partition(" ")
            info[key] = value
            i += 1

        if i >= len(lines):
            raise BlameParseError(f"Missing content line for {commit}")
        content = lines[i][1:]
        i += 1

        if "committer-time" not in info:
            raise BlameParseError(f"No committer-time for {commit}")

        entries.append(BlameEntry(
            commit=commit,
            orig_line=orig_line,
            final_line=final_line,
            committer_time=int(info["committer-time"]),
            filename=info.get("filename", ""),
            content=content,
            boundary="boundary" in info,
        ))

    return entries


def parse_log_timestamps(text: str) -> List[Tuple[str, int]]:
    """Разбор вывода git log --format='%H %ct'"""
    result: List[Tuple[str, int]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        sha, _, timestamp = line.partition(" ")
        result.append((sha, int(timestamp)))
    return result
