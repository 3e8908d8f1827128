"""
Сопоставление фрагментов diff с сегментами переписки
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from statistics import fmean
from typing import Dict, List, Optional, Set, Tuple

from app.dataset.schemas import Category, ChangeRecord
from app.git.schemas import HunkImage, HunkLine, LineKind, ResolvedChange
from .similarity import LineScorer, SimilarityScore

DEFAULT_THRESHOLD = 0.6

FENCED_BLOCK = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


class Side(Enum):
    """Сторона фрагмента"""
    PRE = "PRE"
    POST = "POST"


class Section(Enum):
    """Раздел пары запрос/ответ"""
    PROMPT_TEXT = "PROMPT_TEXT"
    ANSWER_TEXT = "ANSWER_TEXT"
    LISTING = "LISTING"


ELIGIBLE_KINDS = {
    Side.PRE: (LineKind.REMOVED, LineKind.CONTEXT),
    Side.POST: (LineKind.ADDED, LineKind.CONTEXT),
}


class Bin(Enum):
    """Интервал доли сопоставленных строк"""
    NO_IMPACT = "No Impact"
    Q1 = "(0, 0.25]"
    Q2 = "(0.25, 0.5]"
    Q3 = "(0.5, 0.75]"
    Q4 = "(0.75, 1]"

    @classmethod
    def for_ratio(cls, rho: float, matched: Optional[int] = None) -> "Bin":
        """Интервал для доли rho; NO_IMPACT только при нуле совпадений"""
        if matched == 0 or rho <= 0:
            return cls.NO_IMPACT
        if rho <= 0.25:
            return cls.Q1
        if rho <= 0.5:
            return cls.Q2
        if rho <= 0.75:
            return cls.Q3
        return cls.Q4


@dataclass(frozen=True)
class SegmentRef:
    """Ссылка на сегмент переписки"""
    conversation_id: str
    turn_index: int
    section: Section
    listing_index: Optional[int] = None

    def __str__(self) -> str:
        label = f"{self.conversation_id}#{self.turn_index}:{self.section.value}"
        if self.section == Section.LISTING:
            label += f"({self.listing_index})"
        return label


@dataclass(frozen=True)
class Segment:
    """Сегмент с нормализованными непустыми строками"""
    ref: SegmentRef
    lines: Tuple[str, ...]


@dataclass(frozen=True)
class SegmentChoice:
    """Выбранный сегмент и его оценка"""
    segment: Segment
    score: SimilarityScore

    @property
    def ref(self) -> SegmentRef:
        return self.segment.ref


@dataclass(frozen=True)
class LineMatch:
    """Строка фрагмента, сопоставленная со строкой сегмента"""
    file_path: str
    hunk_line: HunkLine
    segment_line_index: int
    score: SimilarityScore


@dataclass
class HunkAlignment:
    """Результат сопоставления одного фрагмента"""
    file_path: str
    pre_segment: Optional[SegmentChoice] = None
    post_segment: Optional[SegmentChoice] = None
    pre_matches: List[LineMatch] = field(default_factory=list)
    post_matches: List[LineMatch] = field(default_factory=list)
    pre_eligible: int = 0
    post_eligible: int = 0
    post_lines: List[HunkLine] = field(default_factory=list)


@dataclass(frozen=True)
class ChangeRatios:
    """Счетчики сопоставленных и пригодных строк изменения"""
    category: Optional[Category]
    matched_pre: int
    eligible_pre: int
    matched_post: int
    eligible_post: int

    @property
    def rho_pre(self) -> float:
        return self.matched_pre / self.eligible_pre if self.eligible_pre else 0.0

    @property
    def rho_post(self) -> float:
        return self.matched_post / self.eligible_post if self.eligible_post else 0.0

    @property
    def bin_pre(self) -> Bin:
        return Bin.for_ratio(self.rho_pre, self.matched_pre)

    @property
    def bin_post(self) -> Bin:
        return Bin.for_ratio(self.rho_post, self.matched_post)

    @property
    def degenerate_pre(self) -> bool:
        """Нет ни одной пригодной строки пред-образа"""
        return self.eligible_pre == 0

    @property
    def degenerate_post(self) -> bool:
        """Нет ни одной пригодной строки пост-образа"""
        return self.eligible_post == 0


@dataclass
class AlignmentResult:
    """Результат сопоставления изменения с перепиской"""
    change: ResolvedChange
    hunks: List[HunkAlignment]
    ratios: ChangeRatios

    @property
    def rho_pre(self) -> float:
        return self.ratios.rho_pre

    @property
    def rho_post(self) -> float:
        return self.ratios.rho_post

    @property
    def bin_pre(self) -> Bin:
        return self.ratios.bin_pre

    @property
    def bin_post(self) -> Bin:
        return self.ratios.bin_post

    def influenced_lines(self) -> Set[Tuple[str, int]]:
        """(файл, строка) добавленных строк, сопоставленных с ответами"""
        return {
            (match.file_path, match.hunk_line.line_no)
            for hunk in self.hunks
            for match in hunk.post_matches
            if match.hunk_line.kind == LineKind.ADDED
        }

    def post_added_lines(self) -> List[Tuple[str, HunkLine]]:
        """Все добавленные строки пост-образа, по файлу и номеру"""
        lines = [
            (hunk.file_path, line)
            for hunk in self.hunks
            for line in hunk.post_lines
            if line.kind == LineKind.ADDED
        ]
        return sorted(lines, key=lambda item: (item[0], item[1].line_no))

    def post_match_scores(self) -> Dict[Tuple[str, int], SimilarityScore]:
        """Оценка совпадения для каждой влиявшей добавленной строки"""
        return {
            (match.file_path, match.hunk_line.line_no): match.score
            for hunk in self.hunks
            for match in hunk.post_matches
            if match.hunk_line.kind == LineKind.ADDED
        }


def normalize_line(line: str, normalize: bool = True) -> str:
    """Удаление крайних пробелов и схлопывание внутренних"""
    if not normalize:
        return line
    return " ".join(line.split())


def is_blank(line: str) -> bool:
    """Строка пуста или состоит из пробельных символов"""
    return not line.strip()


def eligible_lines(hunk_side_lines: List[HunkLine], side: Side) -> List[HunkLine]:
    """Строки стороны, участвующие в сопоставлении"""
    kinds = ELIGIBLE_KINDS[side]
    return [line for line in hunk_side_lines if line.kind in kinds and not is_blank(line.content)]


def fenced_blocks(text: str) -> List[str]:
    """Содержимое блоков кода, огражденных тремя обратными апострофами"""
    return [match.group(1) for match in FENCED_BLOCK.finditer(text)]


def _segment_lines(text: str, normalize: bool) -> Tuple[str, ...]:
    return tuple(
        normalize_line(line, normalize) for line in text.splitlines() if not is_blank(line)
    )


def candidate_segments(record: ChangeRecord, side: Side, normalize: bool = True) -> List[Segment]:
    """Сегменты-кандидаты в порядке: переписка, пара, текст, листинги"""
    segments: List[Segment] = []
    for conversation in record.conversations:
        for turn_index, turn in enumerate(conversation.turns):
            if side == Side.PRE:
                text, section = turn.prompt_text, Section.PROMPT_TEXT
                listings = fenced_blocks(turn.prompt_text)
            else:
                text, section = turn.answer_text, Section.ANSWER_TEXT
                listings = [listing.content for listing in turn.listings]
                known = {content.strip() for content in listings}
                listings += [block for block in fenced_blocks(turn.answer_text) if block.strip() not in known]

            if text:
                ref = SegmentRef(conversation.conversation_id, turn_index, section)
                segments.append(Segment(ref, _segment_lines(text, normalize)))
            for listing_index, content in enumerate(listings):
                ref = SegmentRef(conversation.conversation_id, turn_index, Section.LISTING, listing_index)
                segments.append(Segment(ref, _segment_lines(content, normalize)))
    return segments


def _segment_score(lines: List[str], segment: Segment) -> float:
    scorer = LineScorer(segment.lines)
    return fmean(scorer.best(line)[1] for line in lines)


def select_best_segment(hunk_side_lines: List[HunkLine], record: ChangeRecord, side: Side,
                        normalize: bool = True) -> Optional[SegmentChoice]:
    """Самый подходящий сегмент переписки для стороны фрагмента"""
    eligible = eligible_lines(hunk_side_lines, side)
    if not eligible:
        return None
    candidates = candidate_segments(record, side, normalize)
    if not candidates:
        return None

    lines = [normalize_line(line.content, normalize) for line in eligible]
    best: Optional[SegmentChoice] = None
    for segment in candidates:
        score = _segment_score(lines, segment)
        if best is None or score > best.score:
            best = SegmentChoice(segment, score)
    return best


def align_lines(hunk_side_lines: List[HunkLine], segment: Segment, side: Side,
                threshold: float = DEFAULT_THRESHOLD, normalize: bool = True,
                file_path: str = "") -> List[LineMatch]:
    """Сопоставление строк фрагмента со строками сегмента с порогом threshold"""
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")

    scorer = LineScorer(segment.lines)
    matches: List[LineMatch] = []
    for line in eligible_lines(hunk_side_lines, side):
        index, score = scorer.best(normalize_line(line.content, normalize))
        if index >= 0 and score >= threshold:
            matches.append(LineMatch(file_path, line, index, score))
    return matches


def align_hunk(hunk: HunkImage, record: ChangeRecord, threshold: float = DEFAULT_THRESHOLD,
               normalize: bool = True) -> HunkAlignment:
    """Сопоставление обеих сторон одного фрагмента"""
    result = HunkAlignment(file_path=hunk.file_path, post_lines=list(hunk.post_lines))
    for side, lines in ((Side.PRE, hunk.pre_lines), (Side.POST, hunk.post_lines)):
        eligible = len(eligible_lines(lines, side))
        choice = select_best_segment(lines, record, side, normalize)
        matches = (
            align_lines(lines, choice.segment, side, threshold, normalize, hunk.file_path)
            if choice else []
        )
        if side == Side.PRE:
            result.pre_segment, result.pre_matches, result.pre_eligible = choice, matches, eligible
        else:
            result.post_segment, result.post_matches, result.post_eligible = choice, matches, eligible
    return result


def influence_ratios(change: ResolvedChange, hunks: List[HunkImage],
                     threshold: float = DEFAULT_THRESHOLD, normalize: bool = True) -> AlignmentResult:
    """Доли сопоставленных строк пред- и пост-образа по всему изменению"""
    aligned = [align_hunk(hunk, change.record, threshold, normalize) for hunk in hunks]
    ratios = ChangeRatios(
        category=change.record.category,
        matched_pre=sum(len(hunk.pre_matches) for hunk in aligned),
        eligible_pre=sum(hunk.pre_eligible for hunk in aligned),
        matched_post=sum(len(hunk.post_matches) for hunk in aligned),
        eligible_post=sum(hunk.post_eligible for hunk in aligned),
    )
    return AlignmentResult(change=change, hunks=aligned, ratios=ratios)
