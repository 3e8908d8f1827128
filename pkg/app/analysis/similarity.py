"""
Сопоставление по Ратклиффу-Обершелпу (gestalt pattern matching)

Движок - difflib.SequenceMatcher без junk-эвристик: при isjunk=None и
autojunk=False он ищет самую длинную общую подстроку (самую раннюю в s1,
затем в s2) и рекурсивно обрабатывает участки слева и справа от нее.
"""

from dataclasses import dataclass
from difflib import SequenceMatcher
from typing import List, Sequence, Tuple

SimilarityScore = float


@dataclass(frozen=True)
class MatchBlock:
    """Совпавший блок: s1[a_start:a_start+length] == s2[b_start:b_start+length]"""
    a_start: int
    b_start: int
    length: int


def _matcher(s1: str, s2: str) -> SequenceMatcher:
    return SequenceMatcher(None, s1, s2, autojunk=False)


def matching_blocks(s1: str, s2: str) -> List[MatchBlock]:
    """Совпавшие блоки, завершенные блоком нулевой длины (|s1|, |s2|)"""
    return [MatchBlock(*block) for block in _matcher(s1, s2).get_matching_blocks()]


def matching_characters(s1: str, s2: str) -> int:
    """K_m - сумма длин совпавших блоков"""
    return sum(block.length for block in matching_blocks(s1, s2))


def ratio(s1: str, s2: str) -> SimilarityScore:
    """D_ro = 2*K_m / (|s1| + |s2|); для двух пустых строк 1.0"""
    return _matcher(s1, s2).ratio()


def ratio_upper_bound(s1: str, s2: str) -> SimilarityScore:
    """Верхняя оценка ratio по пересечению мультимножеств символов"""
    return _matcher(s1, s2).quick_ratio()


class LineScorer:
    """Поиск самой похожей строки сегмента для строк фрагмента"""

    def __init__(self, segment_lines: Sequence[str]):
        self.segment_lines = list(segment_lines)
        self._matchers: List[SequenceMatcher] = []
        for line in self.segment_lines:
            # SequenceMatcher кэширует сведения о второй последовательности
            matcher = SequenceMatcher(None, autojunk=False)
            matcher.set_seq2(line)
            self._matchers.append(matcher)

    def best(self, line: str) -> Tuple[int, SimilarityScore]:
        """(индекс, оценка) лучшей строки сегмента; (-1, 0.0) для пустого сегмента"""
        best_index, best_score = -1, 0.0
        for index, matcher in enumerate(self._matchers):
            matcher.set_seq1(line)
            if best_index >= 0 and (
                matcher.real_quick_ratio() <= best_score or matcher.quick_ratio() <= best_score
            ):
                continue
            score = matcher.ratio()
            if best_index < 0 or score > best_score:
                best_index, best_score = index, score
                if best_score == 1.0:
                    break
        return best_index, best_score
