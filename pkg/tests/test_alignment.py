"""
Тесты сопоставления фрагментов с перепиской
"""

import itertools
import random
from typing import List

import pytest

from app.analysis.alignment import (
    Bin, Section, Segment, SegmentRef, Side, align_lines, candidate_segments, eligible_lines,
    fenced_blocks, influence_ratios, normalize_line, select_best_segment
)
from app.dataset.schemas import Category, ChangeRecord, CodeListing, Conversation, Turn
from app.git.schemas import HunkImage, HunkLine, LineKind, ResolvedChange


def _added(*contents: str) -> List[HunkLine]:
    return [HunkLine(i + 1, content, LineKind.ADDED) for i, content in enumerate(contents)]


def _segment(*lines: str) -> Segment:
    return Segment(SegmentRef("conv-1", 0, Section.LISTING, 0), tuple(lines))


def _hunk(post_lines: List[HunkLine], pre_lines: List[HunkLine] = None) -> HunkImage:
    return HunkImage(
        file_path="app.py", pre_start=0, pre_count=len(pre_lines or []),
        post_start=1, post_count=len(post_lines),
        pre_lines=list(pre_lines or []), post_lines=list(post_lines),
    )


class TestNormalization:
    """Тесты подготовки строк"""

    def test_whitespace_is_collapsed(self):
        """Крайние пробелы удаляются, внутренние схлопываются"""
        assert normalize_line("   return   x  + 1 ") == "return x + 1"
        assert normalize_line("  x ", normalize=False) == "  x "

    def test_blank_lines_are_not_eligible(self):
        """Пустые строки и строки не своей стороны исключаются"""
        lines = [
            HunkLine(1, "x = 1", LineKind.ADDED),
            HunkLine(2, "   ", LineKind.ADDED),
            HunkLine(3, "y = 2", LineKind.CONTEXT),
        ]
        assert [line.line_no for line in eligible_lines(lines, Side.POST)] == [1, 3]
        assert [line.line_no for line in eligible_lines(lines, Side.PRE)] == [3]

    def test_fenced_blocks(self):
        """Содержимое блоков кода в тексте"""
        text = "Try this:\n```python\nx = 1\n```\nand\n```\ny = 2\n```"
        assert fenced_blocks(text) == ["x = 1\n", "y = 2\n"]


class TestCandidateSegments:
    """Тесты порядка сегментов"""

    def test_order_and_sections(self, make_record):
        """Текст раньше листингов, запросы для PRE, ответы для POST"""
        record = make_record(
            prompt="Fix this:\n```\nold()\n```",
            answer="Done.",
            listings=["new()\n"],
        )
        pre = candidate_segments(record, Side.PRE)
        post = candidate_segments(record, Side.POST)

        assert [str(segment.ref) for segment in pre] == ["conv-1#0:PROMPT_TEXT", "conv-1#0:LISTING(0)"]
        assert pre[1].lines == ("old()",)
        assert [str(segment.ref) for segment in post] == ["conv-1#0:ANSWER_TEXT", "conv-1#0:LISTING(0)"]

    def test_answer_block_equal_to_listing_is_not_duplicated(self, make_record):
        """Блок из ответа, уже присутствующий среди листингов"""
        record = make_record(answer="```\nnew()\n```\n```\nextra()\n```", listings=["new()\n"])
        refs = [segment.ref for segment in candidate_segments(record, Side.POST)]
        listings = [ref for ref in refs if ref.section == Section.LISTING]
        assert len(listings) == 2


class TestSelectBestSegment:
    """Тесты выбора сегмента"""

    def test_listing_of_third_turn(self, make_record):
        """Строки совпадают с листингом #0 пары 2"""
        code = "def area(r):\n    return 3.14 * r * r\n"
        turns = [
            Turn(prompt_text="Hello", answer_text="Hi there"),
            Turn(prompt_text="Explain loops", answer_text="A loop repeats code"),
            Turn(prompt_text="Write area", answer_text="Here:", listings=(CodeListing(code),)),
        ]
        record = make_record(turns=turns)
        choice = select_best_segment(_added("def area(r):", "    return 3.14 * r * r"), record, Side.POST)

        assert choice.ref == SegmentRef("conv-1", 2, Section.LISTING, 0)
        assert choice.score == pytest.approx(1.0)

    def test_zero_scores_pick_first_segment(self, make_record):
        """Все оценки нулевые: первый сегмент"""
        record = make_record(answer="abc", listings=["def\n"])
        choice = select_best_segment(_added("zzz"), record, Side.POST)
        assert choice.ref == SegmentRef("conv-1", 0, Section.ANSWER_TEXT)
        assert choice.score == 0.0

    def test_empty_conversation(self, make_record):
        """Переписка без пар"""
        record = make_record(turns=[])
        assert select_best_segment(_added("x = 1"), record, Side.POST) is None

    def test_no_eligible_lines(self, make_record):
        """Нет пригодных строк на стороне"""
        record = make_record(answer="x = 1")
        assert select_best_segment([], record, Side.POST) is None


class TestAlignLines:
    """Тесты сопоставления строк с порогом"""

    def test_exact_match(self):
        """Точное совпадение"""
        matches = align_lines(_added("return x + 1"), _segment("y = 0", "return x + 1"), Side.POST)
        assert len(matches) == 1
        assert matches[0].score == pytest.approx(1.0)
        assert matches[0].segment_line_index == 1

    def test_only_similar_line_matches(self):
        """Вторая строка ниже порога"""
        matches = align_lines(_added("foo(a)", "bar(b)"), _segment("foo(a)"), Side.POST)
        assert [match.hunk_line.content for match in matches] == ["foo(a)"]

    def test_threshold_is_inclusive(self):
        """Оценка 0.6 проходит порог 0.6"""
        assert len(align_lines(_added("abcde"), _segment("abcxy"), Side.POST, threshold=0.6)) == 1
        assert align_lines(_added("abcdefgh"), _segment("abcdeXYZW"), Side.POST, threshold=0.6) == []

    def test_invalid_threshold(self):
        """Порог вне (0, 1]"""
        with pytest.raises(ValueError):
            align_lines(_added("x"), _segment("x"), Side.POST, threshold=0.0)
        with pytest.raises(ValueError):
            align_lines(_added("x"), _segment("x"), Side.POST, threshold=1.5)

    def test_matches_shrink_as_threshold_grows(self):
        """Число совпадений не растет с ростом порога"""
        rng = random.Random(17)
        thresholds = [0.1, 0.3, 0.5, 0.6, 0.8, 1.0]
        for _ in range(100):
            segment = _segment(*(
                "".join(rng.choice("abc ") for _ in range(rng.randint(1, 8))) for _ in range(4)
            ))
            lines = _added(*(
                "".join(rng.choice("abc ") for _ in range(rng.randint(1, 8))) for _ in range(5)
            ))
            counts = [len(align_lines(lines, segment, Side.POST, threshold=t)) for t in thresholds]
            assert counts == sorted(counts, reverse=True)

    def test_normalization_toggle(self):
        """Без нормализации отступы влияют на оценку"""
        segment = _segment("return x")
        assert align_lines(_added("    return   x"), segment, Side.POST)[0].score == pytest.approx(1.0)
        raw = align_lines(_added("    return   x"), segment, Side.POST, threshold=0.1, normalize=False)
        assert raw[0].score < 1.0


class TestInfluenceRatios:
    """Тесты долей влияния"""

    LINES = ("total = price * qty", "import sys", "print(result)", "return None")

    def _result(self, make_record, listing: str, threshold: float = 0.6):
        record = make_record(listings=[listing])
        change = ResolvedChange(record=record, base_commit="a", head_commit="b")
        return influence_ratios(change, [_hunk(_added(*self.LINES))], threshold)

    def test_all_lines_matched(self, make_record):
        """Все четыре строки из листинга"""
        result = self._result(make_record, "\n".join(self.LINES))
        assert result.rho_post == pytest.approx(1.0)
        assert result.bin_post == Bin.Q4
        assert len(result.influenced_lines()) == 4

    def test_one_of_four_matched(self, make_record):
        """Доля 0.25 попадает в первый интервал"""
        result = self._result(make_record, "total = price * qty")
        assert result.ratios.matched_post == 1
        assert result.rho_post == pytest.approx(0.25)
        assert result.bin_post == Bin.Q1
        assert result.influenced_lines() == {("app.py", 1)}

    def test_nothing_matched(self, make_record):
        """Нет совпадений"""
        result = self._result(make_record, "@@@@@@@@")
        assert result.rho_post == 0.0
        assert result.bin_post == Bin.NO_IMPACT

    def test_degenerate_pre_side(self, make_record):
        """Нет строк пред-образа"""
        result = self._result(make_record, "total = price * qty")
        assert result.ratios.degenerate_pre
        assert result.rho_pre == 0.0
        assert result.bin_pre == Bin.NO_IMPACT

    def test_post_added_lines_are_sorted(self, make_record):
        """Все добавленные строки, по номеру"""
        result = self._result(make_record, "total = price * qty")
        assert [line.line_no for _, line in result.post_added_lines()] == [1, 2, 3, 4]

    def test_post_added_lines_skip_context(self, make_record):
        """Строки контекста не входят в добавленные, файлы упорядочены"""
        record = make_record(listings=["import sys"])
        change = ResolvedChange(record=record, base_commit="a", head_commit="b")
        with_context = HunkImage(
            file_path="util.py", pre_start=1, pre_count=1, post_start=1, post_count=3,
            pre_lines=[HunkLine(1, "x = 1", LineKind.CONTEXT)],
            post_lines=[
                HunkLine(1, "x = 1", LineKind.CONTEXT),
                HunkLine(2, "import sys", LineKind.ADDED),
                HunkLine(3, "y = 2", LineKind.ADDED),
            ],
        )
        result = influence_ratios(change, [with_context, _hunk(_added("print(x)"))])

        assert result.hunks[0].post_lines == with_context.post_lines
        assert [(path, line.line_no) for path, line in result.post_added_lines()] == [
            ("app.py", 1), ("util.py", 2), ("util.py", 3),
        ]
        assert result.influenced_lines() == {("util.py", 2)}

    def test_rho_independent_of_conversation_order(self):
        """Перестановка переписок не меняет доли при различных оценках"""
        conversations = (
            Conversation("conv-a", (Turn(
                prompt_text="count = 0\nname = input()",
                answer_text="Use these lines:",
                listings=(CodeListing("total = price * qty\nimport sys"),),
            ),)),
            Conversation("conv-b", (Turn(
                prompt_text="name = input()",
                answer_text="print(result)",
            ),)),
            Conversation("conv-c", (Turn(answer_text="return None"),)),
        )
        hunks = [
            _hunk(
                _added("total = price * qty", "import sys", "print(result)"),
                [HunkLine(1, "count = 0", LineKind.REMOVED), HunkLine(2, "name = input()", LineKind.REMOVED)],
            ),
            HunkImage(
                file_path="other.py", pre_start=0, pre_count=0, post_start=1, post_count=2,
                post_lines=_added("return None", "raise ValueError"),
            ),
        ]

        observed = set()
        for order in itertools.permutations(conversations):
            record = ChangeRecord(
                category=Category.COMMIT, repo_url="r", change_id="c", conversations=tuple(order),
            )
            change = ResolvedChange(record=record, base_commit="a", head_commit="b")
            result = influence_ratios(change, hunks)
            observed.add((result.ratios.matched_pre, result.ratios.matched_post, result.rho_pre, result.rho_post))

        assert observed == {(2, 3, 1.0, 0.6)}

    def test_category_is_kept(self, make_record):
        """Категория записи переходит в счетчики"""
        record = make_record(category=Category.PULL_REQUEST, listings=["x"])
        change = ResolvedChange(record=record, base_commit="a", head_commit="b")
        assert influence_ratios(change, []).ratios.category == Category.PULL_REQUEST

    def test_segments_from_every_conversation(self, make_record):
        """Несколько переписок: сегменты из всех"""
        base = make_record(listings=["import sys"])
        record = ChangeRecord(
            category=base.category, repo_url=base.repo_url, change_id=base.change_id,
            conversations=base.conversations + (
                Conversation("conv-2", (Turn(answer_text="x", listings=(CodeListing("return None"),)),)),
            ),
        )
        change = ResolvedChange(record=record, base_commit="a", head_commit="b")
        result = influence_ratios(change, [_hunk(_added("return None"))])
        assert result.hunks[0].post_segment.ref.conversation_id == "conv-2"


class TestBin:
    """Тесты интервалов"""

    @pytest.mark.parametrize("rho,matched,expected", [
        (0.0, 0, Bin.NO_IMPACT),
        (0.01, 1, Bin.Q1),
        (0.25, 1, Bin.Q1),
        (0.26, 1, Bin.Q2),
        (0.5, 2, Bin.Q2),
        (0.75, 3, Bin.Q3),
        (0.76, 3, Bin.Q4),
        (1.0, 4, Bin.Q4),
    ])
    def test_boundaries(self, rho, matched, expected):
        """Правые границы интервалов включены"""
        assert Bin.for_ratio(rho, matched) == expected
