"""
Тесты статистики
"""

import math
import random

import numpy as np
import pytest

from app.analysis.alignment import Bin, ChangeRatios, Side
from app.analysis.stats import (
    Decision, ks_category_pairs, ks_two_sample, median_ci, summarize_categories, summarize_repositories
)
from app.analysis.survival import DurationSample
from app.dataset.schemas import Category, RecordStatus, Turn
from app.git.schemas import RepositoryStats


def _kolmogorov_series(lam: float) -> float:
    total, k = 0.0, 1
    while True:
        term = 2 * (-1) ** (k - 1) * math.exp(-2 * k * k * lam * lam)
        total += term
        if abs(term) < 1e-12:
            return min(max(total, 0.0), 1.0)
        k += 1


def _brute_force_d(x, y) -> float:
    points = sorted(set(x) | set(y))
    return max(
        abs(sum(v <= t for v in x) / len(x) - sum(v <= t for v in y) / len(y))
        for t in points
    )


class TestKsTwoSample:
    """Тесты критерия Колмогорова-Смирнова"""

    def test_equal_samples(self):
        """Одинаковые выборки"""
        result = ks_two_sample([1, 2, 3], [1, 2, 3])
        assert result.statistic == 0.0
        assert result.p_value == pytest.approx(1.0)

    def test_disjoint_supports(self):
        """Непересекающиеся носители"""
        assert ks_two_sample([1, 2], [3, 4]).statistic == pytest.approx(1.0)

    def test_shifted_samples(self):
        """Сдвиг на единицу"""
        assert ks_two_sample([1, 2, 3, 4], [2, 3, 4, 5]).statistic == pytest.approx(0.25)

    def test_empty_sample(self):
        """Пустая выборка"""
        with pytest.raises(ValueError):
            ks_two_sample([], [1.0])

    def test_brute_force_and_symmetry(self):
        """D по перебору, симметрия D и p"""
        rng = random.Random(1)
        for _ in range(300):
            x = [rng.randint(0, 6) for _ in range(rng.randint(1, 12))]
            y = [rng.randint(0, 6) for _ in range(rng.randint(1, 12))]
            forward, backward = ks_two_sample(x, y), ks_two_sample(y, x)
            assert forward.statistic == pytest.approx(_brute_force_d(x, y))
            assert forward.statistic == pytest.approx(backward.statistic)
            assert forward.p_value == pytest.approx(backward.p_value)
            assert 0.0 <= forward.p_value <= 1.0

    def test_monotone_transform(self):
        """D не меняется при строго возрастающем преобразовании"""
        rng = random.Random(2)
        x = [rng.uniform(0.1, 5) for _ in range(40)]
        y = [rng.uniform(0.5, 6) for _ in range(30)]
        plain = ks_two_sample(x, y).statistic
        assert ks_two_sample(np.log(x), np.log(y)).statistic == pytest.approx(plain)
        assert ks_two_sample([v ** 3 for v in x], [v ** 3 for v in y]).statistic == pytest.approx(plain)

    def test_p_value_matches_series(self):
        """p-значение совпадает с рядом Колмогорова"""
        rng = random.Random(3)
        for _ in range(50):
            x = [rng.gauss(0, 1) for _ in range(rng.randint(20, 60))]
            y = [rng.gauss(0.4, 1) for _ in range(rng.randint(20, 60))]
            result = ks_two_sample(x, y)
            lam = result.statistic * math.sqrt(result.m * result.n / (result.m + result.n))
            if lam >= 0.3:
                assert result.p_value == pytest.approx(_kolmogorov_series(lam), abs=1e-6)

    def test_p_value_decreases_with_distance(self):
        """Чем дальше выборки, тем меньше p"""
        base = list(range(30))
        p_values = [ks_two_sample(base, [v + shift for v in base]).p_value for shift in (0, 5, 10, 20)]
        assert p_values == sorted(p_values, reverse=True)


class TestMedianCI:
    """Тесты доверительного интервала медианы"""

    def test_nine_values(self):
        """Ранги 2 и 8 для n = 9"""
        ci = median_ci([1, 2, 3, 4, 5, 6, 7, 8, 9])
        assert (ci.median, ci.lo, ci.hi) == (5.0, 2.0, 8.0)
        assert ci.coverage == pytest.approx(1 - 20 / 512)
        assert not ci.flagged

    def test_thirty_ones(self):
        """Тридцать единиц"""
        ci = median_ci([1] * 30)
        assert (ci.median, ci.lo, ci.hi) == (1.0, 1.0, 1.0)

    def test_single_value(self):
        """Одно значение: интервал вырожден, отмечен"""
        ci = median_ci([7])
        assert (ci.median, ci.lo, ci.hi) == (7.0, 7.0, 7.0)
        assert ci.flagged

    def test_interval_contains_median(self):
        """lo <= median <= hi"""
        rng = random.Random(4)
        for _ in range(200):
            sample = [rng.uniform(-10, 10) for _ in range(rng.randint(1, 40))]
            ci = median_ci(sample)
            assert ci.lo <= ci.median <= ci.hi

    def test_empirical_coverage(self):
        """Покрытие на непрерывных данных не ниже уровня (с допуском 2%)"""
        rng = np.random.default_rng(5)
        n, trials = 50, 10000
        samples = np.sort(rng.standard_normal((trials, n)), axis=1)
        ci = median_ci(samples[0])
        k = int(np.searchsorted(samples[0], ci.lo)) + 1
        lo, hi = samples[:, k - 1], samples[:, n - k]
        coverage = np.mean((lo <= 0.0) & (0.0 <= hi))
        assert coverage >= 0.95 - 0.02


def _ratios(category, matched_post, eligible_post, matched_pre=0, eligible_pre=0):
    return ChangeRatios(category, matched_pre, eligible_pre, matched_post, eligible_post)


class TestSummaries:
    """Тесты сводных таблиц"""

    def test_category_rows(self, make_record):
        """Строка на каждую категорию, пустая категория с нулем"""
        records = [
            make_record(change_id="1", prompt="fix the bug", answer="try this fix"),
            make_record(change_id="2", turns=[
                Turn(prompt_text="one", answer_text="a b"),
                Turn(prompt_text="two three", answer_text="c"),
            ]),
            make_record(change_id="3", category=Category.ISSUE, prompt="why", answer="because"),
            make_record(change_id="4", status=RecordStatus.EXPIRED_LINK),
        ]
        durations = [
            DurationSample(1.0, True, True, Category.COMMIT),
            DurationSample(2.0, False, False, Category.COMMIT),
            DurationSample(3.0, False, False, Category.COMMIT),
        ]
        alignments = [_ratios(Category.COMMIT, 1, 4), _ratios(Category.COMMIT, 0, 4)]
        rows = {row.category: row for row in summarize_categories(records, alignments, durations)}

        commit = rows[Category.COMMIT]
        assert commit.changes == 2
        assert commit.conversations.median == 1.0
        assert commit.prompts.median == 1.5
        assert commit.prompt_tokens.median == 3.0
        assert commit.answer_tokens.median == pytest.approx(3.0)
        assert commit.bins_post[Bin.Q1] == 1
        assert commit.bins_post[Bin.NO_IMPACT] == 1
        assert commit.median_survival_influenced == 1.0
        assert commit.median_survival_all is None

        assert rows[Category.ISSUE].changes == 1
        assert rows[Category.ISSUE].prompt_tokens.median == 1.0

        empty = rows[Category.PULL_REQUEST]
        assert empty.changes == 0
        assert empty.conversations is None
        assert sum(empty.bins_post.values()) == 0

    def test_ks_pairs(self):
        """Шесть строк: три пары категорий на каждую сторону"""
        alignments = [
            _ratios(Category.COMMIT, 1, 4, 1, 2),
            _ratios(Category.COMMIT, 2, 4, 0, 0),
            _ratios(Category.PULL_REQUEST, 4, 4, 2, 2),
        ]
        rows = ks_category_pairs(alignments)
        assert [(row.side, row.first, row.second) for row in rows] == [
            (Side.PRE, Category.COMMIT, Category.PULL_REQUEST),
            (Side.PRE, Category.COMMIT, Category.ISSUE),
            (Side.PRE, Category.PULL_REQUEST, Category.ISSUE),
            (Side.POST, Category.COMMIT, Category.PULL_REQUEST),
            (Side.POST, Category.COMMIT, Category.ISSUE),
            (Side.POST, Category.PULL_REQUEST, Category.ISSUE),
        ]
        assert rows[0].result.m == 1
        assert rows[3].result.m == 2
        assert rows[1].decision == Decision.NOT_APPLICABLE
        assert rows[1].result is None

    def test_repository_summary(self, make_record):
        """Различные репозитории категории"""
        records = [
            make_record(change_id="1", repo_url="r1"),
            make_record(change_id="2", repo_url="r1"),
            make_record(change_id="3", repo_url="r2"),
        ]
        stats = [
            RepositoryStats("r1", "main", "a" * 40, 10, 2, 30.0, (("stars", 5.0),)),
            RepositoryStats("r2", "main", "b" * 40, 20, 4, 60.0, (("stars", 7.0),)),
        ]
        rows = {row.category: row for row in summarize_repositories(records, stats)}
        assert rows[Category.COMMIT].repositories == 2
        assert rows[Category.COMMIT].commits.median == 15.0
        assert rows[Category.COMMIT].extra["stars"].median == 6.0
        assert rows[Category.ISSUE].repositories == 0
        assert rows[Category.ISSUE].commits is None
