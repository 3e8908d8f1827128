"""
Статистика: двухвыборочный критерий Колмогорова-Смирнова, доверительные
интервалы медианы, сводные таблицы по категориям
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import kolmogorov
from scipy.stats import binom

from app.dataset.loader import token_count
from app.dataset.schemas import Category, ChangeRecord
from app.exceptions import EmptyCohortError
from app.git.schemas import RepositoryStats
from .alignment import Bin, ChangeRatios, Side
from .survival import DurationSample, kaplan_meier, median_survival

DEFAULT_ALPHA = 0.05
DEFAULT_LEVEL = 0.95


class Decision(Enum):
    """Решение по нулевой гипотезе"""
    REJECT = "REJECT"
    FAIL_TO_REJECT = "FAIL_TO_REJECT"
    NOT_APPLICABLE = "NOT_APPLICABLE"


@dataclass(frozen=True)
class KsResult:
    """Результат двухвыборочного критерия Колмогорова-Смирнова"""
    statistic: float
    p_value: float
    m: int
    n: int


@dataclass(frozen=True)
class KsRow:
    """Строка таблицы попарных сравнений категорий"""
    side: Side
    first: Category
    second: Category
    result: Optional[KsResult]
    decision: Decision


@dataclass(frozen=True)
class MedianCI:
    """Медиана и непараметрический доверительный интервал"""
    median: float
    lo: float
    hi: float
    level: float
    coverage: float
    flagged: bool = False


@dataclass
class CategorySummary:
    """Сводка по категории изменений"""
    category: Category
    changes: int
    conversations: Optional[MedianCI] = None
    prompts: Optional[MedianCI] = None
    prompt_tokens: Optional[MedianCI] = None
    answer_tokens: Optional[MedianCI] = None
    bins_pre: Dict[Bin, int] = field(default_factory=dict)
    bins_post: Dict[Bin, int] = field(default_factory=dict)
    median_survival_all: Optional[float] = None
    median_survival_influenced: Optional[float] = None


@dataclass
class RepositorySummary:
    """Характеристики репозиториев категории"""
    category: Category
    repositories: int
    commits: Optional[MedianCI] = None
    authors: Optional[MedianCI] = None
    age_days: Optional[MedianCI] = None
    extra: Dict[str, MedianCI] = field(default_factory=dict)


def ks_two_sample(x: Sequence[float], y: Sequence[float]) -> KsResult:
    """Статистика D и асимптотическое p-значение"""
    if len(x) == 0 or len(y) == 0:
        raise ValueError("KS test needs two non-empty samples")

    xs = np.sort(np.asarray(x, dtype=float))
    ys = np.sort(np.asarray(y, dtype=float))
    m, n = len(xs), len(ys)
    pooled = np.concatenate([xs, ys])

    cdf_x = np.searchsorted(xs, pooled, side="right") / m
    cdf_y = np.searchsorted(ys, pooled, side="right") / n
    statistic = float(np.max(np.abs(cdf_x - cdf_y)))

    lam = statistic * np.sqrt(m * n / (m + n))
    p_value = float(np.clip(kolmogorov(lam), 0.0, 1.0))
    return KsResult(statistic=statistic, p_value=p_value, m=m, n=n)


@lru_cache(maxsize=None)
def _median_rank(n: int, level: float) -> Tuple[int, float]:
    """Наибольший k, при котором P(k <= B <= n-k) >= level, B ~ Bin(n, 1/2)"""
    for k in range((n + 1) // 2, 0, -1):
        coverage = float(binom.cdf(n - k, n, 0.5) - binom.cdf(k - 1, n, 0.5))
        if coverage >= level:
            return k, coverage
    return 1, float(binom.cdf(n - 1, n, 0.5) - binom.cdf(0, n, 0.5))


def median_ci(sample: Sequence[float], level: float = DEFAULT_LEVEL) -> MedianCI:
    """Интервал [x_(k), x_(n+1-k)] по порядковым статистикам"""
    if len(sample) == 0:
        raise ValueError("median_ci needs a non-empty sample")

    values = np.sort(np.asarray(sample, dtype=float))
    n = len(values)
    k, coverage = _median_rank(n, level)
    return MedianCI(
        median=float(np.median(values)),
        lo=float(values[k - 1]),
        hi=float(values[n - k]),
        level=level,
        coverage=coverage,
        flagged=coverage < level,
    )


def _optional_ci(values: Sequence[float], level: float) -> Optional[MedianCI]:
    return median_ci(values, level) if len(values) else None


def _median_survival_of(samples: Sequence[DurationSample]) -> Optional[float]:
    try:
        return median_survival(kaplan_meier(samples))
    except EmptyCohortError:
        return None


def _bin_counts(results: Iterable[ChangeRatios], side: Side) -> Dict[Bin, int]:
    counts = {b: 0 for b in Bin}
    for result in results:
        counts[result.bin_pre if side == Side.PRE else result.bin_post] += 1
    return counts


def summarize_categories(records: Sequence[ChangeRecord],
                         alignments: Sequence[ChangeRatios] = (),
                         durations: Sequence[DurationSample] = (),
                         level: float = DEFAULT_LEVEL) -> List[CategorySummary]:
    """Одна строка на каждую категорию, включая пустые"""
    summaries: List[CategorySummary] = []
    for category in Category:
        group = [r for r in records if r.category == category and r.is_live]
        results = [a for a in alignments if a.category == category]
        samples = [s for s in durations if s.category == category]

        conversations = [len(r.conversations) for r in group]
        prompts = [c.prompt_count for r in group for c in r.conversations]
        prompt_tokens = [sum(token_count(t.prompt_text) for t in r.turns) for r in group]
        answer_tokens = [sum(token_count(t.answer_text) for t in r.turns) for r in group]

        summaries.append(CategorySummary(
            category=category,
            changes=len(group),
            conversations=_optional_ci(conversations, level),
            prompts=_optional_ci(prompts, level),
            prompt_tokens=_optional_ci(prompt_tokens, level),
            answer_tokens=_optional_ci(answer_tokens, level),
            bins_pre=_bin_counts(results, Side.PRE),
            bins_post=_bin_counts(results, Side.POST),
            median_survival_all=_median_survival_of(samples),
            median_survival_influenced=_median_survival_of([s for s in samples if s.influenced]),
        ))
    return summaries


def ks_category_pairs(alignments: Sequence[ChangeRatios],
                      alpha: float = DEFAULT_ALPHA) -> List[KsRow]:
    """Попарные сравнения распределений rho по категориям, по сторонам отдельно"""
    rows: List[KsRow] = []
    for side in Side:
        ratios: Dict[Category, List[float]] = {category: [] for category in Category}
        for result in alignments:
            category = result.category
            if category is None:
                continue
            # Изменения без пригодных строк на стороне в сравнение не входят
            if side == Side.PRE and not result.degenerate_pre:
                ratios[category].append(result.rho_pre)
            elif side == Side.POST and not result.degenerate_post:
                ratios[category].append(result.rho_post)

        for first, second in combinations(Category, 2):
            x, y = ratios[first], ratios[second]
            if not x or not y:
                rows.append(KsRow(side, first, second, None, Decision.NOT_APPLICABLE))
                continue
            result_ks = ks_two_sample(x, y)
            decision = Decision.REJECT if result_ks.p_value < alpha else Decision.FAIL_TO_REJECT
            rows.append(KsRow(side, first, second, result_ks, decision))
    return rows


def summarize_repositories(records: Sequence[ChangeRecord],
                           repositories: Sequence[RepositoryStats],
                           level: float = DEFAULT_LEVEL) -> List[RepositorySummary]:
    """Медианы характеристик различных репозиториев каждой категории"""
    by_url = {stats.repo_url: stats for stats in repositories}
    summaries: List[RepositorySummary] = []
    for category in Category:
        urls = sorted({r.repo_url for r in records if r.category == category and r.repo_url in by_url})
        group = [by_url[url] for url in urls]

        extra: Dict[str, List[float]] = {}
        for stats in group:
            for name, value in stats.extra:
                extra.setdefault(name, []).append(value)

        summaries.append(RepositorySummary(
            category=category,
            repositories=len(group),
            commits=_optional_ci([s.commit_count for s in group], level),
            authors=_optional_ci([s.author_count for s in group], level),
            age_days=_optional_ci([s.age_days for s in group], level),
            extra={name: median_ci(values, level) for name, values in sorted(extra.items())},
        ))
    return summaries
