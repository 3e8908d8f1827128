"""
Анализ выживаемости строк: длительности, оценка Каплана-Мейера, когорты
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.dataset.schemas import Category
from app.exceptions import EmptyCohortError
from app.git.schemas import LineFate

logger = logging.getLogger(__name__)

SECONDS_PER_DAY = 86400.0

COHORT_GROUPS = ("all", "influenced", "not_influenced")


@dataclass(frozen=True)
class DurationSample:
    """Длительность жизни строки в днях"""
    duration: float
    event: bool
    influenced: bool
    category: Optional[Category]
    clamped: bool = False
    file_path: str = ""
    line_no: int = 0
    change_id: str = ""


@dataclass(frozen=True)
class SurvivalCurve:
    """Ступенчатая оценка функции выживания"""
    times: np.ndarray
    at_risk: np.ndarray
    events: np.ndarray
    survival: np.ndarray
    samples: int
    censored: int

    @property
    def event_count(self) -> int:
        return int(self.events.sum())

    def at(self, t: float) -> float:
        """S(t), непрерывная справа"""
        index = int(np.searchsorted(self.times, t, side="right"))
        return 1.0 if index == 0 else float(self.survival[index - 1])


@dataclass(frozen=True)
class Cohort:
    """Когорта строк: группа влияния и категория"""
    group: str
    category: Optional[Category] = None

    @property
    def name(self) -> str:
        if self.category is None:
            return self.group
        return f"{self.group}_{self.category.value}"

    def contains(self, sample: DurationSample) -> bool:
        if self.category is not None and sample.category != self.category:
            return False
        if self.group == "influenced":
            return sample.influenced
        if self.group == "not_influenced":
            return not sample.influenced
        return True


def build_samples(fates: Iterable[LineFate],
                  labels: Mapping[Tuple[str, int], Tuple[bool, Optional[Category]]],
                  change_id: str = "") -> List[DurationSample]:
    """Перевод судеб строк в длительности; отрицательные обнуляются"""
    samples: List[DurationSample] = []
    for fate in fates:
        influenced, category = labels.get((fate.file_path, fate.line_no), (False, None))
        end = fate.tip_time if fate.death_time is None else fate.death_time
        raw = end - fate.birth_time
        clamped = raw < 0
        if clamped:
            logger.warning(
                f"{fate.file_path}:{fate.line_no}: negative duration {raw}s clamped to 0"
            )
        samples.append(DurationSample(
            duration=max(raw, 0) / SECONDS_PER_DAY,
            event=not fate.censored,
            influenced=influenced,
            category=category,
            clamped=clamped,
            file_path=fate.file_path,
            line_no=fate.line_no,
            change_id=change_id,
        ))
    return samples


def kaplan_meier(samples: Sequence[DurationSample]) -> SurvivalCurve:
    """Оценка Каплана-Мейера; при совпадении времен события идут раньше цензурирования"""
    if not samples:
        raise EmptyCohortError("Cannot estimate survival of an empty cohort")

    durations = np.sort(np.array([sample.duration for sample in samples], dtype=float))
    event_durations = np.sort(np.array(
        [sample.duration for sample in samples if sample.event], dtype=float
    ))
    times = np.unique(event_durations)

    # n_i = #(duration >= t_i), d_i = #(событие в t_i)
    at_risk = len(durations) - np.searchsorted(durations, times, side="left")
    events = (
        np.searchsorted(event_durations, times, side="right")
        - np.searchsorted(event_durations, times, side="left")
    )
    survival = np.cumprod(1.0 - events / at_risk) if len(times) else np.array([], dtype=float)

    return SurvivalCurve(
        times=times,
        at_risk=at_risk.astype(int),
        events=events.astype(int),
        survival=survival,
        samples=len(samples),
        censored=len(samples) - len(event_durations),
    )


def median_survival(curve: SurvivalCurve) -> Optional[float]:
    """Первое время с S <= 0.5; None, если кривая не опускается до 0.5"""
    below = np.nonzero(curve.survival <= 0.5)[0]
    if len(below) == 0:
        return None
    return float(curve.times[below[0]])


def curve_points(curve: SurvivalCurve,
                 grid: Optional[Sequence[float]] = None) -> List[Tuple[float, float]]:
    """Точки ступенчатой кривой: (0, 1) и события, либо значения на сетке"""
    if grid is None:
        points = [(float(t), float(s)) for t, s in zip(curve.times, curve.survival)]
        # событие в момент 0 заменяет начальную точку
        if not points or points[0][0] > 0.0:
            points.insert(0, (0.0, 1.0))
        return points
    return [(float(t), curve.at(t)) for t in grid]


def cohorts() -> List[Cohort]:
    """Все когорты в фиксированном порядке"""
    scopes: List[Optional[Category]] = [None, *Category]
    return [Cohort(group, category) for group in COHORT_GROUPS for category in scopes]


def split_cohorts(samples: Sequence[DurationSample]) -> Dict[Cohort, List[DurationSample]]:
    """Разбиение выборки на когорты (когорты могут пересекаться)"""
    return {cohort: [s for s in samples if cohort.contains(s)] for cohort in cohorts()}
