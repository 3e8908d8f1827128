"""
Analysis package: сходство строк, сопоставление, выживаемость, статистика
"""

from .similarity import LineScorer, MatchBlock, matching_blocks, matching_characters, ratio
from .alignment import (
    AlignmentResult, Bin, ChangeRatios, LineMatch, Section, Segment, SegmentRef, Side,
    align_lines, candidate_segments, influence_ratios, select_best_segment
)
from .survival import (
    Cohort, DurationSample, SurvivalCurve, build_samples, curve_points,
    kaplan_meier, median_survival, split_cohorts
)
from .stats import (
    CategorySummary, KsResult, MedianCI, ks_category_pairs, ks_two_sample,
    median_ci, summarize_categories
)

__all__ = [
    "LineScorer",
    "MatchBlock",
    "matching_blocks",
    "matching_characters",
    "ratio",
    "AlignmentResult",
    "Bin",
    "ChangeRatios",
    "LineMatch",
    "Section",
    "Segment",
    "SegmentRef",
    "Side",
    "align_lines",
    "candidate_segments",
    "influence_ratios",
    "select_best_segment",
    "Cohort",
    "DurationSample",
    "SurvivalCurve",
    "build_samples",
    "curve_points",
    "kaplan_meier",
    "median_survival",
    "split_cohorts",
    "CategorySummary",
    "KsResult",
    "MedianCI",
    "ks_category_pairs",
    "ks_two_sample",
    "median_ci",
    "summarize_categories",
]
