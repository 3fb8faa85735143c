"""Scoring functions and statistics for benchmark and reader-study analysis."""

from .boxes import Box, iou, map_at_thresholds, parse_box
from .bootstrap import CIResult, accuracy_ci, mean_ci
from .labels import FINDINGS_5, FINDINGS_14, LabelVector, label_extract, label_f1
from .options import match_option
from .rouge import rouge_l
from .stats import agreement_ratio, icc, mann_whitney, paired_t

__all__ = [
    "Box",
    "CIResult",
    "FINDINGS_5",
    "FINDINGS_14",
    "LabelVector",
    "accuracy_ci",
    "agreement_ratio",
    "icc",
    "iou",
    "label_extract",
    "label_f1",
    "mann_whitney",
    "map_at_thresholds",
    "match_option",
    "mean_ci",
    "paired_t",
    "parse_box",
    "rouge_l",
]
