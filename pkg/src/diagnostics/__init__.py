"""
Diagnostics Package - Per-point rectifiability verdicts, summaries and the analysis pipeline
"""

from .models import CALIBRATION_NOTE, ClassifierConfig, PointVerdict, SummaryReport, Verdict
from .classifier import boundary_flags, classify_point, is_boundary_point, summarize
from .pipeline import AnalysisPipeline, PointResult, measure_info, select_points

__all__ = [
    'CALIBRATION_NOTE',
    'ClassifierConfig',
    'PointVerdict',
    'SummaryReport',
    'Verdict',
    'boundary_flags',
    'classify_point',
    'is_boundary_point',
    'summarize',
    'AnalysisPipeline',
    'PointResult',
    'measure_info',
    'select_points'
]
