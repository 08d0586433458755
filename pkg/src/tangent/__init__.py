"""
Tangent Package - Blowups of measures and their flatness and uniformity scores
"""

from .blowup import Blowup, blowup
from .scores import (
    BlowupTrace,
    FlatnessScore,
    UniformityScore,
    blowup_trace,
    flatness_beta2,
    log_slope,
    uniformity_score,
)

__all__ = [
    'Blowup',
    'blowup',
    'BlowupTrace',
    'FlatnessScore',
    'UniformityScore',
    'blowup_trace',
    'flatness_beta2',
    'log_slope',
    'uniformity_score'
]
