"""
Reports Package - CSV, JSON and SVG artifacts of analysis runs
"""

from .writers import ReportWriter, read_verdicts, write_analysis

__all__ = [
    'ReportWriter',
    'read_verdicts',
    'write_analysis'
]
