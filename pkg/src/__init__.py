"""
Rectifiability Diagnostics - Source Package
"""

__version__ = "1.0.0"
__description__ = "Finite-scale rectifiability diagnostics for point-cloud measures"
