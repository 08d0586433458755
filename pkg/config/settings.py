"""
Rectifiability Diagnostics - Configuration Settings
Using Pydantic for configuration management and validation
"""

from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings with environment variable support (prefix RECT_)."""

    # Runtime
    threads: int = Field(1, ge=1, description='Worker cap for per-point analysis (RECT_THREADS)')
    log_level: str = Field('INFO')
    log_file: Optional[str] = Field(None)

    # Generators
    point_budget: int = Field(4 ** 11, ge=1)

    # Scale grid
    octaves: float = Field(8.0, gt=0)
    scales_per_octave: int = Field(4, ge=1)
    safety: float = Field(1.0, ge=1.0)
    diam_fraction: float = Field(0.25, gt=0.0, le=0.5)

    # Classifier calibration
    slope_threshold: float = Field(0.005, ge=0.0)
    density_floor: float = Field(0.05, ge=0.0)
    boundary_margin_factor: float = Field(2.0, ge=0.0)

    # Tangent measures
    window: float = Field(5.0, gt=1.0)
    probe_count: int = Field(32, ge=1)

    # Calderon-Zygmund audit
    audit_constant_limit: float = Field(100.0, gt=0.0)

    # Output
    float_digits: int = Field(17, ge=1, le=17)

    @property
    def float_format(self) -> str:
        """printf-style format used for every float written to CSV."""
        return f'%.{self.float_digits}g'

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v):
        allowed_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        if v.upper() not in allowed_levels:
            raise ValueError(f'Log level must be one of: {allowed_levels}')
        return v.upper()

    model_config = {
        'env_prefix': 'RECT_',
        'env_file': '.env',
        'env_file_encoding': 'utf-8',
        'case_sensitive': False,
        'extra': 'ignore'
    }


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get application settings."""
    return settings
