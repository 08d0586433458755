"""
Run configuration - one validated record per analysis run

Config files are flat `key = value` text. Lines starting with # and blank
lines are skipped, `params.<name>` keys feed the generator parameters, and
command-line flags override file values.
"""

import io
import json
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

from dotenv.parser import parse_stream
from pydantic import BaseModel, Field, model_validator

from src.generators.specs import GeneratorKind, GeneratorSpec
from src.utils.errors import FormatError
from .settings import get_settings


def _setting(name: str):
    return lambda: getattr(get_settings(), name)


class RunConfig(BaseModel):
    """Everything an analysis run depends on; config + seed reproduce the run."""

    # Measure source: a CSV file or a generator spec
    measure: Optional[str] = None
    kind: Optional[GeneratorKind] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(0, ge=0)

    # Scale grid
    octaves: float = Field(default_factory=_setting('octaves'), gt=0)
    m: int = Field(default_factory=_setting('scales_per_octave'), ge=1)
    safety: float = Field(default_factory=_setting('safety'), ge=1.0)
    diam_fraction: float = Field(default_factory=_setting('diam_fraction'), gt=0.0, le=0.5)

    # Evaluation points
    points: Literal['all', 'random'] = 'all'
    sample: Optional[int] = Field(None, ge=1)

    # Classifier
    slope_threshold: float = Field(default_factory=_setting('slope_threshold'), ge=0.0)
    density_floor: float = Field(default_factory=_setting('density_floor'), ge=0.0)
    boundary_margin_factor: float = Field(default_factory=_setting('boundary_margin_factor'), ge=0.0)
    smoothed: bool = False

    output: str = 'out'
    threads: Optional[int] = Field(None, ge=1)

    @model_validator(mode='after')
    def check_source(self):
        if (self.measure is None) == (self.kind is None):
            raise ValueError('exactly one of measure (a file) or kind (a generator) must be given')
        if self.points == 'random' and self.sample is None:
            raise ValueError('points = random needs sample')
        return self

    def generator_spec(self) -> Optional[GeneratorSpec]:
        if self.kind is None:
            return None
        return GeneratorSpec(kind=self.kind, params=self.params, seed=self.seed)


def parse_value(text: str) -> Any:
    """JSON scalars (numbers, true/false, null) or the raw string."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_config_text(text: str, source: str = '<config>') -> Dict[str, Any]:
    """
    Parse flat key = value lines with the dotenv parser.

    Raises:
        FormatError: a line that is not 'key = value'
    """
    values: Dict[str, Any] = {}
    params: Dict[str, Any] = {}
    for binding in parse_stream(io.StringIO(text)):
        if binding.key is None and not binding.error:
            continue
        if binding.error or binding.value is None:
            line = binding.original.string.strip()
            raise FormatError(f"{source}:{binding.original.line}: expected 'key = value', got '{line}'")
        if binding.key.startswith('params.'):
            params[binding.key[len('params.'):]] = parse_value(binding.value)
        else:
            values[binding.key] = parse_value(binding.value)
    if params:
        values['params'] = params
    return values


def load_run_config(path: Optional[Union[str, Path]] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    File values first, then every override that is not None.

    Raises:
        FormatError: unreadable or malformed file
        pydantic.ValidationError: values out of range
    """
    values: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise FormatError(f"Config file not found: {path}")
        values = parse_config_text(path.read_text(encoding='utf-8'), str(path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == 'params':
            values['params'] = {**values.get('params', {}), **value}
        else:
            values[key] = value
    return RunConfig(**values)
