"""
Generator specifications - validated parameter records for synthetic measures
"""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator


class GeneratorKind(str, Enum):
    """Supported synthetic measure families."""
    PLANE = "plane"
    LIPSCHITZ_GRAPH = "lipschitz_graph"
    CIRCLE = "circle"
    CANTOR4 = "cantor4"
    MIXTURE = "mixture"


class PlaneParams(BaseModel):
    n: int = Field(1, ge=1)
    d: int = Field(2, ge=1)
    L: float = Field(1.0, gt=0)
    s: float = Field(0.01, gt=0)

    @model_validator(mode='after')
    def check_shape(self):
        if self.n > self.d:
            raise ValueError(f'n={self.n} exceeds d={self.d}')
        if self.L < self.s:
            raise ValueError(f'side length L={self.L} is smaller than the grid step s={self.s}')
        return self


class GraphParams(PlaneParams):
    profile: Literal['zero', 'linear', 'sinusoid', 'sawtooth'] = 'sinusoid'
    amplitude: float = 0.1
    slope: float = 0.0
    teeth: int = Field(1, ge=1)
    lipschitz_bound: Optional[float] = Field(None, ge=0)


class CircleParams(BaseModel):
    R: float = Field(1.0, gt=0)
    samples: int = Field(1000, ge=3)
    random_phase: bool = False


class Cantor4Params(BaseModel):
    depth: int = Field(1, ge=1)


class MixtureParams(BaseModel):
    n: int = Field(1, ge=1)
    components: List['GeneratorSpec'] = Field(..., min_length=1)


PARAM_MODELS = {
    GeneratorKind.PLANE: PlaneParams,
    GeneratorKind.LIPSCHITZ_GRAPH: GraphParams,
    GeneratorKind.CIRCLE: CircleParams,
    GeneratorKind.CANTOR4: Cantor4Params,
    GeneratorKind.MIXTURE: MixtureParams,
}


class GeneratorSpec(BaseModel):
    """
    kind + kind-specific params + seed. The seed drives every random choice,
    so the same spec always yields byte-identical measure files.
    """
    kind: GeneratorKind
    params: Dict[str, Any] = Field(default_factory=dict)
    seed: int = Field(0, ge=0, lt=2 ** 64)

    @model_validator(mode='after')
    def validate_params(self):
        model = PARAM_MODELS[self.kind]
        self.params = model.model_validate(self.params).model_dump(mode='json')
        return self

    def typed_params(self):
        """Params parsed into the model for this kind."""
        return PARAM_MODELS[self.kind].model_validate(self.params)


MixtureParams.model_rebuild()
