from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.grid import DEFAULT_GRID, is_power_of_two

TailMode = Literal['drop', 'bound-correct', 'asymptotic']


class OperatorConfig(BaseModel):
    """Parameters of the random transfer operator and its fixed-point solver.

    ``tail_mode`` decides what happens to the series terms k > k_max:
    ``drop`` discards them, ``bound-correct`` discards them and reports
    sup|f|/k_max as an error bar, ``asymptotic`` adds the leading-order
    remainder f(0)*psi_1(k_max+1+x) (and its mirror at 1) and also reports
    the bound. The default is ``asymptotic``.
    """

    model_config = ConfigDict(frozen=True)

    p: float = Field(gt=0, le=1, description="weight of the Gauss branch")
    grid: int = Field(default=DEFAULT_GRID, description="grid resolution N")
    k_max: int = Field(default=1000, ge=2, description="series cutoff")
    tail_mode: TailMode = 'asymptotic'
    tol: float = Field(default=1e-10, gt=0)
    max_iter: int = Field(default=10_000, ge=1)

    @field_validator('grid')
    @classmethod
    def _grid_power_of_two(cls, value: int) -> int:
        if not is_power_of_two(value):
            raise ValueError(f"grid must be a power of two, got {value}")
        return value
