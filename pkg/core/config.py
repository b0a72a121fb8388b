from pydantic import BaseModel, ConfigDict, Field, field_validator

from core.grid import DEFAULT_GRID, is_power_of_two
from core.points import DEFAULT_PRECISION


class RunConfig(BaseModel):
    """Settings shared by every command of one run."""

    model_config = ConfigDict(frozen=True)

    precision: int = Field(default=DEFAULT_PRECISION, ge=53, description="binary precision of real points")
    grid: int = Field(default=DEFAULT_GRID, description="grid resolution N")
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    burn_in: int = Field(default=1000, ge=0)
    near_zero: float = Field(default=2.0 ** -40, gt=0, lt=1)

    @field_validator('grid')
    @classmethod
    def _grid_power_of_two(cls, value: int) -> int:
        if not is_power_of_two(value):
            raise ValueError(f"grid must be a power of two, got {value}")
        return value
