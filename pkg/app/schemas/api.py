from pydantic import BaseModel, Field

from app.schemas.sensor import SensorSuiteConfig


class DabRequest(BaseModel):
    class_id: str = Field(..., examples=["hard3"])
    t_dab: float = Field(default=1000.0, gt=0)  # мс
    seed: int = Field(default=0, ge=0)
    suite: SensorSuiteConfig = SensorSuiteConfig()


class DabResponse(BaseModel):
    class_id: str
    material: str
    t_dab: float
    rise_time_measured: float  # мс, 10-90%
    fall_time_measured: float  # мс, 90-10%
    rise_time_expected: float  # мс, tau_r * ln 9
    duration: float  # с
