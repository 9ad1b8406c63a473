from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ClassFamily(str, Enum):
    HORIZONTAL_MILLING = "H"
    VERTICAL_MILLING = "V"
    TURNING = "T"


class Waveform(str, Enum):
    TRIANGULAR = "triangular"
    SINUSOIDAL = "sinusoidal"
    SAWTOOTH = "sawtooth"


# Форма макрозерна для каждого семейства образцов
FAMILY_WAVEFORMS = {
    ClassFamily.HORIZONTAL_MILLING: Waveform.TRIANGULAR,
    ClassFamily.VERTICAL_MILLING: Waveform.SAWTOOTH,
    ClassFamily.TURNING: Waveform.SINUSOIDAL,
}


class SurfaceSpec(BaseModel):
    class_family: ClassFamily
    subclass_index: int = Field(..., ge=1, le=6)
    rz_target: float = Field(..., ge=2.5, le=50.0)  # мкм
    spatial_period: float = Field(..., gt=0)  # мкм, d_sep профиля
    waveform: Waveform
    noise_amplitude: float = Field(default=0.05, ge=0.0, le=0.2)  # доля rz_target
    seed: int = Field(default=0, ge=0, lt=2**64)

    model_config = ConfigDict(frozen=True)

    @property
    def class_id(self) -> str:
        return f"{self.class_family.value}{self.subclass_index}"


class HardnessSpec(BaseModel):
    name: str
    hardness_rank: int = Field(..., ge=1, le=6)  # 1 - самый мягкий
    rise_time_constant: float = Field(..., gt=0)  # мс
    fall_time_constant: float = Field(..., gt=0)  # мс
    steady_state_pressure: float = Field(..., gt=0)

    model_config = ConfigDict(frozen=True)

    @property
    def class_id(self) -> str:
        return f"hard{self.hardness_rank}"


class SpecimenCatalog(BaseModel):
    roughness: tuple[SurfaceSpec, ...]
    hardness: tuple[HardnessSpec, ...]

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_hardness_order(self):
        # Более твердый материал обязан реагировать строго быстрее
        ranked = sorted(self.hardness, key=lambda spec: spec.hardness_rank)
        for softer, harder in zip(ranked, ranked[1:]):
            if harder.rise_time_constant >= softer.rise_time_constant:
                raise ValueError(f"Постоянная нарастания не убывает с твердостью: {softer.name} -> {harder.name}")
        return self


class RoughnessStats(BaseModel):
    class_id: str
    ra: float
    rz: float
    rq: float
    rz_target: float
    spatial_period: float
