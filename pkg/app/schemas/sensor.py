from pydantic import BaseModel, ConfigDict, Field, model_validator


class StageConfig(BaseModel):
    speed: float = Field(..., gt=0)  # V_s, мм/мин
    sweep_length: float = Field(default=25.0, gt=0)  # мм
    dab_duration: float = Field(default=1000.0, gt=0)  # t_dab, мс
    start_offset: float = Field(default=0.0, ge=0)  # мкм, начальная позиция на профиле

    model_config = ConfigDict(frozen=True)

    @property
    def speed_um_s(self) -> float:
        return self.speed * 1000.0 / 60.0

    @property
    def sweep_duration(self) -> float:
        """Длительность прохода, с"""
        return self.sweep_length * 1000.0 / self.speed_um_s


class SensorSuiteConfig(BaseModel):
    pressure_rate: float = Field(default=157.0, gt=0)  # N_s, Гц
    accel_rate: float = Field(default=1000.0, gt=0)  # N_a, Гц
    laser_rate: float = Field(default=2500.0, gt=0)  # N_l, Гц
    stream_rate: float = Field(default=1000.0, gt=0)  # Гц
    simulation_rate: float = Field(default=10000.0, gt=0)  # Гц, внутренняя сетка модели
    # None - шум в долях RMS сигнала (1% давление, 2% акселерометр)
    pressure_noise_sd: float | None = Field(default=None, ge=0)
    accel_noise_sd: float | None = Field(default=None, ge=0)
    laser_noise_sd: float = Field(default=0.01, ge=0)  # мкм
    whisker_resonance: float = Field(default=250.0, gt=0)  # Гц
    whisker_q: float = Field(default=10.0, gt=0.5)
    stick_slip_threshold: float = Field(default=20.0, ge=0)  # единицы силы

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_rates(self):
        if self.stream_rate < self.pressure_rate:
            raise ValueError("stream_rate должен быть не меньше pressure_rate")

        for name in ("accel_rate", "stream_rate"):
            ratio = self.simulation_rate / getattr(self, name)
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError(f"simulation_rate должен быть кратен {name}")

        if self.whisker_resonance >= self.simulation_rate / 2:
            raise ValueError("Резонанс вибриссы выше частоты Найквиста модели")
        return self


class ConstraintReport(BaseModel):
    rate: float  # Гц
    speed: float  # мм/мин
    d_sep: float  # мкм
    distance_per_sample: float  # D, мкм
    min_resolvable_separation: float  # 2D, мкм
    satisfied: bool
    margin: float  # d_sep/2 - D, мкм


class ConstraintTableRow(BaseModel):
    sensor: str
    rate: float
    distances: dict[float, float]  # V_s -> D
    separations: dict[float, float]  # V_s -> d_sep = 2D
