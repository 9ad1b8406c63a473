from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.config import settings
from app.schemas.classifiers import ExperimentResult, MlpConfig, ModelFamily, RfConfig, SvmConfig
from app.schemas.dataset import ChannelSelector
from app.schemas.sensor import SensorSuiteConfig


class GridSpec(BaseModel):
    """
    Сетка исследования: размеры окна x скорости x селекторы x модели.

    Значения по умолчанию берутся из настроек приложения.
    """

    window_sizes: tuple[int, ...] = Field(default=(50, 100), min_length=1)
    speeds_mm_min: tuple[float, ...] = Field(default=(50.0, 100.0), min_length=1)
    selectors: tuple[ChannelSelector, ...] = Field(default=tuple(ChannelSelector), min_length=1)
    models: tuple[ModelFamily, ...] = Field(default=tuple(ModelFamily), min_length=1)
    n_runs: int = Field(default_factory=lambda: settings.N_RUNS, ge=1)
    seed: int = Field(default_factory=lambda: settings.STUDY_SEED, ge=0)

    # Сбор данных
    classes: tuple[str, ...] | None = None  # подмножество каталога; None - все классы
    sweep_length: float = Field(default_factory=lambda: settings.SWEEP_LENGTH_MM, gt=0)  # мм
    sweeps_per_class: int = Field(default_factory=lambda: settings.SWEEPS_PER_CLASS, ge=1)
    dab_duration: float = Field(default_factory=lambda: settings.DAB_DURATION_MS, gt=0)  # мс
    dabs_per_material: int = Field(default_factory=lambda: settings.DABS_PER_MATERIAL, ge=1)
    stream_rate: float = Field(default_factory=lambda: settings.STREAM_RATE, gt=0)  # Гц

    sensor: SensorSuiteConfig = SensorSuiteConfig()
    svm: SvmConfig = SvmConfig()
    rf: RfConfig = RfConfig()
    mlp: MlpConfig = MlpConfig()

    model_config = ConfigDict(frozen=True)

    @field_validator("window_sizes", "speeds_mm_min", "selectors", "models")
    @classmethod
    def check_axis(cls, values: tuple) -> tuple:
        if len(set(values)) != len(values):
            raise ValueError(f"Повторяющиеся значения на оси сетки: {values}")
        if any(isinstance(v, (int, float)) and not isinstance(v, bool) and v <= 0 for v in values):
            raise ValueError(f"Значения оси должны быть положительными: {values}")
        return values

    def model_settings(self, family: ModelFamily) -> SvmConfig | RfConfig | MlpConfig:
        return {ModelFamily.SVM: self.svm, ModelFamily.RF: self.rf, ModelFamily.MLP: self.mlp}[ModelFamily(family)]


class CellResult(BaseModel):
    """Ячейка сетки: ключ, условия и результат либо текст ошибки"""

    key: str
    model: ModelFamily
    speed: float | None  # мм/мин; None для касаний
    window: int
    selector: ChannelSelector
    factor: int = 1  # коэффициент прореживания
    result: ExperimentResult | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.result is not None


class PredicateCheck(BaseModel):
    """Проверка тренда, вычисленная по ячейкам"""

    name: str
    scope: str
    passed: bool
    detail: str


class StudyReport(BaseModel):
    study: str
    seed: int
    cells: dict[str, CellResult]
    checks: list[PredicateCheck] = []
    warnings: list[str] = []
    emitted_files: list[str] = []

    @property
    def failures(self) -> dict[str, str]:
        return {key: cell.error for key, cell in self.cells.items() if cell.error is not None}

    @property
    def all_checks_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def accuracy(self, key: str) -> float | None:
        cell = self.cells.get(key)
        return cell.result.accuracy_mean if cell is not None and cell.result is not None else None
