from enum import Enum
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ModelFamily(str, Enum):
    SVM = "SVM"
    RF = "RF"
    MLP = "MLP"


class SvmConfig(BaseModel):
    """Линейный SVM один-против-всех, стохастический субградиентный спуск"""

    family: Literal["SVM"] = "SVM"
    regularization_c: float = Field(default=1.0, gt=0)
    alpha: float = Field(default=1e-4, gt=0)  # lambda = alpha / C
    epochs: int = Field(default=200, ge=1)
    learning_rate: float = Field(default=0.1, gt=0)  # eta_0
    decay: float = Field(default=1e-3, ge=0)  # eta_t = eta_0 / (1 + t * decay)
    batch_size: int | None = Field(default=256, ge=1)  # None - полный батч
    strategy: Literal["one-vs-rest"] = "one-vs-rest"
    kernel: Literal["linear"] = "linear"
    seed: int = Field(default=0, ge=0)

    model_config = ConfigDict(frozen=True)

    @property
    def regularization(self) -> float:
        return self.alpha / self.regularization_c


class RfConfig(BaseModel):
    """Случайный лес из CART-деревьев с критерием Джини"""

    family: Literal["RF"] = "RF"
    n_trees: int = Field(default=100, ge=1)
    max_depth: int | None = Field(default=10, ge=1)  # None - без ограничения
    features_per_split: int | None = Field(default=None, ge=1)  # None - ceil(sqrt(d))
    min_samples_split: int = Field(default=2, ge=2)
    max_bins: int = Field(default=32, ge=2, le=255)  # интервалов на признак при поиске порога
    impurity: Literal["gini"] = "gini"
    bootstrap: bool = True
    n_jobs: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)

    model_config = ConfigDict(frozen=True)


class MlpConfig(BaseModel):
    """Полносвязная сеть: LayerNorm -> (Dense, ReLU, Dropout) x n -> softmax"""

    family: Literal["MLP"] = "MLP"
    hidden_layers: tuple[int, ...] = (128, 128)
    activation: Literal["relu"] = "relu"
    dropout_rate: float = Field(default=0.2, ge=0.0, lt=1.0)
    input_normalization: bool = True
    learning_rate: float = Field(default=1e-3, gt=0)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    epsilon: float = Field(default=1e-8, gt=0)
    max_epochs: int = Field(default=300, ge=1)
    early_stopping_patience: int = Field(default=20, ge=1)
    early_stopping_min_delta: float = Field(default=1e-4, ge=0.0)  # меньшее улучшение не сбрасывает терпение
    batch_size: int = Field(default=128, ge=1)
    seed: int = Field(default=0, ge=0)

    model_config = ConfigDict(frozen=True)

    @field_validator("hidden_layers")
    @classmethod
    def check_widths(cls, widths: tuple[int, ...]) -> tuple[int, ...]:
        if any(width < 1 for width in widths):
            raise ValueError("Ширина скрытого слоя должна быть положительной")
        return widths


ModelConfig = Annotated[Union[SvmConfig, RfConfig, MlpConfig], Field(discriminator="family")]

DEFAULT_CONFIGS = {
    ModelFamily.SVM: SvmConfig,
    ModelFamily.RF: RfConfig,
    ModelFamily.MLP: MlpConfig,
}


class ExperimentResult(BaseModel):
    """
    Итог эксперимента: точность (mu, sigma^2 в процентах и процентах^2),
    матрица ошибок и время.
    """

    model_family: str  # SVM, RF, MLP
    split: str = "test"
    accuracy_mean: float  # mu, %
    accuracy_variance: float = Field(default=0.0, ge=0)  # sigma^2, %^2, дисперсия генеральной совокупности
    accuracies: list[float]  # % по каждому запуску
    confusion_matrix: list[list[int]]  # строки - истинный класс, столбцы - предсказанный
    class_set: list[str]
    per_class_recall: dict[str, float]
    train_time: float  # с
    inference_time_per_window: float  # мкс
    n_windows: int
    config_fingerprint: dict

    @model_validator(mode="after")
    def check_confusion(self):
        size = len(self.class_set)
        if len(self.confusion_matrix) != size or any(len(row) != size for row in self.confusion_matrix):
            raise ValueError("Матрица ошибок должна быть квадратной по числу классов")
        return self
