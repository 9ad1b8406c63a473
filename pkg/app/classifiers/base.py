from abc import ABC, abstractmethod
from typing import ClassVar

import numpy as np

from app.core.exceptions import InvalidArgumentError
from app.models.dataset import LabeledDataset
from app.schemas.classifiers import ModelFamily


class TrainedModel(ABC):
    """
    Обученный классификатор. После обучения не изменяется и может
    использоваться из нескольких потоков.

    Attributes:
        config: гиперпараметры
        class_set: идентификаторы классов в порядке выходов модели
        n_features: длина входного вектора
        train_time: время обучения, с
        loss_history: значение функции потерь по эпохам
    """

    family: ClassVar[ModelFamily]

    def __init__(self, config, class_set: tuple[str, ...], n_features: int):
        self.config = config
        self.class_set = tuple(class_set)
        self.n_features = int(n_features)
        self.train_time = 0.0
        self.loss_history: list[float] = []

    @property
    def n_classes(self) -> int:
        return len(self.class_set)

    @abstractmethod
    def decision_function(self, features: np.ndarray) -> np.ndarray:
        """Оценки (n, C); предсказание - argmax по строке"""

    def predict(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=float)
        if features.ndim != 2 or features.shape[1] != self.n_features:
            raise InvalidArgumentError(f"Ожидалась матрица (n, {self.n_features}), получено {features.shape}")
        return np.argmax(self.decision_function(features), axis=1)

    @abstractmethod
    def get_arrays(self) -> dict[str, np.ndarray]:
        """Параметры модели для сохранения"""

    @abstractmethod
    def set_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        """Восстанавливает параметры из сохраненных массивов"""

    def fingerprint(self) -> dict:
        return {"family": self.family.value, **self.config.model_dump(mode="json")}


def training_arrays(dataset: LabeledDataset) -> tuple[np.ndarray, np.ndarray]:
    """
    Обучающая часть датасета.

    Raises:
        InvalidArgumentError: обучающая часть пуста или содержит один класс
    """

    features, labels = dataset.subset("train")
    if labels.size == 0:
        raise InvalidArgumentError("Обучающая часть датасета пуста")
    if np.unique(labels).size < 2:
        raise InvalidArgumentError("Для обучения нужно минимум два класса")

    return features, labels
