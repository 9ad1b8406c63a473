import time

import numpy as np
from loguru import logger

from app.classifiers.base import TrainedModel, training_arrays
from app.models.dataset import LabeledDataset
from app.schemas.classifiers import ModelFamily, SvmConfig


class LinearSvm(TrainedModel):
    """Одна линейная машина f_c(x) = x w_c + b_c на каждый класс"""

    family = ModelFamily.SVM

    def __init__(self, config: SvmConfig, class_set: tuple[str, ...], n_features: int):
        super().__init__(config, class_set, n_features)
        self.weights = np.zeros((n_features, len(class_set)))
        self.bias = np.zeros(len(class_set))

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        return features @ self.weights + self.bias

    def objective(self, features: np.ndarray, targets: np.ndarray) -> float:
        """Сумма по машинам: lambda/2 ||w||^2 + средний шарнирный штраф"""

        margins = targets * self.decision_function(features)
        hinge = np.maximum(0.0, 1.0 - margins).mean(axis=0)
        return float(np.sum(0.5 * self.config.regularization * np.sum(self.weights**2, axis=0) + hinge))

    def get_arrays(self) -> dict[str, np.ndarray]:
        return {"weights": self.weights, "bias": self.bias}

    def set_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        self.weights = np.array(arrays["weights"], dtype=float)
        self.bias = np.array(arrays["bias"], dtype=float)


def one_vs_rest_targets(labels: np.ndarray, n_classes: int) -> np.ndarray:
    """+1 для своего класса, -1 для остальных, (n, C)"""

    targets = -np.ones((labels.size, n_classes))
    targets[np.arange(labels.size), labels] = 1.0
    return targets


def train_svm(dataset: LabeledDataset, config: SvmConfig | None = None) -> LinearSvm:
    """
    Обучает линейный SVM один-против-всех стохастическим субградиентным спуском.

    Шаг на t-м обновлении eta_0 / (1 + t * decay); целевая функция - среднее,
    поэтому дублирование обучающей выборки не меняет решение в режиме
    полного батча.

    loss_history - целевая функция эпохи, усредненная по батчам до их шага;
    в режиме полного батча совпадает с objective в начале эпохи.

    Args:
        dataset: нормированный датасет
        config: гиперпараметры

    Raises:
        InvalidArgumentError: в обучающей части меньше двух классов

    Returns:
        LinearSvm: обученная модель
    """

    config = config or SvmConfig()
    features, labels = training_arrays(dataset)
    model = LinearSvm(config, dataset.class_set, dataset.n_features)
    targets = one_vs_rest_targets(labels, dataset.n_classes)

    rng = np.random.default_rng(config.seed)
    n_samples = labels.size
    batch_size = n_samples if config.batch_size is None else min(config.batch_size, n_samples)
    regularization = config.regularization

    started = time.perf_counter()
    step = 0
    for epoch in range(config.epochs):
        order = rng.permutation(n_samples) if config.batch_size is not None else np.arange(n_samples)
        epoch_objective = 0.0

        for start in range(0, n_samples, batch_size):
            batch = order[start : start + batch_size]
            x, y = features[batch], targets[batch]
            margins = y * model.decision_function(x)
            penalty = 0.5 * regularization * np.sum(model.weights**2)
            epoch_objective += np.maximum(0.0, 1.0 - margins).sum() + batch.size * penalty

            # Субградиент шарнира: -y x там, где отступ меньше единицы
            active = y * (margins < 1.0)
            grad_w = -(x.T @ active) / batch.size + regularization * model.weights
            grad_b = -active.sum(axis=0) / batch.size

            rate = config.learning_rate / (1.0 + step * config.decay)
            model.weights -= rate * grad_w
            model.bias -= rate * grad_b
            step += 1

        model.loss_history.append(float(epoch_objective / n_samples))

    model.train_time = time.perf_counter() - started
    logger.debug(f"SVM: {config.epochs} эпох, {step} шагов, потери {model.loss_history[-1]:.4f}, {model.train_time:.2f} с")
    return model
