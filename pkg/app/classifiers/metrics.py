import time

import numpy as np

from app.core.exceptions import InvalidArgumentError
from app.models.dataset import LabeledDataset
from app.schemas.classifiers import ExperimentResult, ModelFamily

# Линейное ядро вместо RBF у эталонной библиотеки
SVM_DEVIATION = "linear one-vs-rest SVM trained by subgradient descent"


def confusion_matrix(labels: np.ndarray, predictions: np.ndarray, n_classes: int) -> np.ndarray:
    """Строки - истинный класс, столбцы - предсказанный"""

    matrix = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(matrix, (np.asarray(labels, dtype=np.int64), np.asarray(predictions, dtype=np.int64)), 1)
    return matrix


def accuracy_percent(matrix: np.ndarray) -> float:
    total = matrix.sum()
    return float(100.0 * np.trace(matrix) / total) if total else 0.0


def per_class_recall(matrix: np.ndarray, class_set) -> dict[str, float]:
    rows = matrix.sum(axis=1)
    return {label: float(matrix[i, i] / rows[i]) if rows[i] else 0.0 for i, label in enumerate(class_set)}


def model_fingerprint(model) -> dict:
    fingerprint = model.fingerprint() if hasattr(model, "fingerprint") else {"family": getattr(getattr(model, "family", None), "value", "custom")}
    if fingerprint.get("family") == ModelFamily.SVM.value:
        fingerprint["deviation"] = SVM_DEVIATION
    return fingerprint


def evaluate(model, dataset: LabeledDataset, split: str = "test") -> ExperimentResult:
    """
    Точность, матрица ошибок и время инференса на части датасета.

    Args:
        model: обученная модель с методом predict
        dataset: датасет, на обучающей части которого обучена модель
        split: "train", "val" или "test"

    Raises:
        InvalidArgumentError: выбранная часть пуста

    Returns:
        ExperimentResult: результат одного прогона (sigma^2 = 0)
    """

    features, labels = dataset.subset(split)
    if labels.size == 0:
        raise InvalidArgumentError(f"Часть {split} датасета пуста")

    started = time.perf_counter()
    predictions = model.predict(features)
    elapsed = time.perf_counter() - started

    matrix = confusion_matrix(labels, predictions, dataset.n_classes)
    accuracy = accuracy_percent(matrix)

    return ExperimentResult(
        model_family=str(model_fingerprint(model).get("family")),
        split=str(split),
        accuracy_mean=accuracy,
        accuracy_variance=0.0,
        accuracies=[accuracy],
        confusion_matrix=matrix.tolist(),
        class_set=list(dataset.class_set),
        per_class_recall=per_class_recall(matrix, dataset.class_set),
        train_time=float(getattr(model, "train_time", 0.0)),
        inference_time_per_window=elapsed / labels.size * 1e6,
        n_windows=int(labels.size),
        config_fingerprint=model_fingerprint(model),
    )


def aggregate_results(results: list[ExperimentResult], fingerprint: dict | None = None) -> ExperimentResult:
    """
    Сводит прогоны в один результат: mu - среднее точностей, sigma^2 -
    дисперсия генеральной совокупности, матрицы ошибок суммируются.
    """

    if not results:
        raise InvalidArgumentError("Нет прогонов для сведения")

    accuracies = [result.accuracy_mean for result in results]
    matrix = np.sum([np.asarray(result.confusion_matrix) for result in results], axis=0)
    first = results[0]

    return ExperimentResult(
        model_family=first.model_family,
        split=first.split,
        accuracy_mean=float(np.mean(accuracies)),
        accuracy_variance=float(np.var(accuracies)),
        accuracies=accuracies,
        confusion_matrix=matrix.tolist(),
        class_set=first.class_set,
        per_class_recall=per_class_recall(matrix, first.class_set),
        train_time=float(np.mean([result.train_time for result in results])),
        inference_time_per_window=float(np.mean([result.inference_time_per_window for result in results])),
        n_windows=int(sum(result.n_windows for result in results)),
        config_fingerprint=fingerprint if fingerprint is not None else first.config_fingerprint,
    )
