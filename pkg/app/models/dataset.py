from dataclasses import dataclass, replace

import numpy as np

from app.core.exceptions import EmptyDatasetError, InvalidArgumentError
from app.dataset.splitting import natural_key, stratified_split, train_stats
from app.schemas.dataset import FEATURE_LAYOUT, ChannelSelector, Split


def _frozen(values, dtype=float) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class WindowedSample:
    """
    Окно X_W^j = {x_j, ..., x_{j+W-1}}, развернутое в вектор длины W * k.

    Attributes:
        features: плоский вектор признаков
        label: идентификатор класса
        source_recording: идентификатор записи, из которой вырезано окно
        window_index: номер окна j в записи
    """

    features: np.ndarray
    label: str
    source_recording: str
    window_index: int


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """
    Размеченный датасет окон с фиксированным разбиением.

    Хранится столбцами: i-я строка features соответствует labels[i],
    source_ids[i], window_indices[i] и split[i]. Метки - индексы в class_set.

    Attributes:
        features: матрица (N, W * k)
        labels: индексы классов (N,)
        source_ids: идентификаторы исходных записей (N,)
        window_indices: номера окон внутри записей (N,)
        split: "train" / "val" / "test" для каждого окна (N,)
        class_set: упорядоченные идентификаторы классов
        stats_mean: среднее признаков по обучающей части
        stats_sd: СКО признаков по обучающей части
        selector: набор каналов
        window: W
        n_channels: k
        split_seed: зерно разбиения
        standardized: признаки уже нормированы
    """

    features: np.ndarray
    labels: np.ndarray
    source_ids: np.ndarray
    window_indices: np.ndarray
    split: np.ndarray
    class_set: tuple[str, ...]
    stats_mean: np.ndarray
    stats_sd: np.ndarray
    selector: ChannelSelector
    window: int
    n_channels: int
    split_seed: int
    standardized: bool = False
    layout: str = FEATURE_LAYOUT

    def __post_init__(self):
        object.__setattr__(self, "features", _frozen(self.features).reshape(len(self.labels), -1))
        object.__setattr__(self, "labels", _frozen(self.labels, dtype=np.int64))
        object.__setattr__(self, "source_ids", _frozen(self.source_ids, dtype=object))
        object.__setattr__(self, "window_indices", _frozen(self.window_indices, dtype=np.int64))
        object.__setattr__(self, "split", _frozen(self.split, dtype=object))
        object.__setattr__(self, "class_set", tuple(self.class_set))
        object.__setattr__(self, "stats_mean", _frozen(self.stats_mean))
        object.__setattr__(self, "stats_sd", _frozen(self.stats_sd))
        object.__setattr__(self, "selector", ChannelSelector(self.selector))

        if self.features.shape[1] != self.window * self.n_channels:
            raise InvalidArgumentError(f"Длина признаков {self.features.shape[1]} не равна W * k = {self.window * self.n_channels}")

    @classmethod
    def from_arrays(
        cls,
        features: np.ndarray,
        labels,
        source_ids,
        window_indices,
        selector: ChannelSelector,
        window: int,
        seed: int,
        class_set: tuple[str, ...] | None = None,
    ) -> "LabeledDataset":
        """
        Строит датасет из уже нарезанных окон: стратифицированное разбиение
        по зерну и статистики нормировки только по обучающей части.

        Raises:
            EmptyDatasetError: нет ни одного окна
            InvalidArgumentError: метка вне class_set
        """

        labels = [str(label) for label in labels]
        if not labels:
            raise EmptyDatasetError("В датасете нет ни одного окна")

        class_set = tuple(class_set) if class_set is not None else tuple(sorted(set(labels), key=natural_key))
        index = {label: i for i, label in enumerate(class_set)}
        unknown = sorted(set(labels) - set(index))
        if unknown:
            raise InvalidArgumentError(f"Метки вне набора классов: {unknown}")

        encoded = np.array([index[label] for label in labels], dtype=np.int64)
        features = np.asarray(features, dtype=float).reshape(len(labels), -1)
        split = stratified_split(encoded, seed)
        mean, sd = train_stats(features, split)

        return cls(
            features=features,
            labels=encoded,
            source_ids=list(source_ids),
            window_indices=window_indices,
            split=split,
            class_set=class_set,
            stats_mean=mean,
            stats_sd=sd,
            selector=selector,
            window=window,
            n_channels=features.shape[1] // window,
            split_seed=seed,
        )

    def __len__(self) -> int:
        return int(self.labels.size)

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    @property
    def n_classes(self) -> int:
        return len(self.class_set)

    @property
    def samples(self) -> list[WindowedSample]:
        return [
            WindowedSample(
                features=self.features[i],
                label=self.class_set[self.labels[i]],
                source_recording=str(self.source_ids[i]),
                window_index=int(self.window_indices[i]),
            )
            for i in range(len(self))
        ]

    @property
    def split_assignment(self) -> dict[tuple[str, int], str]:
        """(запись, номер окна) -> часть разбиения"""

        return {(str(source), int(j)): str(part) for source, j, part in zip(self.source_ids, self.window_indices, self.split)}

    def mask(self, split: Split | str) -> np.ndarray:
        return self.split == Split(split).value

    def subset(self, split: Split | str) -> tuple[np.ndarray, np.ndarray]:
        """Признаки и метки одной части разбиения"""

        mask = self.mask(split)
        return self.features[mask], self.labels[mask]

    def class_counts(self, split: Split | str | None = None) -> np.ndarray:
        labels = self.labels if split is None else self.labels[self.mask(split)]
        return np.bincount(labels, minlength=self.n_classes)

    def with_features(self, features: np.ndarray, **changes) -> "LabeledDataset":
        return replace(self, features=features, **changes)

    def equals(self, other: "LabeledDataset") -> bool:
        """Точное совпадение признаков, меток, разбиения и статистик"""

        arrays = ("features", "labels", "window_indices", "stats_mean", "stats_sd")
        scalars = ("class_set", "selector", "window", "n_channels", "split_seed", "standardized", "layout")

        return (
            all(np.array_equal(getattr(self, name), getattr(other, name)) for name in arrays)
            and list(self.source_ids) == list(other.source_ids)
            and list(self.split) == list(other.split)
            and all(getattr(self, name) == getattr(other, name) for name in scalars)
        )
