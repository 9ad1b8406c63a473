import math
import time
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed
from loguru import logger

from app.classifiers.base import TrainedModel, training_arrays
from app.models.dataset import LabeledDataset
from app.schemas.classifiers import ModelFamily, RfConfig

LEAF = -1


@dataclass
class DecisionTree:
    """
    Дерево в виде параллельных массивов по узлам. Для листа feature = -1,
    value - доли классов среди попавших в узел обучающих точек.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    def apply(self, features: np.ndarray) -> np.ndarray:
        """Индекс листа для каждой строки"""

        nodes = np.zeros(features.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[nodes] != LEAF)
        while active.size:
            current = nodes[active]
            goes_left = features[active, self.feature[current]] <= self.threshold[current]
            nodes[active] = np.where(goes_left, self.left[current], self.right[current])
            active = active[self.feature[nodes[active]] != LEAF]
        return nodes

    def predict(self, features: np.ndarray) -> np.ndarray:
        return np.argmax(self.value[self.apply(features)], axis=1)


@dataclass(frozen=True)
class BinnedFeatures:
    """
    Признаки, разложенные по интервалам один раз на лес.

    codes[i, j] - число границ edges[j], меньших x[i, j], поэтому условие
    codes[i, j] <= b равносильно x[i, j] <= edges[j][b].
    """

    codes: np.ndarray  # (n, d), uint8
    edges: tuple[np.ndarray, ...]
    n_bins: int


def bin_features(features: np.ndarray, max_bins: int) -> BinnedFeatures:
    """
    Границы интервалов по каждому признаку.

    Если различных значений не больше max_bins, границы - середины между
    соседними значениями, и поиск порога точный. Иначе границы - квантили.
    """

    codes = np.empty(features.shape, dtype=np.uint8)
    edges = []
    for column_index in range(features.shape[1]):
        column = features[:, column_index]
        distinct = np.unique(column)
        if distinct.size <= max_bins:
            cuts = 0.5 * (distinct[:-1] + distinct[1:])
            # Середина соседних float может совпасть с верхним значением
            cuts = np.where(cuts >= distinct[1:], distinct[:-1], cuts)
        else:
            cuts = np.unique(np.quantile(column, np.linspace(0.0, 1.0, max_bins + 1)[1:-1]))
        codes[:, column_index] = np.searchsorted(cuts, column, side="left")
        edges.append(cuts)

    return BinnedFeatures(codes=codes, edges=tuple(edges), n_bins=max_bins)


def _best_split(node_codes: np.ndarray, labels: np.ndarray, n_classes: int, n_bins: int) -> tuple[int, int] | None:
    """
    Лучшее разбиение по Джини по гистограммам (признак, интервал, класс).

    Args:
        node_codes: коды интервалов строк узла по признакам-кандидатам, (n, k)
        labels: метки строк узла

    Returns:
        (номер кандидата, интервал) или None, если допустимого порога нет
    """

    n_samples, n_candidates = node_codes.shape
    keys = (np.arange(n_candidates) * n_bins + node_codes) * n_classes + labels[:, None]
    hist = np.bincount(keys.ravel(), minlength=n_candidates * n_bins * n_classes).reshape(n_candidates, n_bins, n_classes)

    left_counts = np.cumsum(hist, axis=1)[:, :-1, :].astype(float)
    right_counts = hist.sum(axis=1, keepdims=True) - left_counts
    left_sizes = left_counts.sum(axis=2)
    right_sizes = n_samples - left_sizes
    valid = (left_sizes > 0) & (right_sizes > 0)
    if not valid.any():
        return None

    # n_l * gini_l + n_r * gini_r
    with np.errstate(divide="ignore", invalid="ignore"):
        impurity = left_sizes - np.sum(left_counts**2, axis=2) / left_sizes + right_sizes - np.sum(right_counts**2, axis=2) / right_sizes
    impurity = np.where(valid, impurity, np.inf)

    candidate, bin_index = divmod(int(np.argmin(impurity)), n_bins - 1)
    return candidate, bin_index


def grow_tree(
    binned: BinnedFeatures,
    labels: np.ndarray,
    n_classes: int,
    mtry: int,
    max_depth: int | None,
    min_samples_split: int,
    seed: int,
) -> DecisionTree:
    """
    Строит CART-дерево обходом в глубину без рекурсии.

    В узле просматриваются mtry случайных признаков; если ни один не дает
    допустимого порога, поиск продолжается по остальным.
    """

    rng = np.random.default_rng(seed)
    codes = binned.codes
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(indices: np.ndarray) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(np.bincount(labels[indices], minlength=n_classes) / indices.size)
        return len(feature) - 1

    root_indices = np.arange(labels.size)
    stack = [(new_node(root_indices), root_indices, 0)]

    while stack:
        node, indices, depth = stack.pop()
        node_labels = labels[indices]

        if indices.size < min_samples_split or (max_depth is not None and depth >= max_depth):
            continue
        if np.all(node_labels == node_labels[0]):
            continue

        order = rng.permutation(codes.shape[1])
        split = None
        for candidates in (order[:mtry], order[mtry:]):
            if candidates.size == 0:
                continue
            found = _best_split(codes[np.ix_(indices, candidates)].astype(np.int64), node_labels, n_classes, binned.n_bins)
            if found is not None:
                split = int(candidates[found[0]]), found[1]
                break
        if split is None:
            continue

        split_feature, split_bin = split
        goes_left = codes[indices, split_feature] <= split_bin
        left_indices, right_indices = indices[goes_left], indices[~goes_left]

        feature[node] = split_feature
        threshold[node] = float(binned.edges[split_feature][split_bin])
        left[node] = new_node(left_indices)
        right[node] = new_node(right_indices)

        stack.append((right[node], right_indices, depth + 1))
        stack.append((left[node], left_indices, depth + 1))

    return DecisionTree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=float),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=float).reshape(-1, n_classes),
    )


def _grow_member(binned: BinnedFeatures, labels, n_classes, config: RfConfig, mtry: int, seed: np.random.SeedSequence) -> DecisionTree:
    bootstrap_rng, tree_seed = (np.random.default_rng(s) for s in seed.spawn(2))
    if config.bootstrap:
        sample = bootstrap_rng.integers(0, labels.size, labels.size)
        binned = BinnedFeatures(codes=binned.codes[sample], edges=binned.edges, n_bins=binned.n_bins)
        labels = labels[sample]

    return grow_tree(
        binned,
        labels,
        n_classes,
        mtry,
        config.max_depth,
        config.min_samples_split,
        int(tree_seed.integers(2**63)),
    )


class RandomForest(TrainedModel):
    """Голосование большинством по деревьям"""

    family = ModelFamily.RF

    def __init__(self, config: RfConfig, class_set: tuple[str, ...], n_features: int):
        super().__init__(config, class_set, n_features)
        self.trees: list[DecisionTree] = []

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        """Доля голосов деревьев за каждый класс"""

        votes = np.zeros((features.shape[0], self.n_classes))
        rows = np.arange(features.shape[0])
        for tree in self.trees:
            votes[rows, tree.predict(features)] += 1.0
        return votes / max(len(self.trees), 1)

    def get_arrays(self) -> dict[str, np.ndarray]:
        arrays = {"tree_sizes": np.array([tree.n_nodes for tree in self.trees], dtype=np.int64)}
        for name in ("feature", "threshold", "left", "right", "value"):
            arrays[name] = np.concatenate([getattr(tree, name) for tree in self.trees])
        return arrays

    def set_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        bounds = np.concatenate([[0], np.cumsum(arrays["tree_sizes"])])
        self.trees = [
            DecisionTree(
                feature=np.array(arrays["feature"][start:end], dtype=np.int64),
                threshold=np.array(arrays["threshold"][start:end], dtype=float),
                left=np.array(arrays["left"][start:end], dtype=np.int64),
                right=np.array(arrays["right"][start:end], dtype=np.int64),
                value=np.array(arrays["value"][start:end], dtype=float),
            )
            for start, end in zip(bounds[:-1], bounds[1:])
        ]


def train_rf(dataset: LabeledDataset, config: RfConfig | None = None) -> RandomForest:
    """
    Обучает случайный лес: n_trees CART-деревьев на бутстреп-выборках
    размера обучающей части, в каждом узле ceil(sqrt(d)) случайных признаков.
    Пороги ищутся по интервалам признаков, построенным один раз на лес
    (не больше max_bins интервалов на признак).

    Деревья строятся независимо по своим зернам, поэтому результат
    не зависит от n_jobs.

    Raises:
        InvalidArgumentError: в обучающей части меньше двух классов
    """

    config = config or RfConfig()
    features, labels = training_arrays(dataset)
    model = RandomForest(config, dataset.class_set, dataset.n_features)
    mtry = min(config.features_per_split or math.ceil(math.sqrt(dataset.n_features)), dataset.n_features)

    started = time.perf_counter()
    binned = bin_features(features, config.max_bins)
    seeds = np.random.SeedSequence(config.seed).spawn(config.n_trees)
    model.trees = Parallel(n_jobs=config.n_jobs)(
        delayed(_grow_member)(binned, labels, dataset.n_classes, config, mtry, seed) for seed in seeds
    )
    model.train_time = time.perf_counter() - started

    nodes = sum(tree.n_nodes for tree in model.trees)
    logger.debug(f"RF: {config.n_trees} деревьев, {nodes} узлов, mtry={mtry}, {model.train_time:.2f} с")
    return model
