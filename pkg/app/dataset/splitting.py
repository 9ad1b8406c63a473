import re

import numpy as np

from app.schemas.dataset import SPLIT_FRACTIONS, Split

# Нижняя граница стандартного отклонения при нормировке
SD_FLOOR = 1e-8


def natural_key(label: str) -> tuple:
    """Ключ сортировки, при котором H2 идет раньше H10"""

    return tuple(int(part) if part.isdigit() else part for part in re.split(r"(\d+)", label))


def stratified_split(labels: np.ndarray, seed: int) -> np.ndarray:
    """
    Делит окна на train/val/test в пропорции 0.7/0.2/0.1 внутри каждого класса.

    Окна класса перемешиваются генератором с зерном seed, классы обходятся
    в порядке возрастания индекса, поэтому разбиение зависит только от seed.

    Args:
        labels: целочисленные метки окон
        seed: зерно разбиения

    Returns:
        np.ndarray: имя части ("train", "val", "test") для каждого окна
    """

    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    assignment = np.empty(labels.size, dtype=object)

    for label in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == label))
        count = members.size
        n_train = int(np.floor(SPLIT_FRACTIONS[Split.TRAIN] * count + 0.5))
        n_val = min(int(np.floor(SPLIT_FRACTIONS[Split.VAL] * count + 0.5)), count - n_train)

        assignment[members[:n_train]] = Split.TRAIN.value
        assignment[members[n_train : n_train + n_val]] = Split.VAL.value
        assignment[members[n_train + n_val :]] = Split.TEST.value

    return assignment


def train_stats(features: np.ndarray, split: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Среднее и СКО по признакам, только по обучающей части"""

    train = features[split == Split.TRAIN.value]
    if train.shape[0] == 0:
        return np.zeros(features.shape[1]), np.ones(features.shape[1])

    return train.mean(axis=0), train.std(axis=0)
