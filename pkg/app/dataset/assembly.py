from collections import Counter
from typing import Sequence

import numpy as np
from loguru import logger

from app.core.exceptions import EmptyDatasetError, InsufficientSweepsError, InvalidArgumentError
from app.dataset.splitting import SD_FLOOR, natural_key, train_stats
from app.dataset.windowing import window_array
from app.models.dataset import LabeledDataset
from app.models.recording import Recording
from app.schemas.dataset import ChannelSelector
from app.sensor.fusion import decimate_stream, fuse_to_stream, laser_to_stream

# Меньше трех проходов на класс обучать нельзя
MIN_RECORDINGS_PER_CLASS = 3


def _selected_stream(recording: Recording, selector: ChannelSelector, stream_rate: float | None):
    if selector == ChannelSelector.L:
        return laser_to_stream(recording, stream_rate or recording.suite.stream_rate)
    return fuse_to_stream(recording, stream_rate).select(selector.channels)


def assemble_dataset(
    recordings: Sequence[Recording],
    selector: ChannelSelector,
    window: int,
    seed: int,
    stream_rate: float | None = None,
    decimation: int = 1,
    stride: int | None = None,
) -> LabeledDataset:
    """
    Собирает датасет из записей.

    Каждая запись сводится в поток, из него берутся каналы селектора,
    поток прореживается и режется на окна. Разбиение 0.7/0.2/0.1
    стратифицировано по классам и определяется seed.

    Args:
        recordings: записи проходов или касаний
        selector: набор каналов P / A / PA / L
        window: W
        seed: зерно разбиения
        stream_rate: частота потока, по умолчанию из конфигурации записи
        decimation: коэффициент прореживания потока 1..5
        stride: шаг окон, по умолчанию W

    Raises:
        InvalidArgumentError: нет записей
        InsufficientSweepsError: у класса меньше трех записей
        EmptyDatasetError: ни одна запись не дала окна

    Returns:
        LabeledDataset: датасет с разбиением и статистиками нормировки
    """

    if not recordings:
        raise InvalidArgumentError("Нет записей для сборки датасета")

    selector = ChannelSelector(selector)
    counts = Counter(recording.label for recording in recordings)
    for label in sorted(counts, key=natural_key):
        if counts[label] < MIN_RECORDINGS_PER_CLASS:
            raise InsufficientSweepsError(label, counts[label], MIN_RECORDINGS_PER_CLASS)

    blocks, labels, sources, indices = [], [], [], []
    for recording in recordings:
        stream = decimate_stream(_selected_stream(recording, selector, stream_rate), decimation)
        windows = window_array(stream, window, stride)

        blocks.append(windows)
        labels.extend([recording.label] * windows.shape[0])
        sources.extend([recording.recording_id] * windows.shape[0])
        indices.extend(range(windows.shape[0]))

    if not labels:
        raise EmptyDatasetError(f"Ни одна из {len(recordings)} записей не дала окон размера W={window}")

    dataset = LabeledDataset.from_arrays(
        features=np.vstack(blocks),
        labels=labels,
        source_ids=sources,
        window_indices=indices,
        selector=selector,
        window=window,
        seed=seed,
        class_set=tuple(sorted(counts, key=natural_key)),
    )

    logger.debug(
        f"Датасет {selector.value}, W={window}: {len(dataset)} окон, {dataset.n_classes} классов, "
        f"train/val/test = {dataset.mask('train').sum()}/{dataset.mask('val').sum()}/{dataset.mask('test').sum()}"
    )
    return dataset


def standardize(dataset: LabeledDataset) -> LabeledDataset:
    """
    Нормирует признаки (v - mean) / max(sd, 1e-8) по статистикам обучающей части.

    Статистики пересчитываются по нормированной обучающей части, поэтому
    повторное применение ничего не меняет.
    """

    features = (dataset.features - dataset.stats_mean) / np.maximum(dataset.stats_sd, SD_FLOOR)
    mean, sd = train_stats(features, dataset.split)
    return dataset.with_features(features, stats_mean=mean, stats_sd=sd, standardized=True)
