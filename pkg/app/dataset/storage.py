import io
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from app.core.exceptions import DatasetParseError, MissingHeaderError
from app.models.dataset import LabeledDataset
from app.schemas.dataset import FEATURE_LAYOUT, ChannelSelector, Split

FORMAT_VERSION = 1

META_COLUMNS = ["split", "label", "source_id", "window_index"]

HEADER_KEYS = ("version", "selector", "W", "k", "layout", "class_set", "split_seed", "standardized", "stats_mean", "stats_sd")


def _floats(values: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in values)


def write_dataset(dataset: LabeledDataset, path: Path) -> Path:
    """
    Сохраняет датасет: блок заголовка '# ключ=значение', затем CSV
    split,label,source_id,window_index,f_0,...,f_{Wk-1}.
    """

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    header = {
        "version": FORMAT_VERSION,
        "selector": dataset.selector.value,
        "W": dataset.window,
        "k": dataset.n_channels,
        "layout": dataset.layout,
        "class_set": ",".join(dataset.class_set),
        "split_seed": dataset.split_seed,
        "standardized": str(dataset.standardized).lower(),
        "stats_mean": _floats(dataset.stats_mean),
        "stats_sd": _floats(dataset.stats_sd),
    }

    frame = pd.DataFrame(dataset.features, columns=[f"f_{i}" for i in range(dataset.n_features)])
    frame.insert(0, "window_index", dataset.window_indices)
    frame.insert(0, "source_id", dataset.source_ids)
    frame.insert(0, "label", [dataset.class_set[i] for i in dataset.labels])
    frame.insert(0, "split", dataset.split)

    with path.open("w", encoding="utf-8", newline="") as handle:
        for key, value in header.items():
            handle.write(f"# {key}={value}\n")
        frame.to_csv(handle, index=False, lineterminator="\n")

    logger.info(f"Датасет {dataset.selector.value}, W={dataset.window} ({len(dataset)} окон) сохранен в {path}")
    return path


def _parse_header(lines: list[str]) -> tuple[dict[str, tuple[str, int]], int]:
    """Ключи заголовка с номерами строк и индекс первой строки после заголовка"""

    header = {}
    position = 0
    while position < len(lines) and lines[position].startswith("#"):
        key, sep, value = lines[position][1:].strip().partition("=")
        if not sep:
            raise DatasetParseError(f"malformed header: ожидалось 'ключ=значение', получено {lines[position]!r}", line=position + 1)
        header[key.strip()] = (value.strip(), position + 1)
        position += 1

    if not header:
        raise MissingHeaderError()

    for key in HEADER_KEYS:
        if key not in header:
            raise DatasetParseError(f"malformed header: нет ключа {key}", line=position + 1)

    return header, position


def _header_value(header: dict, key: str, convert):
    value, line = header[key]
    try:
        return convert(value)
    except ValueError as e:
        raise DatasetParseError(f"malformed header: некорректное значение {key}={value!r}", line=line) from e


def read_dataset(path: Path) -> LabeledDataset:
    """
    Читает датасет, записанный write_dataset.

    Raises:
        MissingHeaderError: пустой файл или нет заголовка
        DatasetParseError: ошибка заголовка, число признаков не равно W * k,
            неизвестная метка или часть разбиения; в сообщении номер строки
    """

    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise MissingHeaderError()

    header, position = _parse_header(lines)

    version = _header_value(header, "version", int)
    if version != FORMAT_VERSION:
        raise DatasetParseError(f"unsupported version {version}", line=header["version"][1])

    selector = _header_value(header, "selector", ChannelSelector)
    window = _header_value(header, "W", int)
    n_channels = _header_value(header, "k", int)
    if n_channels != selector.n_channels:
        raise DatasetParseError(f"k={n_channels} не соответствует селектору {selector.value}", line=header["k"][1])

    layout = _header_value(header, "layout", str)
    if layout != FEATURE_LAYOUT:
        raise DatasetParseError(f"неизвестная развертка {layout}", line=header["layout"][1])

    class_set = tuple(label for label in _header_value(header, "class_set", str).split(",") if label)
    split_seed = _header_value(header, "split_seed", int)
    standardized = _header_value(header, "standardized", str) == "true"
    stats_mean = _header_value(header, "stats_mean", lambda v: np.array([float(x) for x in v.split()]))
    stats_sd = _header_value(header, "stats_sd", lambda v: np.array([float(x) for x in v.split()]))

    n_features = window * n_channels
    for key, stats in (("stats_mean", stats_mean), ("stats_sd", stats_sd)):
        if stats.size != n_features:
            raise DatasetParseError(f"{key}: {stats.size} значений вместо W * k = {n_features}", line=header[key][1])

    if position >= len(lines):
        raise DatasetParseError("нет строки с именами колонок", line=position + 1)

    expected_columns = len(META_COLUMNS) + n_features
    column_count = len(lines[position].split(","))
    if column_count != expected_columns:
        raise DatasetParseError(f"feature-length mismatch: {column_count - len(META_COLUMNS)} колонок признаков вместо {n_features}", line=position + 1)

    known = set(class_set)
    splits = {part.value for part in Split}
    for offset, row in enumerate(lines[position + 1 :], start=position + 2):
        fields = row.split(",")
        if len(fields) != expected_columns:
            raise DatasetParseError(f"feature-length mismatch: {len(fields) - len(META_COLUMNS)} признаков вместо W * k = {n_features}", line=offset)
        if fields[0] not in splits:
            raise DatasetParseError(f"неизвестная часть разбиения {fields[0]!r}", line=offset)
        if fields[1] not in known:
            raise DatasetParseError(f"unknown label {fields[1]!r}", line=offset)

    frame = pd.read_csv(
        io.StringIO("\n".join(lines[position:])),
        dtype={"split": str, "label": str, "source_id": str},
        float_precision="round_trip",
    )

    feature_frame = frame.iloc[:, len(META_COLUMNS) :].apply(pd.to_numeric, errors="coerce")
    bad_rows = np.flatnonzero(feature_frame.isna().to_numpy().any(axis=1))
    if bad_rows.size:
        raise DatasetParseError("нечисловое значение признака", line=position + 2 + int(bad_rows[0]))

    try:
        window_indices = frame["window_index"].to_numpy(dtype=np.int64)
    except (TypeError, ValueError) as e:
        raise DatasetParseError("некорректный window_index") from e

    index = {label: i for i, label in enumerate(class_set)}
    return LabeledDataset(
        features=feature_frame.to_numpy(dtype=float).reshape(len(frame), n_features),
        labels=np.array([index[label] for label in frame["label"]], dtype=np.int64),
        source_ids=frame["source_id"].tolist(),
        window_indices=window_indices,
        split=frame["split"].tolist(),
        class_set=class_set,
        stats_mean=stats_mean,
        stats_sd=stats_sd,
        selector=selector,
        window=window,
        n_channels=n_channels,
        split_seed=split_seed,
        standardized=standardized,
    )
