from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from app.models.recording import FusedStream, Recording
from app.sensor.fusion import laser_to_stream


def write_recording_csv(stream: FusedStream, path: Path) -> Path:
    """
    Записывает поток в CSV: блок метаданных с префиксом '#',
    затем колонки t_s и каналы потока.
    """

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    frame = pd.DataFrame(stream.values, columns=list(stream.channel_names))
    frame.insert(0, "t_s", np.arange(len(stream)) / stream.rate)

    with path.open("w", encoding="utf-8", newline="") as handle:
        for key, value in stream.metadata.items():
            handle.write(f"# {key}={value}\n")
        handle.write(f"# stream_rate={stream.rate:g}\n")
        frame.to_csv(handle, index=False)

    logger.info(f"Запись {stream.source_id} ({', '.join(stream.channel_names)}) сохранена в {path}")
    return path


def read_recording_csv(path: Path) -> tuple[dict[str, str], pd.DataFrame]:
    """Читает файл записи: метаданные и таблицу отсчетов"""

    metadata = {}
    with Path(path).open(encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            metadata[key] = value

    frame = pd.read_csv(path, comment="#", float_precision="round_trip")
    return metadata, frame


def write_laser_csv(recording: Recording, path: Path) -> Path:
    """Записывает лазерный канал записи в собственной частоте N_l"""

    return write_recording_csv(laser_to_stream(recording), path)
