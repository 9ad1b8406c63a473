import numpy as np

from app.core.exceptions import InvalidArgumentError
from app.models.recording import LASER_CHANNEL, WHISKER_CHANNELS, FusedStream, Recording, SweepRecording

# Допустимые коэффициенты прореживания: 1000, 500, 333, 250, 200 Гц из 1000 Гц
DECIMATION_FACTORS = (1, 2, 3, 4, 5)


def zero_order_hold(values: np.ndarray, native_rate: float, target_rate: float, n_out: int) -> np.ndarray:
    """
    Пересчет на другую частоту удержанием: каждый выходной отсчет берет
    последний пришедший к этому моменту входной отсчет.
    """

    if values.size == 0 or n_out <= 0:
        return np.empty(0)

    indices = np.floor(np.arange(n_out) * native_rate / target_rate + 1e-9).astype(np.int64)
    return values[np.clip(indices, 0, values.size - 1)]


def _metadata(recording: Recording) -> dict:
    metadata = {
        "label": recording.label,
        "kind": recording.kind,
        "seed": recording.seed,
        "rates": ",".join(f"{name}:{rate:g}" for name, rate in recording.rates.items()),
    }
    if isinstance(recording, SweepRecording) and recording.stage is not None:
        metadata["vs_mm_min"] = recording.stage.speed
    return metadata


def fuse_to_stream(recording: Recording, stream_rate: float | None = None) -> FusedStream:
    """
    Сводит каналы вибриссы (P, Ax, Ay, Az) в один k-мерный поток.

    Каждый канал пересчитывается на stream_rate удержанием нулевого порядка.
    Лазер в поток вибриссы не входит, см. laser_to_stream.

    Args:
        recording: запись прохода или касания
        stream_rate: частота потока; по умолчанию из конфигурации датчиков

    Returns:
        FusedStream: поток из floor(duration * stream_rate) отсчетов
    """

    stream_rate = stream_rate or recording.suite.stream_rate
    n_out = int(np.floor(recording.duration * stream_rate + 1e-9))
    names = [name for name in WHISKER_CHANNELS if name in recording.channels]

    columns = [zero_order_hold(recording.channels[name], recording.rates[name], stream_rate, n_out) for name in names]

    return FusedStream(
        values=np.column_stack(columns) if columns else np.empty((n_out, 0)),
        channel_names=tuple(names),
        rate=stream_rate,
        label=recording.label,
        source_id=recording.recording_id,
        metadata=_metadata(recording),
    )


def laser_to_stream(recording: Recording, stream_rate: float | None = None) -> FusedStream:
    """
    Отдельный поток лазера. Без stream_rate - в собственной частоте,
    иначе прореживается удержанием на сетку потока вибриссы.

    Raises:
        InvalidArgumentError: в записи нет лазерного канала
    """

    if LASER_CHANNEL not in recording.channels:
        raise InvalidArgumentError(f"В записи {recording.recording_id} нет лазерного канала")

    native_rate = recording.rates[LASER_CHANNEL]
    laser = recording.channels[LASER_CHANNEL]
    rate = stream_rate or native_rate

    if rate == native_rate:
        values = laser
    else:
        values = zero_order_hold(laser, native_rate, rate, int(np.floor(recording.duration * rate + 1e-9)))

    return FusedStream(
        values=values,
        channel_names=(LASER_CHANNEL,),
        rate=rate,
        label=recording.label,
        source_id=recording.recording_id,
        metadata=_metadata(recording),
    )


def decimate_stream(stream: FusedStream, factor: int) -> FusedStream:
    """
    Оставляет каждый factor-й отсчет.

    Raises:
        InvalidArgumentError: factor вне {1, 2, 3, 4, 5}
    """

    if factor not in DECIMATION_FACTORS:
        raise InvalidArgumentError(f"Коэффициент прореживания {factor} вне {DECIMATION_FACTORS}")

    if factor == 1:
        return stream

    return FusedStream(
        values=stream.values[::factor],
        channel_names=stream.channel_names,
        rate=stream.rate / factor,
        label=stream.label,
        source_id=stream.source_id,
        metadata=stream.metadata,
    )
