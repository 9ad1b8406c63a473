import numpy as np
from loguru import logger
from numpy.lib.stride_tricks import sliding_window_view

from app.core.exceptions import InvalidArgumentError
from app.models.dataset import WindowedSample
from app.models.recording import FusedStream


def window_count(length: int, window: int, stride: int) -> int:
    """floor((M - W) / stride) + 1, либо 0 при M < W"""

    if length < window:
        return 0
    return (length - window) // stride + 1


def window_array(stream: FusedStream, window: int, stride: int | None = None) -> np.ndarray:
    """
    Нарезает поток на окна и разворачивает каждое в строку.

    Развертка по времени: x_j (все k каналов), затем x_{j+1} и т.д.
    Неполное хвостовое окно отбрасывается.

    Args:
        stream: поток (M, k)
        window: W
        stride: шаг между окнами, по умолчанию W (окна не перекрываются)

    Raises:
        InvalidArgumentError: W < 1 или stride < 1

    Returns:
        np.ndarray: матрица (n_windows, W * k)
    """

    stride = window if stride is None else stride
    if window < 1 or stride < 1:
        raise InvalidArgumentError(f"W={window} и stride={stride} должны быть не меньше 1")

    n_channels = stream.values.shape[1]
    if len(stream) < window:
        logger.warning(f"{stream.source_id}: поток из {len(stream)} отсчетов короче окна W={window}, окон нет")
        return np.empty((0, window * n_channels))

    # (M - W + 1, k, W) -> (n, W, k)
    views = sliding_window_view(stream.values, window, axis=0)[::stride]
    return np.ascontiguousarray(views.transpose(0, 2, 1)).reshape(views.shape[0], window * n_channels)


def window_split(stream: FusedStream, window: int, stride: int | None = None) -> list[WindowedSample]:
    """Окна потока как образцы с меткой и происхождением"""

    windows = window_array(stream, window, stride)
    return [
        WindowedSample(features=row, label=stream.label, source_recording=stream.source_id, window_index=j)
        for j, row in enumerate(windows)
    ]
