import numpy as np
from scipy import signal


def lowpass(values: np.ndarray, cutoff: float, fs: float) -> np.ndarray:
    """Однополюсный ФНЧ, состояние инициализируется первым отсчетом"""

    if values.size == 0:
        return values.copy()

    pole = np.exp(-2 * np.pi * cutoff / fs)
    b, a = [1 - pole], [1.0, -pole]
    zi = signal.lfilter_zi(b, a) * values[0]
    filtered, _ = signal.lfilter(b, a, values, zi=zi)
    return filtered


def resonate(values: np.ndarray, frequency: float, q: float, fs: float) -> np.ndarray:
    """
    Свертка с затухающей синусоидой h[n] = r^n sin(w n), реализованная
    рекурсивным фильтром второго порядка.
    """

    if values.size == 0:
        return values.copy()

    radius = np.exp(-np.pi * frequency / (q * fs))
    omega = 2 * np.pi * frequency / fs
    b = [0.0, radius * np.sin(omega)]
    a = [1.0, -2 * radius * np.cos(omega), radius**2]
    return signal.lfilter(b, a, values)


def second_difference(values: np.ndarray, fs: float) -> np.ndarray:
    """Вторая производная по времени центральной разностью, края нулевые"""

    result = np.zeros_like(values, dtype=float)
    if values.size >= 3:
        result[1:-1] = (values[2:] - 2 * values[1:-1] + values[:-2]) * fs**2
    return result


def rms(values: np.ndarray) -> float:
    """RMS переменной составляющей"""

    if values.size == 0:
        return 0.0
    return float(np.sqrt(np.mean((values - values.mean()) ** 2)))


def sample_indices(duration: float, rate: float, fs: float) -> np.ndarray:
    """Индексы мелкой сетки модели для отсчетов датчика с частотой rate"""

    count = int(np.floor(duration * rate + 1e-9))
    return np.floor(np.arange(count) * fs / rate + 1e-9).astype(np.int64)
