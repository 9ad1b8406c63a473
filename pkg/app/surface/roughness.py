import numpy as np
from scipy.integrate import trapezoid

from app.core.exceptions import InvalidArgumentError
from app.models.profile import TextureProfile


def _centered(heights: np.ndarray) -> np.ndarray:
    if heights.size == 0:
        raise InvalidArgumentError("Пустой профиль")

    return heights - heights.mean()


def _ra(heights: np.ndarray, resolution: float) -> float:
    z = np.abs(_centered(heights))
    if z.size == 1:
        return float(z[0])

    length = (z.size - 1) * resolution
    return float(trapezoid(z, dx=resolution) / length)


def _rz(heights: np.ndarray, n_segments: int) -> float:
    if n_segments < 1 or n_segments > heights.size:
        raise InvalidArgumentError(f"Число отрезков {n_segments} вне диапазона [1, {heights.size}]")

    segments = np.array_split(heights, n_segments)
    return float(np.mean([np.ptp(segment) for segment in segments]))


def compute_ra(profile: TextureProfile) -> float:
    """
    Средняя арифметическая шероховатость Ra.

    Среднее |Z(x)| относительно средней линии по всей длине,
    интеграл считается методом трапеций на равномерной сетке.

    Args:
        profile: профиль образца

    Raises:
        InvalidArgumentError: профиль пустой

    Returns:
        float: Ra в мкм
    """

    return _ra(profile.heights, profile.resolution)


def compute_rz(profile: TextureProfile, n_segments: int = 5) -> float:
    """
    Средняя высота неровностей Rz.

    Профиль делится на n_segments равных базовых длин, в каждой берется
    размах (max - min), результат - среднее арифметическое размахов.

    Args:
        profile: профиль образца
        n_segments: число базовых длин

    Raises:
        InvalidArgumentError: n_segments < 1 или больше числа отсчетов

    Returns:
        float: Rz в мкм
    """

    if profile.heights.size == 0:
        raise InvalidArgumentError("Пустой профиль")

    return _rz(profile.heights, n_segments)


def compute_rq(profile: TextureProfile) -> float:
    """Среднеквадратичная шероховатость Rq относительно средней линии"""

    z = _centered(profile.heights)
    if z.size == 1:
        return float(abs(z[0]))

    length = (z.size - 1) * profile.resolution
    return float(np.sqrt(trapezoid(z**2, dx=profile.resolution) / length))
