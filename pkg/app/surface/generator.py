import numpy as np
from loguru import logger
from scipy import signal

from app.core.exceptions import InvalidArgumentError, UnderResolvedProfileError
from app.models.profile import TextureProfile
from app.schemas.surface import SurfaceSpec, Waveform
from app.surface.roughness import _ra, _rz

# Число базовых длин при оценке Rz сгенерированного профиля
RZ_SEGMENTS = 5

# Ширина сглаживающего окна шума, в отсчетах
NOISE_SMOOTHING = 3


def _waveform(kind: Waveform, phase: np.ndarray) -> np.ndarray:
    if kind is Waveform.TRIANGULAR:
        return signal.sawtooth(phase, width=0.5)
    if kind is Waveform.SAWTOOTH:
        return signal.sawtooth(phase, width=1.0)
    return np.sin(phase)


def build_roughness_profile(spec: SurfaceSpec, length_total: float, resolution: float) -> TextureProfile:
    """
    Строит синтетический профиль шероховатости: периодическая форма зерна
    плюс ограниченный по полосе равномерный шум.

    Без шума размах профиля в точности равен rz_target. С шумом профиль
    масштабируется так, чтобы измеренное Rz совпало с целевым.

    Args:
        spec: параметры образца
        length_total: длина профиля, мкм
        resolution: шаг дискретизации, мкм

    Raises:
        InvalidArgumentError: неположительные размеры или профиль короче 10 периодов
        UnderResolvedProfileError: шаг крупнее spatial_period / 20

    Returns:
        TextureProfile: профиль с нулевым средним
    """

    if length_total <= 0 or resolution <= 0:
        raise InvalidArgumentError(f"Размеры профиля должны быть положительны: length={length_total}, resolution={resolution}")

    if resolution > spec.spatial_period / 20:
        raise UnderResolvedProfileError(f"under-resolved profile: шаг {resolution} мкм крупнее {spec.spatial_period / 20} мкм")

    if length_total < 10 * spec.spatial_period:
        raise InvalidArgumentError(f"Профиль {length_total} мкм короче 10 периодов ({10 * spec.spatial_period} мкм)")

    n_samples = int(round(length_total / resolution))
    phase = 2 * np.pi * np.arange(n_samples) * resolution / spec.spatial_period

    # Нормируем дискретную форму так, чтобы размах был ровно rz_target
    wave = _waveform(spec.waveform, phase)
    wave = (wave - (wave.max() + wave.min()) / 2) / np.ptp(wave) * spec.rz_target

    if spec.noise_amplitude > 0:
        rng = np.random.default_rng(spec.seed)
        noise = rng.uniform(-1.0, 1.0, n_samples)
        noise = np.convolve(noise, np.ones(NOISE_SMOOTHING) / NOISE_SMOOTHING, mode="same")
        noise *= spec.noise_amplitude * spec.rz_target / 2 / np.abs(noise).max()
        wave = wave + noise

    heights = wave - wave.mean()

    if spec.noise_amplitude > 0:
        heights *= spec.rz_target / _rz(heights, RZ_SEGMENTS)

    logger.debug(f"Профиль {spec.class_id}: {n_samples} отсчетов, шаг {resolution} мкм")

    return TextureProfile(
        heights=heights,
        resolution=resolution,
        length_total=length_total,
        spec=spec,
        ra_actual=_ra(heights, resolution),
        rz_actual=_rz(heights, RZ_SEGMENTS),
    )
