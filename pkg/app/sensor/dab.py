from functools import lru_cache
from types import MappingProxyType

import numpy as np
from loguru import logger

from app.core.exceptions import SteadyStateUnreachableError
from app.models.recording import DabRecording
from app.schemas.sensor import SensorSuiteConfig
from app.schemas.surface import HardnessSpec
from app.sensor.filters import resonate, rms, sample_indices
from app.surface.catalog import find_specimen

# Время до касания, мс
PRE_CONTACT = 20.0

# Длина записи после отрыва в постоянных спада
TAIL_TIME_CONSTANTS = 5.0

# Касание должно длиться не меньше стольких постоянных нарастания
STEADY_STATE_TIME_CONSTANTS = 5.0

# Доля контакта в конце, по которой оценивается установившееся давление
PLATEAU_FRACTION = 0.1

ACCEL_GAIN = 1e-3

# Проекции удара при касании на оси платы
AXIS_WEIGHTS = {"Ax": 0.2, "Ay": 0.1, "Az": 1.0}

# Шум по умолчанию - доли RMS эталонного касания без шума
PRESSURE_NOISE_RATIO = 0.01
ACCEL_NOISE_RATIO = 0.02
REFERENCE_MATERIAL = "hard3"
REFERENCE_DURATION = 1000.0  # мс


def _crossing(values: np.ndarray, start: int, level: float, rising: bool, fs: float) -> float:
    """Время (с) первого пересечения уровня после start с линейной интерполяцией"""

    segment = values[start:]
    hits = np.flatnonzero(segment >= level if rising else segment <= level)
    if hits.size == 0:
        return float("nan")

    index = start + int(hits[0])
    if index == start:
        return index / fs

    before, after = values[index - 1], values[index]
    fraction = (level - before) / (after - before) if after != before else 0.0
    return (index - 1 + fraction) / fs


def measure_rise_time(values: np.ndarray, contact: int, release: int, fs: float) -> float:
    """Время нарастания 10-90% от установившегося значения, мс"""

    tail = max(1, int((release - contact) * PLATEAU_FRACTION))
    plateau = float(np.median(values[release - tail : release]))
    t10 = _crossing(values, contact, 0.1 * plateau, rising=True, fs=fs)
    t90 = _crossing(values, contact, 0.9 * plateau, rising=True, fs=fs)
    return (t90 - t10) * 1000.0


def measure_fall_time(values: np.ndarray, release: int, fs: float) -> float:
    """Время спада 90-10% от значения в момент отрыва, мс"""

    level = float(values[release - 1])
    t90 = _crossing(values, release, 0.9 * level, rising=False, fs=fs)
    t10 = _crossing(values, release, 0.1 * level, rising=False, fs=fs)
    return (t10 - t90) * 1000.0


@lru_cache(maxsize=8)
def reference_noise_levels(suite: SensorSuiteConfig) -> MappingProxyType:
    """СКО шума по умолчанию по каналам, общее для всех материалов"""

    quiet = suite.model_copy(update={"pressure_noise_sd": 0.0, "accel_noise_sd": 0.0})
    recording = simulate_dab(find_specimen(REFERENCE_MATERIAL), REFERENCE_DURATION, quiet)

    levels = {"P": PRESSURE_NOISE_RATIO * rms(recording.channels["P"])}
    levels.update({axis: ACCEL_NOISE_RATIO * rms(recording.channels[axis]) for axis in AXIS_WEIGHTS})
    logger.debug(f"Эталонный шум касаний: {levels}")
    return MappingProxyType(levels)


def _noise_sd(suite: SensorSuiteConfig, channel: str) -> float:
    configured = suite.pressure_noise_sd if channel == "P" else suite.accel_noise_sd
    return configured if configured is not None else reference_noise_levels(suite)[channel]


def simulate_dab(
    material: HardnessSpec,
    t_dab: float = 1000.0,
    suite: SensorSuiteConfig | None = None,
    seed: int = 0,
) -> DabRecording:
    """
    Моделирует вертикальное касание материала.

    Во время касания давление - отклик первого порядка
    P(t) = P_ss (1 - exp(-t / tau_r)), после отрыва - экспоненциальный спад
    с tau_f. Акселерометр видит только удары при касании и отрыве плюс шум.

    Args:
        material: параметры материала
        t_dab: длительность касания, мс
        suite: параметры датчиков
        seed: зерно шума

    Raises:
        SteadyStateUnreachableError: t_dab < 5 tau_r

    Returns:
        DabRecording: запись касания с измеренными t_r и t_f
    """

    suite = suite or SensorSuiteConfig()
    tau_rise = material.rise_time_constant
    tau_fall = material.fall_time_constant

    if t_dab < STEADY_STATE_TIME_CONSTANTS * tau_rise:
        raise SteadyStateUnreachableError(
            f"steady state unreachable: t_dab={t_dab} мс меньше {STEADY_STATE_TIME_CONSTANTS} tau_r ({tau_rise} мс)"
        )

    fs = suite.simulation_rate
    contact = int(round(PRE_CONTACT / 1000.0 * fs))
    release = contact + int(round(t_dab / 1000.0 * fs))
    duration = (PRE_CONTACT + t_dab + TAIL_TIME_CONSTANTS * tau_fall) / 1000.0
    n_steps = int(np.floor(duration * fs + 1e-9))

    steps = np.arange(n_steps)
    elapsed = (steps - contact) / fs * 1000.0  # мс от касания
    pressure = np.zeros(n_steps)

    in_contact = (steps >= contact) & (steps < release)
    pressure[in_contact] = material.steady_state_pressure * -np.expm1(-elapsed[in_contact] / tau_rise)
    p_release = material.steady_state_pressure * -np.expm1(-t_dab / tau_rise)

    after = steps >= release
    pressure[after] = p_release * np.exp(-(steps[after] - release) / fs * 1000.0 / tau_fall)

    rng_pressure, rng_accel = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))

    pressure_sd = _noise_sd(suite, "P")
    if pressure_sd > 0:
        pressure = pressure + rng_pressure.normal(0.0, pressure_sd, n_steps)

    rise_time = measure_rise_time(pressure, contact, release, fs)
    fall_time = measure_fall_time(pressure, release, fs)

    # Удары при касании и отрыве пропорциональны скорости изменения давления
    impulses = np.zeros(n_steps)
    impulses[contact] = material.steady_state_pressure / tau_rise
    if release < n_steps:
        impulses[release] = -p_release / tau_fall
    ringing = resonate(impulses, suite.whisker_resonance, suite.whisker_q, fs)

    accel_idx = sample_indices(duration, suite.accel_rate, fs)
    axes = {}
    for name, weight in AXIS_WEIGHTS.items():
        values = ACCEL_GAIN * weight * ringing[accel_idx]
        accel_sd = _noise_sd(suite, name)
        if accel_sd > 0:
            values = values + rng_accel.normal(0.0, accel_sd, values.size)
        axes[name] = values

    logger.debug(f"Касание {material.class_id}: t_r={rise_time:.2f} мс, t_f={fall_time:.2f} мс, seed={seed}")

    return DabRecording(
        channels={"P": pressure[sample_indices(duration, suite.pressure_rate, fs)], **axes},
        rates={"P": suite.pressure_rate, "Ax": suite.accel_rate, "Ay": suite.accel_rate, "Az": suite.accel_rate},
        label=material.class_id,
        suite=suite,
        seed=seed,
        duration=duration,
        t_dab=t_dab,
        rise_time_measured=rise_time,
        fall_time_measured=fall_time,
    )
