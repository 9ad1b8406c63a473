from functools import lru_cache
from types import MappingProxyType

import numpy as np
from loguru import logger
from scipy.interpolate import CubicSpline

from app.core.exceptions import InvalidArgumentError
from app.models.profile import TextureProfile
from app.models.recording import SweepRecording
from app.schemas.sensor import SensorSuiteConfig, StageConfig
from app.sensor.constraint import check_sampling_constraint
from app.sensor.filters import lowpass, resonate, rms, sample_indices, second_difference
from app.surface.catalog import find_specimen
from app.surface.generator import build_roughness_profile

# Жесткость вибриссы в касательном направлении, единицы силы на мкм
LATERAL_STIFFNESS = 1.0

# Вклад вертикального и касательного отклонения кончика в момент у основания
NORMAL_GAIN = 1.0
LATERAL_GAIN = 1.0

# Постоянная прижимная нагрузка датчика давления
PRESSURE_PRELOAD = 50.0

# мкм/с^2 -> единицы акселерометра
ACCEL_GAIN = 1e-3

# Проекция колебаний на ось Y платы
CROSS_AXIS_COUPLING = 0.25

# Доли RMS эталонного прохода для шума по умолчанию
PRESSURE_NOISE_RATIO = 0.01
ACCEL_NOISE_RATIO = 0.02

# Эталонный проход без шума: образец, скорость мм/мин, длина мм
REFERENCE_CLASS = "H3"
REFERENCE_SPEED = 50.0
REFERENCE_LENGTH = 5.0


def _stick_slip(x_base: np.ndarray, slope: np.ndarray, threshold: float) -> np.ndarray:
    """
    Кулоновский следящий кончик.

    Кончик залипает на грани зерна, пока упругая сила изгиба меньше сопротивления
    threshold * (наклон грани), затем проскальзывает к основанию.

    Returns:
        np.ndarray: для каждого шага индекс точки, в которой находится кончик
    """

    n_steps = x_base.size
    if threshold <= 0:
        return np.arange(n_steps)

    # Допустимый изгиб до срыва, мкм
    resistance = (threshold * np.clip(slope, 0.0, None) / LATERAL_STIFFNESS).tolist()
    positions = x_base.tolist()

    anchors = [0] * n_steps
    anchor = 0
    for step in range(n_steps):
        if positions[step] - positions[anchor] >= resistance[anchor]:
            anchor = step
        anchors[step] = anchor

    return np.asarray(anchors, dtype=np.int64)


@lru_cache(maxsize=8)
def reference_noise_levels(suite: SensorSuiteConfig) -> MappingProxyType:
    """
    Шум по умолчанию для проходов: доли RMS эталонного прохода без шума
    (образец H3, 50 мм/мин, 5 мм). Уровень зависит только от набора датчиков
    и одинаков для всех классов.

    Returns:
        MappingProxyType: СКО шума по каналам P, Ax, Ay, Az
    """

    quiet = suite.model_copy(update={"pressure_noise_sd": 0.0, "accel_noise_sd": 0.0, "laser_noise_sd": 0.0})
    stage = StageConfig(speed=REFERENCE_SPEED, sweep_length=REFERENCE_LENGTH)
    profile = build_roughness_profile(find_specimen(REFERENCE_CLASS), REFERENCE_LENGTH * 1000.0 + 2.0, 1.0)
    recording = simulate_sweep(profile, stage, quiet)

    levels = {"P": PRESSURE_NOISE_RATIO * rms(recording.channels["P"])}
    levels.update({axis: ACCEL_NOISE_RATIO * rms(recording.channels[axis]) for axis in ("Ax", "Ay", "Az")})
    logger.debug(f"Эталонный шум проходов: {levels}")
    return MappingProxyType(levels)


def _noise_sd(suite: SensorSuiteConfig, channel: str) -> float:
    configured = suite.pressure_noise_sd if channel == "P" else suite.accel_noise_sd
    return configured if configured is not None else reference_noise_levels(suite)[channel]


def simulate_sweep(
    profile: TextureProfile,
    stage: StageConfig,
    suite: SensorSuiteConfig | None = None,
    seed: int = 0,
) -> SweepRecording:
    """
    Моделирует проход вибриссы по профилю со скоростью V_s.

    Каналы:
        L - высота профиля в точке x(t) = x0 + V_s t с частотой N_l;
        P - момент у основания (вертикальное + касательное отклонение кончика
            при залипании-проскальзывании) после ФНЧ на N_s/4, частота N_s;
        Ax, Ay, Az - вторая производная отклонения кончика, окрашенная
            резонансом вибриссы, частота N_a.

    Args:
        profile: профиль образца
        stage: параметры стола
        suite: параметры датчиков
        seed: зерно шума

    Raises:
        InvalidArgumentError: проход длиннее профиля

    Returns:
        SweepRecording: запись прохода
    """

    suite = suite or SensorSuiteConfig()
    speed = stage.speed_um_s
    sweep_um = stage.sweep_length * 1000.0
    available = profile.positions[-1] if len(profile) else 0.0

    if stage.start_offset + sweep_um > available + 1e-9:
        raise InvalidArgumentError(f"Проход {stage.start_offset + sweep_um} мкм длиннее профиля {available} мкм")

    # Нарушение ограничения допустимо: так изучается деградация
    report = check_sampling_constraint(suite.pressure_rate, stage.speed, profile.spec.spatial_period)
    if not report.satisfied:
        logger.warning(f"{profile.label}: D={report.distance_per_sample:.2f} мкм не меньше d_sep/2 для датчика давления")

    duration = stage.sweep_duration
    fs = suite.simulation_rate
    n_steps = int(np.floor(duration * fs + 1e-9))
    x_base = stage.start_offset + speed * np.arange(n_steps) / fs

    spline = CubicSpline(profile.positions, profile.heights)
    z_base = spline(x_base)
    slope = spline(x_base, 1)

    anchors = _stick_slip(x_base, slope, suite.stick_slip_threshold)
    z_tip = z_base[anchors]
    deflection = x_base - x_base[anchors]

    rng_pressure, rng_accel, rng_laser = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))

    # Датчик давления
    moment = lowpass(NORMAL_GAIN * z_tip + LATERAL_GAIN * deflection, suite.pressure_rate / 4, fs)
    pressure = moment[sample_indices(duration, suite.pressure_rate, fs)]
    pressure_sd = _noise_sd(suite, "P")
    if pressure_sd > 0:
        pressure = pressure + rng_pressure.normal(0.0, pressure_sd, pressure.size)

    # Акселерометр не связан с вибриссой напрямую и видит наведенные колебания
    lateral = resonate(-second_difference(deflection, fs), suite.whisker_resonance, suite.whisker_q, fs)
    vertical = resonate(second_difference(z_tip, fs), suite.whisker_resonance, suite.whisker_q, fs)
    accel_idx = sample_indices(duration, suite.accel_rate, fs)
    axes = {
        "Ax": ACCEL_GAIN * lateral[accel_idx],
        "Ay": ACCEL_GAIN * CROSS_AXIS_COUPLING * (lateral + vertical)[accel_idx],
        "Az": ACCEL_GAIN * vertical[accel_idx],
    }
    for name, values in axes.items():
        accel_sd = _noise_sd(suite, name)
        if accel_sd > 0:
            axes[name] = values + rng_accel.normal(0.0, accel_sd, values.size)

    # Лазер - отдельный проход с той же кинематикой
    n_laser = int(np.floor(duration * suite.laser_rate + 1e-9))
    laser = spline(stage.start_offset + speed * np.arange(n_laser) / suite.laser_rate)
    if suite.laser_noise_sd > 0:
        laser = laser + rng_laser.normal(0.0, suite.laser_noise_sd, n_laser)

    logger.debug(f"Проход {profile.label}: {duration:.2f} с, V_s={stage.speed} мм/мин, seed={seed}")

    return SweepRecording(
        channels={"P": PRESSURE_PRELOAD + pressure, **axes, "L": laser},
        rates={
            "P": suite.pressure_rate,
            "Ax": suite.accel_rate,
            "Ay": suite.accel_rate,
            "Az": suite.accel_rate,
            "L": suite.laser_rate,
        },
        label=profile.label,
        suite=suite,
        seed=seed,
        duration=duration,
        stage=stage,
    )
