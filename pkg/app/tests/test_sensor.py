import math

import numpy as np
import pytest

from app.core.config import settings
from app.core.exceptions import InvalidArgumentError, SteadyStateUnreachableError
from app.dataset.windowing import window_count
from app.models.profile import TextureProfile
from app.schemas.sensor import SensorSuiteConfig, StageConfig
from app.schemas.surface import ClassFamily, SurfaceSpec, Waveform
from app.sensor.constraint import check_sampling_constraint, constraint_table, window_surface_length
from app.sensor.dab import simulate_dab
from app.sensor.fusion import decimate_stream, fuse_to_stream, laser_to_stream, zero_order_hold
from app.sensor.io import read_recording_csv, write_laser_csv, write_recording_csv
from app.sensor.sweep import simulate_sweep
from app.surface.catalog import find_specimen
from app.surface.generator import build_roughness_profile

QUIET_SUITE = SensorSuiteConfig(pressure_noise_sd=0.0, accel_noise_sd=0.0, laser_noise_sd=0.0, stick_slip_threshold=0.0)


@pytest.fixture
def grain_profile():
    """Синусоида с периодом 100 мкм без шума, 5 мм"""
    spec = SurfaceSpec(
        class_family=ClassFamily.TURNING,
        subclass_index=1,
        rz_target=2.5,
        spatial_period=100.0,
        waveform=Waveform.SINUSOIDAL,
        noise_amplitude=0.0,
    )
    return build_roughness_profile(spec, length_total=5000.0, resolution=1.0)


@pytest.mark.parametrize(
    "rate, speed, distance",
    [
        (157.0, 50.0, 5.31),
        (157.0, 100.0, 10.62),
        (1000.0, 50.0, 0.83),
        (2500.0, 50.0, 0.33),
        (2500.0, 100.0, 0.67),
        (500.0, 50.0, 1.67),
    ],
)
def test_distance_per_sample(rate, speed, distance):
    """D = V_s / N совпадает с таблицей датчиков"""

    report = check_sampling_constraint(rate, speed, d_sep=100.0)

    assert report.distance_per_sample == pytest.approx(distance, abs=0.005)
    assert report.min_resolvable_separation == pytest.approx(2 * report.distance_per_sample)
    assert report.satisfied


def test_constraint_violation():
    """d_sep/2 не больше D - ограничение нарушено"""

    report = check_sampling_constraint(157.0, 50.0, d_sep=10.0)

    assert not report.satisfied
    assert report.margin < 0


@pytest.mark.parametrize("rate, speed, d_sep", [(0.0, 50.0, 10.0), (157.0, -1.0, 10.0), (157.0, 50.0, 0.0)])
def test_constraint_rejects_nonpositive(rate, speed, d_sep):
    with pytest.raises(InvalidArgumentError):
        check_sampling_constraint(rate, speed, d_sep)


def test_window_surface_length():
    """Окно W = 50 при 1000 Гц и 50 мм/мин покрывает ~41.7 мкм"""

    assert window_surface_length(1000.0, 50.0, 50) == pytest.approx(41.667, abs=1e-3)

    with pytest.raises(InvalidArgumentError):
        window_surface_length(1000.0, 50.0, 0)


def test_constraint_table_rows():
    rows = constraint_table()

    assert [row.sensor for row in rows] == ["Pressure Sensor", "Accelerometer", "NCDT Laser"]
    assert rows[0].separations[50.0] == pytest.approx(10.62, abs=0.005)
    assert rows[2].separations[100.0] == pytest.approx(1.33, abs=0.005)


def test_zero_order_hold_indices():
    """Каждый выходной отсчет - последний пришедший входной"""

    held = zero_order_hold(np.array([0.0, 1.0, 2.0]), native_rate=2.0, target_rate=4.0, n_out=6)

    assert held.tolist() == [0.0, 0.0, 1.0, 1.0, 2.0, 2.0]
    assert zero_order_hold(np.array([]), 2.0, 4.0, 6).size == 0


def test_sweep_channel_lengths(grain_profile):
    """Каждый канал записан в своей частоте"""

    stage = StageConfig(speed=60.0, sweep_length=2.0)
    recording = simulate_sweep(grain_profile, stage, seed=3)

    assert recording.duration == pytest.approx(2.0)
    assert recording.channels["P"].size == 314
    for axis in ("Ax", "Ay", "Az"):
        assert recording.channels[axis].size == 2000
    assert recording.channels["L"].size == 5000
    assert recording.label == "T1"
    assert recording.kind == "sweep"


def test_sweep_pressure_sees_grain_frequency(grain_profile):
    """Спектр давления имеет пик на частоте V_s / d_sep"""

    stage = StageConfig(speed=60.0, sweep_length=4.0)  # 1000 мкм/с -> 10 Гц
    recording = simulate_sweep(grain_profile, stage, suite=QUIET_SUITE, seed=0)

    pressure = recording.channels["P"] - recording.channels["P"].mean()
    spectrum = np.abs(np.fft.rfft(pressure))
    freqs = np.fft.rfftfreq(pressure.size, d=1 / recording.rates["P"])

    assert freqs[1:][np.argmax(spectrum[1:])] == pytest.approx(10.0, abs=0.5)


@pytest.mark.parametrize("axis", ["Az", "Ay"])
def test_sweep_accelerometer_sees_grain_frequency(grain_profile, axis):
    """Без stick-slip спектр акселерометра имеет пик на частоте V_s / d_sep; Ax без проскальзываний пуст"""

    stage = StageConfig(speed=60.0, sweep_length=4.0)
    recording = simulate_sweep(grain_profile, stage, suite=QUIET_SUITE, seed=0)

    values = recording.channels[axis] - recording.channels[axis].mean()
    spectrum = np.abs(np.fft.rfft(values))
    freqs = np.fft.rfftfreq(values.size, d=1 / recording.rates[axis])

    assert freqs[1:][np.argmax(spectrum[1:])] == pytest.approx(10.0, abs=0.5)
    assert np.allclose(recording.channels["Ax"], 0.0)


def test_laser_matches_profile_at_knots(grain_profile):
    """Без шума лазер повторяет высоту профиля в узлах"""

    stage = StageConfig(speed=60.0, sweep_length=2.0)
    recording = simulate_sweep(grain_profile, stage, suite=QUIET_SUITE, seed=0)
    laser = recording.channels["L"]

    # 2500 Гц при 1000 мкм/с: каждый 5-й отсчет попадает в узел 2 мкм
    for m in (0, 7, 123, 500):
        assert laser[5 * m] == pytest.approx(grain_profile.heights[2 * m], abs=1e-9)


def test_sweep_is_deterministic(grain_profile):
    stage = StageConfig(speed=50.0, sweep_length=2.0)

    first = simulate_sweep(grain_profile, stage, seed=11)
    second = simulate_sweep(grain_profile, stage, seed=11)
    other = simulate_sweep(grain_profile, stage, seed=12)

    for name in ("P", "Ax", "Ay", "Az", "L"):
        assert np.array_equal(first.channels[name], second.channels[name])
    assert not np.array_equal(first.channels["P"], other.channels["P"])


def test_sweep_longer_than_profile(grain_profile):
    with pytest.raises(InvalidArgumentError):
        simulate_sweep(grain_profile, StageConfig(speed=50.0, sweep_length=6.0))


def test_sweep_records_despite_violated_constraint():
    """Нарушение D < d_sep/2 не мешает записи"""

    spec = find_specimen("H1")  # d_sep = 100 мкм
    profile = build_roughness_profile(spec, 5000.0, 1.0)
    recording = simulate_sweep(profile, StageConfig(speed=1500.0, sweep_length=4.0), seed=1)

    assert recording.channels["P"].size > 0


def test_dab_rise_time():
    """Без шума t_r = tau ln 9 с точностью 2%"""

    material = find_specimen("hard3")
    recording = simulate_dab(material, t_dab=1000.0, suite=QUIET_SUITE, seed=0)

    expected = material.rise_time_constant * math.log(9)
    assert recording.rise_time_measured == pytest.approx(expected, rel=0.02)
    assert recording.fall_time_measured == pytest.approx(material.fall_time_constant * math.log(9), rel=0.02)
    assert "L" not in recording.channels


def test_dab_rise_time_falls_with_hardness():
    """Чем тверже материал, тем короче нарастание"""

    rise = [simulate_dab(find_specimen(f"hard{rank}"), 1000.0, suite=QUIET_SUITE).rise_time_measured for rank in range(1, 7)]

    assert all(harder < softer for softer, harder in zip(rise, rise[1:]))


def test_dab_too_short():
    """Касание короче 5 tau_r не достигает установившегося режима"""

    with pytest.raises(SteadyStateUnreachableError, match="steady state unreachable"):
        simulate_dab(find_specimen("hard1"), t_dab=500.0)


def test_fused_stream_layout(grain_profile):
    """Поток на 1000 Гц: floor(duration * rate) отсчетов, каналы P, Ax, Ay, Az"""

    recording = simulate_sweep(grain_profile, StageConfig(speed=60.0, sweep_length=2.0), seed=5)
    stream = fuse_to_stream(recording)

    assert stream.values.shape == (2000, 4)
    assert stream.channel_names == ("P", "Ax", "Ay", "Az")

    pressure = recording.channels["P"]
    for k in (0, 6, 7, 999, 1999):
        assert stream.values[k, 0] == pressure[math.floor(k * 157 / 1000)]
    assert np.array_equal(stream.values[:, 1], recording.channels["Ax"])


def test_laser_stream(grain_profile):
    recording = simulate_sweep(grain_profile, StageConfig(speed=60.0, sweep_length=2.0), seed=5)

    assert len(laser_to_stream(recording)) == 5000
    assert len(laser_to_stream(recording, 1000.0)) == 2000

    dab = simulate_dab(find_specimen("hard6"), 100.0)
    with pytest.raises(InvalidArgumentError):
        laser_to_stream(dab)


def test_decimate_stream(grain_profile):
    stream = fuse_to_stream(simulate_sweep(grain_profile, StageConfig(speed=60.0, sweep_length=2.0), seed=5))

    halved = decimate_stream(stream, 3)
    assert halved.rate == pytest.approx(1000 / 3)
    assert len(halved) == 667
    assert np.array_equal(halved.values, stream.values[::3])

    with pytest.raises(InvalidArgumentError):
        decimate_stream(stream, 6)


def test_recording_files(tmp_path, grain_profile):
    """Поток и лазер сохраняются с метаданными в заголовке"""

    recording = simulate_sweep(grain_profile, StageConfig(speed=60.0, sweep_length=2.0), seed=5)

    metadata, frame = read_recording_csv(write_recording_csv(fuse_to_stream(recording), tmp_path / "sweep.csv"))
    assert metadata["label"] == "T1"
    assert metadata["kind"] == "sweep"
    assert metadata["stream_rate"] == "1000"
    assert list(frame.columns) == ["t_s", "P", "Ax", "Ay", "Az"]
    assert len(frame) == 2000

    _, laser = read_recording_csv(write_laser_csv(recording, tmp_path / "laser.csv"))
    assert list(laser.columns) == ["t_s", "L"]
    assert np.allclose(laser["L"].to_numpy(), recording.channels["L"])


def test_distance_per_sample_doubles_with_speed():
    """Удвоение V_s удваивает D"""

    for rate in (157.0, 1000.0, 2500.0):
        slow = check_sampling_constraint(rate, 50.0, d_sep=100.0)
        fast = check_sampling_constraint(rate, 100.0, d_sep=100.0)
        assert fast.distance_per_sample == pytest.approx(2 * slow.distance_per_sample)


def test_flat_profile_gives_constant_channels():
    """Плоский профиль без шума: давление и акселерометр без дисперсии"""

    spec = find_specimen("H1")
    flat = TextureProfile(heights=np.zeros(5001), resolution=1.0, length_total=5000.0, spec=spec)
    suite = SensorSuiteConfig(pressure_noise_sd=0.0, accel_noise_sd=0.0, laser_noise_sd=0.0)

    recording = simulate_sweep(flat, StageConfig(speed=50.0, sweep_length=4.0), suite=suite, seed=2)

    for name in ("P", "Ax", "Ay", "Az", "L"):
        assert np.var(recording.channels[name]) == pytest.approx(0.0, abs=1e-18)


def test_sweep_noise_level_does_not_depend_on_class():
    """Шум по умолчанию одинаков для мелкого и крупного зерна"""

    stage = StageConfig(speed=50.0, sweep_length=2.0)
    quiet = SensorSuiteConfig(pressure_noise_sd=0.0, accel_noise_sd=0.0, laser_noise_sd=0.0)

    noise = {}
    for class_id in ("H1", "H6"):
        spec = find_specimen(class_id)
        profile = build_roughness_profile(spec, max(10 * spec.spatial_period, 3000.0), 1.0)
        noisy = simulate_sweep(profile, stage, seed=4)
        clean = simulate_sweep(profile, stage, suite=quiet, seed=4)
        noise[class_id] = {name: noisy.channels[name] - clean.channels[name] for name in ("P", "Ax", "Ay", "Az")}

    for name in ("P", "Ax", "Ay", "Az"):
        assert np.std(noise["H1"][name]) > 0
        assert np.allclose(noise["H1"][name], noise["H6"][name], rtol=0.0, atol=1e-9)


def test_dab_noise_floor_does_not_depend_on_hardness():
    """Шум акселерометра одинаков для мягкого и твердого материала"""

    soft = simulate_dab(find_specimen("hard1"), 1000.0, seed=9)
    hard = simulate_dab(find_specimen("hard6"), 1000.0, seed=9)

    # Касание начинается на 20 мс, звон затухает задолго до 200 мс
    assert np.array_equal(soft.channels["Ax"][:19], hard.channels["Ax"][:19])
    for axis in ("Ax", "Ay", "Az"):
        floor_soft, floor_hard = np.std(soft.channels[axis][200:800]), np.std(hard.channels[axis][200:800])
        assert floor_soft > 0
        assert floor_hard == pytest.approx(floor_soft, rel=0.2)
    assert np.array_equal(soft.channels["P"][:3], hard.channels["P"][:3])


@pytest.mark.parametrize("class_id", ["hard1", "hard6"])
def test_default_dabs_give_enough_test_windows(class_id):
    """Касания по умолчанию дают не меньше 100 тестовых окон на ячейку при W=100"""

    recording = simulate_dab(find_specimen(class_id), settings.DAB_DURATION_MS)
    stream = fuse_to_stream(recording, settings.STREAM_RATE)

    per_material = settings.DABS_PER_MATERIAL * window_count(len(stream.values), 100, 100)
    test_per_material = math.floor(0.2 * per_material + 0.5)

    assert 6 * test_per_material >= 100
