import numpy as np
import pytest

from app.core.exceptions import DatasetParseError, EmptyDatasetError, InsufficientSweepsError, InvalidArgumentError, MissingHeaderError
from app.dataset.assembly import assemble_dataset, standardize
from app.dataset.splitting import natural_key, stratified_split
from app.dataset.storage import read_dataset, write_dataset
from app.dataset.windowing import window_array, window_count, window_split
from app.models.recording import FusedStream, SweepRecording
from app.schemas.dataset import ChannelSelector
from app.schemas.sensor import SensorSuiteConfig
from app.tests.conftest import gaussian_blobs, make_dataset

CLASS_IDS = [f"{family}{index}" for family in "HVT" for index in range(1, 7)]


def make_stream(length: int, n_channels: int = 4) -> FusedStream:
    values = np.arange(length * n_channels, dtype=float).reshape(length, n_channels)
    return FusedStream(values=values, channel_names=("P", "Ax", "Ay", "Az")[:n_channels], rate=1000.0, label="H1", source_id="H1-sweep-0")


def make_recording(label: str, seed: int, duration: float = 1.0) -> SweepRecording:
    """Запись со случайными каналами в штатных частотах"""

    rng = np.random.default_rng(seed)
    rates = {"P": 157.0, "Ax": 1000.0, "Ay": 1000.0, "Az": 1000.0, "L": 2500.0}
    return SweepRecording(
        channels={name: rng.normal(size=int(np.floor(duration * rate + 1e-9))) for name, rate in rates.items()},
        rates=rates,
        label=label,
        suite=SensorSuiteConfig(),
        seed=seed,
        duration=duration,
    )


def make_recordings(labels, per_class: int = 3, duration: float = 1.0) -> list[SweepRecording]:
    return [make_recording(label, seed=100 * i + j, duration=duration) for i, label in enumerate(labels) for j in range(per_class)]


@pytest.mark.parametrize("length, window, expected", [(1000, 50, 20), (1000, 100, 10), (49, 50, 0), (50, 50, 1), (1049, 50, 20)])
def test_window_count(length, window, expected):
    """Число окон floor(M / W), неполный хвост отбрасывается"""

    assert window_count(length, window, window) == expected
    assert len(window_split(make_stream(length), window)) == expected


def test_window_count_matches_enumeration():
    """Формула совпадает с перебором стартовых позиций"""

    rng = np.random.default_rng(0)
    for _ in range(50):
        length, window = int(rng.integers(1, 400)), int(rng.integers(1, 120))
        stride = int(rng.integers(1, 60))
        brute = sum(1 for start in range(0, length, stride) if start + window <= length)
        assert window_count(length, window, stride) == brute
        assert window_array(make_stream(length, 2), window, stride).shape[0] == brute


def test_window_layout_is_window_major():
    """Окно j - отсчеты j*W..(j+1)*W-1, каналы внутри отсчета"""

    stream = make_stream(1000)
    windows = window_split(stream, 50)

    assert windows[0].features.size == 200
    for j in (0, 7, 19):
        assert np.array_equal(windows[j].features, stream.values[j * 50 : (j + 1) * 50].ravel())
        assert windows[j].window_index == j
        assert windows[j].source_recording == "H1-sweep-0"


def test_overlapping_stride():
    assert window_array(make_stream(1000), 100, stride=50).shape == (19, 400)


def test_invalid_window():
    with pytest.raises(InvalidArgumentError):
        window_array(make_stream(100), 0)
    with pytest.raises(InvalidArgumentError):
        window_array(make_stream(100), 10, stride=0)


def test_natural_order():
    assert sorted(["H10", "H2", "hard1", "H1"], key=natural_key) == ["H1", "H2", "H10", "hard1"]


def test_split_proportions_and_determinism():
    """0.7 / 0.2 / 0.1 внутри каждого класса, одно зерно - одно разбиение"""

    labels = np.repeat(np.arange(4), [100, 57, 10, 3])
    first = stratified_split(labels, seed=5)

    assert np.array_equal(first, stratified_split(labels, seed=5))
    assert not np.array_equal(first, stratified_split(labels, seed=6))

    for label, count in zip(range(4), (100, 57, 10, 3)):
        parts = first[labels == label]
        n_train = (parts == "train").sum()
        n_val = (parts == "val").sum()
        assert abs(n_train - 0.7 * count) <= 1
        assert abs(n_val - 0.2 * count) <= 1
        assert n_train + n_val + (parts == "test").sum() == count


def test_assemble_pa_dataset():
    """PA, W = 50: вектор из 200 признаков, 18 классов в натуральном порядке"""

    recordings = make_recordings(reversed(CLASS_IDS))
    dataset = assemble_dataset(recordings, ChannelSelector.PA, window=50, seed=1)

    assert dataset.n_features == 200
    assert dataset.class_set == tuple(sorted(CLASS_IDS, key=natural_key))
    assert len(dataset) == 18 * 3 * 20
    assert dataset.class_counts().tolist() == [60] * 18


def test_assembled_windows_come_from_one_recording():
    """Каждое окно - непрерывный отрезок одной записи"""

    recordings = make_recordings(["H1", "V1", "T1"])
    dataset = assemble_dataset(recordings, ChannelSelector.A, window=25, seed=3)
    streams = {recording.recording_id: recording for recording in recordings}

    for i in (0, 41, 100, len(dataset) - 1):
        recording = streams[dataset.source_ids[i]]
        j = dataset.window_indices[i]
        expected = np.column_stack([recording.channels[axis] for axis in ("Ax", "Ay", "Az")])[j * 25 : (j + 1) * 25].ravel()
        assert np.array_equal(dataset.features[i], expected)


def test_assemble_laser_and_decimation():
    recordings = make_recordings(["H1", "V1", "T1"])

    laser = assemble_dataset(recordings, ChannelSelector.L, window=50, seed=0)
    assert laser.n_channels == 1
    assert len(laser) == 9 * 20

    decimated = assemble_dataset(recordings, ChannelSelector.P, window=50, seed=0, decimation=5)
    assert len(decimated) == 9 * 4


def test_split_depends_only_on_seed():
    recordings = make_recordings(["H1", "V1", "T1"])

    first = assemble_dataset(recordings, ChannelSelector.P, 10, seed=9)
    second = assemble_dataset(recordings, ChannelSelector.P, 10, seed=9)

    assert first.split_assignment == second.split_assignment
    assert first.equals(second)


def test_insufficient_sweeps():
    """Класс с двумя записями отклоняется с указанием класса"""

    recordings = make_recordings(["H1", "V1"]) + make_recordings(["T1"], per_class=2)

    with pytest.raises(InsufficientSweepsError, match="T1") as error:
        assemble_dataset(recordings, ChannelSelector.PA, 50, seed=0)
    assert error.value.count == 2


def test_no_windows():
    recordings = make_recordings(["H1", "V1", "T1"], duration=0.02)

    with pytest.raises(EmptyDatasetError):
        assemble_dataset(recordings, ChannelSelector.PA, 50, seed=0)
    with pytest.raises(InvalidArgumentError):
        assemble_dataset([], ChannelSelector.PA, 50, seed=0)


def test_standardize_uses_train_only():
    """После нормировки обучающая часть центрирована, проверочные части - нет"""

    features, labels = gaussian_blobs(200, [(5.0, -2.0, 0.0), (6.0, -1.0, 0.0)], sd=1.0)
    features[:, 2] = 4.0  # постоянный признак
    dataset = make_dataset(features, labels, seed=2)
    scaled = standardize(dataset)

    train, _ = scaled.subset("train")
    assert np.allclose(train.mean(axis=0), 0.0, atol=1e-9)
    assert np.allclose(train[:, :2].std(axis=0), 1.0)
    assert np.all(scaled.features[:, 2] == 0.0)

    # Статистики не видели val/test
    expected = (features[dataset.mask("val")] - dataset.stats_mean) / np.maximum(dataset.stats_sd, 1e-8)
    assert np.allclose(scaled.subset("val")[0], expected)
    assert not np.allclose(scaled.subset("val")[0][:, :2].mean(axis=0), 0.0, atol=1e-6)


def test_standardize_idempotent():
    features, labels = gaussian_blobs(50, [(3.0, 1.0), (-2.0, 7.0)], sd=2.0)
    once = standardize(make_dataset(features, labels))
    twice = standardize(once)

    assert np.allclose(once.features, twice.features, atol=1e-12)
    assert once.standardized and twice.standardized


def test_dataset_file_round_trip(tmp_path):
    """Запись и чтение дают тот же датасет"""

    dataset = standardize(assemble_dataset(make_recordings(["H1", "V1", "T1"]), ChannelSelector.PA, 25, seed=4))
    restored = read_dataset(write_dataset(dataset, tmp_path / "dataset.csv"))

    assert restored.equals(dataset)


def _rewrite_row(path, row: int, transform):
    lines = path.read_text(encoding="utf-8").splitlines()
    lines[row - 1] = transform(lines[row - 1])
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def test_feature_length_mismatch_reports_line(tmp_path):
    features, labels = gaussian_blobs(10, [(0.0, 0.0), (1.0, 1.0)])
    path = write_dataset(make_dataset(features, labels), tmp_path / "dataset.csv")

    # 10 строк заголовка, строка имен колонок, затем данные
    _rewrite_row(path, 14, lambda line: line.rsplit(",", 1)[0])

    with pytest.raises(DatasetParseError, match="feature-length mismatch") as error:
        read_dataset(path)
    assert error.value.line == 14


def test_unknown_label_reports_line(tmp_path):
    features, labels = gaussian_blobs(10, [(0.0, 0.0), (1.0, 1.0)])
    path = write_dataset(make_dataset(features, labels), tmp_path / "dataset.csv")

    _rewrite_row(path, 12, lambda line: line.replace(",c0,", ",c9,").replace(",c1,", ",c9,"))

    with pytest.raises(DatasetParseError, match="unknown label") as error:
        read_dataset(path)
    assert error.value.line == 12


def test_missing_header(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(MissingHeaderError):
        read_dataset(empty)

    headless = tmp_path / "headless.csv"
    headless.write_text("split,label,source_id,window_index,f_0\ntrain,c0,rec-0,0,1.0\n", encoding="utf-8")
    with pytest.raises(MissingHeaderError):
        read_dataset(headless)


def test_unsupported_version(tmp_path):
    features, labels = gaussian_blobs(10, [(0.0, 0.0), (1.0, 1.0)])
    path = write_dataset(make_dataset(features, labels), tmp_path / "dataset.csv")
    _rewrite_row(path, 1, lambda line: "# version=7")

    with pytest.raises(DatasetParseError, match="unsupported version"):
        read_dataset(path)
