import json

import pandas as pd

from app.cli import EXIT_FAILURE, main
from app.classifiers.persistence import load_model
from app.dataset.storage import read_dataset
from app.sensor.io import read_recording_csv
from app.tests.conftest import SMALL_TOML


def test_constraint_command(tmp_path):
    assert main(["constraint", "--out-dir", str(tmp_path)]) == 0

    frame = pd.read_csv(tmp_path / "constraint_table.csv")
    assert len(frame) == 3


def test_catalog_command(tmp_path):
    assert main(["catalog", "--out-dir", str(tmp_path)]) == 0
    assert "[hardness]" in (tmp_path / "catalog.txt").read_text(encoding="utf-8")


def test_sweep_command(tmp_path):
    """Проход пишет поток вибриссы, лазер и профиль"""

    assert main(["sweep", "--class", "H1", "--speed", "50", "--length", "2", "--out-dir", str(tmp_path)]) == 0

    metadata, frame = read_recording_csv(tmp_path / "sweep_H1_V50.csv")
    assert metadata["label"] == "H1"
    assert len(frame) == 2400
    assert (tmp_path / "sweep_H1_V50_laser.csv").exists()
    assert (tmp_path / "sweep_H1_V50_profile.csv").exists()


def test_dab_command(tmp_path):
    assert main(["dab", "--class", "hard6", "--t-dab", "100", "--out-dir", str(tmp_path)]) == 0

    metadata, frame = read_recording_csv(tmp_path / "dab_hard6.csv")
    assert metadata["kind"] == "dab"
    assert list(frame.columns) == ["t_s", "P", "Ax", "Ay", "Az"]


def test_domain_errors_exit_with_failure(tmp_path):
    """Ошибка предметной области - код выхода 2"""

    assert main(["dab", "--class", "H1", "--out-dir", str(tmp_path)]) == EXIT_FAILURE
    assert main(["dab", "--class", "hard1", "--t-dab", "100", "--out-dir", str(tmp_path)]) == EXIT_FAILURE
    assert main(["grid-roughness", "--config", str(tmp_path / "missing.toml"), "--out-dir", str(tmp_path)]) == EXIT_FAILURE


def test_dataset_and_train_commands(tmp_path):
    """Датасет одного прогона, затем обучение модели на файле"""

    config = tmp_path / "study.toml"
    config.write_text(SMALL_TOML, encoding="utf-8")

    assert main(["dataset", "--config", str(config), "--selector", "PA", "--window", "50", "--out-dir", str(tmp_path)]) == 0
    dataset = read_dataset(tmp_path / "roughness_PA_W50.csv")
    assert dataset.class_set == ("H1", "T1", "V1")
    assert dataset.n_features == 200

    assert main(["train", "--config", str(config), "--dataset", str(tmp_path / "roughness_PA_W50.csv"), "--model", "SVM", "--out-dir", str(tmp_path)]) == 0
    model = load_model(tmp_path / "roughness_PA_W50_SVM.npz")
    assert model.class_set == dataset.class_set

    result = json.loads((tmp_path / "roughness_PA_W50_SVM_result.json").read_text(encoding="utf-8"))
    assert 0.0 <= result["accuracy_mean"] <= 100.0
    assert (tmp_path / "roughness_PA_W50_SVM_confusion.csv").exists()


def test_grid_roughness_command(tmp_path):
    config = tmp_path / "study.toml"
    config.write_text(SMALL_TOML, encoding="utf-8")

    assert main(["grid-roughness", "--config", str(config), "--out-dir", str(tmp_path), "--parallelism", "1"]) == 0

    report = json.loads((tmp_path / "roughness_report.json").read_text(encoding="utf-8"))
    assert list(report["cells"]) == ["SVM|V50|W50|PA"]
