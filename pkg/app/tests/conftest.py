from typing import AsyncGenerator

import numpy as np
import pytest
from httpx import AsyncClient, ASGITransport

from app.main import app
from app.models.dataset import LabeledDataset
from app.schemas.classifiers import ModelFamily
from app.schemas.dataset import ChannelSelector
from app.schemas.harness import GridSpec
from app.schemas.surface import ClassFamily, SurfaceSpec, Waveform

# Конфигурация маленькой сетки, эквивалентная фикстуре small_grid
SMALL_TOML = """
[grid]
window_sizes = [50]
speeds_mm_min = [50]
selectors = ["PA"]
models = ["SVM"]
n_runs = 1
seed = 7
classes = ["H1", "V1", "T1"]
sweep_length = 2.0
sweeps_per_class = 3

[svm]
epochs = 5
"""


def make_dataset(features, labels, seed: int = 0, selector: ChannelSelector = ChannelSelector.P) -> LabeledDataset:
    """Датасет из готовых векторов: W = длина вектора, k = 1"""

    features = np.asarray(features, dtype=float)
    return LabeledDataset.from_arrays(
        features=features,
        labels=[str(label) for label in labels],
        source_ids=[f"rec-{i % 3}" for i in range(len(labels))],
        window_indices=list(range(len(labels))),
        selector=selector,
        window=features.shape[1],
        seed=seed,
    )


def gaussian_blobs(n_per_class: int, centers, sd: float = 0.3, seed: int = 0):
    rng = np.random.default_rng(seed)
    features, labels = [], []
    for label, center in enumerate(centers):
        features.append(rng.normal(center, sd, (n_per_class, len(center))))
        labels.extend([f"c{label}"] * n_per_class)
    return np.vstack(features), labels


# Фикстуры
@pytest.fixture(scope="function")
async def ac() -> AsyncGenerator[AsyncClient, None]:
    """Асинхронный клиент"""
    async with AsyncClient(transport=ASGITransport(app=app), base_url="http://test") as ac:
        yield ac


@pytest.fixture
def triangular_spec() -> SurfaceSpec:
    """Образец с треугольным зерном, Rz = 10 мкм, без шума"""
    return SurfaceSpec(
        class_family=ClassFamily.HORIZONTAL_MILLING,
        subclass_index=3,
        rz_target=10.0,
        spatial_period=400.0,
        waveform=Waveform.TRIANGULAR,
        noise_amplitude=0.0,
    )


@pytest.fixture
def blobs_dataset() -> LabeledDataset:
    """Две далеко разнесенные гауссовы группы в 2D"""
    features, labels = gaussian_blobs(150, [(-3.0, -3.0), (3.0, 3.0)])
    return make_dataset(features, labels)


@pytest.fixture
def small_grid() -> GridSpec:
    """Маленькая сетка: три класса с мелким зерном, короткие проходы, один прогон"""
    return GridSpec(
        window_sizes=(50,),
        speeds_mm_min=(50.0,),
        selectors=(ChannelSelector.PA,),
        models=(ModelFamily.SVM,),
        n_runs=1,
        seed=7,
        classes=("H1", "V1", "T1"),
        sweep_length=2.0,
        sweeps_per_class=3,
        svm={"epochs": 5},
    )
