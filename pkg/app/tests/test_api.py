import math

import pytest
from httpx import AsyncClient


@pytest.mark.asyncio
async def test_constraint(ac: AsyncClient):
    """Проверка ограничения для датчика давления"""

    response = await ac.get("/sensor/constraint", params={"rate": 157, "speed": 50, "d_sep": 100})

    assert response.status_code == 200

    data = response.json()

    assert data["distance_per_sample"] == pytest.approx(5.31, abs=0.005)
    assert data["min_resolvable_separation"] == pytest.approx(10.62, abs=0.005)
    assert data["satisfied"] is True


@pytest.mark.asyncio
async def test_constraint_invalid_rate(ac: AsyncClient):
    """Нулевая частота - ошибка 400"""

    response = await ac.get("/sensor/constraint", params={"rate": 0, "speed": 50, "d_sep": 100})

    assert response.status_code == 400
    assert "rate=0" in response.json()["detail"]


@pytest.mark.asyncio
async def test_constraint_table(ac: AsyncClient):
    response = await ac.get("/sensor/constraint-table")

    assert response.status_code == 200

    rows = response.json()

    assert [row["sensor"] for row in rows] == ["Pressure Sensor", "Accelerometer", "NCDT Laser"]


@pytest.mark.asyncio
async def test_catalog(ac: AsyncClient):
    """Каталог: 18 образцов шероховатости и 6 материалов"""

    response = await ac.get("/specimens/catalog")

    assert response.status_code == 200

    data = response.json()

    assert len(data["roughness"]) == 18
    assert len(data["hardness"]) == 6


@pytest.mark.asyncio
async def test_specimen_roughness(ac: AsyncClient):
    """Rz сгенерированного профиля совпадает с целевым"""

    response = await ac.get("/specimens/H3/roughness")

    assert response.status_code == 200

    data = response.json()

    assert data["rz"] == pytest.approx(data["rz_target"], rel=1e-6)
    assert data["rq"] >= data["ra"] > 0


@pytest.mark.asyncio
@pytest.mark.parametrize("class_id", ["X9", "hard1"])
async def test_specimen_roughness_not_found(ac: AsyncClient, class_id):
    response = await ac.get(f"/specimens/{class_id}/roughness")

    assert response.status_code == 404


@pytest.mark.asyncio
async def test_dab(ac: AsyncClient):
    """Касание без шума: t_r = tau ln 9"""

    payload = {"class_id": "hard3", "t_dab": 1000, "suite": {"pressure_noise_sd": 0, "accel_noise_sd": 0}}

    response = await ac.post("/sensor/dab", json=payload)

    assert response.status_code == 200

    data = response.json()

    assert data["rise_time_expected"] == pytest.approx(30.0 * math.log(9))
    assert data["rise_time_measured"] == pytest.approx(data["rise_time_expected"], rel=0.02)


@pytest.mark.asyncio
async def test_dab_errors(ac: AsyncClient):
    """Неизвестный материал - 404, слишком короткое касание - 400"""

    response = await ac.post("/sensor/dab", json={"class_id": "H1"})
    assert response.status_code == 404

    response = await ac.post("/sensor/dab", json={"class_id": "hard1", "t_dab": 100})
    assert response.status_code == 400
    assert "steady state unreachable" in response.json()["detail"]


@pytest.mark.asyncio
async def test_roughness_study(ac: AsyncClient):
    """Маленькая сетка через API - одна ячейка"""

    grid = {
        "window_sizes": [50],
        "speeds_mm_min": [50],
        "selectors": ["PA"],
        "models": ["SVM"],
        "n_runs": 1,
        "seed": 7,
        "classes": ["H1", "V1", "T1"],
        "sweep_length": 2.0,
        "svm": {"epochs": 5},
    }

    response = await ac.post("/studies/roughness", json=grid)

    assert response.status_code == 200

    data = response.json()

    assert list(data["cells"]) == ["SVM|V50|W50|PA"]
    assert data["cells"]["SVM|V50|W50|PA"]["error"] is None


@pytest.mark.asyncio
async def test_roughness_study_invalid_grid(ac: AsyncClient):
    response = await ac.post("/studies/roughness", json={"window_sizes": [50, 50]})

    assert response.status_code == 422


@pytest.mark.asyncio
async def test_roughness_study_default_grid_rejected(ac: AsyncClient):
    """Пустое тело - полная сетка по умолчанию, API ее не выполняет"""

    response = await ac.post("/studies/roughness", json={})

    assert response.status_code == 400
    assert "CLI" in response.json()["detail"]


@pytest.mark.asyncio
@pytest.mark.parametrize(
    "override",
    [
        {"n_runs": 10},
        {"sweep_length": 25.0},
        {"window_sizes": [25, 50, 100], "models": ["SVM", "RF"]},
        {"classes": ["H1", "H2", "H3", "V1", "V2", "V3", "T1"]},
    ],
)
async def test_roughness_study_over_limits(ac: AsyncClient, override: dict):
    """Сетка больше любого из пределов API отклоняется с кодом 400"""

    grid = {
        "window_sizes": [50],
        "speeds_mm_min": [50],
        "selectors": ["PA"],
        "models": ["SVM"],
        "n_runs": 1,
        "classes": ["H1", "V1", "T1"],
        "sweep_length": 2.0,
        **override,
    }

    response = await ac.post("/studies/roughness", json=grid)

    assert response.status_code == 400
