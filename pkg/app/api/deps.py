from fastapi import HTTPException, status
from loguru import logger

from app.core.config import settings
from app.core.exceptions import InvalidArgumentError
from app.schemas.harness import GridSpec
from app.schemas.surface import HardnessSpec, SurfaceSpec
from app.surface.catalog import find_specimen


def get_specimen(class_id: str) -> SurfaceSpec | HardnessSpec:
    """
    Возвращает образец каталога по идентификатору

    Raises:
        HTTPException: если образец не найден (404)
    """

    try:
        return find_specimen(class_id)
    except InvalidArgumentError:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"Образец {class_id} не найден",
        )


def get_roughness_specimen(class_id: str) -> SurfaceSpec:
    """Образец шероховатости; для материала твердости - 404"""

    spec = get_specimen(class_id)
    if not isinstance(spec, SurfaceSpec):
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"{class_id} не является образцом шероховатости",
        )
    return spec


def get_hardness_specimen(class_id: str) -> HardnessSpec:
    """Материал для касаний; для образца шероховатости - 404"""

    spec = get_specimen(class_id)
    if not isinstance(spec, HardnessSpec):
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"{class_id} не является материалом твердости",
        )
    return spec


def get_bounded_grid(grid: GridSpec) -> GridSpec:
    """
    Сетка, которую можно выполнить синхронно в обработчике запроса

    Raises:
        HTTPException: сетка больше пределов API (400)
    """

    n_cells = len(grid.window_sizes) * len(grid.speeds_mm_min) * len(grid.selectors) * len(grid.models)
    problems = []
    if n_cells > settings.API_MAX_CELLS:
        problems.append(f"ячеек {n_cells}, допустимо {settings.API_MAX_CELLS}")
    if grid.n_runs > settings.API_MAX_RUNS:
        problems.append(f"прогонов {grid.n_runs}, допустимо {settings.API_MAX_RUNS}")
    if grid.classes is None or len(grid.classes) > settings.API_MAX_CLASSES:
        problems.append(f"нужно явно выбрать не больше {settings.API_MAX_CLASSES} классов")
    if grid.sweep_length > settings.API_MAX_SWEEP_LENGTH_MM:
        problems.append(f"длина прохода {grid.sweep_length} мм, допустимо {settings.API_MAX_SWEEP_LENGTH_MM}")
    if grid.sweeps_per_class > settings.API_MAX_SWEEPS_PER_CLASS:
        problems.append(f"проходов на класс {grid.sweeps_per_class}, допустимо {settings.API_MAX_SWEEPS_PER_CLASS}")

    if problems:
        logger.warning(f"Сетка отклонена: {'; '.join(problems)}")
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"Сетка слишком велика для API, запустите ее из CLI: {'; '.join(problems)}",
        )
    return grid
