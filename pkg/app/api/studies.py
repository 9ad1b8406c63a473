from fastapi import APIRouter, Depends

from app.api.deps import get_bounded_grid
from app.harness.grid import run_roughness_grid
from app.schemas.harness import GridSpec, StudyReport

router = APIRouter()


@router.post(
    "/roughness",
    response_model=StudyReport,
    summary="Сетка классификации шероховатости",
)
def post_roughness_study(grid: GridSpec = Depends(get_bounded_grid)):
    """
    Выполняет сетку шероховатости синхронно, без записи файлов.
    Сетки больше пределов API отклоняются с кодом 400; полную сетку запускайте из CLI.

    Args:
        grid: оси сетки, прогоны и зерно

    Returns:
        StudyReport: ячейки и проверки трендов
    """

    return run_roughness_grid(grid, parallelism=1)
