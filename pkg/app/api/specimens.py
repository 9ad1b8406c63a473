from fastapi import APIRouter, Depends

from app.api.deps import get_roughness_specimen
from app.schemas.surface import RoughnessStats, SpecimenCatalog, SurfaceSpec
from app.surface.catalog import list_specimen_catalog
from app.surface.generator import build_roughness_profile
from app.surface.roughness import compute_ra, compute_rq, compute_rz

# Профиль для оценки: 25 мм с шагом 1 мкм, но не короче 10 периодов
INSPECTION_LENGTH = 25_000.0
INSPECTION_RESOLUTION = 1.0

router = APIRouter()


@router.get(
    "/catalog",
    response_model=SpecimenCatalog,
    summary="Каталог образцов",
)
async def get_catalog():
    """18 образцов шероховатости и 6 материалов твердости"""

    return list_specimen_catalog()


@router.get(
    "/{class_id}/roughness",
    response_model=RoughnessStats,
    summary="Ra, Rz и Rq сгенерированного профиля",
)
def get_roughness(spec: SurfaceSpec = Depends(get_roughness_specimen)):
    """
    Генерирует профиль образца и считает его шероховатость

    Args:
        spec: образец каталога

    Raises:
        HTTPException: если образец не найден (404)

    Returns:
        RoughnessStats: Ra, Rz, Rq и целевые параметры
    """

    length = max(INSPECTION_LENGTH, 10 * spec.spatial_period + INSPECTION_RESOLUTION)
    profile = build_roughness_profile(spec, length, INSPECTION_RESOLUTION)

    return RoughnessStats(
        class_id=spec.class_id,
        ra=compute_ra(profile),
        rz=compute_rz(profile),
        rq=compute_rq(profile),
        rz_target=spec.rz_target,
        spatial_period=spec.spatial_period,
    )
