import math

from fastapi import APIRouter
from loguru import logger

from app.api.deps import get_hardness_specimen
from app.schemas.api import DabRequest, DabResponse
from app.schemas.sensor import ConstraintReport, ConstraintTableRow
from app.sensor.constraint import check_sampling_constraint, constraint_table
from app.sensor.dab import simulate_dab

router = APIRouter()


@router.get(
    "/constraint",
    response_model=ConstraintReport,
    summary="Проверка ограничения на сбор данных",
)
async def get_constraint(rate: float, speed: float, d_sep: float):
    """
    Проверяет D = V_s / N < d_sep / 2 для одного датчика

    Args:
        rate: частота дискретизации, Гц
        speed: скорость стола, мм/мин
        d_sep: расстояние между макрозернами, мкм

    Returns:
        ConstraintReport: D, 2D, признак выполнения и запас
    """

    return check_sampling_constraint(rate, speed, d_sep)


@router.get(
    "/constraint-table",
    response_model=list[ConstraintTableRow],
    summary="Таблица D и d_sep для датчиков по умолчанию",
)
async def get_constraint_table():
    return constraint_table()


@router.post(
    "/dab",
    response_model=DabResponse,
    summary="Моделирование касания материала",
)
def post_dab(request: DabRequest):
    """
    Моделирует касание и возвращает измеренные времена нарастания и спада

    Raises:
        HTTPException: если материал не найден (404)
    """

    material = get_hardness_specimen(request.class_id)
    recording = simulate_dab(material, request.t_dab, request.suite, request.seed)
    logger.info(f"Касание {material.class_id} по запросу: t_r={recording.rise_time_measured:.2f} мс")

    return DabResponse(
        class_id=material.class_id,
        material=material.name,
        t_dab=request.t_dab,
        rise_time_measured=recording.rise_time_measured,
        fall_time_measured=recording.fall_time_measured,
        rise_time_expected=material.rise_time_constant * math.log(9.0),
        duration=recording.duration,
    )
