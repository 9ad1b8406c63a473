from app.core.exceptions import InvalidArgumentError
from app.schemas.sensor import ConstraintReport, ConstraintTableRow

# Датчики по умолчанию: имя -> частота, Гц
DEFAULT_SENSORS = {
    "Pressure Sensor": 157.0,
    "Accelerometer": 1000.0,
    "NCDT Laser": 2500.0,
}

DEFAULT_SPEEDS = (50.0, 100.0)


def _distance_per_sample(rate: float, speed: float) -> float:
    # мм/мин -> мкм/с, затем путь между соседними отсчетами
    return speed * 1000.0 / 60.0 / rate


def check_sampling_constraint(rate: float, speed: float, d_sep: float) -> ConstraintReport:
    """
    Проверяет ограничение на сбор данных: D = V_s / N < d_sep / 2.

    Args:
        rate: частота дискретизации датчика N, Гц
        speed: скорость линейного стола V_s, мм/мин
        d_sep: минимальное расстояние между макрозернами, мкм

    Raises:
        InvalidArgumentError: любой из аргументов не положителен

    Returns:
        ConstraintReport: D, 2D, признак выполнения и запас
    """

    if rate <= 0 or speed <= 0 or d_sep <= 0:
        raise InvalidArgumentError(f"Аргументы должны быть положительны: rate={rate}, speed={speed}, d_sep={d_sep}")

    distance = _distance_per_sample(rate, speed)

    return ConstraintReport(
        rate=rate,
        speed=speed,
        d_sep=d_sep,
        distance_per_sample=distance,
        min_resolvable_separation=2 * distance,
        satisfied=distance < d_sep / 2,
        margin=d_sep / 2 - distance,
    )


def window_surface_length(rate: float, speed: float, window: int) -> float:
    """Длина поверхности, попадающая в одно временное окно: L = D * W, мкм"""

    if window < 1:
        raise InvalidArgumentError(f"Размер окна должен быть >= 1, получено {window}")

    return check_sampling_constraint(rate, speed, d_sep=1.0).distance_per_sample * window


def constraint_table(
    sensors: dict[str, float] | None = None,
    speeds: tuple[float, ...] = DEFAULT_SPEEDS,
) -> list[ConstraintTableRow]:
    """
    Считает таблицу D и минимально различимого d_sep для набора датчиков и скоростей

    Args:
        sensors: имя датчика -> частота; по умолчанию давление, акселерометр и лазер
        speeds: скорости стола, мм/мин

    Returns:
        list[ConstraintTableRow]: по строке на датчик
    """

    rows = []
    for name, rate in (sensors or DEFAULT_SENSORS).items():
        distances = {}
        separations = {}
        for speed in speeds:
            report = check_sampling_constraint(rate, speed, d_sep=1.0)
            distances[speed] = report.distance_per_sample
            separations[speed] = report.min_resolvable_separation
        rows.append(ConstraintTableRow(sensor=name, rate=rate, distances=distances, separations=separations))

    return rows
