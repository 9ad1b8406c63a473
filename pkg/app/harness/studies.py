from pathlib import Path

from loguru import logger

from app.core.exceptions import InvalidArgumentError
from app.harness.grid import NOISE_TOLERANCE, CellPlan, cell_key, execute_plans, finish_report, hardness_materials, make_check
from app.harness.tables import write_plot_data
from app.schemas.classifiers import ModelFamily
from app.schemas.dataset import ChannelSelector
from app.schemas.harness import GridSpec, StudyReport
from app.sensor.fusion import DECIMATION_FACTORS

WINDOW_SIZES = (25, 50, 100, 200)
STUDY_SPEED = 50.0
STUDY_WINDOW = 50
STUDY_KINDS = ("roughness", "hardness")


def run_downsampling_study(
    grid: GridSpec,
    factors: tuple[int, ...] = DECIMATION_FACTORS,
    speed: float = STUDY_SPEED,
    window: int = STUDY_WINDOW,
    out_dir: Path | None = None,
    parallelism: int | None = None,
) -> StudyReport:
    """
    Точность PA в зависимости от частоты потока: 1000 Гц прореживается
    в 1..5 раз (1000, 500, 333, 250, 200 Гц) при V_s = 50 мм/мин и W = 50.

    Ячейка с коэффициентом 1 совпадает с ячейкой сетки шероховатости
    при том же зерне.

    Returns:
        StudyReport: ячейки по (модель, коэффициент) и проверки тренда
    """

    if not factors:
        raise InvalidArgumentError("Нужен хотя бы один коэффициент прореживания")

    grid = grid.model_copy(update={"speeds_mm_min": (speed,), "window_sizes": (window,), "selectors": (ChannelSelector.PA,)})
    plans = [CellPlan(model, speed, window, ChannelSelector.PA, factor) for model in grid.models for factor in factors]
    cells = execute_plans(grid, plans, parallelism)

    checks, points = [], []
    for model in grid.models:
        series = []
        for factor in factors:
            cell = cells[cell_key(model, speed, window, ChannelSelector.PA, factor)]
            rate = grid.stream_rate / factor
            if cell.ok:
                series.append((factor, cell.result.accuracy_mean))
                points.append(
                    {
                        "model": model.value,
                        "factor": factor,
                        "rate_hz": round(rate, 2),
                        "accuracy_mean": cell.result.accuracy_mean,
                        "accuracy_variance": cell.result.accuracy_variance,
                    }
                )

        if len(series) < 2:
            continue

        rising = [(a, b) for (_, a), (_, b) in zip(series, series[1:]) if b > a + NOISE_TOLERANCE]
        checks.append(
            make_check(
                "downsampling-trend",
                model.value,
                not rising,
                ", ".join(f"x{factor}={accuracy:.2f}" for factor, accuracy in series),
            )
        )
        (_, highest), (_, lowest) = series[0], series[-1]
        checks.append(
            make_check(
                "downsampling-gap",
                model.value,
                highest - lowest >= NOISE_TOLERANCE,
                f"{grid.stream_rate / series[0][0]:g} Гц: {highest:.2f}, {grid.stream_rate / series[-1][0]:.0f} Гц: {lowest:.2f}",
            )
        )

    extra = (write_plot_data(points, Path(out_dir) / "downsampling.csv"),) if out_dir is not None else ()
    return finish_report("downsampling", grid, cells, checks, [], out_dir, extra)


def run_window_tradeoff(
    grid: GridSpec,
    windows: tuple[int, ...] = WINDOW_SIZES,
    speed: float = STUDY_SPEED,
    kind: str = "roughness",
    out_dir: Path | None = None,
    parallelism: int | None = None,
) -> StudyReport:
    """
    Точность, время обучения и время инференса на окно для W из windows, селектор PA.

    kind="roughness" - проходы при V_s = speed, kind="hardness" - касания
    материалов сетки. Окно длиннее потока дает ячейку с ошибкой
    и предупреждение в отчете.

    Raises:
        InvalidArgumentError: неизвестный kind; для касаний - нет материалов
        InsufficientSweepsError: для касаний - меньше трех касаний на материал

    Returns:
        StudyReport: ячейки по (модель, W); данные для графика - строка на (W, модель)
    """

    if kind not in STUDY_KINDS:
        raise InvalidArgumentError(f"Неизвестный вид исследования: {kind}, ожидается один из {STUDY_KINDS}")

    if kind == "hardness":
        hardness_materials(grid)
        condition = None
        grid = grid.model_copy(update={"window_sizes": tuple(windows), "selectors": (ChannelSelector.PA,)})
    else:
        condition = speed
        grid = grid.model_copy(update={"speeds_mm_min": (speed,), "window_sizes": tuple(windows), "selectors": (ChannelSelector.PA,)})

    plans = [CellPlan(model, condition, window, ChannelSelector.PA) for model in grid.models for window in windows]
    cells = execute_plans(grid, plans, parallelism)

    warnings, points = [], []
    for window in windows:
        for model in grid.models:
            cell = cells[cell_key(model, condition, window, ChannelSelector.PA)]
            if not cell.ok:
                warnings.append(f"W={window}, {model.value}: {cell.error}")
                continue
            points.append(
                {
                    "kind": kind,
                    "window": window,
                    "model": model.value,
                    "accuracy_mean": cell.result.accuracy_mean,
                    "accuracy_variance": cell.result.accuracy_variance,
                    "train_time_s": cell.result.train_time,
                    "inference_time_us": cell.result.inference_time_per_window,
                }
            )

    checks = []
    if ModelFamily.MLP in grid.models:
        timings = sorted((p["window"], p["inference_time_us"]) for p in points if p["model"] == ModelFamily.MLP.value)
        if len(timings) >= 2:
            checks.append(
                make_check(
                    "inference-time-trend",
                    ModelFamily.MLP.value,
                    all(b >= a for (_, a), (_, b) in zip(timings, timings[1:])),
                    ", ".join(f"W{w}={t:.1f} мкс" for w, t in timings),
                )
            )

    for warning in warnings:
        logger.warning(warning)

    extra = (write_plot_data(points, Path(out_dir) / f"window_tradeoff_{kind}.csv"),) if out_dir is not None else ()
    return finish_report(f"window_{kind}", grid, cells, checks, warnings, out_dir, extra)
