from collections import defaultdict
from dataclasses import dataclass
from itertools import groupby
from pathlib import Path

from joblib import Parallel, delayed
from loguru import logger

from app.classifiers.metrics import aggregate_results
from app.classifiers.runs import run_seeds, single_run
from app.core.config import settings
from app.core.exceptions import InsufficientSweepsError, InvalidArgumentError, WhiskerBenchError
from app.dataset.assembly import MIN_RECORDINGS_PER_CLASS, assemble_dataset, standardize
from app.harness.simulation import dab_recordings, roughness_specs, sweep_recordings
from app.harness.tables import write_accuracy_table, write_confusion_csv, write_report_json
from app.schemas.classifiers import ExperimentResult, ModelFamily
from app.schemas.dataset import ChannelSelector
from app.schemas.harness import CellResult, GridSpec, PredicateCheck, StudyReport
from app.schemas.surface import HardnessSpec
from app.surface.catalog import list_specimen_catalog

# Допуски проверок трендов, процентные пункты
APPROX_TOLERANCE = 5.0  # "примерно равно"
NOISE_TOLERANCE = 2.0  # разброс между соседними условиями
ORDERING_MARGIN = 3.0  # PA над A для шероховатости
HARDNESS_MARGIN = 10.0  # P и PA над A для твердости
TARGET_ACCURACY = 90.0

SINGLE_RUN_WARNING = "n_runs=1: дисперсия точности не определена и записана как 0"

HARDNESS_SELECTORS = (ChannelSelector.P, ChannelSelector.A, ChannelSelector.PA)


def cell_key(model, speed: float | None, window: int, selector, factor: int = 1) -> str:
    """Стабильный ключ ячейки, например "SVM|V50|W50|PA" или "RF|dab|W50|P" """

    condition = "dab" if speed is None else f"V{speed:g}"
    parts = [ModelFamily(model).value, condition, f"W{window}", ChannelSelector(selector).value]
    if factor != 1:
        parts.append(f"x{factor}")
    return "|".join(parts)


@dataclass(frozen=True)
class CellPlan:
    model: ModelFamily
    speed: float | None
    window: int
    selector: ChannelSelector
    factor: int = 1

    @property
    def key(self) -> str:
        return cell_key(self.model, self.speed, self.window, self.selector, self.factor)


def _dataset_group(plan: CellPlan) -> tuple:
    return plan.window, plan.selector.value, plan.factor


def train_cells(recordings: list, plans: list[CellPlan], grid: GridSpec, run: int) -> dict[str, ExperimentResult | str]:
    """
    Обучает все ячейки одного прогона на общем наборе записей.

    Датасет собирается один раз на (W, селектор, прореживание) и делится
    между моделями. Ошибка ячейки записывается текстом, остальные продолжаются.
    """

    split_seed, model_seed = run_seeds(grid.seed, run)
    outputs: dict[str, ExperimentResult | str] = {}

    for (window, selector, factor), group in groupby(sorted(plans, key=_dataset_group), key=_dataset_group):
        group = list(group)
        try:
            dataset = standardize(assemble_dataset(recordings, selector, window, split_seed, grid.stream_rate, factor))
        except WhiskerBenchError as e:
            logger.warning(f"Прогон {run}, W={window}, {selector}, x{factor}: {e}")
            outputs.update({plan.key: str(e) for plan in group})
            continue

        for plan in group:
            try:
                outputs[plan.key] = single_run(dataset, grid.model_settings(plan.model), model_seed)
            except (WhiskerBenchError, ArithmeticError, ValueError) as e:
                logger.error(f"Ячейка {plan.key}, прогон {run}: {e}")
                outputs[plan.key] = str(e)

    return outputs


def _run_unit(grid: GridSpec, plans: list[CellPlan], speed: float | None, run: int) -> dict[str, ExperimentResult | str]:
    recordings = dab_recordings(grid, run) if speed is None else sweep_recordings(grid, speed, run)
    return train_cells(recordings, plans, grid, run)


def _fingerprint(plan: CellPlan, results: list[ExperimentResult], grid: GridSpec) -> dict:
    fingerprint = {key: value for key, value in results[0].config_fingerprint.items() if key != "seed"}
    fingerprint.update(
        {
            "speed_mm_min": plan.speed,
            "window": plan.window,
            "selector": plan.selector.value,
            "decimation": plan.factor,
            "stream_rate": grid.stream_rate,
            "base_seed": grid.seed,
            "n_runs": grid.n_runs,
            "runs": [dict(zip(("split_seed", "model_seed"), run_seeds(grid.seed, run))) for run in range(grid.n_runs)],
            "sensor": grid.sensor.model_dump(mode="json"),
        }
    )
    return fingerprint


def execute_plans(grid: GridSpec, plans: list[CellPlan], parallelism: int | None = None) -> dict[str, CellResult]:
    """
    Выполняет ячейки: задания (условие, прогон) независимы и идут параллельно,
    результаты сливаются по ключу ячейки, поэтому порядок завершения заданий
    не влияет на отчет.
    """

    parallelism = parallelism or settings.PARALLELISM
    by_speed: dict[float | None, list[CellPlan]] = defaultdict(list)
    for plan in plans:
        by_speed[plan.speed].append(plan)

    units = [(speed, run) for speed in sorted(by_speed, key=lambda s: -1.0 if s is None else s) for run in range(grid.n_runs)]
    logger.info(f"Запуск {len(plans)} ячеек: {len(units)} заданий, параллельность {parallelism}")

    outputs = Parallel(n_jobs=parallelism)(delayed(_run_unit)(grid, by_speed[speed], speed, run) for speed, run in units)

    cells = {}
    for plan in sorted(plans, key=lambda p: p.key):
        per_run = [output[plan.key] for (speed, _), output in zip(units, outputs) if speed == plan.speed]
        errors = [value for value in per_run if isinstance(value, str)]
        common = {"key": plan.key, "model": plan.model, "speed": plan.speed, "window": plan.window, "selector": plan.selector, "factor": plan.factor}

        if errors:
            cells[plan.key] = CellResult(**common, error=errors[0])
            logger.error(f"Ячейка {plan.key} не обучена: {errors[0]}")
        else:
            cells[plan.key] = CellResult(**common, result=aggregate_results(per_run, _fingerprint(plan, per_run, grid)))
            logger.info(f"Ячейка {plan.key}: {cells[plan.key].result.accuracy_mean:.2f}%")

    return cells


def make_check(name: str, scope: str, passed: bool, detail: str) -> PredicateCheck:
    if not passed:
        logger.warning(f"Проверка {name} [{scope}] не пройдена: {detail}")
    return PredicateCheck(name=name, scope=scope, passed=bool(passed), detail=detail)


def _accuracy(cells: dict[str, CellResult], *key_parts) -> float | None:
    cell = cells.get(cell_key(*key_parts))
    return cell.result.accuracy_mean if cell is not None and cell.result is not None else None


def roughness_checks(cells: dict[str, CellResult], grid: GridSpec) -> list[PredicateCheck]:
    """
    Тренды по ячейкам шероховатости: PA >= P >= A с запасом PA - A,
    PA примерно равно L для лучшей модели, точность не растет со скоростью.
    """

    checks = []
    P, A, PA, L = ChannelSelector.P, ChannelSelector.A, ChannelSelector.PA, ChannelSelector.L

    for model in grid.models:
        for speed in grid.speeds_mm_min:
            for window in grid.window_sizes:
                p, a, pa = (_accuracy(cells, model, speed, window, s) for s in (P, A, PA))
                if None in (p, a, pa):
                    continue
                checks.append(
                    make_check(
                        "selector-ordering",
                        cell_key(model, speed, window, PA).rsplit("|", 1)[0],
                        pa >= p >= a and pa - a >= ORDERING_MARGIN,
                        f"PA={pa:.2f}, P={p:.2f}, A={a:.2f}",
                    )
                )

    for speed in grid.speeds_mm_min:
        for window in grid.window_sizes:
            scored = [(model, _accuracy(cells, model, speed, window, PA)) for model in grid.models]
            scored = [(model, value) for model, value in scored if value is not None]
            if not scored:
                continue
            best_model, best_pa = max(scored, key=lambda item: item[1])
            laser = _accuracy(cells, best_model, speed, window, L)
            if laser is None:
                continue
            checks.append(
                make_check(
                    "laser-agreement",
                    f"V{speed:g}|W{window}",
                    abs(best_pa - laser) <= APPROX_TOLERANCE,
                    f"{best_model.value}: PA={best_pa:.2f}, L={laser:.2f}",
                )
            )

    speeds = sorted(grid.speeds_mm_min)
    for model in grid.models:
        for selector in grid.selectors:
            for window in grid.window_sizes:
                for slow, fast in zip(speeds, speeds[1:]):
                    slow_acc = _accuracy(cells, model, slow, window, selector)
                    fast_acc = _accuracy(cells, model, fast, window, selector)
                    if slow_acc is None or fast_acc is None:
                        continue
                    checks.append(
                        make_check(
                            "speed-monotonicity",
                            f"{model.value}|W{window}|{selector.value}",
                            slow_acc >= fast_acc - NOISE_TOLERANCE,
                            f"V{slow:g}={slow_acc:.2f}, V{fast:g}={fast_acc:.2f}",
                        )
                    )

    pa_cells = [cell for cell in cells.values() if cell.selector == PA and cell.ok]
    if pa_cells:
        best = max(pa_cells, key=lambda cell: cell.result.accuracy_mean)
        checks.append(make_check("best-accuracy", best.key, best.result.accuracy_mean >= TARGET_ACCURACY, f"{best.result.accuracy_mean:.2f}%"))

    return checks


def hardness_checks(cells: dict[str, CellResult], grid: GridSpec) -> list[PredicateCheck]:
    """(P примерно равно PA) > A с запасом; RF - лучшее семейство на P/PA"""

    checks = []
    P, A, PA = ChannelSelector.P, ChannelSelector.A, ChannelSelector.PA

    for model in grid.models:
        for window in grid.window_sizes:
            p, a, pa = (_accuracy(cells, model, None, window, s) for s in (P, A, PA))
            if None in (p, a, pa):
                continue
            checks.append(
                make_check(
                    "hardness-ordering",
                    f"{model.value}|dab|W{window}",
                    abs(p - pa) <= APPROX_TOLERANCE and min(p, pa) - a >= HARDNESS_MARGIN,
                    f"P={p:.2f}, PA={pa:.2f}, A={a:.2f}",
                )
            )

    for window in grid.window_sizes:
        best_by_model = {}
        for model in grid.models:
            values = [v for v in (_accuracy(cells, model, None, window, s) for s in (P, PA)) if v is not None]
            if values:
                best_by_model[model] = max(values)
        if ModelFamily.RF in best_by_model and len(best_by_model) > 1:
            rf = best_by_model[ModelFamily.RF]
            others = max(value for model, value in best_by_model.items() if model != ModelFamily.RF)
            checks.append(make_check("rf-best", f"dab|W{window}", rf >= others, f"RF={rf:.2f}, остальные <= {others:.2f}"))

    candidates = [cell for cell in cells.values() if cell.ok and cell.selector in (P, PA)]
    if candidates:
        best = max(candidates, key=lambda cell: cell.result.accuracy_mean)
        checks.append(make_check("best-accuracy", best.key, best.result.accuracy_mean >= TARGET_ACCURACY, f"{best.result.accuracy_mean:.2f}%"))

    return checks


def finish_report(
    study: str,
    grid: GridSpec,
    cells: dict[str, CellResult],
    checks: list[PredicateCheck],
    warnings: list[str],
    out_dir: Path | None,
    extra_files: tuple[Path, ...] = (),
) -> StudyReport:
    """Собирает отчет и, если задан out_dir, пишет таблицу, матрицу лучшей ячейки и JSON"""

    if grid.n_runs < 2:
        logger.warning(SINGLE_RUN_WARNING)
        warnings = [*warnings, SINGLE_RUN_WARNING]

    report = StudyReport(study=study, seed=grid.seed, cells=cells, checks=checks, warnings=warnings)

    if out_dir is not None:
        out_dir = Path(out_dir)
        emitted = [*extra_files, write_accuracy_table(report, out_dir / f"{study}_table.csv")]

        succeeded = [cell for cell in cells.values() if cell.ok]
        if succeeded:
            best = max(succeeded, key=lambda cell: (cell.result.accuracy_mean, cell.key))
            emitted.append(write_confusion_csv(best.result, out_dir / f"{study}_confusion_{best.key.replace('|', '_')}.csv"))

        report.emitted_files = [str(path) for path in emitted]
        report.emitted_files.append(str(out_dir / f"{study}_report.json"))
        write_report_json(report, out_dir / f"{study}_report.json")

    passed = sum(check.passed for check in checks)
    logger.info(f"Исследование {study}: {len(cells)} ячеек, ошибок {len(report.failures)}, проверок пройдено {passed}/{len(checks)}")
    return report


def run_roughness_grid(grid: GridSpec, out_dir: Path | None = None, parallelism: int | None = None) -> StudyReport:
    """
    Сетка классификации шероховатости: W x V_s x селектор x модель.

    Args:
        grid: оси сетки, число прогонов и зерно
        out_dir: каталог для таблицы, матрицы ошибок и отчета
        parallelism: число параллельных заданий

    Raises:
        InsufficientSweepsError: меньше трех проходов на класс

    Returns:
        StudyReport: ячейки с mu/sigma^2 и проверки трендов
    """

    if grid.sweeps_per_class < MIN_RECORDINGS_PER_CLASS:
        raise InsufficientSweepsError(roughness_specs(grid)[0].class_id, grid.sweeps_per_class, MIN_RECORDINGS_PER_CLASS)

    plans = [
        CellPlan(model, speed, window, selector)
        for model in grid.models
        for speed in grid.speeds_mm_min
        for window in grid.window_sizes
        for selector in grid.selectors
    ]
    cells = execute_plans(grid, plans, parallelism)
    return finish_report("roughness", grid, cells, roughness_checks(cells, grid), [], out_dir)


def hardness_materials(grid: GridSpec) -> list[HardnessSpec]:
    """
    Материалы касаний, выбранные сеткой.

    Raises:
        InvalidArgumentError: нет материалов
        InsufficientSweepsError: меньше трех касаний на материал
    """

    materials = [m for m in list_specimen_catalog().hardness if grid.classes is None or m.class_id in grid.classes]
    if not materials:
        raise InvalidArgumentError("empty dab set: нет материалов для касаний")
    if grid.dabs_per_material < MIN_RECORDINGS_PER_CLASS:
        raise InsufficientSweepsError(materials[0].class_id, grid.dabs_per_material, MIN_RECORDINGS_PER_CLASS)
    return materials


def run_hardness_grid(grid: GridSpec, out_dir: Path | None = None, parallelism: int | None = None) -> StudyReport:
    """
    Сетка классификации твердости по касаниям; селекторы только A, P, PA,
    ось скоростей не используется.

    Raises:
        InvalidArgumentError: нет материалов или селекторов A/P/PA
        InsufficientSweepsError: меньше трех касаний на материал
    """

    hardness_materials(grid)

    warnings = []
    selectors = [selector for selector in grid.selectors if selector in HARDNESS_SELECTORS]
    if ChannelSelector.L in grid.selectors:
        warnings.append("Селектор L не применяется к касаниям и пропущен")
        logger.warning(warnings[-1])
    if not selectors:
        raise InvalidArgumentError("Для твердости нужен хотя бы один селектор из A, P, PA")

    plans = [CellPlan(model, None, window, selector) for model in grid.models for window in grid.window_sizes for selector in selectors]
    cells = execute_plans(grid, plans, parallelism)
    return finish_report("hardness", grid, cells, hardness_checks(cells, grid), warnings, out_dir)
