from pathlib import Path

import pandas as pd
from loguru import logger

from app.schemas.classifiers import ExperimentResult, ModelFamily
from app.schemas.harness import StudyReport
from app.sensor.constraint import DEFAULT_SPEEDS, constraint_table

MODEL_ORDER = [family.value for family in ModelFamily]


def _prepare(path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def emit_constraint_table(path: Path, sensors: dict[str, float] | None = None, speeds: tuple[float, ...] = DEFAULT_SPEEDS) -> Path:
    """
    Таблица ограничения на сбор данных: для каждого датчика и скорости
    путь за отсчет D и минимально различимое d_sep = 2D, мкм, 2 знака.
    """

    records = []
    for row in constraint_table(sensors, speeds):
        record = {"sensor": row.sensor, "rate_hz": row.rate}
        for speed in speeds:
            record[f"D_um_V{speed:g}"] = round(row.distances[speed], 2)
            record[f"d_sep_um_V{speed:g}"] = round(row.separations[speed], 2)
        records.append(record)

    path = _prepare(path)
    pd.DataFrame.from_records(records).to_csv(path, index=False)
    logger.info(f"Таблица ограничения ({len(records)} датчика) сохранена в {path}")
    return path


def accuracy_frame(report: StudyReport) -> pd.DataFrame:
    """
    Сводная таблица точности: строки (W, модель, прореживание), столбцы
    (условие, селектор) -> mu и sigma^2.
    """

    records = []
    for cell in report.cells.values():
        condition = "dab" if cell.speed is None else f"V{cell.speed:g}"
        record = {"window": cell.window, "model": cell.model.value, "factor": cell.factor, "column": f"{condition}_{cell.selector.value}"}
        record["mu"] = cell.result.accuracy_mean if cell.ok else float("nan")
        record["var"] = cell.result.accuracy_variance if cell.ok else float("nan")
        records.append(record)

    if not records:
        return pd.DataFrame()

    frame = pd.DataFrame.from_records(records)
    table = frame.pivot_table(index=["window", "model", "factor"], columns="column", values=["mu", "var"], dropna=False)
    table.columns = [f"{column}_{stat}" for stat, column in table.columns]
    table = table.reindex(sorted(table.columns), axis=1).reset_index()

    table["model"] = pd.Categorical(table["model"], categories=MODEL_ORDER, ordered=True)
    return table.sort_values(["window", "model", "factor"]).reset_index(drop=True).round(2)


def write_accuracy_table(report: StudyReport, path: Path) -> Path:
    path = _prepare(path)
    accuracy_frame(report).to_csv(path, index=False)
    logger.info(f"Таблица точности {report.study} сохранена в {path}")
    return path


def write_confusion_csv(result: ExperimentResult, path: Path) -> Path:
    """Матрица ошибок: строки - истинный класс, столбцы - предсказанный"""

    path = _prepare(path)
    frame = pd.DataFrame(result.confusion_matrix, index=result.class_set, columns=result.class_set)
    frame.to_csv(path, index_label="true\\predicted")
    logger.info(f"Матрица ошибок {result.model_family} сохранена в {path}")
    return path


def write_plot_data(records: list[dict], path: Path) -> Path:
    path = _prepare(path)
    pd.DataFrame.from_records(records).to_csv(path, index=False)
    logger.info(f"Данные для графика сохранены в {path}")
    return path


def write_report_json(report: StudyReport, path: Path) -> Path:
    path = _prepare(path)
    path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    return path
