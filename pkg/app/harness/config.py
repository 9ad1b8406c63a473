import tomllib
from pathlib import Path

from loguru import logger

from app.core.exceptions import InvalidArgumentError
from app.schemas.harness import GridSpec

# Разделы файла исследования; [grid] - оси и сбор данных, остальные - вложенные модели
SECTIONS = ("grid", "sensor", "svm", "rf", "mlp")


def load_study_config(path: Path) -> GridSpec:
    """
    Читает TOML-файл исследования.

    Пример:
        [grid]
        window_sizes = [50]
        speeds_mm_min = [50, 100]
        selectors = ["P", "A", "PA"]
        models = ["SVM"]
        n_runs = 3

        [svm]
        epochs = 50

    Raises:
        InvalidArgumentError: файл не читается или содержит неизвестный раздел
        pydantic.ValidationError: значения не проходят проверку GridSpec
    """

    path = Path(path)
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise InvalidArgumentError(f"Не удалось прочитать конфигурацию {path}: {e}") from e

    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise InvalidArgumentError(f"Неизвестные разделы конфигурации: {unknown}")

    fields = dict(data.get("grid", {}))
    for section in SECTIONS[1:]:
        if section in data:
            fields[section] = data[section]

    grid = GridSpec.model_validate(fields)
    logger.info(f"Конфигурация исследования загружена из {path}")
    return grid
