import json
from pathlib import Path

import numpy as np
from loguru import logger
from pydantic import TypeAdapter

from app.classifiers.base import TrainedModel
from app.classifiers.training import MODEL_CLASSES
from app.core.exceptions import InvalidArgumentError
from app.schemas.classifiers import ModelConfig, ModelFamily

MODEL_FORMAT_VERSION = 1

_config_adapter = TypeAdapter(ModelConfig)


def save_model(model: TrainedModel, path: Path) -> Path:
    """
    Сохраняет модель в .npz: массивы параметров и JSON-метаданные
    (версия формата, семейство, гиперпараметры, классы).
    """

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    metadata = {
        "version": MODEL_FORMAT_VERSION,
        "family": model.family.value,
        "config": model.config.model_dump(mode="json"),
        "class_set": list(model.class_set),
        "n_features": model.n_features,
        "train_time": model.train_time,
        "loss_history": list(model.loss_history),
    }
    arrays = {f"param_{name}": value for name, value in model.get_arrays().items()}

    with path.open("wb") as handle:
        np.savez(handle, metadata=np.array(json.dumps(metadata)), **arrays)

    logger.info(f"Модель {model.family.value} сохранена в {path}")
    return path


def load_model(path: Path) -> TrainedModel:
    """
    Загружает модель, сохраненную save_model. Предсказания совпадают
    с исходной моделью.

    Raises:
        InvalidArgumentError: неподдерживаемая версия формата
    """

    with np.load(Path(path), allow_pickle=False) as archive:
        metadata = json.loads(str(archive["metadata"]))
        arrays = {name.removeprefix("param_"): archive[name] for name in archive.files if name.startswith("param_")}

    if metadata.get("version") != MODEL_FORMAT_VERSION:
        raise InvalidArgumentError(f"Неподдерживаемая версия файла модели: {metadata.get('version')}")

    config = _config_adapter.validate_python(metadata["config"])
    model = MODEL_CLASSES[ModelFamily(metadata["family"])](config, tuple(metadata["class_set"]), metadata["n_features"])
    model.set_arrays(arrays)
    model.train_time = float(metadata["train_time"])
    model.loss_history = list(metadata["loss_history"])
    return model
