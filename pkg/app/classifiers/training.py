from app.classifiers.base import TrainedModel
from app.classifiers.forest import RandomForest, train_rf
from app.classifiers.mlp import Mlp, train_mlp
from app.classifiers.svm import LinearSvm, train_svm
from app.core.exceptions import InvalidArgumentError
from app.models.dataset import LabeledDataset
from app.schemas.classifiers import MlpConfig, ModelFamily, RfConfig, SvmConfig

TRAINERS = {
    ModelFamily.SVM: train_svm,
    ModelFamily.RF: train_rf,
    ModelFamily.MLP: train_mlp,
}

MODEL_CLASSES: dict[ModelFamily, type[TrainedModel]] = {
    ModelFamily.SVM: LinearSvm,
    ModelFamily.RF: RandomForest,
    ModelFamily.MLP: Mlp,
}


def train_model(dataset: LabeledDataset, config: SvmConfig | RfConfig | MlpConfig) -> TrainedModel:
    """Обучает модель семейства, указанного в конфигурации"""

    try:
        trainer = TRAINERS[ModelFamily(config.family)]
    except (AttributeError, ValueError) as e:
        raise InvalidArgumentError(f"Неизвестная конфигурация модели: {config!r}") from e

    return trainer(dataset, config)
