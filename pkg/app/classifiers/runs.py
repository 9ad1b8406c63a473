from typing import Callable

from loguru import logger

from app.classifiers.metrics import aggregate_results, evaluate
from app.classifiers.training import train_model
from app.core.exceptions import InvalidArgumentError
from app.core.seeds import derive_seed
from app.dataset.assembly import standardize
from app.models.dataset import LabeledDataset
from app.schemas.classifiers import ExperimentResult, MlpConfig, RfConfig, SvmConfig

# (номер прогона, зерно разбиения) -> датасет
DatasetBuilder = Callable[[int, int], LabeledDataset]


def run_seeds(base_seed: int, run: int) -> tuple[int, int]:
    """Зерна разбиения и инициализации модели для прогона"""

    return derive_seed(base_seed, "split", run), derive_seed(base_seed, "model", run)


def single_run(dataset: LabeledDataset, config: SvmConfig | RfConfig | MlpConfig, model_seed: int) -> ExperimentResult:
    """Обучение на train и оценка на test одного датасета"""

    if not dataset.standardized:
        dataset = standardize(dataset)
    model = train_model(dataset, config.model_copy(update={"seed": model_seed}))
    return evaluate(model, dataset, "test")


def repeated_runs(
    dataset_builder: DatasetBuilder,
    model_config: SvmConfig | RfConfig | MlpConfig,
    n_runs: int,
    base_seed: int,
) -> ExperimentResult:
    """
    Повторяет обучение n_runs раз с новыми зернами разбиения и инициализации.

    Args:
        dataset_builder: строит датасет по номеру прогона и зерну разбиения
        model_config: гиперпараметры модели (seed перезаписывается)
        n_runs: число прогонов, не меньше двух
        base_seed: общее зерно

    Raises:
        InvalidArgumentError: n_runs < 2

    Returns:
        ExperimentResult: mu и sigma^2 (дисперсия генеральной совокупности) точности
    """

    if n_runs < 2:
        raise InvalidArgumentError(f"Для оценки разброса нужно минимум 2 прогона, получено {n_runs}")

    results = []
    seeds = []
    for run in range(n_runs):
        split_seed, model_seed = run_seeds(base_seed, run)
        result = single_run(dataset_builder(run, split_seed), model_config, model_seed)
        logger.debug(f"{model_config.family}, прогон {run + 1}/{n_runs}: {result.accuracy_mean:.2f}%")
        results.append(result)
        seeds.append({"run": run, "split_seed": split_seed, "model_seed": model_seed})

    fingerprint = {**results[0].config_fingerprint, "base_seed": base_seed, "n_runs": n_runs, "runs": seeds}
    fingerprint.pop("seed", None)
    return aggregate_results(results, fingerprint)
