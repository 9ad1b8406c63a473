import time

import numpy as np
from loguru import logger

from app.classifiers.base import TrainedModel, training_arrays
from app.core.exceptions import TrainingDivergedError
from app.models.dataset import LabeledDataset
from app.schemas.classifiers import MlpConfig, ModelFamily

LAYER_NORM_EPSILON = 1e-5


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


class Adam:
    """
    Оптимизатор Adam с поправкой смещения моментов.

    При нулевом градиенте параметры не меняются, при постоянном градиенте g
    величина шага равна learning_rate * |g| / (|g| + eps).
    """

    def __init__(self, params: dict[str, np.ndarray], learning_rate: float, beta1: float, beta2: float, epsilon: float):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.step_count = 0
        self.first = {name: np.zeros_like(value) for name, value in params.items()}
        self.second = {name: np.zeros_like(value) for name, value in params.items()}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.step_count += 1
        correction1 = 1.0 - self.beta1**self.step_count
        correction2 = 1.0 - self.beta2**self.step_count

        for name, grad in grads.items():
            self.first[name] = self.beta1 * self.first[name] + (1.0 - self.beta1) * grad
            self.second[name] = self.beta2 * self.second[name] + (1.0 - self.beta2) * grad**2
            m_hat = self.first[name] / correction1
            v_hat = self.second[name] / correction2
            params[name] -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.epsilon)


class Mlp(TrainedModel):
    """
    Многослойный перцептрон.

    Параметры хранятся в словаре: gamma, beta (LayerNorm входа),
    W0, b0, ..., W{n}, b{n} (последний слой - логиты по числу классов).
    """

    family = ModelFamily.MLP

    def __init__(self, config: MlpConfig, class_set: tuple[str, ...], n_features: int):
        super().__init__(config, class_set, n_features)
        self.params: dict[str, np.ndarray] = {}
        self.val_loss_history: list[float] = []
        self.best_epoch = 0

    @property
    def n_layers(self) -> int:
        return len(self.config.hidden_layers) + 1

    def initialize(self, rng: np.random.Generator) -> None:
        """He-инициализация скрытых слоев, Glorot - выходного"""

        widths = [self.n_features, *self.config.hidden_layers, self.n_classes]
        params = {}
        if self.config.input_normalization:
            params["gamma"] = np.ones(self.n_features)
            params["beta"] = np.zeros(self.n_features)

        for layer, (fan_in, fan_out) in enumerate(zip(widths, widths[1:])):
            last = layer == len(widths) - 2
            scale = np.sqrt(2.0 / (fan_in + fan_out)) if last else np.sqrt(2.0 / fan_in)
            params[f"W{layer}"] = rng.normal(0.0, scale, (fan_in, fan_out))
            params[f"b{layer}"] = np.zeros(fan_out)

        self.params = params

    def _forward(self, features: np.ndarray, rng: np.random.Generator | None = None):
        """Прямой проход; rng задан - dropout включен. Возвращает логиты и кэш для обратного прохода"""

        cache = {}
        hidden = features
        if self.config.input_normalization:
            mean = features.mean(axis=1, keepdims=True)
            inv_std = 1.0 / np.sqrt(features.var(axis=1, keepdims=True) + LAYER_NORM_EPSILON)
            normalized = (features - mean) * inv_std
            cache["normalized"], cache["inv_std"] = normalized, inv_std
            hidden = self.params["gamma"] * normalized + self.params["beta"]

        for layer in range(self.n_layers):
            cache[f"input{layer}"] = hidden
            pre = hidden @ self.params[f"W{layer}"] + self.params[f"b{layer}"]
            if layer == self.n_layers - 1:
                return pre, cache

            hidden = np.maximum(pre, 0.0)
            cache[f"relu{layer}"] = pre > 0.0
            if rng is not None and self.config.dropout_rate > 0:
                keep = (rng.random(hidden.shape) >= self.config.dropout_rate) / (1.0 - self.config.dropout_rate)
                cache[f"dropout{layer}"] = keep
                hidden = hidden * keep

    def _backward(self, probabilities: np.ndarray, labels: np.ndarray, cache: dict) -> dict[str, np.ndarray]:
        grads = {}
        delta = probabilities.copy()
        delta[np.arange(labels.size), labels] -= 1.0
        delta /= labels.size

        for layer in reversed(range(self.n_layers)):
            grads[f"W{layer}"] = cache[f"input{layer}"].T @ delta
            grads[f"b{layer}"] = delta.sum(axis=0)
            delta = delta @ self.params[f"W{layer}"].T

            if layer > 0:
                if f"dropout{layer - 1}" in cache:
                    delta = delta * cache[f"dropout{layer - 1}"]
                delta = delta * cache[f"relu{layer - 1}"]

        if self.config.input_normalization:
            normalized = cache["normalized"]
            grads["gamma"] = np.sum(delta * normalized, axis=0)
            grads["beta"] = delta.sum(axis=0)

        return grads

    def loss_and_gradients(self, features: np.ndarray, labels: np.ndarray, rng: np.random.Generator | None = None):
        """Средняя перекрестная энтропия и градиенты по всем параметрам"""

        logits, cache = self._forward(features, rng)
        probabilities = softmax(logits)
        loss = float(-np.mean(np.log(np.clip(probabilities[np.arange(labels.size), labels], 1e-300, None))))
        return loss, self._backward(probabilities, labels, cache)

    def loss(self, features: np.ndarray, labels: np.ndarray) -> float:
        probabilities = self.predict_proba(features)
        return float(-np.mean(np.log(np.clip(probabilities[np.arange(labels.size), labels], 1e-300, None))))

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        logits, _ = self._forward(np.asarray(features, dtype=float))
        return softmax(logits)

    def decision_function(self, features: np.ndarray) -> np.ndarray:
        return self.predict_proba(features)

    def get_arrays(self) -> dict[str, np.ndarray]:
        return dict(self.params)

    def set_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        self.params = {name: np.array(value, dtype=float) for name, value in arrays.items()}


def train_mlp(dataset: LabeledDataset, config: MlpConfig | None = None) -> Mlp:
    """
    Обучает перцептрон Adam-ом на перекрестной энтропии.

    Ранняя остановка по потерям на валидационной части (на обучающей, если
    валидационная пуста): после early_stopping_patience эпох без улучшения
    больше чем на early_stopping_min_delta обучение прекращается
    и восстанавливаются лучшие веса.

    Args:
        dataset: нормированный датасет
        config: гиперпараметры

    Raises:
        InvalidArgumentError: в обучающей части меньше двух классов
        TrainingDivergedError: потери стали NaN или бесконечными

    Returns:
        Mlp: обученная модель
    """

    config = config or MlpConfig()
    features, labels = training_arrays(dataset)
    val_features, val_labels = dataset.subset("val")
    if val_labels.size == 0:
        val_features, val_labels = features, labels

    init_rng, shuffle_rng, dropout_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(3))
    model = Mlp(config, dataset.class_set, dataset.n_features)
    model.initialize(init_rng)
    optimizer = Adam(model.params, config.learning_rate, config.beta1, config.beta2, config.epsilon)

    best_loss = np.inf
    best_params = {name: value.copy() for name, value in model.params.items()}
    waited = 0

    started = time.perf_counter()
    for epoch in range(1, config.max_epochs + 1):
        order = shuffle_rng.permutation(labels.size)
        batch_losses = []
        for start in range(0, labels.size, config.batch_size):
            batch = order[start : start + config.batch_size]
            loss, grads = model.loss_and_gradients(features[batch], labels[batch], dropout_rng)
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch)
            optimizer.step(model.params, grads)
            batch_losses.append(loss * batch.size)

        model.loss_history.append(float(np.sum(batch_losses) / labels.size))
        val_loss = model.loss(val_features, val_labels)
        if not np.isfinite(val_loss):
            raise TrainingDivergedError(epoch)
        model.val_loss_history.append(val_loss)

        improved = val_loss < best_loss - config.early_stopping_min_delta
        if val_loss < best_loss:
            best_loss = val_loss
            best_params = {name: value.copy() for name, value in model.params.items()}
            model.best_epoch = epoch
        if improved:
            waited = 0
        else:
            waited += 1
            if waited >= config.early_stopping_patience:
                logger.debug(f"MLP: ранняя остановка на эпохе {epoch}, лучшая эпоха {model.best_epoch}")
                break

    model.params = best_params
    model.train_time = time.perf_counter() - started
    logger.debug(f"MLP: валидационные потери {best_loss:.4f}, {model.train_time:.2f} с")
    return model
