from dataclasses import dataclass, field

import numpy as np

from app.schemas.sensor import SensorSuiteConfig, StageConfig

WHISKER_CHANNELS = ("P", "Ax", "Ay", "Az")
LASER_CHANNEL = "L"


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Recording:
    """
    Многомерный временной ряд X = {x_1, ..., x_M}: каждый канал в своей
    собственной частоте дискретизации.

    Attributes:
        channels: имя канала -> отсчеты
        rates: имя канала -> частота, Гц
        label: идентификатор класса
        suite: конфигурация датчиков
        seed: зерно симуляции
        duration: длительность записи, с
    """

    channels: dict[str, np.ndarray]
    rates: dict[str, float]
    label: str
    suite: SensorSuiteConfig
    seed: int
    duration: float

    def __post_init__(self):
        object.__setattr__(self, "channels", {name: _frozen(values) for name, values in self.channels.items()})

    @property
    def kind(self) -> str:
        raise NotImplementedError

    @property
    def recording_id(self) -> str:
        return f"{self.label}-{self.kind}-{self.seed}"


@dataclass(frozen=True, eq=False)
class SweepRecording(Recording):
    stage: StageConfig | None = None

    @property
    def kind(self) -> str:
        return "sweep"


@dataclass(frozen=True, eq=False)
class DabRecording(Recording):
    t_dab: float = 0.0  # мс
    rise_time_measured: float = 0.0  # мс
    fall_time_measured: float = 0.0  # мс

    @property
    def kind(self) -> str:
        return "dab"


@dataclass(frozen=True, eq=False)
class FusedStream:
    """
    k-мерный ряд на общей сетке потока.

    Attributes:
        values: матрица (M, k)
        channel_names: имена k каналов
        rate: частота потока, Гц
        label: идентификатор класса
        source_id: идентификатор исходной записи
        metadata: сведения о записи для заголовка файлов
    """

    values: np.ndarray
    channel_names: tuple[str, ...]
    rate: float
    label: str
    source_id: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "channel_names", tuple(self.channel_names))

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def select(self, names) -> "FusedStream":
        """Оставляет только указанные каналы в заданном порядке"""

        indices = [self.channel_names.index(name) for name in names]
        return FusedStream(
            values=self.values[:, indices],
            channel_names=tuple(names),
            rate=self.rate,
            label=self.label,
            source_id=self.source_id,
            metadata=self.metadata,
        )
