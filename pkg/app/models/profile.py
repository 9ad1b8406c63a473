from dataclasses import dataclass, field

import numpy as np

from app.schemas.surface import SurfaceSpec


@dataclass(frozen=True, eq=False)
class TextureProfile:
    """
    Дискретный профиль высот Z(x) синтетического образца.

    Attributes:
        heights: высоты в мкм относительно средней линии
        resolution: шаг по x в мкм
        length_total: длина профиля в мкм
        spec: параметры образца
        ra_actual: измеренное Ra, мкм
        rz_actual: измеренное Rz, мкм
    """

    heights: np.ndarray
    resolution: float
    length_total: float
    spec: SurfaceSpec
    ra_actual: float = 0.0
    rz_actual: float = 0.0
    positions: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        heights = np.array(self.heights, dtype=float)
        heights.setflags(write=False)
        object.__setattr__(self, "heights", heights)
        object.__setattr__(self, "positions", np.arange(heights.size) * self.resolution)

    @property
    def label(self) -> str:
        return self.spec.class_id

    def __len__(self) -> int:
        return int(self.heights.size)
