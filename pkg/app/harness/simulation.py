from functools import lru_cache

from loguru import logger

from app.core.exceptions import InvalidArgumentError
from app.core.seeds import derive_seed
from app.models.profile import TextureProfile
from app.models.recording import DabRecording, SweepRecording
from app.schemas.harness import GridSpec
from app.schemas.sensor import StageConfig
from app.schemas.surface import SurfaceSpec
from app.sensor.dab import simulate_dab
from app.sensor.sweep import simulate_sweep
from app.surface.catalog import list_specimen_catalog
from app.surface.generator import build_roughness_profile

# Шаг профиля образца, мкм; мельче period / 20 для всех классов каталога
PROFILE_RESOLUTION = 1.0

# Профиль не короче стольких периодов макрозерна
MIN_PERIODS = 10


def speed_key(speed: float) -> str:
    return f"{speed:g}"


@lru_cache(maxsize=32)
def specimen_profile(spec: SurfaceSpec, length_total: float) -> TextureProfile:
    """Профиль образца; один на класс, общий для всех проходов"""

    return build_roughness_profile(spec, length_total, PROFILE_RESOLUTION)


def roughness_specs(grid: GridSpec) -> list[SurfaceSpec]:
    specs = list_specimen_catalog().roughness
    if grid.classes is None:
        return list(specs)

    selected = [spec for spec in specs if spec.class_id in grid.classes]
    if not selected:
        raise InvalidArgumentError(f"Ни один из классов {grid.classes} не относится к шероховатости")
    return selected


def sweep_recordings(grid: GridSpec, speed: float, run: int) -> list[SweepRecording]:
    """
    Проходы по всем образцам шероховатости для одного прогона.

    i-й проход класса идет по своему участку профиля (start_offset = i * L),
    зерно шума датчиков зависит только от (скорость, прогон, класс, i).
    """

    sweep_um = grid.sweep_length * 1000.0
    coverage = grid.sweeps_per_class * sweep_um + 2 * PROFILE_RESOLUTION

    recordings = []
    for spec in roughness_specs(grid):
        profile = specimen_profile(spec, max(coverage, MIN_PERIODS * spec.spatial_period + PROFILE_RESOLUTION))
        for i in range(grid.sweeps_per_class):
            stage = StageConfig(speed=speed, sweep_length=grid.sweep_length, start_offset=i * sweep_um)
            seed = derive_seed(grid.seed, "sweep", speed_key(speed), run, spec.class_id, i)
            recordings.append(simulate_sweep(profile, stage, grid.sensor, seed))

    logger.debug(f"Прогон {run}, V_s={speed:g}: {len(recordings)} проходов")
    return recordings


def dab_recordings(grid: GridSpec, run: int) -> list[DabRecording]:
    """Касания каждого материала каталога для одного прогона"""

    materials = list_specimen_catalog().hardness
    if grid.classes is not None:
        materials = [material for material in materials if material.class_id in grid.classes]

    recordings = []
    for material in materials:
        for i in range(grid.dabs_per_material):
            seed = derive_seed(grid.seed, "dab", run, material.class_id, i)
            recordings.append(simulate_dab(material, grid.dab_duration, grid.sensor, seed))

    logger.debug(f"Прогон {run}: {len(recordings)} касаний")
    return recordings
