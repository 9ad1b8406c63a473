from functools import lru_cache

from app.core.exceptions import InvalidArgumentError
from app.core.seeds import derive_seed
from app.schemas.surface import FAMILY_WAVEFORMS, ClassFamily, HardnessSpec, SpecimenCatalog, SurfaceSpec

# Лестница Rz по подклассам, мкм. Крайние значения - диапазон эталонного образца
RZ_LADDER = (2.5, 5.0, 10.0, 20.0, 35.0, 50.0)

# Расстояние между макрозернами в единицах Rz
PERIOD_PER_RZ = 40.0

DEFAULT_NOISE_AMPLITUDE = 0.05

CATALOG_SEED = 157

# Материалы для касаний, от самого мягкого к самому твердому
HARDNESS_MATERIALS = (
    "soft foam",
    "cotton cloth",
    "mouse pad",
    "double-sided foam tape",
    "cellophane tape",
    "painted aluminum sheet",
)

# Постоянная нарастания самого мягкого материала, мс
SOFTEST_TIME_CONSTANT = 120.0


def _roughness_spec(family: ClassFamily, subclass_index: int) -> SurfaceSpec:
    rz = RZ_LADDER[subclass_index - 1]
    class_id = f"{family.value}{subclass_index}"
    return SurfaceSpec(
        class_family=family,
        subclass_index=subclass_index,
        rz_target=rz,
        spatial_period=PERIOD_PER_RZ * rz,
        waveform=FAMILY_WAVEFORMS[family],
        noise_amplitude=DEFAULT_NOISE_AMPLITUDE,
        seed=derive_seed(CATALOG_SEED, "specimen", class_id),
    )


def _hardness_spec(rank: int) -> HardnessSpec:
    tau = SOFTEST_TIME_CONSTANT / 2 ** (rank - 1)
    return HardnessSpec(
        name=HARDNESS_MATERIALS[rank - 1],
        hardness_rank=rank,
        rise_time_constant=tau,
        fall_time_constant=tau,
        # Твердый материал при той же глубине касания дает большее давление
        steady_state_pressure=60.0 + 8.0 * rank,
    )


@lru_cache(maxsize=1)
def list_specimen_catalog() -> SpecimenCatalog:
    """
    Каталог образцов: 18 классов шероховатости (3 семейства x 6 подклассов)
    и 6 материалов для классификации по твердости.

    Returns:
        SpecimenCatalog: неизменяемый каталог
    """

    roughness = tuple(_roughness_spec(family, index) for family in ClassFamily for index in range(1, 7))
    hardness = tuple(_hardness_spec(rank) for rank in range(1, 7))

    return SpecimenCatalog(roughness=roughness, hardness=hardness)


def find_specimen(class_id: str) -> SurfaceSpec | HardnessSpec:
    """
    Ищет образец по стабильному идентификатору ("H1"..."T6", "hard1"..."hard6")

    Raises:
        InvalidArgumentError: неизвестный идентификатор
    """

    catalog = list_specimen_catalog()
    for spec in (*catalog.roughness, *catalog.hardness):
        if spec.class_id == class_id:
            return spec

    raise InvalidArgumentError(f"Неизвестный класс образца: {class_id}")
