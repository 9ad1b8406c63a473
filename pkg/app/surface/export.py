from pathlib import Path

import pandas as pd
from loguru import logger

from app.models.profile import TextureProfile
from app.surface.catalog import list_specimen_catalog


def write_profile_csv(profile: TextureProfile, path: Path) -> Path:
    """Сохраняет профиль в CSV с колонками position_um, height_um"""

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    frame = pd.DataFrame({"position_um": profile.positions, "height_um": profile.heights})
    frame.to_csv(path, index=False)

    logger.info(f"Профиль {profile.label} записан в {path}")
    return path


def write_catalog_manifest(path: Path) -> Path:
    """
    Записывает каталог образцов в текстовый манифест из двух секций:
    [roughness] и [hardness], по одной записи на класс.
    """

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    catalog = list_specimen_catalog()

    roughness = pd.DataFrame(
        [
            {
                "id": spec.class_id,
                "family": spec.class_family.value,
                "subclass": spec.subclass_index,
                "rz_um": spec.rz_target,
                "period_um": spec.spatial_period,
            }
            for spec in catalog.roughness
        ]
    )
    hardness = pd.DataFrame(
        [
            {
                "id": spec.class_id,
                "material": spec.name,
                "rank": spec.hardness_rank,
                "tau_ms": spec.rise_time_constant,
            }
            for spec in catalog.hardness
        ]
    )

    with path.open("w", encoding="utf-8", newline="") as handle:
        handle.write("[roughness]\n")
        roughness.to_csv(handle, index=False)
        handle.write("\n[hardness]\n")
        hardness.to_csv(handle, index=False)

    logger.info(f"Манифест каталога записан в {path}")
    return path
