import zlib

import numpy as np


def _key_to_int(key) -> int:
    """Стабильно переводит ключ (строку или число) в 32-битное целое"""

    if isinstance(key, (int, np.integer)) and key >= 0:
        return int(key)

    return zlib.crc32(str(key).encode("utf-8"))


def derive_seed(study_seed: int, *keys) -> int:
    """
    Выводит зерно для отдельной стадии исследования из общего зерна.

    Одинаковые ключи дают одинаковое зерно в любом исследовании, поэтому
    отдельную ячейку сетки можно перезапустить изолированно.

    Args:
        study_seed: общее зерно исследования
        *keys: путь стадии, например ("sweep", 50, 0, "H1", 2)

    Returns:
        int: неотрицательное 63-битное зерно
    """

    sequence = np.random.SeedSequence(entropy=int(study_seed), spawn_key=tuple(_key_to_int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
