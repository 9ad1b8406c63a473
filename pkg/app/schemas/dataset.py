from enum import Enum


class ChannelSelector(str, Enum):
    """Какие каналы идут на вход классификатора"""

    P = "P"
    A = "A"
    PA = "PA"
    L = "L"

    @property
    def channels(self) -> tuple[str, ...]:
        return SELECTOR_CHANNELS[self]

    @property
    def n_channels(self) -> int:
        return len(SELECTOR_CHANNELS[self])


SELECTOR_CHANNELS = {
    ChannelSelector.P: ("P",),
    ChannelSelector.A: ("Ax", "Ay", "Az"),
    ChannelSelector.PA: ("P", "Ax", "Ay", "Az"),
    ChannelSelector.L: ("L",),
}


class Split(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


SPLIT_FRACTIONS = {Split.TRAIN: 0.7, Split.VAL: 0.2, Split.TEST: 0.1}

# Порядок признаков в плоском векторе окна: сначала все каналы x_j, затем x_{j+1}
FEATURE_LAYOUT = "window-major"
