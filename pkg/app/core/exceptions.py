class WhiskerBenchError(Exception):
    """Базовая ошибка пакета"""


class InvalidArgumentError(WhiskerBenchError, ValueError):
    """Некорректный аргумент операции"""


class UnderResolvedProfileError(InvalidArgumentError):
    """Шаг дискретизации профиля слишком крупный для его периода"""


class SteadyStateUnreachableError(InvalidArgumentError):
    """Время касания слишком мало, установившееся давление не достигается"""


class InsufficientSweepsError(InvalidArgumentError):
    """У класса меньше записей, чем нужно для обучения"""

    def __init__(self, label: str, count: int, required: int = 3):
        self.label = label
        self.count = count
        self.required = required
        super().__init__(f"insufficient sweeps: класс {label} имеет {count} записей, нужно минимум {required}")


class EmptyDatasetError(InvalidArgumentError):
    """После нарезки окон не осталось ни одного образца"""


class TrainingDivergedError(WhiskerBenchError):
    """Функция потерь стала NaN или бесконечной"""

    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"training diverged: потери стали не конечными на эпохе {epoch}")


class DatasetParseError(WhiskerBenchError):
    """Ошибка разбора файла датасета"""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"строка {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class MissingHeaderError(DatasetParseError):
    """В файле нет заголовочного блока"""

    def __init__(self):
        super().__init__("missing header", line=1)
