from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Исследования
    STUDY_SEED: int = 2024
    OUTPUT_DIR: Path = Path("results")
    PARALLELISM: int = -1  # как n_jobs в joblib: -1 - все ядра
    N_RUNS: int = 5

    # Сбор данных
    STREAM_RATE: float = 1000.0
    SWEEP_LENGTH_MM: float = 25.0
    SWEEPS_PER_CLASS: int = 3
    DAB_DURATION_MS: float = 4000.0
    DABS_PER_MATERIAL: int = 6

    # Пределы синхронной сетки в API
    API_MAX_CELLS: int = 4
    API_MAX_RUNS: int = 3
    API_MAX_CLASSES: int = 6
    API_MAX_SWEEP_LENGTH_MM: float = 5.0
    API_MAX_SWEEPS_PER_CLASS: int = 5

    # Uvicorn
    UVI_PORT: int = 8000
    UVI_HOST: str = "0.0.0.0"

    # Loguru
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{message}</cyan>"
    LOG_COLORIZE: bool = True

    # Конфигурация Pydantic
    model_config = SettingsConfigDict(
        env_file=".env",  # Читаем из .env
        env_file_encoding="utf-8",
        extra="ignore",  # Игнорируем лишние переменные в .env
    )


# Создаем единственный экземпляр настроек
settings = Settings()
