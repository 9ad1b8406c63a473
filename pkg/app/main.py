from contextlib import asynccontextmanager

import uvicorn
from fastapi import FastAPI, Request, status
from fastapi.responses import JSONResponse
from loguru import logger

from app.api import sensor, specimens, studies
from app.core.config import settings
from app.core.exceptions import WhiskerBenchError
from app.core.logger import setup_logging


@asynccontextmanager
async def lifespan(app: FastAPI):
    # Настраиваем логи при старте
    setup_logging()
    logger.info("🚀 Logger сконфигурирован!")
    logger.info(f"Зерно исследований по умолчанию: {settings.STUDY_SEED}, каталог результатов: {settings.OUTPUT_DIR}")

    yield

    logger.info("🛑 Сервис остановлен")


app = FastAPI(lifespan=lifespan, title="whiskerbench")


@app.exception_handler(WhiskerBenchError)
async def domain_error_handler(request: Request, exc: WhiskerBenchError):
    logger.warning(f"{request.method} {request.url.path}: {exc}")
    return JSONResponse(status_code=status.HTTP_400_BAD_REQUEST, content={"detail": str(exc)})


app.include_router(sensor.router, prefix="/sensor", tags=["Датчики"])
app.include_router(specimens.router, prefix="/specimens", tags=["Образцы"])
app.include_router(studies.router, prefix="/studies", tags=["Исследования"])

if __name__ == "__main__":
    logger.info("Запускаю сервер")
    uvicorn.run(
        "app.main:app",
        host=settings.UVI_HOST,
        port=settings.UVI_PORT,
        reload=True,
    )
