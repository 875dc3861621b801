from __future__ import annotations
from contextlib import asynccontextmanager

from fastapi import FastAPI

from app import __version__
from app.api.routes import api_router
from app.core.logging import get_logger, setup_logging


@asynccontextmanager
async def lifespan(app: FastAPI):
    """
    Application lifespan context manager.
    Sets up logging on startup.
    """
    setup_logging()
    logger = get_logger(__name__)
    logger.info("Optimisation service starting up...")
    yield
    logger.info("Optimisation service shutting down...")


def create_app() -> FastAPI:
    app = FastAPI(
        title="RDKW Optimisation Service",
        version=__version__,
        lifespan=lifespan,
    )
    app.include_router(api_router, prefix="/api")
    return app

app = create_app()
