from fastapi import APIRouter

from app.api.routes import experiments, health, perturbations, runs

api_router = APIRouter()
api_router.include_router(health.router)
api_router.include_router(perturbations.router)
api_router.include_router(runs.router)
api_router.include_router(experiments.router)
