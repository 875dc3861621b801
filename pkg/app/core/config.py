from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field

ROOT_DIR = Path(__file__).resolve().parent.parent.parent
ENV_FILE = ROOT_DIR / ".env"

class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=str(ENV_FILE),
        env_file_encoding="utf-8",
        extra="ignore",
    )

    LOGGING_LEVEL: str = Field(default="INFO")
    RESULTS_DIR: Path = Field(default=ROOT_DIR / "storage" / "results")
    # None -> one worker per CPU
    MAX_WORKERS: Optional[int] = Field(default=None, ge=1)
    API_MAX_REPLICATIONS: int = Field(default=20, ge=1)
    API_MAX_BUDGET: int = Field(default=20000, ge=2)

@lru_cache()
def get_settings() -> Settings:
    return Settings()
