import os
import logging
from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import BaseModel, Field

ROOT_DIR = Path(__file__).parent.parent
load_dotenv(ROOT_DIR / '.env')

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class Settings(BaseModel):
    """Engine defaults. CLI flags and explicit arguments override these."""
    max_iterations: int = Field(default=10_000, gt=0)
    max_term_len: int = Field(default=64, gt=0)
    path_budget: int = Field(default=100_000, gt=0)
    log_level: str = "INFO"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings(
        max_iterations=int(os.environ.get("PSM_MAX_ITERATIONS", 10_000)),
        max_term_len=int(os.environ.get("PSM_MAX_TERM_LEN", 64)),
        path_budget=int(os.environ.get("PSM_PATH_BUDGET", 100_000)),
        log_level=os.environ.get("PSM_LOG_LEVEL", "INFO"),
    )


def configure_logging(level: str | None = None) -> None:
    logging.basicConfig(
        level=(level or get_settings().log_level).upper(),
        format=LOG_FORMAT,
    )
