import os
import logging

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

load_dotenv()

PRNG_ALGORITHM = "MT19937"


class LabSettings(BaseModel):
    """Budgets and runtime knobs, read from TARDYLAB_* environment variables."""

    model_config = ConfigDict(frozen=True)

    budget_subsets: int = Field(default=2 ** 22, ge=1)
    budget_perms: int = Field(default=362880, ge=1)
    budget_sweep: int = Field(default=2 ** 20, ge=1)
    workers: int = Field(default=1, ge=1)
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls) -> "LabSettings":
        values = {}
        for field_name in ("budget_subsets", "budget_perms", "budget_sweep", "workers"):
            raw = os.getenv(f"TARDYLAB_{field_name.upper()}")
            if raw:
                values[field_name] = int(raw)
        log_level = os.getenv("TARDYLAB_LOG_LEVEL")
        if log_level:
            values["log_level"] = log_level.upper()
        return cls(**values)

    def numeric_log_level(self) -> int:
        return getattr(logging, self.log_level.upper(), logging.WARNING)


DEFAULT_SETTINGS = LabSettings.from_env()
