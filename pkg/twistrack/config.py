from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from dotenv import dotenv_values
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

ENV_PREFIX = "TWISTRACK_"


def default_cache_dir() -> Path:
    return Path.home() / ".cache" / "twistrack"


class Settings(BaseSettings):
    """Computation budgets and runtime options.

    Values come from ``TWISTRACK_*`` environment variables, optionally
    overridden by a ``key = value`` file (see :meth:`from_file`) and finally by
    CLI flags.
    """

    orbit_cap: int = Field(default=2_000_000, ge=1)
    group_cap: int = Field(default=10_000_000, ge=1)
    subgroup_cap: int = Field(default=200_000, ge=1)
    pair_budget: int = Field(default=100_000, ge=1)
    workers: int = Field(default=1, ge=1, le=256)
    cache_dir: Path = Field(default_factory=default_cache_dir)
    log_level: str = Field(default="INFO")
    factor_cap: int = Field(default=2**64, ge=2)
    seed: int = Field(default=20240611)

    model_config = SettingsConfigDict(
        env_prefix=ENV_PREFIX,
        case_sensitive=False,
        populate_by_name=True,
        extra="ignore",
    )

    @field_validator("log_level", mode="before")
    def _normalise_level(cls, value):
        if isinstance(value, str):
            return value.strip().upper()
        return value

    @field_validator("cache_dir", mode="before")
    def _expand_cache_dir(cls, value):
        if isinstance(value, str):
            return Path(value).expanduser()
        return value

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "Settings":
        """Load settings from a ``key = value`` file; ``overrides`` win.

        Keys may be written bare (``orbit_cap``) or with the environment prefix.
        """

        values: dict[str, object] = {}
        for key, value in dotenv_values(path).items():
            name = key.lower().removeprefix(ENV_PREFIX.lower())
            if name in cls.model_fields and value is not None:
                values[name] = value
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return cached application settings."""

    return Settings()
