import os
import sys
from pathlib import Path

import pytest
from pydantic import ValidationError

sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from twistrack.config import Settings, get_settings


@pytest.fixture(autouse=True)
def _reset_settings(monkeypatch) -> None:
    for name in list(os.environ):
        if name.startswith("TWISTRACK_"):
            monkeypatch.delenv(name)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def test_defaults() -> None:
    settings = Settings()

    assert settings.workers == 1
    assert settings.log_level == "INFO"
    assert settings.cache_dir.name == "twistrack"


def test_environment_prefix(monkeypatch) -> None:
    monkeypatch.setenv("TWISTRACK_ORBIT_CAP", "123")
    monkeypatch.setenv("TWISTRACK_LOG_LEVEL", " debug ")

    settings = get_settings()

    assert settings.orbit_cap == 123
    assert settings.log_level == "DEBUG"
    assert get_settings() is settings


def test_file_values_and_overrides(tmp_path) -> None:
    path = tmp_path / "settings.env"
    path.write_text("TWISTRACK_PAIR_BUDGET=77\nseed = 5\ncache_dir = ~/twistrack-cache\nunknown = 1\n")

    settings = Settings.from_file(path, seed=9, workers=None)

    assert settings.pair_budget == 77
    assert settings.seed == 9
    assert settings.workers == 1
    assert settings.cache_dir == Path("~/twistrack-cache").expanduser()


def test_budgets_must_be_positive() -> None:
    with pytest.raises(ValidationError):
        Settings(subgroup_cap=0)
    with pytest.raises(ValidationError):
        Settings(workers=1000)
