"""Tests for environment and .env loading in config.hashbounds."""

from __future__ import annotations

import importlib
import os
from pathlib import Path
from unittest.mock import patch

import pytest

import config.hashbounds


@pytest.fixture
def reload_config():
    """Reload config.hashbounds inside a patched environment, restoring both afterwards."""
    with patch.dict(os.environ):
        os.environ.pop("RESAMPLE_CAP_FACTOR", None)
        os.environ.pop("TABLE_WORKERS", None)
        yield lambda: importlib.reload(config.hashbounds)
    importlib.reload(config.hashbounds)


class TestConfigLoading:
    """Tests for the order of .env loading and environment reads."""

    def test_defaults(self, reload_config, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.chdir(tmp_path)
        module = reload_config()
        assert module.RESAMPLE_CAP_FACTOR == 100
        assert module.TABLE_WORKERS == 4

    def test_dotenv_values_applied(self, reload_config, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        """A .env in the working directory is read before the settings are."""
        (tmp_path / ".env").write_text("RESAMPLE_CAP_FACTOR=7\nTABLE_WORKERS=2\n", encoding="utf-8")
        monkeypatch.chdir(tmp_path)
        module = reload_config()
        assert module.RESAMPLE_CAP_FACTOR == 7
        assert module.TABLE_WORKERS == 2

    def test_shell_wins_over_dotenv(self, reload_config, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        (tmp_path / ".env").write_text("RESAMPLE_CAP_FACTOR=7\n", encoding="utf-8")
        monkeypatch.chdir(tmp_path)
        os.environ["RESAMPLE_CAP_FACTOR"] = "9"
        assert reload_config().RESAMPLE_CAP_FACTOR == 9
