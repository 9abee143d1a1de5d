"""Tests for process settings."""

import pytest
from pydantic import ValidationError

from config.settings import Settings
from src.handlers import build_model
from src.models.experiment import ExperimentConfig


@pytest.mark.unit
class TestSettings:
    """Test defaults, environment overrides and their use."""

    def test_defaults(self):
        """Test the library defaults."""
        settings = Settings(_env_file=None)
        assert settings.log_level == "INFO"
        assert settings.log_file is None
        assert settings.k_roundup == pytest.approx(1.05)
        assert settings.max_workers == 4

    def test_environment_override(self, monkeypatch):
        """Test SHADOWLAB_* variables override the defaults."""
        monkeypatch.setenv("SHADOWLAB_MAX_WORKERS", "2")
        monkeypatch.setenv("SHADOWLAB_GAP_TOL", "1e-6")
        settings = Settings(_env_file=None)
        assert settings.max_workers == 2
        assert settings.gap_tol == pytest.approx(1e-6)

    def test_invalid_value(self, monkeypatch):
        """Test out-of-range values are rejected."""
        monkeypatch.setenv("SHADOWLAB_K_ROUNDUP", "0.5")
        with pytest.raises(ValidationError):
            Settings(_env_file=None)

    def test_log_file_directory_created(self, tmp_path):
        """Test the log file's parent directory is created."""
        Settings(_env_file=None, log_file=tmp_path / "logs" / "lab.log")
        assert (tmp_path / "logs").is_dir()

    def test_grid_tol_reaches_semigroup(self):
        """Test the time-grid tolerance is applied to built models."""
        settings = Settings(_env_file=None, grid_tol=1e-6)
        bundle = build_model(ExperimentConfig().model, settings)
        assert bundle.semigroup.grid_tol == pytest.approx(1e-6)
