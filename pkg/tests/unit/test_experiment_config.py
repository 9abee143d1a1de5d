"""
Tests for experiment config validation.
"""

import pytest
from pydantic import ValidationError

from src.models.experiment import (
    ExperimentConfig,
    GHShiftSpec,
    HeatSpec,
    MatrixSpec,
    RotationSpec,
    TransportSpec,
)
from src.models.orbit import JumpKind


@pytest.mark.unit
class TestExperimentConfig:
    """Test defaults, discriminated models and strictness."""

    def test_defaults(self):
        """Test an empty document gives the saddle with decaying jumps."""
        config = ExperimentConfig.model_validate({})
        assert config.schema_version == "1.0"
        assert isinstance(config.model, MatrixSpec)
        assert config.model.generator == [[-1.0, 0.0], [0.0, 2.0]]
        assert config.jump_kind == JumpKind.DECAYING
        assert config.seed == 0
        assert config.x0 is None

    @pytest.mark.parametrize(
        "model, spec_type",
        [
            ({"kind": "heat", "n": 8}, HeatSpec),
            ({"kind": "transport", "theta": -1.0}, TransportSpec),
            ({"kind": "rotation"}, RotationSpec),
            ({"kind": "gh_shift", "m": 16, "convention": "exp_neg_abs"}, GHShiftSpec),
        ],
    )
    def test_model_kinds(self, model, spec_type):
        """Test the kind field selects the model spec."""
        config = ExperimentConfig.model_validate({"model": model})
        assert isinstance(config.model, spec_type)

    def test_unknown_top_level_key(self):
        """Test unknown keys are rejected."""
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"epsilon": 0.1, "epsilonn": 0.2})

    def test_unknown_nested_key(self):
        """Test unknown keys inside a model spec are rejected."""
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"model": {"kind": "heat", "size": 8}})

    def test_unknown_model_kind(self):
        """Test an unrecognised model kind is rejected."""
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"model": {"kind": "wave"}})

    def test_schema_version(self):
        """Test only the current schema version is accepted."""
        with pytest.raises(ValidationError, match="schema_version"):
            ExperimentConfig.model_validate({"schema_version": "2.0"})

    @pytest.mark.parametrize(
        "overrides",
        [
            {"epsilon": 0.0},
            {"orbit_length": 0},
            {"seed": -1},
            {"seed": 2**64},
            {"jump_rho": 1.0},
            {"jump_scale": 1.5},
            {"margin": 1.0},
        ],
    )
    def test_out_of_range(self, overrides):
        """Test range constraints on numeric fields."""
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(overrides)

    @pytest.mark.parametrize(
        "model",
        [
            {"kind": "gh_shift", "m": 3},
            {"kind": "rotation", "theta": 0.0},
            {"kind": "transport", "theta": 0.0},
        ],
    )
    def test_unbuildable_models(self, model):
        """Test parameters the model constructors refuse fail validation instead."""
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"model": model})

    def test_smallest_gh_window(self):
        """Test m = 4 is the smallest accepted window."""
        config = ExperimentConfig.model_validate({"model": {"kind": "gh_shift", "m": 4}})
        assert config.model.m == 4

    def test_dump_round_trips(self):
        """Test the resolved config validates back to an equal config."""
        config = ExperimentConfig.model_validate(
            {"model": {"kind": "matrix", "generator": [[[0.0, 1.0], 0.0], [0.0, -1.0]]}, "x0": [1.0, [0.0, 1.0]]}
        )
        assert ExperimentConfig.model_validate(config.model_dump(mode="json")) == config
