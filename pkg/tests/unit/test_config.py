import json
from pathlib import Path

import pytest

from ptlab.errors import ConfigError
from ptlab.models.config import JobConfig, infer_kind, load_config_file
from ptlab.utils.validation import ConfigValidator, require_valid, validate_job_config

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


class TestJobConfig:
    """Nested sections, flat flag names and their precedence"""

    def test_nested_sections(self):
        config = JobConfig.from_dict({
            "command": "scatter",
            "potential": {"a_pot": 2.5, "b_pot": 0.5},
            "sweep": {"k": [1.0]},
        })
        assert config.potential.kind == "scarf2"
        assert config.potential.a_pot == 2.5
        assert config.sweep.k == [1.0]
        assert config.output.format == "json"

    def test_flat_names_win_over_sections(self):
        config = JobConfig.from_dict({
            "command": "scatter",
            "potential": {"a_pot": 1.0},
            "A": 2.0,
            "k": 0.5,
        })
        assert config.potential.a_pot == 2.0
        assert config.sweep.k == [0.5]

    @pytest.mark.parametrize("keys, kind", [
        (["depth", "coupling"], "scarf2-strengths"),
        (["a_pot"], "scarf2"),
        (["custom", "depth"], "custom"),
        ([], "scarf2"),
    ])
    def test_infer_kind(self, keys, kind):
        assert infer_kind(keys) == kind

    def test_strength_flags_imply_strength_form(self):
        config = JobConfig.from_dict({"command": "spectrum", "depth": 1.0, "coupling": 2.0})
        assert config.potential.kind == "scarf2-strengths"

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as excinfo:
            JobConfig.from_dict({"command": "scatter", "wavelength": 3})
        assert excinfo.value.field == "wavelength"

    def test_unknown_key_in_section(self):
        with pytest.raises(ConfigError) as excinfo:
            JobConfig.from_dict({"command": "scatter", "grid": {"width": 3}})
        assert excinfo.value.field == "grid.width"

    def test_missing_command(self):
        with pytest.raises(ConfigError):
            JobConfig.from_dict({"A": 1.0})

    def test_merge_overrides(self):
        base = JobConfig.from_dict({"command": "scatter", "potential": {"kind": "scarf2", "a_pot": 1.0}, "k": [1.0]})
        merged = base.merged_with({"A": 2.5, "B": None, "k": [0.5, 2.0], "depth": None})
        assert merged.potential.a_pot == 2.5
        assert merged.potential.b_pot == 0.0
        assert merged.sweep.k == [0.5, 2.0]

    def test_merge_switches_to_strength_form(self):
        base = JobConfig.from_dict({"command": "spectrum", "potential": {"kind": "scarf2"}})
        merged = base.merged_with({"depth": 1.0, "coupling": 2.0})
        assert merged.potential.kind == "scarf2-strengths"

    def test_round_trip_through_dict(self):
        config = JobConfig.from_dict({"command": "phase-diagram", "depth": 1.0, "coupling-range": "0:2:3"})
        assert JobConfig.from_dict(config.to_dict()) == config


class TestLoadConfigFile:

    def test_default_yaml(self):
        data = load_config_file(CONFIGS / "default.yaml")
        config = JobConfig.from_dict(dict(data, command="spectrum"))
        assert config.grid.eps_asym == 1e-10
        assert config.sweep.seeds == 7

    def test_example_files_are_valid(self):
        for path, command in [
            (CONFIGS / "examples" / "scatter_scarf2.json", "scatter"),
            (CONFIGS / "examples" / "broken_phase.yaml", "spectrum"),
            (CONFIGS / "examples" / "phase_scan.yaml", "phase-diagram"),
        ]:
            config = JobConfig.from_dict(dict(load_config_file(path), command=command))
            require_valid(config)

    def test_json_error_has_line(self, tmp_path):
        path = tmp_path / "job.json"
        path.write_text('{\n  "A": 1.0,\n  "B": \n}\n')
        with pytest.raises(ConfigError) as excinfo:
            load_config_file(path)
        assert excinfo.value.line == 4

    def test_yaml_error_has_line(self, tmp_path):
        path = tmp_path / "job.yaml"
        path.write_text("potential:\n  a_pot: 1.0\n   b_pot: [\n")
        with pytest.raises(ConfigError) as excinfo:
            load_config_file(path)
        assert excinfo.value.line is not None

    def test_top_level_must_be_mapping(self, tmp_path):
        path = tmp_path / "job.json"
        path.write_text(json.dumps([1, 2]))
        with pytest.raises(ConfigError):
            load_config_file(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config_file(tmp_path / "nope.yaml")


class TestValidation:

    @pytest.fixture
    def scatter_job(self):
        return JobConfig.from_dict({"command": "scatter", "A": 2.5, "B": 0.5, "k": [1.0]})

    def test_valid_job(self, scatter_job):
        assert all(r.is_valid for r in validate_job_config(scatter_job).values())
        assert require_valid(scatter_job) is scatter_job

    @pytest.mark.parametrize("value, ok", [(1.0, True), (0.0, False), (-1.0, False), (float("inf"), False), ("x", False)])
    def test_positive(self, value, ok):
        assert ConfigValidator.validate_positive(value, "alpha").is_valid is ok

    @pytest.mark.parametrize("value, ok", [(None, True), (101, True), (100, False), (1, False), (2.0, False)])
    def test_odd(self, value, ok):
        assert ConfigValidator.validate_odd(value).is_valid is ok

    def test_range(self):
        result = ConfigValidator.validate_range("0:1:3", "k-range")
        assert result.is_valid and result.normalized_value == [0.0, 0.5, 1.0]
        assert not ConfigValidator.validate_range("0:1", "k-range").is_valid

    def test_every_problem_is_listed(self):
        config = JobConfig.from_dict({"command": "scatter", "alpha": -1.0, "n-points": 100})
        with pytest.raises(ConfigError) as excinfo:
            require_valid(config)
        message = str(excinfo.value)
        assert "alpha" in message
        assert "n_points" in message
        assert "needs --k" in message

    def test_custom_needs_path(self):
        config = JobConfig.from_dict({"command": "spectrum", "kind": "custom"})
        assert not validate_job_config(config)["potential.custom"].is_valid

    def test_phase_diagram_needs_scan(self):
        config = JobConfig.from_dict({"command": "phase-diagram", "A": 0.5})
        assert not validate_job_config(config)["sweep.scan"].is_valid

    def test_csv_not_for_spectrum(self):
        config = JobConfig.from_dict({"command": "spectrum", "A": 1.0, "format": "csv"})
        assert not validate_job_config(config)["output.format"].is_valid

    def test_validate_needs_superpotential_form(self):
        config = JobConfig.from_dict({"command": "scarf2-validate", "depth": 1.0, "k": [1.0]})
        assert not validate_job_config(config)["potential.kind"].is_valid

    def test_emin_below_emax(self):
        config = JobConfig.from_dict({"command": "spectrum", "A": 1.0, "emin": 1.0, "emax": 0.0})
        assert not validate_job_config(config)["sweep.emin"].is_valid

    @pytest.mark.parametrize("value, ok", [(0, True), (3, True), (-1, False), (1.5, False), (True, False)])
    def test_index(self, value, ok):
        assert ConfigValidator.validate_index(value, "state").is_valid is ok

    def test_eigenstate_index_is_non_negative(self):
        config = JobConfig.from_dict({"command": "correlation", "A": 2.5, "eigen": True, "state": -1})
        assert not validate_job_config(config)["sweep.state"].is_valid
