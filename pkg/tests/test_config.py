"""Tests for configuration loading and validation."""

import pytest

from damped_kernel import config as config_module
from damped_kernel.comparators.methods import MethodId
from damped_kernel.config import (
    ConfigError,
    ConfigFile,
    get_config,
    load_config,
    parse_range,
    resolve_config,
)


class TestParseRange:
    """Tests for grid strings."""

    def test_single_value(self):
        assert parse_range("2.5") == (2.5,)
        assert parse_range(3) == (3.0,)

    def test_list(self):
        assert parse_range("1, 2,3") == (1.0, 2.0, 3.0)
        assert parse_range([0.5, 1]) == (0.5, 1.0)

    def test_min_max_steps(self):
        values = parse_range("0:3:61")
        assert len(values) == 61
        assert values[0] == 0.0 and values[-1] == 3.0
        assert values[20] == pytest.approx(1.0)
        assert parse_range("4:9:1") == (4.0,)

    def test_integer_ranges(self):
        assert parse_range("125,250,500", integer=True) == (125, 250, 500)
        with pytest.raises(ValueError):
            parse_range("1.5", integer=True)

    @pytest.mark.parametrize("text", ["", "1:2", "1:2:0", "a,b", "nan"])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            parse_range(text)


class TestConfigFile:
    """Tests for key=value and YAML config files."""

    def test_key_value_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# comment\nkappa=0.8\nv0 = 3\nT=0:2:5\n")
        cfg = ConfigFile(path)
        assert cfg.get("kappa") == "0.8"
        assert cfg.get("physics.kappa") == "0.8"
        assert cfg.line_of("grid.T") == 4

    def test_unknown_key_names_line(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("kappa=0.8\n\nfriction=2\n")
        with pytest.raises(ConfigError) as excinfo:
            ConfigFile(path)
        assert "friction" in str(excinfo.value)
        assert "line 3" in str(excinfo.value)

    def test_duplicate_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("kappa=0.8\nkappa=0.9\n")
        with pytest.raises(ConfigError) as excinfo:
            ConfigFile(path)
        assert "line 2" in str(excinfo.value)

    def test_missing_value(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("kappa\n")
        with pytest.raises(ConfigError):
            ConfigFile(path)

    def test_yaml_file(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("physics:\n  kappa: 0.8\npacket:\n  v0: 2.0\n")
        cfg = ConfigFile(path)
        assert cfg.get("physics.kappa") == 0.8
        assert cfg.get("v0") == 2.0

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("physics: [unclosed\n")
        with pytest.raises(ConfigError):
            ConfigFile(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            ConfigFile(tmp_path / "absent.yaml")


class TestResolveConfig:
    """Tests for merging defaults, files and overrides."""

    def test_defaults(self, isolated_cwd):
        cfg = resolve_config("evolve")
        assert cfg.params.kappa == 0.6
        assert cfg.params.hbar == 1.0
        assert cfg.packet.theta0 == 0.5
        assert cfg.packet.v0 == 5.0
        assert len(cfg.grid.T) == 61
        assert cfg.methods == tuple(MethodId)
        assert cfg.seed == "hyperbolic"
        assert cfg.include_omega is True
        assert cfg.source is None

    def test_command_default_grids(self, isolated_cwd):
        assert resolve_config("kernel").grid.T == (1.0,)
        assert resolve_config("compare").grid.T[-1] == 40.0

    def test_precedence(self, isolated_cwd):
        path = isolated_cwd / "run.cfg"
        path.write_text("kappa=0.8\nv0=3\n")
        cfg = resolve_config("evolve", str(path), {"kappa": 1.1, "v0": None})
        assert cfg.params.kappa == 1.1
        assert cfg.packet.v0 == 3.0
        assert cfg.source == str(path)

    def test_config_path_from_environment(self, isolated_cwd, monkeypatch):
        path = isolated_cwd / "env.yaml"
        path.write_text("physics:\n  kappa: 0.9\n")
        monkeypatch.setenv("DAMPED_KERNEL_CONFIG_PATH", str(path))
        assert resolve_config("kernel").params.kappa == 0.9

    def test_output_dir_from_environment(self, isolated_cwd):
        cfg = resolve_config("kernel")
        assert cfg.output.target("kernel") == isolated_cwd / "outputs" / "kernel.csv"
        assert cfg.audit["file"] == str(isolated_cwd / "outputs" / "audit.log")

    def test_gnuplot_target(self, isolated_cwd):
        cfg = resolve_config("compare", overrides={"gnuplot": True})
        assert cfg.output.target("compare").suffix == ".dat"

    def test_complex_theta0(self, isolated_cwd):
        cfg = resolve_config("evolve", overrides={"theta0": "0.5+0.25i"})
        assert cfg.packet.theta0 == complex(0.5, 0.25)

    def test_method_selection(self, isolated_cwd):
        cfg = resolve_config("compare", overrides={"method": "lg, ck"})
        assert cfg.methods == (MethodId.LG, MethodId.CK)

    @pytest.mark.parametrize("command,overrides,key", [
        ("kernel", {"kappa": -1.0}, "physics.kappa"),
        ("kernel", {"hbar": 0.0}, "physics.hbar"),
        ("kernel", {"T": "0"}, "grid.T"),
        ("evolve", {"T": "-1,1"}, "grid.T"),
        ("evolve", {"theta0": "-0.5"}, "packet.theta0"),
        ("converge", {"N_list": "500,250"}, "grid.N"),
        ("converge", {"N_list": "1,2"}, "grid.N"),
        ("compare", {"method": "WKB"}, "run.method"),
        ("converge", {"seed": "cubic"}, "run.seed"),
        ("kernel", {"format": "xml"}, "output.format"),
        ("kernel", {"workers": 0}, "run.workers"),
    ])
    def test_validation_names_the_key(self, isolated_cwd, command, overrides, key):
        with pytest.raises(ConfigError) as excinfo:
            resolve_config(command, overrides=overrides)
        assert excinfo.value.key == key

    def test_file_errors_carry_line_numbers(self, isolated_cwd):
        path = isolated_cwd / "run.cfg"
        path.write_text("v0=5\nkappa=-2\n")
        with pytest.raises(ConfigError) as excinfo:
            resolve_config("kernel", str(path))
        assert excinfo.value.line == 2
        assert "line 2" in str(excinfo.value)

    def test_unknown_command_and_option(self, isolated_cwd):
        with pytest.raises(ConfigError):
            resolve_config("plot")
        with pytest.raises(ConfigError):
            resolve_config("kernel", overrides={"temperature": 1.0})

    def test_config_echo_is_json_ready(self, isolated_cwd):
        echo = resolve_config("evolve").to_dict()
        assert echo["physics"] == {"kappa": 0.6, "hbar": 1.0}
        assert echo["packet"]["theta0"] == [0.5, 0.0]
        assert "workers" not in echo["run"]


class TestLoadConfig:
    """Tests for the cached config instance."""

    def test_get_before_load(self, monkeypatch):
        monkeypatch.setattr(config_module, "_config_instance", None)
        with pytest.raises(RuntimeError):
            get_config()

    def test_load_then_get(self, isolated_cwd, monkeypatch):
        monkeypatch.setattr(config_module, "_config_instance", None)
        cfg = load_config("kernel", overrides={"kappa": 0.3})
        assert get_config() is cfg
