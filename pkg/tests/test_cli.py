import csv
import json

import pytest

from hyprobin.cli import (
    COMMANDS,
    RunConfig,
    build_parser,
    emit_config,
    main,
    parse_config,
)
from hyprobin.errors import ConfigError


class TestParseConfig:
    def test_minimal_document_gets_defaults(self):
        cfg = parse_config('{"command": "geometry"}')
        assert cfg.angles == 512
        assert cfg.radial_elements == 512
        assert (cfg.mesh_n_r, cfg.mesh_n_theta) == (48, 192)
        assert cfg.refinements == 2
        assert cfg.out_format == "csv"

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="bogus"):
            parse_config('{"command": "geometry", "bogus": 1}')

    def test_unknown_nested_key(self):
        with pytest.raises(ConfigError, match="resolution.cells"):
            parse_config('{"command": "geometry", '
                         '"resolution": {"cells": 4}}')

    def test_type_mismatch_names_field(self):
        with pytest.raises(ConfigError, match="n"):
            parse_config('{"command": "geometry", "n": "two"}')

    def test_out_of_range_value(self):
        with pytest.raises(ConfigError, match="resolution.mesh"):
            parse_config('{"command": "geometry", '
                         '"resolution": {"mesh": [4, 192]}}')

    def test_bad_command(self):
        with pytest.raises(ConfigError, match="command"):
            parse_config('{"command": "fly"}')

    def test_beta_zero_rejected_for_verify(self):
        with pytest.raises(ConfigError, match="beta"):
            parse_config('{"command": "verify-thm1", '
                         '"domain": {"r0": 1.0}, "betas": [0.0]}')

    def test_wrong_beta_sign_for_thm4(self):
        with pytest.raises(ConfigError, match="beta"):
            parse_config('{"command": "verify-thm4", '
                         '"domain": {"r0": 1.0}, "betas": [-1.0]}')

    def test_non_planar_dimension_rejected(self):
        with pytest.raises(ConfigError, match="n"):
            parse_config('{"command": "geometry", "n": 3}')

    def test_ball_eig_allows_higher_dimension(self):
        cfg = parse_config('{"command": "ball-eig", "n": 4, '
                           '"domain": {"R": 1.0}, "betas": [1.0]}')
        assert cfg.n == 4 and cfg.R == 1.0


class TestRoundTrip:
    @pytest.mark.parametrize("cfg", [
        RunConfig(command="geometry", r0=1.0, modes=((2, 0.05, 0.0),)),
        RunConfig(command="sweep", betas=(-0.5, -1.0), seed=99,
                  family_count=5, out_path="out.csv", out_format="csv"),
        RunConfig(command="ball-eig", n=3, R=0.7, betas=(2.0,)),
        RunConfig(command="verify-thm4", r0=1.1,
                  modes=((3, 0.02, 0.4), (2, 0.01, 0.0)), betas=(0.5, 1.0),
                  mesh_n_r=24, mesh_n_theta=96, refinements=1,
                  out_path="x.json", out_format="json"),
    ])
    def test_parse_inverts_emit(self, cfg):
        assert parse_config(emit_config(cfg)) == cfg


class TestHelp:
    def test_every_subcommand_listed(self):
        text = build_parser().format_help()
        for name in COMMANDS:
            assert name in text

    def test_flag_defaults_documented(self):
        parser = build_parser()
        for action in parser._subparsers._group_actions[0].choices.values():
            text = action.format_help()
            if "--elements" in text:
                assert "default 512" in text
            if "--mesh " in text or "--mesh N" in text:
                assert "default 48x192" in text
            if "--angles" in text:
                assert "default 512" in text


class TestMainEndToEnd:
    def test_ball_eig(self, capsys):
        code = main(["ball-eig", "--n", "2", "--R", "1", "--beta", "-1",
                     "--elements", "256"])
        out = capsys.readouterr().out
        assert code == 0
        assert "lambda_weak" in out and "-2.79" in out

    def test_geometry_csv_output(self, tmp_path, capsys):
        out = tmp_path / "geo.csv"
        code = main(["geometry", "--r0", "1", "--mode", "2:0.05:0",
                     "--out", str(out)])
        assert code == 0
        rows = {r[0]: r[1] for r in csv.reader(out.open())}
        assert float(rows["perimeter"]) == pytest.approx(7.401980868646505)
        assert rows["h_convex"] == "True"

    def test_verify_thm1_circle(self, tmp_path, capsys):
        out = tmp_path / "rep.csv"
        code = main(["verify-thm1", "--r0", "1", "--beta", "-1",
                     "--mesh", "12x64", "--refinements", "2",
                     "--elements", "256", "--out", str(out)])
        assert code == 0
        with out.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        assert abs(float(rows[0]["margin"])) <= 2e-3

    def test_hypothesis_violation_exit_2(self, capsys):
        code = main(["verify-thm1", "--r0", "1", "--mode", "2:0.8:0",
                     "--beta", "-1"])
        assert code == 2
        assert "h-convex" in capsys.readouterr().err

    def test_usage_error_exit_2(self, capsys):
        code = main(["verify-thm1", "--r0", "1", "--beta", "1"])
        assert code == 2
        assert "beta" in capsys.readouterr().err

    def test_bad_mode_flag(self, capsys):
        code = main(["geometry", "--r0", "1", "--mode", "2:0.05"])
        assert code == 2

    def test_invalid_family_radius_names_theta(self, capsys):
        code = main(["geometry", "--r0", "0.1", "--mode", "1:0.2:0"])
        assert code == 2
        assert "theta" in capsys.readouterr().err

    def test_steiner_and_parallel(self, capsys):
        assert main(["steiner", "--r0", "1", "--mode", "3:0.05:0",
                     "--offset", "0.4"]) == 0
        assert "closed_form" in capsys.readouterr().out
        assert main(["parallel", "--r0", "1"]) == 0
        out = capsys.readouterr().out
        assert "P_inner" in out and "P_ball" in out

    def test_domain_eig_with_mesh_dump(self, tmp_path, capsys):
        dump = tmp_path / "mesh.txt"
        code = main(["domain-eig", "--r0", "1", "--beta", "-1",
                     "--mesh", "8x64", "--refinements", "1",
                     "--dump-mesh", str(dump)])
        assert code == 0
        lines = dump.read_text().splitlines()
        assert len(lines[0].split()) == 2
        assert len(lines[-1].split()) == 3

    def test_sweep_from_config_deterministic(self, tmp_path):
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        cfg_doc = {
            "command": "sweep",
            "betas": [-1.0, 1.0],
            "family": {"count": 2},
            "seed": 7,
            "resolution": {"mesh": [12, 64], "refinements": 2,
                           "radial_elements": 256},
            "output": {"path": str(out1), "format": "csv"},
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg_doc))
        assert main(["--config", str(cfg_path)]) == 0
        cfg_doc["output"]["path"] = str(out2)
        cfg_path.write_text(json.dumps(cfg_doc))
        assert main(["--config", str(cfg_path)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_flags_override_config(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text('{"command": "ball-eig", '
                            '"domain": {"R": 1.0}, "betas": [-1.0]}')
        code = main(["--config", str(cfg_path), "ball-eig",
                     "--beta", "0.5", "--elements", "128"])
        assert code == 0
        assert "0.5" in capsys.readouterr().out
