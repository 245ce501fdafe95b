"""Command-line front end: parsing, precedence, echo round-trip, outputs."""
import io

import pytest

from mimobp.cli import (
    WORKERS_ENV,
    _defaults,
    _parse_detector_label,
    _resolve,
    build_parser,
    echo_config,
    main,
)
from mimobp.presets import PRESET_NAMES, get_preset
from mimobp.simulator import read_csv


def _settings(argv, mode="ber"):
    args = build_parser().parse_args(argv)
    return _resolve(args, mode)


class TestDetectorLabels:
    def test_plain_and_parenthesized_forms(self):
        assert _parse_detector_label("SBP") == \
               {"kind": "SBP", "rd1": 0, "rd2": 0, "l": None}
        assert _parse_detector_label(" RBP(2,1) ") == \
               {"kind": "RBP", "rd1": 2, "rd2": 1, "l": None}
        assert _parse_detector_label("MMSE-RBP(0,0)")["kind"] == "MMSE_RBP"
        assert _parse_detector_label("MMSE-SIC")["kind"] == "MMSE_SIC"

    def test_garbage_rejected(self):
        for bad in ("ZF", "RBP(1)", "RBP(1,0,0)", "rbp(1,0)", ""):
            with pytest.raises(ValueError):
                _parse_detector_label(bad)


class TestUsageErrors:
    def test_missing_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 2

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["ber-sweep", "--frobnicate"])
        assert err.value.code == 2

    def test_invalid_choice_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["ber-sweep", "--m", "3"])
        assert err.value.code == 2

    def test_runtime_error_exits_1(self, capsys):
        assert main(["ber-sweep", "--detectors", "ZF"]) == 1
        assert "[mimobp] error:" in capsys.readouterr().err


class TestResolutionOrder:
    def test_defaults(self):
        settings = _settings(["ber-sweep"])
        assert (settings["nt"], settings["nr"], settings["m"], settings["l"]) == (4, 4, 1, 5)
        assert settings["detectors"] == [{"kind": "SBP", "rd1": 0, "rd2": 0, "l": 5}]

    def test_workers_env_feeds_default(self, monkeypatch):
        monkeypatch.setenv(WORKERS_ENV, "3")
        assert _defaults("ber")["workers"] == 3

    def test_preset_fills_everything(self):
        settings = _settings(["ber-sweep", "--preset", "fig3"])
        assert settings["nt"] == settings["nr"] == 4
        assert settings["snr_points"] == [float(v) for v in range(0, 15, 2)]
        assert [d["kind"] for d in settings["detectors"]] == ["ML", "SBP"]

    def test_config_overrides_preset(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[run]\nnt = 2\nerrors_target = 77\n")
        settings = _settings(["ber-sweep", "--preset", "fig3", "--config", str(ini)])
        assert settings["nt"] == 2
        assert settings["errors_target"] == 77
        assert settings["nr"] == 4  # untouched preset value survives

    def test_flags_override_config(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[run]\nseed = 1\nnt = 2\n")
        settings = _settings(["ber-sweep", "--config", str(ini), "--seed", "5"])
        assert settings["seed"] == 5
        assert settings["nt"] == 2

    def test_grid_flags_build_the_snr_list(self):
        settings = _settings(["ber-sweep", "--snr-min", "4", "--snr-max", "12",
                              "--snr-step", "4"])
        assert settings["snr_points"] == [4.0, 8.0, 12.0]

    def test_rd_flags_rewrite_relaxed_entries_only(self):
        settings = _settings(["ber-sweep", "--detectors", "SBP,RBP(0,0),MMSE-RBP(0,0)",
                              "--rd1", "2", "--rd2", "1"])
        by_kind = {d["kind"]: d for d in settings["detectors"]}
        assert (by_kind["RBP"]["rd1"], by_kind["RBP"]["rd2"]) == (2, 1)
        assert (by_kind["MMSE_RBP"]["rd1"], by_kind["MMSE_RBP"]["rd2"]) == (2, 1)
        assert (by_kind["SBP"]["rd1"], by_kind["SBP"]["rd2"]) == (0, 0)

    def test_config_detector_sections(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text(
            "[run]\nl = 3\n"
            "[detector:1]\nkind = MMSE-RBP\nrd1 = 1\nrd2 = 0\n"
            "[detector:2]\nkind = ML\n"
        )
        settings = _settings(["ber-sweep", "--config", str(ini)])
        assert settings["detectors"] == [
            {"kind": "MMSE_RBP", "rd1": 1, "rd2": 0, "l": 3},
            {"kind": "ML", "rd1": 0, "rd2": 0, "l": 3},
        ]

    def test_config_grid_keys(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text("[run]\nsnr_min = 2\nsnr_max = 6\nsnr_step = 2\n")
        assert _settings(["ber-sweep", "--config", str(ini)])["snr_points"] == \
               [2.0, 4.0, 6.0]


class TestEchoRoundTrip:
    def test_echoed_ini_reproduces_the_settings(self, tmp_path):
        argv = ["ber-sweep", "--nt", "3", "--nr", "5", "--l", "4", "--seed", "77",
                "--detectors", "ML,RBP(1,0)", "--snr-min", "2", "--snr-max", "6",
                "--snr-step", "2", "--errors-target", "111",
                "--out", str(tmp_path / "a.csv")]
        first = _settings(argv)
        buf = io.StringIO()
        text = echo_config(first, stream=buf)
        assert text == buf.getvalue()
        ini = tmp_path / "echo.ini"
        ini.write_text(text)
        second = _settings(["ber-sweep", "--config", str(ini)])
        assert second == first


class TestPresets:
    def test_names_are_stable(self):
        assert PRESET_NAMES == ("fig3", "fig5", "fig6", "fig7", "fig8")

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            get_preset("fig9")

    def test_seed_override_propagates(self):
        assert get_preset("fig6", master_seed=7).cfg.master_seed == 7

    def test_large_array_preset_shape(self):
        cfg = get_preset("fig6").cfg
        assert (cfg.dims.n_tx, cfg.dims.n_rx) == (8, 8)
        labels = [d.label for d in cfg.detectors]
        assert "MMSE-RBP" in labels and "RBP" in labels and "SBP" in labels

    def test_ami_preset_uses_fixed_trial_count(self):
        cfg = get_preset("fig7").cfg
        assert cfg.record_ami
        assert cfg.trials_min == 20_000
        assert cfg.bits_max == cfg.trials_min * cfg.dims.n_bits


class TestEndToEnd:
    def test_complexity_table_prints_reference_counts(self, capsys):
        assert main(["complexity"]) == 0
        out = capsys.readouterr().out
        assert "Nt=4 Nr=4 M=1 L=5" in out
        for token in ("256", "260", "1136", "1120"):
            assert token in out

    def test_complexity_honors_dimension_flags(self, capsys):
        assert main(["complexity", "--nt", "2", "--nr", "2", "--l", "1",
                     "--rd1", "0", "--rd2", "0"]) == 0
        out = capsys.readouterr().out
        assert "Nt=2 Nr=2 M=1 L=1" in out

    def test_full_relaxation_sweep_duplicates_the_exhaustive_column(self, tmp_path):
        out = tmp_path / "pair.csv"
        code = main(["ber-sweep", "--nt", "4", "--nr", "4", "--l", "5",
                     "--detectors", "SBP,RBP(3,1)", "--snr-min", "8",
                     "--snr-max", "8", "--errors-target", "40",
                     "--seed", "7", "--out", str(out)])
        assert code == 0
        records = read_csv(out)
        assert [r.detector for r in records] == ["SBP", "RBP"]
        assert records[0].errors == records[1].errors
        assert records[0].bits == records[1].bits
        assert records[0].ber == records[1].ber

    def test_same_seed_gives_identical_results_files(self, tmp_path):
        argv = ["ber-sweep", "--nt", "2", "--nr", "2", "--detectors", "MMSE",
                "--snr-min", "4", "--snr-max", "6", "--snr-step", "2",
                "--errors-target", "25", "--seed", "11"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0

        def strip_wall(path):
            rows = path.read_text().splitlines()
            return [",".join(r.split(",")[:-1]) for r in rows]

        assert strip_wall(a) == strip_wall(b)

    def test_ami_sweep_fills_the_ami_column(self, tmp_path):
        out = tmp_path / "ami.csv"
        code = main(["ami-sweep", "--nt", "2", "--nr", "2", "--detectors", "MMSE",
                     "--snr-min", "4", "--snr-max", "4", "--errors-target", "10",
                     "--seed", "3", "--out", str(out)])
        assert code == 0
        records = read_csv(out)
        assert records[0].ami is not None

    def test_convergence_writes_one_row_per_depth(self, tmp_path, capsys):
        out = tmp_path / "conv.csv"
        code = main(["convergence", "--nt", "4", "--nr", "4",
                     "--detectors", "ML,SBP", "--snr", "8", "--l-max", "3",
                     "--errors-target", "20", "--seed", "13", "--out", str(out)])
        assert code == 0
        assert "skipping ML" in capsys.readouterr().err
        records = read_csv(out)
        assert [r.iterations for r in records] == [1, 2, 3]
        assert len({r.bits for r in records}) == 1

    def test_selftest_command_passes(self, capsys):
        assert main(["selftest"]) == 0
        err = capsys.readouterr().err
        assert "ok" in err.lower() or "pass" in err.lower()
