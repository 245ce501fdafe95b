"""Command-line front end.

Subcommands: ber-sweep, ami-sweep, convergence, complexity, selftest.
Settings resolve in order defaults < preset < config file < flags, and every
run echoes the fully resolved configuration to stderr in a form that can be
fed back via --config. Exit codes: 0 success, 1 runtime failure, 2 usage
error.
"""
from __future__ import annotations

import argparse
import configparser
import io
import os
import re
import sys

from .channel import SystemDims
from .detectors import DetectorSpec
from .metrics import complexity_counts
from .presets import DEFAULT_SEED, PRESET_NAMES, get_preset
from .selfcheck import run_selftest
from .simulator import SweepConfig, run_convergence, run_sweep, write_csv

WORKERS_ENV = "MIMOBP_WORKERS"

_LABEL_TO_KIND = {
    "ML": "ML",
    "MMSE": "MMSE",
    "MMSE-SIC": "MMSE_SIC",
    "SBP": "SBP",
    "RBP": "RBP",
    "MMSE-RBP": "MMSE_RBP",
}
_DETECTOR_RE = re.compile(r"^(ML|MMSE|MMSE-SIC|SBP|RBP|MMSE-RBP)(?:\((\d+),(\d+)\))?$")
# split a comma list on the commas between entries, not the ones inside (..)
_DETECTOR_SEP = re.compile(r",(?![^(]*\))")


def _parse_detector_label(text: str) -> dict:
    match = _DETECTOR_RE.match(text.strip())
    if not match:
        raise ValueError(
            f"cannot parse detector {text!r}; expected e.g. SBP, ML, RBP(1,0), MMSE-RBP(0,0)"
        )
    kind = _LABEL_TO_KIND[match.group(1)]
    out = {"kind": kind, "rd1": 0, "rd2": 0, "l": None}
    if match.group(2) is not None:
        out["rd1"] = int(match.group(2))
        out["rd2"] = int(match.group(3))
    return out


def _defaults(mode: str) -> dict:
    return {
        "mode": mode,
        "nt": 4, "nr": 4, "m": 1, "l": 5,
        "seed": DEFAULT_SEED,
        "workers": int(os.environ.get(WORKERS_ENV, "1")),
        "errors_target": 500,
        "bits_max": 20_000_000,
        "trials_min": 1,
        "snr_points": [round(v, 6) for v in range(0, 15, 2)],
        "snr": 12.0,
        "l_max": 10,
        "out": "results.csv",
        "detectors": [],
    }


def _apply_preset(settings: dict, name: str) -> None:
    preset = get_preset(name, master_seed=settings["seed"])
    cfg = preset.cfg
    settings["nt"] = cfg.dims.n_tx
    settings["nr"] = cfg.dims.n_rx
    settings["m"] = cfg.dims.bits_per_symbol
    settings["errors_target"] = cfg.errors_target
    settings["bits_max"] = cfg.bits_max
    settings["trials_min"] = cfg.trials_min
    settings["seed"] = cfg.master_seed
    settings["snr_points"] = list(cfg.snr_points_db)
    settings["detectors"] = [
        {"kind": d.kind, "rd1": d.rd1, "rd2": d.rd2, "l": d.iterations}
        for d in cfg.detectors
    ]
    if preset.mode == "convergence":
        settings["snr"] = preset.convergence_snr_db
        settings["l_max"] = max(preset.l_values)


def _apply_config_file(settings: dict, path: str) -> None:
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    if parser.has_section("run"):
        run = parser["run"]
        for key, cast in (("nt", int), ("nr", int), ("m", int), ("l", int),
                          ("seed", int), ("workers", int),
                          ("errors_target", int), ("bits_max", int),
                          ("trials_min", int), ("snr", float),
                          ("l_max", int)):
            if key in run:
                settings[key] = cast(run[key])
        if "out" in run:
            settings["out"] = run["out"]
        if "snr_points" in run:
            settings["snr_points"] = [float(v) for v in run["snr_points"].split(",")]
        elif {"snr_min", "snr_max", "snr_step"} & set(run.keys()):
            lo = float(run.get("snr_min", min(settings["snr_points"])))
            hi = float(run.get("snr_max", max(settings["snr_points"])))
            step = float(run.get("snr_step", 2.0))
            settings["snr_points"] = _build_grid(lo, hi, step)
    detectors = []
    for section in parser.sections():
        if not section.startswith("detector:"):
            continue
        sec = parser[section]
        if "kind" not in sec:
            raise ValueError(f"[{section}] needs a 'kind' key")
        entry = _parse_detector_label(sec["kind"])
        if "rd1" in sec:
            entry["rd1"] = int(sec["rd1"])
        if "rd2" in sec:
            entry["rd2"] = int(sec["rd2"])
        if "l" in sec:
            entry["l"] = int(sec["l"])
        detectors.append(entry)
    if detectors:
        settings["detectors"] = detectors


def _build_grid(lo: float, hi: float, step: float) -> list:
    if step <= 0:
        raise ValueError("snr step must be > 0")
    out = []
    v = lo
    while v <= hi + 1e-9:
        out.append(round(v, 6))
        v += step
    return out


def _apply_flags(settings: dict, args: argparse.Namespace) -> None:
    for key in ("nt", "nr", "m", "l", "seed", "workers", "errors_target",
                "bits_max", "trials_min", "out", "snr", "l_max"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    grid_flags = [args.snr_min, args.snr_max, args.snr_step] \
        if hasattr(args, "snr_min") else [None, None, None]
    if any(v is not None for v in grid_flags):
        lo = grid_flags[0] if grid_flags[0] is not None else min(settings["snr_points"])
        hi = grid_flags[1] if grid_flags[1] is not None else max(settings["snr_points"])
        step = grid_flags[2] if grid_flags[2] is not None else 2.0
        settings["snr_points"] = _build_grid(lo, hi, step)
    if getattr(args, "detectors", None):
        settings["detectors"] = [
            _parse_detector_label(part) for part in _DETECTOR_SEP.split(args.detectors)
        ]
    if getattr(args, "rd1", None) is not None or getattr(args, "rd2", None) is not None:
        for entry in settings["detectors"]:
            if entry["kind"] in ("RBP", "MMSE_RBP"):
                if args.rd1 is not None:
                    entry["rd1"] = args.rd1
                if args.rd2 is not None:
                    entry["rd2"] = args.rd2


def _resolve(args: argparse.Namespace, mode: str) -> dict:
    settings = _defaults(mode)
    if getattr(args, "preset", None):
        _apply_preset(settings, args.preset)
    if getattr(args, "config", None):
        _apply_config_file(settings, args.config)
    _apply_flags(settings, args)
    if not settings["detectors"]:
        settings["detectors"] = [{"kind": "SBP", "rd1": 0, "rd2": 0, "l": None}]
    for entry in settings["detectors"]:
        if entry["l"] is None:
            entry["l"] = settings["l"]
    return settings


def _detector_specs(settings: dict) -> tuple:
    specs = []
    for entry in settings["detectors"]:
        kind = entry["kind"]
        iterations = entry["l"] if kind in ("SBP", "RBP", "MMSE_RBP") else 0
        specs.append(DetectorSpec(kind, iterations=iterations,
                                  rd1=entry["rd1"], rd2=entry["rd2"]))
    return tuple(specs)


def _build_sweep_config(settings: dict, record_ami: bool) -> SweepConfig:
    dims = SystemDims(settings["nt"], settings["nr"], settings["m"])
    return SweepConfig(
        dims=dims,
        snr_points_db=tuple(settings["snr_points"]),
        detectors=_detector_specs(settings),
        errors_target=settings["errors_target"],
        bits_max=settings["bits_max"],
        trials_min=settings["trials_min"],
        master_seed=settings["seed"],
        record_ami=record_ami,
    )


def echo_config(settings: dict, stream=None) -> str:
    """Emit the resolved configuration as INI text (also returned)."""
    parser = configparser.ConfigParser()
    parser["run"] = {
        "mode": settings["mode"],
        "nt": str(settings["nt"]),
        "nr": str(settings["nr"]),
        "m": str(settings["m"]),
        "l": str(settings["l"]),
        "seed": str(settings["seed"]),
        "workers": str(settings["workers"]),
        "errors_target": str(settings["errors_target"]),
        "bits_max": str(settings["bits_max"]),
        "trials_min": str(settings["trials_min"]),
        "snr_points": ", ".join(format(v, "g") for v in settings["snr_points"]),
        "out": settings["out"],
    }
    if settings["mode"] == "convergence":
        parser["run"]["snr"] = format(settings["snr"], "g")
        parser["run"]["l_max"] = str(settings["l_max"])
    for pos, entry in enumerate(settings["detectors"], start=1):
        label = entry["kind"].replace("_", "-")
        parser[f"detector:{pos}"] = {
            "kind": label,
            "rd1": str(entry["rd1"]),
            "rd2": str(entry["rd2"]),
            "l": str(entry["l"]),
        }
    buf = io.StringIO()
    parser.write(buf)
    text = buf.getvalue()
    print(text, file=stream or sys.stderr, end="")
    return text


def _cmd_sweep(args: argparse.Namespace, record_ami: bool) -> int:
    settings = _resolve(args, "ami" if record_ami else "ber")
    echo_config(settings)
    cfg = _build_sweep_config(settings, record_ami)
    records = run_sweep(cfg, workers=settings["workers"], progress=True)
    write_csv(records, settings["out"])
    print(f"[mimobp] wrote {settings['out']} ({len(records)} records)", file=sys.stderr)
    return 0


def _cmd_convergence(args: argparse.Namespace) -> int:
    settings = _resolve(args, "convergence")
    echo_config(settings)
    cfg_settings = dict(settings)
    cfg_settings["snr_points"] = [settings["snr"]]
    cfg = _build_sweep_config(cfg_settings, record_ami=False)
    l_values = tuple(range(1, settings["l_max"] + 1))
    records = []
    for spec in cfg.detectors:
        if spec.kind not in ("SBP", "RBP", "MMSE_RBP"):
            print(f"[mimobp] skipping {spec.label}: not iterative", file=sys.stderr)
            continue
        records.extend(run_convergence(cfg, spec, settings["snr"], l_values,
                                       workers=settings["workers"]))
    write_csv(records, settings["out"])
    print(f"[mimobp] wrote {settings['out']} ({len(records)} records)", file=sys.stderr)
    return 0


def _cmd_complexity(args: argparse.Namespace) -> int:
    settings = _resolve(args, "complexity")
    rd1 = args.rd1 if args.rd1 is not None else 1
    rd2 = args.rd2 if args.rd2 is not None else 0
    nt, nr, m, l = settings["nt"], settings["nr"], settings["m"], settings["l"]
    print(f"# per-vector operation counts at Nt={nt} Nr={nr} M={m} L={l}")
    rows = [
        ("ML", complexity_counts("ML", nt, nr, m, l)),
        ("SBP", complexity_counts("SBP", nt, nr, m, l)),
        (f"RBP({rd1},{rd2})", complexity_counts("RBP", nt, nr, m, l, rd1, rd2)),
        (f"MMSE-RBP({rd1},{rd2})", complexity_counts("MMSE_RBP", nt, nr, m, l, rd1, rd2)),
        ("RBP(0,0)", complexity_counts("RBP00", nt, nr, m, l)),
        (f"EB({rd1})", complexity_counts("EB", nt, nr, m, l, rd1, rd2)),
    ]
    width = max(len(name) for name, _ in rows)
    print(f"{'detector':<{width}}  {'multiplications':>15}  {'additions':>12}  {'comparisons':>12}")
    for name, counts in rows:
        print(f"{name:<{width}}  {counts.multiplications:>15}  "
              f"{counts.additions:>12}  {counts.comparisons:>12}")
    return 0


def _cmd_selftest(args: argparse.Namespace) -> int:
    del args
    return 0 if run_selftest(verbose=True) else 1


def _add_common(parser: argparse.ArgumentParser, with_grid: bool = True) -> None:
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--seed", type=int, help="master RNG seed")
    parser.add_argument("--workers", type=int, help=f"worker processes (or ${WORKERS_ENV})")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--nt", type=int, help="transmit antennas")
    parser.add_argument("--nr", type=int, help="receive antennas")
    parser.add_argument("--m", type=int, choices=(1, 2), help="bits per symbol")
    parser.add_argument("--l", type=int, help="message-passing iterations")
    parser.add_argument("--rd1", type=int, help="relaxation: explicit interferer symbols")
    parser.add_argument("--rd2", type=int, choices=(0, 1),
                        help="relaxation: keep own-symbol partner bits")
    if with_grid:
        parser.add_argument("--snr-min", type=float, dest="snr_min")
        parser.add_argument("--snr-max", type=float, dest="snr_max")
        parser.add_argument("--snr-step", type=float, dest="snr_step")
    parser.add_argument("--errors-target", type=int, dest="errors_target",
                        help="stop a point after this many bit errors")
    parser.add_argument("--bits-max", type=int, dest="bits_max",
                        help="hard per-point bit budget")
    parser.add_argument("--trials-min", type=int, dest="trials_min",
                        help="minimum trials per point")
    parser.add_argument("--detectors",
                        help="comma list, e.g. 'ML,SBP,RBP(1,0),MMSE-RBP(0,0),MMSE-SIC'")
    parser.add_argument("--preset", choices=PRESET_NAMES,
                        help="start from a canned experiment")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimobp",
        description="Belief-propagation MIMO detection simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ber-sweep", help="BER vs SNR sweep")
    _add_common(p)
    p.set_defaults(func=lambda a: _cmd_sweep(a, record_ami=False))

    p = sub.add_parser("ami-sweep", help="BER+AMI vs SNR sweep")
    _add_common(p)
    p.set_defaults(func=lambda a: _cmd_sweep(a, record_ami=True))

    p = sub.add_parser("convergence", help="BER vs iteration count at one SNR")
    _add_common(p, with_grid=False)
    p.add_argument("--snr", type=float, help="fixed SNR (dB)")
    p.add_argument("--l-max", type=int, dest="l_max", help="sweep L = 1..l_max")
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("complexity", help="print the per-vector operation counts")
    p.add_argument("--config", help="INI config file")
    p.add_argument("--nt", type=int)
    p.add_argument("--nr", type=int)
    p.add_argument("--m", type=int, choices=(1, 2))
    p.add_argument("--l", type=int)
    p.add_argument("--rd1", type=int)
    p.add_argument("--rd2", type=int, choices=(0, 1))
    p.set_defaults(func=_cmd_complexity)

    p = sub.add_parser("selftest", help="run the built-in oracle checks")
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 1
    except Exception as exc:
        print(f"[mimobp] error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
