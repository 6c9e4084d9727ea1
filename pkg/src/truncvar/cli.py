"""Command-line entry point ``truncvar``.

Every subcommand accepts ``--config FILE.json``. Keys in the file are the
option names (dashes or underscores); explicit flags win over the file.
Exit codes: 0 success, 1 a hard check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import warnings
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from .crossings import crossing_counts, crossing_integral
from .follmer import covariation, identity_report, integral_X, integral_Xprime, integral_Xsecond, qv_bracket
from .harness import EXPERIMENTS, ConfigError, ExperimentConfig, run, sidecar, write_json
from .path import PathError, read_csv, write_csv, write_path_csv
from .simulate import SimConfig, generate, metadata
from .skorohod import backlash, identity_family
from .stieltjes import PRESETS, preset
from .variation import variation_curve, variation_triple

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SIM_FIELDS = [f.name for f in fields(SimConfig)]


class UsageError(Exception):
    pass


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` (stop included) or a comma-separated list of times."""
    text = text.strip()
    if ":" in text:
        try:
            a, b, h = (float(v) for v in text.split(":"))
        except ValueError:
            raise UsageError(f"bad grid {text!r}; expected start:stop:step") from None
        if not h > 0 or b < a:
            raise UsageError(f"bad grid {text!r}; need step > 0 and stop >= start")
        m = int(round((b - a) / h))
        return np.linspace(a, a + m * h, m + 1)
    return parse_floats(text)


def parse_floats(text) -> np.ndarray:
    if isinstance(text, (list, tuple)):
        return np.asarray(text, dtype=float)
    try:
        return np.asarray([float(v) for v in str(text).split(",") if v.strip()], dtype=float)
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def read_grid_file(path) -> np.ndarray:
    """First column of a CSV with a header row."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise UsageError(f"{path}: empty grid file")
    try:
        return np.asarray([float(r[0]) for r in rows[1:] if r and r[0].strip()])
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _emit_json(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_csv(columns: dict, out: str | None) -> None:
    if out:
        write_csv(out, columns)
        write_json(out + ".meta.json", sidecar({"command": sys.argv[1:]}))
        return
    buf = io.StringIO()
    write_csv(buf, columns)
    sys.stdout.write(buf.getvalue())


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required")


# -- subcommands -----------------------------------------------------------


def cmd_simulate(args) -> int:
    _need(args, "out")
    kw = {k: getattr(args, k) for k in SIM_FIELDS if getattr(args, k, None) is not None}
    cfg = SimConfig(**kw)
    p = generate(cfg)
    write_path_csv(args.out, p)
    write_json(args.out + ".meta.json", metadata(cfg, samples=len(p)))
    return EXIT_OK


def cmd_compute(args) -> int:
    _need(args, "input", "eps")
    p = read_csv(args.input)
    if args.curve:
        vp = variation_curve(p, args.eps, read_grid_file(args.curve))
        _emit_csv({"t": vp.grid, "ttv": vp.ttv, "utv": vp.utv, "dtv": vp.dtv}, args.output)
        return EXIT_OK
    upto = p.horizon if args.upto is None else args.upto
    v = variation_triple(p, args.eps, upto)
    _emit_json({**v.as_dict(), "eps": args.eps, "upto": upto}, args.output)
    return EXIT_OK


def cmd_envelope(args) -> int:
    _need(args, "input", "halfwidth")
    p = read_csv(args.input)
    e = backlash(p, args.halfwidth)
    _emit_csv({"t": p.times, "x": p.values, "xeps": e.env.values}, args.output)
    return EXIT_OK


def cmd_crossings(args) -> int:
    _need(args, "input", "eps")
    p = read_csv(args.input)
    window = tuple(parse_floats(args.window)) if args.window else None
    if args.integral:
        val = crossing_integral(p, args.eps, args.integral, window)
        _emit_json({"eps": args.eps, "which": args.integral, "value": val}, args.output)
        return EXIT_OK
    _need(args, "level")
    tr = crossing_counts(p, args.level, args.eps, window)
    _emit_json(
        {
            "level": tr.level,
            "eps": tr.eps,
            "u": tr.u,
            "d": tr.d,
            "n": tr.n,
            "down_sigmas": [float(p.times[i]) for i in tr.down_sigmas],
            "down_taus": [float(p.times[i]) for i in tr.down_taus],
            "up_sigmas": [float(p.times[i]) for i in tr.up_sigmas],
            "up_taus": [float(p.times[i]) for i in tr.up_taus],
        },
        args.output,
    )
    return EXIT_OK


def _family(name: str):
    return {"backlash": backlash, "identity": identity_family}[name]


def cmd_qv(args) -> int:
    _need(args, "input", "eps_list")
    p = read_csv(args.input)
    grid = parse_grid(args.grid) if args.grid else None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        q = qv_bracket(p, parse_floats(args.eps_list), grid, family=_family(args.family))
    for w in caught:
        print(f"truncvar: warning: {w.message}", file=sys.stderr)
    t, e, v = [], [], []
    for eps, curve in q.curves.items():
        t.append(q.grid)
        e.append(np.full(q.grid.size, eps))
        v.append(curve)
    _emit_csv({"t": np.concatenate(t), "eps": np.concatenate(e), "qv": np.concatenate(v)}, args.output)
    return EXIT_OK


def cmd_integrate(args) -> int:
    _need(args, "input", "eps")
    p = read_csv(args.input)
    fn = preset(args.f)
    fam = _family(args.family)
    if args.report:
        r = identity_report(p, fn, args.eps, args.upto, family=fam)
        _emit_json({"f": args.f, **r.as_dict()}, args.output)
        return EXIT_OK
    _emit_json(
        {
            "f": args.f,
            "eps": args.eps,
            "I_X": integral_X(p, fn, args.eps, args.upto, family=fam),
            "I_Xprime": integral_Xprime(p, fn, args.eps, args.upto, family=fam),
            "I_Xsecond": integral_Xsecond(p, fn, args.eps, args.upto, family=fam),
        },
        args.output,
    )
    return EXIT_OK


def cmd_covar(args) -> int:
    _need(args, "x", "y", "eps")
    px, py = read_csv(args.x), read_csv(args.y)
    if args.grid:
        c = covariation(px, py, args.eps, parse_grid(args.grid))
        _emit_csv({"t": c.grid, "eps": np.full(c.grid.size, args.eps), "covariation": c.values}, args.output)
    else:
        c = covariation(px, py, args.eps, [px.horizon])
        _emit_json({"eps": args.eps, "t": px.horizon, "covariation": c.final()}, args.output)
    return EXIT_OK


def _experiment_config(args, file_cfg: dict) -> ExperimentConfig:
    d = {k: v for k, v in file_cfg.items() if k in {"experiment", "sim", "eps_list", "grid", "replicates",
                                                     "workers", "output", "options"}}
    sim = dict(d.get("sim", {}) or {})
    sim.update({k: file_cfg[k] for k in SIM_FIELDS if k in file_cfg})
    sim.update({k: getattr(args, k) for k in SIM_FIELDS if getattr(args, k, None) is not None})
    d["sim"] = sim
    if args.experiment:
        d["experiment"] = args.experiment
    if "experiment" not in d:
        raise UsageError("experiment name missing")
    if args.eps_list:
        d["eps_list"] = tuple(parse_floats(args.eps_list))
    elif "eps_list" in d:
        d["eps_list"] = tuple(parse_floats(d["eps_list"]))
    if args.grid:
        d["grid"] = tuple(parse_grid(args.grid))
    elif isinstance(d.get("grid"), str):
        d["grid"] = tuple(parse_grid(d["grid"]))
    for k in ("replicates", "workers", "output"):
        if getattr(args, k) is not None:
            d[k] = getattr(args, k)
    opts = dict(d.get("options", {}) or {})
    for item in args.option or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--option expects key=value, got {item!r}")
        try:
            opts[key] = json.loads(val)
        except json.JSONDecodeError:
            opts[key] = val
    d["options"] = opts
    return ExperimentConfig.from_dict(d)


def cmd_experiment(args, file_cfg: dict) -> int:
    cfg = _experiment_config(args, file_cfg)
    res = run(cfg)
    print(res.report())
    if not cfg.output:
        print(json.dumps({"summary": res.summary, "meta": sidecar()}, default=float, sort_keys=True))
    return res.exit_code


# -- parser ----------------------------------------------------------------


def _sim_args(sp):
    sp.add_argument("--kind", choices=("brownian", "compound_poisson", "jump_diffusion", "alpha_stable"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--T", type=float)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--drift", type=float)
    sp.add_argument("--lam", type=float, help="Poisson jump rate")
    sp.add_argument("--jump-sd", dest="jump_sd", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--stable-scale", dest="stable_scale", type=float)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option defaults")
    common.add_argument("--output", "-o", help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="truncvar", description="Truncated variation toolkit for sampled paths.")
    ap.add_argument("--version", action="version", version=f"truncvar {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", parents=[common], help="simulate a seeded path")
    _sim_args(sp)
    sp.add_argument("--out")

    sp = sub.add_parser("compute", parents=[common], help="TTV/UTV/DTV of a path")
    sp.add_argument("--input")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--upto", type=float)
    sp.add_argument("--curve", help="CSV whose first column is the evaluation grid")

    sp = sub.add_parser("envelope", parents=[common], help="play-operator envelope")
    sp.add_argument("--input")
    sp.add_argument("--halfwidth", type=float)

    sp = sub.add_parser("crossings", parents=[common], help="band-crossing counts")
    sp.add_argument("--input")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--level", type=float)
    sp.add_argument("--integral", choices=("up", "down", "total"))
    sp.add_argument("--window", help="a,b")

    sp = sub.add_parser("qv", parents=[common], help="bracket curves along an eps ladder")
    sp.add_argument("--input")
    sp.add_argument("--eps-list", dest="eps_list")
    sp.add_argument("--grid", help="start:stop:step or comma list")
    sp.add_argument("--family", choices=("backlash", "identity"))

    sp = sub.add_parser("integrate", parents=[common], help="pathwise integrals of f")
    sp.add_argument("--input")
    sp.add_argument("--f", choices=sorted(PRESETS))
    sp.add_argument("--eps", type=float)
    sp.add_argument("--upto", type=float)
    sp.add_argument("--report", action="store_true", default=None)
    sp.add_argument("--family", choices=("backlash", "identity"))

    sp = sub.add_parser("covar", parents=[common], help="covariation of two paths")
    sp.add_argument("--x")
    sp.add_argument("--y")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--grid")

    sp = sub.add_parser("experiment", parents=[common], help="run a harness experiment")
    sp.add_argument("experiment", nargs="?", choices=EXPERIMENTS)
    _sim_args(sp)
    sp.add_argument("--eps-list", dest="eps_list")
    sp.add_argument("--grid")
    sp.add_argument("--replicates", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--option", action="append", metavar="KEY=VALUE")
    return ap


DEFAULTS = {"family": "backlash", "f": "cos", "report": False}

COMMANDS = {
    "simulate": cmd_simulate,
    "compute": cmd_compute,
    "envelope": cmd_envelope,
    "crossings": cmd_crossings,
    "qv": cmd_qv,
    "integrate": cmd_integrate,
    "covar": cmd_covar,
}


def load_config(path) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _apply_config(args, file_cfg: dict) -> None:
    for key, val in vars(args).items():
        if val is None:
            if key in file_cfg:
                setattr(args, key, file_cfg[key])
            elif key in DEFAULTS:
                setattr(args, key, DEFAULTS[key])


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        file_cfg = load_config(args.config)
        if args.command == "experiment":
            return cmd_experiment(args, file_cfg)
        _apply_config(args, file_cfg)
        return COMMANDS[args.command](args)
    except BrokenPipeError:
        sys.stderr.close()
        return EXIT_OK
    except (UsageError, ConfigError, PathError, ValueError, OSError, TypeError) as exc:
        print(f"truncvar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
