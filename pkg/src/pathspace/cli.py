"""Command-line entry point: ``pathspace <experiment> [options]``.

Exit codes: 0 success, 1 usage error, 2 domain validation error, 3 a failed
acceptance self-check.  Flag values may also come from a JSON file given with
``--config``; explicit flags win over the environment, which wins over the
file.  ``PATHSPACE_SEED`` and ``PATHSPACE_OUT_DIR`` are honoured.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from typing import Sequence

from . import acceptance, bell, events, interferometers as itf, paths, toy
from .phasor import ValidationError

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CHECK = 0, 1, 2, 3

DEFAULT_SEED = 20240501

HELP = {
    "cornu": "Mirror path family: head-to-tail phasor sums (Cornu spiral trace) "
    "and the share of the amplitude carried by the paths near the specular point.",
    "mzi": "Square Mach-Zehnder interferometer: detector probabilities from the "
    "two-route phasor sums, optionally with a blocked arm or a which-path probe.",
    "ifm": "Interaction-free bomb test: Monte Carlo tally of exploded, certified-live "
    "and inconclusive bombs with the bomb in the lower arm.",
    "toy": "Classical clock-pointer toy with settings 0, 2pi/3, 4pi/3: exact "
    "same-branch probability and its Monte Carlo estimate.",
    "rt": "Two-particle (Rarity-Tapster) interferometer: same-detector probability "
    "from products of shadow-stream sums, cross-checked against the state-vector oracle.",
    "events": "Event-level twin-pair Monte Carlo with local beamsplitter decisions, "
    "compared against cos^2((alpha-beta)/2).",
    "bell": "CHSH value and three-setting average for each correlation backend.",
    "check": "Run every acceptance criterion and print a pass/fail table.",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="64-bit seed (env PATHSPACE_SEED)")
    p.add_argument("--trials", type=int, help="Monte Carlo trials")
    p.add_argument("--paths", type=int, help="generated paths / source points")
    p.add_argument("--wavelength", type=float, help="wavelength in meters")
    p.add_argument("--alpha", type=float, help="left setting in radians")
    p.add_argument("--beta", type=float, help="right setting in radians")
    p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    p.add_argument("--out", help="output file, '-' for stdout (env PATHSPACE_OUT_DIR)")
    p.add_argument("--config", help="JSON file supplying any of these options")
    p.add_argument("--threads", type=int, help="worker cap; never changes results")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pathspace", description="Seeded path-sum interferometry experiments.")
    parser.add_argument("--check", action="store_true", help="same as the 'check' subcommand")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    for name, text in HELP.items():
        p = sub.add_parser(name, help=text, description=text)
        _common(p)
        if name == "mzi":
            p.add_argument("--side", type=float, help="side length in meters")
            p.add_argument("--block", choices=("none", "upper", "lower", "both"))
            p.add_argument("--probe", action="store_true", default=None, help="which-path probe on")
        elif name == "ifm":
            p.add_argument("--live-fraction", dest="live_fraction", type=float)
        elif name in ("rt", "events"):
            p.add_argument("--grid", type=int, help="sweep an N x N grid of settings")
            if name == "events":
                p.add_argument("--gamma-left", dest="gamma_left", type=float)
                p.add_argument("--gamma-right", dest="gamma_right", type=float)
                p.add_argument("--gamma-mode", dest="gamma_mode", choices=("fixed", "per_trial"))
        elif name == "bell":
            p.add_argument("--backend", action="append", choices=("cos2", "sqm", "path_sum", "toy", "event"))
        elif name == "check":
            p.add_argument("--json", action="store_true", default=None, help="machine-readable results")
    return parser


DEFAULTS = {
    "seed": DEFAULT_SEED,
    "trials": 100_000,
    "paths": None,
    "wavelength": 1e-6,
    "alpha": None,
    "beta": None,
    "format": "csv",
    "out": "-",
    "threads": 1,
    "side": 0.1,
    "block": "none",
    "probe": False,
    "live_fraction": 1.0,
    "grid": None,
    "gamma_left": 0.0,
    "gamma_right": 0.0,
    "gamma_mode": "fixed",
    "backend": None,
    "json": False,
}


def resolve(args: argparse.Namespace, environ=os.environ) -> dict:
    """Merge defaults < config file < environment < explicit flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(data)
    if "PATHSPACE_SEED" in environ:
        try:
            cfg["seed"] = int(environ["PATHSPACE_SEED"])
        except ValueError as exc:
            raise UsageError("PATHSPACE_SEED must be an integer") from exc
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            cfg[key] = value
    cfg["subcommand"] = args.subcommand
    out_dir = environ.get("PATHSPACE_OUT_DIR")
    if out_dir:
        if cfg["out"] == "-":
            cfg["out"] = os.path.join(out_dir, f"{args.subcommand}.{cfg['format']}")
        elif not os.path.isabs(cfg["out"]):
            cfg["out"] = os.path.join(out_dir, cfg["out"])
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    for key in ("trials", "threads"):
        if cfg[key] < 1:
            raise UsageError(f"--{key} must be >= 1")
    if cfg["paths"] is not None and cfg["paths"] < 1:
        raise UsageError("--paths must be >= 1")
    if cfg["grid"] is not None and cfg["grid"] < 1:
        raise UsageError("--grid must be >= 1")
    if not cfg["wavelength"] > 0:
        raise UsageError("--wavelength must be > 0")
    if not 0 <= cfg["seed"] < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    if cfg["format"] not in ("csv", "json"):
        raise UsageError("--format must be csv or json")


def _dump_json(doc, out) -> None:
    json.dump(doc, out, indent=2, sort_keys=True)
    out.write("\n")


def _write_rows(rows: list[dict], fields: list[str], fmt: str, out) -> None:
    if fmt == "json":
        _dump_json([{f: r[f] for f in fields} for r in rows], out)
        return
    out.write(",".join(fields) + "\n")
    for r in rows:
        out.write(",".join(str(r[f]) if isinstance(r[f], (int, str)) else repr(float(r[f])) for f in fields) + "\n")


def cmd_cornu(cfg, out) -> int:
    n = cfg["paths"] or 10_000
    stream = paths.symmetric_mirror_stream(n, cfg["wavelength"])
    if cfg["format"] == "csv":
        paths.write_cornu_csv(stream, out)
    else:
        pts = paths.cornu_partial_sums(stream)
        phases = paths.path_phases(stream)
        _dump_json(
            {
                "points": [
                    {"index": k, "partial_re": x, "partial_im": y, "path_phase": None if k == 0 else float(phases[k - 1])}
                    for k, (x, y) in enumerate(pts)
                ],
                "shares": paths.stationary_phase_shares(stream),
            },
            out,
        )
    return EXIT_OK


def cmd_mzi(cfg, out) -> int:
    spec = itf.MziSpec(cfg["side"], cfg["wavelength"], cfg["block"], bool(cfg["probe"]))
    p1, p2, pa = itf.mzi_probabilities(spec)
    _write_rows([{"p_d1": p1, "p_d2": p2, "p_absorbed": pa}], ["p_d1", "p_d2", "p_absorbed"], cfg["format"], out)
    return EXIT_OK


def cmd_ifm(cfg, out) -> int:
    tally = itf.ifm_report(
        cfg["trials"], cfg["live_fraction"], cfg["seed"], wavelength=cfg["wavelength"], threads=cfg["threads"]
    )
    _write_rows([tally], list(tally), cfg["format"], out)
    return EXIT_OK


def cmd_toy(cfg, out) -> int:
    if cfg["alpha"] is None and cfg["beta"] is None:
        rows = toy.toy_table(cfg["trials"], cfg["seed"], cfg["threads"])
    else:
        a, b = cfg["alpha"] or 0.0, cfg["beta"] or 0.0
        p = toy.toy_correlation(a, b)
        p_mc = toy.toy_monte_carlo(a, b, cfg["trials"], cfg["seed"], cfg["threads"])
        rows = [{"alpha": a, "beta": b, "p_analytic": p, "p_mc": p_mc, "n_trials": cfg["trials"], "abs_err": abs(p - p_mc)}]
    if cfg["format"] == "csv":
        toy.write_toy_csv(rows, out)
    else:
        _dump_json({"rows": rows, "stated_intermediates": toy.STATED_INTERMEDIATES}, out)
    return EXIT_OK


def cmd_rt(cfg, out) -> int:
    base = itf.RaritySpec(n_source_points=cfg["paths"] or 512, wavelength=cfg["wavelength"])
    if cfg["grid"]:
        settings = itf.settings_grid(cfg["grid"])
    else:
        settings = [(cfg["alpha"] or 0.0, cfg["beta"] or 0.0)]
    rows = itf.rt_sweep(settings, base)
    if cfg["format"] == "csv":
        itf.write_sweep_csv(rows, out)
    else:
        _dump_json(rows, out)
    return EXIT_OK


def cmd_events(cfg, out) -> int:
    if cfg["grid"]:
        settings = itf.settings_grid(cfg["grid"])
    else:
        settings = [(cfg["alpha"] or 0.0, cfg["beta"] or 0.0)]
    report = events.fidelity_report(
        settings, cfg["trials"], cfg["seed"], cfg["gamma_left"], cfg["gamma_right"],
        gamma_mode=cfg["gamma_mode"], threads=cfg["threads"],
    )
    if cfg["format"] == "csv":
        events.write_fidelity_csv(report, out)
    else:
        events.write_fidelity_json(report, out)
    return EXIT_OK


def _backend(name: str, cfg) -> bell.Backend:
    if name == "cos2":
        return bell.cos2_backend()
    if name == "sqm":
        return bell.sqm_backend()
    if name == "toy":
        return bell.toy_backend()
    if name == "path_sum":
        return bell.path_sum_backend(itf.RaritySpec(n_source_points=cfg["paths"] or 512, wavelength=cfg["wavelength"]))
    return bell.event_backend(cfg["trials"], cfg["seed"])


def cmd_bell(cfg, out) -> int:
    names = cfg["backend"] or ["cos2", "sqm", "path_sum", "toy"]
    backends = [_backend(n, cfg) for n in names]
    if cfg["format"] == "json":
        bell.write_bell_json([bell.bell_report(b) for b in backends], out)
    else:
        a, a2, b, b2 = bell.STANDARD_CHSH
        pairs = [(a, b), (a, b2), (a2, b), (a2, b2)]
        pairs += [(x, y) for x in toy.SETTINGS for y in toy.SETTINGS]
        bell.CorrelationTable.build(backends, pairs).write_csv(out)
    return EXIT_OK


def check_all(seed: int = DEFAULT_SEED, *, as_json: bool = False, out=None, threads: int = 1,
              rt_norm_factor: float = 4.0) -> int:
    """Run the acceptance suite; exit code 0 iff every criterion passes."""
    out = out or sys.stdout
    ctx = acceptance.Context(seed=seed, threads=threads, rt_norm_factor=rt_norm_factor)
    verdicts = acceptance.check_all(ctx)
    out.write(acceptance.report_json(verdicts) if as_json else acceptance.format_table(verdicts))
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_CHECK


COMMANDS = {
    "cornu": cmd_cornu,
    "mzi": cmd_mzi,
    "ifm": cmd_ifm,
    "toy": cmd_toy,
    "rt": cmd_rt,
    "events": cmd_events,
    "bell": cmd_bell,
}


def run(cfg: dict) -> int:
    """Execute one resolved configuration and write its output."""
    if cfg["subcommand"] == "check":
        buf = io.StringIO()
        code = check_all(cfg["seed"], as_json=bool(cfg["json"]), out=buf, threads=cfg["threads"])
        _emit(buf.getvalue(), cfg["out"])
        return code
    buf = io.StringIO()
    code = COMMANDS[cfg["subcommand"]](cfg, buf)
    _emit(buf.getvalue(), cfg["out"])
    return code


def _emit(text: str, target: str) -> None:
    if target == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    os.makedirs(os.path.dirname(os.path.abspath(target)), exist_ok=True)
    with open(target, "w", newline="") as fh:
        fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["--check"]:
        argv[0] = "check"
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            raise UsageError(parser.format_usage().strip() + "\npathspace: error: a subcommand is required")
        cfg = resolve(args)
        return run(cfg)
    except UsageError as exc:
        msg = str(exc)
        print(msg if msg.startswith("pathspace") else f"pathspace: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"pathspace: validation error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main_exit() -> None:
    try:
        code = main()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = 0
    sys.exit(code)


if __name__ == "__main__":  # pragma: no cover
    main_exit()
