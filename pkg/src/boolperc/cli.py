"""Command-line front end.

Every command is a pure function of its configuration: reruns with the same
seed produce byte-identical output whatever `--workers` is.

Exit codes: 0 success, 2 configuration error, 3 hypothesis or tolerance
failure, 4 audit failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bounds
from .clusters import ClusterSummary, cluster_stats
from .estimators import (InsufficientSamples, ToleranceError, estimate_event, fit_tail_exponent,
                         sample_cluster_statistics)
from .events import EventSpec
from .model import (MemoryBudgetError, ModelParams, Window, dump_realization, sample_realization,
                    smallest_r_cut)
from .radius_laws import LawSpecError, parse_law, tail_moment

EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_AUDIT = 2, 3, 4


class ConfigError(ValueError):
    pass


def _g(x: float) -> str:
    return f"{x:.17g}"


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


@dataclass
class RunConfig:
    """Flat key=value configuration; list values are comma separated."""

    d: int = 1
    intensity: float = 0.01
    law: str = "constant:1"
    L: float | None = None
    rcut: list[float] = field(default_factory=list)
    n: int = 10_000
    seed: int = 0
    alpha_grid: list[float] = field(default_factory=lambda: [1.0])
    rho_grid: list[float] = field(default_factory=lambda: [0.0, 0.5])
    s: float | None = None
    k: int | None = None
    n_steps: int = 10
    base: str = "analytic"
    tol: float = 1e-4
    allow_divergent: bool = False
    hitting: bool = False
    synthetic_g0: bool = False

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, bool):
                text = "true" if v else "false"
            elif isinstance(v, list):
                text = ",".join(_g(x) for x in v)
            elif isinstance(v, float):
                text = _g(v)
            else:
                text = str(v)
            lines.append(f"{f.name}={text}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        cfg = cls()
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise ConfigError(f"expected key=value, got {raw!r}")
            cfg.set(key.strip(), value.strip())
        return cfg

    def set(self, key: str, value: str):
        types = {f.name: f for f in dataclasses.fields(self)}
        if key not in types:
            raise ConfigError(f"unknown config key {key!r}")
        default = getattr(RunConfig(), key)
        try:
            if key in ("rcut", "alpha_grid", "rho_grid"):
                parsed = _floats(value)
            elif isinstance(default, bool):
                if value.lower() not in ("true", "false", "1", "0"):
                    raise ValueError(value)
                parsed = value.lower() in ("true", "1")
            elif key in ("d", "n", "seed", "k", "n_steps"):
                parsed = int(value)
            elif key in ("intensity", "L", "s", "tol"):
                parsed = float(value)
            else:
                parsed = value
        except ValueError:
            raise ConfigError(f"bad value {value!r} for {key}") from None
        setattr(self, key, parsed)

    def provenance(self) -> str:
        return "# config: " + " ".join(self.to_text().split())

    def params(self) -> ModelParams:
        try:
            return ModelParams(self.d, self.intensity, parse_law(self.law))
        except LawSpecError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


_FLAGS = {
    "d": ("-d", "--dimension"),
    "intensity": ("--lambda",),
    "law": ("--law",),
    "L": ("-L",),
    "rcut": ("--rcut",),
    "n": ("-n",),
    "seed": ("--seed",),
    "alpha_grid": ("--alpha-grid",),
    "rho_grid": ("--rho-grid",),
    "s": ("--s",),
    "k": ("-k",),
    "n_steps": ("--steps",),
    "base": ("--base",),
    "tol": ("--tol",),
}
_SWITCHES = {"allow_divergent": "--allow-divergent", "hitting": "--hitting",
             "synthetic_g0": "--synthetic-g0"}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value config file")
    for key, flags in _FLAGS.items():
        common.add_argument(*flags, dest=key, default=None)
    for key, flag in _SWITCHES.items():
        common.add_argument(flag, dest=key, action="store_const", const="true", default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", type=Path, default=None)
    parser = argparse.ArgumentParser(prog="boolperc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("constants", "print the explicit constants and lambda0"),
        ("scan", "estimate event probabilities over an alpha grid and audit the inequalities"),
        ("tail", "cluster statistics and Hill fits for the tails of M and D"),
        ("propagate", "certified bound chain from the two-scale recursion"),
        ("coverage", "exact vs Monte Carlo probability that one ball covers B(0, rho)"),
        ("simulate", "dump one realization"),
        ("cluster", "origin-cluster summary of one realization"),
    ]:
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.from_text(args.config.read_text()) if args.config else RunConfig()
    for key in (*_FLAGS, *_SWITCHES):
        value = getattr(args, key)
        if value is not None:
            cfg.set(key, value)
    return cfg


class Output:
    def __init__(self, path: Path | None):
        self.path = path
        self.parts: list[str] = []

    def write(self, text: str):
        self.parts.append(text)

    def side_file(self, suffix: str, text: str):
        # secondary artefacts go next to --out, or follow the main output on stdout
        if self.path is None:
            self.parts.append(text)
        else:
            self.path.with_name(self.path.name + suffix).write_text(text)

    def flush(self):
        text = "".join(self.parts)
        if self.path is None:
            sys.stdout.write(text)
        else:
            self.path.write_text(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_g) + "\n"


def _window(cfg: RunConfig, default: float) -> Window:
    return Window(cfg.L if cfg.L is not None else default)


def _single_rcut(cfg: RunConfig, params: ModelParams, window: Window) -> float:
    if len(cfg.rcut) > 1:
        raise ConfigError("this command takes a single --rcut")
    if cfg.rcut:
        return cfg.rcut[0]
    if cfg.hitting and tail_moment(params.law, params.dimension, 0.0) < math.inf:
        return math.inf
    r = smallest_r_cut(params, window, cfg.tol)
    if r is None:
        if not cfg.allow_divergent:
            raise ToleranceError("E(R^d) is infinite: pass --rcut and --allow-divergent")
        r = 10.0 * window.half_width
    return r


def cmd_constants(cfg: RunConfig, out: Output, workers: int) -> int:
    table = bounds.compute_constants(cfg.d, parse_law(cfg.law))
    out.write(f"# dimension={cfg.d} law={table.law} nets={table.net_method}\n")
    width = max(len(f) for _, f, _ in table.rows())
    for name, formula, value in table.rows():
        text = "undefined" if value is None else _g(value)
        out.write(f"{name:<8} {formula:<{width}}  {text}\n")
    if table.divergent:
        out.write("verdict: E(R^d) infinite: no subcritical phase for any lambda\n")
    else:
        out.write(f"verdict: no percolation certified for lambda < {_g(table.lambda0)}\n")
    return 0


def cmd_scan(cfg: RunConfig, out: Output, workers: int) -> int:
    params = cfg.params()
    base = sorted(set(cfg.alpha_grid))
    scales = sorted(set(base) | {10 * a for a in base})
    common = dict(tol=cfg.tol, allow_divergent=cfg.allow_divergent, hitting=cfg.hitting,
                  workers=workers)
    rcut = cfg.rcut[0] if cfg.rcut else None
    pi, mreach, rows = {}, {}, []
    for a in scales:
        pi[a] = estimate_event(params, EventSpec("G", a), cfg.n, cfg.seed, **common)
        rows.append(pi[a])
    for a in base:
        window = Window(cfg.L) if cfg.L is not None else None
        for kind in ("H", "Htilde", "MReach"):
            spec = EventSpec(kind, a)
            est = estimate_event(params, spec, cfg.n, cfg.seed, r_cut=rcut,
                                 window=window if kind != "Htilde" else None, **common)
            rows.append(est)
            if kind == "MReach":
                mreach[a] = est
    out.write(cfg.provenance() + "\n")
    out.write(rows[0].CSV_HEADER + "\n")
    for est in rows:
        out.write(est.csv_row() + "\n")
    table = bounds.compute_constants(cfg.d, params.law)
    report = bounds.audit_prop31(pi, mreach, table, params)
    out.side_file(".audit.json", _json(report))
    return 0 if report["passed"] else EXIT_AUDIT


def cmd_tail(cfg: RunConfig, out: Output, workers: int) -> int:
    params = cfg.params()
    window = _window(cfg, 10.0)
    rcut = _single_rcut(cfg, params, window)
    rows = sample_cluster_statistics(params, window, rcut, cfg.n, cfg.seed, hitting=cfg.hitting,
                                     workers=workers)
    out.write(cfg.provenance() + "\n")
    out.write(ClusterSummary.CSV_HEADER + "\n")
    for row in rows:
        out.write(row.csv_row() + "\n")
    censored = sum(r.boundary_hit for r in rows) / len(rows) if rows else 0.0
    report = {"censored_fraction": censored, "r_cut": rcut,
              "policy": "censored values kept as lower bounds"}
    status = 0
    for name in ("M", "D"):
        try:
            report[name] = fit_tail_exponent([getattr(r, name) for r in rows], cfg.k).as_dict()
        except InsufficientSamples as exc:
            report[name] = {"error": f"insufficient positive samples: {exc}"}
            status = EXIT_HYPOTHESIS
    out.side_file(".fit.json", _json(report))
    return status


def cmd_propagate(cfg: RunConfig, out: Output, workers: int) -> int:
    if cfg.synthetic_g0:
        chain = bounds.propagate_lemma37(0.5, lambda a: 0.0, cfg.n_steps, cfg.s, "synthetic")
    else:
        params = cfg.params()
        table = bounds.compute_constants(cfg.d, params.law)
        estimates = None
        if cfg.base == "monte_carlo":
            if table.divergent:
                raise bounds.HypothesisViolation("E(R^d) is infinite")
            estimates = [estimate_event(params, EventSpec("G", table.A * x), cfg.n, cfg.seed,
                                        workers=workers) for x in (1.0, 2.0, 5.0, 10.0)]
        elif cfg.base != "analytic":
            raise ConfigError("base must be 'analytic' or 'monte_carlo'")
        chain = bounds.subcritical_chain(table, params, cfg.n_steps, cfg.s, estimates)
    report = chain.as_dict()
    report["decreasing"] = chain.decreasing()
    out.write(_json(report))
    return 0


def cmd_coverage(cfg: RunConfig, out: Output, workers: int) -> int:
    params = cfg.params()
    out.write(cfg.provenance() + "\n")
    out.write("rcut,rho,exact,bound12,p_hat,ci_low,ci_high,trunc_bias,bound_ok,mc_ok\n")
    rcuts = cfg.rcut or [None]
    status = 0
    for rc in rcuts:
        for rho in cfg.rho_grid:
            exact = bounds.covered_ball_probability(params, rho)
            low = bounds.coverage_lower_bound_12(params, rho)
            est = estimate_event(params, EventSpec("Cover", threshold=rho), cfg.n, cfg.seed,
                                 r_cut=rc, tol=cfg.tol, allow_divergent=cfg.allow_divergent,
                                 hitting=True, workers=workers,
                                 window=Window(cfg.L) if cfg.L is not None else None)
            ok_bound = exact >= low
            ok_mc = abs(exact - est.p_hat) <= 3 * est.half_width + est.trunc_bias_bound
            rc_text = "auto" if rc is None else _g(rc)
            out.write(f"{rc_text},{_g(rho)},{_g(exact)},{_g(low)},{_g(est.p_hat)},{_g(est.ci_low)},"
                      f"{_g(est.ci_high)},{_g(est.trunc_bias_bound)},"
                      f"{'PASS' if ok_bound else 'FAIL'},{'PASS' if ok_mc else 'FAIL'}\n")
            if not ok_bound:
                status = EXIT_AUDIT
    return status


def cmd_simulate(cfg: RunConfig, out: Output, workers: int) -> int:
    params = cfg.params()
    window = _window(cfg, 10.0)
    real = sample_realization(params, window, _single_rcut(cfg, params, window), cfg.seed,
                              hitting=cfg.hitting)
    out.write(dump_realization(real))
    return 0


def cmd_cluster(cfg: RunConfig, out: Output, workers: int) -> int:
    params = cfg.params()
    window = _window(cfg, 10.0)
    real = sample_realization(params, window, _single_rcut(cfg, params, window), cfg.seed,
                              hitting=cfg.hitting)
    out.write(ClusterSummary.CSV_HEADER + "\n" + cluster_stats(real).csv_row() + "\n")
    return 0


COMMANDS = {
    "constants": cmd_constants,
    "scan": cmd_scan,
    "tail": cmd_tail,
    "propagate": cmd_propagate,
    "coverage": cmd_coverage,
    "simulate": cmd_simulate,
    "cluster": cmd_cluster,
}


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    out = Output(args.out)
    try:
        cfg = load_config(args)
        cfg.params()
        status = COMMANDS[args.command](cfg, out, args.workers)
    except (ConfigError, LawSpecError, OSError) as exc:
        print(f"boolperc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ToleranceError, bounds.HypothesisViolation, MemoryBudgetError) as exc:
        out.flush()
        print(f"boolperc: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ValueError as exc:
        print(f"boolperc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out.flush()
    return status


if __name__ == "__main__":
    sys.exit(main())
