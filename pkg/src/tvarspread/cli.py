"""Command-line front end: ``tvarspread <mode> [options]``.

Settings come from an optional ``key = value`` config file, overridden by
command-line flags.  Each mode writes plot-ready files; failures exit with
the ``exit_code`` of the raised error class.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .asymptotics import verify_convergence
from .diagnostics import HyperGrid, bayes_factors, diagnose, grid_scores, rank_results
from .exceptions import ConfigError, InvalidArgumentError, TvarSpreadError
from .filter import Hyperparams, PriorSpec, run_filter
from .fls import fls_filter
from .io import (
    TICK_COLUMNS,
    ingest_csv,
    load_checkpoint,
    read_config,
    save_checkpoint,
    tick_rows,
    write_csv,
    write_json,
)
from .monitor import verdict
from .simulate import (
    ScenarioSpec,
    StaticSsSpec,
    TvarSpec,
    b_jump_scenario,
    level_jump_scenario,
    simulate_scenario,
    simulate_static,
    simulate_tvar,
)

MODES = ("simulate", "filter", "monitor", "optimize", "diagnose", "fls", "verify")

DEFAULTS = {
    "m1": "0,0",
    "p1": "1000",
    "n1": "3",
    "d1": "1",
    "gamma": "0.05",
    "phi1": "1",
    "phi2": "1",
    "delta1": "0.98",
    "delta2": "0.98",
    "threshold": "0",
    "rule": "point",
    "mu": "1e6",
    "S1": "0",
    "s1": "0",
    "demean": "false",
    "seed": "0",
    "scenario": "static",
    "T": "3000",
    "A": "0.2",
    "B": "0.25",
    "C": "1",
    "D": "0",
    "jump_tick": "",
    "A_after": "20",
    "B_after": "1",
    "sigma2": "1",
    "k": "",
    "n_jobs": "1",
    "tail_fraction": "0.1",
    "rtol": "0.05",
}


@dataclass
class RunConfig:
    mode: str
    input: str | None
    output: str | None
    prior: PriorSpec
    hyper: Hyperparams
    grid: HyperGrid | None
    gamma: float
    threshold: float
    scenario: object | None
    seed: int
    options: dict = field(default_factory=dict)


def _floats(text, key):
    try:
        return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{key}: cannot parse numbers from {text!r}") from None


def _float(opts, key):
    vals = _floats(opts[key], key)
    if len(vals) != 1:
        raise ConfigError(f"{key}: expected a single number, got {opts[key]!r}")
    return vals[0]


def _bool(opts, key):
    v = str(opts[key]).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {opts[key]!r}")


def _parse_grid(text):
    """``phi1=1;delta2=0.95,0.98,1`` style grid description."""
    out = {}
    for part in str(text).split(";"):
        if not part.strip():
            continue
        if "=" not in part:
            raise ConfigError(f"grid: expected name=values, got {part!r}")
        name, vals = (s.strip() for s in part.split("=", 1))
        if name not in ("phi1", "phi2", "delta1", "delta2"):
            raise ConfigError(f"grid: unknown hyperparameter {name!r}")
        out[name] = tuple(_floats(vals, f"grid {name}"))
    return out


def _prior(opts):
    m1 = _floats(opts["m1"], "m1")
    if "P1" in opts:
        P1 = np.array(_floats(opts["P1"], "P1")).reshape(2, 2)
    else:
        P1 = _float(opts, "p1") * np.eye(2)
    return PriorSpec(m1=np.array(m1), P1=P1, n1=_float(opts, "n1"), d1=_float(opts, "d1"))


def _scenario(opts, seed):
    kind = opts["scenario"]
    T = int(_float(opts, "T"))
    if kind == "static":
        return StaticSsSpec(
            A=_float(opts, "A"), B=_float(opts, "B"), C=_float(opts, "C"), D=_float(opts, "D"),
            x1=_float(opts, "x1") if "x1" in opts else None, T=T, seed=seed,
        )
    if kind == "level_jump":
        tick = int(_float(opts, "jump_tick")) if opts["jump_tick"] else 1500
        return level_jump_scenario(seed, T, tick, _float(opts, "A"), _float(opts, "A_after"), _float(opts, "B"), _float(opts, "sigma2"))
    if kind == "b_jump":
        tick = int(_float(opts, "jump_tick")) if opts["jump_tick"] else 1501
        return b_jump_scenario(seed, T, tick, _float(opts, "A"), _float(opts, "B"), _float(opts, "B_after"), _float(opts, "sigma2"))
    if kind == "tvar":
        V = np.array(_floats(opts.get("V", "0,0,0,0"), "V")).reshape(2, 2)
        return TvarSpec(
            hyper=_hyper(opts), V=V, sigma2=_float(opts, "sigma2"),
            theta1=np.array([_float(opts, "A"), _float(opts, "B")]),
            y1=_float(opts, "y1") if "y1" in opts else 0.0, T=T, seed=seed,
        )
    raise ConfigError(f"scenario must be static, level_jump, b_jump or tvar, got {kind!r}")


def _hyper(opts):
    return Hyperparams(_float(opts, "phi1"), _float(opts, "phi2"), _float(opts, "delta1"), _float(opts, "delta2"))


def build_config(mode, file_opts=None, overrides=None) -> RunConfig:
    """Merge defaults, config-file values and flag overrides into a RunConfig."""
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    opts = dict(DEFAULTS)
    opts.update(file_opts or {})
    opts.update({k: v for k, v in (overrides or {}).items() if v is not None})
    seed = int(_float(opts, "seed"))
    hyper = _hyper(opts)
    grid = None
    if mode == "optimize":
        spec = {name: (getattr(hyper, name),) for name in ("phi1", "phi2", "delta1", "delta2")}
        for name in spec:
            if f"grid_{name}" in opts:
                spec[name] = tuple(_floats(opts[f"grid_{name}"], f"grid_{name}"))
        if "grid" in opts:
            spec.update(_parse_grid(opts["grid"]))
        enforce = _bool(opts, "enforce_constraint") if "enforce_constraint" in opts else True
        grid = HyperGrid(**spec, enforce_constraint=enforce)
    scenario = _scenario(opts, seed) if mode == "simulate" else None
    if mode != "simulate" and not opts.get("input"):
        raise ConfigError(f"mode {mode} needs an input file")
    if not opts.get("output"):
        raise ConfigError(f"mode {mode} needs an output path")
    gamma = _float(opts, "gamma")
    if not 0.0 < gamma < 1.0:
        raise InvalidArgumentError(f"gamma must lie in (0, 1), got {gamma}")
    return RunConfig(
        mode=mode,
        input=opts.get("input"),
        output=opts.get("output"),
        prior=_prior(opts),
        hyper=hyper,
        grid=grid,
        gamma=gamma,
        threshold=_float(opts, "threshold"),
        scenario=scenario,
        seed=seed,
        options=opts,
    )


def _summary_path(output):
    p = Path(output)
    return str(p.with_name(p.stem + ".summary.json"))


def _spread_from_input(cfg, series):
    if not series.is_pair:
        return series.y, series.labels
    opts = cfg.options
    ticks = fls_filter(series.p1, series.p2, mu=_float(opts, "mu"), S1=_float(opts, "S1"), s1=_float(opts, "s1"), demean=_bool(opts, "demean"))
    labels = series.labels[len(series.labels) - len(ticks):]
    return np.array([tk.y for tk in ticks]), labels


def _run_simulate(cfg):
    spec = cfg.scenario
    if isinstance(spec, StaticSsSpec):
        x, y = simulate_static(spec)
        rows = [(t, xv, yv) for t, (xv, yv) in enumerate(zip(x, y), start=1)]
        write_csv(cfg.output, ("t", "x", "y"), rows)
    elif isinstance(spec, ScenarioSpec):
        y = simulate_scenario(spec)
        write_csv(cfg.output, ("t", "y"), [(t, v) for t, v in enumerate(y, start=1)])
    else:
        theta, y = simulate_tvar(spec)
        rows = [(t, v, a, b) for t, (v, (a, b)) in enumerate(zip(y, theta), start=1)]
        write_csv(cfg.output, ("t", "y", "A", "B"), rows)


def _run_filter(cfg, monitor):
    series = ingest_csv(cfg.input)
    if series.is_pair and not monitor:
        raise ConfigError("filter mode expects a (date, y) file; use monitor or fls for price pairs")
    y, labels = _spread_from_input(cfg, series)
    resume = cfg.options.get("resume")
    if resume:
        state, records = run_filter(y, state=load_checkpoint(resume))
        labels = [""] + list(labels)
    else:
        state, records = run_filter(y, cfg.prior, cfg.hyper)
    rows = tick_rows(records, labels, cfg.gamma, cfg.threshold, cfg.options["rule"])
    write_csv(cfg.output, TICK_COLUMNS, (r.values() for r in rows))
    summary = {
        "mode": cfg.mode,
        "ticks": len(records),
        "hyper": cfg.hyper.to_dict() if not resume else state.hyper.to_dict(),
        "final_state": state.to_dict(),
        "final_verdict": verdict(state, cfg.gamma).to_dict(),
    }
    if records:
        rep = diagnose(records)
        summary["msse"] = rep.msse
        summary["log_likelihood"] = rep.log_likelihood
    write_json(_summary_path(cfg.output), summary)
    if cfg.options.get("checkpoint"):
        save_checkpoint(cfg.options["checkpoint"], state)
    if cfg.options.get("records"):
        write_json(cfg.options["records"], [r.to_dict() for r in records])


def _run_optimize(cfg):
    y, _ = _spread_from_input(cfg, ingest_csv(cfg.input))
    k = int(_float(cfg.options, "k")) if cfg.options["k"] else None
    results = rank_results(grid_scores(y, cfg.prior, cfg.grid, k=k, n_jobs=int(_float(cfg.options, "n_jobs"))))
    cols = ("rank", "phi1", "phi2", "delta1", "delta2", "log_likelihood", "aic", "bic", "msse")
    rows = [
        (i, g.hyper.phi1, g.hyper.phi2, g.hyper.delta1, g.hyper.delta2, g.report.log_likelihood, g.report.aic, g.report.bic, g.report.msse)
        for i, g in enumerate(results, start=1)
    ]
    write_csv(cfg.output, cols, rows)


def _run_diagnose(cfg):
    y, _ = _spread_from_input(cfg, ingest_csv(cfg.input))
    k = int(_float(cfg.options, "k")) if cfg.options["k"] else 4
    _, records = run_filter(y, cfg.prior, cfg.hyper)
    payload = diagnose(records, k).to_dict()
    if cfg.options.get("compare"):
        vals = _floats(cfg.options["compare"], "compare")
        if len(vals) != 4:
            raise ConfigError("compare: expected phi1,phi2,delta1,delta2")
        other = Hyperparams(*vals)
        _, records2 = run_filter(y, cfg.prior, other)
        payload["bayes_factors"] = {"against": other.to_dict(), **bayes_factors(records, records2).to_dict()}
    write_json(cfg.output, payload)


def _run_fls(cfg):
    series = ingest_csv(cfg.input)
    if not series.is_pair:
        raise ConfigError("fls mode expects a (date, p1, p2) file")
    opts = cfg.options
    ticks = fls_filter(series.p1, series.p2, mu=_float(opts, "mu"), S1=_float(opts, "S1"), s1=_float(opts, "s1"), demean=_bool(opts, "demean"))
    labels = series.labels
    write_csv(cfg.output, ("t", "date", "p1", "p2", "beta", "y"), ((tk.t, labels[tk.t - 1], tk.p1, tk.p2, tk.beta, tk.y) for tk in ticks))


def _run_verify(cfg):
    y, _ = _spread_from_input(cfg, ingest_csv(cfg.input))
    _, records = run_filter(y, cfg.prior, cfg.hyper)
    rep = verify_convergence(
        records, cfg.hyper, tail_fraction=_float(cfg.options, "tail_fraction"), rtol=_float(cfg.options, "rtol")
    )
    write_json(cfg.output, rep.to_dict())


def run(cfg: RunConfig) -> int:
    """Execute one configured run; returns the process exit status."""
    if cfg.mode == "simulate":
        _run_simulate(cfg)
    elif cfg.mode in ("filter", "monitor"):
        _run_filter(cfg, monitor=cfg.mode == "monitor")
    elif cfg.mode == "optimize":
        _run_optimize(cfg)
    elif cfg.mode == "diagnose":
        _run_diagnose(cfg)
    elif cfg.mode == "fls":
        _run_fls(cfg)
    elif cfg.mode == "verify":
        _run_verify(cfg)
    return 0


def _parser():
    parser = argparse.ArgumentParser(prog="tvarspread", description="Online mean-reversion monitoring of price spreads.")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", help="key = value settings file")
        p.add_argument("--input", help="input CSV")
        p.add_argument("--output", help="output file")
        p.add_argument("--seed", type=int)
        p.add_argument("--gamma", type=float, help="credible intervals have level 1 - gamma")
        for name in ("phi1", "phi2", "delta1", "delta2"):
            p.add_argument(f"--{name}", type=float)
        p.add_argument("--mu", type=float, help="FLS smoothness penalty")
        p.add_argument("--threshold", type=float, help="signal threshold")
        p.add_argument("--grid", help="e.g. 'delta2=0.95,0.98,1;phi2=1'")
        p.add_argument("--scenario", choices=("static", "level_jump", "b_jump", "tvar"))
        p.add_argument("--rule", choices=("point", "conservative"))
        p.add_argument("--checkpoint", help="write the final filter state to this JSON file")
        p.add_argument("--resume", help="continue from a saved filter state")
        p.add_argument("--records", help="write per-tick step records as JSON")
        p.add_argument("--compare", help="diagnose: competing phi1,phi2,delta1,delta2 for Bayes factors")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    overrides = {k: (None if v is None else str(v)) for k, v in vars(args).items() if k not in ("mode", "config")}
    try:
        file_opts = read_config(args.config) if args.config else {}
        cfg = build_config(args.mode, file_opts, overrides)
        return run(cfg)
    except TvarSpreadError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
