"""``simlab`` command line.

Every leaf command accepts ``--seed``, ``--out``, ``--format``, ``--reps`` and
``--quiet``. Replication ``r`` always draws from substream ``r`` of the root
seed, so outputs are byte-identical for a fixed command line. CSV outputs get
a ``<out>.meta.json`` sidecar carrying seed, version, command and parameters;
JSON outputs embed the same block under ``"meta"``.
"""
from __future__ import annotations

import argparse
import csv
import inspect
import io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__, markov, mcmc, montecarlo, processes, samplers, scenarios, ssa
from .errors import ConfigError, SimlabError
from .montecarlo import EstimateReport
from .rng import RandomStream

_U64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# output


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def write_table(path, fmt: str, meta: dict, columns, rows) -> None:
    """Write ``rows`` as CSV (plus a meta sidecar) or as one JSON document."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            doc = {"meta": _jsonable(meta), "columns": list(columns), "rows": _jsonable([list(r) for r in rows])}
            path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
            return
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(v) for v in r])
        path.write_text(buf.getvalue())
        Path(str(path) + ".meta.json").write_text(json.dumps(_jsonable(meta), indent=1, sort_keys=True) + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def histogram_rows(values, bins: int):
    """Equal-width bins over ``[min, max]`` as ``(left, right, count)`` rows."""
    if bins < 1:
        raise ConfigError(f"--hist needs at least one bin, got {bins}")
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins=bins)
    return [(edges[i], edges[i + 1], int(c)) for i, c in enumerate(counts)]


def _hist_path(out) -> Path:
    p = Path(out)
    return p.with_name(p.stem + ".hist" + p.suffix)


class _Ctx:
    """Per-invocation state: root stream, meta block and stdout control."""

    def __init__(self, args, command: str, params: dict):
        if not 0 <= args.seed <= _U64:
            raise ConfigError(f"--seed must be in [0, 2^64), got {args.seed}")
        if args.reps < 1:
            raise ConfigError(f"--reps must be >= 1, got {args.reps}")
        self.args = args
        self.root = RandomStream(args.seed)
        self.meta = {"seed": args.seed, "version": __version__, "command": command, "parameters": params}

    def stream(self, r: int):
        return self.root.spawn(r)

    def say(self, line: str) -> None:
        if not self.args.quiet:
            print(line)

    def write(self, columns, rows, path=None) -> None:
        path = path or self.args.out
        if path:
            write_table(path, self.args.format, self.meta, columns, rows)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return str(v)


def _summary_line(**kv) -> str:
    return " ".join(f"{k}={_fmt(v)}" for k, v in kv.items())


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


# a comma only separates pairs when a new ``key=`` follows, so JSON lists survive
_PAIR_SEP = re.compile(r",(?=\s*[A-Za-z_]\w*\s*=)")


def parse_params(items, defaults: dict | None = None) -> dict:
    """Merge ``k=v`` items (comma lists allowed) over ``defaults``; unknown keys are rejected."""
    out = dict(defaults or {})
    for item in items or []:
        for kv in _PAIR_SEP.split(item):
            if not kv:
                continue
            if "=" not in kv:
                raise ConfigError(f"parameter {kv!r} is not of the form key=value")
            k, v = kv.split("=", 1)
            k = k.strip()
            if defaults is not None and k not in defaults:
                raise ConfigError(f"unknown parameter {k!r}; known: {sorted(defaults)}")
            out[k] = _parse_value(v.strip())
    return out


# ---------------------------------------------------------------------------
# run


def _result_columns(extras: dict) -> list:
    return ["rep", "estimate", "std", "half_width", "n", "level", "exact", *extras]


def cmd_run(args) -> int:
    name = args.scenario
    if name not in scenarios.SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; known scenarios: {', '.join(sorted(scenarios.SCENARIOS))}")
    fn, defaults, _ = scenarios.SCENARIOS[name]
    params = parse_params(args.params, defaults)
    if args.board:
        if "board" not in defaults:
            raise ConfigError("--board only applies to snakes_ladders")
        params["board"] = args.board
    if args.level is not None:
        params["level"] = args.level
    ctx = _Ctx(args, "run", {"scenario": name, "n": args.n, "reps": args.reps, **params})
    results = [fn(params, args.n, ctx.stream(r)) for r in range(args.reps)]
    rows = [{"rep": r, **res.summary_row()} for r, res in enumerate(results)]
    columns = _result_columns(results[0].extras)
    ctx.write(columns, [[row.get(c, "") for c in columns] for row in rows])
    if args.detail and results[0].columns:
        ctx.write(results[0].columns, results[0].table, args.detail)
    for row in rows:
        kv = {"scenario": name, "rep": row["rep"], "estimate": row["estimate"], "half_width": row["half_width"], "n": row["n"], "seed": args.seed}
        kv.update({k: row[k] for k in results[0].extras})
        ctx.say(_summary_line(**kv))
    return 0


def cmd_list(args) -> int:
    for name, (_, defaults, desc) in sorted(scenarios.SCENARIOS.items()):
        print(f"{name}: {desc} {json.dumps(defaults, sort_keys=True)}")
    return 0


# ---------------------------------------------------------------------------
# sample

_DISTS = {
    "uniform": ({"a": 0.0, "b": 1.0}, lambda p, s, n: p["a"] + (p["b"] - p["a"]) * s.uniforms(n)),
    "bernoulli": ({"p": 0.5}, lambda p, s, n: samplers.sample_bernoulli(p["p"], s, size=n)),
    "binomial": ({"n": 10, "p": 0.5}, lambda p, s, n: samplers.sample_binomial(int(p["n"]), p["p"], s, size=n)),
    "binomial_normal": ({"n": 100, "p": 0.5}, lambda p, s, n: samplers.sample_binomial_normal_approx(int(p["n"]), p["p"], s, size=n)),
    "poisson": ({"lam": 1.0}, lambda p, s, n: samplers.sample_poisson(p["lam"], s, size=n)),
    "exponential": ({"lam": 1.0}, lambda p, s, n: samplers.sample_exponential(p["lam"], s, size=n)),
    "weibull": ({"alpha": 2.0, "lam": 1.0}, lambda p, s, n: samplers.sample_inverse_transform(samplers.weibull_inverse(p["alpha"], p["lam"]), s, size=n)),
    "sine": ({}, lambda p, s, n: samplers.sample_inverse_transform(samplers.sine_inverse(), s, size=n)),
    "linear": ({}, lambda p, s, n: samplers.sample_inverse_transform(samplers.linear_density_inverse(), s, size=n)),
    "linear_ar": ({}, lambda p, s, n: samplers.sample_accept_reject(samplers.linear_density_envelope(), s, size=n)),
    "beta_a1": ({"alpha": 2.0}, lambda p, s, n: samplers.sample_inverse_transform(samplers.beta_a1_inverse(p["alpha"]), s, size=n)),
    "beta_1b": ({"beta": 2.0}, lambda p, s, n: samplers.sample_inverse_transform(samplers.beta_1b_inverse(p["beta"]), s, size=n)),
    "semicircle": ({"radius": 1.0}, lambda p, s, n: samplers.sample_accept_reject(samplers.semicircle_envelope(p["radius"]), s, size=n)),
    "normal": ({"mean": 0.0, "std": 1.0}, lambda p, s, n: p["mean"] + p["std"] * samplers.standard_normals(n, s)),
    "normal_ar": ({"mean": 0.0, "std": 1.0}, lambda p, s, n: p["mean"] + p["std"] * samplers.sample_normal_ar(s, size=n)),
    "exp_min": ({"lam": 1.0, "k": 5}, lambda p, s, n: samplers.sample_ordered_statistic(samplers.exponential_inverse(p["lam"]), int(p["k"]), "min", s, size=n)),
    "exp_max": ({"lam": 1.0, "k": 5}, lambda p, s, n: samplers.sample_ordered_statistic(samplers.exponential_inverse(p["lam"]), int(p["k"]), "max", s, size=n)),
}


def cmd_sample(args) -> int:
    if args.dist not in _DISTS:
        raise ConfigError(f"unknown distribution {args.dist!r}; known: {', '.join(sorted(_DISTS))}")
    defaults, draw = _DISTS[args.dist]
    params = parse_params(args.params, defaults)
    ctx = _Ctx(args, "sample", {"dist": args.dist, "n": args.n, "reps": args.reps, **params})
    draws = [np.asarray(draw(params, ctx.stream(r), args.n)) for r in range(args.reps)]
    rows = [(r, v) for r, d in enumerate(draws) for v in d.tolist()]
    ctx.write(("rep", "value"), rows)
    if args.hist and args.out:
        ctx.write(("bin_left", "bin_right", "count"), histogram_rows(np.concatenate(draws), args.hist), _hist_path(args.out))
    for r, d in enumerate(draws):
        rep = EstimateReport.from_values(d, args.level or 0.95)
        ctx.say(_summary_line(dist=args.dist, rep=r, mean=rep.mean, std=rep.std, half_width=rep.half_width, n=rep.n, seed=args.seed))
    return 0


# ---------------------------------------------------------------------------
# integrate


def cmd_integrate(args) -> int:
    name = args.scenario
    if name not in scenarios.INTEGRATION_SCENARIOS:
        raise ConfigError(f"unknown integration scenario {name!r}; known: {', '.join(scenarios.INTEGRATION_SCENARIOS)}")
    fn, defaults, _ = scenarios.SCENARIOS[name]
    params = parse_params(args.params, defaults)
    params["level"] = args.level or 0.95
    ctx = _Ctx(args, "integrate", {"scenario": name, "n": args.n, "reps": args.reps, **params})
    results = [fn(params, args.n, ctx.stream(r)) for r in range(args.reps)]
    rows = [(r, x.report.mean, x.report.std, x.report.half_width, x.report.n, x.report.level, "" if x.exact is None else x.exact) for r, x in enumerate(results)]
    ctx.write(("rep", "mean", "std", "half_width", "n", "level", "exact"), rows)
    for r, x in enumerate(results):
        ctx.say(_summary_line(scenario=name, rep=r, mean=x.report.mean, s_N=x.report.std, half_width=x.report.half_width, n=x.report.n, seed=args.seed))
    if args.reps > 1:
        pooled = montecarlo.pool_reports([x.report for x in results])
        ctx.say(_summary_line(scenario=name, rep="pooled", mean=pooled.mean, s_N=pooled.std, half_width=pooled.half_width, n=pooled.n, seed=args.seed))
    return 0


# ---------------------------------------------------------------------------
# markov


def _chain(args) -> markov.ChainSpec:
    if args.chain in scenarios.CHAINS:
        return scenarios.CHAINS[args.chain]
    return markov.load_chain(args.chain)


def cmd_markov(args) -> int:
    spec = _chain(args)
    P = spec.matrix
    ctx = _Ctx(args, f"markov {args.action}", {"chain": spec.to_json(), **{k: getattr(args, k) for k in ("steps", "horizon", "predicate", "target", "n") if hasattr(args, k)}})
    if args.action == "classify":
        c = markov.classify(P)
        rows = [(i, " ".join(P.labels[j] for j in cls), "" if d is None else d, int(cl)) for i, (cls, d, cl) in enumerate(zip(c.classes, c.periods, c.closed))]
        ctx.write(("class", "states", "period", "closed"), rows)
        ctx.say(_summary_line(classes=len(c.classes), irreducible=c.irreducible, aperiodic=c.aperiodic, ergodic=c.ergodic))
        for i, states, period, closed in rows:
            ctx.say(_summary_line(**{"class": i, "states": states.replace(" ", ","), "period": period, "closed": closed}))
        return 0
    if args.action == "stationary":
        c = markov.classify(P)
        if not c.ergodic:
            groups = "; ".join("{" + " ".join(P.labels[j] for j in cls) + f"}} period={d}" for cls, d in zip(c.classes, c.periods))
            ctx.say(f"classes: {groups}")
        pi = markov.stationary_distribution(P)
        ctx.write(("state", "probability"), list(zip(P.labels, pi.tolist())))
        for lab, v in zip(P.labels, pi):
            ctx.say(_summary_line(state=lab, probability=v))
        return 0
    if args.action == "simulate":
        if args.steps < 1:
            raise ConfigError("--steps must be >= 1")
        paths = markov.generate_chains(spec.pi0, P, args.steps + 1, args.reps, ctx.root)
        rows = [(r, t, P.labels[s]) for r, path in enumerate(paths) for t, s in enumerate(path.tolist())]
        ctx.write(("path", "step", "state"), rows)
        for r, path in enumerate(paths):
            ctx.say(_summary_line(path=r, final=P.labels[path[-1]]))
        return 0
    # event
    j = P.index(args.target)
    preds = {
        "final": lambda path: path[-1] == j,
        "ever": lambda path: bool(np.any(path[1:] == j)),
        "never": lambda path: not np.any(path[1:] == j),
    }
    if args.predicate not in preds:
        raise ConfigError(f"unknown predicate {args.predicate!r}; known: {', '.join(preds)}")
    reports = [markov.estimate_chain_event(spec.pi0, P, args.horizon, preds[args.predicate], args.n, ctx.stream(r), args.level or 0.95) for r in range(args.reps)]
    exact = float((spec.pi0 @ markov.n_step_matrix(P, args.horizon).P)[j]) if args.predicate == "final" else ""
    ctx.write(("rep", "estimate", "std", "half_width", "n", "exact"), [(r, x.mean, x.std, x.half_width, x.n, exact) for r, x in enumerate(reports)])
    for r, x in enumerate(reports):
        ctx.say(_summary_line(predicate=args.predicate, target=args.target, rep=r, estimate=x.mean, half_width=x.half_width, n=x.n, seed=args.seed, exact=exact))
    return 0


# ---------------------------------------------------------------------------
# process


def _diffusion_coeffs(model: str, p: dict):
    if model == "gbm":
        return (lambda t, x: p["mu"] * x), (lambda t, x: p["sigma"] * x)
    if model == "ou":
        return (lambda t, x: p["theta"] * (p["mu"] - x)), (lambda t, x: p["sigma"] + 0.0 * x)
    if model == "bm":
        return (lambda t, x: p["mu"] + 0.0 * x), (lambda t, x: p["sigma"] + 0.0 * x)
    raise ConfigError(f"unknown diffusion model {model!r}; known: gbm, ou, bm")


def _trajectory_rows(traj, path=None):
    cols = ["time", *(f"x{i + 1}" for i in range(traj.dim))]
    rows = [[t, *s] for t, s in zip(traj.times.tolist(), traj.states.tolist())]
    if path is not None:
        cols = ["path", *cols]
        rows = [[path, *r] for r in rows]
    return cols, rows


def _ensemble_output(ctx, trajs, label: str):
    """One trajectory writes its rows; an ensemble writes a row per path plus an aggregate line."""
    if len(trajs) == 1:
        ctx.write(*_trajectory_rows(trajs[0]))
        ctx.say(_summary_line(process=label, final=" ".join(_fmt(v) for v in trajs[0].final), seed=ctx.args.seed))
        return
    finals = np.array([t.final for t in trajs], dtype=float)
    cols = ["path", *(f"x{i + 1}_final" for i in range(finals.shape[1]))]
    ctx.write(cols, [[r, *f] for r, f in enumerate(finals.tolist())])
    rep = EstimateReport.from_values(finals[:, 0], ctx.args.level or 0.95)
    ctx.say(_summary_line(process=label, paths=len(trajs), mean_x1=rep.mean, half_width=rep.half_width, var_x1=float(finals[:, 0].var(ddof=1)), seed=ctx.args.seed))


def cmd_process(args) -> int:
    kind = args.kind
    level = args.level or 0.95
    if kind == "walk":
        params = {"p": args.p, "steps": args.steps, "x0": args.x0}
        ctx = _Ctx(args, "process walk", params)
        spec = processes.WalkSpec(args.p, args.steps, args.x0)
        _ensemble_output(ctx, [processes.random_walk(spec, ctx.stream(r)) for r in range(args.reps)], "walk")
        return 0
    if kind == "wiener":
        params = {"dim": args.dim, "t_end": args.t_end, "dt": args.dt}
        ctx = _Ctx(args, "process wiener", params)
        times = processes.time_grid(0.0, args.t_end, args.dt)
        _ensemble_output(ctx, [processes.wiener_path(times, args.dim, ctx.stream(r)) for r in range(args.reps)], "wiener")
        return 0
    if kind == "diffusion":
        p = parse_params(args.params, {"mu": 0.04, "sigma": 0.3, "theta": 1.0})
        params = {"model": args.model, "x0": args.x0, "t_end": args.t_end, "dt": args.dt, **p}
        ctx = _Ctx(args, "process diffusion", params)
        a, b = _diffusion_coeffs(args.model, p)
        spec = processes.DiffusionSpec(a, b, (0.0, args.t_end), args.dt, float(args.x0))
        _ensemble_output(ctx, [processes.euler_maruyama(spec, ctx.stream(r)) for r in range(args.reps)], args.model)
        return 0
    if kind == "ruin":
        params = {"K": args.K, "T": args.T, "p": args.p, "n": args.n}
        ctx = _Ctx(args, "process ruin", params)
        exact = processes.ruin_probability_exact(args.K, args.T, args.p)
        rows = []
        for r in range(args.reps):
            ruined, dur = processes.absorbing_walk(args.K, args.T, args.p, args.n, ctx.stream(r))
            rep = EstimateReport.from_values(ruined.astype(float), level)
            rows.extend((r, i, int(a), int(d)) for i, (a, d) in enumerate(zip(ruined.tolist(), dur.tolist())))
            ctx.say(_summary_line(process="ruin", rep=r, estimate=rep.mean, half_width=rep.half_width, n=rep.n, exact=exact, mean_duration=float(np.mean(dur)), seed=args.seed))
        ctx.write(("rep", "path", "ruined", "duration"), rows)
        return 0
    if kind == "hitting":
        params = {"dim": args.dim, "half_width": args.half_width, "dt": args.dt, "n": args.n}
        ctx = _Ctx(args, "process hitting", params)
        reports = [processes.hitting_time_box(args.dim, args.half_width, args.dt, args.n, ctx.stream(r), level) for r in range(args.reps)]
    else:
        params = {"S0": args.S0, "K": args.K, "r": args.r, "sigma": args.sigma, "T": args.T, "dt": args.dt, "n": args.n}
        ctx = _Ctx(args, "process option", params)
        reports = [processes.price_european_call(args.S0, args.K, args.r, args.sigma, args.T, args.dt, args.n, ctx.stream(r), level) for r in range(args.reps)]
    ctx.write(("rep", "estimate", "std", "half_width", "n"), [(r, x.mean, x.std, x.half_width, x.n) for r, x in enumerate(reports)])
    for r, x in enumerate(reports):
        ctx.say(_summary_line(process=kind, rep=r, estimate=x.mean, half_width=x.half_width, n=x.n, seed=args.seed))
    return 0


# ---------------------------------------------------------------------------
# ssa


def _model(args):
    if args.model in ssa.MODELS:
        ctor, initial, t_final = ssa.MODELS[args.model]
        defaults = {k: v.default for k, v in inspect.signature(ctor).parameters.items()}
        params = parse_params(args.params, defaults)
        return ctor(**params), np.asarray(initial, dtype=np.int64), t_final, params
    if args.params:
        raise ConfigError("--params applies to built-in models only; edit the model file instead")
    mf = ssa.load_model(args.model)
    return mf.system, mf.initial, mf.t_final, {"file": args.model}


def cmd_ssa(args) -> int:
    system, initial, t_final, params = _model(args)
    if args.initial:
        initial = np.asarray([int(v) for v in args.initial.split(",")], dtype=np.int64)
    if args.tfinal is not None:
        t_final = args.tfinal
    if t_final is None:
        raise ConfigError("no final time: pass --tfinal or set t_final in the model file")
    meta = {"model": args.model, "initial": initial.tolist(), "t_final": t_final, "grid": args.grid, **params}
    species = list(system.species)
    if args.action == "ode":
        ctx = _Ctx(args, "ssa ode", {**meta, "dt": args.dt})
        traj = ssa.run_deterministic(ssa.mean_field(system), initial, (0.0, t_final), args.dt)
        ctx.write(["time", *species], [[t, *y] for t, y in zip(traj.times.tolist(), traj.states.tolist())])
        ctx.say(_summary_line(model=args.model, **dict(zip(species, traj.final.tolist()))))
        return 0
    if args.action == "tau-leap":
        meta["tau"] = args.tau
    ctx = _Ctx(args, f"ssa {args.action}", meta)
    grid = None if args.grid is None else processes.time_grid(0.0, t_final, args.grid)
    rows = []
    for r in range(args.reps):
        clamps = ""
        if args.action == "tau-leap":
            res = ssa.run_tau_leap(system, initial, t_final, args.tau, ctx.stream(r))
            traj, clamps = res.trajectory, res.clamp_count
        else:
            traj = ssa.run_ssa(system, initial, t_final, ctx.stream(r))
        if grid is None:
            rows.extend([r, t, *(int(v) for v in s)] for t, s in zip(traj.times.tolist(), traj.states.tolist()))
        else:
            rows.extend([r, t, *(int(v) for v in s)] for t, s in zip(grid.tolist(), ssa.resample_to_grid(traj, grid).tolist()))
        ctx.say(_summary_line(model=args.model, rep=r, events=len(traj.times) - 1, clamped=clamps, **dict(zip(species, (int(v) for v in traj.final))), seed=args.seed))
    ctx.write(["rep", "time", *species], rows)
    return 0


# ---------------------------------------------------------------------------
# mcmc


def cmd_mcmc(args) -> int:
    study = mcmc.load_study(args.study)
    ctx = _Ctx(args, "mcmc run", {"study": study.raw})
    level = args.level or 0.95
    cols = ["rep", "draw", *study.params]
    rows, summaries = [], []
    for r in range(args.reps):
        post = mcmc.run_study(study, ctx.stream(r), level)
        kept = post.run.kept
        if study.thin:
            kept = kept[:: int(study.thin)]
        rows.extend([r, i, *d] for i, d in enumerate(kept.tolist()))
        summaries.append(post.as_dict(list(study.params)))
        for name, s in zip(study.params, post.summary):
            ctx.say(_summary_line(rep=r, param=name, mean=s.mean, std=s.std, half_width=s.half_width, acceptance=post.run.acceptance_ratio, seed=args.seed))
    ctx.write(cols, rows)
    if args.summary:
        doc = {"meta": _jsonable(ctx.meta), "reps": _jsonable(summaries)}
        try:
            Path(args.summary).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        except OSError as exc:
            raise ConfigError(f"cannot write {args.summary}: {exc}") from exc
    return 0


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=int, default=0, help="root seed, 0 <= seed < 2^64 (default 0)")
    g.add_argument("--out", help="output file")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--reps", type=int, default=1, help="independent replications, one substream each")
    g.add_argument("--quiet", action="store_true", help="suppress the stdout summary")
    g.add_argument("--level", type=float, default=None, help="confidence level (default 0.95)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="simlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"simlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run a named scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--params", action="append", help="key=value overrides, comma separated")
    p.add_argument("--n", type=int, default=None, help="sample size (scenario default otherwise)")
    p.add_argument("--board", help="board JSON for snakes_ladders")
    p.add_argument("--detail", help="write the scenario's detail table (first replication) here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("list", help="list scenarios and their default parameters")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("sample", parents=[common], help="draw variates")
    p.add_argument("--dist", required=True, help=", ".join(sorted(_DISTS)))
    p.add_argument("--params", action="append")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--hist", type=int, nargs="?", const=30, default=None, metavar="B", help="also write a B-bin histogram next to --out (30 bins if B is omitted)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("integrate", parents=[common], help="Monte Carlo integration scenarios")
    p.add_argument("--scenario", required=True)
    p.add_argument("--params", action="append")
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_integrate)

    m = sub.add_parser("markov", help="finite Markov chains").add_subparsers(dest="action", required=True)
    chain_help = f"chain JSON file or built-in name ({', '.join(scenarios.CHAINS)})"
    for action in ("stationary", "classify", "simulate", "event"):
        p = m.add_parser(action, parents=[common])
        p.add_argument("--chain", required=True, help=chain_help)
        if action == "simulate":
            p.add_argument("--steps", type=int, default=10)
        if action == "event":
            p.add_argument("--horizon", type=int, required=True)
            p.add_argument("--predicate", default="final", help="final, ever or never")
            p.add_argument("--target", required=True, help="state label")
            p.add_argument("--n", type=int, default=10_000)
        p.set_defaults(func=cmd_markov, action=action)

    pr = sub.add_parser("process", help="random walks, Brownian motion and diffusions").add_subparsers(dest="kind", required=True)
    p = pr.add_parser("walk", parents=[common])
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--x0", type=int, default=0)
    p = pr.add_parser("wiener", parents=[common])
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p = pr.add_parser("diffusion", parents=[common])
    p.add_argument("--model", default="gbm", help="gbm, ou or bm")
    p.add_argument("--params", action="append", help="mu, sigma, theta")
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p = pr.add_parser("ruin", parents=[common])
    p.add_argument("--K", type=int, default=30)
    p.add_argument("--T", type=int, default=100)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--n", type=int, default=10_000)
    p = pr.add_parser("hitting", parents=[common])
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--half-width", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=0.005)
    p.add_argument("--n", type=int, default=10_000)
    p = pr.add_parser("option", parents=[common])
    for flag, val in (("--S0", 102.0), ("--K", 100.0), ("--r", 0.04), ("--sigma", 0.3), ("--T", 0.5), ("--dt", 1e-3)):
        p.add_argument(flag, type=float, default=val)
    p.add_argument("--n", type=int, default=10_000)
    for p in pr.choices.values():
        p.set_defaults(func=cmd_process)

    s = sub.add_parser("ssa", help="stochastic reaction kinetics").add_subparsers(dest="action", required=True)
    for action in ("run", "tau-leap", "ode"):
        p = s.add_parser(action, parents=[common])
        p.add_argument("--model", required=True, help=f"model JSON file or built-in ({', '.join(ssa.MODELS)})")
        p.add_argument("--params", action="append", help="rate overrides for built-in models")
        p.add_argument("--initial", help="comma-separated initial counts")
        p.add_argument("--tfinal", type=float, default=None)
        p.add_argument("--grid", type=float, default=None, help="resample onto a grid with this spacing")
        if action == "tau-leap":
            p.add_argument("--tau", type=float, required=True)
        if action == "ode":
            p.add_argument("--dt", type=float, default=None)
        p.set_defaults(func=cmd_ssa, action=action)

    mc = sub.add_parser("mcmc", help="Metropolis-Hastings posterior sampling").add_subparsers(dest="action", required=True)
    p = mc.add_parser("run", parents=[common])
    p.add_argument("--study", required=True, help="study JSON file")
    p.add_argument("--summary", help="write a posterior summary JSON here")
    p.set_defaults(func=cmd_mcmc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SimlabError as exc:
        print(f"simlab: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
