"""Batch driver: a-sweeps against the positone limit, threshold estimates
(a2 window, a3 positivity edge, beta1), hypothesis checks, and the `solve`
command line entry point.

Config files are INI-style key = value with sections [problem], [weight],
[grid], [mp], [sweep]; a file without section headers is read as [problem].
Unknown sections or keys are rejected with the offending key path.
"""

import argparse
import configparser
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import radial_core as rc
from .energy import estimate_a1, lower_bound_beta1
from .mountain_pass import MPConfig, find_vtilde, make_bump, mp_solve
from .nonlinearity import (ShiftedNonlinearity, check_f1, check_f2, check_f3,
                           check_f4, critical_exponent, eval_fa,
                           example_nonlinearity, linear_nonlinearity,
                           power_nonlinearity)
from .riesz_potential import decay_constant
from .weight import (check_g1, check_g2, example_weight, sample_on_grid,
                     table_weight)

CSV_HEADER = "a,level,norm_h2,sup_ext,min_value,neg_mass,decay_fit,decay_pred,residual,converged"


@dataclass
class ProblemConfig:
    dim: int = 5
    family: str = "paper_example"
    gamma: float = 2.5
    power: float = 3.0          # exponent for family = "power"


@dataclass
class WeightConfig:
    family: str = "paper_example"
    d: float = 1.0
    r_in: float = 0.5
    r_out: float = 1.0
    table_path: str = ""


@dataclass
class GridConfig:
    n: int = 512
    r_max: float = 20.0


@dataclass
class SweepConfig:
    count: int = 12
    decades: float = 2.0
    a_list: tuple = ()
    warm_start: bool = True
    seed: int = 7


@dataclass
class Config:
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    weight: WeightConfig = field(default_factory=WeightConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    mp: MPConfig = field(default_factory=MPConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)


# keys admitted from files, per section; mp exposes only its public knobs
_SCHEMA = {
    "problem": {"dim": int, "family": str, "gamma": float, "power": float},
    "weight": {"family": str, "d": float, "r_in": float, "r_out": float,
               "table_path": str},
    "grid": {"n": int, "r_max": float},
    "mp": {"path_nodes": int, "tol_res": float, "max_iter": int, "bump": str},
    "sweep": {"count": int, "decades": float, "a_list": tuple,
              "warm_start": bool, "seed": int},
}

_BOOL_TOKENS = {"true": True, "yes": True, "on": True, "1": True,
                "false": False, "no": False, "off": False, "0": False}


def _coerce(path, raw, kind):
    try:
        if kind is bool:
            token = raw.strip().lower()
            if token not in _BOOL_TOKENS:
                raise ValueError("not a boolean")
            return _BOOL_TOKENS[token]
        if kind is tuple:
            raw = raw.strip()
            return tuple(float(x) for x in raw.split(",")) if raw else ()
        return kind(raw)
    except ValueError:
        raise ValueError("%s: cannot parse %r as %s" % (path, raw, kind.__name__))


def parse_config(path):
    """Read and validate a config file; returns a full Config with defaults
    filled in. Raises ValueError with a key path on any schema violation."""
    with open(path) as fh:
        text = fh.read()
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError:
        cp.read_string("[problem]\n" + text)

    cfg = Config()
    sections = {"problem": cfg.problem, "weight": cfg.weight, "grid": cfg.grid,
                "mp": cfg.mp, "sweep": cfg.sweep}
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ValueError("unknown section [%s]" % section)
        for key, raw in cp.items(section):
            if key not in _SCHEMA[section]:
                raise ValueError("%s.%s: unknown key" % (section, key))
            setattr(sections[section], key, _coerce("%s.%s" % (section, key),
                                                    raw, _SCHEMA[section][key]))
    _validate(cfg)
    return cfg


def _validate(cfg):
    if cfg.problem.dim < 5:
        raise ValueError("problem.dim=%d rejected: the problem class needs N >= 5"
                         % cfg.problem.dim)
    two_ss = critical_exponent(cfg.problem.dim)
    if not 2.0 < cfg.problem.gamma < two_ss:
        raise ValueError("problem.gamma=%g must lie in (2, 2**) = (2, %g) for dim=%d"
                         % (cfg.problem.gamma, two_ss, cfg.problem.dim))
    if cfg.problem.family not in ("paper_example", "power", "linear"):
        raise ValueError("problem.family=%r not one of paper_example|power|linear"
                         % cfg.problem.family)
    if cfg.weight.family not in ("paper_example", "custom_table"):
        raise ValueError("weight.family=%r not one of paper_example|custom_table"
                         % cfg.weight.family)
    if cfg.weight.family == "custom_table" and not cfg.weight.table_path:
        raise ValueError("weight.table_path required for custom_table weights")
    if cfg.grid.n < 16:
        raise ValueError("grid.n=%d rejected: need at least 16 nodes" % cfg.grid.n)
    if cfg.grid.r_max <= cfg.weight.r_out:
        raise ValueError("grid.r_max=%g must exceed the weight support r_out=%g"
                         % (cfg.grid.r_max, cfg.weight.r_out))
    if cfg.sweep.count < 1:
        raise ValueError("sweep.count must be >= 1")
    if any(a < 0 for a in cfg.sweep.a_list):
        raise ValueError("sweep.a_list entries must be >= 0")


def build_problem(cfg):
    """(nonlinearity spec, weight spec, grid) from a validated config."""
    p = cfg.problem
    if p.family == "paper_example":
        spec = example_nonlinearity(dim=p.dim, gamma=p.gamma)
    elif p.family == "power":
        spec = power_nonlinearity(p.power, dim=p.dim, gamma=p.gamma)
    else:
        spec = linear_nonlinearity(dim=p.dim, gamma=p.gamma)
    w = cfg.weight
    if w.family == "paper_example":
        weight = example_weight(d=w.d, r_in=w.r_in, r_out=w.r_out, dim=p.dim)
    else:
        tab = np.loadtxt(w.table_path, delimiter=",")
        weight = table_weight(tab[:, 0], tab[:, 1], dim=p.dim)
    grid = rc.make_grid(p.dim, cfg.grid.n, cfg.grid.r_max)
    return spec, weight, grid


@dataclass
class SweepRow:
    a: float
    level: float
    norm_h2: float
    sup_ext: float
    min_value: float
    neg_mass: float
    decay_fit: float
    decay_pred: float
    residual: float
    converged: bool


@dataclass
class SweepReport:
    rows: list
    summary: dict
    config_echo: dict
    profiles: dict        # a -> node values (np.ndarray)
    grid_r: np.ndarray
    geometry: object = None


def _default_a_values(geometry, count, decades):
    a_max = 0.5 * geometry.a1
    if count == 1:
        return [a_max]
    k = np.arange(count)
    return list(a_max * 10.0 ** (-decades * k / (count - 1)))


def _row_from_solution(sol, shifted, weight):
    u = sol.u
    grid = u.grid
    ext = grid.r >= 1.0
    sup_ext = float(np.max(np.abs(u.values[ext])))
    neg_part = np.maximum(-u.values, 0.0)
    neg_mass = rc.integrate(rc.RadialField(grid, neg_part))
    g = sample_on_grid(weight, grid).values
    src = rc.RadialField(grid, g * eval_fa(shifted, u.values))
    fit, pred = decay_constant(u, src)
    return SweepRow(a=sol.a, level=sol.level, norm_h2=rc.h2_norm(u),
                    sup_ext=sup_ext, min_value=float(np.min(u.values)),
                    neg_mass=neg_mass, decay_fit=fit, decay_pred=pred,
                    residual=sol.residual, converged=sol.converged)


def run_sweep(cfg, a_values=None):
    """Solve the shifted problem over a decreasing a-list plus the positone
    limit, warm-starting each solve from the previous solution."""
    spec, weight, grid = build_problem(cfg)
    geometry = estimate_a1(spec, weight, grid, seed=cfg.sweep.seed)
    if a_values is None:
        a_values = list(cfg.sweep.a_list) if cfg.sweep.a_list \
            else _default_a_values(geometry, cfg.sweep.count, cfg.sweep.decades)
    a_desc = sorted({float(a) for a in a_values if a > 0}, reverse=True)
    a_desc.append(0.0)  # positone row always present, always last

    bump = make_bump(grid, cfg.mp.bump, weight, cfg.mp.bump_width)
    rows, profiles, sols = [], {}, {}
    prev = None
    for a in a_desc:
        shifted = ShiftedNonlinearity(spec, a)
        vtilde = find_vtilde(shifted, weight, bump, geometry.rho)
        sol = mp_solve(shifted, weight, grid, cfg.mp, geometry,
                       warm_start=prev if cfg.sweep.warm_start else None,
                       vtilde=vtilde)
        prev = sol.u
        rows.append(_row_from_solution(sol, shifted, weight))
        profiles[a] = sol.u.values.copy()
        sols[a] = sol

    summary = _summarize(rows, profiles, grid, geometry)
    echo = _config_echo(cfg)
    return SweepReport(rows=rows, summary=summary, config_echo=echo,
                       profiles=profiles, grid_r=grid.r.copy(), geometry=geometry)


def _summarize(rows, profiles, grid, geometry):
    ext = grid.r >= 1.0
    u_tilde = profiles.get(0.0)
    pos_rows = [r for r in rows if r.a > 0]
    sup_global = {r.a: float(np.max(np.abs(profiles[r.a]))) for r in rows}

    limit_sup_distance = []
    if u_tilde is not None:
        for r in pos_rows:
            dist = float(np.max(np.abs(profiles[r.a][ext] - u_tilde[ext])))
            limit_sup_distance.append([r.a, dist])

    # a2: largest a whose whole tail (all smaller a, converged) keeps norm_h2
    # within 25% of the positone norm
    a2 = None
    ref = rows[-1].norm_h2 if rows and rows[-1].a == 0.0 else None
    if ref and ref > 0:
        for r in rows:
            if r.a == 0.0 or not r.converged:
                continue
            tail = [q for q in rows if 0.0 < q.a <= r.a and q.converged]
            if tail and all(abs(q.norm_h2 - ref) <= 0.25 * ref for q in tail):
                a2 = r.a
                break

    # a3: largest a with min u >= -tol, provided everything below it agrees
    a3 = None
    tol_of = {r.a: 1e-8 * sup_global[r.a] for r in rows}
    nonneg = {r.a: r.min_value >= -tol_of[r.a] for r in pos_rows if r.converged}
    for r in pos_rows:
        if not r.converged:
            continue
        below = [q for q in pos_rows if q.converged and q.a <= r.a]
        if nonneg[r.a] and all(nonneg[q.a] for q in below):
            a3 = r.a
            break

    # threshold index over descending positive rows: rows above strictly dip
    # negative, rows at/below stay nonnegative; None when the split is dirty
    threshold_index = None
    flags = [nonneg.get(r.a, False) for r in pos_rows]
    for k in range(len(flags) + 1):
        if all(not f for f in flags[:k]) and all(flags[k:]):
            threshold_index = k
            break

    beta1 = lower_bound_beta1([sup_global[r.a] for r in pos_rows]) if pos_rows else None

    return {
        "a1_estimate": float(geometry.a1),
        "beta": float(geometry.beta),
        "rho": float(geometry.rho),
        "b_g": float(geometry.b_g),
        "eps": float(geometry.eps),
        "a2_estimate": a2,
        "a3_estimate": a3,
        "beta1": beta1,
        "threshold_index": threshold_index,
        "limit_sup_distance": limit_sup_distance,
        "sup_norms": [[r.a, sup_global[r.a]] for r in rows],
        "n_rows": len(rows),
        "n_converged": sum(1 for r in rows if r.converged),
    }


def _config_echo(cfg):
    echo = {}
    for name in ("problem", "weight", "grid", "mp", "sweep"):
        sub = dataclasses.asdict(getattr(cfg, name))
        echo[name] = {k: (list(v) if isinstance(v, tuple) else v)
                      for k, v in sub.items()}
    return echo


def _fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    return repr(float(x))


def emit(report, out_dir, fmt="csv+json"):
    """Write rows CSV, summary JSON, and per-a profile CSVs; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []

    csv_path = os.path.join(out_dir, "sweep.csv")
    with open(csv_path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in report.rows:
            fh.write(",".join([
                _fmt(r.a), _fmt(r.level), _fmt(r.norm_h2), _fmt(r.sup_ext),
                _fmt(r.min_value), _fmt(r.neg_mass), _fmt(r.decay_fit),
                _fmt(r.decay_pred), _fmt(r.residual), _fmt(r.converged)]) + "\n")
    paths.append(csv_path)

    json_path = os.path.join(out_dir, "summary.json")
    with open(json_path, "w") as fh:
        json.dump({"summary": report.summary, "config": report.config_echo},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths.append(json_path)

    for i, (a, vals) in enumerate(sorted(report.profiles.items(), reverse=True)):
        prof_path = os.path.join(out_dir, "profile_%02d_a%s.csv" % (i, ("%.6g" % a)))
        with open(prof_path, "w") as fh:
            fh.write("r,u\n")
            for rr, uu in zip(report.grid_r, vals):
                fh.write("%s,%s\n" % (repr(float(rr)), repr(float(uu))))
        paths.append(prof_path)
    return paths


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [float(x) for x in obj.ravel()]
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    return str(obj)


def run_hypothesis_checks(cfg):
    """All (f) and (g) checks for the configured problem; returns reports."""
    spec, weight, _ = build_problem(cfg)
    reports = [check_f1(spec), check_f2(spec), check_f3(spec), check_f4(spec),
               check_g1(weight)]
    for delta in (1.0, critical_exponent(cfg.problem.dim)):
        reports.append(check_g2(weight, delta))
    return reports


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="solve",
        description="Mountain-pass sweeps for the semipositone biharmonic problem")
    ap.add_argument("--config", required=True, help="INI config file")
    ap.add_argument("--out", default=None, help="output directory")
    mode = ap.add_mutually_exclusive_group()
    mode.add_argument("--sweep", action="store_true",
                      help="run the full a-sweep (default action)")
    mode.add_argument("--single-a", type=float, default=None, metavar="A",
                      help="solve a single shift value instead of the sweep")
    ap.add_argument("--check-hypotheses", action="store_true",
                    help="run the (f1)-(f4), (g1), (g2) sample checks")
    args = ap.parse_args(argv)

    try:
        cfg = parse_config(args.config)
    except (OSError, ValueError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    out_dir = args.out or os.environ.get("SEMIPOSITONE_OUT") or "solve_out"
    status = 0

    if args.check_hypotheses:
        os.makedirs(out_dir, exist_ok=True)
        reports = run_hypothesis_checks(cfg)
        blob = {}
        for rep in reports:
            tag = rep.name
            if rep.name == "g2":
                tag = "g2(delta=%g)" % rep.details["delta"]
            print("%-14s %s" % (tag, "PASS" if rep.passed else "FAIL"))
            blob[tag] = {"passed": rep.passed, "details": _jsonable(rep.details)}
        with open(os.path.join(out_dir, "checks.json"), "w") as fh:
            json.dump(blob, fh, indent=2, sort_keys=True)
            fh.write("\n")
        if not all(rep.passed for rep in reports):
            status = 1
        if not (args.sweep or args.single_a is not None):
            return status

    a_values = [args.single_a] if args.single_a is not None else None
    report = run_sweep(cfg, a_values)
    paths = emit(report, out_dir)
    s = report.summary
    print("rows=%d converged=%d a1=%.6g beta=%.6g beta1=%s a2=%s a3=%s"
          % (s["n_rows"], s["n_converged"], s["a1_estimate"], s["beta"],
             s["beta1"], s["a2_estimate"], s["a3_estimate"]))
    for p in paths[:2]:
        print("wrote %s" % p)
    if s["n_converged"] < s["n_rows"]:
        status = max(status, 2)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
