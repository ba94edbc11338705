"""Config-driven experiment runner.

    hoermander-lab <command> [--config cfg.json] [--out dir] [--jobs n] [--seed s]

Every command writes ``<out>/<command>.csv`` (a schema-version comment line,
then a header row) and ``<out>/<command>.json`` with a summary.  Exit codes:
0 ok, 1 a check failed, 2 configuration error, 3 indeterminate numerics.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import sympy as sp

from . import compatibility as cm
from . import heat_solver as hs
from . import interpolation as ip
from . import spaces as spc
from . import traces as tr
from .errors import HoermanderError, IndeterminateError, PreconditionError
from .io import (ConfigError, load_config, parse_index, parse_phi, require, write_csv,
                 write_json)
from .karamata import integral_condition

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INDETERMINATE = 0, 1, 2, 3


@dataclass
class Outcome:
    rows: list
    columns: list
    summary: dict = field(default_factory=dict)
    ok: bool = True
    extra: dict = field(default_factory=dict)      # file name -> JSON payload


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    params: dict
    out: Path
    jobs: int = 1
    seed: int = 0


# --- shared parsing ------------------------------------------------------------------


def _problem(raw, l=1.0, tau=1.0) -> cm.ParabolicProblem1D:
    if raw in (None, "heat-dirichlet", "Dirichlet"):
        return cm.heat_dirichlet(l, tau)
    if raw in ("heat-neumann", "Neumann"):
        return cm.heat_neumann(l, tau)
    if isinstance(raw, dict):
        return cm.ParabolicProblem1D.from_dict(raw)
    raise ConfigError(f"unknown problem {raw!r}")


def _rhs(raw) -> cm.ParabolicRHS:
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("rhs must be an object")
    try:
        if "g" not in raw:
            return cm.heat_rhs(raw.get("f", "0"), raw.get("g0", "0"), raw.get("g1", "0"),
                               raw.get("h", "0"))
        return cm.ParabolicRHS.from_dict(raw)
    except (sp.SympifyError, TypeError, KeyError) as exc:
        raise ConfigError(f"bad rhs: {exc}") from exc


def _heat_spec(raw) -> hs.HeatProblemSpec:
    raw = dict(raw or {})
    try:
        return hs.HeatProblemSpec(**raw)
    except TypeError as exc:
        raise ConfigError(f"bad heat spec: {exc}") from exc


def _grid(raw, default_N, default_L) -> spc.FrequencyGrid:
    raw = raw or {}
    return spc.FrequencyGrid(tuple(raw.get("N", default_N)), tuple(raw.get("L", default_L)))


# --- commands ------------------------------------------------------------------------


def cmd_norm(cfg: dict, jobs: int, seed: int) -> Outcome:
    """Norms of an expression (or the zero field) sampled on a grid."""
    require(cfg, ("field", "grid", "domain", "indices"))
    fld = cfg.get("field", {"zero": True})
    grid = _grid(cfg.get("grid"), (64,), (2 * math.pi,))
    names = fld.get("vars") or (["x"] if grid.dims == 1 else ["x", "t"] if grid.dims == 2
                                else [f"x{i + 1}" for i in range(grid.dims)])
    mesh = grid.mesh()
    if fld.get("zero") or "expr" not in fld:
        vals = np.zeros(grid.N)
    else:
        e = cm.parse_expr(fld["expr"])
        by_name = {str(s_): s_ for s_ in e.free_symbols}
        unknown = set(by_name) - set(names)
        if unknown:
            raise ConfigError(f"field expression uses unknown variables {sorted(unknown)}")
        f = sp.lambdify([by_name.get(n, sp.Symbol(n)) for n in names], e, "numpy")
        vals = np.broadcast_to(np.asarray(f(*mesh), dtype=complex), grid.N).copy()
        if np.all(vals.imag == 0):
            vals = vals.real
    domain = cfg.get("domain", "full")
    rows = []
    for raw in cfg.get("indices", [{"s": 1.0}]):
        idx = parse_index(raw)
        if domain == "full":
            val = spc.norm_full(spc.SampledField(grid, vals), idx)
        elif domain == "plus":
            val = spc.norm_plus(spc.SampledField(grid, vals, spc.HalfLinePlus()), idx)
        else:
            raise ConfigError(f"unknown domain {domain!r}")
        rows.append({"s": idx.s, "gamma": idx.gamma, "phi": idx.phi.label(), "norm": val})
    return Outcome(rows, ["s", "gamma", "phi", "norm"],
                   {"grid": grid.to_dict(), "domain": domain, "n_rows": len(rows)})


def cmd_interp_check(cfg: dict, jobs: int, seed: int) -> Outcome:
    """Multiplier identity sweep, reiteration and direct-sum checks."""
    require(cfg, ("gammas", "phis", "triples", "grid_N", "grid_L", "tol", "reiteration",
                  "direct_sum"))
    gammas = cfg.get("gammas", [1.0, 0.5, 0.25])
    phis = [parse_phi(p) for p in cfg.get("phis", ["1", "multilog:1", "multilog:2"])]
    triples = cfg.get("triples", [[0, 1, 2], [2, 3.25, 4]])
    N = int(cfg.get("grid_N", 64))
    grid = spc.FrequencyGrid((N, N), (cfg.get("grid_L", 2 * math.pi),) * 2)
    tol = float(cfg.get("tol", 1e-12))
    rows = []
    for g in gammas:
        for phi in phis:
            for s0, s, s1 in triples:
                dev = ip.multiplier_identity_check(s0, s, s1, g, phi, grid)
                rows.append({"check": "multiplier", "gamma": g, "phi": phi.label(),
                             "params": f"{s0}/{s}/{s1}", "value": dev, "tol": tol,
                             "pass": dev <= tol})
    rcfg = cfg.get("reiteration", {})
    if rcfg is not None:
        s, eps, delta = rcfg.get("s", 2.0), rcfg.get("eps", 0.5), rcfg.get("delta", 0.5)
        probes = np.geomspace(1.0, 1e12, int(rcfg.get("probes", 1000)))
        for phi in phis:
            dev = reiteration_deviation(s, eps, delta, phi, probes)
            rows.append({"check": "reiteration", "gamma": "", "phi": phi.label(),
                         "params": f"{s}/{eps}/{delta}", "value": dev, "tol": tol,
                         "pass": dev <= tol})
    dcfg = cfg.get("direct_sum", {})
    if dcfg is not None:
        n_fix = int(dcfg.get("fixtures", 100))
        dev = direct_sum_deviation(n_fix, seed, phis)
        dtol = float(dcfg.get("tol", 1e-14))
        rows.append({"check": "direct_sum", "gamma": "", "phi": "all",
                     "params": f"fixtures={n_fix}", "value": dev, "tol": dtol,
                     "pass": dev <= dtol})
    ok = all(r["pass"] for r in rows)
    return Outcome(rows, ["check", "gamma", "phi", "params", "value", "tol", "pass"],
                   {"max_multiplier_deviation": max((r["value"] for r in rows
                                                     if r["check"] == "multiplier"), default=0.0),
                    "all_pass": ok}, ok)


def reiteration_deviation(s, eps, delta, phi, probes) -> float:
    """max relative gap between the composed omega and r^{(s-lo)/w} phi(r^{1/w})."""
    _, _, omega = ip.midpoint_parameters(s, eps, delta, phi)
    lo, hi = s - eps - delta, s + eps + delta
    w = hi - lo
    r = np.asarray(probes, dtype=float)
    exact = r ** ((s - lo) / w) * phi(r ** (1.0 / w))
    return float(np.max(np.abs(omega(r) - exact) / exact))


def direct_sum_deviation(n_fixtures: int, seed: int, phis) -> float:
    """Worst relative gap between the direct-sum norm and the norm on the
    concatenated model over random fixtures."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_fixtures):
        k = int(rng.integers(1, 5))
        models = [ip.HilbertPairModel(tuple(10.0 ** rng.uniform(0, 6, int(rng.integers(1, 9)))))
                  for _ in range(k)]
        vecs = [rng.normal(size=m.dim) for m in models]
        phi = phis[i % len(phis)]
        s0, s1 = 0.0, float(rng.uniform(1.0, 4.0))
        psi = ip.make_interp_param(s0, float(rng.uniform(s0 + 0.1, s1 - 0.1)), s1, phi)
        a = ip.direct_sum_norm(models, psi, vecs)
        b = ip.x_psi_norm(ip.concat_models(models), psi, np.concatenate(vecs))
        worst = max(worst, abs(a - b) / b)
    return worst


def cmd_embed_check(cfg: dict, jobs: int, seed: int) -> Outcome:
    """Integral identity of the embedding theorem and the continuity criterion."""
    require(cfg, ("cases", "phis", "rtol"))
    cases = cfg.get("cases", [{"alpha": [0], "beta": 0, "p": 0},
                              {"alpha": [0], "beta": 0, "p": 1},
                              {"alpha": [1], "beta": 0, "p": 1}])
    phis = [parse_phi(p) for p in cfg.get("phis", ["multilog:1", "multilog:2"])]
    rtol = float(cfg.get("rtol", 1e-6))
    rows = []
    for c in cases:
        b, n = int(c.get("b", 1)), len(c["alpha"])
        s = float(c["s"]) if "s" in c else c["p"] + b + n / 2
        ratios = []
        for phi in phis:
            rep = spc.embedding_identity_check(c["alpha"], int(c.get("beta", 0)), s, b, n, phi)
            dev = abs(rep.ratio / rep.c_exact - 1.0) if not rep.divergent else math.nan
            ratios.append(rep.ratio)
            rows.append({"alpha": list(c["alpha"]), "beta": c.get("beta", 0), "s": s, "b": b,
                         "phi": phi.label(), "lhs": rep.lhs, "rhs": rep.rhs, "ratio": rep.ratio,
                         "c_exact": rep.c_exact, "divergent": rep.divergent,
                         "pass": rep.divergent or dev <= rtol})
        finite = [r for r in ratios if math.isfinite(r)]
        if len(finite) > 1 and max(finite) / min(finite) - 1 > 0.01:
            rows[-1]["pass"] = False
    ok = all(r["pass"] for r in rows)
    return Outcome(rows, ["alpha", "beta", "s", "b", "phi", "lhs", "rhs", "ratio", "c_exact",
                          "divergent", "pass"], {"all_pass": ok}, ok)


def cmd_traces_check(cfg: dict, jobs: int, seed: int) -> Outcome:
    """Right-inverse residuals R0 T0 v - v and the T0 norm bound on random data."""
    require(cfg, ("r_list", "b_list", "m_list", "fixtures", "N_x", "N_t", "L_x", "L_t",
                  "xi_max", "tol"))
    N_x, N_t = int(cfg.get("N_x", 128)), int(cfg.get("N_t", 512))
    L_x, L_t = float(cfg.get("L_x", 8 * math.pi)), float(cfg.get("L_t", 4.5))
    xi_max, tol = float(cfg.get("xi_max", 0.5)), float(cfg.get("tol", 1e-8))
    gx = spc.FrequencyGrid((N_x,), (L_x,))
    g = spc.FrequencyGrid((N_x, N_t), (L_x, L_t))
    rows = []
    for r in cfg.get("r_list", [1, 2, 3]):
        for b in cfg.get("b_list", [1, 2]):
            v = tr.band_limited_data(gx, r, b, xi_max=xi_max, seed=seed + 31 * r + b)
            res = tr.verify_right_inverse(v, g)
            rows.append({"check": "right_inverse", "r": r, "b": b, "m": "", "lhs": res,
                         "rhs": tol, "pass": res <= tol})
    for m in cfg.get("m_list", [1, 2]):
        for i in range(int(cfg.get("fixtures", 10))):
            rng = np.random.default_rng(seed + 1000 * m + i)
            r, b = int(rng.integers(1, m + 1)), int(rng.integers(1, 3))
            v = tr.band_limited_data(gx, r, b, xi_max=float(rng.uniform(0.2, xi_max)),
                                     seed=seed + 7919 * m + i)
            rep = tr.t0_norm_bound(v, g, m)
            rows.append({"check": "t0_bound", "r": r, "b": b, "m": m, "lhs": rep.lhs,
                         "rhs": rep.rhs, "pass": rep.holds})
    ok = all(r["pass"] for r in rows)
    return Outcome(rows, ["check", "r", "b", "m", "lhs", "rhs", "pass"],
                   {"all_pass": ok, "violations": sum(not r["pass"] for r in rows)}, ok)


def _compat_rows(report, s):
    return [dict(s=s, **row) for row in report.rows()]


COMPAT_COLUMNS = ["s", "j", "lambda", "k", "lhs", "rhs", "residual", "satisfied"]


def cmd_compat(cfg: dict, jobs: int, seed: int) -> Outcome:
    """Compatibility report; violations are reported, not treated as failures."""
    require(cfg, ("problem", "l", "tau", "rhs", "s_list", "s", "tol"))
    problem = _problem(cfg.get("problem"), cfg.get("l", 1.0), cfg.get("tau", 1.0))
    rhs = _rhs(cfg.get("rhs"))
    s_list = cfg.get("s_list", [cfg.get("s", 3.0)])
    rows, per_s = [], []
    for s in s_list:
        rep = cm.check_compat(problem, rhs, float(s), float(cfg.get("tol", 1e-8)))
        rows.extend(_compat_rows(rep, float(s)))
        per_s.append({"s": s, "n_conditions": rep.n_conditions, "satisfied": rep.satisfied,
                      "exceptional": rep.exceptional, "max_residual": rep.max_residual})
    return Outcome(rows, COMPAT_COLUMNS, {"problem": problem.name, "reports": per_s})


def cmd_project(cfg: dict, jobs: int, seed: int) -> Outcome:
    """Project onto compatible data, then re-check and test idempotence."""
    require(cfg, ("problem", "l", "tau", "rhs", "s", "tol"))
    problem = _problem(cfg.get("problem"), cfg.get("l", 1.0), cfg.get("tau", 1.0))
    rhs = _rhs(cfg.get("rhs"))
    s, tol = float(cfg.get("s", 3.0)), float(cfg.get("tol", 1e-10))
    before = cm.check_compat(problem, rhs, s, tol)
    proj = cm.project_compatible(problem, rhs, s)
    after = cm.check_compat(problem, proj, s, tol)
    again = cm.project_compatible(problem, proj, s)
    idem = _rhs_gap(problem, proj, again)
    ok = after.satisfied and idem <= tol
    rows = _compat_rows(after, s)
    return Outcome(rows, COMPAT_COLUMNS,
                   {"s": s, "satisfied_before": before.satisfied,
                    "max_residual_before": before.max_residual,
                    "max_residual_after": after.max_residual, "idempotence_gap": idem,
                    "all_pass": ok}, ok, {"projected_rhs": proj.to_dict()})


def _rhs_gap(problem, a: cm.ParabolicRHS, b: cm.ParabolicRHS, n: int = 33) -> float:
    """max |g_a - g_b| over the boundary data sampled on [0, tau]."""
    ts = np.linspace(0.0, problem.tau, n)
    gap = 0.0
    for key in a.g:
        da, db = a.g[key], b.g[key]
        if da.symbolic and db.symbolic:
            gap = max(gap, float(np.max(np.abs(da.sample(ts) - db.sample(ts)))))
        else:
            gap = max(gap, float(np.max(np.abs(np.asarray(da.values) - np.asarray(db.values)))))
    return gap


def cmd_solve_heat(cfg: dict, jobs: int, seed: int) -> Outcome:
    """Solve the heat problem; with an ``exact`` solution also report the error."""
    require(cfg, ("spec", "rhs", "exact", "stride", "tol"))
    spec = _heat_spec(cfg.get("spec"))
    exact = cfg.get("exact")
    rhs = hs.manufactured_rhs(spec, exact) if exact and not cfg.get("rhs") else _rhs(cfg.get("rhs"))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        u = hs.solve_heat(spec, rhs)
    summary = {"spec": spec.to_dict(),
               "warnings": sorted({str(w.message) for w in caught})}
    ok = True
    if exact:
        ref = cm.Data.expression(exact, ("x", "t")).sample(spec.x, spec.t)
        err = float(np.linalg.norm(u.values - ref) / np.linalg.norm(ref))
        tol = float(cfg.get("tol", 1e-3))
        summary.update(relative_l2_error=err, tol=tol)
        ok = err <= tol
    stride = int(cfg.get("stride", max(1, spec.N_x // 32)))
    rows = []
    for i in range(0, spec.N_x + 1, stride):
        for k in range(0, spec.N_t + 1, stride * max(1, spec.N_t // spec.N_x)):
            rows.append({"x": spec.x[i], "t": spec.t[k], "u": float(np.real(u.values[i, k]))})
    return Outcome(rows, ["x", "t", "u"], summary, ok)


def cmd_verify_iso(cfg: dict, jobs: int, seed: int) -> Outcome:
    """Isomorphism ratios over a family of closed-form solutions."""
    require(cfg, ("spec", "family", "s", "phis", "refine", "factor"))
    spec = _heat_spec(cfg.get("spec", {"N_x": 128, "N_t": 128}))
    fam = cfg.get("family", {"modes": 20})
    family = hs.mode_family(spec.kind, int(fam["modes"]), spec.l, spec.tau) \
        if isinstance(fam, dict) else list(fam)
    s, factor = float(cfg.get("s", 3.25)), float(cfg.get("factor", 2.0))
    rows, reports = [], []
    ok = True
    for raw in cfg.get("phis", ["1", "multilog:1"]):
        phi = parse_phi(raw)
        rep = hs.isomorphism_ratio(spec, family, s, phi, int(cfg.get("refine", 2)), jobs)
        for level, samples in (("base", rep.samples), ("refined", rep.refined)):
            for x in samples:
                rows.append({"phi": phi.label(), "level": level, "index": x.index,
                             "q_norm": x.q_norm, "u_norm": x.u_norm, "ratio": x.ratio,
                             "compatible": x.compatible})
        stable = rep.stable(factor)
        ok = ok and stable
        reports.append({"phi": phi.label(), "min": rep.min_ratio, "max": rep.max_ratio,
                        "min_refined": rep.min_ratio_refined,
                        "max_refined": rep.max_ratio_refined,
                        "refinement_factor": rep.refinement_factor, "stable": stable})
    return Outcome(rows, ["phi", "level", "index", "q_norm", "u_norm", "ratio", "compatible"],
                   {"s": s, "family_size": len(family), "reports": reports, "all_pass": ok}, ok)


def cmd_regularity(cfg: dict, jobs: int, seed: int) -> Outcome:
    """Local (cut-off) and global solution norms under grid refinement."""
    require(cfg, ("spec", "rhs", "s_list", "phi", "levels", "cutoff"))
    spec = _heat_spec(cfg.get("spec", {"N_x": 64, "N_t": 64}))
    rhs = _rhs(cfg.get("rhs"))
    phi = parse_phi(cfg.get("phi", 1.0))
    cut = cfg.get("cutoff")
    cutoff = None
    if cut == "zero":
        cutoff = hs.zero_cutoff
    elif isinstance(cut, dict):
        cutoff = hs.SmoothCutoff(tuple(cut["x_inner"]), tuple(cut["x_outer"]),
                                 tuple(cut["t_inner"]), tuple(cut["t_outer"]))
    s_list = cfg.get("s_list", [3.0, 4.5, 6.0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        tab = hs.regularity_lift_experiment(spec, rhs, s_list, phi, cutoff,
                                            int(cfg.get("levels", 4)))
    rows = [{"s": r.s, "N_x": r.N_x, "N_t": r.N_t, "local_norm": r.local_norm,
             "global_norm": r.global_norm} for r in tab.rows]
    growth = [{"s": s, "local_step_growth": tab.step_growth(s, "local"),
               "global_growth": tab.growth(s, "global")} for s in s_list]
    return Outcome(rows, ["s", "N_x", "N_t", "local_norm", "global_norm"], {"growth": growth})


def cmd_continuity(cfg: dict, jobs: int, seed: int) -> Outcome:
    """Witness sweep: bounded for theta > 1/2, divergent trend otherwise."""
    require(cfg, ("p", "b", "n", "theta_list", "L_list", "growth", "settle"))
    rows_ = hs.continuity_sharpness_experiment(
        int(cfg.get("p", 0)), int(cfg.get("b", 1)), int(cfg.get("n", 1)),
        cfg.get("theta_list", [0.0, 0.4, 1.0]), cfg.get("L_list", [1, 10, 100, 1000]),
        float(cfg.get("growth", 1.2)), float(cfg.get("settle", 1.05)))
    rows = []
    ok = True
    for r in rows_:
        if r.integral_status == "Indeterminate":
            raise IndeterminateError(f"integral condition undecided for theta = {r.theta}")
        expect = "bounded" if r.integral_status == "Converges" else "divergent"
        match = r.classification == expect
        ok = ok and match
        for i, L in enumerate(r.L):
            rows.append({"theta": r.theta, "L": L, "S": r.S[i],
                         "ratio": r.ratios[i - 1] if i else "",
                         "classification": r.classification,
                         "integral_status": r.integral_status, "pass": match})
    return Outcome(rows, ["theta", "L", "S", "ratio", "classification", "integral_status",
                          "pass"], {"all_pass": ok}, ok)


COMMANDS: dict[str, Callable] = {
    "norm": cmd_norm,
    "interp-check": cmd_interp_check,
    "embed-check": cmd_embed_check,
    "traces-check": cmd_traces_check,
    "compat": cmd_compat,
    "project": cmd_project,
    "solve-heat": cmd_solve_heat,
    "verify-iso": cmd_verify_iso,
    "regularity": cmd_regularity,
    "continuity": cmd_continuity,
}


# --- driver --------------------------------------------------------------------------


def run(config: ExperimentConfig) -> int:
    """Dispatch, write reports, return the exit status."""
    handler = COMMANDS[config.command]
    params = {k: v for k, v in config.params.items() if k not in ("command", "seed")}
    summary: dict = {"command": config.command, "seed": config.seed}
    try:
        with np.errstate(all="ignore"):
            out = handler(params, config.jobs, config.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IndeterminateError as exc:
        summary.update(status="indeterminate", error=str(exc))
        write_json(config.out / f"{config.command}.json", summary)
        print(f"indeterminate: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (PreconditionError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HoermanderError as exc:
        summary.update(status="failed", error=f"{type(exc).__name__}: {exc}")
        write_json(config.out / f"{config.command}.json", summary)
        print(summary["error"], file=sys.stderr)
        return EXIT_FAIL
    write_csv(config.out / f"{config.command}.csv", out.rows, out.columns)
    summary.update(out.summary, status="ok" if out.ok else "check_failed", n_rows=len(out.rows))
    write_json(config.out / f"{config.command}.json", summary)
    for name, payload in out.extra.items():
        write_json(config.out / f"{name}.json", payload)
    return EXIT_OK if out.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hoermander-lab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, help="JSON config (defaults are used without one)")
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params = load_config(args.config) if args.config else {}
        if params.get("command", args.command) != args.command:
            raise ConfigError(f"config is for {params['command']!r}, not {args.command!r}")
        seed = args.seed if args.seed is not None else int(params.get("seed", 0))
        if seed < 0 or seed >= 1 << 64 or args.jobs < 1:
            raise ConfigError("seed must be a u64 and --jobs positive")
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(ExperimentConfig(args.command, params, args.out, args.jobs, seed))


if __name__ == "__main__":
    sys.exit(main())
