"""Batch experiment runner: presets, reports, and the command line.

Modes: "solve" (grid solve against barriers, optional closed-form
comparison), "probe" (nonexistence probe with analytic floor
cross-checks), "ode_only" (radial shooting and the boundary-gradient
dichotomy), "barrier_only" (barrier fields, ordering, exponents),
"convergence_study" (error/exponent table over an h list), and the
threshold scan over drift strengths.

Reports: each run writes CSV tables plus a summary.json whose bytes are
deterministic for a fixed config and seed (no timestamps; the config
hash and package version are embedded).  Presets cover the standard
verification experiments; each carries its expected outcomes and the
CLI exit code reflects them (0 ok, 2 verdict mismatch, 1 error).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import barriers, geometry, grid_solver, operators, radial_ode
from .errors import ConfigError, NoExactSolution, SingEllipticError

MODES = ("solve", "probe", "ode_only", "barrier_only", "convergence_study")

# resolution factor for the scan thresholds: the steep layer of a blow-up
# family member is considered grid-resolved when it spans a few cells
_SCAN_LAYER_CELLS = 3.0


@dataclass
class ExperimentConfig:
    """One experiment: problem, grid ladder, mode, tolerances, outputs."""

    name: str
    problem: dict
    mode: str
    h_list: list = field(default_factory=list)
    width: int = 2
    tol: float = 2e-5
    max_sweeps: int = 40000
    solve_direction: str = "above"      # "above": monotone GS; "below": probe
    growth_threshold: Optional[float] = None
    core_delta: Optional[float] = None
    fit_band: Optional[tuple] = None
    b_values: list = field(default_factory=list)
    gammas: list = field(default_factory=list)
    seed: int = 0
    sweep_mode: str = "multicolor"

    def validate(self) -> barriers.ProblemSpec:
        if self.mode not in MODES:
            raise ConfigError("mode", f"unknown mode {self.mode!r}")
        if self.mode in ("solve", "probe", "convergence_study"):
            if not self.h_list:
                raise ConfigError("grid.h_list", "empty h list")
            if any(b >= a for a, b in zip(self.h_list, self.h_list[1:])):
                raise ConfigError("grid.h_list", "h list must be strictly decreasing")
        if self.width not in (1, 2, 3):
            raise ConfigError("grid.width", "stencil width must be 1, 2 or 3")
        if self.sweep_mode not in ("multicolor", "lex"):
            raise ConfigError("sweep_mode", "must be 'multicolor' or 'lex'")
        if self.solve_direction not in ("above", "below"):
            raise ConfigError("solve_direction", "must be 'above' or 'below'")
        try:
            spec = barriers.problem_from_dict(self.problem)
        except (KeyError, ValueError) as exc:
            raise ConfigError("problem", str(exc)) from exc
        if self.mode in ("solve", "convergence_study"):
            if spec.beta <= -1:
                raise ConfigError(
                    "problem.beta",
                    f"beta = {spec.beta} <= -1: nonexistence regime "
                    "(existence solves need beta > -1); use probe mode")
            if spec.drift_b > 0 and spec.drift_sign > 0:
                if spec.drift_b * spec.domain.radius >= spec.k:
                    raise ConfigError(
                        "problem.drift_b",
                        f"b R = {spec.drift_b * spec.domain.radius:g} >= "
                        f"k = {spec.k}: drift nonexistence regime (existence "
                        "solves need b R < k); use probe mode")
        return spec

    def to_dict(self) -> dict:
        return {
            "name": self.name, "problem": self.problem, "mode": self.mode,
            "grid": {"h_list": list(self.h_list), "width": self.width},
            "tol": self.tol, "max_sweeps": self.max_sweeps,
            "solve_direction": self.solve_direction,
            "growth_threshold": self.growth_threshold,
            "core_delta": self.core_delta,
            "fit_band": list(self.fit_band) if self.fit_band else None,
            "b_values": list(self.b_values), "gammas": list(self.gammas),
            "seed": self.seed, "sweep_mode": self.sweep_mode,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        grid = data.pop("grid", {})
        fit_band = data.pop("fit_band", None)
        return cls(
            name=data.pop("name", "experiment"),
            problem=data.pop("problem"),
            mode=data.pop("mode"),
            h_list=list(grid.get("h_list", data.pop("h_list", []))),
            width=int(grid.get("width", data.pop("width", 2))),
            fit_band=tuple(fit_band) if fit_band else None,
            **data,
        )


def config_hash(cfg: ExperimentConfig) -> str:
    text = json.dumps(cfg.to_dict(), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass
class ReportBundle:
    """Run outputs: a summary mapping plus named row tables.

    fields maps names to (grid, field) snapshots written as node CSVs.
    """

    summary: dict
    tables: dict
    ok: bool
    fields: dict = None

    def write(self, out_dir):
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "summary.json")
        with open(path, "w") as fh:
            json.dump(self.summary, fh, sort_keys=True, indent=1)
            fh.write("\n")
        for name, rows in self.tables.items():
            if not rows:
                continue
            fieldnames = list(rows[0].keys())
            for row in rows[1:]:
                fieldnames.extend(k for k in row if k not in fieldnames)
            with open(os.path.join(out_dir, f"{name}.csv"), "w", newline="") as fh:
                writer = csv.DictWriter(fh, fieldnames=fieldnames, restval="")
                writer.writeheader()
                writer.writerows(rows)
        for name, (grid, fld) in (self.fields or {}).items():
            grid_solver.save_field_csv(grid, fld, os.path.join(out_dir, f"{name}.csv"))
        return path


def oracle_profile_for(spec: barriers.ProblemSpec):
    """Closed-form solution profile on a single ball, when one exists."""
    if len(spec.domain.centers) != 1:
        return None
    beta = 0.0 if spec.weight_kind == barriers.WEIGHT_CONSTANT else spec.beta
    big_r = spec.domain.radius
    if spec.operator.kind != operators.UPPER_PARTIAL_SUM or not -1 < beta <= 0:
        return None
    if spec.drift_b == 0:
        return barriers.ball_solution_beta_nonpos(spec.c2, spec.k, spec.gamma,
                                                  beta, big_r)
    if spec.drift_sign > 0 and spec.drift_b * big_r < spec.k:
        return barriers.drift_ball_supersolution(spec.c2, spec.k, spec.gamma,
                                                 beta, spec.drift_b, big_r)
    return None


def _solve_once(cfg, spec, h):
    """One grid solve; returns (grid, field, diagnostics row)."""
    grid = grid_solver.build_grid(spec.domain, h, cfg.width)
    oracle = oracle_profile_for(spec)
    sup = barriers.inf_ball_supersolution(spec)
    sup_vals = sup.field(grid.pts)
    if cfg.solve_direction == "above":
        sub = barriers.subsolution_field(spec, n_check=80, seed=cfg.seed)
        lower = np.minimum(sub.field(grid.pts), 0.9 * np.maximum(sup_vals, 1e-13))
        lower = np.maximum(lower, 1e-13)
        fld = grid_solver.solve(grid, spec, grid_solver.GridField(lower),
                                grid_solver.GridField(1.05 * sup_vals),
                                tol=cfg.tol, max_sweeps=cfg.max_sweeps,
                                mode=cfg.sweep_mode)
    else:
        res = grid_solver.nonexistence_probe(
            grid, spec, growth_threshold=np.inf, max_sweeps=cfg.max_sweeps,
            tol=cfg.tol, mode=cfg.sweep_mode)
        if res.verdict != "bounded":
            raise SingEllipticError(
                f"from-below solve did not converge at h = {h:g} "
                f"({res.verdict} after {res.sweeps} sweeps)")
        fld = res.field
    row = {"h": h, "n_nodes": grid.n_nodes, "sweeps": fld.meta.get("sweeps")}
    if oracle is not None:
        r = np.linalg.norm(grid.pts - spec.domain.centers[0], axis=1)
        exact = oracle.value(np.minimum(r, oracle.radius))
        row["linf_error"] = float(np.abs(fld.values - exact).max())
        row["barrier_violations"] = int(np.sum(fld.values > sup_vals))
    if cfg.fit_band:
        fit = grid_solver.fit_boundary_exponent(grid, fld, cfg.fit_band)
        row["fit_exponent"] = fit.exponent
        row["fit_constant"] = fit.constant
    return grid, fld, row


def _analytic_floor(spec, grid, eps_cells=1.0):
    """Interpolated member of the matching blow-up family, when one applies."""
    if len(spec.domain.centers) != 1:
        return None, None
    big_r = spec.domain.radius
    h = eps_cells * grid.h
    r = np.linalg.norm(grid.pts - spec.domain.centers[0], axis=1)
    if spec.drift_b > 0 and spec.drift_sign > 0 \
            and spec.drift_b * big_r >= spec.k:
        prof = barriers.drift_nonexistence_profile(spec.k, spec.gamma,
                                                   spec.drift_b, h)
        tag = f"u_eps(eps={h:g})"
    elif spec.drift_b == 0 and spec.beta <= -1:
        prof = barriers.nonexistence_profile(spec.k, spec.gamma, big_r - h,
                                             big_r=big_r)
        tag = f"w_rho(rho={big_r - h:g})"
    else:
        return None, None
    vals = np.where(r < prof.radius, prof.value(np.minimum(r, prof.radius)), 0.0)
    return vals, tag


def run(cfg: ExperimentConfig) -> ReportBundle:
    """Execute a config; returns the report bundle (not yet written)."""
    spec = cfg.validate()
    summary = {
        "name": cfg.name,
        "config_hash": config_hash(cfg),
        "version": _package_version(),
        "mode": cfg.mode,
        "seed": cfg.seed,
    }
    tables = {}
    ok = True

    fields = {}
    if cfg.mode in ("solve", "convergence_study"):
        rows = []
        for h in cfg.h_list:
            grid, fld, row = _solve_once(cfg, spec, h)
            rows.append(row)
        fields["solution"] = (grid, fld)   # finest level snapshot
        if cfg.mode == "convergence_study":
            if "linf_error" not in rows[0]:
                raise NoExactSolution(
                    "convergence study needs a closed-form regime "
                    "(single ball, upper partial sum, beta in (-1, 0])")
            for prev, cur in zip(rows, rows[1:]):
                cur["observed_order"] = math.log2(prev["linf_error"]
                                                  / cur["linf_error"])
        tables["convergence"] = rows
        summary["errors"] = [r.get("linf_error") for r in rows]
        summary["fit_exponents"] = [r.get("fit_exponent") for r in rows]
        summary["sweeps"] = [r.get("sweeps") for r in rows]
        if "linf_error" in rows[0]:
            errs = [r["linf_error"] for r in rows]
            summary["errors_strictly_decreasing"] = bool(
                all(b < a for a, b in zip(errs, errs[1:])))
            summary["barrier_violations"] = [r.get("barrier_violations")
                                             for r in rows]

    elif cfg.mode == "probe":
        rows = []
        for h in cfg.h_list:
            grid = grid_solver.build_grid(spec.domain, h, cfg.width)
            floor_vals, floor_tag = _analytic_floor(spec, grid)
            res = grid_solver.nonexistence_probe(
                grid, spec, growth_threshold=cfg.growth_threshold or np.inf,
                max_sweeps=cfg.max_sweeps, tol=cfg.tol,
                core_delta=cfg.core_delta, floor_values=floor_vals,
                mode=cfg.sweep_mode)
            rows.append({
                "h": h, "n_nodes": grid.n_nodes, "verdict": res.verdict,
                "sweeps": res.sweeps, "core_min": res.core_min,
                "trend": res.trend, "floor": floor_tag,
                "floor_exceed_fraction": res.floor_exceed_fraction,
                "field_max": float(res.field.values.max()),
            })
            fields["probe_field"] = (grid, res.field)
        tables["probe"] = rows
        summary["verdicts"] = [r["verdict"] for r in rows]
        summary["core_min"] = [r["core_min"] for r in rows]

    elif cfg.mode == "ode_only":
        gammas = cfg.gammas or [spec.gamma]
        rows = []
        for gm in gammas:
            profile, rep = radial_ode.infinity_laplacian_profile(
                gm, spec.domain.radius)
            rows.append({
                "gamma": gm, "u0": rep.u0,
                "finite_boundary_gradient": rep.finite_boundary_gradient,
                "boundary_gradient": rep.boundary_gradient,
                "growth_ratio": rep.growth_ratio,
                "energy_residual": rep.energy_residual,
                "ode_residual": radial_ode.residual(profile),
            })
        tables["shooting"] = rows
        summary["c1_verdicts"] = [bool(r["finite_boundary_gradient"]) for r in rows]
        summary["u0"] = [r["u0"] for r in rows]

    elif cfg.mode == "barrier_only":
        sub = barriers.subsolution_field(spec, n_check=200, seed=cfg.seed)
        sup = barriers.inf_ball_supersolution(spec)
        pts = geometry.sample_interior(spec.domain, 1000, rng=cfg.seed,
                                       min_delta=1e-3 * spec.domain.radius)
        rep = barriers.boundary_estimate(spec, seed=cfg.seed)
        summary.update({
            "epsilon": sub.epsilon, "t": sub.t,
            "ordering_violations": int(np.sum(sub.field(pts) > sup.field(pts))),
            "holder_ratio": sup.holder_ratio(seed=cfg.seed),
            "holder_constant_1d": sup.holder_constant,
            "sigma": rep.sigma, "lower_exponent": rep.lower_exponent,
            "a1": rep.a1, "a2": rep.a2,
            "two_sided_sigma": rep.two_sided_sigma,
        })
        prof = sup.profile
        grid_r = prof.interior_grid(400)
        tables["ball_profile"] = [
            {"r": float(r), "u": float(u), "du": float(du),
             "residual": float(res)}
            for r, u, du, res in zip(grid_r, prof.value(grid_r),
                                     prof.derivative(grid_r),
                                     prof.residual(grid_r))
        ]
        ok = summary["ordering_violations"] == 0

    summary["ok"] = bool(ok)
    return ReportBundle(summary=summary, tables=tables, ok=bool(ok), fields=fields)


def threshold_scan(cfg: ExperimentConfig, b_values=None) -> ReportBundle:
    """Probe verdicts across drift strengths; the flip brackets b = k/R.

    The per-b growth threshold is 0.9 times the center value of the
    matching blow-up family member whose vanishing layer spans a few
    grid cells (eps = 3h), applied uniformly whether or not the member
    fits inside the domain; the interior core is the inner half of the
    member's support.  Verdicts are then read off the probe.
    """
    spec = cfg.validate()
    b_values = list(b_values if b_values is not None else cfg.b_values)
    if not b_values:
        raise ConfigError("b_values", "threshold scan needs drift strengths")
    h = cfg.h_list[-1]
    grid = grid_solver.build_grid(spec.domain, h, cfg.width)
    big_r = spec.domain.radius
    rows = []
    for b in b_values:
        prob = barriers.ProblemSpec(
            operator=spec.operator, gamma=spec.gamma, domain=spec.domain,
            alpha=spec.alpha, beta=spec.beta, c1=spec.c1, c2=spec.c2,
            drift_b=b, drift_sign=+1 if b > 0 else 0,
            weight_kind=spec.weight_kind)
        if b > 0:
            member = barriers.drift_nonexistence_profile(
                spec.k, spec.gamma, b, _SCAN_LAYER_CELLS * h)
            threshold = 0.9 * float(member.value(0.0))
            core = big_r - min(0.5 * spec.k / b, 0.75 * big_r)
        else:
            # b = 0 reduces to the no-drift existence case
            threshold = np.inf
            core = 0.5 * big_r
        floor_vals, tag = _analytic_floor(prob, grid)
        res = grid_solver.nonexistence_probe(
            grid, prob, growth_threshold=threshold, max_sweeps=cfg.max_sweeps,
            tol=cfg.tol, core_delta=core, floor_values=floor_vals,
            mode=cfg.sweep_mode)
        rows.append({
            "b": b, "bR_over_k": b * big_r / spec.k, "verdict": res.verdict,
            "threshold": threshold, "core_delta": core, "sweeps": res.sweeps,
            "core_min": res.core_min, "floor": tag,
            "floor_exceed_fraction": res.floor_exceed_fraction,
        })
    verdicts = [r["verdict"] for r in rows]
    flip_ok = all(
        r["verdict"] == ("blow_up" if r["bR_over_k"] >= 1 else "bounded")
        for r in rows)
    summary = {
        "name": cfg.name, "config_hash": config_hash(cfg),
        "version": _package_version(), "mode": "threshold_scan",
        "seed": cfg.seed, "b_values": b_values, "verdicts": verdicts,
        "flip_brackets_threshold": flip_ok, "ok": flip_ok,
    }
    return ReportBundle(summary=summary, tables={"scan": rows}, ok=flip_ok)


def _package_version():
    from . import __version__
    return __version__


# ---------------------------------------------------------------------------
# Presets (one per standard verification experiment)


def _upper1():
    return {"kind": "upper_partial_sum", "k": 1}


def _disk(radius=1.0):
    return {"centers": [[0.0, 0.0]], "radius": radius, "dimension": 2}


def _two_ball():
    return {"centers": [[-0.5, 0.0], [0.5, 0.0]], "radius": 1.0, "dimension": 2}


def preset_hemisphere():
    cfg = ExperimentConfig(
        name="hemisphere",
        problem={"operator": _upper1(), "gamma": 1.0, "domain": _disk()},
        mode="convergence_study",
        h_list=[1 / 8, 1 / 16, 1 / 32], width=2, tol=2e-5,
        fit_band=(0.05, 0.35),
    )
    expect = {"max_linf_at_finest": 0.1, "strictly_decreasing": True,
              "fit_exponent_range": (0.4, 0.6)}
    return cfg, expect


def preset_singular_weight_exponent():
    cfg = ExperimentConfig(
        name="singular_weight_exponent",
        problem={"operator": _upper1(), "gamma": 1.0, "domain": _disk(),
                 "alpha": -0.5, "beta": -0.5},
        mode="convergence_study",
        h_list=[1 / 16, 1 / 32], width=3, tol=2e-5,
        solve_direction="below", fit_band=(0.1, 0.4),
    )
    expect = {"fit_exponent_range": (0.15, 0.35)}
    return cfg, expect


def preset_comparison_doubling():
    cfg = ExperimentConfig(
        name="comparison_doubling",
        problem={"operator": _upper1(), "gamma": 1.0, "domain": _disk()},
        mode="solve", h_list=[1 / 16], width=2, tol=1e-6,
    )
    expect = {"comparison_violations": 0}
    return cfg, expect


def preset_thm12_nonexistence():
    cfg = ExperimentConfig(
        name="thm12_nonexistence",
        problem={"operator": _upper1(), "gamma": 1.0, "domain": _disk(2.0),
                 "alpha": -1.0, "beta": -1.0},
        mode="probe", h_list=[1 / 24], width=2, tol=1e-6,
        growth_threshold=3.0, max_sweeps=20000,
    )
    expect = {"verdict": "blow_up", "control_verdict": "bounded",
              "evidence_level": 3.4376}
    return cfg, expect


def preset_thm12_control():
    cfg = ExperimentConfig(
        name="thm12_control",
        problem={"operator": _upper1(), "gamma": 1.0, "domain": _disk(2.0)},
        mode="probe", h_list=[1 / 16], width=2, tol=1e-6,
        growth_threshold=3.0, max_sweeps=20000,
    )
    expect = {"verdict": "bounded"}
    return cfg, expect


def preset_drift_threshold():
    cfg = ExperimentConfig(
        name="drift_threshold",
        problem={"operator": _upper1(), "gamma": 1.0, "domain": _disk()},
        mode="probe", h_list=[1 / 32], width=2, tol=1e-5,
        b_values=[0.5, 0.9, 1.1, 1.5], max_sweeps=20000,
    )
    expect = {"verdicts": ["bounded", "bounded", "blow_up", "blow_up"]}
    return cfg, expect


def preset_drift_supersolution():
    cfg = ExperimentConfig(
        name="drift_supersolution",
        problem={"operator": _upper1(), "gamma": 1.0, "domain": _disk(),
                 "drift_b": 0.5, "drift_sign": 1},
        mode="solve", h_list=[1 / 32], width=2, tol=2e-5,
    )
    expect = {"barrier_violations": 0}
    return cfg, expect


def preset_infinity_shooting():
    cfg = ExperimentConfig(
        name="infinity_shooting",
        problem={"operator": {"kind": "lower_partial_sum", "k": 1},
                 "gamma": 1.0, "domain": _disk()},
        mode="ode_only", gammas=[0.5, 0.9, 1.0, 1.5, 2.0],
    )
    expect = {"c1_verdicts": [True, True, False, False, False],
              "u0_gamma1": math.sqrt(2 / math.pi), "u0_tol": 1e-4}
    return cfg, expect


def preset_barrier_ordering():
    cfg = ExperimentConfig(
        name="barrier_ordering",
        problem={"operator": _upper1(), "gamma": 1.0, "domain": _two_ball()},
        mode="barrier_only",
    )
    expect = {"ordering_violations": 0}
    return cfg, expect


PRESETS = {
    "hemisphere": preset_hemisphere,
    "singular_weight_exponent": preset_singular_weight_exponent,
    "comparison_doubling": preset_comparison_doubling,
    "thm12_nonexistence": preset_thm12_nonexistence,
    "thm12_control": preset_thm12_control,
    "drift_threshold": preset_drift_threshold,
    "drift_supersolution": preset_drift_supersolution,
    "infinity_shooting": preset_infinity_shooting,
    "barrier_ordering": preset_barrier_ordering,
}


def run_preset(name: str, out_dir=None, seed=None, sequential=False) -> ReportBundle:
    """Run a named preset and fold its expected outcomes into ok."""
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; "
                          f"known: {sorted(PRESETS)}")
    cfg, expect = PRESETS[name]()
    if seed is not None:
        cfg.seed = seed
    if sequential:
        cfg.sweep_mode = "lex"
    if name == "drift_threshold":
        bundle = threshold_scan(cfg)
        bundle.ok = bundle.ok and bundle.summary["verdicts"] == expect["verdicts"]
    elif name == "comparison_doubling":
        bundle = _run_comparison(cfg)
    elif name == "thm12_nonexistence":
        bundle = _run_thm12(cfg, expect)
    else:
        bundle = run(cfg)
        bundle.ok = bundle.ok and _check_expectations(bundle, expect)
    bundle.summary["ok"] = bundle.ok
    if out_dir:
        bundle.write(out_dir)
    return bundle


def _check_expectations(bundle, expect) -> bool:
    s = bundle.summary
    ok = True
    if "max_linf_at_finest" in expect:
        ok &= s["errors"][-1] is not None \
            and s["errors"][-1] <= expect["max_linf_at_finest"]
    if expect.get("strictly_decreasing"):
        ok &= bool(s.get("errors_strictly_decreasing"))
    if "fit_exponent_range" in expect:
        lo, hi = expect["fit_exponent_range"]
        ok &= s["fit_exponents"][-1] is not None \
            and lo <= s["fit_exponents"][-1] <= hi
    if "verdict" in expect and "verdicts" in s:
        ok &= s["verdicts"][-1] == expect["verdict"]
    if "c1_verdicts" in expect:
        ok &= s.get("c1_verdicts") == expect["c1_verdicts"]
        if ok and "u0_gamma1" in expect:
            row = next(r for r in bundle.tables["shooting"] if r["gamma"] == 1.0)
            ok &= abs(row["u0"] - expect["u0_gamma1"]) <= expect["u0_tol"]
    if "ordering_violations" in expect:
        ok &= s.get("ordering_violations") == expect["ordering_violations"]
    if "barrier_violations" in expect:
        rows = bundle.tables.get("convergence", [])
        ok &= all(r.get("barrier_violations") == 0 for r in rows)
    return bool(ok)


def _run_comparison(cfg) -> ReportBundle:
    """Discrete comparison: doubling the weight raises the solution."""
    spec = cfg.validate()
    grid = grid_solver.build_grid(spec.domain, cfg.h_list[-1], cfg.width)
    fields = []
    for scale in (1.0, 2.0):
        prob = barriers.ProblemSpec(
            operator=spec.operator, gamma=spec.gamma, domain=spec.domain,
            alpha=spec.alpha, beta=spec.beta, c1=scale * spec.c1,
            c2=scale * spec.c2, weight_kind=spec.weight_kind)
        sup = barriers.inf_ball_supersolution(prob)
        sub = barriers.subsolution_field(prob, n_check=80, seed=cfg.seed)
        sup_vals = sup.field(grid.pts)
        lower = np.maximum(np.minimum(sub.field(grid.pts), 0.9 * sup_vals), 1e-13)
        fld = grid_solver.solve(grid, prob, grid_solver.GridField(lower),
                                grid_solver.GridField(1.05 * sup_vals),
                                tol=cfg.tol, max_sweeps=cfg.max_sweeps,
                                mode=cfg.sweep_mode)
        fields.append(fld.values)
    violations = int(np.sum(fields[1] < fields[0]))
    summary = {
        "name": cfg.name, "config_hash": config_hash(cfg),
        "version": _package_version(), "mode": "solve", "seed": cfg.seed,
        "comparison_violations": violations,
        "min_gap": float((fields[1] - fields[0]).min()),
        "ok": violations == 0,
    }
    return ReportBundle(summary=summary, tables={}, ok=violations == 0)


def _run_thm12(cfg, expect) -> ReportBundle:
    """Blow-up probe plus bounded control, with evidence continuation."""
    bundle = run(cfg)
    row = bundle.tables["probe"][-1]
    ok = (row["verdict"] == "blow_up" and row["trend"] > 0
          and row["core_min"] > cfg.growth_threshold)

    # keep iterating toward the reference evidence level: exceeding ever
    # higher members of the analytic family is the blow-up trend evidence
    spec = cfg.validate()
    grid = grid_solver.build_grid(spec.domain, cfg.h_list[-1], cfg.width)
    level = expect.get("evidence_level", 3.4376)
    cont = grid_solver.nonexistence_probe(
        grid, spec, growth_threshold=level, max_sweeps=cfg.max_sweeps,
        tol=cfg.tol, core_delta=cfg.core_delta,
        floor_values=_analytic_floor(spec, grid)[0], mode=cfg.sweep_mode)
    bundle.summary["evidence_level"] = level
    bundle.summary["evidence_level_exceeded"] = cont.verdict == "blow_up"
    bundle.summary["evidence_core_min"] = cont.core_min
    bundle.summary["evidence_floor_exceed_fraction"] = cont.floor_exceed_fraction

    control_cfg, _ = preset_thm12_control()
    control_cfg.seed = cfg.seed
    control_cfg.sweep_mode = cfg.sweep_mode
    control = run(control_cfg)
    bundle.summary["control_verdict"] = control.summary["verdicts"][-1]
    ok = ok and control.summary["verdicts"][-1] == "bounded"
    bundle.ok = bool(ok)
    return bundle


# ---------------------------------------------------------------------------
# Config files and CLI


def load_config(path) -> ExperimentConfig:
    """Read a TOML or JSON experiment config."""
    raw = open(path, "rb").read()
    if str(path).endswith(".json"):
        data = json.loads(raw)
    else:
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib
        data = tomllib.loads(raw.decode())
    try:
        return ExperimentConfig.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ConfigError("config", str(exc)) from exc


def _run_oracle_suite(seed=0) -> ReportBundle:
    """Closed-form residual and value checks (the desk-scale oracle set)."""
    rows = []

    def add(name, profile, value_checks=()):
        res = profile.max_residual()
        row = {"profile": name, "max_residual": res, "ok": res <= 1e-6}
        for label, got, want, tol in value_checks:
            row[label] = got
            row["ok"] = bool(row["ok"] and abs(got - want) <= tol)
        rows.append(row)

    hemi = barriers.ball_solution_beta_nonpos(1, 1, 1, 0, 1)
    add("hemisphere", hemi, [("u0", float(hemi.value(0.0)), 1.0, 1e-12)])
    bh = barriers.ball_solution_beta_nonpos(1, 1, 1, -0.5, 1)
    add("beta_minus_half", bh,
        [("u0", float(bh.value(0.0)), math.sqrt(8 / 3), 1e-12)])
    w = barriers.nonexistence_profile(1, 1, 0.5)
    add("thm12_profile", w,
        [("w0", float(w.value(0.0)), math.sqrt(2 * (math.log(2) - 0.5)), 1e-12)])
    ue = barriers.drift_nonexistence_profile(1, 1, 1, 0.1)
    add("drift_nonexistence", ue,
        [("u0", float(ue.value(0.0)), math.sqrt(2 * (math.log(10) - 0.9)), 1e-12)])
    dr = barriers.drift_ball_supersolution(1, 1, 1, 0.0, 0.5, 1)
    add("drift_supersolution", dr,
        [("u0", float(dr.value(0.0)), math.sqrt(2 * (4 * math.log(2) - 2)), 1e-9)])
    bk = barriers.bR_equals_k_solution(0.5, 1, 1, 1)
    add("threshold_solution", bk,
        [("u0", float(bk.value(0.0)), math.sqrt(8 / 3), 1e-12)])
    ps = barriers.partial_sum_alpha_solution(1, 1, 1)
    add("alpha_ge_gamma_solution", ps,
        [("u0", float(ps.value(0.0)), math.sqrt(1 / 3), 1e-12)])
    nd = barriers.negative_drift_nonexistence_profile(1, 1, 0.5, -1.5, 1.0, 0.8)
    add("negative_drift_nonexistence", nd)
    bp = barriers.ball_supersolution_beta_pos(1, 1, 1, 1, 1)
    add("beta_pos_supersolution", bp, [("u0", float(bp.value(0.0)), 1.0, 1e-12)])
    dl = barriers.drift_supersolution_log_form(1, 1, 1, 0.5, 0.5, 1)
    add("drift_supersolution_log_form", dl)

    # two-formula consistency at the branch point beta = 0
    r = np.linspace(0.0, 1.0, 1000)
    gap_ball = float(np.abs(
        barriers.ball_supersolution_beta_pos(1, 1, 1, 1e-12, 1).value(r)
        - barriers.ball_solution_beta_nonpos(1, 1, 1, 0.0, 1).value(r)).max())
    gap_drift = float(np.abs(
        barriers.drift_ball_supersolution(1, 1, 1, 0.0, 0.5, 1).value(r)
        - barriers.drift_supersolution_log_form(1, 1, 1, 0.0, 0.5, 1).value(r)).max())
    consistency_ok = gap_ball <= 1e-8 and gap_drift <= 1e-8

    # operator algebra spot suite (duality, shift, monotonicity, sandwich)
    rng = np.random.default_rng(seed)
    algebra_failures = 0
    for n in (2, 3, 5):
        for _ in range(100):
            a = rng.standard_normal((n, n))
            x = 0.5 * (a + a.T)
            k = int(rng.integers(1, n + 1))
            t = float(rng.standard_normal())
            g = rng.standard_normal((n, n)) * 0.5
            tol = 1e-9 * (1 + float(np.abs(x).max()) * n)
            ok_one = abs(operators.partial_sum_lower(x, k)
                         + operators.partial_sum_upper(-x, k)) <= tol
            ok_one &= abs(operators.partial_sum_upper(x + t * np.eye(n), k)
                          - operators.partial_sum_upper(x, k) - k * t) <= tol
            spec = operators.OperatorSpec(kind=operators.UPPER_PARTIAL_SUM, k=k)
            ok_one &= operators.sandwich_check(spec, x)
            ok_one &= (operators.evaluate(spec, x + g @ g.T)
                       >= operators.evaluate(spec, x) - tol)
            algebra_failures += not ok_one

    ok = (all(r_["ok"] for r_ in rows) and consistency_ok
          and algebra_failures == 0)
    summary = {
        "name": "oracle_suite", "version": _package_version(), "seed": seed,
        "profiles": len(rows),
        "max_residual": max(r_["max_residual"] for r_ in rows),
        "branch_consistency_ball": gap_ball,
        "branch_consistency_drift": gap_drift,
        "operator_algebra_failures": algebra_failures,
        "ok": ok,
    }
    return ReportBundle(summary=summary, tables={"oracle": rows}, ok=ok)


def _add_common(parser):
    parser.add_argument("--config", help="TOML or JSON experiment config")
    parser.add_argument("--preset",
                        help=f"preset name ({', '.join(sorted(PRESETS))})")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--sequential", action="store_true",
                        help="node-by-node lexicographic sweeps")


def _finish(bundle, args):
    if args.out:
        bundle.write(args.out)
    print(json.dumps(bundle.summary, sort_keys=True, indent=1))
    return 0 if bundle.ok else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="singelliptic",
        description="Experiments for singular degenerate elliptic problems "
                    "on ball-intersection domains")
    subs = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "probe", "study", "scan", "oracle"):
        sp = subs.add_parser(name)
        _add_common(sp)
        if name == "scan":
            sp.add_argument("--b-values", default=None,
                            help="comma-separated drift strengths")
    args = parser.parse_args(argv)

    try:
        if args.command == "oracle":
            return _finish(_run_oracle_suite(seed=args.seed or 0), args)
        if args.preset:
            bundle = run_preset(args.preset, out_dir=args.out, seed=args.seed,
                                sequential=args.sequential)
            print(json.dumps(bundle.summary, sort_keys=True, indent=1))
            return 0 if bundle.ok else 2
        if not args.config:
            raise ConfigError("cli", "need --preset or --config")
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.sequential:
            cfg.sweep_mode = "lex"
        if args.command == "scan":
            b_values = None
            if args.b_values:
                b_values = [float(v) for v in args.b_values.split(",")]
            bundle = threshold_scan(cfg, b_values)
        else:
            cfg.mode = {"solve": "solve", "probe": "probe",
                        "study": "convergence_study"}.get(args.command, cfg.mode)
            bundle = run(cfg)
        return _finish(bundle, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SingEllipticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
