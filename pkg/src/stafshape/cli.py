"""Command-line front end.

Subcommands:
  optimize --config cfg.json [--out DIR]   run a design problem end to end
  selfcheck                                run the built-in numerical checks
  scene --id {1,2} --out FILE              dump a benchmark scene as CSV

The config file is JSON; see the README for the schema. Artifacts written
per run: staf_init.csv and staf_final.csv (K x Nv grids of peak-normalized
dB values, 6 decimals), code_final.csv (index,real,imag at 17 significant
digits), cuts_r<idx>.csv for every range bin touching the interference
support, and summary.json. Wall-clock timing goes to timing.json so that
summary.json stays byte-identical across repeated runs of the same
config; batch mode adds per-seed subdirectories and batch_summary.json.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import manifold, model, quartic
from .adpm import AdpmConfig, adpm_solve
from .model import InterferenceMap, staf_grid, staf_to_db
from .quartic import QuarticObjective, cost, egrad, ehess_vec
from .rtr import RtrConfig, rtr_minimize
from .scenarios import SceneId, p4_code, random_unimodular, scene_map

__all__ = ["RunConfig", "load_config", "main", "run_optimize", "run_self_check"]


@dataclass
class RunConfig:
    k: int
    nv: int
    scene: SceneId | None
    inline_bins: tuple | None
    init_kind: str            # "p4" | "random" | "file"
    init_seed: int | None
    init_path: str | None
    algorithm: str            # "adpm_rtr" | "rtr_only"
    adpm: AdpmConfig
    rtr: RtrConfig
    batch_seeds: tuple | None
    output_dir: str | None

    def interference_map(self) -> InterferenceMap:
        if self.scene is not None:
            return scene_map(self.scene, self.k, self.nv)
        return InterferenceMap(self.k, self.nv, self.inline_bins)

    def initial_code(self, seed=None) -> np.ndarray:
        if seed is not None:
            return random_unimodular(self.k, seed)
        if self.init_kind == "p4":
            return p4_code(self.k)
        if self.init_kind == "random":
            return random_unimodular(self.k, self.init_seed)
        return _read_code_csv(Path(self.init_path), self.k)


_ADPM_KEYS = {"delta1", "delta2", "w_max", "eps_abs", "eps_rel",
              "outer_max_iters", "rho0", "inner_max_iters"}
_RTR_KEYS = {"delta_bar", "delta0", "chi_accept", "grad_tol", "max_iters",
             "tcg_kappa", "tcg_theta", "tcg_max_iters"}


def load_config(data: dict) -> RunConfig:
    """Build a validated RunConfig from parsed JSON."""
    try:
        k = int(data["K"])
        nv = int(data["Nv"])
    except KeyError as exc:
        raise ValueError(f"config is missing required key {exc}") from None

    scene_val = data.get("scene")
    scene = None
    inline = None
    if isinstance(scene_val, dict) and "bins" in scene_val:
        inline = tuple((int(r), int(h), float(w)) for r, h, w in scene_val["bins"])
    elif scene_val in (1, 2):
        scene = SceneId(scene_val)
    else:
        raise ValueError("config key 'scene' must be 1, 2 or {\"bins\": [[r,h,w],...]}")

    init = data.get("init", "p4")
    init_seed = None
    init_path = None
    if init == "p4":
        init_kind = "p4"
    elif isinstance(init, dict) and "random" in init:
        init_kind, init_seed = "random", int(init["random"])
    elif isinstance(init, dict) and "file" in init:
        init_kind, init_path = "file", str(init["file"])
    else:
        raise ValueError("config key 'init' must be \"p4\", {\"random\": seed} "
                         "or {\"file\": path}")

    algorithm = data.get("algorithm", "adpm_rtr")
    if algorithm not in ("adpm_rtr", "rtr_only"):
        raise ValueError(f"unknown algorithm {algorithm!r}")

    rtr_over = dict(data.get("rtr", {}))
    if bad := set(rtr_over) - _RTR_KEYS:
        raise ValueError(f"unknown rtr option(s): {sorted(bad)}")
    rtr_cfg = RtrConfig(**rtr_over)

    adpm_over = dict(data.get("adpm", {}))
    if bad := set(adpm_over) - _ADPM_KEYS:
        raise ValueError(f"unknown adpm option(s): {sorted(bad)}")
    inner_max = adpm_over.pop("inner_max_iters", 30)
    rho0 = adpm_over.pop("rho0", None)
    adpm_cfg = AdpmConfig(inner=replace(rtr_cfg, max_iters=inner_max),
                          rho0_override=rho0, **adpm_over)

    batch = data.get("batch_seeds")
    if batch is not None:
        batch = tuple(int(x) for x in batch)
        if not batch:
            raise ValueError("batch_seeds must be a non-empty list when present")

    return RunConfig(k=k, nv=nv, scene=scene, inline_bins=inline,
                     init_kind=init_kind, init_seed=init_seed, init_path=init_path,
                     algorithm=algorithm, adpm=adpm_cfg, rtr=rtr_cfg,
                     batch_seeds=batch, output_dir=data.get("output_dir"))


def _read_code_csv(path: Path, k: int) -> np.ndarray:
    rows = [line.strip() for line in path.read_text().splitlines() if line.strip()]
    if rows and rows[0].lower().startswith("index"):
        rows = rows[1:]
    vals = np.full(k, np.nan, dtype=complex)
    for row in rows:
        idx, re_part, im_part = row.split(",")
        vals[int(idx)] = float(re_part) + 1j * float(im_part)
    if np.any(np.isnan(vals)):
        raise ValueError(f"code file {path} does not cover all {k} entries")
    return vals


def _write_grid_csv(path: Path, grid: np.ndarray):
    lines = [",".join(f"{v:.6f}" for v in row) for row in grid]
    path.write_text("\n".join(lines) + "\n")


def _write_code_csv(path: Path, s: np.ndarray):
    lines = ["index,real,imag"]
    lines += [f"{i},{v.real:.17g},{v.imag:.17g}" for i, v in enumerate(s)]
    path.write_text("\n".join(lines) + "\n")


def _mean_support_db(grid_db: np.ndarray, imap: InterferenceMap) -> float:
    vals = [grid_db[r, h] for r, h, w in imap.support if w > 0]
    return float(np.mean(vals))


def _config_echo(config: RunConfig) -> dict:
    return {
        "K": config.k,
        "Nv": config.nv,
        "scene": config.scene.value if config.scene else "inline",
        "inline_bins": [list(b) for b in config.inline_bins] if config.inline_bins else None,
        "init": {"kind": config.init_kind, "seed": config.init_seed,
                 "path": config.init_path},
        "algorithm": config.algorithm,
        "adpm": {"delta1": config.adpm.delta1, "delta2": config.adpm.delta2,
                 "w_max": config.adpm.w_max, "eps_abs": config.adpm.eps_abs,
                 "eps_rel": config.adpm.eps_rel,
                 "outer_max_iters": config.adpm.outer_max_iters,
                 "inner_max_iters": config.adpm.inner.max_iters,
                 "rho0_override": config.adpm.rho0_override},
        "rtr": {"delta_bar": config.rtr.delta_bar, "delta0": config.rtr.delta0,
                "chi_accept": config.rtr.chi_accept, "grad_tol": config.rtr.grad_tol,
                "max_iters": config.rtr.max_iters, "tcg_kappa": config.rtr.tcg_kappa,
                "tcg_theta": config.rtr.tcg_theta,
                "tcg_max_iters": config.rtr.tcg_max_iters},
        "batch_seeds": list(config.batch_seeds) if config.batch_seeds else None,
    }


def _run_single(config: RunConfig, out_dir: Path, seed=None) -> dict:
    """One full solve plus artifact emission; returns the summary dict."""
    out_dir.mkdir(parents=True, exist_ok=True)
    imap = config.interference_map()
    obj = QuarticObjective.from_map(imap)
    if len(obj) == 0:
        raise ValueError("interference map has no strictly positive weight")
    s_init = config.initial_code(seed=seed)
    if s_init.shape[0] != config.k:
        raise ValueError(f"initial code length {s_init.shape[0]} != K={config.k}")

    if config.algorithm == "adpm_rtr":
        s_final, report = adpm_solve(obj, s_init, config.adpm)
        outer = report.outer_iterations
        inner = report.inner_iterations_total
        stop = report.stop_reason
        primal = report.primal_residuals
        dual = report.dual_residuals
        cost_trace = report.cost_trace
        rho0 = report.rho0
        wall = report.wall_time_s
    else:
        import time as _time
        t0 = _time.perf_counter()
        s_final, trace = rtr_minimize(obj, None, s_init, config.rtr)
        wall = _time.perf_counter() - t0
        outer = 0
        inner = len(trace.iterations)
        stop = trace.stop_reason
        primal = []
        dual = []
        cost_trace = [rec.cost for rec in trace.iterations] + [trace.final_cost]
        rho0 = None

    k = config.k
    grid_init_db = staf_to_db(staf_grid(s_init, config.nv), k)
    grid_final_db = staf_to_db(staf_grid(s_final, config.nv), k)
    _write_grid_csv(out_dir / "staf_init.csv", grid_init_db)
    _write_grid_csv(out_dir / "staf_final.csv", grid_final_db)
    _write_code_csv(out_dir / "code_final.csv", s_final)

    doppler = model.DopplerGrid(config.nv).values()
    for r in sorted({r for r, h, w in imap.support if w > 0}):
        lines = ["v,init_db,final_db"]
        lines += [f"{doppler[h]:.6f},{grid_init_db[r, h]:.6f},{grid_final_db[r, h]:.6f}"
                  for h in range(config.nv)]
        (out_dir / f"cuts_r{r}.csv").write_text("\n".join(lines) + "\n")

    f_init = cost(s_init, obj)
    f_final = cost(s_final, obj)
    summary = {
        "algorithm": config.algorithm,
        "K": k,
        "Nv": config.nv,
        "initial_cost": f_init,
        "final_cost": f_final,
        "initial_sir": k * k / f_init,
        "final_sir": k * k / f_final,
        "initial_sir_db": 10.0 * np.log10(k * k / f_init),
        "final_sir_db": 10.0 * np.log10(k * k / f_final),
        "mean_suppressed_staf_db_initial": _mean_support_db(grid_init_db, imap),
        "mean_suppressed_staf_db_final": _mean_support_db(grid_final_db, imap),
        "outer_iterations": outer,
        "inner_iterations_total": inner,
        "stop_reason": stop,
        "rho0": rho0,
        "cost_trace": cost_trace,
        "primal_residuals": primal,
        "dual_residuals": dual,
        "seed": seed,
        "config": _config_echo(config),
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")
    (out_dir / "timing.json").write_text(
        json.dumps({"wall_time_s": wall}, indent=2, sort_keys=True) + "\n")
    summary["wall_time_s"] = wall
    return summary


def run_optimize(config: RunConfig, out_dir) -> dict:
    """Run a config (batch-aware) and write all artifacts under out_dir."""
    out_dir = Path(out_dir)
    if config.batch_seeds is None:
        return _run_single(config, out_dir)

    sirs, walls, per_seed = [], [], {}
    for seed in config.batch_seeds:
        summary = _run_single(config, out_dir / f"seed_{seed}", seed=seed)
        sirs.append(summary["final_sir"])
        walls.append(summary["wall_time_s"])
        per_seed[str(seed)] = {"final_sir": summary["final_sir"],
                               "final_cost": summary["final_cost"]}
    batch = {
        "seeds": list(config.batch_seeds),
        "final_sir_mean": float(np.mean(sirs)),
        "final_sir_std": float(np.std(sirs)),
        "wall_time_s_mean": float(np.mean(walls)),
        "wall_time_s_std": float(np.std(walls)),
        "per_seed": per_seed,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "batch_summary.json").write_text(
        json.dumps(batch, indent=2, sort_keys=True) + "\n")
    return batch


# --- self check ---------------------------------------------------------

def run_self_check(corrupt: str | None = None):
    """Fast numerical release gate at K=8; returns [(name, passed, detail)].

    The corrupt argument is a test hook that deliberately perturbs one
    quantity so the corresponding check must fail.
    """
    k, nv = 8, 8
    rng = np.random.default_rng(20240707)
    bins = [(1, 5, 1.0), (2, 6, 1.0), (3, 1, 1.0), (0, 2, 1.0), (4, 7, 1.0)]
    imap = InterferenceMap(k, nv, tuple(bins))
    obj = QuarticObjective.from_map(imap)
    results = []

    def record(name, err, tol):
        results.append((name, bool(err <= tol), f"err={err:.3e} tol={tol:.0e}"))

    def rand_code():
        return np.exp(2j * np.pi * rng.random(k))

    def rand_tangent(s):
        return manifold.project(s, rng.standard_normal(k) + 1j * rng.standard_normal(k))

    # gradient against central differences over real/imaginary coordinates
    s = rand_code()
    g = egrad(s, obj)
    if corrupt == "egrad":
        g = g + 1e-3
    step = 1e-6
    fd = np.zeros(k, dtype=complex)
    for i in range(k):
        e = np.zeros(k, dtype=complex)
        e[i] = step
        d_re = (cost(s + e, obj) - cost(s - e, obj)) / (2 * step)
        e[i] = 1j * step
        d_im = (cost(s + e, obj) - cost(s - e, obj)) / (2 * step)
        fd[i] = d_re + 1j * d_im
    record("egrad finite-difference",
           np.linalg.norm(fd - g) / np.linalg.norm(g), 1e-6)

    # Hessian product against gradient differences
    d = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    hv = ehess_vec(s, d, obj)
    t = 1e-5
    fd_h = (egrad(s + t * d, obj) - egrad(s - t * d, obj)) / (2 * t)
    record("ehess finite-difference",
           np.linalg.norm(fd_h - hv) / np.linalg.norm(hv), 1e-5)

    # Riemannian gradient along retraction curves
    xi = rand_tangent(s)
    rg = manifold.rgrad(s, egrad(s, obj))
    eps = 1e-6
    fd_dir = (cost(manifold.retract(s, eps * xi), obj)
              - cost(manifold.retract(s, -eps * xi), obj)) / (2 * eps)
    record("rgrad retraction finite-difference",
           abs(fd_dir - manifold.inner(rg, xi)) / max(abs(fd_dir), 1e-30), 1e-5)

    # Riemannian Hessian quadratic form via second differences
    eg = egrad(s, obj)
    rh = manifold.rhess_vec(s, eg, ehess_vec(s, xi, obj), xi)
    t2 = 1e-4
    quad_fd = (cost(manifold.retract(s, t2 * xi), obj) - 2 * cost(s, obj)
               + cost(manifold.retract(s, -t2 * xi), obj)) / (t2 * t2)
    record("rhess retraction finite-difference",
           abs(quad_fd - manifold.inner(rh, xi)) / max(abs(quad_fd), 1e-30), 1e-4)

    # projector and retraction identities
    z = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    p1 = manifold.project(s, z)
    ident_err = max(
        float(np.max(np.abs(np.real(np.conj(s) * p1)))),
        float(np.linalg.norm(manifold.project(s, p1) - p1)),
    )
    record("projector idempotence/tangency", ident_err, 1e-12)
    r_err = max(
        float(np.max(np.abs(np.abs(manifold.retract(s, xi)) - 1.0))),
        float(np.linalg.norm(manifold.retract(s, np.zeros(k)) - s)),
    )
    record("retraction unimodularity/centering", r_err, 1e-14)

    # cost-form equivalence and the SIR identity
    s2 = rand_code()
    dp = model.disturbance_power(s2, imap, 0.0)
    f2 = cost(s2, obj)
    record("cost equivalence (disturbance power vs quartic)",
           abs(dp - f2) / f2, 1e-12)
    record("sir-cost identity",
           abs(model.sir(s2, imap) * f2 - k * k) / (k * k), 1e-9)

    return results


# --- entry points -------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stafshape",
        description="Design constant-modulus slow-time radar codes by "
                    "suppressing the slow-time ambiguity function over an "
                    "interference map.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="run a design problem from a JSON config")
    p_opt.add_argument("--config", required=True, help="path to the JSON config")
    p_opt.add_argument("--out", default=None, help="output directory "
                       "(overrides output_dir in the config)")

    sub.add_parser("selfcheck", help="run the built-in numerical checks")

    p_scene = sub.add_parser("scene", help="dump a benchmark scene map as CSV")
    p_scene.add_argument("--id", type=int, required=True, choices=(1, 2))
    p_scene.add_argument("--out", required=True, help="output CSV path")

    args = parser.parse_args(argv)

    if args.command == "selfcheck":
        results = run_self_check()
        for name, ok, detail in results:
            print(f"{'pass' if ok else 'FAIL'}  {name}  ({detail})")
        return 0 if all(ok for _, ok, _ in results) else 1

    if args.command == "scene":
        imap = scene_map(SceneId(args.id))
        lines = ["r,h,weight"]
        lines += [f"{r},{h},{w:.17g}" for r, h, w in imap.support]
        Path(args.out).write_text("\n".join(lines) + "\n")
        return 0

    # optimize
    try:
        data = json.loads(Path(args.config).read_text())
        config = load_config(data)
        out_dir = args.out or config.output_dir
        if out_dir is None:
            raise ValueError("no output directory: set output_dir in the config "
                             "or pass --out")
        summary = run_optimize(config, out_dir)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if "final_sir" in summary:
        print(f"final SIR {summary['final_sir']:.4f} "
              f"({summary['final_sir_db']:.2f} dB), artifacts in {out_dir}")
    else:
        print(f"batch of {len(summary['seeds'])} seeds, "
              f"mean final SIR {summary['final_sir_mean']:.4f}, "
              f"artifacts in {out_dir}")
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
