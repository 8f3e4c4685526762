"""Alternating-direction penalty loop around the trust-region solver.

The constant-modulus problem min f(s) is split by a consensus copy s0:
min f(s) s.t. s = s0, |s0[k]| = 1. Each outer iteration solves the s0
block in closed form (componentwise phase alignment of rho s - u), then
descends the penalized cost f(s) + (rho/2) ||s - v||^2 with
v = s0 + u/rho by a warm-started trust-region run, and finally updates
the penalty factor and the capped multiplier. Termination combines a
primal residual ||s0 - s|| and a dual residual rho0 ||s0_prev - s0||
against absolute-plus-relative tolerances.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .model import check_unimodular
from .quartic import PenaltyAnchor, QuarticObjective, cost, phi_apply
from .rtr import RtrConfig, rtr_minimize

__all__ = [
    "AdpmConfig",
    "AdpmReport",
    "AdpmState",
    "adpm_solve",
    "init_penalty",
    "tolerances",
    "update_multiplier",
    "update_penalty",
    "update_s0",
]


@dataclass
class AdpmConfig:
    """Outer-loop controls.

    delta1 just below 1 and delta2 just above 1 drive the penalty
    schedule; w_max caps the multiplier moduli. The inner trust-region
    budget defaults to 30 iterations per outer step.
    """

    delta1: float = 0.97
    delta2: float = 1.03
    w_max: float = 1e4
    eps_abs: float = 1e-6
    eps_rel: float = 1e-4
    inner: RtrConfig = field(default_factory=lambda: RtrConfig(max_iters=30))
    outer_max_iters: int = 300
    rho0_override: float | None = None

    def validate(self):
        if not 0 < self.delta1 < 1 < self.delta2:
            raise ValueError("need 0 < delta1 < 1 < delta2")
        if not self.w_max > 0:
            raise ValueError("multiplier cap must be positive")
        if self.eps_abs <= 0 or self.eps_rel < 0:
            raise ValueError("tolerances must be positive (eps_rel may be zero)")
        if self.outer_max_iters < 1:
            raise ValueError("need at least one outer iteration")
        if self.rho0_override is not None and not self.rho0_override > 0:
            raise ValueError("penalty override must be positive")


@dataclass
class AdpmState:
    s: np.ndarray
    s0: np.ndarray
    u: np.ndarray
    rho: float
    iteration: int = 0
    primal_residual: float = float("inf")
    dual_residual: float = float("inf")


@dataclass
class AdpmReport:
    """Traces and summary metrics of one outer solve."""

    cost_trace: list = field(default_factory=list)
    primal_residuals: list = field(default_factory=list)
    dual_residuals: list = field(default_factory=list)
    rho_trace: list = field(default_factory=list)
    sir_initial: float = float("nan")
    sir_final: float = float("nan")
    rho0: float = float("nan")
    outer_iterations: int = 0
    inner_iterations_total: int = 0
    stop_reason: str = ""
    wall_time_s: float = 0.0
    inner_traces: list = field(default_factory=list)


def init_penalty(obj: QuarticObjective) -> float:
    """Geometric-mean penalty seed sqrt(lam_max lam_min) of the Gram matrix.

    The Gram matrix M = sum_i Phi_i^H Phi_i is assembled densely once
    through the matrix-free bin applies and eigendecomposed; lam_min is
    the smallest eigenvalue above 1e-3 (tiny eigenvalues are treated as
    numerically zero). Raises when no eigenvalue clears that floor.
    """
    k = obj.k
    m = np.zeros((k, k), dtype=complex)
    eye = np.eye(k, dtype=complex)
    for b in obj.bins:
        phi = np.column_stack([phi_apply(b, eye[:, n]) for n in range(k)])
        m += phi.conj().T @ phi
    lams = np.linalg.eigvalsh(m)
    big = lams[lams > 1e-3]
    if big.size == 0:
        raise ValueError("degenerate objective: Gram matrix has no eigenvalue "
                         "above 1e-3")
    return float(np.sqrt(big[-1] * big[0]))


def update_s0(s, u, rho: float, s0_prev) -> np.ndarray:
    """Closed-form consensus update: phase of c = rho s - u, componentwise.

    Components with |c| below 1e-14 keep their previous phase (any phase
    is optimal there; retaining the old one keeps the run deterministic).
    """
    c = rho * np.asarray(s, dtype=complex) - np.asarray(u, dtype=complex)
    mag = np.abs(c)
    out = np.array(s0_prev, dtype=complex, copy=True)
    ok = mag >= 1e-14
    out[ok] = c[ok] / mag[ok]
    return out


def update_penalty(rho: float, dr: float, dr_prev: float, cfg: AdpmConfig) -> float:
    """Keep rho while the primal residual shrinks fast enough, else grow it."""
    if dr <= cfg.delta1 * dr_prev:
        return rho
    return rho * cfg.delta2


def update_multiplier(u, rho: float, s0, s, w_max: float) -> np.ndarray:
    """Dual ascent u + rho (s0 - s), renormalized when any modulus exceeds w_max."""
    u_bar = np.asarray(u, dtype=complex) + rho * (np.asarray(s0, dtype=complex)
                                                  - np.asarray(s, dtype=complex))
    u_max = float(np.max(np.abs(u_bar)))
    if u_max <= w_max:
        return u_bar
    return u_bar / u_max


def tolerances(state: AdpmState, cfg: AdpmConfig):
    """Absolute-plus-relative feasibility tolerances (eps_pri, eps_dual).

    The dimension factor is sqrt(2K), viewing a complex K-vector as 2K
    reals.
    """
    root = np.sqrt(2.0 * state.s.shape[0])
    eps_pri = root * cfg.eps_abs + cfg.eps_rel * max(
        float(np.linalg.norm(state.s)), float(np.linalg.norm(state.s0)))
    eps_dual = root * cfg.eps_abs + cfg.eps_rel * float(np.linalg.norm(state.s0))
    return float(eps_pri), float(eps_dual)


def adpm_solve(obj: QuarticObjective, s_init, cfg: AdpmConfig | None = None):
    """Run the full outer loop; returns (s_star, report).

    Starts from s = s0 = s_init with a zero multiplier and the
    eigenvalue-seeded penalty (unless overridden). Stops when both
    residuals clear their tolerances or the outer iteration cap is hit.
    The literal safeguard of halving rho when the penalized inner cost
    evaluates nonpositive is kept, although a sum of squared moduli plus
    a nonnegative penalty can only trip it at exactly zero.
    """
    cfg = cfg or AdpmConfig()
    cfg.validate()
    s = check_unimodular(s_init, name="initial code")
    if len(obj) == 0:
        raise ValueError("cannot optimize an empty objective")
    k = s.shape[0]

    t_start = time.perf_counter()
    rho0 = cfg.rho0_override if cfg.rho0_override is not None else init_penalty(obj)
    state = AdpmState(s=s, s0=s.copy(), u=np.zeros(k, dtype=complex), rho=rho0)

    report = AdpmReport(rho0=rho0)
    f_init = cost(s, obj)
    report.cost_trace.append(f_init)
    report.sir_initial = float(k * k) / f_init if f_init > 0 else float("inf")

    dr_prev = float("inf")
    report.stop_reason = "outer iteration cap"
    for it in range(1, cfg.outer_max_iters + 1):
        state.iteration = it
        s0_prev = state.s0
        state.s0 = update_s0(state.s, state.u, state.rho, s0_prev)

        anchor = PenaltyAnchor(state.rho, state.s0 + state.u / state.rho)
        state.s, inner_trace = rtr_minimize(obj, anchor, state.s, cfg.inner)
        report.inner_traces.append(inner_trace)
        report.inner_iterations_total += len(inner_trace.iterations)
        if cost(state.s, obj, anchor) <= 0.0:
            state.rho = 0.5 * state.rho

        dr = float(np.linalg.norm(state.s0 - state.s))
        state.rho = update_penalty(state.rho, dr, dr_prev, cfg)
        state.u = update_multiplier(state.u, state.rho, state.s0, state.s, cfg.w_max)
        dr_prev = dr

        state.primal_residual = dr
        state.dual_residual = rho0 * float(np.linalg.norm(s0_prev - state.s0))
        eps_pri, eps_dual = tolerances(state, cfg)

        report.cost_trace.append(cost(state.s, obj))
        report.primal_residuals.append(state.primal_residual)
        report.dual_residuals.append(state.dual_residual)
        report.rho_trace.append(state.rho)

        if state.primal_residual <= eps_pri and state.dual_residual <= eps_dual:
            report.stop_reason = "residual tolerances"
            break

    report.outer_iterations = state.iteration
    f_final = report.cost_trace[-1]
    report.sir_final = float(k * k) / f_final if f_final > 0 else float("inf")
    report.wall_time_s = time.perf_counter() - t_start
    return state.s, report
