"""Riemannian trust-region solver on the product-of-circles manifold.

The outer loop follows the classic trust-region template: solve a
quadratic model on the tangent space inside radius Delta, score the step
by the ratio of actual to predicted decrease, shrink the radius on a poor
ratio (quartered below 1/4), grow it (doubled, capped) on a good ratio
that pinned the boundary, and accept the retracted step when the ratio
clears the acceptance threshold. The subproblem is solved by
Steihaug-Toint truncated conjugate gradients with the standard
(kappa, theta) residual rule, stopping early on negative curvature or a
boundary crossing by moving to the boundary along the current direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from . import manifold
from .model import check_unimodular
from .quartic import PenaltyAnchor, QuarticObjective, cost, egrad, ehess_vec

__all__ = ["RtrConfig", "RtrIteration", "RtrTrace", "TcgResult", "rtr_minimize", "tcg"]


@dataclass
class RtrConfig:
    """Trust-region controls.

    delta_bar defaults to sqrt(K) and delta0 to delta_bar/8, both resolved
    at solve time when left as None. max_iters None means no iteration cap
    (exit on the gradient tolerance alone). tcg_max_iters defaults to K.
    """

    delta_bar: float | None = None
    delta0: float | None = None
    chi_accept: float = 0.1
    grad_tol: float = 1e-6
    max_iters: int | None = 10000
    tcg_kappa: float = 0.1
    tcg_theta: float = 1.0
    tcg_max_iters: int | None = None

    def resolved(self, k: int) -> "RtrConfig":
        """Fill K-dependent defaults and validate."""
        delta_bar = sqrt(k) if self.delta_bar is None else float(self.delta_bar)
        delta0 = delta_bar / 8.0 if self.delta0 is None else float(self.delta0)
        cfg = RtrConfig(delta_bar, delta0, self.chi_accept, self.grad_tol,
                        self.max_iters, self.tcg_kappa, self.tcg_theta,
                        self.tcg_max_iters if self.tcg_max_iters is not None else k)
        if not 0 < cfg.delta0 <= cfg.delta_bar:
            raise ValueError("need 0 < delta0 <= delta_bar")
        if not 0 <= cfg.chi_accept < 0.25:
            raise ValueError("acceptance threshold must lie in [0, 1/4)")
        if not 0 < cfg.tcg_kappa < 1:
            raise ValueError("tcg_kappa must lie in (0, 1)")
        if not cfg.tcg_theta > 0:
            raise ValueError("tcg_theta must be positive")
        return cfg


@dataclass(frozen=True)
class TcgResult:
    step: np.ndarray
    hit_boundary: bool
    model_decrease: float
    iterations: int
    reason: str


@dataclass(frozen=True)
class RtrIteration:
    cost: float
    grad_norm: float
    radius: float
    chi: float
    accepted: bool
    tcg_iters: int
    tcg_reason: str


@dataclass
class RtrTrace:
    iterations: list = field(default_factory=list)
    stop_reason: str = ""
    final_cost: float = float("nan")
    final_grad_norm: float = float("nan")


def _boundary_tau(step, d, delta: float) -> float:
    # positive root of ||step + tau d||^2 = delta^2
    a = manifold.inner(d, d)
    b = 2.0 * manifold.inner(step, d)
    c = manifold.inner(step, step) - delta * delta
    return (-b + sqrt(max(b * b - 4.0 * a * c, 0.0))) / (2.0 * a)


def tcg(s, g, hvp, delta: float, *, kappa: float = 0.1, theta: float = 1.0,
        max_iters: int | None = None) -> TcgResult:
    """Approximately minimize <g, x> + 1/2 <H x, x> over ||x|| <= delta.

    g must be tangent at s and hvp a self-adjoint tangent-linear operator.
    Starts from x = 0, so the result never does worse than the Cauchy
    point. Stops on (a) the residual rule ||r|| <= ||r0|| min(kappa,
    ||r0||^theta), (b) nonpositive curvature along the search direction,
    or (c) a trust-region boundary crossing; in (b) and (c) the step is
    placed exactly on the boundary.
    """
    if delta <= 0:
        raise ValueError("trust radius must be positive")
    g = np.asarray(g, dtype=complex)
    if not manifold.is_tangent(s, g, tol=1e-8 * (1.0 + float(np.max(np.abs(g))))):
        raise ValueError("model gradient is not tangent at the base point")

    step = np.zeros_like(g)
    r = g.copy()
    r0_norm = manifold.norm(r)
    if r0_norm == 0.0:
        return TcgResult(step, False, 0.0, 0, "zero gradient")
    threshold = r0_norm * min(kappa, r0_norm ** theta)
    d = -r
    rr = r0_norm ** 2
    limit = max_iters if max_iters is not None else g.shape[0]

    def finish(x, boundary, iters, reason):
        x = manifold.project(s, x)
        mdec = -(manifold.inner(g, x) + 0.5 * manifold.inner(hvp(x), x))
        return TcgResult(x, boundary, mdec, iters, reason)

    for j in range(1, limit + 1):
        # re-projection costs O(K) and stops tangency drift over long recurrences
        d = manifold.project(s, d)
        hd = hvp(d)
        curv = manifold.inner(d, hd)
        if curv <= 0:
            tau = _boundary_tau(step, d, delta)
            return finish(step + tau * d, True, j, "negative curvature")
        alpha = rr / curv
        cand = step + alpha * d
        if manifold.norm(cand) >= delta:
            tau = _boundary_tau(step, d, delta)
            return finish(step + tau * d, True, j, "boundary")
        step = cand
        r = r + alpha * hd
        rr_new = manifold.inner(r, r)
        if sqrt(rr_new) <= threshold:
            return finish(step, False, j, "residual tolerance")
        d = -r + (rr_new / rr) * d
        rr = rr_new
    return finish(step, False, limit, "max inner iterations")


def rtr_minimize(obj: QuarticObjective, anchor: PenaltyAnchor | None, s0,
                 cfg: RtrConfig | None = None):
    """Trust-region descent of the (optionally penalized) quartic cost.

    Returns the final unimodular iterate and a trace with one record per
    outer iteration. Accepted steps always decrease the cost; the model
    ratio chi is safeguarded when its denominator underflows (treated as
    a perfect step if the actual decrease is nonnegative, rejected with a
    radius shrink otherwise).
    """
    s = check_unimodular(s0, name="initial code")
    cfg = (cfg or RtrConfig()).resolved(s.shape[0])
    delta = cfg.delta0
    trace = RtrTrace()
    h = cost(s, obj, anchor)

    j = 0
    while True:
        eg = egrad(s, obj, anchor)
        g = manifold.rgrad(s, eg)
        gnorm = manifold.norm(g)
        if gnorm <= cfg.grad_tol:
            trace.stop_reason = "gradient tolerance"
            break
        if cfg.max_iters is not None and j >= cfg.max_iters:
            trace.stop_reason = "max iterations"
            break

        def hvp(xi):
            return manifold.rhess_vec(s, eg, ehess_vec(s, xi, obj, anchor), xi)

        sub = tcg(s, g, hvp, delta, kappa=cfg.tcg_kappa, theta=cfg.tcg_theta,
                  max_iters=cfg.tcg_max_iters)
        s_new = manifold.retract(s, sub.step)
        h_new = cost(s_new, obj, anchor)
        actual = h - h_new

        if sub.model_decrease <= 1e-16:
            chi = 1.0 if actual >= 0 else -np.inf
        else:
            chi = actual / sub.model_decrease

        radius_used = delta
        if chi < 0.25:
            delta = delta / 4.0
        elif chi > 0.75 and manifold.norm(sub.step) >= 0.99 * radius_used:
            delta = min(2.0 * delta, cfg.delta_bar)

        accepted = chi > cfg.chi_accept
        trace.iterations.append(RtrIteration(h, gnorm, radius_used, float(chi),
                                             accepted, sub.iterations, sub.reason))
        if accepted:
            s, h = s_new, h_new
        j += 1

    trace.final_cost = h
    trace.final_grad_norm = gnorm
    return s, trace
