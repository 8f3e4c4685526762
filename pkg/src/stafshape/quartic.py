"""Quartic interference objective and its matrix-free derivatives.

The objective is f(s) = sum_i |s^H Phi_i s|^2 with one operator
Phi_i x = sqrt(w_i) J_{r_i} (p(v_i) . x) per active interference bin,
optionally plus a proximal penalty (rho/2) ||s - v||^2 contributed by the
outer splitting loop. Nothing is ever materialized as a matrix: each bin
costs O(K), and bins sharing a delay r collapse into a single stacked
matrix-vector product.

Key scalar per bin: a_i = s^H Phi_i s. The gradient and Hessian-vector
product are linear combinations of Phi_i s, Phi_i^H s, Phi_i d, Phi_i^H d
with coefficients built from a_i and the mixed forms d^H Phi_i s,
s^H Phi_i d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import InterferenceMap, doppler_value, shift_apply, shift_apply_adjoint, steering_vector

__all__ = [
    "PenaltyAnchor",
    "PhiBin",
    "QuarticObjective",
    "cost",
    "egrad",
    "ehess_vec",
    "phi_apply",
    "phi_apply_adjoint",
]


@dataclass(frozen=True)
class PhiBin:
    """One interference bin operator, identified by (delay r, Doppler v, weight).

    The stored weight is p(r,h); the operator applies sqrt(weight).
    """

    r: int
    v: float
    weight: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("delay must be nonnegative")
        if not self.weight > 0:
            raise ValueError("zero-weight bins do not belong to the support")


def phi_apply(bin_: PhiBin, x) -> np.ndarray:
    """Apply Phi = sqrt(w) J_r diag(p(v)) to x in O(K)."""
    x = np.asarray(x, dtype=complex)
    t = np.sqrt(bin_.weight) * (steering_vector(bin_.v, x.shape[0]) * x)
    return shift_apply(bin_.r, t)


def phi_apply_adjoint(bin_: PhiBin, x) -> np.ndarray:
    """Apply Phi^H = sqrt(w) diag(conj(p(v))) J_r^H to x in O(K)."""
    x = np.asarray(x, dtype=complex)
    t = shift_apply_adjoint(bin_.r, x)
    return np.sqrt(bin_.weight) * np.conj(steering_vector(bin_.v, x.shape[0])) * t


class QuarticObjective:
    """Active bins of an interference map, prepared for fast evaluation.

    Bins are held in canonical order (ascending delay, then ascending
    Doppler) and grouped by delay: for a group at delay r the rows
    sqrt(w) p(v)[:K-r] are stacked so that all bin scalars a_i of the
    group come from one matrix-vector product against
    s[:K-r] * conj(s[r:]).

    An empty bin list is permitted (the objective degenerates to the
    penalty term only); optimization entry points reject it separately.
    """

    def __init__(self, k: int, bins):
        bins = tuple(sorted(bins, key=lambda b: (b.r, b.v)))
        for b in bins:
            if b.r > k - 1:
                raise ValueError(f"bin delay {b.r} out of range for K={k}")
        self.k = int(k)
        self.bins = bins
        self._groups = []
        for r in sorted({b.r for b in bins}):
            rows = np.array([np.sqrt(b.weight) * steering_vector(b.v, k)[: k - r]
                             for b in bins if b.r == r])
            self._groups.append((r, rows))

    @classmethod
    def from_map(cls, imap: InterferenceMap) -> "QuarticObjective":
        bins = [PhiBin(r, doppler_value(h, imap.nv), w)
                for r, h, w in imap.support if w > 0]
        return cls(imap.k, bins)

    def __len__(self):
        return len(self.bins)


@dataclass(frozen=True)
class PenaltyAnchor:
    """Proximal term (rho/2) ||s - v||^2 added to the quartic cost."""

    rho: float
    v: np.ndarray

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("penalty factor must be positive")
        object.__setattr__(self, "v", np.asarray(self.v, dtype=complex))


def _check_len(s, obj: QuarticObjective) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    if s.shape != (obj.k,):
        raise ValueError(f"vector of shape {s.shape} does not match K={obj.k}")
    return s


def cost(s, obj: QuarticObjective, anchor: PenaltyAnchor | None = None) -> float:
    """Evaluate sum_i |s^H Phi_i s|^2 (+ penalty), bins in canonical order."""
    s = _check_len(s, obj)
    k = obj.k
    total = 0.0
    for r, q in obj._groups:
        a = q @ (s[: k - r] * np.conj(s[r:]))
        total += float(np.sum(np.abs(a) ** 2))
    if anchor is not None:
        d = s - anchor.v
        total += 0.5 * anchor.rho * float(np.real(np.vdot(d, d)))
    return total


def egrad(s, obj: QuarticObjective, anchor: PenaltyAnchor | None = None) -> np.ndarray:
    """Euclidean gradient 2 sum_i [a_i Phi_i^H s + conj(a_i) Phi_i s] + rho (s - v).

    The returned complex vector packs d/dRe and d/dIm as its real and
    imaginary parts, so Re{g^H d} is the directional derivative along d.
    """
    s = _check_len(s, obj)
    k = obj.k
    g = np.zeros(k, dtype=complex)
    for r, q in obj._groups:
        lo, hi = s[: k - r], s[r:]
        a = q @ (lo * np.conj(hi))
        w = np.conj(a) @ q
        g[r:] += 2.0 * w * lo
        g[: k - r] += 2.0 * np.conj(w) * hi
    if anchor is not None:
        g += anchor.rho * (s - anchor.v)
    return g


def ehess_vec(s, d, obj: QuarticObjective, anchor: PenaltyAnchor | None = None) -> np.ndarray:
    """Directional derivative of egrad at s along d (Euclidean Hessian product).

    Expands to six Phi terms per bin: coefficients a_i on Phi_i^H d,
    conj(a_i) on Phi_i d, c_i = d^H Phi_i s + s^H Phi_i d on Phi_i^H s and
    conj(c_i) on Phi_i s, all times 2, plus rho d for the penalty.
    """
    s = _check_len(s, obj)
    d = _check_len(d, obj)
    k = obj.k
    out = np.zeros(k, dtype=complex)
    for r, q in obj._groups:
        s_lo, s_hi = s[: k - r], s[r:]
        d_lo, d_hi = d[: k - r], d[r:]
        a = q @ (s_lo * np.conj(s_hi))
        c = q @ (s_lo * np.conj(d_hi)) + q @ (d_lo * np.conj(s_hi))
        w1 = np.conj(c) @ q
        w2 = np.conj(a) @ q
        out[r:] += 2.0 * (w1 * s_lo + w2 * d_lo)
        out[: k - r] += 2.0 * (np.conj(w1) * s_hi + np.conj(w2) * d_hi)
    if anchor is not None:
        out += anchor.rho * d
    return out
