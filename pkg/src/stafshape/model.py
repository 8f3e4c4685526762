"""Domain types and closed-form radar quantities.

A slow-time code is a length-K complex vector with unit-modulus entries.
Its matched-filter response over delayed, Doppler-shifted copies of itself
(the slow-time ambiguity function, STAF) is evaluated on a K x Nv
range-Doppler grid; an interference map marks the bins whose STAF should
be suppressed. Everything here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DopplerGrid",
    "InterferenceMap",
    "check_unimodular",
    "disturbance_power",
    "doppler_value",
    "shift_apply",
    "shift_apply_adjoint",
    "sir",
    "staf",
    "staf_grid",
    "staf_to_db",
    "steering_vector",
]


def check_unimodular(s, tol: float = 1e-9, name: str = "code") -> np.ndarray:
    """Validate the constant-modulus invariant |s[k]| = 1 and return s as complex.

    Raises ValueError if s is not a non-empty 1-D vector of unit-modulus
    entries (within tol).
    """
    s = np.asarray(s, dtype=complex)
    if s.ndim != 1 or s.size < 1:
        raise ValueError(f"{name} must be a non-empty 1-D complex vector")
    err = float(np.max(np.abs(np.abs(s) - 1.0)))
    if err > tol:
        raise ValueError(f"{name} violates the constant-modulus constraint "
                         f"(max modulus deviation {err:.3e} > {tol:.0e})")
    return s


def doppler_value(h: int, nv: int) -> float:
    """Normalized Doppler of bin h on an Nv-point grid: v_h = -1/2 + h/Nv."""
    if not 0 <= h < nv:
        raise ValueError(f"Doppler bin {h} out of range for Nv={nv}")
    return -0.5 + h / nv


@dataclass(frozen=True)
class DopplerGrid:
    """Uniform grid of Nv normalized Doppler frequencies on [-1/2, 1/2)."""

    nv: int

    def __post_init__(self):
        if self.nv < 1:
            raise ValueError("Doppler grid needs at least one bin")

    def values(self) -> np.ndarray:
        return -0.5 + np.arange(self.nv) / self.nv

    def value(self, h: int) -> float:
        return doppler_value(h, self.nv)


@dataclass(frozen=True)
class InterferenceMap:
    """Sparse nonnegative weights p(r, h) on a K x Nv range-Doppler grid.

    The support is stored in canonical order of the linear bin index
    l = r * Nv + h, which fixes the accumulation order everywhere the map
    is summed over.
    """

    k: int
    nv: int
    support: tuple

    def __post_init__(self):
        if self.k < 1 or self.nv < 1:
            raise ValueError("interference map needs K >= 1 and Nv >= 1")
        seen = set()
        entries = []
        for r, h, w in self.support:
            r, h, w = int(r), int(h), float(w)
            if not 0 <= r < self.k:
                raise ValueError(f"range bin {r} out of range for K={self.k}")
            if not 0 <= h < self.nv:
                raise ValueError(f"Doppler bin {h} out of range for Nv={self.nv}")
            if w < 0:
                raise ValueError(f"negative weight {w} at bin ({r}, {h})")
            if (r, h) in seen:
                raise ValueError(f"duplicate bin ({r}, {h}) in support")
            seen.add((r, h))
            entries.append((r, h, w))
        entries.sort(key=lambda e: e[0] * self.nv + e[1])
        object.__setattr__(self, "support", tuple(entries))

    def positive_support(self) -> tuple:
        """Entries with strictly positive weight, canonical order."""
        return tuple(e for e in self.support if e[2] > 0)


def steering_vector(v: float, k: int) -> np.ndarray:
    """Temporal steering vector [1, e^{j2pi v}, ..., e^{j2pi (K-1) v}]."""
    if k < 1:
        raise ValueError("steering vector length must be >= 1")
    return np.exp(2j * np.pi * v * np.arange(k))


def shift_apply(r: int, x) -> np.ndarray:
    """Delay x by r samples: out[m] = x[m-r] for m >= r, zeros elsewhere."""
    x = np.asarray(x)
    k = x.shape[0]
    if not 0 <= r <= k - 1:
        raise ValueError(f"shift {r} out of range for length {k}")
    out = np.zeros_like(x)
    out[r:] = x[: k - r]
    return out


def shift_apply_adjoint(r: int, x) -> np.ndarray:
    """Advance x by r samples (adjoint shift): out[m] = x[m+r], zeros at the tail."""
    x = np.asarray(x)
    k = x.shape[0]
    if not 0 <= r <= k - 1:
        raise ValueError(f"shift {r} out of range for length {k}")
    out = np.zeros_like(x)
    out[: k - r] = x[r:]
    return out


def staf(s, r: int, v: float) -> float:
    """Slow-time ambiguity function |s^H J_r (s . p(v))|^2 / ||s||^2."""
    s = np.asarray(s, dtype=complex)
    y = shift_apply(r, s * steering_vector(v, s.shape[0]))
    return float(np.abs(np.vdot(s, y)) ** 2 / np.real(np.vdot(s, s)))


def staf_grid(s, nv: int) -> np.ndarray:
    """Evaluate the STAF on the full K x Nv grid (rows = delay, cols = Doppler).

    For each delay r the Doppler sweep collapses to one matrix-vector
    product with the stacked steering vectors, which keeps the full grid
    at O(K^2 Nv) without any shift matrices.
    """
    s = np.asarray(s, dtype=complex)
    k = s.shape[0]
    phases = np.exp(2j * np.pi * np.outer(DopplerGrid(nv).values(), np.arange(k)))
    nrm = float(np.real(np.vdot(s, s)))
    out = np.empty((k, nv))
    for r in range(k):
        w = s[: k - r] * np.conj(s[r:])
        out[r] = np.abs(phases[:, : k - r] @ w) ** 2 / nrm
    return out


def staf_to_db(values, k: int) -> np.ndarray:
    """Peak-normalized STAF in dB: 10 log10(d / K). Zero bins map to -inf."""
    values = np.asarray(values, dtype=float)
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(values / k)


def disturbance_power(s, imap: InterferenceMap, sigma2: float = 0.0) -> float:
    """Interference-plus-noise power sum p(r,h) ||s||^2 d_s(r,v_h) + sigma2 ||s||^2.

    Accumulates over the map support in canonical order.
    """
    if sigma2 < 0:
        raise ValueError("noise power must be nonnegative")
    s = np.asarray(s, dtype=complex)
    if s.shape[0] != imap.k:
        raise ValueError(f"code length {s.shape[0]} does not match map K={imap.k}")
    nrm = float(np.real(np.vdot(s, s)))
    total = 0.0
    for r, h, w in imap.support:
        if w > 0:
            total += w * nrm * staf(s, r, doppler_value(h, imap.nv))
    return total + sigma2 * nrm


def sir(s, imap: InterferenceMap) -> float:
    """Signal-to-interference ratio K^2 / sum p(r,h) ||s||^2 d_s(r,v_h)."""
    s = np.asarray(s, dtype=complex)
    denom = disturbance_power(s, imap, 0.0)
    if denom == 0.0:
        raise ValueError("interference power is zero for this code/map pair: "
                         "SIR is infinite")
    return float(s.shape[0] ** 2) / denom
