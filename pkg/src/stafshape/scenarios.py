"""Canonical inputs: P4 seed code, the two benchmark scenes, seeded random codes."""

from __future__ import annotations

from enum import Enum

import numpy as np

from .model import InterferenceMap

__all__ = ["SceneId", "p4_code", "random_unimodular", "scene_map"]


class SceneId(Enum):
    SCENE1 = 1
    SCENE2 = 2


def p4_code(k: int) -> np.ndarray:
    """Polyphase P4 code: entry m has phase pi (m^2/K - m), m = 0..K-1."""
    if k < 1:
        raise ValueError("code length must be >= 1")
    m = np.arange(k)
    return np.exp(1j * np.pi * (m * m / k - m))


_SCENE_RECTS = {
    SceneId.SCENE1: [(range(18, 21), range(35, 48))],
    SceneId.SCENE2: [(range(20, 31), range(14, 16)),
                     (range(23, 26), range(38, 43))],
}


def scene_map(scene: SceneId, k: int = 50, nv: int = 50) -> InterferenceMap:
    """Unit-weight interference map of a benchmark scene on a K x Nv grid.

    Scene 1 is one rectangle of 39 bins, scene 2 two rectangles totalling
    37 bins. The bin indices are fixed; grids too small to hold them are
    rejected with the offending bin named.
    """
    support = []
    for rows, cols in _SCENE_RECTS[SceneId(scene)]:
        for r in rows:
            if r >= k:
                raise ValueError(f"scene range bin {r} needs K >= {r + 1}, got {k}")
            for h in cols:
                if h >= nv:
                    raise ValueError(f"scene Doppler bin {h} needs Nv >= {h + 1}, "
                                     f"got {nv}")
                support.append((r, h, 1.0))
    return InterferenceMap(k, nv, tuple(support))


def random_unimodular(k: int, seed: int) -> np.ndarray:
    """Random unimodular code with i.i.d. uniform phases.

    Phases are 2 pi times the first K variates of numpy's PCG64 stream
    (numpy.random.default_rng(seed).random(k)), so the same (k, seed)
    always yields the same code and the generator identity is pinned for
    reproduction elsewhere.
    """
    if k < 1:
        raise ValueError("code length must be >= 1")
    rng = np.random.default_rng(seed)
    return np.exp(2j * np.pi * rng.random(k))
