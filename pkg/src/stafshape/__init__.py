"""Constant-modulus slow-time radar code design by STAF shaping.

A quartic interference cost over a sparse range-Doppler map is minimized
under the constant-modulus constraint by an alternating-direction penalty
loop whose inner step is a Riemannian trust-region solver on the product
of unit circles.
"""

from .adpm import AdpmConfig, AdpmReport, adpm_solve, init_penalty
from .model import (DopplerGrid, InterferenceMap, disturbance_power, sir, staf,
                    staf_grid, staf_to_db, steering_vector)
from .quartic import PenaltyAnchor, PhiBin, QuarticObjective, cost, egrad, ehess_vec
from .rtr import RtrConfig, RtrTrace, rtr_minimize, tcg
from .scenarios import SceneId, p4_code, random_unimodular, scene_map

__version__ = "0.1.0"

__all__ = [
    "AdpmConfig", "AdpmReport", "DopplerGrid", "InterferenceMap",
    "PenaltyAnchor", "PhiBin", "QuarticObjective", "RtrConfig", "RtrTrace",
    "SceneId", "adpm_solve", "cost", "disturbance_power", "egrad", "ehess_vec",
    "init_penalty", "p4_code", "random_unimodular", "rtr_minimize", "scene_map",
    "sir", "staf", "staf_grid", "staf_to_db", "steering_vector", "tcg",
]
