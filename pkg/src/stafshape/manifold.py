"""Product-of-complex-circles manifold toolbox.

The feasible set of unimodular codes is the product of K unit circles in
the complex plane. Tangent vectors at s are complex vectors xi with
Re{conj(s[k]) xi[k]} = 0 componentwise; the metric is the real part of
the complex Euclidean inner product. Points and tangent vectors are plain
complex ndarrays, with the base point passed explicitly.
"""

from __future__ import annotations

import numpy as np

from .model import check_unimodular

__all__ = [
    "inner",
    "is_tangent",
    "norm",
    "project",
    "retract",
    "rgrad",
    "rhess_vec",
]


def inner(a, b) -> float:
    """Riemannian metric Re{a^H b}."""
    return float(np.real(np.vdot(a, b)))


def norm(a) -> float:
    """Metric norm sqrt(Re{a^H a}) (the plain complex 2-norm)."""
    return float(np.linalg.norm(a))


def is_tangent(s, xi, tol: float = 1e-10) -> bool:
    """Componentwise tangency check Re{conj(s) . xi} = 0 within tol."""
    s = np.asarray(s, dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    return float(np.max(np.abs(np.real(np.conj(s) * xi)))) <= tol


def project(s, xi) -> np.ndarray:
    """Orthogonal projection onto the tangent space at s.

    Componentwise: xi - Re{conj(s) . xi} . s. Idempotent and self-adjoint
    in the metric; requires a unimodular base.
    """
    s = check_unimodular(s, name="projection base")
    xi = np.asarray(xi, dtype=complex)
    return xi - np.real(np.conj(s) * xi) * s


def retract(s, xi) -> np.ndarray:
    """Componentwise normalization retraction (s + xi) / |s + xi|.

    Raises if any component of s + xi lands within 1e-14 of the origin,
    which signals a misconfigured step rather than a recoverable state.
    """
    s = np.asarray(s, dtype=complex)
    y = s + np.asarray(xi, dtype=complex)
    m = np.abs(y)
    if np.any(m < 1e-14):
        raise ValueError("degenerate retraction: a component of s + xi is "
                         "numerically zero")
    return y / m


def rgrad(s, eg) -> np.ndarray:
    """Riemannian gradient: tangent projection of the Euclidean gradient."""
    return project(s, eg)


def rhess_vec(s, eg, ehess_dir, xi) -> np.ndarray:
    """Riemannian Hessian product at s along tangent xi.

    eg is the Euclidean gradient at s and ehess_dir the Euclidean Hessian
    product along xi. The circle-product curvature correction subtracts
    the componentwise radial gradient component before projecting:
    project(ehess_dir - Re{eg . conj(s)} . xi).
    """
    s = np.asarray(s, dtype=complex)
    xi = np.asarray(xi, dtype=complex)
    guard = 1e-8 * (1.0 + float(np.max(np.abs(xi))))
    if not is_tangent(s, xi, tol=guard):
        raise ValueError("direction is not tangent at the base point")
    radial = np.real(np.asarray(eg, dtype=complex) * np.conj(s))
    return project(s, np.asarray(ehess_dir, dtype=complex) - radial * xi)
