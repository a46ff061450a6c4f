"""Asymptotic spectral measure and empirical spectral CDFs.

All CDFs live on the normalized frequency u = lambda / omega in [-1, 1].
The limit measure assigns to (-inf, u] the fraction of the unit sphere of
directions xi with  cos(Omega, A_E xi) <= u,  A_E = diag(sqrt(A_i)).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .polycore import Ellipsoid, RotationVector


class DegenerateDirection(ValueError):
    pass


@dataclass
class MeasureCDF:
    """Monotone CDF sampled on a u-grid, or a step CDF given by atoms."""

    omega: float
    u: np.ndarray
    cdf: np.ndarray
    kind: str  # closed-form | quadrature | empirical
    meta: dict = field(default_factory=dict)
    atoms: np.ndarray | None = None
    func: Callable | None = field(default=None, repr=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.atoms is not None:
            return np.searchsorted(self.atoms, x, side="right") / len(self.atoms)
        if self.func is not None:
            return self.func(x)
        return np.interp(x, self.u, self.cdf, left=0.0, right=1.0)

    def left(self, x):
        """Left limit F(x-)."""
        x = np.asarray(x, dtype=float)
        if self.atoms is not None:
            return np.searchsorted(self.atoms, x, side="left") / len(self.atoms)
        return self(x)

    def density(self) -> np.ndarray:
        """Central differences of the sampled CDF."""
        return np.gradient(self.cdf, self.u)

    def breakpoints(self) -> np.ndarray:
        return self.atoms if self.atoms is not None else self.u


def lambda_E(E: Ellipsoid, omega: RotationVector, xi) -> np.ndarray:
    """omega * cos(angle(Omega, A_E xi)); vectorized over rows of xi."""
    xi = np.asarray(xi, dtype=float)
    sq = np.sqrt(np.array([float(a) for a in E.coefficients]))
    eta = xi * sq
    nrm = np.linalg.norm(eta, axis=-1)
    if np.any(nrm == 0):
        raise DegenerateDirection("A_E xi vanishes")
    return (eta @ omega.as_array()) / nrm


def axisym_density(a: float, u):
    """Limit density for A1 = A2, Omega on the x3 axis, a = A3/A1, omega = 1."""
    u = np.asarray(u, dtype=float)
    inside = np.abs(u) <= 1.0
    uc = np.where(inside, u, 0.0)
    val = a / (2.0 * (uc ** 2 + a * (1.0 - uc ** 2)) ** 1.5)
    return np.where(inside, val, 0.0)


def axisym_cdf(a: float, u):
    u = np.clip(np.asarray(u, dtype=float), -1.0, 1.0)
    return 0.5 * (1.0 + u / np.sqrt(a + (1.0 - a) * u ** 2))


def u_grid(n_points: int = 2001) -> np.ndarray:
    return np.linspace(-1.0, 1.0, n_points)


def closed_form_cdf(a: float, n_points: int = 2001) -> MeasureCDF:
    u = u_grid(n_points)
    return MeasureCDF(1.0, u, axisym_cdf(a, u), "closed-form", {"a": a}, func=lambda x: axisym_cdf(a, x))


def sphere_grid(n_directions: int):
    """Equal-area product grid: midpoints uniform in cos(theta) and in phi.

    Returns (directions, weights) with weights summing to 4*pi.
    """
    n_t = max(1, int(round(np.sqrt(n_directions))))
    n_p = max(1, int(np.ceil(n_directions / n_t)))
    z = -1.0 + (np.arange(n_t) + 0.5) * (2.0 / n_t)
    phi = (np.arange(n_p) + 0.5) * (2.0 * np.pi / n_p)
    r = np.sqrt(1.0 - z ** 2)
    Z, P = np.meshgrid(z, phi, indexing="ij")
    R = np.broadcast_to(r[:, None], Z.shape)
    dirs = np.stack([R * np.cos(P), R * np.sin(P), Z], axis=-1).reshape(-1, 3)
    w = np.full(len(dirs), 4.0 * np.pi / len(dirs))
    return dirs, w


def random_sphere(n_directions: int, seed: int):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n_directions, 3))
    x /= np.linalg.norm(x, axis=1)[:, None]
    return x, np.full(n_directions, 4.0 * np.pi / n_directions)


def weighted_cdf(values: np.ndarray, weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    v = values[order]
    cw = np.cumsum(weights[order])
    cw /= cw[-1]
    idx = np.searchsorted(v, u, side="right")
    out = np.where(idx > 0, cw[np.maximum(idx - 1, 0)], 0.0)
    return out


def general_cdf(E: Ellipsoid, omega: RotationVector, n_directions: int = 1_000_000,
                n_points: int = 2001, seed: int | None = None) -> MeasureCDF:
    """Limit CDF by quadrature over the sphere of directions.

    Deterministic equal-area grid by default; ``seed`` switches to Monte Carlo.
    """
    if seed is None:
        dirs, w = sphere_grid(n_directions)
    else:
        dirs, w = random_sphere(n_directions, seed)
    vals = lambda_E(E, omega, dirs) / omega.omega
    u = u_grid(n_points)
    cdf = weighted_cdf(vals, w, u)
    cdf[-1] = 1.0
    meta = {"n_directions": len(dirs), "mode": "grid" if seed is None else f"monte-carlo:{seed}"}
    return MeasureCDF(1.0, u, cdf, "quadrature", meta)


def empirical_cdf(eigenvalues, omega: float = 1.0) -> MeasureCDF:
    """Normalized counting measure of the eigenvalues (right-continuous steps)."""
    lam = np.sort(np.asarray(eigenvalues, dtype=float)) / omega
    if len(lam) == 0:
        raise ValueError("empty spectrum")
    u = np.unique(lam)
    cdf = np.searchsorted(lam, u, side="right") / len(lam)
    return MeasureCDF(omega, u, cdf, "empirical", {"n_eigenvalues": len(lam)}, atoms=lam)


def ks_distance(c1: MeasureCDF, c2: MeasureCDF) -> float:
    """Sup-norm distance checked at every step point and grid point (both one-sided limits)."""
    pts = np.unique(np.concatenate([c1.breakpoints(), c2.breakpoints()]))
    d_right = np.abs(c1(pts) - c2(pts))
    d_left = np.abs(c1.left(pts) - c2.left(pts))
    return float(max(d_right.max(), d_left.max()))
