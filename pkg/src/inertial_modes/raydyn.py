"""Ray dynamics of the Poincare symbol inside an ellipsoid.

Between reflections a ray is a straight chord travelled at the group
velocity of  s * Lambda_1(xi),  Lambda_1 = Omega . xi / |xi|.  At the
boundary the covector jumps along the conormal so that the frequency shell
  (Omega_hat . xi)^2 = (lam / omega)^2 |xi|^2
is re-imposed, and the branch s is chosen to keep the frequency lam.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .polycore import Ellipsoid, RotationVector


class CharacteristicDirection(ValueError):
    pass


class NoForwardIntersection(ArithmeticError):
    pass


class GlancingReflection(ArithmeticError):
    pass


def _rational(q, dtype):
    q, t = Fraction(q), np.dtype(dtype).type
    return t(q.numerator) / t(q.denominator)


def _vec(omega, dtype=np.float64) -> np.ndarray:
    if isinstance(omega, RotationVector):
        return np.array([_rational(c, dtype) for c in omega.components], dtype=dtype)
    return np.asarray(omega, dtype=dtype)


def _coeffs(E: Ellipsoid, dtype=np.float64) -> np.ndarray:
    return np.array([_rational(a, dtype) for a in E.coefficients], dtype=dtype)


def lambda1(omega, xi):
    xi = np.asarray(xi)
    dt = xi.dtype if xi.dtype.kind == "f" else np.float64
    xi = xi.astype(dt)
    return _vec(omega, dt) @ xi / np.linalg.norm(xi)


def characteristic_ratio(E: Ellipsoid, x, xi) -> float:
    """|A^{-1/2} xi|^2 / sigma(L_E): the condition number of sigma at (x, xi)."""
    eta = np.asarray(xi, dtype=float) / np.sqrt(_coeffs(E))
    return float(eta @ eta / sigma_L(E, x, xi))


def sigma_L(E: Ellipsoid, x, xi):
    """Principal symbol of L_E: sum xi_i^2 / A_i - <x, xi>^2."""
    x, xi = np.asarray(x), np.asarray(xi)
    dt = np.result_type(x.dtype, xi.dtype, np.float64)
    x, xi = x.astype(dt), xi.astype(dt)
    r = np.sqrt(_coeffs(E, dt))
    y, eta = x * r, xi / r
    # Lagrange identity |eta|^2 - <y,eta>^2 = |y x eta|^2 + |eta|^2 (1 - |y|^2): no cancellation near the boundary
    return np.sum(np.cross(y, eta) ** 2) + (eta @ eta) * (1 - y @ y)


@dataclass
class RayState:
    x: np.ndarray
    xi: np.ndarray
    branch: int = 1
    t: float = 0.0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.xi = np.asarray(self.xi, dtype=float)
        if not np.all(np.isfinite(self.x)) or not np.all(np.isfinite(self.xi)):
            raise ValueError("state must be finite")
        if not np.any(self.xi):
            raise ValueError("covector must be nonzero")
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")

    def frequency(self, omega) -> float:
        return float(self.branch * lambda1(omega, self.xi))


@dataclass
class RayEvent:
    index: int
    t: float
    x: np.ndarray
    xi: np.ndarray
    branch: int
    lambda1_abs: float
    sigma: float
    kappa: float = float("nan")


@dataclass
class Trajectory:
    ellipsoid: Ellipsoid
    omega: RotationVector
    frequency: float
    events: list[RayEvent] = field(default_factory=list)
    status: str = "max-reflections"

    @property
    def points(self) -> np.ndarray:
        return np.array([e.x for e in self.events])

    def drift(self, attr: str) -> float:
        vals = np.array([getattr(e, attr) for e in self.events])
        ref = abs(vals[0]) if vals[0] != 0 else 1.0
        return float(np.max(np.abs(vals - vals[0])) / ref)

    def rows(self):
        for e in self.events:
            yield (e.index, e.t, *e.x, *e.xi, e.branch, e.lambda1_abs, e.sigma)


def group_velocity(omega, xi, branch: int = 1, eps: float = 1e-12) -> np.ndarray:
    """d(branch * Lambda_1)/d xi = branch (Omega |xi|^2 - (Omega.xi) xi) / |xi|^3."""
    xi = np.asarray(xi)
    xi = xi.astype(xi.dtype if xi.dtype.kind == "f" else np.float64)
    Om = _vec(omega, xi.dtype)
    r = np.linalg.norm(xi)
    v = branch * (Om * r * r - (Om @ xi) * xi) / r ** 3
    if np.linalg.norm(v) < eps * np.linalg.norm(Om) / r:
        raise CharacteristicDirection("covector is parallel to the rotation axis")
    return v


def advance_to_boundary(E: Ellipsoid, x, velocity) -> tuple[np.ndarray, float]:
    """Forward exit point of the chord x + t v and its transit time."""
    x, v = np.asarray(x), np.asarray(velocity)
    dt = np.result_type(x.dtype, v.dtype, np.float64)
    x, v = x.astype(dt), v.astype(dt)
    A = _coeffs(E, dt)
    a = A @ (v * v)
    b = 2 * (A @ (x * v))
    c = A @ (x * x) - 1
    if a == 0:
        raise NoForwardIntersection("zero velocity")
    disc = b * b - 4.0 * a * c
    if disc < 0:
        raise NoForwardIntersection("chord misses the ellipsoid")
    sq = np.sqrt(disc)
    # larger root, computed without cancellation
    t = (-b + sq) / (2.0 * a) if b < 0 else 2.0 * c / (-b - sq) if (b + sq) != 0 else 0.0
    if not t > 0:
        raise NoForwardIntersection(f"no positive exit time (t={t})")
    g = A @ (x + t * v) ** 2 - 1
    dg = 2 * (A @ ((x + t * v) * v))
    if dg != 0:
        t -= g / dg
    return x + t * v, t


def conormal(E: Ellipsoid, m) -> np.ndarray:
    m = np.asarray(m)
    m = m.astype(m.dtype if m.dtype.kind == "f" else np.float64)
    return _coeffs(E, m.dtype) * m


def _shell_coefficients(oh, c2, xi, n):
    """h(s) = (oh.(xi + s n))^2 - c2 |xi + s n|^2 = h2 s^2 + h1 s + h0."""
    on, ox = oh @ n, oh @ xi
    return on * on - c2 * (n @ n), 2.0 * (ox * on - c2 * (xi @ n)), ox * ox - c2 * (xi @ xi)


def _shell_roots(h2, h1, h0):
    """(far, near) roots; the near one is the root closest to 0."""
    disc = max(h1 * h1 - 4 * h2 * h0, 0 * h0)
    q = -0.5 * (h1 + np.copysign(np.sqrt(disc), h1))
    return q / h2, (h0 / q if q != 0 else 0.0)


def reflect(E: Ellipsoid, omega, m, xi_in, lam: float, tol: float = 1e-12) -> tuple[np.ndarray, int]:
    """Covector and branch after reflection at the boundary point m.

    xi_out = xi_in + s n with n the conormal and s the far root of the shell
    quadratic; the branch is the sign that keeps the frequency lam.
    """
    xi = np.asarray(xi_in)
    dt = np.result_type(xi.dtype, np.asarray(m).dtype, np.float64)
    xi = xi.astype(dt)
    Om = _vec(omega, dt)
    w = np.linalg.norm(Om)
    oh = Om / w
    c2 = (np.dtype(dt).type(lam) / w) ** 2
    n = conormal(E, np.asarray(m, dtype=dt))
    n = n / np.linalg.norm(n)
    r = np.linalg.norm(xi)
    h = _shell_coefficients(oh, c2, xi / r, n)
    h2, h1, _ = h
    if abs(h2) < tol or abs(h1) < tol:
        raise GlancingReflection("shell roots coincide")
    far, _ = _shell_roots(*h)
    xi_out = xi + (r * far) * n
    # one correction along n re-imposes the shell to working precision
    r_out = np.linalg.norm(xi_out)
    _, near = _shell_roots(*_shell_coefficients(oh, c2, xi_out / r_out, n))
    xi_out = xi_out + (r_out * near) * n
    l1 = lambda1(Om, xi_out)
    if lam == 0 or l1 == 0:
        raise GlancingReflection("zero frequency ray")
    branch = 1 if l1 * lam > 0 else -1
    v = group_velocity(Om, xi_out, branch)
    if not (v @ n) < 0:
        raise GlancingReflection("reflected ray does not point inward")
    return xi_out, branch


def trace(E: Ellipsoid, omega: RotationVector, initial: RayState, max_reflections: int = 1000,
          dtype=np.float64, kappa_max: float | None = None) -> Trajectory:
    """Alternate chord/reflection, logging |Lambda_1| and sigma(L_E) at every event.

    ``dtype`` sets the working precision (np.longdouble gives extended
    precision on x86).  With ``kappa_max`` the ray is stopped as degenerate
    once it comes that close to the characteristic set.
    """
    lam = initial.frequency(omega)
    traj = Trajectory(E, omega, lam)
    x, xi = initial.x.astype(dtype), initial.xi.astype(dtype)
    br, t = initial.branch, initial.t
    lam_w = initial.branch * lambda1(omega, xi)

    def log(k):
        sig = sigma_L(E, x, xi)
        eta = xi / np.sqrt(_coeffs(E, dtype))
        kap = float(eta @ eta / sig) if sig > 0 else float("inf")
        traj.events.append(RayEvent(k, float(t), x.astype(float), xi.astype(float), br,
                                    float(abs(lambda1(omega, xi))), float(sig), kap))
        return kap

    log(0)
    for k in range(1, max_reflections + 1):
        try:
            v = group_velocity(omega, xi, br)
        except CharacteristicDirection:
            traj.status = "degenerate"
            return traj
        x, dt_ = advance_to_boundary(E, x, v)
        t += dt_
        try:
            xi, br = reflect(E, omega, x, xi, lam_w)
        except GlancingReflection:
            log(k)
            traj.status = "glancing"
            return traj
        if log(k) > (kappa_max or np.inf):
            traj.status = "degenerate"
            return traj
    return traj


def conic_fit_residual(points: np.ndarray, n_fit: int = 5) -> float:
    """Fit a planar conic through the first n_fit points; max normalized residual on all points.

    Points must lie in a common plane through the origin; coordinates are
    taken in an orthonormal basis of that plane.
    """
    P = np.asarray(points, dtype=float)
    _, _, Vt = np.linalg.svd(P, full_matrices=False)
    uv = P @ Vt[:2].T
    u, v = uv[:, 0], uv[:, 1]
    D = np.stack([u * u, u * v, v * v, u, v, np.ones_like(u)], axis=1)
    _, _, W = np.linalg.svd(D[:n_fit])
    coef = W[-1]
    return float(np.max(np.abs(D @ coef)) / np.linalg.norm(coef))


def centered_ellipse(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares fit of x^T Q x = 1 in the plane of the points (through 0).

    Returns the semi-axes (major first) and the max residual.
    """
    P = np.asarray(points, dtype=float)
    _, _, Vt = np.linalg.svd(P, full_matrices=False)
    uv = P @ Vt[:2].T
    u, v = uv[:, 0], uv[:, 1]
    D = np.stack([u * u, 2 * u * v, v * v], axis=1)
    q, *_ = np.linalg.lstsq(D, np.ones(len(u)), rcond=None)
    Q = np.array([[q[0], q[1]], [q[1], q[2]]])
    w = np.linalg.eigvalsh(Q)
    return 1.0 / np.sqrt(w), float(np.max(np.abs(D @ q - 1)))


def legendre_flow(x0, xi0, t_end: float = 10.0, n_samples: int = 2000):
    """Hamiltonian flow of |xi|^2 - <x, xi>^2 on the ball; returns sampled positions."""
    def rhs(_t, y):
        x, xi = y[:3], y[3:]
        p = x @ xi
        return np.concatenate([2.0 * (xi - p * x), 2.0 * p * xi])

    ts = np.linspace(0.0, t_end, n_samples)
    sol = solve_ivp(rhs, (0.0, t_end), np.concatenate([x0, xi0]), t_eval=ts, rtol=1e-11, atol=1e-12,
                    method="DOP853")
    return sol.y[:3].T, sol.y[3:].T
