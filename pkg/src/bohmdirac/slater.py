"""Photon guidance by the Maxwell stress tensor and its failure at kinks.

A single photon is modeled by a classical vacuum Maxwell field: a finite sum
of real plane waves with lightlike wave 4-vectors and transverse
polarizations, each an exact solution. The guidance direction on a leaf
with unit normal n is j^mu = T^{mu nu} n_nu, with T the standard vacuum
stress tensor

    T^{mu nu} = -F^{mu alpha} F^nu_alpha + 1/4 eta^{mu nu} F_ab F^ab.

Unlike the Dirac case, j depends on the leaf normal at the particle's own
location, so at a kink of the leaf the two one-sided currents differ. Given
j_L != j_R one can construct a surface normal making the two normal fluxes
have opposite signs, so a trajectory meeting a kink with that orientation
can neither end nor continue; and even away from kinks the density
T^{mu nu} n_mu n_nu is not conserved once n varies, because T^{mu nu} d_mu
n_nu != 0 for non-Killing normal fields. Both defects are quantified here,
next to a paired Dirac check on the same wedge geometry that shows zero
mismatch.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateField, InvalidFamily, NullCurrent
from .minkowski import minkowski_metric

_ETA4 = minkowski_metric(3)


# ---------------------------------------------------------------------------
# vacuum Maxwell plane waves
# ---------------------------------------------------------------------------

@dataclass
class MaxwellMode:
    """One real plane wave: lightlike k, transverse polarization."""

    k: np.ndarray          # spatial wave vector, omega = |k|
    polarization: np.ndarray
    amplitude: float
    phase: float

    def __post_init__(self):
        self.k = np.asarray(self.k, dtype=float)
        self.polarization = np.asarray(self.polarization, dtype=float)
        if self.k.shape != (3,) or self.polarization.shape != (3,):
            raise ValueError("k and polarization must be 3-vectors")
        if abs(self.k @ self.polarization) > 1e-12 * np.linalg.norm(self.k):
            raise ValueError("polarization must be transverse to k")

    @property
    def omega(self) -> float:
        return float(np.linalg.norm(self.k))

    def k4_down(self) -> np.ndarray:
        return np.concatenate([[self.omega], -self.k])

    def eps4_down(self) -> np.ndarray:
        return np.concatenate([[0.0], -self.polarization])


@dataclass
class MaxwellField:
    """Finite superposition of vacuum plane waves; evaluates F_{mu nu}(x)."""

    modes: list

    def F_down(self, x) -> np.ndarray:
        """F_{mu nu} at events x of shape (..., 4)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (4, 4))
        for m in self.modes:
            kd = m.k4_down()
            ed = m.eps4_down()
            theta = x[..., 0] * m.omega - x[..., 1:] @ m.k + m.phase
            wedge = np.einsum("m,n->mn", kd, ed) - np.einsum("m,n->mn", ed, kd)
            out = out - m.amplitude * np.sin(theta)[..., None, None] * wedge
        return out

    @classmethod
    def random(cls, rng, n_modes: int = 2, omega_range=(0.5, 2.0)) -> "MaxwellField":
        modes = []
        for _ in range(n_modes):
            direction = rng.normal(size=3)
            direction /= np.linalg.norm(direction)
            k = rng.uniform(*omega_range) * direction
            e = rng.normal(size=3)
            e -= (e @ direction) * direction
            e /= np.linalg.norm(e)
            modes.append(MaxwellMode(k=k, polarization=e,
                                     amplitude=rng.uniform(0.5, 1.5),
                                     phase=rng.uniform(0.0, 2 * np.pi)))
        return cls(modes)


def stress_tensor(field: MaxwellField, x) -> np.ndarray:
    """T^{mu nu} at events x: symmetric, traceless, T^{00} >= 0."""
    Fd = field.F_down(x)
    Fu = np.einsum("ma,...ab,bn->...mn", _ETA4, Fd, _ETA4)   # F^{mu nu}
    Fmix = np.einsum("...ma,an->...mn", Fu, _ETA4)           # F^mu_nu
    inv = np.einsum("...ab,...ab->...", Fd, Fu)
    T = -np.einsum("...ma,...na->...mn", Fu, Fmix)           # -F^{mu a} F^nu_a
    return T + 0.25 * inv[..., None, None] * _ETA4


def stress_divergence_fd(field: MaxwellField, x, h: float = 1e-4) -> np.ndarray:
    """Centered FD of d_mu T^{mu nu}; ~0 for exact vacuum solutions."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(4)
    for mu in range(4):
        xp = x.copy()
        xp[mu] += h
        xm = x.copy()
        xm[mu] -= h
        out += (stress_tensor(field, xp)[mu] - stress_tensor(field, xm)[mu]) / (2 * h)
    return out


# ---------------------------------------------------------------------------
# 3+1 wedge geometry
# ---------------------------------------------------------------------------

@dataclass
class WedgeGeometry3D:
    """Leaves f_s(x) = c*s - a*|x . axis - v*s| in 3+1 dimensions.

    Carries the two one-sided unit leaf normals and the (Euclidean) normal
    of the space-time kink hypersurface {x . axis = v*s, t = c*s}.
    """

    a: float
    v: float = 0.0
    c: float = 1.0
    axis: np.ndarray = None

    def __post_init__(self):
        if self.axis is None:
            self.axis = np.array([1.0, 0.0, 0.0])
        self.axis = np.asarray(self.axis, dtype=float)
        self.axis /= np.linalg.norm(self.axis)
        if not (0.0 <= self.a < 1.0):
            raise InvalidFamily("wedge slope must satisfy 0 <= a < 1")
        if self.c - self.a * abs(self.v) <= 0.0:
            raise InvalidFamily("leaf ordering requires c - a*|v| > 0")

    def normal_down(self, side: int) -> np.ndarray:
        """Future unit leaf conormal n_mu on the given side (+1 / -1)."""
        grad = -self.a * np.sign(side) * self.axis    # spatial gradient of f
        g = 1.0 / np.sqrt(1.0 - self.a ** 2)
        return np.concatenate([[1.0], -grad]) * g

    def lapse(self, side: int) -> float:
        return self.c + self.a * self.v * np.sign(side)

    def grad_f(self, side: int) -> np.ndarray:
        return -self.a * np.sign(side) * self.axis

    def kink_normal_euclidean(self) -> np.ndarray:
        """Euclidean unit normal of the space-time kink set."""
        n = np.concatenate([[self.v], -self.c * self.axis])
        return n / np.linalg.norm(n)

    def point_on_kink(self, s: float, perp=(0.0, 0.0)) -> np.ndarray:
        """An event on the kink set of leaf s."""
        b = _basis_perp(self.axis)
        xs = self.v * s * self.axis + perp[0] * b[0] + perp[1] * b[1]
        return np.concatenate([[self.c * s], xs])


def _basis_perp(axis):
    ref = np.array([0.0, 1.0, 0.0]) if abs(axis[0]) > 0.9 else np.array([1.0, 0.0, 0.0])
    b1 = np.cross(axis, ref)
    b1 /= np.linalg.norm(b1)
    return b1, np.cross(axis, b1)


# ---------------------------------------------------------------------------
# guidance law and kink checks
# ---------------------------------------------------------------------------

def slater_velocity(field: MaxwellField, x, n_down, null_tol: float = 1e-13):
    """Time-normalized direction T^{mu nu} n_nu; NullCurrent at nodes."""
    T = stress_tensor(field, x)
    j = T @ np.asarray(n_down, dtype=float)
    scale = np.max(np.abs(T))
    if abs(j[0]) <= null_tol * max(scale, 1e-300):
        raise NullCurrent("photon guiding current vanishes")
    return j / j[0]


def chart_kink_flux(j4, geom: WedgeGeometry3D, side: int) -> float:
    """Normal flux of the chart current across the kink hyperplane.

    In the leaf-adapted chart (s, x) the current is (j^0_c, jvec) with
    j^0_c = j^t - grad f . jvec and jvec = lapse * spatial current; the
    kink hyperplane {x . axis = v s} has chart gradient (-v, axis).
    """
    j4 = np.asarray(j4, dtype=float)
    j0c = j4[0] - geom.grad_f(side) @ j4[1:]
    jvec = geom.lapse(side) * j4[1:]
    return float(-geom.v * j0c + geom.axis @ jvec)


def violating_normal(j_left, j_right, tol: float = 1e-12):
    """A normal direction with sign(n . j_L) != sign(n . j_R), when one exists.

    Solves the least-norm linear system n . j_L = +1, n . j_R = -1 in the
    auxiliary Euclidean product; raises DegenerateField when the currents
    coincide or are positively parallel (then every normal gives equal-sign
    fluxes and no such surface orientation exists).
    """
    jl = np.asarray(j_left, dtype=float)
    jr = np.asarray(j_right, dtype=float)
    scale = max(np.linalg.norm(jl), np.linalg.norm(jr), 1e-300)
    if np.linalg.norm(jl - jr) <= tol * scale:
        raise DegenerateField("one-sided currents coincide")
    A = np.stack([jl, jr])
    G = A @ A.T
    if np.linalg.det(G) <= (tol * scale * scale) ** 2:
        lam = (jl @ jr) / max(jr @ jr, 1e-300)
        if lam >= 0.0:
            raise DegenerateField("currents positively parallel; "
                                  "no sign-violating normal exists")
        n = jl / np.linalg.norm(jl)
        return n
    n = A.T @ np.linalg.solve(G, np.array([1.0, -1.0]))
    return n / np.linalg.norm(n)


def slater_kink_violation(field: MaxwellField, geom: WedgeGeometry3D, x,
                          tol: float = 1e-12) -> dict:
    """One-sided photon currents at a kink event and the sign-violation data.

    Returns the geometric-normal mismatch, the chart fluxes, a constructed
    normal n_K* with opposite-sign fluxes (certifying that trajectories
    could not be continued if the kink surface had that orientation), or a
    null report for a degenerate (kink-free) wedge.
    """
    x = np.asarray(x, dtype=float)
    T = stress_tensor(field, x)
    j = {side: T @ geom.normal_down(side) for side in (-1, +1)}
    nK = geom.kink_normal_euclidean()
    mismatch = float(nK @ (j[-1] - j[+1]))
    flux = {side: chart_kink_flux(j[side], geom, side) for side in (-1, +1)}
    report = {
        "x": x.tolist(),
        "j_L": j[-1].tolist(),
        "j_R": j[+1].tolist(),
        "mismatch_geometric": mismatch,
        "chart_flux_left": flux[-1],
        "chart_flux_right": flux[+1],
        "chart_mismatch": float(flux[-1] - flux[+1]),
    }
    if geom.a == 0.0 or np.linalg.norm(j[-1] - j[+1]) <= tol * np.max(np.abs(T)):
        report.update({"n_K_star": None, "sign_left": 0, "sign_right": 0,
                       "continuation_fails": False})
        return report
    n_star = violating_normal(j[-1], j[+1], tol)
    sl, sr = float(n_star @ j[-1]), float(n_star @ j[+1])
    report.update({"n_K_star": n_star.tolist(),
                   "sign_left": int(np.sign(sl)), "sign_right": int(np.sign(sr)),
                   "continuation_fails": bool(np.sign(sl) != np.sign(sr))})
    return report


def dirac_kink_contrast(psi, geom: WedgeGeometry3D, x) -> dict:
    """The same wedge-kink flux check for a one-particle Dirac current.

    psi is a d = 3 multi-time wave function with N = 1; its current
    j^mu = psibar gamma^mu psi never references the leaf normal, so both
    one-sided currents coincide and every flux comparison balances. The
    chart fluxes still mix the side-dependent lapse and slope, so their
    equality exercises the identity rather than restating it.
    """
    from .dirac import current_tensor_components
    x = np.asarray(x, dtype=float)
    j4 = current_tensor_components(psi, x[None, :])
    flux = {side: chart_kink_flux(j4, geom, side) for side in (-1, +1)}
    nK = geom.kink_normal_euclidean()
    scale = max(abs(flux[-1]), abs(flux[+1]), 1e-300)
    return {
        "x": x.tolist(),
        "j": j4.tolist(),
        "mismatch_geometric": float(nK @ (j4 - j4)),
        "chart_flux_left": flux[-1],
        "chart_flux_right": flux[+1],
        "chart_mismatch_rel": float(abs(flux[-1] - flux[+1]) / scale),
    }


def slater_divergence_check(field: MaxwellField, n_field, x, h: float = 2e-4) -> float:
    """Centered FD of d_mu (T^{mu nu} n_nu) for a normal covector field.

    n_field maps an event (4,) to the covector n_mu. Vanishes (to FD error)
    for constant n by stress conservation; generically nonzero otherwise.
    """
    x = np.asarray(x, dtype=float)
    div = 0.0
    for mu in range(4):
        xp = x.copy()
        xp[mu] += h
        xm = x.copy()
        xm[mu] -= h
        jp = stress_tensor(field, xp) @ np.asarray(n_field(xp), dtype=float)
        jm = stress_tensor(field, xm) @ np.asarray(n_field(xm), dtype=float)
        div += (jp[mu] - jm[mu]) / (2.0 * h)
    return float(div)
