"""Spacelike leaves with kinks, foliations, and the constant-distance law.

Leaves of a time foliation are stored as graphs t = f(x) over one spatial
coordinate (d = 1 unless stated otherwise). A kink is a point where the
one-sided slopes differ; leaves must stay strictly spacelike, i.e.
|f'| <= 1 - delta for a configured margin delta on both sides of every kink.

Two foliation families are provided:

* `WedgeFoliation` -- the analytic family f_s(x) = c*s - a*|x - v*s| with a
  straight kink curve x = v*s (a > 0 gives wedge-shaped leaves, a = 0 the
  flat foliation).
* `Dn0Foliation` -- leaves reconstructed as level sets of the Lorentzian
  time separation from an initial surface: f_s(x) is the unique t at which
  the supremum of proper time back to the surface equals s. The supremum
  is computed by grid seeding plus golden-section refinement, and the level
  set by bisection in t. One-sided slopes and the lapse come from the
  envelope formulas at the maximizer (no finite differences):

      slope = (x - u*) / (t - f0(u*)),   lapse = tau / (t - f0(u*)),

  where u* is the maximizing surface parameter and tau the distance.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BisectionFailure,
    InvalidFamily,
    KinkWithoutSide,
    LightlikeTangent,
    NotInFuture,
    SpacelikeViolation,
)

# side tags for one-sided limits at kinks
LEFT = -1
SMOOTH = 0
RIGHT = +1

DEFAULT_MARGIN = 0.02


# ---------------------------------------------------------------------------
# leaves
# ---------------------------------------------------------------------------

class LeafWithKinks:
    """A spacelike graph t = f(x) with finitely many kinks.

    Subclasses implement `value` and `slope`; `kink_loci` is an increasing
    array of kink abscissas (empty for smooth leaves).
    """

    kink_loci: np.ndarray = np.empty(0)
    delta: float = DEFAULT_MARGIN

    def value(self, x):
        raise NotImplementedError

    def slope(self, x, side=SMOOTH):
        raise NotImplementedError

    def one_sided_slopes(self, x):
        """(left, right) slope limits at x."""
        return self.slope(x, LEFT), self.slope(x, RIGHT)

    def is_kink(self, x, tol=1e-12):
        if self.kink_loci.size == 0:
            return np.zeros(np.shape(x), dtype=bool) if np.ndim(x) else False
        x = np.asarray(x, dtype=float)
        d = np.min(np.abs(x[..., None] - self.kink_loci), axis=-1)
        return d <= tol * (1.0 + np.abs(x))


@dataclass
class FlatLeaf(LeafWithKinks):
    """t = t0."""

    t0: float = 0.0
    delta: float = 1.0
    kink_loci: np.ndarray = field(default_factory=lambda: np.empty(0))

    def value(self, x):
        return np.broadcast_to(self.t0, np.shape(x)).copy() if np.ndim(x) else self.t0

    def slope(self, x, side=SMOOTH):
        return np.zeros(np.shape(x)) if np.ndim(x) else 0.0


@dataclass
class WedgeLeaf(LeafWithKinks):
    """t = apex_t - a*|x - apex_x|; a > 0 peaks at the apex, a < 0 dips.

    A two-slope generalization is available through `a_left`/`a_right`
    (outward slopes of the two flanks), used for asymmetric initial
    surfaces; the symmetric case sets both to `a`.
    """

    a: float = 0.5
    apex_t: float = 0.0
    apex_x: float = 0.0
    a_left: float | None = None
    a_right: float | None = None
    delta: float = DEFAULT_MARGIN

    def __post_init__(self):
        self.a_left = self.a if self.a_left is None else self.a_left
        self.a_right = self.a if self.a_right is None else self.a_right
        for a in (self.a_left, self.a_right):
            if abs(a) > 1.0 - DEFAULT_MARGIN:
                raise LightlikeTangent(f"flank slope {a} exceeds 1 - margin")
        # the actual spacelike margin of this graph; it bounds the causal
        # search window of the distance maximization tightly
        self.delta = 1.0 - max(abs(self.a_left), abs(self.a_right))
        self.kink_loci = (np.array([self.apex_x])
                          if (self.a_left or self.a_right) else np.empty(0))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        g = x - self.apex_x
        return self.apex_t - np.where(g >= 0, self.a_right * g, -self.a_left * g)

    def slope(self, x, side=SMOOTH):
        x = np.asarray(x, dtype=float)
        g = x - self.apex_x
        sgn = np.sign(g)
        sgn = np.where(sgn == 0, np.asarray(side, dtype=float), sgn)
        out = np.where(sgn > 0, -self.a_right, self.a_left)
        out = np.where(sgn == 0, np.nan, out)
        return out if out.ndim else float(out)


@dataclass
class CallableLeaf(LeafWithKinks):
    """Graph leaf from arbitrary callables (smooth away from listed kinks)."""

    f: callable = None
    fprime: callable = None
    kink_loci: np.ndarray = field(default_factory=lambda: np.empty(0))
    delta: float = DEFAULT_MARGIN

    def value(self, x):
        return self.f(np.asarray(x, dtype=float))

    def slope(self, x, side=SMOOTH):
        return self.fprime(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# unit normals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitNormal:
    """Future unit normal of a leaf at a point.

    `vec` holds the index-up components n^mu = (1, f') / sqrt(1 - f'^2);
    `cov` the index-down ones n_mu = (1, -f') / sqrt(1 - f'^2). Contractions
    with index-up currents use `cov`. side records which limit was taken.
    """

    vec: np.ndarray
    cov: np.ndarray
    side: int = SMOOTH

    @property
    def norm2(self) -> float:
        return float(self.vec @ self.cov)


def normal_from_slope(p: float, delta: float, side=SMOOTH) -> UnitNormal:
    p = float(p)
    if not np.isfinite(p) or abs(p) >= 1.0 - delta:
        raise LightlikeTangent(f"slope {p} at or beyond spacelike margin {delta}")
    g = 1.0 / np.sqrt(1.0 - p * p)
    return UnitNormal(vec=np.array([1.0, p]) * g,
                      cov=np.array([1.0, -p]) * g, side=side)


def leaf_normal(foliation, s: float, x: float, side=SMOOTH) -> UnitNormal:
    """Future unit normal of leaf s at spatial point x.

    Raises KinkWithoutSide when x sits on a kink locus and side is SMOOTH,
    LightlikeTangent when the slope violates the margin.
    """
    kinks = np.atleast_1d(foliation.kink_x(s))
    at_kink = kinks.size and np.min(np.abs(kinks - x)) <= 1e-12 * (1.0 + abs(x))
    if at_kink and side == SMOOTH:
        raise KinkWithoutSide(f"x={x} is a kink locus of leaf s={s}")
    p = float(np.asarray(foliation.slope(s, x, side)))
    return normal_from_slope(p, foliation.delta, side)


# ---------------------------------------------------------------------------
# Lorentzian distance to a surface
# ---------------------------------------------------------------------------

_INVGOLD = (np.sqrt(5.0) - 1.0) / 2.0


def _tau2(surface, t, x, u):
    """Squared proper time from (f0(u), u) to (t, x), clipped at causal 0."""
    dt = t - surface.value(u)
    dx = x - u
    return np.maximum(dt * dt - dx * dx, 0.0) * (dt > 0)


def _golden_max(surface, t, x, lo, hi, tol: float = 1e-13) -> float:
    """Scalar golden-section maximum of tau^2 over u in [lo, hi]."""
    c = hi - _INVGOLD * (hi - lo)
    d = lo + _INVGOLD * (hi - lo)
    fc = float(_tau2(surface, t, x, c))
    fd = float(_tau2(surface, t, x, d))
    while hi - lo > tol * (1.0 + abs(hi)):
        if fc > fd:
            hi, d, fd = d, c, fc
            c = hi - _INVGOLD * (hi - lo)
            fc = float(_tau2(surface, t, x, c))
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVGOLD * (hi - lo)
            fd = float(_tau2(surface, t, x, d))
    return max(fc, fd)


def lorentzian_distance_to_surface(surface: LeafWithKinks, p, *, seeds: int = 2048,
                                   tol: float = 1e-12, return_argmax: bool = False):
    """sup over surface points q of the proper time tau(q, p).

    p is one point (t, x) or an array (..., 2) of points, each strictly in
    the causal future of the surface graph. The supremum is found on a seed
    grid over the causal window |u - x| <= (t - f0(x)) / delta and refined
    by golden-section search around the best seed.
    """
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    pts = p.reshape(-1, 2)
    t, x = pts[:, 0], pts[:, 1]
    above = t - surface.value(x)
    if np.any(above <= 0.0):
        bad = pts[above <= 0.0][0]
        raise NotInFuture(f"point {tuple(bad)} not above the surface graph")

    half = above / max(surface.delta, 1e-3)
    # seed grid per point, shape (B, seeds)
    frac = np.linspace(-1.0, 1.0, seeds)
    u = x[:, None] + half[:, None] * frac[None, :]
    vals = _tau2(surface, t[:, None], x[:, None], u)
    best = np.argmax(vals, axis=1)
    h = 2.0 * half / (seeds - 1)
    lo = u[np.arange(len(t)), best] - h
    hi = u[np.arange(len(t)), best] + h

    # vectorized golden-section maximization of tau^2 on [lo, hi]
    c = hi - _INVGOLD * (hi - lo)
    d = lo + _INVGOLD * (hi - lo)
    fc = _tau2(surface, t, x, c)
    fd = _tau2(surface, t, x, d)
    for _ in range(200):
        if np.all(hi - lo <= tol * (1.0 + np.abs(hi))):
            break
        go_left = fc > fd
        hi = np.where(go_left, d, hi)
        lo = np.where(go_left, lo, c)
        c = hi - _INVGOLD * (hi - lo)
        d = lo + _INVGOLD * (hi - lo)
        fc = _tau2(surface, t, x, c)
        fd = _tau2(surface, t, x, d)
    u_star = 0.5 * (lo + hi)
    f_star = _tau2(surface, t, x, u_star)
    # guard against refinement losing the grid optimum
    grid_best = vals[np.arange(len(t)), best]
    worse = f_star < grid_best
    if np.any(worse):
        u_star = np.where(worse, u[np.arange(len(t)), best], u_star)
        f_star = np.maximum(f_star, grid_best)
    tau = np.sqrt(f_star)
    if single:
        return (float(tau[0]), float(u_star[0])) if return_argmax else float(tau[0])
    tau = tau.reshape(p.shape[:-1])
    if return_argmax:
        return tau, u_star.reshape(p.shape[:-1])
    return tau


# ---------------------------------------------------------------------------
# analytic wedge foliation
# ---------------------------------------------------------------------------

class WedgeFoliation:
    """f_s(x) = c*s - a*|x - v*s|, kink curve x = v*s.

    a > 0 makes every leaf wedge-shaped with the ridge on the kink curve;
    a = 0 degenerates to the flat foliation f_s = c*s. The lapse is
    c + a*v*sign(x - v*s), so leaf ordering requires c - a*|v| > 0.
    """

    def __init__(self, a: float, v: float = 0.0, c: float = 1.0,
                 delta: float = DEFAULT_MARGIN):
        if abs(a) > 1.0 - delta:
            raise InvalidFamily(f"slope a={a} exceeds spacelike margin 1-{delta}")
        if c - abs(a * v) <= 0.0:
            raise InvalidFamily(f"leaf ordering fails: c - a*|v| = {c - abs(a * v)} <= 0")
        self.a, self.v, self.c, self.delta = float(a), float(v), float(c), float(delta)
        self.n_kinks = 1 if a != 0.0 else 0

    # -- graph data ---------------------------------------------------------
    def f(self, s, x):
        s = np.asarray(s, dtype=float)
        x = np.asarray(x, dtype=float)
        return self.c * s - self.a * np.abs(x - self.v * s)

    def _sgn(self, s, x, side):
        # side in {-1, 0, +1} resolves ties at the kink; |side| == 2 forces
        # the branch everywhere (smooth one-sided extension across the kink)
        g = np.asarray(x, dtype=float) - self.v * np.asarray(s, dtype=float)
        sgn = np.sign(g)
        side = np.broadcast_to(np.asarray(side, dtype=float), sgn.shape)
        sgn = np.where(sgn == 0, side, sgn)
        return np.where(np.abs(side) == 2, np.sign(side), sgn)

    def slope(self, s, x, side=SMOOTH):
        if self.a == 0.0:
            return np.zeros(np.broadcast(np.asarray(s), np.asarray(x)).shape)
        sgn = self._sgn(s, x, side)
        return np.where(sgn == 0, np.nan, -self.a * sgn)

    def lapse(self, s, x, side=SMOOTH):
        if self.a == 0.0:
            return np.full(np.broadcast(np.asarray(s), np.asarray(x)).shape, self.c)
        sgn = self._sgn(s, x, side)
        return np.where(sgn == 0, np.nan, self.c + self.a * self.v * sgn)

    # -- kink curves ---------------------------------------------------------
    def kink_x(self, s):
        s = np.asarray(s, dtype=float)
        if self.n_kinks == 0:
            return np.empty((0,) + s.shape)
        return self.v * s[None, ...]

    def kink_xdot(self, s):
        s = np.asarray(s, dtype=float)
        if self.n_kinks == 0:
            return np.empty((0,) + s.shape)
        return np.full((1,) + s.shape, self.v)

    def leaf(self, s: float) -> LeafWithKinks:
        if self.a == 0.0:
            return FlatLeaf(t0=self.c * s, delta=self.delta)
        return WedgeLeaf(a=self.a, apex_t=self.c * s, apex_x=self.v * s, delta=self.delta)

    # -- diagnostics ----------------------------------------------------------
    def kink_rapidities(self, s: float):
        """Signed rapidity between each outward one-sided leaf tangent and the
        kink-curve tangent; nan entries if the kink curve is not timelike."""
        out = []
        for k in range(self.n_kinks):
            xk = float(self.kink_x(np.asarray(s))[k])
            out.append(_rapidity_pair(self, s, xk))
        return out


def wedge_foliation(a: float, v: float, c: float, delta: float = DEFAULT_MARGIN) -> WedgeFoliation:
    """Validated constructor for the analytic wedge family."""
    return WedgeFoliation(a=a, v=v, c=c, delta=delta)


def flat_foliation(c: float = 1.0, delta: float = DEFAULT_MARGIN) -> WedgeFoliation:
    return WedgeFoliation(a=0.0, v=0.0, c=c, delta=delta)


def _kink_tangent(fol, s: float, xk: float, ds: float = 1e-3):
    """Unit timelike tangent of the space-time kink curve s -> (f_s(xk(s)), xk(s)).

    Fourth-order five-point stencil: the kink positions carry bisection
    noise, so a larger step with Richardson extrapolation beats a tight
    first-order difference.
    """
    k = np.argmin(np.abs(np.atleast_1d(fol.kink_x(s)) - xk))

    def point(si):
        xi = float(np.atleast_1d(fol.kink_x(si))[k])
        return np.array([float(fol.f(si, xi)), xi])

    p1, m1 = point(s + ds), point(s - ds)
    p2, m2 = point(s + 2 * ds), point(s - 2 * ds)
    dtdx = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * ds)
    norm2 = dtdx[0] ** 2 - dtdx[1] ** 2
    if norm2 <= 0.0:
        return None
    return dtdx / np.sqrt(norm2)


def _rapidity_pair(fol, s: float, xk: float, h: float = 1e-4):
    """(left, right) rapidity between outward leaf tangents and kink tangent.

    One-sided slopes are sampled a clear step h off the kink on each flank
    and Richardson-extrapolated back, so a kink position known only to a
    few 1e-7 cannot put an evaluation on the wrong flank.
    """
    w = _kink_tangent(fol, s, xk)
    if w is None:
        return np.nan, np.nan
    step = h * (1.0 + abs(xk))

    def flank(side):
        p1 = float(np.asarray(fol.slope(s, xk + side * step, side)))
        p2 = float(np.asarray(fol.slope(s, xk + side * 2 * step, side)))
        return 2.0 * p1 - p2

    pl = flank(LEFT)
    pr = flank(RIGHT)
    tl = -np.array([pl, 1.0]) / np.sqrt(1.0 - pl * pl)   # points away from kink (to -x)
    tr = np.array([pr, 1.0]) / np.sqrt(1.0 - pr * pr)    # points away from kink (to +x)
    lor = lambda u, v: u[0] * v[0] - u[1] * v[1]
    return float(np.arcsinh(lor(tl, w))), float(np.arcsinh(lor(tr, w)))


# ---------------------------------------------------------------------------
# dn = 0 foliation from an initial surface
# ---------------------------------------------------------------------------

class Dn0Foliation:
    """Leaves of constant Lorentzian distance s from an initial surface.

    f(s, x) is solved on demand by bisection in t (the distance is strictly
    increasing in t above the surface); slope and lapse use the envelope
    formulas at the distance maximizer, with side tags resolved by nudging
    the evaluation point into the requested flank. Kink loci are located
    per leaf from jumps of the maximizer and refined by bisection in x.
    """

    def __init__(self, surface: LeafWithKinks, *, seeds: int = 2048,
                 tol: float = 1e-10, delta: float | None = None,
                 argmax_jump_cells: float = 10.0, smooth_drift_factor: float = 4.0):
        self.surface = surface
        self.seeds = seeds
        self.tol = tol
        self.delta = surface.delta if delta is None else delta
        self.argmax_jump_cells = argmax_jump_cells
        self.smooth_drift_factor = smooth_drift_factor
        self._kink_cache: dict[float, np.ndarray] = {}
        self.s_grid = None
        self.x_grid = None
        self.table = None
        self.argmax_table = None
        self.kink_curves = None

    # -- level-set solve -----------------------------------------------------
    def f(self, s, x):
        s_in, x_in = np.asarray(s, dtype=float), np.asarray(x, dtype=float)
        s_b, x_b = np.broadcast_arrays(s_in, x_in)
        sf = s_b.reshape(-1)
        xf = x_b.reshape(-1)
        if np.any(sf <= 0.0):
            raise BisectionFailure("leaf labels must be positive distances")
        base = self.surface.value(xf)
        lo = base + 0.0
        hi = base + sf          # distance at hi is >= s (vertical geodesic)
        for _ in range(200):
            if np.all(hi - lo <= self.tol):
                break
            mid = 0.5 * (lo + hi)
            dist = lorentzian_distance_to_surface(
                self.surface, np.stack([mid, xf], axis=-1), seeds=self.seeds)
            takes = dist < sf
            lo = np.where(takes, mid, lo)
            hi = np.where(takes, hi, mid)
        else:
            raise BisectionFailure("t-bisection did not converge")
        out = (0.5 * (lo + hi)).reshape(s_b.shape)
        return out if out.ndim else float(out)

    def _envelope(self, s, x, side=SMOOTH):
        """(slope, lapse) via the maximizer of the distance function."""
        s_b, x_b = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(x, dtype=float))
        t = np.atleast_1d(self.f(s_b, x_b)).reshape(-1)
        xf = x_b.reshape(-1).copy()
        nudge = 1e-9 * (1.0 + np.abs(xf))
        side_sgn = np.sign(np.broadcast_to(np.asarray(side, dtype=float), xf.shape))
        xf = xf + side_sgn * nudge
        tau, u = lorentzian_distance_to_surface(
            self.surface, np.stack([t, xf], axis=-1), seeds=self.seeds, return_argmax=True)
        tau = np.atleast_1d(tau)
        u = np.atleast_1d(u)
        dt = t - self.surface.value(u)
        slope = (xf - u) / dt
        lapse = tau / dt
        return slope.reshape(s_b.shape), lapse.reshape(s_b.shape)

    def slope(self, s, x, side=SMOOTH):
        out = self._envelope(s, x, side)[0]
        return out if out.ndim else float(out)

    def lapse(self, s, x, side=SMOOTH):
        out = self._envelope(s, x, side)[1]
        return out if out.ndim else float(out)

    # -- kinks ----------------------------------------------------------------
    def _argmax_at(self, s: float, x: float):
        t = self.f(s, x)
        _, u = lorentzian_distance_to_surface(
            self.surface, np.array([t, x]), seeds=self.seeds, return_argmax=True)
        return u

    def _branch_winner(self, s: float, x: float, u_split: float, halfwidth: float):
        """Which maximizer basin wins at x: -1 (left of u_split) or +1.

        Both basins are golden-refined and their exact values compared, so
        the classification is sharp to the refinement tolerance instead of
        the seed-grid quantization.
        """
        t = float(np.asarray(self.f(s, x)))
        vl = _golden_max(self.surface, t, x, u_split - halfwidth, u_split)
        vr = _golden_max(self.surface, t, x, u_split, u_split + halfwidth)
        return -1 if vl > vr else +1

    def kink_x(self, s, x_window=None, x_probe: int = 257):
        """Kink loci of leaf s inside x_window (defaults to the build grid)."""
        s = float(np.asarray(s))
        key = (s, None if x_window is None else tuple(x_window))
        if key in self._kink_cache:
            return self._kink_cache[key]
        if x_window is None:
            if self.x_grid is None:
                raise BisectionFailure("no x window given and foliation not tabulated")
            xs = self.x_grid
        else:
            xs = np.linspace(x_window[0], x_window[1], x_probe)
        t = np.atleast_1d(self.f(s, xs))
        _, u = lorentzian_distance_to_surface(
            self.surface, np.stack([t, xs], axis=-1), seeds=self.seeds, return_argmax=True)
        loci = self._detect_refine(s, xs, t, u)
        self._kink_cache[key] = loci
        return loci

    def kink_xdot(self, s, ds: float = 1e-5, **kw):
        a = self.kink_x(s - ds, **kw)
        b = self.kink_x(s + ds, **kw)
        if len(a) != len(b):
            raise BisectionFailure("kink count changed across ds step")
        return (b - a) / (2.0 * ds)

    def _detect_refine(self, s: float, xs, t, u, x_tol: float = 1e-12):
        above = t - self.surface.value(xs)
        cells = 2.0 * (above / max(np.min(self.surface.delta), 1e-3)) / (self.seeds - 1)
        jump = np.abs(np.diff(u))
        dx = np.abs(np.diff(xs))
        thresh = np.maximum(self.argmax_jump_cells * np.maximum(cells[:-1], cells[1:]),
                            self.smooth_drift_factor * dx)
        loci = []
        for i in np.nonzero(jump > thresh)[0]:
            lo_x, hi_x = xs[i], xs[i + 1]
            u_split = 0.5 * (u[i] + u[i + 1])
            halfwidth = abs(u[i + 1] - u[i])
            left_basin = -1 if u[i] < u[i + 1] else +1   # basin of the left flank
            for _ in range(200):
                if hi_x - lo_x <= x_tol * (1.0 + abs(lo_x)):
                    break
                mid = 0.5 * (lo_x + hi_x)
                if self._branch_winner(s, mid, u_split, halfwidth) == left_basin:
                    lo_x = mid       # still on the left flank: kink is right of mid
                else:
                    hi_x = mid
            loci.append(0.5 * (lo_x + hi_x))
        return np.array(loci)

    def leaf(self, s: float) -> LeafWithKinks:
        fol = self

        class _Dn0Leaf(LeafWithKinks):
            delta = fol.delta

            @property
            def kink_loci(self):
                return fol.kink_x(s)

            def value(self, x):
                return fol.f(s, x)

            def slope(self, x, side=SMOOTH):
                return fol.slope(s, x, side)

        return _Dn0Leaf()

    def kink_rapidities(self, s: float):
        out = []
        for xk in np.atleast_1d(self.kink_x(s)):
            out.append(_rapidity_pair(self, s, float(xk)))
        return out


def build_dn0_foliation(surface: LeafWithKinks, s_grid, x_grid, tol: float = 1e-10,
                        *, seeds: int = 2048, delta: float | None = None) -> Dn0Foliation:
    """Tabulate the constant-distance foliation of `surface` on a grid.

    Returns a Dn0Foliation whose `table` holds f_s(x) on s_grid x x_grid,
    `argmax_table` the distance maximizers, and `kink_curves` one array of
    loci per s. Raises SpacelikeViolation if any reconstructed leaf breaks
    the margin, BisectionFailure on non-bracketing.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    x_grid = np.asarray(x_grid, dtype=float)
    if np.any(np.diff(s_grid) <= 0) or np.any(s_grid <= 0):
        raise BisectionFailure("s_grid must be increasing and positive")
    fol = Dn0Foliation(surface, seeds=seeds, tol=tol, delta=delta)
    fol.s_grid, fol.x_grid = s_grid, x_grid
    table = np.empty((len(s_grid), len(x_grid)))
    argmax = np.empty_like(table)
    curves = []
    for i, s in enumerate(s_grid):
        t = np.atleast_1d(fol.f(s, x_grid))
        _, u = lorentzian_distance_to_surface(
            surface, np.stack([t, x_grid], axis=-1), seeds=seeds, return_argmax=True)
        table[i] = t
        argmax[i] = u
        curves.append(fol._detect_refine(s, x_grid, t, u))
        margin = 1.0 - fol.delta
        slopes = np.diff(t) / np.diff(x_grid)
        if np.any(np.abs(slopes) > margin + 1e-6):
            raise SpacelikeViolation(
                f"leaf s={s}: max |grid slope| {np.max(np.abs(slopes)):.6f} > {margin}")
    fol.table = table
    fol.argmax_table = argmax
    fol.kink_curves = curves
    return fol
