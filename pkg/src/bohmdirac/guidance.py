"""Guidance law, chart currents, the current form, and kink flux checks.

Conventions for the graph chart (d = 1). A leaf point is (f(s, x), x); a
configuration of N particles on leaf s maps to chart coordinates
(s, q_1, ..., q_N) with q_j the graph coordinate of particle j. Writing
p_j = d_x f(s, q_j) for the slopes, L_j = d_s f(s, q_j) for the lapses and
g_j = (1, -p_j) for the raw (unnormalized) covector normals, the chart
current reduces to closed forms:

    B_j^mu  = T^{mu_1..mu_N} contracted with g_k over every slot k != j,
    j^0     = B_j^mu (g_j)_mu            (slot-independent),
    jhat_j  = L_j * B_j^1,
    dq_j/ds = jhat_j / j^0 = L_j w_j / (1 - w_j p_j),   w_j = B_j^1 / B_j^0.

w_j is the particle's space-time velocity dx/dt; it never involves the
normal at the particle's own location, which is what makes jhat_j
continuous across that particle's kink crossings. The per-particle density
is rho = j^0 / prod_j sqrt(1 - p_j^2) (contraction with unit normals).

The current N-form on M^N (one index per form slot, each running over the
2N coordinate directions of M^N, ordered (1t, 1x, 2t, 2x, ...)) is

    J_{D_1..D_N} = (-1)^{N(N-1)/2} T^{mu_1..mu_N}
                   eps_{(1 mu_1), (2 mu_2), .., (N mu_N), D_1, .., D_N},

and its pullback through the chart embedding equals j^{A_0} eps^{(N+1)}.
J never references the foliation, so it is continuous across kink sets.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import itertools
import string

import numpy as np

from .errors import CornerPoint, KinkWithoutSide, NegativeDensity, NullCurrent, OnKinkSet
from .dirac import MultiTimeWaveFunction, current_tensor_components

_KINK_TOL = 1e-11


# ---------------------------------------------------------------------------
# chart
# ---------------------------------------------------------------------------

class ConfigurationChart:
    """Global chart (s, q_1..q_N) on the simultaneous configurations of a
    foliation, with q_j the leaf graph coordinates."""

    def __init__(self, foliation, N: int):
        self.foliation = foliation
        self.N = int(N)

    def embed(self, s, q):
        """(s, q) -> space-time configuration, shape (..., N, 2)."""
        s = np.asarray(s, dtype=float)
        q = np.asarray(q, dtype=float)
        t = self.foliation.f(s[..., None], q)
        return np.stack([t, q], axis=-1)

    def slot_data(self, s, q, sides=None):
        """Slopes and lapses per particle; sides resolve kink ties."""
        s = np.asarray(s, dtype=float)
        q = np.asarray(q, dtype=float)
        if sides is None:
            sides = np.zeros_like(q)
        sides = np.broadcast_to(np.asarray(sides, dtype=float), q.shape)
        p = np.asarray(self.foliation.slope(s[..., None], q, sides))
        L = np.asarray(self.foliation.lapse(s[..., None], q, sides))
        if np.any(~np.isfinite(p)) or np.any(~np.isfinite(L)):
            raise KinkWithoutSide("configuration touches a kink locus without a side tag")
        return p, L

    def jacobian(self, s, q, sides=None):
        """d(embedding)/d(s, q): shape (..., 2N, N+1)."""
        q = np.asarray(q, dtype=float)
        p, L = self.slot_data(s, q, sides)
        batch = q.shape[:-1]
        N = self.N
        M = np.zeros(batch + (2 * N, N + 1))
        for j in range(N):
            M[..., 2 * j, 0] = L[..., j]
            M[..., 2 * j, 1 + j] = p[..., j]
            M[..., 2 * j + 1, 1 + j] = 1.0
        return M

    def kink_set(self):
        return KinkChartSet(self)

    def on_kink(self, s: float, q, tol: float = _KINK_TOL):
        """Indices of slots sitting on kink curves of leaf s."""
        q = np.asarray(q, dtype=float)
        kx = np.atleast_1d(self.foliation.kink_x(np.asarray(float(s))))
        if kx.size == 0:
            return []
        hits = []
        for j in range(self.N):
            if np.min(np.abs(q[j] - kx)) <= tol * (1.0 + abs(q[j])):
                hits.append(j)
        return hits


@dataclass
class KinkChartSet:
    """The lifted kink set in chart coordinates: one hypersurface
    {q_j = xi_k(s)} per particle slot j and kink curve k."""

    chart: ConfigurationChart

    def pieces(self):
        nk = getattr(self.chart.foliation, "n_kinks", None)
        if nk is None:
            nk = len(np.atleast_1d(self.chart.foliation.kink_x(np.asarray(1.0))))
        return [(j, k) for j in range(self.chart.N) for k in range(nk)]

    def point(self, slot: int, curve: int, s: float, q_other):
        """Chart point with slot `slot` on kink curve `curve` of leaf s."""
        xk = float(np.atleast_1d(self.chart.foliation.kink_x(np.asarray(s)))[curve])
        q = np.empty(self.chart.N)
        others = iter(np.atleast_1d(q_other))
        for j in range(self.chart.N):
            q[j] = xk if j == slot else next(others)
        return q

    def gradient(self, slot: int, curve: int, s: float):
        """Euclidean gradient of q_slot - xi_curve(s) in (s, q) coordinates."""
        xdot = float(np.atleast_1d(self.chart.foliation.kink_xdot(np.asarray(s)))[curve])
        g = np.zeros(self.chart.N + 1)
        g[0] = -xdot
        g[1 + slot] = 1.0
        return g


# ---------------------------------------------------------------------------
# batched current kernels
# ---------------------------------------------------------------------------

def _contract_except(T, covs, skip: int):
    """Contract every tensor slot except `skip` with its raw covector.

    T: (B,) + (2,)*N; covs: (B, N, 2) -> (B, 2).
    """
    N = covs.shape[1]
    out = T
    for k in range(N - 1, -1, -1):
        if k == skip:
            continue
        shape = (covs.shape[0],) + (1,) * k + (2,) + (1,) * (out.ndim - k - 2)
        out = (out * covs[:, k].reshape(shape)).sum(axis=1 + k)
    return out


def chart_flow(psi: MultiTimeWaveFunction, chart: ConfigurationChart, s, q, sides=None):
    """Everything the transport needs, batched.

    s: (B,), q: (B, N), sides: (B, N) in {-1, 0, +1}. Returns a dict with
    j0 (B,), jhat (B, N), dqds (B, N), w (B, N), Bt (B, N) the time
    components of the slot contractions, p and L (B, N).
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    q = np.asarray(q, dtype=float)
    if q.ndim == 1:
        q = q[None]
    p, L = chart.slot_data(s, q, sides)
    cfg = chart.embed(s, q)
    T = current_tensor_components(psi, cfg)
    covs = np.stack([np.ones_like(p), -p], axis=-1)  # (B, N, 2)
    N = chart.N
    Bvec = np.stack([_contract_except(T, covs, j) for j in range(N)], axis=1)  # (B,N,2)
    Bt = Bvec[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        w = Bvec[..., 1] / Bt
    j0 = np.einsum("bm,bm->b", Bvec[:, 0], covs[:, 0])
    jhat = L * Bvec[..., 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        dqds = L * w / (1.0 - w * p)
    return {"j0": j0, "jhat": jhat, "dqds": dqds, "w": w, "Bt": Bt, "p": p, "L": L,
            "T": T}


def density_j0(psi, chart, s, q, sides=None):
    """Chart density j^0 alone (batched); used by samplers and histograms.

    Points exactly on a kink locus (a null set that quadrature grids still
    hit) are evaluated with the right-limit normals.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    q = np.asarray(q, dtype=float)
    if q.ndim == 1:
        q = q[None]
    if sides is None:
        sides = np.ones_like(q)
    p, _ = chart.slot_data(s, q, sides)
    cfg = chart.embed(s, q)
    T = current_tensor_components(psi, cfg)
    covs = np.stack([np.ones_like(p), -p], axis=-1)
    out = T
    for k in range(chart.N - 1, -1, -1):
        shape = (covs.shape[0],) + (1,) * k + (2,) + (1,) * (out.ndim - k - 2)
        out = (out * covs[:, k].reshape(shape)).sum(axis=1 + k)
    return out


# ---------------------------------------------------------------------------
# spec-level operations (single configuration)
# ---------------------------------------------------------------------------

def guidance_velocity(psi, foliation, s: float, config, sides=None,
                      null_tol: float = 1e-13):
    """Space-time velocity directions of all particles, time-normalized.

    config: spatial positions (N,) on leaf s. Each returned row is
    (1, w_j) with w_j = dx_j/dt_j; raises NullCurrent at a node.
    """
    chart = ConfigurationChart(foliation, len(np.atleast_1d(config)))
    flow = chart_flow(psi, chart, np.array([float(s)]), np.atleast_1d(config)[None],
                      None if sides is None else np.asarray(sides)[None])
    scale = np.max(np.abs(flow["T"]))
    Bt = flow["Bt"][0]
    if np.any(np.abs(Bt) <= null_tol * max(scale, 1e-300)):
        raise NullCurrent("guiding current vanishes for at least one slot")
    w = flow["w"][0]
    return np.stack([np.ones_like(w), w], axis=-1)


def rho_sigma(psi, foliation, s: float, config, sides=None) -> float:
    """|psi_Sigma|^2 density on the leaf: full contraction with unit normals."""
    chart = ConfigurationChart(foliation, len(np.atleast_1d(config)))
    q = np.atleast_1d(np.asarray(config, dtype=float))
    flow = chart_flow(psi, chart, np.array([float(s)]), q[None],
                      None if sides is None else np.asarray(sides)[None])
    j0 = float(flow["j0"][0])
    rho = j0 / float(np.prod(np.sqrt(1.0 - flow["p"][0] ** 2)))
    if rho < -1e-10:
        raise NegativeDensity(f"rho_Sigma = {rho} < -1e-10")
    return max(rho, 0.0)


@dataclass
class ChartCurrent:
    """Chart current j = (j0, jvec) at one chart point."""

    j0: float
    jvec: np.ndarray
    at: tuple
    sides: np.ndarray


def chart_current(psi, chart: ConfigurationChart, point, sides=None) -> ChartCurrent:
    """Chart current at point = (s, q)."""
    s, q = point
    q = np.atleast_1d(np.asarray(q, dtype=float))
    sides_arr = np.zeros(chart.N) if sides is None else np.asarray(sides, dtype=float)
    flow = chart_flow(psi, chart, np.array([float(s)]), q[None], sides_arr[None])
    return ChartCurrent(j0=float(flow["j0"][0]), jvec=flow["jhat"][0],
                        at=(float(s), q.copy()), sides=sides_arr)


# ---------------------------------------------------------------------------
# the current N-form and the pushforward identity
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def levi_civita(n: int) -> np.ndarray:
    """Dense Levi-Civita symbol on n indices (n <= 8)."""
    if n > 8:
        raise ValueError("Levi-Civita symbol too large to densify")
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        eps[perm] = -1.0 if inv % 2 else 1.0
    return eps


def current_form_J(psi: MultiTimeWaveFunction, config) -> np.ndarray:
    """Components of the current (d*N)-form on M^N at a configuration.

    Index order of the underlying volume form: the 2N (for d = 1)
    directions of M^N are flattened as (1t, 1x, 2t, 2x, ...). The result
    has N (general: d*N) totally antisymmetric indices over those
    directions. Depends on psi only; any batch axes lead.
    """
    cfg = np.asarray(config, dtype=float)
    T = current_tensor_components(psi, cfg)
    N, dp1 = psi.N, psi.d + 1
    ndir = dp1 * N
    nform = (dp1 - 1) * N
    eps = levi_civita(ndir)
    sign = -1.0 if (N * (N - 1) // 2) % 2 else 1.0
    letters = string.ascii_lowercase
    mu = letters[:N]
    # view eps with per-slot current indices split out: (dp1,)*N + (ndir,)*nform
    # via take along the first N axes at positions slot*dp1 + mu
    eps_view = eps.reshape((ndir,) * N + (ndir,) * nform)
    idx = np.arange(dp1)
    take = eps_view
    for j in range(N):
        take = np.take(take, j * dp1 + idx, axis=j)
    Ds = string.ascii_uppercase[:nform]
    sub = f"...{mu},{mu}{Ds}->...{Ds}"
    return sign * np.einsum(sub, T, take)


def pushforward_identity_check(psi, chart: ConfigurationChart, point, sides=None,
                               kink_tol: float = _KINK_TOL):
    """Residual of the chart identity (phi_* J) = j^{A0} eps^{(N+1)}.

    point = (s, q) must lie off the kink set unless sides are supplied;
    returns (residual, lhs, rhs) with residual relative to max |rhs|.
    """
    s, q = point
    q = np.atleast_1d(np.asarray(q, dtype=float))
    hits = chart.on_kink(float(s), q, tol=kink_tol)
    if hits and sides is None:
        raise OnKinkSet(f"chart point lies on kink set (slots {hits}); pass side tags")
    sides_arr = np.zeros(chart.N) if sides is None else np.asarray(sides, dtype=float)
    J = current_form_J(psi, chart.embed(np.array([float(s)]), q[None]))[0]
    M = chart.jacobian(np.array([float(s)]), q[None], sides_arr[None])[0]
    N = chart.N
    letters = string.ascii_lowercase
    ups = string.ascii_uppercase
    jac = ",".join(f"{letters[i]}{ups[i]}" for i in range(N))
    lhs = np.einsum(f"{letters[:N]},{jac}->{ups[:N]}", J, *([M] * N))
    flow = chart_flow(psi, chart, np.array([float(s)]), q[None], sides_arr[None])
    jvec = np.concatenate([[flow["j0"][0]], flow["jhat"][0]])
    rhs = np.einsum("a,a...->...", jvec, levi_civita(N + 1))
    scale = max(np.max(np.abs(rhs)), 1e-300)
    return float(np.max(np.abs(lhs - rhs)) / scale), lhs, rhs


# ---------------------------------------------------------------------------
# current condition at kinks
# ---------------------------------------------------------------------------

@dataclass
class KinkFluxReport:
    """Both one-sided normal fluxes of the chart current at a kink point."""

    s: float
    q: np.ndarray
    slot: int
    flux_left: float
    flux_right: float
    mismatch: float
    same_sign: bool
    null_flux: bool

    def to_json_dict(self):
        return {"s": self.s, "q": list(map(float, np.atleast_1d(self.q))),
                "slot": self.slot, "flux_left": self.flux_left,
                "flux_right": self.flux_right, "mismatch": self.mismatch,
                "same_sign": self.same_sign}


def current_condition_check(psi, chart: ConfigurationChart, point, product=None,
                            kink_tol: float = _KINK_TOL,
                            null_tol: float = 1e-12) -> KinkFluxReport:
    """Check flux-in = flux-out across the kink set at one chart point.

    point = (s, q) with exactly one slot on a kink curve. The normal flux
    is g . j with g the gradient of the kink constraint; under an optional
    SPD `product` G the unit G-normal flux is g . j / sqrt(g^T G^-1 g),
    a positive rescaling that changes neither the relative mismatch nor
    the sign pattern.
    """
    s, q = float(point[0]), np.atleast_1d(np.asarray(point[1], dtype=float))
    hits = chart.on_kink(s, q, tol=kink_tol)
    if len(hits) == 0:
        raise OnKinkSet(f"(s={s}, q={q}) does not lie on the kink set")
    if len(hits) > 1:
        raise CornerPoint(f"slots {hits} sit on kink curves simultaneously")
    slot = hits[0]
    kx = np.atleast_1d(chart.foliation.kink_x(np.asarray(s)))
    curve = int(np.argmin(np.abs(kx - q[slot])))
    g = chart.kink_set().gradient(slot, curve, s)

    fluxes = {}
    for side, tag in ((-1, "left"), (+1, "right")):
        sides = np.zeros(chart.N)
        sides[slot] = side
        cur = chart_current(psi, chart, (s, q), sides)
        jfull = np.concatenate([[cur.j0], cur.jvec])
        val = float(g @ jfull)
        if product is not None:
            G = np.asarray(product, dtype=float)
            val = val / float(np.sqrt(g @ np.linalg.solve(G, g)))
        fluxes[tag] = (val, jfull)
    fl, fr = fluxes["left"][0], fluxes["right"][0]
    scale = max(abs(fl), abs(fr))
    jscale = max(np.max(np.abs(fluxes["left"][1])), np.max(np.abs(fluxes["right"][1])))
    null = scale <= null_tol * max(jscale, 1e-300)
    mismatch = 0.0 if null else abs(fl - fr) / scale
    return KinkFluxReport(s=s, q=q, slot=slot, flux_left=fl, flux_right=fr,
                          mismatch=mismatch,
                          same_sign=(not null) and (np.sign(fl) == np.sign(fr)),
                          null_flux=null)
