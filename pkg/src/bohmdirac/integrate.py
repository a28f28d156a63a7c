"""Transport of chart trajectories dq/ds = jhat/j0 across kink sets.

The stepper is an explicit Dormand-Prince 4(5) pair with per-trajectory
adaptive steps, fully vectorized over an ensemble: every active trajectory
carries its own (s, q, h, side tags) and all right-hand-side evaluations
are batched through the chart-current kernels.

Kink crossings are events of g_{jk}(s) = q_j(s) - xi_k(s). A trial step
whose endpoints straddle a kink curve is never committed through error
control (one velocity jump inside a step costs O(h |dv|) local error);
instead the crossing time is located by bisection along the smooth
one-sided *extension* of the flow, with the crossing slot's side tag
forced, which agrees with the true trajectory up to the crossing and is
discontinuity-free. The trajectory then continues from the located point
with the side tag flipped: the configuration stays continuous while the
chart velocity generally jumps. Steps are capped by the distance to the
nearest kink curve so no step strides across the kink set unnoticed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OnKinkSet
from .guidance import ConfigurationChart, chart_flow

# Dormand-Prince coefficients (RK45)
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

RUNNING, DONE, NULL_CURRENT, CORNER_POINT, STEP_FAILURE = 0, 1, 2, 3, 4
STATUS_NAMES = {DONE: "reached_end", NULL_CURRENT: "null_current",
                CORNER_POINT: "corner_point", STEP_FAILURE: "step_failure"}


@dataclass
class TransportOptions:
    rtol: float = 1e-9
    atol: float = 1e-9
    event_tol_s: float = 1e-11
    corner_tol_s: float = 1e-11
    h0: float = 1e-2
    h_min: float = 1e-13
    max_steps: int = 500_000
    kink_cap_floor: float = 1e-3
    node_tol: float = 1e-12
    record_samples: bool = False


@dataclass
class EventLog:
    """Flat arrays over all recorded kink crossings of an ensemble."""

    s: list = field(default_factory=list)
    traj: list = field(default_factory=list)
    slot: list = field(default_factory=list)
    side_from: list = field(default_factory=list)
    side_to: list = field(default_factory=list)
    q_at: list = field(default_factory=list)
    w_before: list = field(default_factory=list)
    w_after: list = field(default_factory=list)
    dqds_before: list = field(default_factory=list)
    dqds_after: list = field(default_factory=list)
    snap: list = field(default_factory=list)

    def arrays(self):
        n = len(self.s)
        N = len(self.w_before[0]) if n else 0
        return {
            "s": np.array(self.s), "traj": np.array(self.traj, dtype=int),
            "slot": np.array(self.slot, dtype=int),
            "side_from": np.array(self.side_from, dtype=int),
            "side_to": np.array(self.side_to, dtype=int),
            "q_at": np.array(self.q_at).reshape(n, N),
            "w_before": np.array(self.w_before).reshape(n, N),
            "w_after": np.array(self.w_after).reshape(n, N),
            "dqds_before": np.array(self.dqds_before).reshape(n, N),
            "dqds_after": np.array(self.dqds_after).reshape(n, N),
            "snap": np.array(self.snap),
        }


@dataclass
class TransportResult:
    targets: np.ndarray          # (T,)
    arrivals: np.ndarray         # (T, M, N)
    status: np.ndarray           # (M,) final status code
    n_events: np.ndarray         # (M,)
    events: EventLog
    samples: list | None = None  # [(s, q, dqds)] when recording

    @property
    def completed(self) -> np.ndarray:
        return self.status == DONE

    def aborted_fraction(self) -> float:
        return float(np.mean(self.status != DONE))


@dataclass
class TrajectoryRecord:
    """Single-trajectory view: dense accepted-step samples plus events."""

    s: np.ndarray
    q: np.ndarray
    dqds: np.ndarray
    events: dict
    termination: str

    def spacetime(self, chart: ConfigurationChart):
        """World lines (t_j(s), x_j(s)) reconstructed through the chart."""
        return chart.embed(self.s, self.q)


class _Flow:
    """Batched RHS with side bookkeeping and node detection."""

    def __init__(self, psi, chart: ConfigurationChart, opts: TransportOptions):
        self.psi = psi
        self.chart = chart
        self.opts = opts

    def __call__(self, s, q, sides):
        flow = chart_flow(self.psi, self.chart, s, q, sides)
        return flow["dqds"], flow

    def kink_g(self, s, q):
        """g_{jk} = q_j - xi_k(s): shape (m, N, K); K may be 0."""
        kx = self.chart.foliation.kink_x(np.asarray(s, dtype=float))  # (K, m)
        if kx.shape[0] == 0:
            return np.empty(q.shape + (0,))
        return q[:, :, None] - np.moveaxis(kx, 0, -1)[:, None, :]

    def kink_xdot(self, s):
        return self.chart.foliation.kink_xdot(np.asarray(s, dtype=float))


def _rk_stages(f, s, q, h, sides):
    """One DP45 trial step for a batch: (q5, error, k1, flow at the start)."""
    m, N = q.shape
    k = np.empty((7, m, N))
    k[0], flow0 = f(s, q, sides)
    for i in range(1, 7):
        qi = q + h[:, None] * np.einsum("j,jmn->mn", _A[i], k[:i])
        k[i], _ = f(s + _C[i] * h, qi, sides)
    q5 = q + h[:, None] * np.einsum("j,jmn->mn", _B5, k)
    err = h[:, None] * np.einsum("j,jmn->mn", _E, k)
    return q5, err, k[0], flow0


def _error_norm(err, q, q_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(q), np.abs(q_new))
    with np.errstate(invalid="ignore"):
        en = np.sqrt(np.mean((err / scale) ** 2, axis=1))
    en[~np.isfinite(en)] = np.inf
    return en


def transport(psi, chart: ConfigurationChart, q0, s0: float, targets,
              opts: TransportOptions | None = None) -> TransportResult:
    """Integrate an ensemble from leaf s0 through the given target leaves.

    q0: (M, N) initial chart positions with j0 > 0, none on the kink set.
    targets: increasing (or decreasing, for reverse transport) leaf labels.
    """
    opts = opts or TransportOptions()
    q = np.array(q0, dtype=float)
    if q.ndim == 1:
        q = q[None]
    M, N = q.shape
    if N != chart.N:
        raise ValueError(f"q0 has {N} slots, chart expects {chart.N}")
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    direction = np.sign(targets[0] - s0) or 1.0
    if np.any(np.sign(np.diff(np.concatenate([[s0], targets]))) != direction):
        raise ValueError("targets must be strictly monotone away from s0")

    flow_f = _Flow(psi, chart, opts)
    s = np.full(M, float(s0))
    g0 = flow_f.kink_g(s, q)
    if g0.size and np.min(np.abs(g0)) <= 1e-12:
        raise OnKinkSet("initial configuration lies on the kink set")
    sides = np.sign(g0[:, :, 0]) if g0.size else np.zeros((M, N))
    h = np.full(M, direction * abs(opts.h0))
    status = np.zeros(M, dtype=int)
    n_events = np.zeros(M, dtype=int)
    events = EventLog()
    samples = [] if opts.record_samples else None
    arrivals = np.empty((len(targets), M, N))

    if opts.record_samples:
        d0, _ = flow_f(s, q, sides)
        samples.append((s.copy(), q.copy(), d0))

    for ti, s_end in enumerate(targets):
        steps = 0
        while True:
            act = (status == RUNNING) & (s != s_end)
            if not np.any(act):
                break
            steps += 1
            if steps > opts.max_steps:
                status[act] = STEP_FAILURE
                break
            ia = np.nonzero(act)[0]
            sa, qa, ha = s[ia], q[ia], h[ia].copy()
            da = sides[ia]
            # clamp onto the target and cap by distance to kink curves
            rem = s_end - sa
            ha = np.where(np.abs(ha) > np.abs(rem), rem, ha)
            q5, err, k1, flow0 = _rk_stages(flow_f, sa, qa, ha, da)
            g_here = flow_f.kink_g(sa, qa)
            if g_here.size:
                xd = np.moveaxis(flow_f.kink_xdot(sa), 0, -1)[:, None, :]
                dg = k1[:, :, None] - xd
                cap = np.min(np.abs(g_here) / (np.abs(dg) + 1e-30), axis=(1, 2))
                # absolute floor so the straddling step still happens
                cap = np.maximum(0.8 * cap, opts.kink_cap_floor)
                need = np.abs(ha) > cap
                if np.any(need):
                    ha = np.where(need, np.sign(ha) * cap, ha)
                    q5, err, k1, flow0 = _rk_stages(flow_f, sa, qa, ha, da)
            # straddle detection on the trial step: a step across the kink set
            # is never committed through error control (its local error is
            # O(h |dv|)); small straddles are resolved as events, large ones
            # are retried with a step at the cap floor
            if g_here.size:
                g_end = flow_f.kink_g(sa + ha, q5)
                sgn_start = np.sign(g_here)
                tie = sgn_start == 0
                if np.any(tie):
                    sgn_start = np.where(tie, np.broadcast_to(da[:, :, None],
                                                              sgn_start.shape), sgn_start)
                crossed = (np.sign(g_end) != sgn_start) & (np.sign(g_end) != 0)
                straddle = crossed.any(axis=(1, 2))
            else:
                crossed = np.zeros(q5.shape + (0,), dtype=bool)
                straddle = np.zeros(len(ia), dtype=bool)
            small = np.abs(ha) <= 2.0 * opts.kink_cap_floor
            ev_do = straddle & small
            ev_retry = straddle & ~small
            if np.any(ev_retry):
                h[ia[ev_retry]] = np.sign(ha[ev_retry]) * opts.kink_cap_floor

            normal = ~straddle
            en = _error_norm(err, qa, q5, opts.rtol, opts.atol)
            # error-per-unit-step control: local error <= tol * |h| keeps the
            # accumulated error of long transports at the tolerance itself,
            # which the round-trip reversibility bound relies on
            ratio = en / np.maximum(np.abs(ha), 1e-300)
            ok = normal & (ratio <= 1.0)
            with np.errstate(divide="ignore"):
                fac = np.where(ratio > 0.0, 0.9 * ratio ** -0.25, 5.0)
            fac = np.clip(np.where(np.isnan(fac), 0.2, fac), 0.2, 5.0)
            h_new = ha * fac
            too_small = normal & (~ok) & (np.abs(h_new) < opts.h_min)
            if np.any(too_small):
                status[ia[too_small]] = STEP_FAILURE
            h[ia[normal]] = h_new[normal]

            if np.any(ok):
                io = ia[ok]
                s_new = sa[ok] + ha[ok]
                s_new = np.where(np.abs(s_new - s_end) < 1e-14 * (1 + abs(s_end)),
                                 s_end, s_new)
                s[io] = s_new
                q[io] = q5[ok]
                fl = flow_f(s[io], q[io], sides[io])[1]
                bad = (np.abs(fl["Bt"]) <= opts.node_tol *
                       np.max(np.abs(fl["T"]), axis=tuple(range(1, fl["T"].ndim)))[:, None])
                nodes = bad.any(axis=1) | (fl["j0"] <= 0.0)
                if np.any(nodes):
                    status[io[nodes]] = NULL_CURRENT
                if opts.record_samples:
                    samples.append((s[io].copy(), q[io].copy(), fl["dqds"].copy()))

            if np.any(ev_do):
                ev_rows = np.nonzero(ev_do)[0]
                _handle_events(flow_f, opts, ev_rows, ia, sa, qa, ha,
                               crossed, sgn_start, s, q, sides, h, status,
                               n_events, events, samples)
        arrivals[ti] = q
        arrivals[ti][status != RUNNING] = np.nan
    status[status == RUNNING] = DONE
    return TransportResult(targets=targets, arrivals=arrivals, status=status,
                           n_events=n_events, events=events, samples=samples)


def _substep(flow_f, s0, q0, sides, h):
    """Plain 6-stage DP45 evaluation of the solution at s0 + h (no control)."""
    k = np.empty((7, *q0.shape))
    k[0], _ = flow_f(s0, q0, sides)
    for i in range(1, 7):
        qi = q0 + h[:, None] * np.einsum("j,jmn->mn", _A[i], k[:i])
        k[i], _ = flow_f(s0 + _C[i] * h, qi, sides)
    return q0 + h[:, None] * np.einsum("j,jmn->mn", _B5, k)


def _handle_events(flow_f, opts, ev_rows, io, sa, qa, ha, crossed, sgn_start,
                   s, q, sides, h, status, n_events, events, samples):
    """Locate and process the earliest kink crossing of each event step."""
    # expand (row, slot, curve) tuples
    rows, slots, curves = [], [], []
    for r in ev_rows:
        js, ks = np.nonzero(crossed[r])
        for j, kk in zip(js, ks):
            rows.append(r)
            slots.append(j)
            curves.append(kk)
    rows = np.array(rows, dtype=int)
    slots = np.array(slots, dtype=int)
    curves = np.array(curves, dtype=int)

    lo = np.zeros(len(rows))
    hi = np.ones(len(rows))
    s0r, q0r, hr = sa[rows], qa[rows], ha[rows]
    sgn0 = sgn_start[rows, slots, curves]
    # Bisect on the sign of g along the smooth one-sided *extension* of the
    # flow (crossing slot's side forced), so the sub-steps never feel the
    # discontinuity and the located time is free of stage-sampling bias.
    sdr = sides[io[rows]].copy()
    sdr[np.arange(len(rows)), slots] = 2.0 * sgn0
    while np.any(np.abs(hr) * (hi - lo) > opts.event_tol_s) and np.any((hi - lo) > 1e-15):
        mid = 0.5 * (lo + hi)
        qm = _substep(flow_f, s0r, q0r, sdr, hr * mid)
        gm = flow_f.kink_g(s0r + hr * mid, qm)[np.arange(len(rows)), slots, curves]
        left = np.sign(gm) == sgn0
        left |= np.sign(gm) == 0
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
    sig = 0.5 * (lo + hi)

    # earliest crossing per trajectory row; corners abort
    for r in np.unique(rows):
        sel = np.nonzero(rows == r)[0]
        order = np.argsort(np.abs(hr[sel] * sig[sel]))
        first = sel[order[0]]
        gi = io[r]
        if status[gi] != RUNNING:
            continue
        if len(sel) > 1:
            second = sel[order[1]]
            if abs(hr[first] * (sig[first] - sig[second])) < opts.corner_tol_s:
                status[gi] = CORNER_POINT
                continue
        j = slots[first]
        s_star = sa[r] + ha[r] * sig[first]
        forced = sides[gi].copy()
        forced[j] = 2.0 * sgn0[first]
        q_star = _substep(flow_f, sa[r][None], qa[r][None], forced[None],
                          np.array([ha[r] * sig[first]]))[0]
        kx = np.atleast_1d(flow_f.chart.foliation.kink_x(np.asarray(s_star)))
        snap = q_star[j] - kx[curves[first]]
        q_star[j] = kx[curves[first]]

        side_from = int(sgn0[first]) or int(sides[gi, j]) or -1
        side_to = -side_from
        pre = sides[gi].copy()
        pre[j] = side_from
        post = sides[gi].copy()
        post[j] = side_to
        d_pre, f_pre = flow_f(np.array([s_star]), q_star[None], pre[None])
        d_post, f_post = flow_f(np.array([s_star]), q_star[None], post[None])
        tscale = np.max(np.abs(f_post["T"]))
        if (np.any(np.abs(f_post["Bt"][0]) <= opts.node_tol * max(tscale, 1e-300))
                or f_post["j0"][0] <= 0.0):
            status[gi] = NULL_CURRENT
            continue

        s[gi] = s_star
        q[gi] = q_star
        sides[gi] = post
        h[gi] = np.sign(ha[r]) * min(abs(h[gi]), abs(ha[r]))
        n_events[gi] += 1
        events.s.append(float(s_star))
        events.traj.append(int(gi))
        events.slot.append(int(j))
        events.side_from.append(side_from)
        events.side_to.append(side_to)
        events.q_at.append(q_star.copy())
        events.w_before.append(f_pre["w"][0].copy())
        events.w_after.append(f_post["w"][0].copy())
        events.dqds_before.append(d_pre[0].copy())
        events.dqds_after.append(d_post[0].copy())
        events.snap.append(float(abs(snap)))
        if samples is not None:
            samples.append((np.array([s_star]), q_star[None].copy(), d_post.copy()))


def transport_parallel(psi, chart: ConfigurationChart, q0, s0: float, targets,
                       opts: TransportOptions | None = None,
                       threads: int = 1) -> TransportResult:
    """Chunk an ensemble over a thread pool; results merge in chunk order,
    so statistics are independent of the worker count."""
    q0 = np.asarray(q0, dtype=float)
    if threads <= 1 or len(q0) < 2 * threads:
        return transport(psi, chart, q0, s0, targets, opts)
    from concurrent.futures import ThreadPoolExecutor
    idx_chunks = np.array_split(np.arange(len(q0)), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futs = [pool.submit(transport, psi, chart, q0[ix], s0, targets, opts)
                for ix in idx_chunks if len(ix)]
        parts = [f.result() for f in futs]
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    arrivals = np.concatenate([p.arrivals for p in parts], axis=1)
    status = np.concatenate([p.status for p in parts])
    n_events = np.concatenate([p.n_events for p in parts])
    events = EventLog()
    offset = 0
    for p, ix in zip(parts, idx_chunks):
        events.s += p.events.s
        events.traj += [t + offset for t in p.events.traj]
        for name in ("slot", "side_from", "side_to", "q_at", "w_before",
                     "w_after", "dqds_before", "dqds_after", "snap"):
            getattr(events, name).extend(getattr(p.events, name))
        offset += len(ix)
    return TransportResult(targets=targets, arrivals=arrivals, status=status,
                           n_events=n_events, events=events, samples=None)


def integrate(psi, chart: ConfigurationChart, q0, s0: float, s1: float,
              opts: TransportOptions | None = None) -> TrajectoryRecord:
    """Integrate one trajectory from leaf s0 to s1 with dense samples."""
    from dataclasses import replace
    opts = replace(opts or TransportOptions(), record_samples=True)
    res = transport(psi, chart, np.atleast_1d(np.asarray(q0, dtype=float))[None],
                    s0, [s1], opts)
    ss = np.concatenate([blk[0] for blk in res.samples])
    qs = np.concatenate([blk[1] for blk in res.samples], axis=0)
    ds = np.concatenate([blk[2] for blk in res.samples], axis=0)
    order = np.argsort(ss) if s1 > s0 else np.argsort(-ss)
    term = STATUS_NAMES[res.status[0]] if res.status[0] != DONE else "reached_end"
    return TrajectoryRecord(s=ss[order], q=qs[order], dqds=ds[order],
                            events=res.events.arrays(), termination=term)
