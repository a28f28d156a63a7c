"""Exact multi-time Dirac wave functions built from plane-wave modes.

A wave function for N non-interacting particles is a finite sum of tensor
products of single-particle plane-wave superpositions,

    psi(x_1, ..., x_N) = sum_terms  c * phi_1(x_1) (x) ... (x) phi_N(x_N),

where each phi_j is a finite sum of modes u(k) exp(-i(E t - k.x)) with
(gamma^0 E - gamma.k) u = m u and E = sign * sqrt(k^2 + m^2). Every factor
solves its free Dirac equation exactly, which makes the slot-wise divergence
identity of the current tensor a sharp finite-difference test.

The rank-N current tensor is

    T^{mu_1 ... mu_N} = psibar [gamma^{mu_1} (x) ... (x) gamma^{mu_N}] psi,

a real array with nonnegative (0, ..., 0) component.
"""
from __future__ import annotations

from dataclasses import dataclass
import string

import numpy as np

from .errors import NonRealComponent

_ATOL_CLIFFORD = 1e-14


# ---------------------------------------------------------------------------
# Clifford representations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiracRepresentation:
    """A concrete set of gamma matrices for d spatial dimensions."""

    name: str
    gamma: tuple  # (d+1) complex square matrices

    @property
    def d(self) -> int:
        return len(self.gamma) - 1

    @property
    def dim(self) -> int:
        return self.gamma[0].shape[0]

    def check_clifford(self, atol: float = _ATOL_CLIFFORD) -> float:
        """Max deviation from {g^mu, g^nu} = 2 eta^{mu nu} and hermiticity rules."""
        eta = np.diag([1.0] + [-1.0] * self.d)
        dev = 0.0
        eye = np.eye(self.dim)
        for mu, gm in enumerate(self.gamma):
            for nu, gn in enumerate(self.gamma):
                anti = gm @ gn + gn @ gm
                dev = max(dev, np.max(np.abs(anti - 2.0 * eta[mu, nu] * eye)))
        g0 = self.gamma[0]
        dev = max(dev, np.max(np.abs(g0 - g0.conj().T)))
        for gm in self.gamma:
            dev = max(dev, np.max(np.abs(g0 @ gm @ g0 - gm.conj().T)))
        if dev > atol:
            raise ValueError(f"{self.name}: Clifford relations violated by {dev:.3e}")
        return dev

    def similarity(self, U: np.ndarray, name: str | None = None) -> "DiracRepresentation":
        """Unitarily equivalent representation U gamma U^dagger."""
        Ud = U.conj().T
        gam = tuple(U @ g @ Ud for g in self.gamma)
        return DiracRepresentation(name or f"{self.name}~U", gam)


_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)


def _dirac4():
    g0 = np.block([[_I2, _Z2], [_Z2, -_I2]])
    gi = [np.block([[_Z2, s], [-s, _Z2]]) for s in (_SX, _SY, _SZ)]
    return (g0, *gi)


REPRESENTATIONS = {
    "dirac2": DiracRepresentation("dirac2", (_SZ, 1j * _SY)),
    "majorana2": DiracRepresentation("majorana2", (_SX, 1j * _SY)),
    "dirac4": DiracRepresentation("dirac4", _dirac4()),
}


def get_representation(name: str) -> DiracRepresentation:
    try:
        return REPRESENTATIONS[name]
    except KeyError:
        raise KeyError(f"unknown representation {name!r}; "
                       f"available: {sorted(REPRESENTATIONS)}") from None


# ---------------------------------------------------------------------------
# plane-wave modes
# ---------------------------------------------------------------------------

def plane_wave_spinor(rep: DiracRepresentation, k, sign: int, mass: float) -> np.ndarray:
    """Normalized spinor solving (g^0 E - g.k) u = m u, E = sign*sqrt(k^2+m^2).

    Computed as an eigenvector of the Hermitian one-particle Hamiltonian
    h(k) = g^0 m + g^0 g^i k_i; the phase is fixed by making the largest
    component real and positive.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.size != rep.d:
        raise ValueError(f"wave vector has {k.size} components, expected {rep.d}")
    g0 = rep.gamma[0]
    h = g0 * mass
    for i in range(rep.d):
        h = h + g0 @ rep.gamma[1 + i] * k[i]
    energy = sign * np.sqrt(float(k @ k) + mass * mass)
    vals, vecs = np.linalg.eigh(h)
    idx = int(np.argmin(np.abs(vals - energy)))
    if abs(vals[idx] - energy) > 1e-10 * (1.0 + abs(energy)):
        raise ValueError("requested energy branch not in the spectrum")
    u = vecs[:, idx]
    piv = int(np.argmax(np.abs(u)))
    u = u * (np.abs(u[piv]) / u[piv])
    return u


@dataclass
class PlaneWaveMode:
    """One exact plane-wave solution u(k) exp(-i(E t - k.x))."""

    k: np.ndarray
    sign: int
    amplitude: complex
    mass: float
    spinor: np.ndarray
    energy: float

    @classmethod
    def make(cls, rep: DiracRepresentation, k, sign: int, amplitude, mass: float,
             spinor=None) -> "PlaneWaveMode":
        k = np.atleast_1d(np.asarray(k, dtype=float))
        u = plane_wave_spinor(rep, k, sign, mass) if spinor is None else np.asarray(spinor, complex)
        energy = sign * np.sqrt(float(k @ k) + mass * mass)
        return cls(k=k, sign=sign, amplitude=complex(amplitude), mass=mass,
                   spinor=u, energy=energy)

    def dirac_residual(self, rep: DiracRepresentation) -> float:
        op = rep.gamma[0] * self.energy
        for i in range(rep.d):
            op = op - rep.gamma[1 + i] * self.k[i]
        return float(np.max(np.abs(op @ self.spinor - self.mass * self.spinor)))


@dataclass
class SingleParticleWave:
    """Finite superposition of plane-wave modes for one particle."""

    rep: DiracRepresentation
    mass: float
    modes: list

    @classmethod
    def make(cls, rep: DiracRepresentation, mass: float, modes) -> "SingleParticleWave":
        built = [PlaneWaveMode.make(rep, m["k"], m.get("sign", +1), m.get("amplitude", 1.0),
                                    mass, m.get("spinor"))
                 if isinstance(m, dict) else m for m in modes]
        return cls(rep=rep, mass=mass, modes=built)

    def evaluate(self, points) -> np.ndarray:
        """points: (..., d+1) events -> (..., dim) spinor values."""
        pts = np.asarray(points, dtype=float)
        t = pts[..., 0]
        x = pts[..., 1:]
        out = np.zeros(t.shape + (self.rep.dim,), dtype=complex)
        for m in self.modes:
            phase = np.exp(-1j * (m.energy * t - x @ m.k))
            out += (m.amplitude * phase)[..., None] * m.spinor
        return out


# ---------------------------------------------------------------------------
# multi-time wave functions
# ---------------------------------------------------------------------------

@dataclass
class MultiTimeWaveFunction:
    """Finite sum of tensor products of single-particle plane-wave sums."""

    rep: DiracRepresentation
    masses: list
    terms: list  # [(complex coeff, [SingleParticleWave] * N)]

    @property
    def N(self) -> int:
        return len(self.masses)

    @property
    def d(self) -> int:
        return self.rep.d

    @classmethod
    def product(cls, rep, masses, factors, coefficient=1.0):
        """Single product term from per-particle factor specs."""
        waves = [SingleParticleWave.make(rep, m, f) for m, f in zip(masses, factors)]
        return cls(rep=rep, masses=list(masses), terms=[(complex(coefficient), waves)])

    @classmethod
    def superposition(cls, rep, masses, terms):
        """terms: [(coeff, [factor spec per particle])]."""
        built = []
        for coeff, factors in terms:
            waves = [SingleParticleWave.make(rep, m, f) for m, f in zip(masses, factors)]
            built.append((complex(coeff), waves))
        return cls(rep=rep, masses=list(masses), terms=built)

    def evaluate(self, config) -> np.ndarray:
        """config: (..., N, d+1) -> spinor tensor (..., dim, ..., dim)."""
        cfg = np.asarray(config, dtype=float)
        single = cfg.ndim == 2
        if single:
            cfg = cfg[None]
        batch = cfg.shape[:-2]
        out = None
        letters = string.ascii_lowercase
        for coeff, waves in self.terms:
            vals = [w.evaluate(cfg[..., j, :]) for j, w in enumerate(waves)]
            sub_in = ",".join(f"...{letters[j]}" for j in range(self.N))
            sub_out = "..." + letters[:self.N]
            term = coeff * np.einsum(f"{sub_in}->{sub_out}", *vals)
            out = term if out is None else out + term
        if out is None:
            out = np.zeros(batch + (self.rep.dim,) * self.N, dtype=complex)
        return out[0] if single else out


# ---------------------------------------------------------------------------
# current tensor and divergence identity
# ---------------------------------------------------------------------------

@dataclass
class CurrentTensor:
    """Real rank-N tensor psibar [g^{mu_1} (x) ... (x) g^{mu_N}] psi at a
    configuration; axes after the batch axes are the N space-time indices."""

    components: np.ndarray
    at: np.ndarray


def current_tensor_components(psi: MultiTimeWaveFunction, config,
                              imag_tol: float = 1e-10) -> np.ndarray:
    """T^{mu_1...mu_N} for one configuration or a batch.

    Uses G^mu = g^0 g^mu per slot (all Hermitian), so the result is real up
    to round-off; raises NonRealComponent above `imag_tol` relative residue.
    """
    cfg = np.asarray(config, dtype=float)
    single = cfg.ndim == 2
    if single:
        cfg = cfg[None]
    val = psi.evaluate(cfg)
    N, rep = psi.N, psi.rep
    G = np.stack([rep.gamma[0] @ g for g in rep.gamma])  # (d+1, dim, dim)
    letters = string.ascii_lowercase
    ups = string.ascii_uppercase
    a_in = "..." + letters[:N]
    a_out = "..." + letters[N:2 * N]
    gs = ",".join(f"{ups[j]}{letters[j]}{letters[N + j]}" for j in range(N))
    sub = f"{a_in},{gs},{a_out}->...{ups[:N]}"
    T = np.einsum(sub, val.conj(), *([G] * N), val)
    scale = np.max(np.abs(T))
    if scale > 0 and np.max(np.abs(T.imag)) > imag_tol * scale:
        raise NonRealComponent(
            f"imaginary residue {np.max(np.abs(T.imag)) / scale:.3e} above {imag_tol}")
    T = T.real
    return T[0] if single else T


def current_tensor(psi: MultiTimeWaveFunction, config) -> CurrentTensor:
    cfg = np.asarray(config, dtype=float)
    return CurrentTensor(components=current_tensor_components(psi, cfg), at=cfg)


def check_divergence(psi: MultiTimeWaveFunction, config, h: float = 1e-3) -> np.ndarray:
    """Relative residual of the slot-wise divergence identity, per particle.

    For each slot j the centered finite difference of
    sum_mu d/dx_j^mu T^{..., mu_j = mu, ...} is formed with all other
    indices free; the returned residual is the max over free indices,
    normalized by the largest tensor component at the configuration.
    """
    if not (1e-5 <= h <= 1e-2):
        raise ValueError("step h must lie in [1e-5, 1e-2]")
    cfg = np.asarray(config, dtype=float)
    if cfg.ndim != 2:
        raise ValueError("check_divergence expects a single configuration (N, d+1)")
    N, dp1 = psi.N, psi.d + 1
    scale = np.max(np.abs(current_tensor_components(psi, cfg)))
    out = np.empty(N)
    for j in range(N):
        div = None
        for mu in range(dp1):
            plus = cfg.copy()
            plus[j, mu] += h
            minus = cfg.copy()
            minus[j, mu] -= h
            dT = (current_tensor_components(psi, plus)
                  - current_tensor_components(psi, minus)) / (2.0 * h)
            # pick index mu on slot j, keep the other slots free
            comp = np.take(dT, mu, axis=j)
            div = comp if div is None else div + comp
        out[j] = np.max(np.abs(div)) / max(scale, 1e-300)
    return out
