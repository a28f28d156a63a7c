"""Multi-time Dirac wave functions, their current tensor, and guidance.

The velocity of each particle contracts the rank-N current tensor with the
leaf normals at the *other* particles' positions. At a kink of the leaf the
normal jumps, so an entangled partner's velocity jumps with it, while the
particle sitting on the kink never feels its own normal. The normal flux of
the chart current nevertheless balances exactly across the kink set: that
is the current condition that makes the statistics work.
"""
import numpy as np

from bohmdirac import dirac, geometry as geo
from bohmdirac import guidance as gd

rep = dirac.get_representation("dirac2")
fol = geo.wedge_foliation(a=0.5, v=0.0, c=np.sqrt(0.75))

psi = dirac.MultiTimeWaveFunction.superposition(rep, [1.0, 1.0], [
    (1.0, [[{"k": 1.4}, {"k": 0.6}], [{"k": 1.0}, {"k": 0.2}]]),
    (1.0, [[{"k": 1.0}, {"k": 0.2}], [{"k": 1.4}, {"k": 0.6}]]),
])

cfg = np.array([[0.3, -0.8], [0.3, 1.1]])
T = dirac.current_tensor_components(psi, cfg)
print("current tensor T^{mu nu} at a sample configuration:\n", np.round(T, 4))
print("divergence residual per slot:", dirac.check_divergence(psi, cfg))

# guidance velocities on a leaf; particle 2 sits at the kink
vL = gd.guidance_velocity(psi, fol, 1.0, [0.8, 0.0], sides=[0, -1])
vR = gd.guidance_velocity(psi, fol, 1.0, [0.8, 0.0], sides=[0, +1])
print("\nparticle velocities with partner on the left/right kink side:")
print("  left :", np.round(vL, 6))
print("  right:", np.round(vR, 6))
print("particle 2's own velocity is side-independent; particle 1's jumps.")

# the current condition at kink points
chart = gd.ConfigurationChart(fol, 2)
rng = np.random.default_rng(0)
print("\nnormal flux of the chart current across the kink set:")
for _ in range(4):
    s = rng.uniform(0.5, 3.0)
    q = np.array([0.0, rng.uniform(0.3, 3.0) * rng.choice([-1, 1])])
    rep_chk = gd.current_condition_check(psi, chart, (s, q))
    print(f"  s={s:.3f} q={np.round(q, 3)}: flux_L={rep_chk.flux_left:+.6f} "
          f"flux_R={rep_chk.flux_right:+.6f} mismatch={rep_chk.mismatch:.2e}")

# the foliation-independent current form and its chart identity
res, _, _ = gd.pushforward_identity_check(psi, chart, (1.0, [0.8, -1.3]))
print("\npushforward identity residual off the kink set:", res)
