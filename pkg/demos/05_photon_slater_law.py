"""Why the photon guidance law T^{mu nu} n_nu cannot live with kinks.

The photon current contracts the Maxwell stress tensor with the leaf normal
at the particle's own location, so it jumps across a kink. One can then
orient a surface so the one-sided normal fluxes have opposite signs: a
trajectory reaching such a kink can neither end nor continue. A Dirac
particle on the same geometry has a normal-free current and balances
exactly. Away from kinks the same self-coupling already spoils density
conservation whenever the normal field genuinely varies.
"""
import numpy as np

from bohmdirac import dirac, slater

rng = np.random.default_rng(2)
geom = slater.WedgeGeometry3D(a=0.5, v=0.2, c=1.0)
field = slater.MaxwellField.random(rng, n_modes=2)
x = geom.point_on_kink(s=0.8, perp=(0.4, -0.2))

rep = slater.slater_kink_violation(field, geom, x)
print("photon one-sided currents at a kink event:")
print("  j_L =", np.round(rep["j_L"], 4))
print("  j_R =", np.round(rep["j_R"], 4))
print(f"  geometric-normal mismatch: {rep['mismatch_geometric']:+.4f}")
print(f"  chart fluxes: {rep['chart_flux_left']:+.4f} vs {rep['chart_flux_right']:+.4f}")
print(f"  sign-violating normal n_K* = {np.round(rep['n_K_star'], 4)}")
print(f"  fluxes through n_K*: signs ({rep['sign_left']:+d}, {rep['sign_right']:+d})"
      f" -> continuation fails: {rep['continuation_fails']}")

psi = dirac.MultiTimeWaveFunction.product(
    dirac.get_representation("dirac4"), [1.0],
    [[{"k": [0.3, 0.1, -0.2]}, {"k": [-0.4, 0.2, 0.5], "amplitude": 0.8}]])
con = slater.dirac_kink_contrast(psi, geom, x)
print(f"\npaired Dirac check on the same geometry: chart fluxes "
      f"{con['chart_flux_left']:+.6f} vs {con['chart_flux_right']:+.6f} "
      f"(relative mismatch {con['chart_mismatch_rel']:.1e})")

n_const = geom.normal_down(+1)
div_c = slater.slater_divergence_check(field, lambda _: n_const, x)
ax = geom.axis


def n_var(xx):
    chi = 0.3 * np.sin(0.8 * (xx[1:] @ ax) + 0.5 * xx[0])
    return np.concatenate([[np.cosh(chi)], -np.sinh(chi) * ax])


div_v = slater.slater_divergence_check(field, n_var, x)
print(f"\n4-divergence of T n: constant normal {div_c:.2e}, "
      f"varying normal field {div_v:+.4f}")
