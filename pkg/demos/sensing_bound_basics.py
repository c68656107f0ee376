"""Anatomy of the angle-accuracy bound.

Walks the reflect-and-listen geometry, shows the two equivalent routes
to the estimation bound, and checks the scaling laws a radar engineer
would expect: more power or a longer frame both tighten the bound
linearly.
"""

import numpy as np

from sensem.channels import cascaded_echo
from sensem.config import SystemConfig, default_layout
from sensem.metrics import crb_theta_closed, crb_theta_fim, fim_theta
from sensem.optimizer import Scenario

rng = np.random.default_rng(0)
cfg = SystemConfig(n_irs=6)
lay = default_layout(cfg.k_scu)
scn = Scenario.sample(cfg, seed=0, layout=lay)
scene = scn.channels.scene

print("=== geometry ===")
print(f"surface sits at {lay.irs}, target at {lay.mst}")
print(f"surface-to-target range : {lay.d_irs_mst:.2f} m")
print(f"target bearing          : {np.degrees(scene.theta):.3f} deg")
print(f"round-trip amplitude    : {abs(scene.alpha):.3e}")

# a random transmit covariance with the full budget spread over streams
x = rng.standard_normal((cfg.m_t, cfg.m_t)) + 1j * rng.standard_normal((cfg.m_t, cfg.m_t))
r_x = x @ x.conj().T
r_x *= cfg.p_max_w / np.trace(r_x).real
v = np.exp(2j * np.pi * rng.random(cfg.n_irs))

args = (scn.channels, v, r_x, cfg.l_frame, cfg.sigma_s2_w, scene.alpha)
closed = crb_theta_closed(*args)
via_fim = crb_theta_fim(fim_theta(*args))
print("\n=== two routes, one bound ===")
print(f"closed form       : {closed:.6e} rad^2")
print(f"3x3 info inverse  : {via_fim:.6e} rad^2")
print(f"relative mismatch : {abs(closed - via_fim) / via_fim:.2e}")
print("(a random waveform through twice the path loss is a poor probe;")
print(" the design demos show how optimization buys the missing decades)")

print("\n=== power scaling ===")
print(f"{'scale':>6} {'bound (rad^2)':>15} {'base/bound':>11}")
for c in (0.5, 1.0, 2.0, 10.0):
    scaled = crb_theta_closed(scn.channels, v, c * r_x, cfg.l_frame, cfg.sigma_s2_w, scene.alpha)
    print(f"{c:>6.1f} {scaled:>15.6e} {closed / scaled:>11.4f}")

print("\n=== frame-length scaling ===")
for frames in (640, 1280, 2560):
    b = crb_theta_closed(scn.channels, v, r_x, frames, cfg.sigma_s2_w, scene.alpha)
    print(f"  {frames:>5} symbols -> {b:.6e} rad^2")

# the echo factors through the surface twice, so the derivative splits
# into a transmit-side and a receive-side term
echo = cascaded_echo(scn.channels, v)
print("\n=== echo structure ===")
print(f"echo matrix rank        : {np.linalg.matrix_rank(echo.h_bb)}")
print(f"derivative matrix rank  : {np.linalg.matrix_rank(echo.h_bb_dot)}")
