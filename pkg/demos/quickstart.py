"""End-to-end tour: one secure sensing-plus-semantics design, start to finish.

Draws a small random scene, picks service thresholds from a target
secrecy operating point, runs the alternating design, and reports what
the optimized transmitter and surface actually deliver.
"""

import numpy as np

from sensem.config import SystemConfig, watt_to_dbm
from sensem.metrics import sinr_eve, sinr_scu, sinr_thresholds
from sensem.optimizer import DesignSettings, Scenario, alternating_optimize

# modest array sizes keep this demo under a minute on one core
cfg = SystemConfig(m_t=3, m_r=3, n_irs=4)
scn = Scenario.sample(cfg, seed=2)
model = scn.semantic

print("=== scene ===")
print(f"transmit/receive antennas : {cfg.m_t}/{cfg.m_r}")
print(f"reflecting elements       : {cfg.n_irs}")
print(f"served users              : {cfg.k_scu}")
print(f"power budget              : {watt_to_dbm(cfg.p_max_w):.0f} dBm")
print(f"target angle at surface   : {np.degrees(scn.channels.scene.theta):.2f} deg")

# operating point: guarantee 18000 suts/s to every user while capping
# what the eavesdropper can take, leaving a 6000 suts/s secrecy margin
r_th = 18_000.0
margin = 6_000.0
thr = sinr_thresholds(model, r_th, margin)
print("\n=== requirements ===")
print(f"leakage ceiling   : {r_th:.0f} suts/s  -> eavesdropper SINR <= {thr.gamma_eve:.3f}")
print(f"user floor        : {r_th + margin:.0f} suts/s  -> user SINR >= {thr.gamma_com:.3f}")

res = alternating_optimize(scn, thr, DesignSettings().fast())

print("\n=== optimized design ===")
print(f"stop reason       : {res.stop_reason} after {res.iterations} rounds")
print(f"angle error bound : {res.crb:.3e} rad^2  ({10 * np.log10(res.crb):.1f} dB)")
print(f"worst-user secrecy: {res.ssr:.0f} suts/s (floor {margin:.0f})")
for k, s in enumerate(res.ssr_per_user):
    print(f"  user {k}: secrecy rate {s:.0f} suts/s")

ch = scn.channels
v = res.phase.v
print("\n=== delivered SINRs vs thresholds ===")
for k in range(cfg.k_scu):
    got = sinr_scu(ch, v, res.cov, k, cfg.sigma_c2_w)
    print(f"  user {k}: {got:.3f} (needs >= {thr.gamma_com:.3f})")
worst_eve = max(sinr_eve(ch, v, res.cov, k, cfg.sigma_e2_w) for k in range(cfg.k_scu))
print(f"  eve   : {worst_eve:.3f} (capped at {thr.gamma_eve:.3f})")

p_used = res.cov.r_x.trace().real
print("\n=== power split ===")
print(f"total used {p_used:.3f} of {cfg.p_max_w:.3f} W")
for name, block in (
    ("user streams", sum(np.trace(w).real for w in res.cov.w_c_cov)),
    ("probing      ", np.trace(res.cov.w_s_cov).real),
    ("jamming      ", np.trace(res.cov.w_n_cov).real),
):
    print(f"  {name}: {block:.3f} W ({100 * block / p_used:.0f}%)")
