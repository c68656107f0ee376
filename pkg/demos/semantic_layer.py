"""The semantic service layer: similarity, rates, and secrecy bookkeeping.

Prints the similarity-vs-SNR curve, the fixed rate constants it induces,
the inversion from target rates back to SINR requirements, and how the
stepwise bit-oriented reference differs from the smooth semantic one.
"""

import numpy as np

from sensem.config import SystemConfig, db_to_linear, linear_to_db
from sensem.metrics import (
    BcModel,
    bc_rate,
    SemanticModel,
    semantic_rate,
    semantic_similarity,
    sinr_thresholds,
)

cfg = SystemConfig()
model = SemanticModel.from_config(cfg)

print("=== similarity curve ===")
print(f"floor/ceiling asymptotes: {model.a1} / {model.a2}")
print(f"{'SNR (dB)':>9} {'similarity':>11}")
for snr_db in (-10.0, -3.0, 0.0, 3.16, 6.0, 10.0, 20.0):
    sim = semantic_similarity(model, db_to_linear(snr_db))
    print(f"{snr_db:>9.2f} {sim:>11.4f}")

print("\n=== rate constants ===")
print(f"rate scale      : {model.rate_scale:.1f} suts/s")
print(f"lowest rate     : {model.rate_scale * model.a1:.3f} suts/s (never below)")
print(f"highest rate    : {model.rate_scale * model.a2:.3f} suts/s (never above)")
print(f"secrecy ceiling : {model.ssr_ceiling:.3f} suts/s")

print("\n=== rates to SINR requirements and back ===")
print(f"{'leak cap':>9} {'margin':>7} {'eve SINR<=':>11} {'user SINR>=':>12} {'roundtrip':>10}")
for r_th, eps in ((16_000.0, 0.0), (20_000.0, 5_000.0), (25_000.0, 10_000.0)):
    thr = sinr_thresholds(model, r_th, eps)
    back = semantic_rate(model, thr.gamma_eve)
    print(f"{r_th:>9.0f} {eps:>7.0f} {thr.gamma_eve:>11.4f} {thr.gamma_com:>12.4f} "
          f"{abs(back - r_th) / r_th:>10.2e}")

print("\n=== smooth vs stepped delivery ===")
bcm = BcModel.from_config(cfg)
print(f"bit-oriented scale {bcm.rate_scale:.1f} suts/s over {len(bcm.thresholds_db)} steps")
print(f"{'SNR (dB)':>9} {'semantic (suts/s)':>18} {'bit-oriented (suts/s)':>22}")
for snr_db in (-8.0, -2.0, 2.0, 6.0, 12.0, 18.0):
    g = db_to_linear(snr_db)
    sem = semantic_rate(model, g)
    bit = bc_rate(bcm, g)
    print(f"{snr_db:>9.1f} {sem:>18.1f} {bit:>22.1f}")

# the step map is right-continuous: crossing a threshold jumps the rate
g0 = db_to_linear(bcm.thresholds_db[1])
print("\nstep behavior near a threshold "
      f"({bcm.thresholds_db[1]:.1f} dB): "
      f"below {bc_rate(bcm, g0 * 0.999):.1f}, at {bc_rate(bcm, g0):.1f} suts/s")
print(f"highest step reached beyond {linear_to_db(db_to_linear(bcm.thresholds_db[-1])):.1f} dB")
