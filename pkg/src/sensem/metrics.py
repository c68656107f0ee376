"""Sensing and secrecy metrics.

Three families live here:

* estimation accuracy: the Fisher information of the target angle and
  complex reflection gain observed through the cascaded echo, and the
  resulting angle Cramer-Rao bound in closed form;
* semantic communication: per-user and eavesdropper SINRs, the logistic
  similarity-versus-SNR fit, semantic rates in suts/s, the worst-case
  semantic secrecy rate, and the inversion of rate targets into SINR
  thresholds;
* a conventional bit-oriented reference: CQI-table spectral efficiency
  mapped to an equivalent word rate, for semantic-versus-bit studies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sensem.channels import (
    ChannelSet,
    cascaded_echo,
    composite_eve_channel,
    composite_scu_channel,
)
from sensem.config import ConfigError, SystemConfig


class DegenerateFimError(ValueError):
    """The echo carries no energy: the Fisher information is degenerate."""


class NonIdentifiableError(ValueError):
    """The angle is not identifiable: its information Schur complement is <= 0."""


# ---------------------------------------------------------------------------
# beamformers and covariances


@dataclass
class BeamformerSet:
    """Transmit beamformers: one per user plus sensing and noise vectors."""

    w_c: np.ndarray   # (K, M_t)
    w_s: np.ndarray   # (M_t,)
    w_n: np.ndarray   # (M_t,)

    @property
    def k_scu(self) -> int:
        return self.w_c.shape[0]

    @property
    def m_t(self) -> int:
        return self.w_c.shape[1]

    def total_power(self) -> float:
        return float(
            np.sum(np.abs(self.w_c) ** 2)
            + np.sum(np.abs(self.w_s) ** 2)
            + np.sum(np.abs(self.w_n) ** 2)
        )


_PSD_TOL = 1e-9


def _check_psd(mat: np.ndarray, label: str) -> None:
    herm_err = np.linalg.norm(mat - mat.conj().T)
    scale = max(np.linalg.norm(mat), 1e-300)
    if herm_err > 1e-8 * scale:
        raise ConfigError(f"{label} is not Hermitian (error {herm_err:.3e})")
    eigmin = float(np.linalg.eigvalsh((mat + mat.conj().T) / 2).min())
    floor = -_PSD_TOL * max(float(np.trace(mat).real), 1e-300)
    if eigmin < floor:
        raise ConfigError(f"{label} is not PSD (min eigenvalue {eigmin:.3e})")


@dataclass
class CovarianceSet:
    """Per-stream transmit covariances and their sum r_x.

    Every block must be Hermitian PSD within a small relative slack;
    ``r_x`` is always recomputed as the exact sum of the blocks.
    """

    w_c_cov: np.ndarray   # (K, M_t, M_t)
    w_s_cov: np.ndarray   # (M_t, M_t)
    w_n_cov: np.ndarray   # (M_t, M_t)
    r_x: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        for k in range(self.w_c_cov.shape[0]):
            _check_psd(self.w_c_cov[k], f"w_c_cov[{k}]")
        _check_psd(self.w_s_cov, "w_s_cov")
        _check_psd(self.w_n_cov, "w_n_cov")
        self.r_x = self.w_c_cov.sum(axis=0) + self.w_s_cov + self.w_n_cov

    @property
    def k_scu(self) -> int:
        return self.w_c_cov.shape[0]

    def total_power(self) -> float:
        return float(np.trace(self.r_x).real)


def covariance_from_beamformers(bf: BeamformerSet) -> CovarianceSet:
    """Rank-one covariances w w^H of each beamformer."""
    w_c_cov = np.einsum("ki,kj->kij", bf.w_c, bf.w_c.conj())
    return CovarianceSet(
        w_c_cov=w_c_cov,
        w_s_cov=np.outer(bf.w_s, bf.w_s.conj()),
        w_n_cov=np.outer(bf.w_n, bf.w_n.conj()),
    )


@dataclass
class PhaseProfile:
    """Unit-modulus reflection coefficients, optionally with a lifted V.

    ``v_aug`` appends the constant 1 used by the lifting; when a relaxed
    Gram matrix ``big_v`` is attached it must be Hermitian PSD with unit
    diagonal.
    """

    v: np.ndarray                  # (N,)
    big_v: np.ndarray | None = None

    def __post_init__(self) -> None:
        mod_err = float(np.abs(np.abs(self.v) - 1.0).max())
        if mod_err > 1e-9:
            raise ConfigError(f"phase profile not unit modulus (error {mod_err:.3e})")
        if self.big_v is not None:
            _check_psd(self.big_v, "big_v")
            diag_err = float(np.abs(np.diagonal(self.big_v).real - 1.0).max())
            if diag_err > 1e-6:
                raise ConfigError(f"lifted V diagonal departs from one by {diag_err:.3e}")

    @property
    def n_irs(self) -> int:
        return self.v.shape[0]

    @property
    def v_aug(self) -> np.ndarray:
        return np.concatenate([self.v, [1.0 + 0.0j]])

    @classmethod
    def from_phases(cls, phases: np.ndarray) -> "PhaseProfile":
        return cls(v=np.exp(1j * np.asarray(phases, dtype=float)))


# ---------------------------------------------------------------------------
# SINRs


def _quad(h_row: np.ndarray, mat: np.ndarray) -> float:
    """Real quadratic form h M h^H of a row channel and a Hermitian matrix."""
    return float(np.real(h_row @ mat @ h_row.conj()))


def sinr_scu(ch: ChannelSet, v: np.ndarray, cov: CovarianceSet, k: int, sigma_c2: float) -> float:
    """Downlink SINR of user ``k``: own stream over all other streams plus noise."""
    h = composite_scu_channel(ch, v, k)
    num = _quad(h, cov.w_c_cov[k])
    den = _quad(h, cov.r_x - cov.w_c_cov[k]) + sigma_c2
    return max(num, 0.0) / max(den, 1e-300)


def sinr_eve(ch: ChannelSet, v: np.ndarray, cov: CovarianceSet, k: int, sigma_e2: float) -> float:
    """Eavesdropper SINR when intercepting the stream of user ``k``."""
    if not 0 <= k < cov.k_scu:
        raise IndexError(f"user index {k} out of range for {cov.k_scu} streams")
    h = composite_eve_channel(ch, v)
    num = _quad(h, cov.w_c_cov[k])
    den = _quad(h, cov.r_x - cov.w_c_cov[k]) + sigma_e2
    return max(num, 0.0) / max(den, 1e-300)


# ---------------------------------------------------------------------------
# Fisher information and the angle CRB


@dataclass
class FimMatrix:
    """3x3 Fisher information over (theta, Re alpha, Im alpha)."""

    matrix: np.ndarray

    @property
    def f_theta_theta(self) -> float:
        return float(self.matrix[0, 0])

    @property
    def f_theta_alpha(self) -> np.ndarray:
        return self.matrix[0, 1:]

    @property
    def f_alpha_alpha(self) -> np.ndarray:
        return self.matrix[1:, 1:]


def _echo_traces(ch: ChannelSet, v: np.ndarray, r_x: np.ndarray) -> tuple[float, complex, float]:
    """(tr(Hd R Hd^H), tr(H R Hd^H), tr(H R H^H)) for the cascaded echo."""
    echo = cascaded_echo(ch, v)
    h, hd = echo.h_bb, echo.h_bb_dot
    a = float(np.real(np.trace(hd @ r_x @ hd.conj().T)))
    t = complex(np.trace(h @ r_x @ hd.conj().T))
    c = float(np.real(np.trace(h @ r_x @ h.conj().T)))
    return a, t, c


def fim_theta(
    ch: ChannelSet,
    v: np.ndarray,
    r_x: np.ndarray,
    l_frame: float,
    sigma_s2: float,
    alpha: complex,
) -> FimMatrix:
    """Fisher information of (theta, Re alpha, Im alpha) from L snapshots.

    Raises :class:`DegenerateFimError` when the echo carries no energy
    (tr(H R H^H) vanishes), since alpha is then unobservable.
    """
    a, t, c = _echo_traces(ch, v, r_x)
    if c <= 0.0:
        raise DegenerateFimError("echo energy tr(H R H^H) is zero")
    pref = 2.0 * l_frame / sigma_s2
    at = np.conj(alpha) * t
    f = np.zeros((3, 3))
    f[0, 0] = pref * abs(alpha) ** 2 * a
    f[0, 1] = pref * at.real
    f[0, 2] = pref * (at * 1j).real
    f[1, 0], f[2, 0] = f[0, 1], f[0, 2]
    f[1, 1] = f[2, 2] = pref * c
    return FimMatrix(matrix=f)


def crb_theta_fim(fim: FimMatrix) -> float:
    """Angle CRB as the reciprocal Schur complement of the 3x3 FIM."""
    f_aa = fim.f_alpha_alpha
    f_ta = fim.f_theta_alpha
    schur = fim.f_theta_theta - float(f_ta @ np.linalg.solve(f_aa, f_ta))
    if not np.isfinite(schur) or schur <= 0.0:
        raise NonIdentifiableError(f"information Schur complement {schur} is not positive")
    return 1.0 / schur


def crb_theta_closed(
    ch: ChannelSet,
    v: np.ndarray,
    r_x: np.ndarray,
    l_frame: float,
    sigma_s2: float,
    alpha: complex,
) -> float:
    """Closed-form angle CRB sigma^2 / (2 L |alpha|^2 J).

    J = tr(Hd R Hd^H) - |tr(H R Hd^H)|^2 / tr(H R H^H) is nonnegative by
    Cauchy-Schwarz; a nonpositive J (numerically) means theta is not
    identifiable at this operating point.
    """
    a, t, c = _echo_traces(ch, v, r_x)
    if c <= 0.0:
        raise DegenerateFimError("echo energy tr(H R H^H) is zero")
    j = a - abs(t) ** 2 / c
    if j <= 0.0:
        raise NonIdentifiableError(f"sensing information J = {j} is not positive")
    return sigma_s2 / (2.0 * l_frame * abs(alpha) ** 2 * j)


# ---------------------------------------------------------------------------
# semantic similarity, rates, secrecy


@dataclass(frozen=True)
class SemanticModel:
    """Logistic similarity-versus-SNR fit plus the rate normalization.

    The similarity of a recovered word at linear SINR ``g`` is
    ``a1 + (a2 - a1) / (1 + exp(-c1 * SNRdB - c2))``; the semantic rate
    scales it by ``bandwidth * i_sem / (kappa * l_s)`` suts/s.
    """

    a1: float = 0.37
    a2: float = 0.98
    c1: float = 0.25
    c2: float = -0.79
    kappa: float = 5.0
    l_s: int = 256
    bandwidth_hz: float = 5e6
    i_sem: float = 10.0

    def __post_init__(self) -> None:
        if not 0.0 < self.a1 < self.a2 <= 1.0:
            raise ConfigError("similarity floor/ceiling must satisfy 0 < a1 < a2 <= 1")
        if self.c1 <= 0.0:
            raise ConfigError("logistic slope c1 must be positive")
        if self.kappa <= 0 or self.l_s < 1 or self.bandwidth_hz <= 0 or self.i_sem <= 0:
            raise ConfigError("rate normalization parameters must be positive")

    @property
    def rate_scale(self) -> float:
        """suts/s carried per unit similarity: B * I / (kappa * L_s)."""
        return self.bandwidth_hz * self.i_sem / (self.kappa * self.l_s)

    @property
    def ssr_ceiling(self) -> float:
        """Largest possible secrecy rate, rate_scale * (a2 - a1)."""
        return self.rate_scale * (self.a2 - self.a1)

    @classmethod
    def from_config(cls, cfg: SystemConfig, **kw) -> "SemanticModel":
        return cls(
            kappa=cfg.kappa,
            l_s=cfg.l_s,
            bandwidth_hz=cfg.bandwidth_hz,
            i_sem=cfg.i_sem,
            **kw,
        )


def semantic_similarity(model: SemanticModel, gamma):
    """Word similarity at linear SINR ``gamma`` (scalar or array), in (a1, a2)."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g <= 0.0):
        raise ConfigError("similarity defined for positive linear SINR only")
    snr_db = 10.0 * np.log10(g)
    sim = model.a1 + (model.a2 - model.a1) / (1.0 + np.exp(-model.c1 * snr_db - model.c2))
    return float(sim) if np.isscalar(gamma) else sim


def semantic_rate(model: SemanticModel, gamma):
    """Semantic rate in suts/s at linear SINR ``gamma``."""
    return model.rate_scale * semantic_similarity(model, gamma)


def ssr_worst(
    ch: ChannelSet,
    v: np.ndarray,
    cov: CovarianceSet,
    model: SemanticModel,
    sigma_c2: float,
    sigma_e2: float,
) -> tuple[float, np.ndarray]:
    """Worst-case semantic secrecy rate over users.

    Per user the leakage rate is evaluated at the eavesdropper's SINR on
    that user's stream and clamped at zero before the minimum is taken.
    Returns (worst, per-user array).
    """
    per_k = np.empty(cov.k_scu)
    for k in range(cov.k_scu):
        r_com = semantic_rate(model, sinr_scu(ch, v, cov, k, sigma_c2))
        r_eve = semantic_rate(model, sinr_eve(ch, v, cov, k, sigma_e2))
        per_k[k] = max(r_com - r_eve, 0.0)
    return float(per_k.min()), per_k


@dataclass(frozen=True)
class ThresholdPair:
    """SINR thresholds realizing a secrecy target.

    ``gamma_com`` is the minimum user SINR delivering ``r_th + epsilon``
    suts/s; ``gamma_eve`` the maximum eavesdropper SINR keeping leakage
    at or below ``r_th`` suts/s.
    """

    gamma_com: float
    gamma_eve: float
    r_th: float
    epsilon: float

    def __post_init__(self) -> None:
        if self.gamma_com <= 0.0 or self.gamma_eve <= 0.0:
            raise ConfigError("SINR thresholds must be positive")


def _invert_similarity(model: SemanticModel, sim: float) -> float:
    """Linear SINR at which the logistic fit reaches similarity ``sim``."""
    if not model.a1 < sim < model.a2:
        raise ConfigError(
            f"target similarity {sim} outside the open range ({model.a1}, {model.a2})"
        )
    exponent = -(model.c2 + np.log((model.a2 - sim) / (sim - model.a1))) / (10.0 * model.c1)
    return float(10.0 ** exponent)


def sinr_thresholds(model: SemanticModel, r_th: float, epsilon: float) -> ThresholdPair:
    """Invert (leakage target, secrecy margin) into the SINR threshold pair.

    Both normalized rates must fall strictly inside (a1, a2); outside
    that band the logistic fit cannot deliver the target and a
    :class:`ConfigError` is raised.
    """
    if epsilon < 0.0:
        raise ConfigError("secrecy margin epsilon must be nonnegative")
    sim_eve = r_th / model.rate_scale
    sim_com = (r_th + epsilon) / model.rate_scale
    return ThresholdPair(
        gamma_com=_invert_similarity(model, sim_com),
        gamma_eve=_invert_similarity(model, sim_eve),
        r_th=r_th,
        epsilon=epsilon,
    )


# ---------------------------------------------------------------------------
# bit-oriented reference chain

# Stand-in LTE CQI operating points (SNR switching threshold in dB,
# spectral efficiency in bits per symbol).  These are the widely used
# 15-level literature values, shipped as a replaceable default rather
# than ground truth; load a measured table for serious comparisons.
DEFAULT_CQI_TABLE: tuple[tuple[float, float], ...] = (
    (-6.7, 0.1523),
    (-4.7, 0.2344),
    (-2.3, 0.3770),
    (0.2, 0.6016),
    (2.4, 0.8770),
    (4.3, 1.1758),
    (5.9, 1.4766),
    (8.1, 1.9141),
    (10.3, 2.4063),
    (11.7, 2.7305),
    (14.1, 3.3223),
    (16.3, 3.9023),
    (18.7, 4.5234),
    (21.0, 5.1152),
    (22.7, 5.5547),
)


@dataclass(frozen=True)
class BcModel:
    """Bit-oriented reference rate via a CQI step table.

    ``mu`` is the average number of bits per word of the conventional
    encoder; the table maps SNR in dB to spectral efficiency with a step
    at each threshold and zero efficiency below the first one.
    """

    mu: float = 20.0
    l_s: int = 256
    bandwidth_hz: float = 5e6
    i_sem: float = 10.0
    thresholds_db: tuple[float, ...] = tuple(r[0] for r in DEFAULT_CQI_TABLE)
    efficiencies: tuple[float, ...] = tuple(r[1] for r in DEFAULT_CQI_TABLE)

    def __post_init__(self) -> None:
        if self.mu <= 0:
            raise ConfigError("bits per word mu must be positive")
        if len(self.thresholds_db) != len(self.efficiencies) or not self.thresholds_db:
            raise ConfigError("CQI table must pair thresholds with efficiencies")
        t = np.asarray(self.thresholds_db)
        e = np.asarray(self.efficiencies)
        if np.any(np.diff(t) <= 0) or np.any(np.diff(e) <= 0) or e[0] <= 0:
            raise ConfigError("CQI table must be strictly increasing in both columns")

    @property
    def rate_scale(self) -> float:
        """words/s equivalent scale: B * I / (mu * L_s)."""
        return self.bandwidth_hz * self.i_sem / (self.mu * self.l_s)

    @classmethod
    def from_config(cls, cfg: SystemConfig, mu: float = 20.0, table=None) -> "BcModel":
        kw = {}
        if table is not None:
            kw["thresholds_db"] = tuple(float(r[0]) for r in table)
            kw["efficiencies"] = tuple(float(r[1]) for r in table)
        return cls(mu=mu, l_s=cfg.l_s, bandwidth_hz=cfg.bandwidth_hz, i_sem=cfg.i_sem, **kw)


def load_cqi_table(path: str | Path) -> list[tuple[float, float]]:
    """Read an ordered ``threshold_db,efficiency`` table, one pair per line.

    Blank lines and lines starting with '#' are skipped.
    """
    rows: list[tuple[float, float]] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split(",")
        if len(parts) != 2:
            raise ConfigError(f"{path}:{lineno}: expected 'threshold_db,efficiency'")
        rows.append((float(parts[0]), float(parts[1])))
    if not rows:
        raise ConfigError(f"{path}: empty CQI table")
    return rows


def bc_rate(bcm: BcModel, gamma) -> float:
    """Bit-oriented word rate at linear SINR ``gamma``.

    Piecewise constant and right continuous: the efficiency of the
    largest threshold at or below the SNR applies, zero below the table.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g <= 0.0):
        raise ConfigError("bit-oriented rate defined for positive linear SINR only")
    snr_db = 10.0 * np.log10(g)
    idx = np.searchsorted(np.asarray(bcm.thresholds_db), snr_db, side="right")
    eff = np.concatenate([[0.0], np.asarray(bcm.efficiencies)])[idx]
    out = bcm.rate_scale * eff
    return float(out) if np.isscalar(gamma) else out


def bc_secrecy_worst(
    ch: ChannelSet,
    v: np.ndarray,
    cov: CovarianceSet,
    bcm: BcModel,
    sigma_c2: float,
    sigma_e2: float,
) -> tuple[float, np.ndarray]:
    """Worst-case bit-oriented secrecy rate over users, clamped per user."""
    per_k = np.empty(cov.k_scu)
    for k in range(cov.k_scu):
        r_com = bc_rate(bcm, sinr_scu(ch, v, cov, k, sigma_c2))
        r_eve = bc_rate(bcm, sinr_eve(ch, v, cov, k, sigma_e2))
        per_k[k] = max(r_com - r_eve, 0.0)
    return float(per_k.min()), per_k
