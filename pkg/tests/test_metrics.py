"""Covariances, SINRs, angle information, and the two rate chains."""

import numpy as np
import pytest

from sensem.config import ConfigError, PathLossModel, SystemConfig, default_layout
from sensem.channels import (
    cascaded_echo,
    composite_eve_channel,
    composite_scu_channel,
    synthesize_channels,
)
from sensem.metrics import (
    DEFAULT_CQI_TABLE,
    BcModel,
    BeamformerSet,
    CovarianceSet,
    DegenerateFimError,
    FimMatrix,
    NonIdentifiableError,
    PhaseProfile,
    SemanticModel,
    ThresholdPair,
    bc_rate,
    bc_secrecy_worst,
    covariance_from_beamformers,
    crb_theta_closed,
    crb_theta_fim,
    fim_theta,
    load_cqi_table,
    semantic_rate,
    semantic_similarity,
    sinr_eve,
    sinr_scu,
    sinr_thresholds,
    ssr_worst,
)


def _channels(seed: int = 0, **cfg_kwargs):
    cfg = SystemConfig(**cfg_kwargs)
    return cfg, synthesize_channels(cfg, default_layout(cfg.k_scu), PathLossModel(), seed)


def _random_bf(rng: np.random.Generator, k: int, m: int, power: float) -> BeamformerSet:
    w = rng.standard_normal((k + 2, m)) + 1j * rng.standard_normal((k + 2, m))
    w *= np.sqrt(power / np.sum(np.abs(w) ** 2))
    return BeamformerSet(w_c=w[:k], w_s=w[k], w_n=w[k + 1])


def _random_cov(rng: np.random.Generator, k: int, m: int, power: float) -> CovarianceSet:
    return covariance_from_beamformers(_random_bf(rng, k, m, power))


# ---------------------------------------------------------------------------
# covariances and phase profiles


def test_covariance_from_beamformers(rng: np.random.Generator) -> None:
    bf = _random_bf(rng, 2, 4, 1.0)
    cov = covariance_from_beamformers(bf)
    manual = sum(np.outer(bf.w_c[k], bf.w_c[k].conj()) for k in range(2))
    manual = manual + np.outer(bf.w_s, bf.w_s.conj()) + np.outer(bf.w_n, bf.w_n.conj())
    np.testing.assert_allclose(cov.r_x, manual, rtol=1e-12)
    assert cov.total_power() == pytest.approx(bf.total_power(), rel=1e-12)
    assert cov.total_power() == pytest.approx(1.0, rel=1e-12)


def test_covariance_rejects_indefinite_block() -> None:
    bad = np.diag([1.0, -1.0]).astype(complex)
    with pytest.raises(ConfigError):
        CovarianceSet(
            w_c_cov=np.zeros((1, 2, 2), dtype=complex),
            w_s_cov=bad,
            w_n_cov=np.zeros((2, 2), dtype=complex),
        )


def test_phase_profile_contract(rng: np.random.Generator) -> None:
    phases = rng.uniform(0.0, 2 * np.pi, 6)
    prof = PhaseProfile.from_phases(phases)
    np.testing.assert_allclose(np.abs(prof.v), 1.0, atol=1e-12)
    assert prof.v_aug.shape == (7,)
    assert prof.v_aug[-1] == 1.0 + 0.0j
    with pytest.raises(ConfigError):
        PhaseProfile(v=np.array([1.0, 0.5 + 0.0j]))


# ---------------------------------------------------------------------------
# SINRs replicated from first principles


def test_sinr_matches_manual_computation(rng: np.random.Generator) -> None:
    cfg, ch = _channels(seed=2)
    for _ in range(20):
        v = np.exp(2j * np.pi * rng.random(cfg.n_irs))
        bf = _random_bf(rng, cfg.k_scu, cfg.m_t, cfg.p_max_w)
        cov = covariance_from_beamformers(bf)
        for k in range(cfg.k_scu):
            h = composite_scu_channel(ch, v, k)
            sig = abs(h @ bf.w_c[k]) ** 2
            other = sum(abs(h @ bf.w_c[j]) ** 2 for j in range(cfg.k_scu) if j != k)
            other += abs(h @ bf.w_s) ** 2 + abs(h @ bf.w_n) ** 2
            manual = sig / (other + cfg.sigma_c2_w)
            assert sinr_scu(ch, v, cov, k, cfg.sigma_c2_w) == pytest.approx(manual, rel=1e-9)
            he = composite_eve_channel(ch, v)
            sig_e = abs(he @ bf.w_c[k]) ** 2
            other_e = sum(abs(he @ bf.w_c[j]) ** 2 for j in range(cfg.k_scu) if j != k)
            other_e += abs(he @ bf.w_s) ** 2 + abs(he @ bf.w_n) ** 2
            manual_e = sig_e / (other_e + cfg.sigma_e2_w)
            assert sinr_eve(ch, v, cov, k, cfg.sigma_e2_w) == pytest.approx(manual_e, rel=1e-9)


def test_sinr_eve_index_bounds(rng: np.random.Generator) -> None:
    cfg, ch = _channels(seed=2)
    cov = _random_cov(rng, cfg.k_scu, cfg.m_t, 1.0)
    v = np.ones(cfg.n_irs, dtype=complex)
    with pytest.raises(IndexError):
        sinr_eve(ch, v, cov, cfg.k_scu, cfg.sigma_e2_w)


# ---------------------------------------------------------------------------
# angle information


def test_crb_closed_equals_schur_complement(rng: np.random.Generator) -> None:
    cfg, ch = _channels(seed=4)
    worst = 0.0
    for _ in range(10):
        v = np.exp(2j * np.pi * rng.random(cfg.n_irs))
        cov = _random_cov(rng, cfg.k_scu, cfg.m_t, cfg.p_max_w)
        closed = crb_theta_closed(
            ch, v, cov.r_x, cfg.l_frame, cfg.sigma_s2_w, ch.scene.alpha
        )
        fim = fim_theta(ch, v, cov.r_x, cfg.l_frame, cfg.sigma_s2_w, ch.scene.alpha)
        via_fim = crb_theta_fim(fim)
        worst = max(worst, abs(closed - via_fim) / closed)
    assert worst < 1e-10


def test_crb_inversely_proportional_to_power(rng: np.random.Generator) -> None:
    cfg, ch = _channels(seed=4)
    v = np.exp(2j * np.pi * rng.random(cfg.n_irs))
    cov = _random_cov(rng, cfg.k_scu, cfg.m_t, cfg.p_max_w)
    base = crb_theta_closed(ch, v, cov.r_x, cfg.l_frame, cfg.sigma_s2_w, ch.scene.alpha)
    for c in (0.5, 2.0, 10.0):
        scaled = crb_theta_closed(
            ch, v, c * cov.r_x, cfg.l_frame, cfg.sigma_s2_w, ch.scene.alpha
        )
        assert scaled == pytest.approx(base / c, rel=1e-12)


def test_degenerate_echo_raises(rng: np.random.Generator) -> None:
    cfg, ch = _channels(seed=4)
    v = np.ones(cfg.n_irs, dtype=complex)
    zero = np.zeros((cfg.m_t, cfg.m_t), dtype=complex)
    with pytest.raises(DegenerateFimError):
        crb_theta_closed(ch, v, zero, cfg.l_frame, cfg.sigma_s2_w, ch.scene.alpha)
    with pytest.raises(DegenerateFimError):
        fim_theta(ch, v, zero, cfg.l_frame, cfg.sigma_s2_w, ch.scene.alpha)


def test_transmit_null_is_degenerate(rng: np.random.Generator) -> None:
    # a beam orthogonal to the forward cascade never illuminates the target
    cfg, ch = _channels(seed=4)
    v = np.exp(2j * np.pi * rng.random(cfg.n_irs))
    b = cascaded_echo(ch, v).b
    x = rng.standard_normal(cfg.m_t) + 1j * rng.standard_normal(cfg.m_t)
    x = x - (b @ x / (b @ b.conj())) * b.conj()
    r1 = np.outer(x, x.conj())
    with pytest.raises(DegenerateFimError):
        crb_theta_closed(ch, v, r1, cfg.l_frame, cfg.sigma_s2_w, ch.scene.alpha)


def test_schur_collapse_not_identifiable() -> None:
    # cross information saturating the diagonal leaves no angle information
    f = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    with pytest.raises(NonIdentifiableError):
        crb_theta_fim(FimMatrix(matrix=f))


# ---------------------------------------------------------------------------
# semantic chain


def test_semantic_model_constants() -> None:
    model = SemanticModel()
    assert model.rate_scale == pytest.approx(39062.5)
    assert model.ssr_ceiling == pytest.approx(23828.125)
    with pytest.raises(ConfigError):
        SemanticModel(a1=0.5, a2=0.4)
    with pytest.raises(ConfigError):
        SemanticModel(c1=0.0)


def test_similarity_shape() -> None:
    model = SemanticModel()
    # saturation on both ends of the SNR axis
    assert semantic_similarity(model, 1e-30) == pytest.approx(model.a1, abs=1e-9)
    assert semantic_similarity(model, 1e30) == pytest.approx(model.a2, abs=1e-9)
    # midpoint of the logistic sits where the exponent vanishes
    g_mid = 10.0 ** (-model.c2 / model.c1 / 10.0)
    mid = 0.5 * (model.a1 + model.a2)
    assert semantic_similarity(model, g_mid) == pytest.approx(mid, abs=1e-12)
    gammas = np.logspace(-3.0, 4.0, 200)
    sims = semantic_similarity(model, gammas)
    assert np.all(np.diff(sims) > 0.0)
    with pytest.raises(ConfigError):
        semantic_similarity(model, 0.0)


def test_threshold_inversion_roundtrip(rng: np.random.Generator) -> None:
    model = SemanticModel()
    lo, hi = model.rate_scale * model.a1, model.rate_scale * model.a2
    worst = 0.0
    for _ in range(100):
        r = float(rng.uniform(lo + 1.0, hi - 1.0))
        eps = float(rng.uniform(0.0, hi - r - 1.0))
        thr = sinr_thresholds(model, r, eps)
        worst = max(worst, abs(semantic_rate(model, thr.gamma_eve) - r) / r)
        worst = max(worst, abs(semantic_rate(model, thr.gamma_com) - (r + eps)) / (r + eps))
        assert thr.gamma_com >= thr.gamma_eve
    assert worst < 1e-6


def test_threshold_range_errors() -> None:
    model = SemanticModel()
    with pytest.raises(ConfigError):
        sinr_thresholds(model, model.rate_scale * model.a1, 0.0)   # at the floor
    with pytest.raises(ConfigError):
        sinr_thresholds(model, model.rate_scale * model.a2, 0.0)   # at the ceiling
    with pytest.raises(ConfigError):
        sinr_thresholds(model, 20000.0, -1.0)
    with pytest.raises(ConfigError):
        ThresholdPair(gamma_com=0.0, gamma_eve=1.0, r_th=1.0, epsilon=0.0)


def test_ssr_worst_matches_manual(rng: np.random.Generator) -> None:
    cfg, ch = _channels(seed=6)
    model = SemanticModel.from_config(cfg)
    v = np.exp(2j * np.pi * rng.random(cfg.n_irs))
    cov = _random_cov(rng, cfg.k_scu, cfg.m_t, cfg.p_max_w)
    worst, per_k = ssr_worst(ch, v, cov, model, cfg.sigma_c2_w, cfg.sigma_e2_w)
    assert worst == pytest.approx(per_k.min())
    assert np.all(per_k >= 0.0)
    for k in range(cfg.k_scu):
        r_com = semantic_rate(model, sinr_scu(ch, v, cov, k, cfg.sigma_c2_w))
        r_eve = semantic_rate(model, sinr_eve(ch, v, cov, k, cfg.sigma_e2_w))
        assert per_k[k] == pytest.approx(max(r_com - r_eve, 0.0), rel=1e-12)
    assert worst <= model.ssr_ceiling


# ---------------------------------------------------------------------------
# bit-oriented reference chain


def test_bc_rate_is_a_right_continuous_step() -> None:
    cfg = SystemConfig()
    bcm = BcModel.from_config(cfg)
    assert len(DEFAULT_CQI_TABLE) == 15
    assert bcm.rate_scale == pytest.approx(cfg.bandwidth_hz * cfg.i_sem / (20.0 * cfg.l_s))
    # below the lowest operating point nothing is delivered
    assert bc_rate(bcm, 10 ** (-2.0)) == 0.0
    th_db, eff = bcm.thresholds_db[0], bcm.efficiencies[0]
    at = bc_rate(bcm, 10 ** (th_db / 10.0))
    assert at == pytest.approx(bcm.rate_scale * eff)
    just_below = bc_rate(bcm, 10 ** ((th_db - 1e-6) / 10.0))
    assert just_below == 0.0
    gammas = np.logspace(-1.5, 3.0, 300)
    rates = np.array([bc_rate(bcm, float(g)) for g in gammas])
    assert np.all(np.diff(rates) >= 0.0)
    assert len(np.unique(rates)) == 16  # all 15 steps plus zero
    with pytest.raises(ConfigError):
        bc_rate(bcm, 0.0)


def test_bc_secrecy_worst_matches_manual(rng: np.random.Generator) -> None:
    cfg, ch = _channels(seed=6)
    bcm = BcModel.from_config(cfg)
    v = np.exp(2j * np.pi * rng.random(cfg.n_irs))
    cov = _random_cov(rng, cfg.k_scu, cfg.m_t, cfg.p_max_w)
    worst, per_k = bc_secrecy_worst(ch, v, cov, bcm, cfg.sigma_c2_w, cfg.sigma_e2_w)
    assert worst == pytest.approx(per_k.min())
    for k in range(cfg.k_scu):
        r_com = bc_rate(bcm, sinr_scu(ch, v, cov, k, cfg.sigma_c2_w))
        r_eve = bc_rate(bcm, sinr_eve(ch, v, cov, k, cfg.sigma_e2_w))
        assert per_k[k] == pytest.approx(max(r_com - r_eve, 0.0))


def test_load_cqi_table(tmp_path) -> None:
    path = tmp_path / "table.csv"
    path.write_text("# header comment\n-5.0,0.2\n\n0.0,1.0\n")
    assert load_cqi_table(path) == [(-5.0, 0.2), (0.0, 1.0)]
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0\n")
    with pytest.raises(ConfigError):
        load_cqi_table(bad)
    empty = tmp_path / "empty.csv"
    empty.write_text("# nothing\n")
    with pytest.raises(ConfigError):
        load_cqi_table(empty)
