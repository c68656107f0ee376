"""Unit conversions, system parameters, geometry, and path-loss inputs."""

import dataclasses
import math

import numpy as np
import pytest

from sensem.config import (
    ConfigError,
    PathLossModel,
    SceneLayout,
    SystemConfig,
    db_to_linear,
    dbm_to_watt,
    default_layout,
    linear_to_db,
    watt_to_dbm,
)


@pytest.mark.parametrize(
    "p_dbm, p_w",
    [(30.0, 1.0), (0.0, 1e-3), (-90.0, 1e-12), (60.0, 1e3)],
)
def test_dbm_watt_anchors(p_dbm: float, p_w: float) -> None:
    assert dbm_to_watt(p_dbm) == pytest.approx(p_w, rel=1e-12)
    assert watt_to_dbm(p_w) == pytest.approx(p_dbm, abs=1e-10)


def test_power_roundtrip_random(rng: np.random.Generator) -> None:
    for _ in range(50):
        p = float(rng.uniform(-120.0, 80.0))
        assert watt_to_dbm(dbm_to_watt(p)) == pytest.approx(p, abs=1e-9)
        x = float(rng.uniform(1e-6, 1e6))
        assert db_to_linear(linear_to_db(x)) == pytest.approx(x, rel=1e-12)


def test_nonpositive_powers_rejected() -> None:
    with pytest.raises(ConfigError):
        watt_to_dbm(0.0)
    with pytest.raises(ConfigError):
        linear_to_db(-1.0)


def test_system_config_defaults() -> None:
    cfg = SystemConfig()
    assert (cfg.m_t, cfg.m_r, cfg.n_irs, cfg.k_scu) == (4, 4, 8, 2)
    assert cfg.l_s == 256
    assert cfg.kappa == 5.0
    # frame length is symbols-per-word times words
    assert cfg.l_frame == pytest.approx(1280.0)
    assert cfg.p_max_w == pytest.approx(1.0)
    assert cfg.sigma_s2_w == pytest.approx(1e-12)
    assert cfg.bandwidth_hz == 5e6
    assert cfg.i_sem == 10.0
    with pytest.raises(dataclasses.FrozenInstanceError):
        cfg.m_t = 2


@pytest.mark.parametrize(
    "kwargs",
    [
        {"m_t": 0},
        {"n_irs": 0},
        {"k_scu": 0},
        {"kappa": 0.0},
        {"bandwidth_hz": -1.0},
        {"p_max_w": 0.0},
        {"sigma_c2_w": -1e-12},
        {"spacing_ratio": 0.0},
    ],
)
def test_system_config_rejects(kwargs: dict) -> None:
    with pytest.raises(ConfigError):
        SystemConfig(**kwargs)


def test_default_layout_geometry() -> None:
    lay = default_layout()
    assert lay.d_bs_irs == pytest.approx(math.hypot(50.0, 10.0))
    assert lay.d_irs_mst == pytest.approx(math.sqrt(125.0))
    # target bearing seen from the surface array
    assert lay.theta_mst == pytest.approx(1.1071487177940904, abs=1e-12)
    assert lay.d_irs_eve > 0.0
    assert lay.d_bs_eve > 0.0
    for k in range(2):
        assert lay.d_irs_scu(k) > 0.0
        assert lay.d_bs_scu(k) > 0.0


def test_distance_and_angle_helpers() -> None:
    assert SceneLayout.distance((0.0, 0.0), (3.0, 4.0)) == pytest.approx(5.0)
    assert SceneLayout.angle_from((0.0, 0.0), (1.0, 1.0)) == pytest.approx(math.pi / 4)
    with pytest.raises(ConfigError):
        SceneLayout.angle_from((2.0, 2.0), (2.0, 2.0))


def test_degenerate_layout_rejected() -> None:
    lay = default_layout()
    with pytest.raises(ConfigError):
        dataclasses.replace(lay, mst=lay.irs)


def test_pathloss_defaults_and_validation() -> None:
    plm = PathLossModel()
    assert plm.k0 == pytest.approx(1e-3)
    assert plm.exp_irs == pytest.approx(2.5)
    assert plm.exp_direct == pytest.approx(3.5)
    with pytest.raises(ConfigError):
        PathLossModel(k0=0.0)
    with pytest.raises(ConfigError):
        PathLossModel(exp_irs=-1.0)
