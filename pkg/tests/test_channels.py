"""Array responses, channel synthesis, lifting, and the cascaded echo."""

import numpy as np
import pytest

from sensem.config import ConfigError, PathLossModel, SystemConfig, default_layout
from sensem.channels import (
    cascaded_echo,
    composite_eve_channel,
    composite_scu_channel,
    lift_composite,
    path_loss_gain,
    sensing_scene_from_layout,
    steering_derivative,
    steering_vector,
    synthesize_channels,
)
from sensem.metrics import PhaseProfile


def _channels(seed: int = 0, **cfg_kwargs):
    cfg = SystemConfig(**cfg_kwargs)
    return synthesize_channels(cfg, default_layout(cfg.k_scu), PathLossModel(), seed)


# ---------------------------------------------------------------------------
# steering vectors


def test_steering_vector_basics() -> None:
    a = steering_vector(6, 0.4)
    assert a.shape == (6,)
    np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-14)
    assert a[0] == pytest.approx(1.0)
    # single element has no geometry to encode
    np.testing.assert_allclose(steering_vector(1, 1.2), [1.0 + 0.0j])
    # broadside: all elements in phase
    np.testing.assert_allclose(steering_vector(5, 0.0), np.ones(5), atol=1e-14)


def test_steering_derivative_matches_finite_difference(rng: np.random.Generator) -> None:
    h = 1e-6
    worst = 0.0
    for _ in range(25):
        n = int(rng.integers(2, 12))
        theta = float(rng.uniform(-1.4, 1.4))
        fd = (steering_vector(n, theta + h) - steering_vector(n, theta - h)) / (2 * h)
        an = steering_derivative(n, theta)
        worst = max(worst, np.abs(fd - an).max() / max(np.abs(an).max(), 1.0))
    assert worst < 1e-7


# ---------------------------------------------------------------------------
# path loss and the sensing scene


def test_path_loss_gain_anchors() -> None:
    plm = PathLossModel()
    assert path_loss_gain(plm, 1.0, "irs") == pytest.approx(1e-3)
    assert path_loss_gain(plm, 1.0, "direct") == pytest.approx(1e-3)
    assert path_loss_gain(plm, 10.0, "irs") == pytest.approx(1e-3 * 10.0 ** -2.5)
    assert path_loss_gain(plm, 10.0, "direct") == pytest.approx(1e-3 * 10.0 ** -3.5)
    with pytest.raises(ConfigError):
        path_loss_gain(plm, 1.0, "sideways")
    with pytest.raises(ConfigError):
        path_loss_gain(plm, 0.0, "irs")


def test_sensing_scene_constants() -> None:
    lay = default_layout()
    scene = sensing_scene_from_layout(lay, PathLossModel())
    assert scene.theta == pytest.approx(lay.theta_mst)
    # one-hop surface-to-target power gain at sqrt(125) meters
    assert abs(scene.alpha) == pytest.approx(2.3926e-6, rel=1e-3)
    assert abs(scene.alpha) == pytest.approx(
        path_loss_gain(PathLossModel(), lay.d_irs_mst, "irs"), rel=1e-12
    )


# ---------------------------------------------------------------------------
# synthesized channel sets


def test_channel_shapes_and_determinism() -> None:
    ch = _channels(seed=3)
    assert ch.g_t.shape == (8, 4)
    assert ch.g_r.shape == (4, 8)
    assert ch.h_c.shape == (2, 8)
    assert ch.h_d.shape == (2, 4)
    assert ch.g_e.shape == (8,)
    assert ch.h_e.shape == (4,)
    again = _channels(seed=3)
    np.testing.assert_array_equal(ch.g_t, again.g_t)
    np.testing.assert_array_equal(ch.h_c, again.h_c)
    other = _channels(seed=4)
    assert np.abs(ch.g_t - other.g_t).max() > 0.0


def test_monostatic_return_is_transposed_forward() -> None:
    # co-located transmit and receive arrays share one propagation path
    ch = _channels(seed=11)
    np.testing.assert_allclose(ch.g_r, ch.g_t.T, atol=0.0)


# ---------------------------------------------------------------------------
# lifting identity


def test_lifted_quadratic_matches_direct_composite(rng: np.random.Generator) -> None:
    ch = _channels(seed=5)
    w = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    w = w @ w.conj().T
    worst = 0.0
    for _ in range(100):
        v = np.exp(2j * np.pi * rng.random(8))
        vt = PhaseProfile(v=v).v_aug
        for k in range(2):
            h = composite_scu_channel(ch, v, k)
            direct = float(np.real(h @ w @ h.conj()))
            lift = lift_composite(ch.h_c[k], ch.g_t, ch.h_d[k])
            lifted = float(np.real(vt.conj() @ np.conj(lift @ w @ lift.conj().T) @ vt))
            worst = max(worst, abs(direct - lifted) / max(abs(direct), 1e-300))
        he = composite_eve_channel(ch, v)
        direct = float(np.real(he @ w @ he.conj()))
        lift = lift_composite(ch.g_e, ch.g_t, ch.h_e)
        lifted = float(np.real(vt.conj() @ np.conj(lift @ w @ lift.conj().T) @ vt))
        worst = max(worst, abs(direct - lifted) / max(abs(direct), 1e-300))
    assert worst < 1e-12


# ---------------------------------------------------------------------------
# cascaded echo


def test_echo_structure(rng: np.random.Generator) -> None:
    ch = _channels(seed=9)
    for _ in range(10):
        v = np.exp(2j * np.pi * rng.random(8))
        echo = cascaded_echo(ch, v)
        assert echo.b.shape == (4,)
        assert echo.c.shape == (4,)
        np.testing.assert_allclose(echo.h_bb, np.outer(echo.c, echo.b), rtol=1e-12)
        np.testing.assert_allclose(
            echo.h_bb_dot,
            np.outer(echo.c_dot, echo.b) + np.outer(echo.c, echo.b_dot),
            rtol=1e-12,
        )


def test_echo_vectors_from_cascade(rng: np.random.Generator) -> None:
    ch = _channels(seed=9)
    a = steering_vector(8, ch.scene.theta, ch.spacing_ratio)
    v = np.exp(2j * np.pi * rng.random(8))
    echo = cascaded_echo(ch, v)
    np.testing.assert_allclose(echo.b, ch.g_t.T @ (v * a), rtol=1e-12)
    np.testing.assert_allclose(echo.c, ch.g_r @ (v * a), rtol=1e-12)
