"""Small-scale channel synthesis and the reflected sensing echo.

Conventions:

* ``g_t`` is the BS-to-surface matrix with shape (N, M_t); ``g_r`` the
  surface-to-BS matrix with shape (M_r, N).  For a monostatic array
  (``m_t == m_r``) reciprocity forces ``g_r = g_t.T``.
* Per-user surface channels ``h_c[k]`` and the eavesdropper channel
  ``g_e`` are length-N vectors; direct BS channels ``h_d[k]`` and
  ``h_e`` are length-M_t vectors.  Composite downlink channels are the
  row vectors ``h.conj() * v @ g_t + h_direct.conj()``.
* The target echo travels BS -> surface -> target -> surface -> BS; the
  round-trip complex reflection gain ``alpha`` absorbs the target cross
  section and the two surface-target hops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sensem.config import ConfigError, PathLossModel, SceneLayout, SystemConfig

_LINK_CLASSES = ("irs", "direct")


def path_loss_gain(plm: PathLossModel, dist: float, link_class: str) -> float:
    """Linear power gain of one hop of length ``dist``.

    ``link_class`` selects the exponent: "irs" for surface-linked hops,
    "direct" for direct BS hops.
    """
    if link_class not in _LINK_CLASSES:
        raise ConfigError(f"unknown link class {link_class!r}")
    if dist <= 0.0:
        raise ConfigError("hop distance must be positive")
    exp = plm.exp_irs if link_class == "irs" else plm.exp_direct
    return plm.k0 * (dist / plm.d0) ** (-exp)


def steering_vector(n: int, theta: float, spacing_ratio: float = 0.5) -> np.ndarray:
    """ULA steering vector exp(j 2 pi (d/lambda) m sin(theta)), m = 0..n-1."""
    m = np.arange(n)
    return np.exp(1j * 2.0 * np.pi * spacing_ratio * m * np.sin(theta))


def steering_derivative(n: int, theta: float, spacing_ratio: float = 0.5) -> np.ndarray:
    """Elementwise derivative of :func:`steering_vector` with respect to theta."""
    m = np.arange(n)
    a = steering_vector(n, theta, spacing_ratio)
    return 1j * 2.0 * np.pi * spacing_ratio * np.cos(theta) * m * a


@dataclass(frozen=True)
class SensingScene:
    """Target geometry seen from the surface.

    ``theta`` is the direction of arrival at the surface array in
    (-pi/2, pi/2); ``alpha`` the round-trip reflection coefficient
    covering both surface-target hops and the target cross section.
    """

    theta: float
    alpha: complex

    def __post_init__(self) -> None:
        if not -np.pi / 2 < self.theta < np.pi / 2:
            raise ConfigError(f"target angle {self.theta} outside (-pi/2, pi/2)")
        if self.alpha == 0:
            raise ConfigError("round-trip reflection gain must be nonzero")


def sensing_scene_from_layout(layout: SceneLayout, plm: PathLossModel) -> SensingScene:
    """Build the sensing scene from geometry.

    The reflection magnitude is the square root of the product of the
    surface-to-target and target-to-surface power gains (a unit radar
    cross section with zero phase); both hops share one distance, so
    ``|alpha|`` equals the one-hop gain.
    """
    g_hop = path_loss_gain(plm, layout.d_irs_mst, "irs")
    alpha = complex(np.sqrt(g_hop * g_hop))
    return SensingScene(theta=layout.theta_mst, alpha=alpha)


@dataclass
class ChannelSet:
    """One realization of every small-scale channel plus the scene."""

    g_t: np.ndarray          # (N, M_t) BS -> surface
    g_r: np.ndarray          # (M_r, N) surface -> BS
    h_c: np.ndarray          # (K, N)  surface -> user k
    h_d: np.ndarray          # (K, M_t) BS -> user k, direct
    g_e: np.ndarray          # (N,)    surface -> eavesdropper
    h_e: np.ndarray          # (M_t,)  BS -> eavesdropper, direct
    scene: SensingScene
    spacing_ratio: float = 0.5

    def __post_init__(self) -> None:
        n, m_t = self.g_t.shape
        m_r = self.g_r.shape[0]
        if self.g_r.shape != (m_r, n):
            raise ConfigError("g_r shape inconsistent with g_t")
        k = self.h_c.shape[0]
        if self.h_c.shape != (k, n) or self.h_d.shape != (k, m_t):
            raise ConfigError("user channel shapes inconsistent")
        if self.g_e.shape != (n,) or self.h_e.shape != (m_t,):
            raise ConfigError("eavesdropper channel shapes inconsistent")

    @property
    def n_irs(self) -> int:
        return self.g_t.shape[0]

    @property
    def m_t(self) -> int:
        return self.g_t.shape[1]

    @property
    def m_r(self) -> int:
        return self.g_r.shape[0]

    @property
    def k_scu(self) -> int:
        return self.h_c.shape[0]


def _cn(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """I.i.d. circularly symmetric complex normal entries, unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _rician_matrix(rng, los: np.ndarray, beta: float, gain: float) -> np.ndarray:
    nlos = _cn(rng, *los.shape)
    mix = np.sqrt(beta / (1.0 + beta)) * los + np.sqrt(1.0 / (1.0 + beta)) * nlos
    return np.sqrt(gain) * mix


def synthesize_channels(
    cfg: SystemConfig,
    layout: SceneLayout,
    plm: PathLossModel,
    seed: int,
) -> ChannelSet:
    """Draw one channel realization.

    Surface-linked channels are Rician with line-of-sight components
    built from steering vectors (BS arrays assume half-wavelength
    spacing); direct BS channels are pure Rayleigh.  The draw order is
    fixed (g_t, g_r if bistatic, h_c by user, h_d, g_e, h_e) so a seed
    pins the whole set.
    """
    rng = np.random.default_rng(seed)
    n, m_t, m_r = cfg.n_irs, cfg.m_t, cfg.m_r
    if len(layout.scus) < cfg.k_scu:
        raise ConfigError("layout provides fewer users than k_scu")

    # BS -> surface: departure angle at the BS, arrival angle at the surface.
    ang_irs_bs = SceneLayout.angle_from(layout.irs, layout.bs)
    ang_bs_irs = SceneLayout.angle_from(layout.bs, layout.irs)
    a_irs = steering_vector(n, ang_irs_bs, cfg.spacing_ratio)
    a_bs_t = steering_vector(m_t, ang_bs_irs, 0.5)
    gain_bi = path_loss_gain(plm, layout.d_bs_irs, "irs")
    g_t = _rician_matrix(rng, np.outer(a_irs, a_bs_t), plm.beta_bi, gain_bi)

    if m_t == m_r:
        g_r = g_t.T.copy()  # monostatic reciprocity
    else:
        a_bs_r = steering_vector(m_r, ang_bs_irs, 0.5)
        g_r = _rician_matrix(rng, np.outer(a_bs_r, a_irs), plm.beta_bi, gain_bi)

    h_c = np.empty((cfg.k_scu, n), dtype=complex)
    for k in range(cfg.k_scu):
        a_k = steering_vector(n, SceneLayout.angle_from(layout.irs, layout.scus[k]), cfg.spacing_ratio)
        gain_ic = path_loss_gain(plm, layout.d_irs_scu(k), "irs")
        h_c[k] = _rician_matrix(rng, a_k, plm.beta_ic, gain_ic)

    h_d = np.empty((cfg.k_scu, m_t), dtype=complex)
    for k in range(cfg.k_scu):
        gain_bc = path_loss_gain(plm, layout.d_bs_scu(k), "direct")
        h_d[k] = np.sqrt(gain_bc) * _cn(rng, m_t)

    a_e = steering_vector(n, SceneLayout.angle_from(layout.irs, layout.eve), cfg.spacing_ratio)
    g_e = _rician_matrix(rng, a_e, plm.beta_ie, path_loss_gain(plm, layout.d_irs_eve, "irs"))
    h_e = np.sqrt(path_loss_gain(plm, layout.d_bs_eve, "direct")) * _cn(rng, m_t)

    return ChannelSet(
        g_t=g_t,
        g_r=g_r,
        h_c=h_c,
        h_d=h_d,
        g_e=g_e,
        h_e=h_e,
        scene=sensing_scene_from_layout(layout, plm),
        spacing_ratio=cfg.spacing_ratio,
    )


def lift_composite(h_ris: np.ndarray, g_t: np.ndarray, h_direct: np.ndarray) -> np.ndarray:
    """(N+1, M_t) lifting matrix G of a composite downlink channel.

    Rows 0..N-1 hold diag(h_ris.conj()) @ g_t; the last row is the
    direct channel conjugate, so that the composite row channel equals
    v_aug @ G for the augmented phase vector v_aug = [v, 1].
    """
    top = h_ris.conj()[:, None] * g_t
    return np.vstack([top, h_direct.conj()[None, :]])


def composite_scu_channel(ch: ChannelSet, v: np.ndarray, k: int) -> np.ndarray:
    """Effective BS-to-user-k row channel through the surface, shape (M_t,)."""
    if not 0 <= k < ch.k_scu:
        raise IndexError(f"user index {k} out of range for {ch.k_scu} users")
    return (ch.h_c[k].conj() * v) @ ch.g_t + ch.h_d[k].conj()


def composite_eve_channel(ch: ChannelSet, v: np.ndarray) -> np.ndarray:
    """Effective BS-to-eavesdropper row channel, shape (M_t,)."""
    return (ch.g_e.conj() * v) @ ch.g_t + ch.h_e.conj()


@dataclass
class EchoChannel:
    """Cascaded two-way sensing channel and its angle derivative.

    ``h_bb = outer(c, b)`` has rank one by construction; ``h_bb_dot``
    is its derivative with respect to the target angle.
    """

    b: np.ndarray        # (M_t,) forward cascade g_t.T Phi a(theta)
    c: np.ndarray        # (M_r,) return cascade g_r Phi a(theta)
    b_dot: np.ndarray
    c_dot: np.ndarray
    h_bb: np.ndarray     # (M_r, M_t)
    h_bb_dot: np.ndarray


def cascaded_echo(ch: ChannelSet, v: np.ndarray) -> EchoChannel:
    """Round-trip echo channel for phase profile ``v``.

    Besides the direct product form, the rank-one lifted form
    ``g_r A (v v^T) A g_t`` (A = diag of the steering vector) is
    evaluated and both must agree to 1e-10 relative; a mismatch means
    the inputs are inconsistent and raises ``ArithmeticError``.
    """
    n = ch.n_irs
    theta = ch.scene.theta
    a = steering_vector(n, theta, ch.spacing_ratio)
    a_dot = steering_derivative(n, theta, ch.spacing_ratio)

    b = ch.g_t.T @ (v * a)
    c = ch.g_r @ (v * a)
    b_dot = ch.g_t.T @ (v * a_dot)
    c_dot = ch.g_r @ (v * a_dot)
    h_bb = np.outer(c, b)
    h_bb_dot = np.outer(c_dot, b) + np.outer(c, b_dot)

    # Lifted forms, deliberately computed through the full matrix chain.
    a_diag = np.diag(a)
    d_diag = np.diag(np.arange(n).astype(float))
    left = ch.g_r @ a_diag
    right = a_diag @ ch.g_t
    vvt = np.outer(v, v)
    h_lift = left @ vvt @ right
    deriv_factor = 1j * 2.0 * np.pi * ch.spacing_ratio * np.cos(theta)
    h_dot_lift = deriv_factor * (left @ (d_diag @ vvt + vvt @ d_diag) @ right)

    scale = max(np.linalg.norm(h_bb), np.linalg.norm(h_bb_dot), 1e-300)
    err = max(
        np.linalg.norm(h_bb - h_lift),
        np.linalg.norm(h_bb_dot - h_dot_lift),
    )
    if err > 1e-10 * scale:
        raise ArithmeticError(
            f"lifted echo identity violated: relative error {err / scale:.3e}"
        )
    return EchoChannel(b=b, c=c, b_dot=b_dot, c_dot=c_dot, h_bb=h_bb, h_bb_dot=h_bb_dot)
