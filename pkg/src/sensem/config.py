"""System parameters, scene geometry, and large-scale propagation model.

All powers are stored in linear watts; dB and dBm appear only at the
conversion helpers so that the physics and optimization layers never
mix units.  Geometry lives in a 2-D plane with every uniform linear
array aligned along the x axis, so the angle of a point seen from an
array is ``arcsin(dx / distance)`` measured from broadside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Raised for out-of-range or inconsistent configuration values."""


def dbm_to_watt(p_dbm: float) -> float:
    """Convert a power level in dBm to linear watts."""
    return 10.0 ** (p_dbm / 10.0) / 1e3


def watt_to_dbm(p_w: float) -> float:
    """Convert linear watts to dBm.  Power must be positive."""
    if p_w <= 0.0:
        raise ConfigError(f"power must be positive to express in dBm, got {p_w}")
    return 10.0 * math.log10(p_w * 1e3)


def db_to_linear(x_db: float) -> float:
    """Convert a dB ratio to a linear ratio."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a positive linear ratio to dB."""
    if x <= 0.0:
        raise ConfigError(f"ratio must be positive to express in dB, got {x}")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SystemConfig:
    """Static system parameters of one scenario.

    Parameters
    ----------
    m_t, m_r : int
        Transmit and receive antenna counts at the base station.
    n_irs : int
        Number of reflecting elements.
    k_scu : int
        Number of served semantic communication users.
    l_s : int
        Semantic symbols per word produced by the source encoder.
    kappa : float
        Average number of semantic symbols mapped onto one word.
    bandwidth_hz : float
        Downlink bandwidth in Hz.
    i_sem : float
        Semantic units carried per word.
    p_max_w : float
        Transmit power budget in watts.
    sigma_s2_w, sigma_c2_w, sigma_e2_w : float
        Noise powers (watts) at the sensing receiver, each served user,
        and the eavesdropper.
    spacing_ratio : float
        Reflecting-element spacing over wavelength.
    """

    m_t: int = 4
    m_r: int = 4
    n_irs: int = 8
    k_scu: int = 2
    l_s: int = 256
    kappa: float = 5.0
    bandwidth_hz: float = 5e6
    i_sem: float = 10.0
    p_max_w: float = dbm_to_watt(30.0)
    sigma_s2_w: float = dbm_to_watt(-90.0)
    sigma_c2_w: float = dbm_to_watt(-90.0)
    sigma_e2_w: float = dbm_to_watt(-90.0)
    spacing_ratio: float = 0.5

    def __post_init__(self) -> None:
        if min(self.m_t, self.m_r, self.n_irs, self.k_scu, self.l_s) < 1:
            raise ConfigError("antenna, element, user, and symbol counts must be >= 1")
        if self.kappa <= 0 or self.bandwidth_hz <= 0 or self.i_sem <= 0:
            raise ConfigError("kappa, bandwidth, and semantic units must be positive")
        for name in ("p_max_w", "sigma_s2_w", "sigma_c2_w", "sigma_e2_w"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.spacing_ratio <= 0:
            raise ConfigError("spacing_ratio must be positive")

    @property
    def l_frame(self) -> float:
        """Sensing/communication frame length in symbols, kappa * l_s."""
        return self.kappa * self.l_s


def _as_point(p) -> tuple[float, float]:
    x, y = p
    return (float(x), float(y))


@dataclass(frozen=True)
class SceneLayout:
    """2-D positions of every node.

    The base station sits at the origin by default; the surface is
    elevated to one side; users cluster between them; the eavesdropper
    lurks below the user cluster; the sensing target sits past the
    surface.  Every array is a ULA along the x axis.
    """

    bs: tuple[float, float] = (0.0, 0.0)
    irs: tuple[float, float] = (50.0, 10.0)
    scus: tuple[tuple[float, float], ...] = ((40.0, 0.0), (42.0, -1.5))
    eve: tuple[float, float] = (45.0, -5.0)
    mst: tuple[float, float] = (60.0, 15.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "bs", _as_point(self.bs))
        object.__setattr__(self, "irs", _as_point(self.irs))
        object.__setattr__(self, "scus", tuple(_as_point(p) for p in self.scus))
        object.__setattr__(self, "eve", _as_point(self.eve))
        object.__setattr__(self, "mst", _as_point(self.mst))
        for name, p in (("irs", self.irs), ("eve", self.eve), ("mst", self.mst)):
            if self.distance(self.bs, p) == 0.0:
                raise ConfigError(f"{name} coincides with the base station")
        if self.distance(self.irs, self.mst) == 0.0:
            raise ConfigError("target coincides with the surface")

    @staticmethod
    def distance(a: tuple[float, float], b: tuple[float, float]) -> float:
        return math.hypot(a[0] - b[0], a[1] - b[1])

    @staticmethod
    def angle_from(array_pos: tuple[float, float], point: tuple[float, float]) -> float:
        """Angle of ``point`` seen from an x-aligned ULA at ``array_pos``.

        Returns arcsin(dx / d), which always lies in [-pi/2, pi/2];
        front/back ambiguity of a linear array is collapsed on purpose.
        """
        d = SceneLayout.distance(array_pos, point)
        if d == 0.0:
            raise ConfigError("angle undefined for coincident points")
        s = (point[0] - array_pos[0]) / d
        return math.asin(max(-1.0, min(1.0, s)))

    @property
    def theta_mst(self) -> float:
        """Target direction of arrival at the surface, radians."""
        return self.angle_from(self.irs, self.mst)

    @property
    def d_bs_irs(self) -> float:
        return self.distance(self.bs, self.irs)

    @property
    def d_irs_mst(self) -> float:
        return self.distance(self.irs, self.mst)

    def d_irs_scu(self, k: int) -> float:
        return self.distance(self.irs, self.scus[k])

    def d_bs_scu(self, k: int) -> float:
        return self.distance(self.bs, self.scus[k])

    @property
    def d_irs_eve(self) -> float:
        return self.distance(self.irs, self.eve)

    @property
    def d_bs_eve(self) -> float:
        return self.distance(self.bs, self.eve)


def default_layout(k_scu: int = 2) -> SceneLayout:
    """Default desk-scale layout with ``k_scu`` users near (40, 0)."""
    scus = tuple((40.0 + 2.0 * i, -1.5 * i) for i in range(k_scu))
    return SceneLayout(scus=scus)


@dataclass(frozen=True)
class PathLossModel:
    """Distance-power-law large-scale fading with per-link Rician factors.

    ``k0`` is the reference gain at distance ``d0``.  Surface-linked hops
    (BS-IRS, IRS-SCU, IRS-EVE, IRS-MST) use ``exp_irs``; direct BS hops
    (BS-SCU, BS-EVE) are more obstructed and use ``exp_direct``.  The
    direct BS-MST path is treated as fully blocked and never synthesized.
    """

    k0: float = 1e-3
    d0: float = 1.0
    exp_irs: float = 2.5
    exp_direct: float = 3.5
    beta_bi: float = 0.5
    beta_ic: float = 0.5
    beta_ie: float = 0.5

    def __post_init__(self) -> None:
        if self.k0 <= 0 or self.d0 <= 0:
            raise ConfigError("reference gain and distance must be positive")
        if self.exp_irs <= 0 or self.exp_direct <= 0:
            raise ConfigError("path loss exponents must be positive")
        if min(self.beta_bi, self.beta_ic, self.beta_ie) < 0:
            raise ConfigError("Rician factors must be nonnegative")
