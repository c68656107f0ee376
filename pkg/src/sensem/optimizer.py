"""Joint beamformer and reflection design.

The design problem minimizes the angle CRB subject to per-user semantic
rate floors, an eavesdropper leakage ceiling, and a transmit power
budget.  It decomposes into:

* a beamforming step at fixed reflection phases, solved as a
  semidefinite relaxation over per-stream covariances with the sensing
  objective expressed through a 2x2 Schur complement, recovered to rank
  one by randomization;
* a phase step at fixed covariances, a difference-of-convex program over
  the lifted phase Gram matrix solved by successive convex approximation
  with exact-penalty-free epigraph slacks, again randomized to a
  unit-modulus profile;
* an alternating loop over the two steps;
* a scalar golden-section search over the leakage-rate split that turns
  a secrecy-rate floor into SINR thresholds;
* a sweep of secrecy floors tracing the accuracy-versus-secrecy Pareto
  frontier, plus reference designs (no dedicated sensing or jamming
  streams, matched-filter directions, fixed directions, random phases).

Everything is deterministic given the scenario and settings; all
randomness flows through explicitly seeded generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from sensem.channels import (
    ChannelSet,
    cascaded_echo,
    composite_eve_channel,
    composite_scu_channel,
    lift_composite,
    steering_vector,
    synthesize_channels,
)
from sensem.config import (
    ConfigError,
    PathLossModel,
    SceneLayout,
    SystemConfig,
    default_layout,
)
from sensem.metrics import (
    BeamformerSet,
    CovarianceSet,
    DegenerateFimError,
    PhaseProfile,
    SemanticModel,
    ThresholdPair,
    covariance_from_beamformers,
    crb_theta_closed,
    sinr_eve,
    sinr_scu,
    sinr_thresholds,
    ssr_worst,
)
from sensem.sdp import (
    AffExpr,
    GrmError,
    GrmReport,
    SdpProblem,
    SolverSettings,
    randomize_rank_one_v,
    randomize_rank_one_w,
    solve_sdp,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class InfeasibleError(RuntimeError):
    """The constraint set admits no design at the requested thresholds."""


# ---------------------------------------------------------------------------
# scenario and settings


@dataclass(frozen=True)
class Scenario:
    """A system configuration, semantic model, and one channel realization."""

    cfg: SystemConfig
    semantic: SemanticModel
    channels: ChannelSet

    @classmethod
    def sample(
        cls,
        cfg: SystemConfig | None = None,
        seed: int = 0,
        layout: SceneLayout | None = None,
        plm: PathLossModel | None = None,
        semantic: SemanticModel | None = None,
    ) -> "Scenario":
        """Draw one scenario with default geometry and path loss."""
        cfg = cfg or SystemConfig()
        layout = layout or default_layout(cfg.k_scu)
        plm = plm or PathLossModel()
        channels = synthesize_channels(cfg, layout, plm, seed)
        return cls(
            cfg=cfg,
            semantic=semantic or SemanticModel.from_config(cfg),
            channels=channels,
        )


@dataclass(frozen=True)
class DesignSettings:
    """Tolerances and iteration budgets of the whole design stack."""

    solver: SolverSettings = field(default_factory=SolverSettings)
    max_ao_iters: int = 10
    delta_ao: float = 1e-4        # relative CRB improvement to keep iterating
    n_sca: int = 10
    sca_tol: float = 1e-5         # relative surrogate improvement to keep iterating
    delta_gss: float = 1e-4       # bracket shrink relative to the initial interval
    gss_max_iters: int = 60
    eps_points: int = 12

    def fast(self) -> "DesignSettings":
        """Coarse variant for sweeps where throughput beats polish."""
        return replace(
            self,
            solver=replace(self.solver, grm_trials=40, grm_retry_doublings=3),
            max_ao_iters=4,
            n_sca=3,
            delta_gss=0.02,
        )


# ---------------------------------------------------------------------------
# beamforming step (fixed phases)


def _sensing_quadratics(ch: ChannelSet, v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Transmit-side matrices whose traces against R give the echo terms."""
    echo = cascaded_echo(ch, v)
    h, hd = echo.h_bb, echo.h_bb_dot
    q1 = hd.conj().T @ hd
    q2 = hd.conj().T @ h
    q3 = h.conj().T @ h
    return q1, q2, q3


def _sensing_info_from_cov(qs, r_x: np.ndarray) -> float:
    """J(R) = tr(Q1 R) - |tr(Q2 R)|^2 / tr(Q3 R); -inf when degenerate."""
    q1, q2, q3 = qs
    a = float(np.real(np.trace(q1 @ r_x)))
    t = complex(np.trace(q2 @ r_x))
    c = float(np.real(np.trace(q3 @ r_x)))
    if c <= 0.0:
        return -np.inf
    return a - abs(t) ** 2 / c


def _psd_clip(mat: np.ndarray) -> np.ndarray:
    ms = (mat + mat.conj().T) / 2
    w, u = np.linalg.eigh(ms)
    return (u * np.clip(w, 0.0, None)) @ u.conj().T


def _stream_feasibility(
    scn: Scenario,
    thr: ThresholdPair | None,
    tol: float,
    v: np.ndarray,
):
    """Constraint check for candidate beamformers: power, user SINR floors,
    eavesdropper SINR ceilings.  Returns (ok, worst relative violation)."""
    ch = scn.channels
    cfg = scn.cfg

    def check(bf: BeamformerSet) -> tuple[bool, float]:
        cov = covariance_from_beamformers(bf)
        viol = max(0.0, (bf.total_power() - cfg.p_max_w) / cfg.p_max_w)
        if thr is not None:
            for k in range(cov.k_scu):
                g = sinr_scu(ch, v, cov, k, cfg.sigma_c2_w)
                viol = max(viol, (thr.gamma_com - g) / thr.gamma_com)
                ge = sinr_eve(ch, v, cov, k, cfg.sigma_e2_w)
                viol = max(viol, (ge - thr.gamma_eve) / thr.gamma_eve)
        return viol <= tol, viol

    return check


@dataclass
class Sp1Result:
    """Beamforming step output: relaxed and rank-one recovered designs."""

    cov_relaxed: CovarianceSet
    bf: BeamformerSet | None
    cov_recovered: CovarianceSet | None
    j_relaxed: float
    j_recovered: float | None
    status: str
    grm: GrmReport | None
    polished: bool = False

    @property
    def ratio(self) -> float | None:
        if self.j_recovered is None or self.j_relaxed == 0.0:
            return None
        return self.j_recovered / self.j_relaxed


def _solve_checked(prob: SdpProblem, settings: SolverSettings):
    """Solve with the primary backend, falling back to the reference one.

    A clean optimum from either backend wins; otherwise the least
    violating of the inaccurate solutions is kept, and certificates of
    infeasibility or unboundedness pass through.
    """
    sol = solve_sdp(prob, settings)
    if sol.status == "optimal":
        return sol
    alt = solve_sdp(prob, settings, backend=settings.reference_backend)
    if alt.status == "optimal":
        return alt
    rough = [s for s in (sol, alt) if s.status == "inaccurate"]
    if rough:
        return min(rough, key=lambda s: np.inf if s.max_violation is None else s.max_violation)
    return sol if sol.status != "failed" else alt


def solve_sp1(
    scn: Scenario,
    v: np.ndarray,
    thr: ThresholdPair | None = None,
    settings: DesignSettings | None = None,
    recover: bool = True,
    include_extras: bool = True,
    directions: list[np.ndarray] | None = None,
) -> Sp1Result:
    """Optimize transmit covariances at a fixed reflection profile.

    Maximizes the sensing information subject to the power budget and,
    when thresholds are given, per-user SINR floors and per-stream
    eavesdropper SINR ceilings.  The relaxation is exact in the typical
    case; rank-one beamformers are recovered by randomization.

    Parameters
    ----------
    include_extras : bool
        When False no dedicated sensing or jamming streams are allotted
        (their covariances are fixed to zero).
    directions : list of arrays, optional
        Fixed unit beamforming directions, one per stream (users first,
        then sensing and jamming when ``include_extras``).  The problem
        then reduces to a power split over the given directions and the
        recovery is exact by construction.

    Raises
    ------
    InfeasibleError
        When the SDP is certified infeasible.
    GrmError
        When no feasible rank-one candidate is found.
    RuntimeError
        When both conic backends fail.
    """
    settings = settings or DesignSettings()
    ch = scn.channels
    cfg = scn.cfg
    k_scu = ch.k_scu
    p_max = cfg.p_max_w
    qs = _sensing_quadratics(ch, v)
    qscale = max(float(np.abs(q).max()) for q in qs)
    if qscale <= 0.0:
        raise InfeasibleError("echo is identically zero: no sensing information to shape")
    q1s, q2s, q3s = (q / qscale for q in qs)

    names = [f"wc{k}" for k in range(k_scu)]
    if include_extras:
        names += ["ws", "wn"]

    prob = SdpProblem("beamforming")
    if directions is None:
        for nm in names:
            prob.add_hermitian(nm, cfg.m_t)

        def tr_term(coeff: np.ndarray, nm: str) -> AffExpr:
            return AffExpr.trace(nm, coeff)

        def tr_all(coeff: np.ndarray) -> AffExpr:
            out = AffExpr.constant(0.0)
            for nm in names:
                out = out + AffExpr.trace(nm, coeff)
            return out

        power = tr_all(np.eye(cfg.m_t, dtype=complex))
    else:
        if len(directions) != len(names):
            raise ConfigError(f"expected {len(names)} directions, got {len(directions)}")
        units = [np.asarray(u, dtype=complex) / np.linalg.norm(u) for u in directions]
        for nm in names:
            prob.add_scalar(nm, lower=0.0)

        def tr_term(coeff: np.ndarray, nm: str) -> AffExpr:
            u = units[names.index(nm)]
            return AffExpr.scalar(nm, complex(u.conj() @ coeff @ u))

        def tr_all(coeff: np.ndarray) -> AffExpr:
            out = AffExpr.constant(0.0)
            for nm in names:
                out = out + tr_term(coeff, nm)
            return out

        power = AffExpr.constant(0.0)
        for nm in names:
            power = power + AffExpr.scalar(nm, 1.0)

    prob.add_scalar("t", lower=0.0)
    prob.set_objective_max(AffExpr.scalar("t"))
    prob.add_con(power, "<=", 1.0, "power")
    e11 = tr_all(q1s) - AffExpr.scalar("t")
    e12 = tr_all(q2s)
    prob.add_psd_block([[e11, e12], [e12.conj(), tr_all(q3s)]], "sensing_schur")

    if thr is not None:
        for k in range(k_scu):
            h = composite_scu_channel(ch, v, k)
            p_k = np.outer(h.conj(), h)
            tau = float(np.real(np.trace(p_k)))
            p_k = p_k / tau
            expr = (1.0 + thr.gamma_com) * tr_term(p_k, names[k]) - thr.gamma_com * tr_all(p_k)
            prob.add_con(expr, ">=", thr.gamma_com * cfg.sigma_c2_w / (p_max * tau), f"user{k}")
        he = composite_eve_channel(ch, v)
        p_e = np.outer(he.conj(), he)
        tau_e = float(np.real(np.trace(p_e)))
        p_e = p_e / tau_e
        for k in range(k_scu):
            expr = (1.0 + thr.gamma_eve) * tr_term(p_e, names[k]) - thr.gamma_eve * tr_all(p_e)
            prob.add_con(expr, "<=", thr.gamma_eve * cfg.sigma_e2_w / (p_max * tau_e), f"eve{k}")

    sol = _solve_checked(prob, settings.solver)
    if sol.status == "infeasible":
        raise InfeasibleError("beamforming step infeasible at the given thresholds")
    if sol.status in ("failed", "unbounded"):
        raise RuntimeError(f"beamforming step did not solve: {sol.status} ({sol.detail})")

    m_t = cfg.m_t
    zero = np.zeros((m_t, m_t), dtype=complex)
    if directions is None:
        mats = [_psd_clip(p_max * sol.values[nm]) for nm in names]
    else:
        mats = [
            p_max * float(sol.values[nm]) * np.outer(u, u.conj())
            for nm, u in zip(names, units)
        ]
    w_c = np.array(mats[:k_scu])
    w_s = mats[k_scu] if include_extras else zero
    w_n = mats[k_scu + 1] if include_extras else zero
    cov_relaxed = CovarianceSet(w_c_cov=w_c, w_s_cov=w_s, w_n_cov=w_n)
    j_relaxed = _sensing_info_from_cov(qs, cov_relaxed.r_x)

    if not recover:
        return Sp1Result(
            cov_relaxed=cov_relaxed,
            bf=None,
            cov_recovered=None,
            j_relaxed=j_relaxed,
            j_recovered=None,
            status=sol.status,
            grm=None,
        )

    if directions is not None:
        powers = [p_max * float(sol.values[nm]) for nm in names]
        vecs = [math.sqrt(max(p, 0.0)) * u for p, u in zip(powers, units)]
        if not include_extras:
            vecs += [np.zeros(m_t, dtype=complex)] * 2
        bf = BeamformerSet(w_c=np.array(vecs[:k_scu]), w_s=vecs[k_scu], w_n=vecs[k_scu + 1])
        cov_recovered = covariance_from_beamformers(bf)
        grm = GrmReport(
            objective=_sensing_info_from_cov(qs, cov_recovered.r_x),
            relaxed_objective=j_relaxed,
            n_feasible=1,
            trials_used=0,
        )
        return Sp1Result(
            cov_relaxed=cov_relaxed,
            bf=bf,
            cov_recovered=cov_recovered,
            j_relaxed=j_relaxed,
            j_recovered=grm.objective,
            status=sol.status,
            grm=grm,
        )

    # Randomized rank-one recovery.  Tight constraints move by the
    # eigenvalue mass the truncation discards, so candidates are screened
    # at the loose randomization tolerance and the winner is re-polished
    # by an exact power split over its directions, which restores
    # solver-grade feasibility whenever the directions admit it.
    screen_tol = max(settings.solver.grm_feas_tol, settings.solver.feas_tol)
    feas = _stream_feasibility(scn, thr, screen_tol, v)
    grm_cov = cov_relaxed if include_extras else CovarianceSet(
        w_c_cov=w_c, w_s_cov=zero, w_n_cov=zero
    )
    grm_exc = None
    grm = None
    try:
        bf, grm = randomize_rank_one_w(
            grm_cov,
            p_max,
            lambda b: _sensing_info_from_cov(qs, covariance_from_beamformers(b).r_x),
            feas,
            settings.solver,
            relaxed_objective=j_relaxed,
        )
    except GrmError as exc:
        if exc.best_candidate is None:
            raise
        bf = exc.best_candidate
        grm_exc = exc

    relaxed_blocks = list(w_c) + ([w_s, w_n] if include_extras else [])
    cand_vecs = list(bf.w_c) + ([bf.w_s, bf.w_n] if include_extras else [])
    dirs = [
        _unit_direction(vec, block, p_max)
        for vec, block in zip(cand_vecs, relaxed_blocks)
    ]
    polished = False
    try:
        refit = solve_sp1(
            scn, v, thr, settings, recover=True,
            include_extras=include_extras, directions=dirs,
        )
        bf = refit.bf
        polished = True
    except (InfeasibleError, RuntimeError):
        if grm_exc is not None:
            raise grm_exc

    cov_recovered = covariance_from_beamformers(bf)
    j_recovered = _sensing_info_from_cov(qs, cov_recovered.r_x)
    if grm is None:
        grm = GrmReport(
            objective=j_recovered,
            relaxed_objective=j_relaxed,
            n_feasible=0,
            trials_used=0,
        )
    return Sp1Result(
        cov_relaxed=cov_relaxed,
        bf=bf,
        cov_recovered=cov_recovered,
        j_relaxed=j_relaxed,
        j_recovered=j_recovered,
        status=sol.status,
        grm=grm,
        polished=polished,
    )


def _unit_direction(vec: np.ndarray, relaxed_block: np.ndarray, p_max: float) -> np.ndarray:
    """Unit beam direction of a candidate, falling back to the relaxed
    block's principal axis (then to the first coordinate) when empty."""
    nrm = float(np.linalg.norm(vec))
    if nrm * nrm > 1e-12 * p_max:
        return vec / nrm
    w, u = np.linalg.eigh((relaxed_block + relaxed_block.conj().T) / 2)
    if w[-1] > 0.0:
        return u[:, -1]
    e = np.zeros(vec.shape[0], dtype=complex)
    e[0] = 1.0
    return e


# ---------------------------------------------------------------------------
# phase step (fixed covariances)


@dataclass(frozen=True)
class _LiftedCon:
    """Affine constraint Re tr(C V) sense rhs on the lifted Gram matrix."""

    label: str
    matrix: np.ndarray
    sense: str
    rhs: float


@dataclass
class Sp2Precomp:
    """Frozen coefficient data of one phase-design subproblem.

    The two echo Gram matrices are stored rescaled by their mean
    diagonal so the conic solver sees O(1) data; ``tau1 * tau2 *
    geom_scale`` converts the scaled information objective back to
    physical units.
    """

    n: int
    r1_aug: np.ndarray     # (N+1, N+1) return-side Gram, scaled by 1/tau1
    r2_aug: np.ndarray     # (N+1, N+1) transmit-side Gram, scaled by 1/tau2
    d_aug: np.ndarray      # element-index diagonal over max index, zero on the augmentation row
    tau1: float
    tau2: float
    geom_scale: float      # converts the scaled information back to physical units
    cons: tuple[_LiftedCon, ...]

    def stats(self, big_v: np.ndarray) -> tuple[float, float, float, float, complex, complex]:
        """(q1, q2, t1, t2, s1, s2) traces of a lifted matrix, scaled units."""
        d = self.d_aug
        q1 = float(np.real(np.trace(self.r1_aug @ big_v)))
        q2 = float(np.real(np.trace(self.r2_aug @ big_v)))
        t1 = float(np.real(np.trace(d @ self.r1_aug @ d @ big_v)))
        t2 = float(np.real(np.trace(d @ self.r2_aug @ d @ big_v)))
        s1 = complex(np.trace(d @ self.r1_aug @ big_v))
        s2 = complex(np.trace(d @ self.r2_aug @ big_v))
        return q1, q2, t1, t2, s1, s2

    def ratio_slacks(self, big_v: np.ndarray) -> tuple[float, float]:
        """Tight slack values |s_i|^2 / q_i at a given lifted matrix."""
        q1, q2, _, _, s1, s2 = self.stats(big_v)
        if q1 <= 0.0 or q2 <= 0.0:
            raise DegenerateFimError("lifted echo trace is zero: ratio slack undefined")
        return abs(s1) ** 2 / q1, abs(s2) ** 2 / q2

    def info_scaled(self, big_v: np.ndarray, u: tuple[float, float] | None = None) -> float:
        """Information lower bound q2 t1 + q1 t2 - q2 u1 - q1 u2, scaled units.

        With ``u`` omitted the tight ratios are used, which on a rank-one
        lifted matrix reproduces the exact sensing information.
        """
        q1, q2, t1, t2, s1, s2 = self.stats(big_v)
        if u is None:
            if q1 <= 0.0 or q2 <= 0.0:
                raise DegenerateFimError("lifted echo trace is zero: ratio slack undefined")
            u = (abs(s1) ** 2 / q1, abs(s2) ** 2 / q2)
        return q2 * t1 + q1 * t2 - q2 * u[0] - q1 * u[1]

    def info_physical(self, v: np.ndarray) -> float:
        """Exact sensing information of a unit-modulus profile."""
        vt = np.concatenate([v, [1.0 + 0.0j]])
        big_v = np.outer(vt, vt.conj())
        return self.geom_scale * self.tau1 * self.tau2 * self.info_scaled(big_v)

    def constraint_violation(self, v: np.ndarray) -> float:
        """Worst relative violation of the lifted affine constraints at v."""
        vt = np.concatenate([v, [1.0 + 0.0j]])
        worst = 0.0
        for con in self.cons:
            val = float(np.real(vt.conj() @ con.matrix @ vt))
            gap = val - con.rhs if con.sense == "<=" else con.rhs - val
            worst = max(worst, gap / max(abs(con.rhs), 1e-300))
        return worst


def sp2_precompute(
    scn: Scenario,
    cov: CovarianceSet,
    thr: ThresholdPair | None = None,
) -> Sp2Precomp:
    """Assemble the lifted coefficient data of the phase subproblem.

    The sensing information at fixed covariances depends on the phases
    only through two positive semidefinite Gram matrices (return side
    and transmit side of the echo) sandwiched with the element-index
    diagonal; communication and leakage constraints become affine in the
    lifted Gram matrix of the augmented phase vector.
    """
    ch = scn.channels
    cfg = scn.cfg
    n = ch.n_irs
    theta = ch.scene.theta
    a = steering_vector(n, theta, ch.spacing_ratio)
    left = ch.g_r @ np.diag(a)          # return cascade:   c = left  @ v
    right = (ch.g_t.T @ np.diag(a)).T   # forward cascade:  b = right.T @ v
    r1 = left.conj().T @ left
    b_mat = right.T
    r2 = b_mat.conj().T @ cov.r_x.conj() @ b_mat
    tau1 = float(np.real(np.trace(r1))) / n
    tau2 = float(np.real(np.trace(r2))) / n
    if tau1 <= 0.0 or tau2 <= 0.0:
        raise InfeasibleError("echo Gram matrices carry no energy")

    def pad(mat: np.ndarray) -> np.ndarray:
        out = np.zeros((n + 1, n + 1), dtype=complex)
        out[:n, :n] = mat
        return out

    # The index diagonal is normalized to [0, 1]; without this the
    # index-sandwich traces grow like N^2 relative to the plain traces
    # and the difference-of-convex parts cancel catastrophically.
    d_span = float(max(n - 1, 1))
    d_aug = np.zeros((n + 1, n + 1))
    d_aug[:n, :n] = np.diag(np.arange(n, dtype=float)) / d_span

    cons: list[_LiftedCon] = []
    if thr is not None:
        for k in range(ch.k_scu):
            lift = lift_composite(ch.h_c[k], ch.g_t, ch.h_d[k])
            m = (1.0 + thr.gamma_com) * cov.w_c_cov[k] - thr.gamma_com * cov.r_x
            c_mat = np.conj(lift @ m @ lift.conj().T)
            scale = float(np.abs(c_mat).max())
            cons.append(_LiftedCon(
                label=f"user{k}",
                matrix=c_mat / scale,
                sense=">=",
                rhs=thr.gamma_com * cfg.sigma_c2_w / scale,
            ))
        lift_e = lift_composite(ch.g_e, ch.g_t, ch.h_e)
        for k in range(ch.k_scu):
            m = (1.0 + thr.gamma_eve) * cov.w_c_cov[k] - thr.gamma_eve * cov.r_x
            c_mat = np.conj(lift_e @ m @ lift_e.conj().T)
            scale = float(np.abs(c_mat).max())
            cons.append(_LiftedCon(
                label=f"eve{k}",
                matrix=c_mat / scale,
                sense="<=",
                rhs=thr.gamma_eve * cfg.sigma_e2_w / scale,
            ))

    deriv = 2.0 * np.pi * ch.spacing_ratio * np.cos(theta)
    return Sp2Precomp(
        n=n,
        r1_aug=pad(r1) / tau1,
        r2_aug=pad(r2) / tau2,
        d_aug=d_aug,
        tau1=tau1,
        tau2=tau2,
        geom_scale=deriv * deriv * d_span * d_span,
        cons=tuple(cons),
    )


def sca_objective_parts(
    pre: Sp2Precomp,
    big_v: np.ndarray,
    u: tuple[float, float],
) -> tuple[float, float, float]:
    """Difference-of-convex split of the information lower bound.

    Returns (convex part, concave part, exact ratio objective).  The
    first two come from the polarization identity applied to each
    product, so convex + concave equals q2 t1 + q1 t2 - q2 u1 - q1 u2
    exactly.  The third replaces the slacks u by the tight Rayleigh
    ratios |s_i|^2 / q_i, which on a rank-one lifted matrix is the
    exact scaled sensing information.
    """
    q1, q2, t1, t2, s1, s2 = pre.stats(big_v)
    if q1 <= 0.0 or q2 <= 0.0:
        raise DegenerateFimError("lifted echo trace is zero: ratio slack undefined")
    u1, u2 = u
    convex = 0.25 * (
        (q2 + t1) ** 2 + (q1 + t2) ** 2 + (q2 - u1) ** 2 + (q1 - u2) ** 2
    )
    concave = -0.25 * (
        (q2 - t1) ** 2 + (q1 - t2) ** 2 + (q2 + u1) ** 2 + (q1 + u2) ** 2
    )
    exact = q2 * t1 + q1 * t2 - q2 * abs(s1) ** 2 / q1 - q1 * abs(s2) ** 2 / q2
    return convex, concave, exact


@dataclass
class ScaState:
    """First-order expansion of the convex part at an anchor point.

    ``value(big_v, u)`` evaluates the tangent plane; by convexity it
    never exceeds the convex part itself, which makes the surrogate a
    global lower bound that touches at the anchor.
    """

    gv: np.ndarray
    gu: tuple[float, float]
    anchor_value: float
    big_v_anchor: np.ndarray
    u_anchor: tuple[float, float]
    iteration: int = 0

    def value(self, big_v: np.ndarray, u: tuple[float, float]) -> float:
        dv = float(np.real(np.trace(self.gv @ (big_v - self.big_v_anchor))))
        return (
            self.anchor_value
            + dv
            + self.gu[0] * (u[0] - self.u_anchor[0])
            + self.gu[1] * (u[1] - self.u_anchor[1])
        )


def sca_linearize(
    pre: Sp2Precomp,
    big_v: np.ndarray,
    u: tuple[float, float],
    iteration: int = 0,
) -> ScaState:
    """Tangent plane of the convex part at (big_v, u).

    The gradient collects every dependence of the four squared sums on
    the lifted matrix, including the mixed index-sandwich terms.
    """
    q1, q2, t1, t2, _, _ = pre.stats(big_v)
    u1, u2 = u
    d = pre.d_aug
    g1 = pre.r2_aug + d @ pre.r1_aug @ d    # gradient of q2 + t1
    g2 = pre.r1_aug + d @ pre.r2_aug @ d    # gradient of q1 + t2
    gv = 0.5 * (
        (q2 + t1) * g1
        + (q1 + t2) * g2
        + (q2 - u1) * pre.r2_aug
        + (q1 - u2) * pre.r1_aug
    )
    gu = (0.5 * (u1 - q2), 0.5 * (u2 - q1))
    convex, _, _ = sca_objective_parts(pre, big_v, u)
    return ScaState(
        gv=gv,
        gu=gu,
        anchor_value=convex,
        big_v_anchor=big_v.copy(),
        u_anchor=(u1, u2),
        iteration=iteration,
    )


@dataclass
class Sp2Result:
    """Phase step output: recovered profile plus the SCA trace."""

    phase: PhaseProfile
    big_v: np.ndarray
    info_trace: list[float]      # scaled information bound per SCA iteration
    j_recovered: float           # physical sensing information at the profile
    j_relaxed: float             # physical information bound of the final lifted matrix
    iterations: int
    status: str
    grm: GrmReport


def _sp2_iteration(
    pre: Sp2Precomp,
    state: ScaState,
    settings: SolverSettings,
):
    """One SCA subproblem: maximize tangent + concave part over the lift."""
    n_aug = pre.n + 1
    prob = SdpProblem("phase_step")
    prob.add_hermitian("V", n_aug)
    prob.fix_diagonal("V", 1.0)
    prob.add_scalar("u1", lower=0.0)
    prob.add_scalar("u2", lower=0.0)
    for i in range(1, 5):
        prob.add_scalar(f"m{i}", lower=0.0)

    # ratio slacks u_i >= |s_i|^2 / q_i via 2x2 Schur blocks
    for i, r_aug in ((1, pre.r1_aug), (2, pre.r2_aug)):
        s_expr = AffExpr.trace("V", pre.d_aug @ r_aug)
        q_expr = AffExpr.trace("V", r_aug)
        prob.add_psd_block(
            [[AffExpr.scalar(f"u{i}"), s_expr], [s_expr.conj(), q_expr]],
            f"ratio{i}",
        )

    # epigraph blocks m_i >= y_i^2 for the concave squares
    d = pre.d_aug
    ys = [
        AffExpr.trace("V", pre.r2_aug - d @ pre.r1_aug @ d),
        AffExpr.trace("V", pre.r1_aug - d @ pre.r2_aug @ d),
        AffExpr.trace("V", pre.r2_aug) + AffExpr.scalar("u1"),
        AffExpr.trace("V", pre.r1_aug) + AffExpr.scalar("u2"),
    ]
    one = AffExpr.constant(1.0)
    for i, y in enumerate(ys, start=1):
        prob.add_psd_block(
            [[AffExpr.scalar(f"m{i}"), y], [y.conj(), one]],
            f"square{i}",
        )

    for con in pre.cons:
        prob.add_con(AffExpr.trace("V", con.matrix), con.sense, con.rhs, con.label)

    offset = (
        state.anchor_value
        - float(np.real(np.trace(state.gv @ state.big_v_anchor)))
        - state.gu[0] * state.u_anchor[0]
        - state.gu[1] * state.u_anchor[1]
    )
    obj = (
        AffExpr.constant(offset)
        + AffExpr.trace("V", state.gv)
        + AffExpr.scalar("u1", state.gu[0])
        + AffExpr.scalar("u2", state.gu[1])
    )
    for i in range(1, 5):
        obj = obj + AffExpr.scalar(f"m{i}", -0.25)
    prob.set_objective_max(obj)
    return _solve_checked(prob, settings)


def solve_sp2(
    scn: Scenario,
    cov: CovarianceSet,
    thr: ThresholdPair | None = None,
    v_init: np.ndarray | None = None,
    settings: DesignSettings | None = None,
) -> Sp2Result:
    """Optimize the reflection profile at fixed transmit covariances.

    Runs successive convex approximation on the lifted Gram matrix; the
    ratio slacks are reset to their tight values after every solve, so
    the reported information bound never decreases (minorize-maximize).
    Randomization then projects the lifted solution onto unit-modulus
    profiles, with the warm start kept in the candidate pool.

    Raises
    ------
    InfeasibleError
        When a subproblem is certified infeasible (cannot happen when
        ``v_init`` satisfies the constraints, since its lift is
        feasible).
    RuntimeError
        When both conic backends fail.

    Notes
    -----
    If randomization produces no candidate within the screening
    tolerance the warm start is returned unchanged with status
    ``"grm_fallback"`` rather than raising, so an alternating loop
    keeps its incumbent.
    """
    settings = settings or DesignSettings()
    pre = sp2_precompute(scn, cov, thr)
    n = pre.n
    if v_init is None:
        v_init = np.ones(n, dtype=complex)
    if n == 1:
        # A single reflecting element contributes no aperture: the
        # index-weighted traces vanish and the information is zero for
        # every phase, so the profile is returned unchanged.
        v_same = np.exp(1j * np.angle(v_init))
        val = pre.info_physical(v_same)
        return Sp2Result(
            phase=PhaseProfile(v=v_same),
            big_v=np.outer(
                np.concatenate([v_same, [1.0 + 0.0j]]),
                np.concatenate([v_same, [1.0 + 0.0j]]).conj(),
            ),
            info_trace=[val],
            j_recovered=val,
            j_relaxed=val,
            iterations=0,
            status="converged",
            grm=GrmReport(
                objective=val,
                relaxed_objective=val,
                n_feasible=1,
                trials_used=0,
            ),
        )
    vt = np.concatenate([v_init, [1.0 + 0.0j]])
    big_v = np.outer(vt, vt.conj())
    u = pre.ratio_slacks(big_v)
    trace = [pre.info_scaled(big_v, u)]
    status = "max_iters"
    iterations = 0

    for it in range(settings.n_sca):
        state = sca_linearize(pre, big_v, u, iteration=it)
        sol = _sp2_iteration(pre, state, settings.solver)
        if sol.status == "infeasible":
            raise InfeasibleError("phase step infeasible at the given thresholds")
        if sol.status in ("failed", "unbounded"):
            raise RuntimeError(f"phase step did not solve: {sol.status} ({sol.detail})")
        big_v = sol.values["V"]
        u = pre.ratio_slacks(big_v)
        iterations = it + 1
        trace.append(pre.info_scaled(big_v, u))
        if trace[-1] - trace[-2] <= settings.sca_tol * max(abs(trace[-2]), 1e-300):
            status = "converged"
            break

    screen_tol = max(settings.solver.grm_feas_tol, settings.solver.feas_tol)

    def feasible(v: np.ndarray) -> tuple[bool, float]:
        viol = pre.constraint_violation(v)
        return viol <= screen_tol, viol

    try:
        phase, grm = randomize_rank_one_v(
            big_v,
            v_init,
            pre.info_physical,
            feasible,
            settings.solver,
            relaxed_objective=pre.geom_scale * pre.tau1 * pre.tau2 * trace[-1],
        )
    except GrmError:
        # no candidate met the screen; keep the warm start so a caller
        # in an alternating loop retains its incumbent design
        v_same = np.exp(1j * np.angle(v_init))
        phase = PhaseProfile(v=v_same)
        grm = GrmReport(
            objective=pre.info_physical(v_same),
            relaxed_objective=pre.geom_scale * pre.tau1 * pre.tau2 * trace[-1],
            n_feasible=0,
            trials_used=0,
        )
        status = "grm_fallback"
    return Sp2Result(
        phase=phase,
        big_v=big_v,
        info_trace=trace,
        j_recovered=pre.info_physical(phase.v),
        j_relaxed=pre.geom_scale * pre.tau1 * pre.tau2 * trace[-1],
        iterations=iterations,
        status=status,
        grm=grm,
    )


# ---------------------------------------------------------------------------
# alternating optimization


@dataclass
class AoResult:
    """Joint design output with its convergence history.

    ``crb_trace`` is the running best CRB (non-increasing by
    construction); ``raw_crb_trace`` the per-iteration values it is
    built from.  The returned design is the best iterate, not
    necessarily the last.
    """

    bf: BeamformerSet
    cov: CovarianceSet
    phase: PhaseProfile
    crb: float
    j_sensing: float
    ssr: float
    ssr_per_user: np.ndarray
    crb_trace: list[float]
    raw_crb_trace: list[float]
    iterations: int
    status: str
    stop_reason: str
    thresholds: ThresholdPair | None
    sp1_ratio: float | None


def _crb_of(scn: Scenario, v: np.ndarray, r_x: np.ndarray) -> float:
    return crb_theta_closed(
        scn.channels,
        v,
        r_x,
        scn.cfg.l_frame,
        scn.cfg.sigma_s2_w,
        scn.channels.scene.alpha,
    )


def _ao_loop(
    scn: Scenario,
    thr: ThresholdPair | None,
    settings: DesignSettings,
    v0: np.ndarray,
    sp1_fn,
    use_sp2: bool = True,
    status_label: str = "converged",
) -> AoResult:
    """Alternate beamforming and phase steps, keeping the best iterate."""
    v = np.asarray(v0, dtype=complex)
    best = None
    raw_trace: list[float] = []
    best_trace: list[float] = []
    stop_reason = "max_iters"
    status = "max_iters"
    iterations = 0
    last_ratio = None

    for it in range(settings.max_ao_iters):
        try:
            sp1 = sp1_fn(v)
        except GrmError:
            if best is None:
                raise
            status, stop_reason = "grm_failed", "beamformer recovery failed"
            break
        last_ratio = sp1.ratio
        cov = sp1.cov_recovered
        if use_sp2:
            try:
                sp2 = solve_sp2(scn, cov, thr, v, settings)
            except GrmError:
                if best is None:
                    raise
                status, stop_reason = "grm_failed", "phase recovery failed"
                break
            v_new = sp2.phase.v
        else:
            v_new = v
        crb_it = _crb_of(scn, v_new, cov.r_x)
        raw_trace.append(crb_it)
        iterations = it + 1

        prev_best = best[0] if best is not None else np.inf
        if crb_it < prev_best:
            best = (crb_it, sp1.bf, cov, v_new)
        best_trace.append(best[0])
        v = v_new

        if prev_best < np.inf:
            if crb_it >= prev_best:
                status, stop_reason = status_label, "no further improvement"
                break
            if (prev_best - crb_it) / prev_best < settings.delta_ao:
                status, stop_reason = status_label, "relative improvement below tolerance"
                break

    crb, bf, cov, v = best
    ssr, per_user = ssr_worst(
        scn.channels, v, cov, scn.semantic, scn.cfg.sigma_c2_w, scn.cfg.sigma_e2_w
    )
    return AoResult(
        bf=bf,
        cov=cov,
        phase=PhaseProfile(v=v),
        crb=crb,
        j_sensing=scn.cfg.sigma_s2_w / (2.0 * scn.cfg.l_frame * abs(scn.channels.scene.alpha) ** 2 * crb),
        ssr=ssr,
        ssr_per_user=per_user,
        crb_trace=best_trace,
        raw_crb_trace=raw_trace,
        iterations=iterations,
        status=status,
        stop_reason=stop_reason,
        thresholds=thr,
        sp1_ratio=last_ratio,
    )


def alternating_optimize(
    scn: Scenario,
    thr: ThresholdPair | None = None,
    settings: DesignSettings | None = None,
    v0: np.ndarray | None = None,
) -> AoResult:
    """Joint covariance and reflection design by alternating steps.

    Starts from ``v0`` (all-ones phases by default), alternates the
    beamforming and phase steps, and returns the best iterate together
    with the non-increasing best-so-far CRB trace.
    """
    settings = settings or DesignSettings()
    v0 = np.ones(scn.channels.n_irs, dtype=complex) if v0 is None else v0

    def sp1_fn(v):
        return solve_sp1(scn, v, thr, settings)

    return _ao_loop(scn, thr, settings, v0, sp1_fn)


# ---------------------------------------------------------------------------
# scalar search over the leakage split


def golden_section(f, a: float, b: float, rel_tol: float = 1e-3, max_iters: int = 100):
    """Golden-section minimization tolerant of infinite (infeasible) values.

    Maintains the two interior probes of the classic scheme; when both
    return infinity the bracket collapses onto the inner interval, which
    preserves any feasible basin strictly between the probes.  Returns
    ``(x_best, f_best, n_evals, history)`` where ``history`` lists every
    ``(x, f(x))`` pair in evaluation order and the best point is taken
    over all evaluations, not just the final bracket.
    """
    if not b > a:
        raise ConfigError("golden-section interval must have positive length")
    history: list[tuple[float, float]] = []

    def probe(x: float) -> float:
        fx = float(f(x))
        history.append((x, fx))
        return fx

    span0 = b - a
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = probe(c), probe(d)
    iters = 0
    while (b - a) > rel_tol * span0 and iters < max_iters:
        iters += 1
        if not np.isfinite(fc) and not np.isfinite(fd):
            a, b = c, d
            if (b - a) <= rel_tol * span0:
                break
            c = b - _GOLDEN * (b - a)
            d = a + _GOLDEN * (b - a)
            fc, fd = probe(c), probe(d)
        elif fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = probe(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = probe(d)

    finite = [(x, fx) for x, fx in history if np.isfinite(fx)]
    if not finite:
        return float("nan"), float("inf"), len(history), history
    x_best, f_best = min(finite, key=lambda p: p[1])
    # Non-unimodal escape: if the best point fell outside the final
    # bracket, rescan its neighborhood on a short grid.
    if not a <= x_best <= b:
        xs = sorted(x for x, _ in history)
        i = xs.index(x_best)
        lo = xs[i - 1] if i > 0 else x_best - (b - a)
        hi = xs[i + 1] if i + 1 < len(xs) else x_best + (b - a)
        for x in np.linspace(lo, hi, 11)[1:-1]:
            probe(float(x))
        finite = [(x, fx) for x, fx in history if np.isfinite(fx)]
        x_best, f_best = min(finite, key=lambda p: p[1])
    return x_best, f_best, len(history), history


@dataclass
class GssResult:
    """Outcome of the leakage-split search at one secrecy floor."""

    status: str                   # ok | empty_interval | infeasible
    epsilon: float
    r_th: float | None
    thresholds: ThresholdPair | None
    crb: float | None
    ssr: float | None
    ao: AoResult | None
    n_evals: int
    probes: list[tuple[float, float]]
    interval: tuple[float, float]


def golden_section_rth(
    scn: Scenario,
    epsilon: float,
    settings: DesignSettings | None = None,
    v0: np.ndarray | None = None,
) -> GssResult:
    """Search the leakage-rate split delivering a secrecy floor.

    At secrecy floor ``epsilon`` the leakage cap ``r`` must satisfy both
    similarity inversions, confining it to an open interval whose length
    shrinks linearly with ``epsilon``.  Each probe runs the full
    alternating design at the implied SINR thresholds; infeasible probes
    score infinity.  The phase warm start is carried from probe to probe
    so later evaluations start near earlier optima.
    """
    settings = settings or DesignSettings()
    model = scn.semantic
    rs = model.rate_scale
    lo = rs * model.a1
    hi = rs * model.a2 - epsilon
    if hi - lo <= max(abs(hi), 1.0) * 1e-12:
        return GssResult(
            status="empty_interval",
            epsilon=epsilon,
            r_th=None,
            thresholds=None,
            crb=None,
            ssr=None,
            ao=None,
            n_evals=0,
            probes=[],
            interval=(lo, hi),
        )

    cache: dict[float, AoResult] = {}
    warm = {"v": np.ones(scn.channels.n_irs, dtype=complex) if v0 is None else np.asarray(v0)}

    def f(r: float) -> float:
        try:
            thr = sinr_thresholds(model, r, epsilon)
            res = alternating_optimize(scn, thr, settings, warm["v"])
        except (ConfigError, InfeasibleError, GrmError):
            return float("inf")
        cache[r] = res
        warm["v"] = res.phase.v
        return res.crb

    x, fx, n_evals, history = golden_section(
        f, lo, hi, rel_tol=settings.delta_gss, max_iters=settings.gss_max_iters
    )
    if not np.isfinite(fx):
        # Sparse feasible basins can slip between golden probes; scan a
        # coarse grid before declaring the floor unreachable.
        for r in np.linspace(lo, hi, 11)[1:-1]:
            fr = f(float(r))
            history.append((float(r), fr))
            n_evals += 1
        feasible = [(r, fr) for r, fr in history if np.isfinite(fr)]
        if not feasible:
            return GssResult(
                status="infeasible",
                epsilon=epsilon,
                r_th=None,
                thresholds=None,
                crb=None,
                ssr=None,
                ao=None,
                n_evals=n_evals,
                probes=history,
                interval=(lo, hi),
            )
        x, fx = min(feasible, key=lambda p: p[1])
    ao = cache[x]
    return GssResult(
        status="ok",
        epsilon=epsilon,
        r_th=x,
        thresholds=ao.thresholds,
        crb=ao.crb,
        ssr=ao.ssr,
        ao=ao,
        n_evals=n_evals,
        probes=history,
        interval=(lo, hi),
    )


# ---------------------------------------------------------------------------
# Pareto sweep and reference designs


@dataclass
class ParetoPoint:
    """One point of the accuracy-versus-secrecy frontier."""

    epsilon: float
    status: str
    crb: float | None
    ssr: float | None
    r_th: float | None
    gamma_com: float | None
    gamma_eve: float | None
    n_evals: int
    ao_iterations: int
    gss: GssResult | None = None
    source_epsilon: float | None = None   # floor whose design this point adopted


def pareto_sweep(
    scn: Scenario,
    settings: DesignSettings | None = None,
    eps_grid: np.ndarray | None = None,
    seed: int = 0,
    consolidate: bool = True,
) -> list[ParetoPoint]:
    """Trace the frontier: best CRB at each secrecy floor.

    The default grid spans zero to 95 percent of the secrecy ceiling.
    Each floor starts from its own seeded random phase profile so the
    points are independent design runs.

    With ``consolidate`` a design proven feasible at some floor also
    serves every lower floor (its achieved worst-user rate clears the
    milder requirement by definition), so each point reports the best
    such design; ``source_epsilon`` marks adopted metrics.  This removes
    search noise from the reported frontier and makes it non-decreasing
    in the floor by construction.
    """
    settings = settings or DesignSettings()
    if eps_grid is None:
        eps_grid = np.linspace(0.0, 0.95 * scn.semantic.ssr_ceiling, settings.eps_points)
    points = []
    for i, eps in enumerate(np.asarray(eps_grid, dtype=float)):
        rng = np.random.default_rng((seed, i))
        v0 = np.exp(2j * np.pi * rng.random(scn.channels.n_irs))
        res = golden_section_rth(scn, float(eps), settings, v0)
        thr = res.thresholds
        points.append(ParetoPoint(
            epsilon=float(eps),
            status=res.status,
            crb=res.crb,
            ssr=res.ssr,
            r_th=res.r_th,
            gamma_com=thr.gamma_com if thr else None,
            gamma_eve=thr.gamma_eve if thr else None,
            n_evals=res.n_evals,
            ao_iterations=res.ao.iterations if res.ao else 0,
            gss=res,
        ))
    if consolidate:
        best: ParetoPoint | None = None
        for i in range(len(points) - 1, -1, -1):
            p = points[i]
            if best is not None and (p.crb is None or best.crb < p.crb):
                points[i] = ParetoPoint(
                    epsilon=p.epsilon,
                    status="ok",
                    crb=best.crb,
                    ssr=best.ssr,
                    r_th=best.r_th,
                    gamma_com=best.gamma_com,
                    gamma_eve=best.gamma_eve,
                    n_evals=p.n_evals,
                    ao_iterations=best.ao_iterations,
                    gss=best.gss,
                    source_epsilon=best.epsilon,
                )
                p = points[i]
            if p.status == "ok" and p.crb is not None and (best is None or p.crb < best.crb):
                best = p
    return points


_BASELINES = ("no_extras", "matched_filter", "fixed_directions", "random_phases")


def solve_baseline(
    kind: str,
    scn: Scenario,
    thr: ThresholdPair | None = None,
    settings: DesignSettings | None = None,
    v0: np.ndarray | None = None,
) -> AoResult:
    """Reference designs the full method is compared against.

    Parameters
    ----------
    kind : str
        "no_extras": no dedicated sensing or jamming streams, otherwise
        the full alternating design.  "matched_filter": beam directions
        matched to each receiver (users, echo, eavesdropper) with an
        optimized power split, alternating with the phase step.
        "fixed_directions": uniform beams with an optimized power split,
        alternating with the phase step.  "random_phases": one
        beamforming solve at a fixed random reflection profile.
    """
    settings = settings or DesignSettings()
    ch = scn.channels
    m_t = scn.cfg.m_t
    if v0 is None:
        v0 = np.ones(ch.n_irs, dtype=complex)

    if kind == "no_extras":
        def sp1_fn(v):
            return solve_sp1(scn, v, thr, settings, include_extras=False)
        return _ao_loop(scn, thr, settings, v0, sp1_fn, status_label="baseline")

    if kind == "matched_filter":
        def sp1_fn(v):
            dirs = [composite_scu_channel(ch, v, k).conj() for k in range(ch.k_scu)]
            echo = cascaded_echo(ch, v)
            dirs.append(echo.b.conj())
            dirs.append(composite_eve_channel(ch, v).conj())
            return solve_sp1(scn, v, thr, settings, directions=dirs)
        return _ao_loop(scn, thr, settings, v0, sp1_fn, status_label="baseline")

    if kind == "fixed_directions":
        uniform = np.ones(m_t, dtype=complex) / math.sqrt(m_t)
        dirs = [uniform] * (ch.k_scu + 2)

        def sp1_fn(v):
            return solve_sp1(scn, v, thr, settings, directions=dirs)
        return _ao_loop(scn, thr, settings, v0, sp1_fn, status_label="baseline")

    if kind == "random_phases":
        def sp1_fn(v):
            return solve_sp1(scn, v, thr, settings)
        return _ao_loop(
            scn,
            thr,
            replace(settings, max_ao_iters=1),
            v0,
            sp1_fn,
            use_sp2=False,
            status_label="baseline",
        )

    raise ConfigError(f"unknown baseline {kind!r}; expected one of {_BASELINES}")
