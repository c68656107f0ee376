"""Self-contained identity oracles for the analytic and conic layers.

Every check here compares an implementation against an independent
route to the same number: finite differences, exhaustive algebraic
identities, eigen-analysis, or a second conic backend.  The whole
suite is deterministic and finishes well under a minute, so it can run
as a preflight before long sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from sensem.channels import cascaded_echo, composite_scu_channel, lift_composite
from sensem.config import SystemConfig, db_to_linear
from sensem.metrics import (
    SemanticModel,
    crb_theta_closed,
    crb_theta_fim,
    fim_theta,
    semantic_rate,
    semantic_similarity,
    sinr_scu,
    sinr_thresholds,
)
from sensem.optimizer import (
    DesignSettings,
    Scenario,
    sca_linearize,
    sca_objective_parts,
    solve_sp1,
    solve_sp2,
    sp2_precompute,
)
from sensem.sdp import AffExpr, SdpProblem, SolverSettings, solve_sdp


@dataclass
class OracleResult:
    """One oracle outcome: observed error against its tolerance."""

    name: str
    passed: bool
    error: float
    tolerance: float
    detail: str = ""


def _result(name: str, error: float, tol: float, detail: str = "") -> OracleResult:
    return OracleResult(name, bool(error <= tol), float(error), float(tol), detail)


def _random_covariance(rng: np.random.Generator, m: int, power: float) -> np.ndarray:
    g = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    r = g @ g.conj().T
    return r * (power / np.real(np.trace(r)))


def _random_profile(rng: np.random.Generator, n: int) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(n))


# ---------------------------------------------------------------------------
# estimation-layer oracles


def check_crb_identity(seed: int = 0, trials: int = 20) -> OracleResult:
    """Closed-form bound against the 3x3 information-matrix inverse."""
    cfg = SystemConfig(n_irs=6)
    worst = 0.0
    for i in range(trials):
        scn = Scenario.sample(cfg, seed=seed + i)
        rng = np.random.default_rng(1000 + i)
        v = _random_profile(rng, cfg.n_irs)
        r_x = _random_covariance(rng, cfg.m_t, cfg.p_max_w)
        args = (scn.channels, v, r_x, cfg.l_frame, cfg.sigma_s2_w, scn.channels.scene.alpha)
        closed = crb_theta_closed(*args)
        via_fim = crb_theta_fim(fim_theta(*args))
        worst = max(worst, abs(closed - via_fim) / closed)
    return _result("crb_closed_vs_fim", worst, 1e-10, f"{trials} instances")


def check_echo_derivative_fd(seed: int = 0, trials: int = 5) -> OracleResult:
    """Analytic echo derivative against a central finite difference."""
    cfg = SystemConfig(n_irs=6)
    delta = 1e-6
    worst = 0.0
    for i in range(trials):
        scn = Scenario.sample(cfg, seed=seed + i)
        ch = scn.channels
        v = _random_profile(np.random.default_rng(2000 + i), cfg.n_irs)
        hd = cascaded_echo(ch, v).h_bb_dot

        def echo_at(theta: float) -> np.ndarray:
            shifted = replace(ch, scene=replace(ch.scene, theta=theta))
            return cascaded_echo(shifted, v).h_bb

        theta = ch.scene.theta
        fd = (echo_at(theta + delta) - echo_at(theta - delta)) / (2.0 * delta)
        worst = max(worst, np.abs(fd - hd).max() / np.abs(hd).max())
    return _result("echo_derivative_fd", worst, 1e-6, f"step {delta}")


def check_fim_fd(seed: int = 0) -> OracleResult:
    """Full information matrix against a finite-difference Jacobian build.

    The mean signal is alpha * H(theta); partials in theta come from a
    central difference, partials in the reflection coefficient are H and
    jH exactly.
    """
    cfg = SystemConfig(n_irs=6)
    scn = Scenario.sample(cfg, seed=seed)
    ch = scn.channels
    rng = np.random.default_rng(3000)
    v = _random_profile(rng, cfg.n_irs)
    r_x = _random_covariance(rng, cfg.m_t, cfg.p_max_w)
    alpha = ch.scene.alpha
    theta = ch.scene.theta
    delta = 1e-6

    def mean_at(th: float) -> np.ndarray:
        shifted = replace(ch, scene=replace(ch.scene, theta=th))
        return alpha * cascaded_echo(shifted, v).h_bb

    h = cascaded_echo(ch, v).h_bb
    partials = [
        (mean_at(theta + delta) - mean_at(theta - delta)) / (2.0 * delta),
        h,
        1j * h,
    ]
    pref = 2.0 * cfg.l_frame / cfg.sigma_s2_w
    fd = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            fd[a, b] = pref * np.real(np.trace(partials[a] @ r_x @ partials[b].conj().T))
    ana = fim_theta(ch, v, r_x, cfg.l_frame, cfg.sigma_s2_w, alpha).matrix
    err = np.abs(fd - ana).max() / np.abs(ana).max()
    return _result("fim_fd_jacobian", err, 1e-4, f"step {delta}")


def check_power_scaling(seed: int = 0) -> OracleResult:
    """Bound scales as 1/c when every covariance entry scales by c."""
    cfg = SystemConfig(n_irs=6)
    scn = Scenario.sample(cfg, seed=seed)
    rng = np.random.default_rng(4000)
    v = _random_profile(rng, cfg.n_irs)
    r_x = _random_covariance(rng, cfg.m_t, cfg.p_max_w)
    args = (scn.channels, v, r_x, cfg.l_frame, cfg.sigma_s2_w)
    base = crb_theta_closed(*args[:3], cfg.l_frame, cfg.sigma_s2_w, scn.channels.scene.alpha)
    worst = 0.0
    for c in (0.5, 2.0, 10.0):
        scaled = crb_theta_closed(
            scn.channels, v, c * r_x, cfg.l_frame, cfg.sigma_s2_w, scn.channels.scene.alpha
        )
        worst = max(worst, abs(scaled - base / c) / (base / c))
    return _result("crb_power_scaling", worst, 1e-12, "c in {0.5, 2, 10}")


# ---------------------------------------------------------------------------
# semantic-layer oracles


def check_logistic_shape() -> OracleResult:
    """Asymptotes and midpoint of the similarity curve."""
    model = SemanticModel.from_config(SystemConfig())
    err = max(
        abs(semantic_similarity(model, 1e-30) - model.a1),
        abs(semantic_similarity(model, 1e30) - model.a2),
        abs(semantic_similarity(model, db_to_linear(3.16)) - 0.675),
    )
    return _result("logistic_shape", err, 1e-9, "midpoint 0.675 at 3.16 dB")


def check_threshold_roundtrip() -> OracleResult:
    """Rate to threshold and back across the open similarity interval."""
    model = SemanticModel.from_config(SystemConfig())
    rng = np.random.default_rng(5000)
    lo, hi = model.rate_scale * model.a1, model.rate_scale * model.a2
    worst = 0.0
    for r in lo + (hi - lo) * (0.001 + 0.998 * rng.random(100)):
        thr = sinr_thresholds(model, float(r), 0.0)
        back = semantic_rate(model, thr.gamma_eve)
        worst = max(worst, abs(back - r) / r)
    return _result("threshold_roundtrip", worst, 1e-6, "100 random rates")


def check_threshold_equivalence() -> OracleResult:
    """Threshold pair delivers the floor and the margin exactly."""
    model = SemanticModel.from_config(SystemConfig())
    rng = np.random.default_rng(6000)
    rs = model.rate_scale
    worst = 0.0
    for _ in range(50):
        eps = float(rng.random() * 0.5 * model.ssr_ceiling)
        lo, hi = rs * model.a1, rs * model.a2 - eps
        r = float(lo + (hi - lo) * (0.05 + 0.9 * rng.random()))
        thr = sinr_thresholds(model, r, eps)
        worst = max(
            worst,
            abs(semantic_rate(model, thr.gamma_eve) - r) / r,
            abs(semantic_rate(model, thr.gamma_com) - (r + eps)) / (r + eps),
        )
    return _result("threshold_rate_equivalence", worst, 1e-9, "50 random pairs")


# ---------------------------------------------------------------------------
# lifting and surrogate oracles


def check_lifting_identity(seed: int = 0) -> OracleResult:
    """Composite-channel quadratic equals its lifted trace form."""
    cfg = SystemConfig()
    scn = Scenario.sample(cfg, seed=seed)
    ch = scn.channels
    rng = np.random.default_rng(7000)
    w = _random_covariance(rng, cfg.m_t, 1.0)
    worst = 0.0
    for _ in range(100):
        v = _random_profile(rng, cfg.n_irs)
        vt = np.concatenate([v, [1.0 + 0.0j]])
        for k in range(cfg.k_scu):
            h = composite_scu_channel(ch, v, k)
            direct = float(np.real(h @ w @ h.conj()))
            lift = lift_composite(ch.h_c[k], ch.g_t, ch.h_d[k])
            c_mat = np.conj(lift @ w @ lift.conj().T)
            lifted = float(np.real(vt.conj() @ c_mat @ vt))
            worst = max(worst, abs(direct - lifted) / max(direct, 1e-300))
    return _result("sinr_lifting_identity", worst, 1e-9, "100 random profiles")


def check_sensing_vform(seed: int = 0) -> OracleResult:
    """Exact ratio objective of the lift equals the trace-form information."""
    cfg = SystemConfig(n_irs=6)
    scn = Scenario.sample(cfg, seed=seed)
    rng = np.random.default_rng(8000)
    r_x = _random_covariance(rng, cfg.m_t, cfg.p_max_w)
    from sensem.metrics import CovarianceSet

    cov = CovarianceSet(w_c_cov=np.zeros((cfg.k_scu, cfg.m_t, cfg.m_t), dtype=complex),
                        w_s_cov=r_x, w_n_cov=np.zeros((cfg.m_t, cfg.m_t), dtype=complex))
    pre = sp2_precompute(scn, cov)
    worst = 0.0
    for _ in range(50):
        v = _random_profile(rng, cfg.n_irs)
        echo = cascaded_echo(scn.channels, v)
        h, hd = echo.h_bb, echo.h_bb_dot
        a = float(np.real(np.trace(hd @ r_x @ hd.conj().T)))
        t = complex(np.trace(h @ r_x @ hd.conj().T))
        c = float(np.real(np.trace(h @ r_x @ h.conj().T)))
        direct = a - abs(t) ** 2 / c
        lifted = pre.info_physical(v)
        worst = max(worst, abs(direct - lifted) / max(abs(direct), 1e-300))
    return _result("sensing_vform_identity", worst, 1e-10, "50 random profiles")


def check_sca_surrogate(seed: int = 0) -> OracleResult:
    """Polarization split, tangency, minorization, and gradient check."""
    cfg = SystemConfig(n_irs=6)
    scn = Scenario.sample(cfg, seed=seed)
    rng = np.random.default_rng(9000)
    r_x = _random_covariance(rng, cfg.m_t, cfg.p_max_w)
    from sensem.metrics import CovarianceSet

    cov = CovarianceSet(w_c_cov=np.zeros((cfg.k_scu, cfg.m_t, cfg.m_t), dtype=complex),
                        w_s_cov=r_x, w_n_cov=np.zeros((cfg.m_t, cfg.m_t), dtype=complex))
    pre = sp2_precompute(scn, cov)
    n_aug = cfg.n_irs + 1

    def random_lift() -> np.ndarray:
        g = rng.standard_normal((n_aug, n_aug)) + 1j * rng.standard_normal((n_aug, n_aug))
        m = g @ g.conj().T
        d = np.sqrt(np.real(np.diag(m)))
        return m / np.outer(d, d)

    v0 = _random_profile(rng, cfg.n_irs)
    vt = np.concatenate([v0, [1.0 + 0.0j]])
    anchor = np.outer(vt, vt.conj())
    u0 = pre.ratio_slacks(anchor)
    state = sca_linearize(pre, anchor, u0)
    cx0, cc0, exact0 = sca_objective_parts(pre, anchor, u0)

    errs = []
    # split identity and tangency at the anchor
    errs.append(abs((cx0 + cc0) - exact0) / max(abs(exact0), 1.0))
    errs.append(abs(state.value(anchor, u0) - cx0) / max(abs(cx0), 1.0))
    # global minorization: the tangent never exceeds the convex part
    worst_minor = 0.0
    for _ in range(100):
        big_v = random_lift()
        u = (u0[0] * (0.5 + rng.random()), u0[1] * (0.5 + rng.random()))
        cx, _, _ = sca_objective_parts(pre, big_v, u)
        gap = state.value(big_v, u) - cx
        worst_minor = max(worst_minor, gap / max(abs(cx), 1.0))
    errs.append(worst_minor)
    return _result("sca_surrogate", max(errs), 1e-9, "split, tangency, minorization")


def check_sca_gradient_fd(seed: int = 0) -> OracleResult:
    """Directional derivative of the convex part against its tangent."""
    cfg = SystemConfig(n_irs=6)
    scn = Scenario.sample(cfg, seed=seed)
    rng = np.random.default_rng(9500)
    r_x = _random_covariance(rng, cfg.m_t, cfg.p_max_w)
    from sensem.metrics import CovarianceSet

    cov = CovarianceSet(w_c_cov=np.zeros((cfg.k_scu, cfg.m_t, cfg.m_t), dtype=complex),
                        w_s_cov=r_x, w_n_cov=np.zeros((cfg.m_t, cfg.m_t), dtype=complex))
    pre = sp2_precompute(scn, cov)
    n_aug = cfg.n_irs + 1
    v0 = _random_profile(rng, cfg.n_irs)
    vt = np.concatenate([v0, [1.0 + 0.0j]])
    anchor = np.outer(vt, vt.conj())
    u0 = pre.ratio_slacks(anchor)
    state = sca_linearize(pre, anchor, u0)
    cx0 = sca_objective_parts(pre, anchor, u0)[0]
    worst = 0.0
    for _ in range(10):
        g = rng.standard_normal((n_aug, n_aug)) + 1j * rng.standard_normal((n_aug, n_aug))
        direction = (g + g.conj().T) / 2
        du = (float(rng.standard_normal()), float(rng.standard_normal()))
        step = 1e-6
        up = (u0[0] + step * du[0], u0[1] + step * du[1])
        dn = (u0[0] - step * du[0], u0[1] - step * du[1])
        fd = (
            sca_objective_parts(pre, anchor + step * direction, up)[0]
            - sca_objective_parts(pre, anchor - step * direction, dn)[0]
        ) / (2.0 * step)
        lin = (state.value(anchor + direction, (u0[0] + du[0], u0[1] + du[1]))
               - state.value(anchor, u0))
        worst = max(worst, abs(fd - lin) / max(abs(fd), 1.0))
    return _result("sca_gradient_fd", worst, 1e-5, "10 random directions")


# ---------------------------------------------------------------------------
# conic-layer oracles


def _eig_test_problem(seed: int, dim: int = 4) -> tuple[SdpProblem, float]:
    """max tr(C X) s.t. tr(X) <= 1, X >= 0, whose optimum is eigmax(C)."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    c = (g + g.conj().T) / 2
    prob = SdpProblem("eig_oracle")
    prob.add_hermitian("X", dim)
    prob.add_con(AffExpr.trace("X", np.eye(dim)), "<=", 1.0, "trace_budget")
    prob.set_objective_max(AffExpr.trace("X", c))
    return prob, float(np.linalg.eigvalsh(c)[-1])


def check_cross_solver(seed: int = 0) -> OracleResult:
    """Primary and reference backends agree with each other and the truth."""
    prob, truth = _eig_test_problem(10_000 + seed)
    sols = [
        solve_sdp(prob, SolverSettings(backend=b)).objective
        for b in ("CLARABEL", "SCS")
    ]
    err = max(
        abs(sols[0] - sols[1]) / abs(truth),
        abs(sols[0] - truth) / abs(truth),
    )
    return _result("cross_solver_agreement", err, 1e-6, "eigenvalue test problem")


def check_native_vs_embed(seed: int = 0) -> OracleResult:
    """Complex-native compilation against the real 2x embedding."""
    prob, truth = _eig_test_problem(11_000 + seed)
    o_nat = solve_sdp(prob, SolverSettings(complex_mode="native")).objective
    o_emb = solve_sdp(prob, SolverSettings(complex_mode="embed")).objective
    err = abs(o_nat - o_emb) / abs(truth)
    return _result("native_vs_embed", err, 1e-8, "same problem, two compilations")


def check_relaxation_bound(seed: int = 0) -> OracleResult:
    """Recovered rank-one objectives never beat their relaxed bounds."""
    cfg = SystemConfig(n_irs=6)
    scn = Scenario.sample(cfg, seed=seed)
    st = DesignSettings().fast()
    v = _random_profile(np.random.default_rng(12_000), cfg.n_irs)
    sp1 = solve_sp1(scn, v, None, st)
    gap1 = (sp1.j_recovered - sp1.j_relaxed) / abs(sp1.j_relaxed)
    sp2 = solve_sp2(scn, sp1.cov_recovered, None, v, st)
    gap2 = (sp2.j_recovered - sp2.j_relaxed) / abs(sp2.j_relaxed)
    err = max(gap1, gap2, 0.0)
    return _result(
        "relaxation_upper_bounds",
        err,
        1e-6,
        f"sp1 ratio {sp1.ratio:.4f}, sp2 {sp2.j_recovered / sp2.j_relaxed:.4f}",
    )


ORACLES = (
    check_crb_identity,
    check_echo_derivative_fd,
    check_fim_fd,
    check_power_scaling,
    check_logistic_shape,
    check_threshold_roundtrip,
    check_threshold_equivalence,
    check_lifting_identity,
    check_sensing_vform,
    check_sca_surrogate,
    check_sca_gradient_fd,
    check_cross_solver,
    check_native_vs_embed,
    check_relaxation_bound,
)


def run_all() -> list[OracleResult]:
    """Run every oracle; deterministic and fast enough for preflight."""
    return [fn() for fn in ORACLES]


def report_lines(results: list[OracleResult]) -> list[str]:
    lines = []
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{mark} {r.name}: error {r.error:.3e} (tol {r.tolerance:.1e})"
            + (f" - {r.detail}" if r.detail else "")
        )
    return lines
