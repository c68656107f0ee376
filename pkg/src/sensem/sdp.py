"""Solver-agnostic semidefinite programming layer.

Problems are declared as Hermitian matrix variables, real scalar
variables, a linear objective, affine scalar constraints, and PSD
blocks whose entries are affine in the variables.  The declaration is
compiled to cvxpy either with native complex Hermitian variables or
through the standard 2n x 2n real symmetric embedding; both paths must
agree, which the test suite enforces.  Rank-one extraction from relaxed
covariances and lifted Gram matrices lives here too, as Gaussian
randomization with deterministic seeding.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from sensem.metrics import BeamformerSet, CovarianceSet, PhaseProfile


class GrmError(RuntimeError):
    """Randomization found no feasible rank-one candidate.

    Carries the least-violating candidate and its violation for
    diagnostics.
    """

    def __init__(self, message: str, best_candidate=None, violation: float | None = None):
        super().__init__(message)
        self.best_candidate = best_candidate
        self.violation = violation


# ---------------------------------------------------------------------------
# affine expressions


class AffExpr:
    """Affine functional const + sum tr(C_m X_m) + sum a_s x_s.

    Coefficients may be complex; scalar constraints use the real part.
    """

    __slots__ = ("const", "mats", "scas")

    def __init__(self, const: complex = 0.0, mats=None, scas=None):
        self.const = complex(const)
        self.mats: dict[str, np.ndarray] = dict(mats or {})
        self.scas: dict[str, complex] = dict(scas or {})

    @classmethod
    def constant(cls, z) -> "AffExpr":
        return cls(const=z)

    @classmethod
    def trace(cls, name: str, coeff: np.ndarray) -> "AffExpr":
        return cls(mats={name: np.asarray(coeff, dtype=complex)})

    @classmethod
    def scalar(cls, name: str, coeff: complex = 1.0) -> "AffExpr":
        return cls(scas={name: complex(coeff)})

    @classmethod
    def entry(cls, name: str, i: int, j: int, dim: int) -> "AffExpr":
        """The single entry X[i, j] as tr(C X) with C = e_j e_i^T."""
        c = np.zeros((dim, dim), dtype=complex)
        c[j, i] = 1.0
        return cls(mats={name: c})

    def __add__(self, other) -> "AffExpr":
        if not isinstance(other, AffExpr):
            other = AffExpr.constant(other)
        out = AffExpr(self.const + other.const, self.mats, self.scas)
        for nm, c in other.mats.items():
            out.mats[nm] = out.mats[nm] + c if nm in out.mats else c
        for nm, a in other.scas.items():
            out.scas[nm] = out.scas.get(nm, 0.0) + a
        return out

    __radd__ = __add__

    def __neg__(self) -> "AffExpr":
        return AffExpr(
            -self.const,
            {nm: -c for nm, c in self.mats.items()},
            {nm: -a for nm, a in self.scas.items()},
        )

    def __sub__(self, other) -> "AffExpr":
        if not isinstance(other, AffExpr):
            other = AffExpr.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "AffExpr":
        return AffExpr.constant(other) + (-self)

    def __mul__(self, z) -> "AffExpr":
        z = complex(z)
        return AffExpr(
            self.const * z,
            {nm: c * z for nm, c in self.mats.items()},
            {nm: a * z for nm, a in self.scas.items()},
        )

    __rmul__ = __mul__

    def conj(self) -> "AffExpr":
        """Complex conjugate, assuming matrix variables are Hermitian.

        conj(tr(C X)) = tr(C^H X) for Hermitian X, so trace coefficients
        are conjugate transposed; scalar variables are real.
        """
        return AffExpr(
            np.conj(self.const),
            {nm: c.conj().T for nm, c in self.mats.items()},
            {nm: np.conj(a) for nm, a in self.scas.items()},
        )

    def evaluate(self, values: dict) -> complex:
        out = complex(self.const)
        for nm, c in self.mats.items():
            out += complex(np.trace(c @ values[nm]))
        for nm, a in self.scas.items():
            out += a * complex(values[nm])
        return out


@dataclass
class _MatrixVar:
    dim: int
    psd: bool


@dataclass
class _ScalarVar:
    lower: float | None
    upper: float | None


@dataclass
class _ScalarCon:
    expr: AffExpr
    sense: str         # "<=", ">=", "=="
    rhs: float
    label: str


@dataclass
class _BlockCon:
    entries: list[list[AffExpr]]
    label: str


class SdpProblem:
    """Declarative SDP: maximize a linear functional over PSD structure."""

    def __init__(self, name: str = "sdp"):
        self.name = name
        self.matrix_vars: dict[str, _MatrixVar] = {}
        self.scalar_vars: dict[str, _ScalarVar] = {}
        self.objective: AffExpr = AffExpr.constant(0.0)
        self.cons: list[_ScalarCon] = []
        self.blocks: list[_BlockCon] = []

    # -- variables ----------------------------------------------------------

    def add_hermitian(self, name: str, dim: int, psd: bool = True) -> str:
        if name in self.matrix_vars or name in self.scalar_vars:
            raise ValueError(f"duplicate variable name {name!r}")
        if dim < 1:
            raise ValueError("matrix dimension must be >= 1")
        self.matrix_vars[name] = _MatrixVar(dim=dim, psd=psd)
        return name

    def add_scalar(self, name: str, lower: float | None = None, upper: float | None = None) -> str:
        if name in self.matrix_vars or name in self.scalar_vars:
            raise ValueError(f"duplicate variable name {name!r}")
        self.scalar_vars[name] = _ScalarVar(lower=lower, upper=upper)
        return name

    # -- structure ----------------------------------------------------------

    def set_objective_max(self, expr: AffExpr) -> None:
        self.objective = expr

    def add_con(self, expr: AffExpr, sense: str, rhs: float, label: str = "") -> None:
        if sense not in ("<=", ">=", "=="):
            raise ValueError(f"unknown sense {sense!r}")
        self.cons.append(_ScalarCon(expr=expr, sense=sense, rhs=float(rhs), label=label))

    def fix_entry(self, name: str, i: int, j: int, value: complex, label: str = "") -> None:
        dim = self.matrix_vars[name].dim
        e = AffExpr.entry(name, i, j, dim)
        self.add_con(e, "==", float(np.real(value)), label or f"{name}[{i},{j}]")
        if i != j:
            self.add_con(e * (-1j), "==", float(np.imag(value)), label or f"{name}[{i},{j}]im")

    def fix_diagonal(self, name: str, value: float) -> None:
        for i in range(self.matrix_vars[name].dim):
            self.fix_entry(name, i, i, value)

    def add_psd_block(self, entries, label: str = "") -> None:
        """PSD constraint on a square block of affine entries.

        Entries must be given for the full block; Hermitian symmetry is
        the caller's responsibility (upper and lower triangles are
        averaged at compile time).
        """
        d = len(entries)
        for row in entries:
            if len(row) != d:
                raise ValueError("PSD block must be square")
        wrapped = [
            [e if isinstance(e, AffExpr) else AffExpr.constant(e) for e in row]
            for row in entries
        ]
        self.blocks.append(_BlockCon(entries=wrapped, label=label))

    # -- debugging ----------------------------------------------------------

    def dump(self) -> str:
        """Compact text rendering of the declaration (sparse, rounded)."""

        def expr_txt(e: AffExpr) -> str:
            parts = []
            if e.const != 0:
                parts.append(f"{e.const:.6g}")
            for nm, c in e.mats.items():
                parts.append(f"tr(C@{nm})[|C|={np.abs(c).max():.3g}]")
            for nm, a in e.scas.items():
                parts.append(f"{a:.6g}*{nm}")
            return " + ".join(parts) if parts else "0"

        lines = [f"sdp {self.name}"]
        for nm, mv in self.matrix_vars.items():
            lines.append(f"  herm {nm} dim={mv.dim} psd={mv.psd}")
        for nm, sv in self.scalar_vars.items():
            lines.append(f"  scalar {nm} lower={sv.lower} upper={sv.upper}")
        lines.append(f"  maximize {expr_txt(self.objective)}")
        for con in self.cons:
            lines.append(f"  con[{con.label}] {expr_txt(con.expr)} {con.sense} {con.rhs:.6g}")
        for blk in self.blocks:
            lines.append(f"  psd_block[{blk.label}] dim={len(blk.entries)}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# solving


@dataclass(frozen=True)
class SolverSettings:
    """Conic backend selection, tolerances, and randomization controls."""

    backend: str = "CLARABEL"
    reference_backend: str = "SCS"
    complex_mode: str = "native"        # "native" or "embed"
    feas_tol: float = 1e-7
    psd_dim_cap: int = 64
    verbose: bool = False
    solver_opts: dict = field(default_factory=dict)
    grm_trials: int = 200
    grm_retry_doublings: int = 4
    grm_seed: int = 77
    # Relative slack accepted when screening randomized rank-one
    # candidates.  Tight constraints shift by the discarded eigenvalue
    # mass, so this is looser than the solver tolerance; callers polish
    # the winner back to solver-grade feasibility where exactness
    # matters.
    grm_feas_tol: float = 1e-5


@dataclass
class SdpSolution:
    """Outcome of one solve; failures are statuses, never exceptions."""

    status: str                       # optimal | inaccurate | infeasible | unbounded | failed
    objective: float | None
    values: dict
    max_violation: float | None = None
    backend: str = ""
    detail: str = ""

    def value(self, name: str):
        return self.values[name]


_STATUS_MAP = {
    "optimal": "optimal",
    "optimal_inaccurate": "inaccurate",
    "infeasible": "infeasible",
    "infeasible_inaccurate": "infeasible",
    "unbounded": "unbounded",
    "unbounded_inaccurate": "unbounded",
}


def _check_dims(prob: SdpProblem, cap: int) -> None:
    for nm, mv in prob.matrix_vars.items():
        if mv.dim > cap:
            raise ValueError(f"matrix variable {nm!r} dimension {mv.dim} exceeds cap {cap}")
    for blk in prob.blocks:
        if len(blk.entries) > cap:
            raise ValueError(f"PSD block {blk.label!r} dimension {len(blk.entries)} exceeds cap {cap}")


def _compile_native(prob: SdpProblem):
    import cvxpy as cp

    cvars: dict = {}
    cons = []
    for nm, mv in prob.matrix_vars.items():
        x = cp.Variable((mv.dim, mv.dim), hermitian=True, name=nm)
        cvars[nm] = x
        if mv.psd:
            cons.append(x >> 0)
    for nm, sv in prob.scalar_vars.items():
        x = cp.Variable(name=nm)
        cvars[nm] = x
        if sv.lower is not None:
            cons.append(x >= sv.lower)
        if sv.upper is not None:
            cons.append(x <= sv.upper)

    def as_cvx(e: AffExpr):
        out = cp.Constant(e.const)
        for nm, c in e.mats.items():
            out = out + cp.trace(cp.Constant(c) @ cvars[nm])
        for nm, a in e.scas.items():
            out = out + a * cvars[nm]
        return out

    for con in prob.cons:
        lhs = cp.real(as_cvx(con.expr))
        if con.sense == "<=":
            cons.append(lhs <= con.rhs)
        elif con.sense == ">=":
            cons.append(lhs >= con.rhs)
        else:
            cons.append(lhs == con.rhs)
    for blk in prob.blocks:
        rows = [[as_cvx(e) for e in row] for row in blk.entries]
        m = cp.bmat(rows)
        cons.append((m + m.H) / 2 >> 0)
    problem = cp.Problem(cp.Maximize(cp.real(as_cvx(prob.objective))), cons)
    return problem, cvars


def _compile_embed(prob: SdpProblem):
    """Real symmetric embedding: X = A + iB maps to [[A, -B], [B, A]]."""
    import cvxpy as cp

    pairs: dict[str, tuple] = {}
    svars: dict = {}
    cons = []
    for nm, mv in prob.matrix_vars.items():
        a = cp.Variable((mv.dim, mv.dim), symmetric=True, name=nm + "_re")
        b = cp.Variable((mv.dim, mv.dim), name=nm + "_im")
        cons.append(b == -b.T)
        pairs[nm] = (a, b)
        if mv.psd:
            cons.append(cp.bmat([[a, -b], [b, a]]) >> 0)
    for nm, sv in prob.scalar_vars.items():
        x = cp.Variable(name=nm)
        svars[nm] = x
        if sv.lower is not None:
            cons.append(x >= sv.lower)
        if sv.upper is not None:
            cons.append(x <= sv.upper)

    def re_im(e: AffExpr):
        re = cp.Constant(float(e.const.real))
        im = cp.Constant(float(e.const.imag))
        for nm, c in e.mats.items():
            a, b = pairs[nm]
            cr, ci = np.ascontiguousarray(c.real), np.ascontiguousarray(c.imag)
            re = re + cp.trace(cr @ a) - cp.trace(ci @ b)
            im = im + cp.trace(ci @ a) + cp.trace(cr @ b)
        for nm, z in e.scas.items():
            re = re + float(z.real) * svars[nm]
            im = im + float(z.imag) * svars[nm]
        return re, im

    for con in prob.cons:
        lhs, _ = re_im(con.expr)
        if con.sense == "<=":
            cons.append(lhs <= con.rhs)
        elif con.sense == ">=":
            cons.append(lhs >= con.rhs)
        else:
            cons.append(lhs == con.rhs)
    for blk in prob.blocks:
        re_rows, im_rows = [], []
        for row in blk.entries:
            res, ims = zip(*(re_im(e) for e in row))
            re_rows.append(list(res))
            im_rows.append(list(ims))
        r = cp.bmat(re_rows)
        i = cp.bmat(im_rows)
        big = cp.bmat([[r, -i], [i, r]])
        cons.append((big + big.T) / 2 >> 0)
    re_obj, _ = re_im(prob.objective)
    problem = cp.Problem(cp.Maximize(re_obj), cons)
    return problem, (pairs, svars)


def solve_sdp(prob: SdpProblem, settings: SolverSettings | None = None, backend: str | None = None) -> SdpSolution:
    """Compile and solve; never raises for solver-side failures.

    An "optimal" claim is re-checked against the declaration with
    :func:`validate_feasibility` and downgraded to "inaccurate" when the
    worst violation exceeds the feasibility tolerance.
    """
    settings = settings or SolverSettings()
    _check_dims(prob, settings.psd_dim_cap)
    backend = backend or settings.backend
    try:
        if settings.complex_mode == "embed":
            problem, handles = _compile_embed(prob)
        elif settings.complex_mode == "native":
            problem, handles = _compile_native(prob)
        else:
            raise ValueError(f"unknown complex_mode {settings.complex_mode!r}")
        with warnings.catch_warnings():
            # Inaccurate solves are handled through the returned status
            # and the independent feasibility check below.
            warnings.filterwarnings("ignore", message="Solution may be inaccurate")
            problem.solve(solver=backend, verbose=settings.verbose, **settings.solver_opts)
    except ValueError:
        raise
    except Exception as exc:  # solver-side failure becomes a status
        return SdpSolution(status="failed", objective=None, values={}, backend=backend, detail=str(exc))

    status = _STATUS_MAP.get(str(problem.status).lower(), "failed")
    if status in ("infeasible", "unbounded", "failed"):
        return SdpSolution(status=status, objective=None, values={}, backend=backend, detail=str(problem.status))

    values: dict = {}
    if settings.complex_mode == "embed":
        pairs, svars = handles
        for nm in prob.matrix_vars:
            a, b = pairs[nm]
            x = np.asarray(a.value) + 1j * np.asarray(b.value)
            values[nm] = (x + x.conj().T) / 2
        for nm in prob.scalar_vars:
            values[nm] = float(svars[nm].value)
    else:
        cvars = handles
        for nm in prob.matrix_vars:
            x = np.asarray(cvars[nm].value)
            values[nm] = (x + x.conj().T) / 2
        for nm in prob.scalar_vars:
            values[nm] = float(cvars[nm].value)

    objective = float(np.real(prob.objective.evaluate(values)))
    report = validate_feasibility(prob, values, settings.feas_tol)
    if status == "optimal" and not report.ok:
        status = "inaccurate"
    return SdpSolution(
        status=status,
        objective=objective,
        values=values,
        max_violation=report.max_violation,
        backend=backend,
        detail=report.worst_label if not report.ok else "",
    )


@dataclass
class FeasReport:
    ok: bool
    max_violation: float
    worst_label: str
    details: list


def validate_feasibility(prob: SdpProblem, values: dict, tol: float = 1e-7) -> FeasReport:
    """Relative constraint violations of candidate values.

    Scalar constraints are normalized by max(1, |rhs|); PSD violations
    are the most negative eigenvalue normalized by max(1, spectral
    radius).
    """
    details = []

    def push(label, viol):
        details.append((label, float(viol)))

    for nm, mv in prob.matrix_vars.items():
        x = values[nm]
        xs = (x + x.conj().T) / 2
        if mv.psd:
            w = np.linalg.eigvalsh(xs)
            push(f"psd:{nm}", max(0.0, -w[0]) / max(1.0, abs(w[-1])))
    for nm, sv in prob.scalar_vars.items():
        x = float(values[nm])
        if sv.lower is not None:
            push(f"lb:{nm}", max(0.0, sv.lower - x) / max(1.0, abs(sv.lower)))
        if sv.upper is not None:
            push(f"ub:{nm}", max(0.0, x - sv.upper) / max(1.0, abs(sv.upper)))
    for idx, con in enumerate(prob.cons):
        v = float(np.real(con.expr.evaluate(values)))
        if con.sense == "<=":
            viol = max(0.0, v - con.rhs)
        elif con.sense == ">=":
            viol = max(0.0, con.rhs - v)
        else:
            viol = abs(v - con.rhs)
        push(f"con{idx}:{con.label}", viol / max(1.0, abs(con.rhs)))
    for idx, blk in enumerate(prob.blocks):
        m = np.array([[blk.entries[i][j].evaluate(values) for j in range(len(blk.entries))]
                      for i in range(len(blk.entries))])
        ms = (m + m.conj().T) / 2
        w = np.linalg.eigvalsh(ms)
        push(f"block{idx}:{blk.label}", max(0.0, -w[0]) / max(1.0, abs(w).max()))

    worst_label, max_violation = max(details, key=lambda kv: kv[1], default=("", 0.0))
    return FeasReport(
        ok=max_violation <= tol,
        max_violation=max_violation,
        worst_label=worst_label,
        details=details,
    )


# ---------------------------------------------------------------------------
# Gaussian randomization


@dataclass
class GrmReport:
    objective: float
    relaxed_objective: float | None
    n_feasible: int
    trials_used: int

    @property
    def ratio(self) -> float | None:
        if self.relaxed_objective is None or self.relaxed_objective == 0.0:
            return None
        return self.objective / self.relaxed_objective


def _psd_factor(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(factor, eigenvalues, eigenvectors) with negatives clipped to zero."""
    ms = (mat + mat.conj().T) / 2
    w, u = np.linalg.eigh(ms)
    w = np.clip(w, 0.0, None)
    return u * np.sqrt(w), w, u


def randomize_rank_one_w(
    cov: CovarianceSet,
    p_max: float,
    objective_fn,
    feasibility_fn,
    settings: SolverSettings,
    relaxed_objective: float | None = None,
) -> tuple[BeamformerSet, GrmReport]:
    """Extract beamformers from relaxed covariances by randomization.

    Candidates are the dominant eigenvector set (unscaled when it fits
    the budget, and scaled to meet the budget exactly) plus Gaussian
    draws w = B^{1/2} z scaled uniformly to the exact power budget; the
    feasible candidate with the best objective wins.  The trial count
    doubles up to ``grm_retry_doublings`` times before a
    :class:`GrmError` reports the least-violating candidate.
    """
    k = cov.k_scu
    blocks = [cov.w_c_cov[i] for i in range(k)] + [cov.w_s_cov, cov.w_n_cov]
    m_t = blocks[0].shape[0]
    factors = [_psd_factor(b) for b in blocks]

    def pack(ws: list[np.ndarray]) -> BeamformerSet:
        return BeamformerSet(w_c=np.array(ws[:k]), w_s=ws[k], w_n=ws[k + 1])

    def scaled(ws: list[np.ndarray], target: float) -> list[np.ndarray] | None:
        tot = sum(float(np.vdot(w, w).real) for w in ws)
        if tot <= 0.0:
            return None
        s = math.sqrt(target / tot)
        return [w * s for w in ws]

    eig_ws = []
    for (_, w, u) in factors:
        i = int(np.argmax(w))
        eig_ws.append(np.sqrt(w[i]) * u[:, i] if w[i] > 0 else np.zeros(m_t, dtype=complex))

    candidates: list[list[np.ndarray]] = []
    eig_power = sum(float(np.vdot(w, w).real) for w in eig_ws)
    if 0.0 < eig_power <= p_max * (1.0 + 1e-9):
        candidates.append(eig_ws)
    eig_scaled = scaled(eig_ws, p_max)
    if eig_scaled is not None:
        candidates.append(eig_scaled)

    rng = np.random.default_rng(settings.grm_seed)
    best = None
    best_obj = -np.inf
    least_viol = np.inf
    least_cand = None
    n_feasible = 0
    trials_used = 0

    for round_idx in range(settings.grm_retry_doublings + 1):
        n = settings.grm_trials * (1 << round_idx)
        batch = list(candidates)
        candidates = []
        for _ in range(n):
            ws = []
            for (f, w, _) in factors:
                z = (rng.standard_normal(m_t) + 1j * rng.standard_normal(m_t)) / np.sqrt(2.0)
                ws.append(f @ z if w.max() > 0 else np.zeros(m_t, dtype=complex))
            ws = scaled(ws, p_max)
            if ws is not None:
                batch.append(ws)
        trials_used += n
        for ws in batch:
            bf = pack(ws)
            ok, viol = feasibility_fn(bf)
            if ok:
                n_feasible += 1
                obj = objective_fn(bf)
                if obj > best_obj:
                    best_obj = obj
                    best = bf
            elif viol < least_viol:
                least_viol = viol
                least_cand = bf
        if best is not None:
            break

    if best is None:
        raise GrmError(
            f"no feasible rank-one candidate after {trials_used} trials "
            f"(least violation {least_viol:.3e})",
            best_candidate=least_cand,
            violation=float(least_viol),
        )
    return best, GrmReport(
        objective=best_obj,
        relaxed_objective=relaxed_objective,
        n_feasible=n_feasible,
        trials_used=trials_used,
    )


def randomize_rank_one_v(
    big_v: np.ndarray,
    v_init: np.ndarray | None,
    objective_fn,
    feasibility_fn,
    settings: SolverSettings,
    relaxed_objective: float | None = None,
) -> tuple[PhaseProfile, GrmReport]:
    """Extract a unit-modulus phase profile from a lifted Gram matrix.

    Each draw z from the Gram factor is phase-referenced to its last
    (augmentation) entry and projected elementwise onto the unit circle.
    The dominant eigenvector and, when given, ``v_init`` are always in
    the candidate pool, so a feasible warm start can never be lost.
    """
    n_aug = big_v.shape[0]
    n = n_aug - 1
    factor, w, u = _psd_factor(big_v)

    def project(z: np.ndarray) -> np.ndarray:
        ref = z[-1]
        zz = z[:n] * (np.conj(ref) / abs(ref)) if abs(ref) > 0 else z[:n].copy()
        out = np.ones(n, dtype=complex)
        nz = np.abs(zz) > 0
        out[nz] = np.exp(1j * np.angle(zz[nz]))
        return out

    candidates = [project(u[:, int(np.argmax(w))])]
    if v_init is not None:
        candidates.append(np.asarray(v_init, dtype=complex))

    rng = np.random.default_rng(settings.grm_seed)
    best = None
    best_obj = -np.inf
    least_viol = np.inf
    least_cand = None
    n_feasible = 0
    trials_used = 0

    for round_idx in range(settings.grm_retry_doublings + 1):
        n_trials = settings.grm_trials * (1 << round_idx)
        batch = list(candidates)
        candidates = []
        for _ in range(n_trials):
            z = (rng.standard_normal(n_aug) + 1j * rng.standard_normal(n_aug)) / np.sqrt(2.0)
            batch.append(project(factor @ z))
        trials_used += n_trials
        for v in batch:
            ok, viol = feasibility_fn(v)
            if ok:
                n_feasible += 1
                obj = objective_fn(v)
                if obj > best_obj:
                    best_obj = obj
                    best = v
            elif viol < least_viol:
                least_viol = viol
                least_cand = v
        if best is not None:
            break

    if best is None:
        raise GrmError(
            f"no feasible phase profile after {trials_used} trials "
            f"(least violation {least_viol:.3e})",
            best_candidate=least_cand,
            violation=float(least_viol),
        )
    return PhaseProfile(v=best), GrmReport(
        objective=best_obj,
        relaxed_objective=relaxed_objective,
        n_feasible=n_feasible,
        trials_used=trials_used,
    )
