"""Orbit flows, nilsoliton search, beta types and the unimodular pinching bounds."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import expm

from . import fixtures
from .almost_abelian import (
    AAData,
    F_aa,
    as_aa,
    comm,
    grad_coefficients,
    grad_F_orbit,
)
from .errors import DegenerateError, FlatMetricError, MalformedInputError, PreconditionError
from .lie_core import (
    MetricLieAlgebra,
    derivation_defect,
    is_nilpotent,
    is_unimodular,
    ricci,
    solvsoliton_residual,
)

NORMALIZATIONS = ("unit_norm", "none")


# --------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class FlowConfig:
    step: float = 0.1
    max_iter: int = 2000
    grad_tol: float = 1e-9
    seed: int = 0
    normalization: str = "none"

    def __post_init__(self):
        if not self.step > 0:
            raise MalformedInputError("step must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise MalformedInputError("max_iter must be an integer >= 1")
        if not self.grad_tol > 0:
            raise MalformedInputError("grad_tol must be positive")
        if self.normalization not in NORMALIZATIONS:
            raise MalformedInputError(f"normalization must be one of {NORMALIZATIONS}")


@dataclass(eq=False)
class FlowResult:
    final: np.ndarray          # matrix A, or structure constants for bracket flows
    F_trace: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    residual: float = float("nan")
    status: str = ""           # converged | max_iter | stalled | left_orbit | diverged
    trace: list = field(default_factory=list)  # flow-specific monitored quantity

    def to_dict(self) -> dict:
        d = asdict(self)
        d["final"] = np.asarray(self.final).tolist()
        return d


@dataclass(frozen=True, eq=False)
class BetaType:
    b: tuple
    m: int
    norm_sq: float
    q: float
    operator: np.ndarray | None = None  # beta in the coordinates of the nilsoliton

    @classmethod
    def from_values(cls, b, operator=None) -> "BetaType":
        vals = tuple(sorted(float(x) for x in b))
        nsq = float(sum(x * x for x in vals))
        if nsq == 0.0:
            raise DegenerateError("beta type with all entries zero")
        return cls(vals, len(vals), nsq, 1.0 / nsq, operator)

    def rational(self, max_den: int = 120) -> tuple:
        """Entries rounded to p/q with q <= max_den; for display only."""
        return tuple(Fraction(x).limit_denominator(max_den) for x in self.b)


@dataclass(frozen=True)
class TypeReport:
    trace: float
    trace_ok: bool
    positivity_ok: bool
    norm_sq: float
    inverse_square_sum: float  # over nonzero entries, informational

    @property
    def passed(self) -> bool:
        return self.trace_ok and self.positivity_ok


@dataclass(frozen=True)
class UnimodularSolitonReport:
    skipped: bool
    scal_N: float = float("nan")
    residual: float = float("nan")
    cosine: float = float("nan")
    ratio: float = float("nan")
    passed: bool = False


@dataclass(frozen=True)
class StructuralReport:
    a_abelian: bool
    beta_commutes: bool
    beta_plus_derivation: bool

    @property
    def passed(self) -> bool:
        return self.a_abelian and self.beta_commutes and self.beta_plus_derivation


@dataclass(frozen=True)
class NormEstimateReport:
    ric_norm: float
    lower_bound: float
    holds: bool
    equality: bool
    is_solvsoliton: bool
    F: float
    bound: float
    F_below_bound: bool

    @property
    def consistent(self) -> bool:
        return self.holds and self.F_below_bound and self.equality == self.is_solvsoliton


@dataclass(frozen=True)
class Table1Row:
    row: str
    printed_type: tuple
    computed_type: tuple | None
    printed_q: Fraction
    computed_q: float | None
    status: str  # match | mismatch | inconclusive
    note: str = ""


# --------------------------------------------------------------------------
# almost-abelian flows

def _orbit_residual(aa):
    """Scale-free stationarity measure on the orbit.

    The smaller of |[A,A^t]|/|A|^2 (distance from the normal critical points)
    and the cancellation ratio of the two terms of the orbit-critical
    equation (vanishes at the non-normal critical points).
    """
    K = aa.AAt
    moment = float(np.linalg.norm(K) / aa.norm_sq)
    if moment == 0.0:
        return 0.0
    g = grad_coefficients(aa)
    X = 2 * g.c3 * comm(aa.A.T, comm(aa.A, K))
    num = np.linalg.norm(g.c2 * K - X)
    den = np.linalg.norm(g.c2 * K) + np.linalg.norm(X)
    return min(moment, float(num / den)) if den > 0 else 0.0


def _rescale(A, target, cfg):
    if cfg.normalization == "unit_norm":
        nrm = np.linalg.norm(A)
        return A * (target / nrm) if nrm > 0 else A
    return A


def ascent_flow(aa, cfg: FlowConfig = FlowConfig(), max_conjugation_cond: float = 1e6,
                settle_tol: float = 1e-2) -> FlowResult:
    """Gradient ascent of F on the conjugation orbit of A with backtracking.

    Steps are exact conjugations e^{hB} A e^{-hB}, B the minimum-norm
    generator of the tangent gradient.  Convergence needs both a small
    stationarity residual and a last step |hB| <= ``settle_tol``; near the
    supremum of a non-closed orbit the residual decays while the steps do
    not.  Such runs end with status ``left_orbit`` once the accumulated
    conjugation is ill-conditioned beyond ``max_conjugation_cond``.
    """
    aa = as_aa(aa)
    if aa.flat:
        raise FlatMetricError("flat metric: F undefined")
    tol = aa.tol
    A = aa.A.copy()
    target = np.linalg.norm(A)
    G = np.eye(A.shape[0])
    F = F_aa(aa)
    trace = [F]
    h = cfg.step
    res = _orbit_residual(aa)
    res_trace = [res]
    it = 0
    move = 0.0  # |h B| of the last accepted step
    status = "max_iter"
    while it < cfg.max_iter:
        if res <= cfg.grad_tol and move <= settle_tol:
            status = "converged"
            break
        og = grad_F_orbit(AAData(A, tol))
        B = og.generator
        bn = np.linalg.norm(B)
        if bn == 0.0:
            status = "stalled"
            break
        accepted = False
        while h * bn > 1e-14:
            step = min(h, 1.0 / bn)
            E = expm(step * B)
            Anew = _rescale(E @ A @ np.linalg.inv(E), target, cfg)
            cand = AAData(Anew, tol)
            if cand.flat:
                raise FlatMetricError("flat metric: F undefined along the flow")
            Fnew = F_aa(cand)
            if Fnew >= F:
                accepted = True
                break
            h *= 0.5
        it += 1
        if not accepted:
            status = "stalled"
            break
        A, F = Anew, Fnew
        move = step * bn
        G = E @ G
        h = min(2 * h, 1e6)
        trace.append(F)
        res = _orbit_residual(cand)
        res_trace.append(res)
        if np.linalg.cond(G) > max_conjugation_cond:
            status = "left_orbit"
            break
    else:
        if res <= cfg.grad_tol and move <= settle_tol:
            status = "converged"
    return FlowResult(A, trace, status == "converged", it, res, status, res_trace)


def _sym_exp(P, t):
    w, V = np.linalg.eigh(P)
    return (V * np.exp(t * w)) @ V.T


def _sym_basis(m):
    out = []
    for i in range(m):
        for j in range(i, m):
            Y = np.zeros((m, m))
            if i == j:
                Y[i, i] = 1.0
            else:
                Y[i, j] = Y[j, i] = 1 / np.sqrt(2)
            out.append(Y)
    return np.array(out)


def _newton_generator(A, P, basis):
    """Newton step for |e^X A e^-X|^2 over symmetric X at X = 0.

    Gradient 2<X, P> and Hessian 4|[X, A]|^2, so the step solves the least
    squares problem min |[X, A]|^2 + <X, P>.
    """
    L = np.array([comm(Y, A).ravel() for Y in basis]).T
    g = np.einsum("kij,ij->k", basis, P)
    x = -0.5 * np.linalg.lstsq(L.T @ L, g, rcond=1e-12)[0]
    return np.einsum("k,kij->ij", x, basis)


def double_bracket_flow(aa, cfg: FlowConfig = FlowConfig(), newton: bool = True) -> FlowResult:
    """A' = -[[A, A^t], A] by conjugation steps e^{hX} A e^{-hX} with X symmetric.

    The plain flow uses X = -P, P = [A, A^t]; its rate is the square of the
    smallest eigenvalue gap, so nearly repeated eigenvalues stall it.  With
    ``newton`` the generator is first the Newton step for |A|^2 on the orbit
    (the function is convex along these curves and has the same normal
    limit), tried with h = 1 and halved; when no such step is accepted the
    plain direction is used.  A step is accepted when |[A, A^t]|^2 does not
    increase, and the plain step size doubles after each success.  ``trace``
    records |[A, A^t]|^2.  Converged means |[A, A^t]| <= grad_tol * min(1, |A|^2).
    """
    aa = as_aa(aa)
    A = aa.A.copy()
    if not np.any(A):
        raise PreconditionError("double bracket flow needs A != 0")
    target = np.linalg.norm(A)
    basis = _sym_basis(A.shape[0]) if newton else None
    P = comm(A, A.T)
    k = float(np.sum(P * P))
    trace = [k]
    Ftr = [] if AAData(A).flat else [F_aa(AAData(A))]
    h = cfg.step / max(target ** 2, 1e-300)
    it = 0
    status = "max_iter"

    def attempt(X, hh):
        L, R = _sym_exp(X, hh), _sym_exp(X, -hh)
        An = _rescale(L @ A @ R, target, cfg)
        if not np.all(np.isfinite(An)):
            return None
        Pn = comm(An, An.T)
        return An, Pn, float(np.sum(Pn * Pn))

    while True:
        nsq = float(np.sum(A * A))
        # relative below unit scale, so a nilpotent orbit shrinking to 0 never converges
        if np.sqrt(k) <= cfg.grad_tol * min(1.0, nsq) and nsq > 0.0:
            status = "converged"
            break
        if nsq < 1e-200 * target ** 2:
            status = "diverged"
            break
        if it >= cfg.max_iter:
            break
        step = None
        if newton:
            X = _newton_generator(A, P, basis)
            hh = 1.0
            while hh > 1e-6:
                trial = attempt(X, hh)
                if trial is not None and trial[2] <= k:
                    step = trial
                    break
                hh *= 0.5
        if step is None:
            while h > 1e-300:
                trial = attempt(-P, h)
                if trial is not None and trial[2] <= k:
                    step = trial
                    break
                h *= 0.5
            if step is not None:
                h *= 2
        it += 1
        if step is None:
            status = "diverged"
            break
        Anew, Pn, kn = step
        if kn == k:
            # no representable progress left
            A, P = Anew, Pn
            status = "stalled"
            break
        A, P, k = Anew, Pn, kn
        trace.append(k)
        cand = AAData(A)
        if not cand.flat:
            Ftr.append(F_aa(cand))
    return FlowResult(A, Ftr, status == "converged", it, float(np.sqrt(k)), status, trace)


# --------------------------------------------------------------------------
# nilsoliton search

def _unit(c):
    return c / np.linalg.norm(c)


def _F_of(c, tol):
    curv = ricci(MetricLieAlgebra.trusted(c, tol))
    if curv.flat:
        raise FlatMetricError("flat metric: F undefined")
    return curv.F


def _moved(c, X, tol):
    h = expm(X)
    return MetricLieAlgebra.trusted(c, tol).act(h).c


def _fd_gradient(c, params, tol, eps=1e-6):
    g = np.zeros(len(params))
    for p, X in enumerate(params):
        fp = _F_of(_moved(c, eps * X, tol), tol)
        fm = _F_of(_moved(c, -eps * X, tol), tol)
        g[p] = (fp - fm) / (2 * eps)
    return g


def _param_basis(n, diagonal):
    out = []
    if diagonal:
        for i in range(n):
            X = np.zeros((n, n))
            X[i, i] = 1.0
            out.append(X)
    else:
        for i in range(n):
            for j in range(n):
                X = np.zeros((n, n))
                X[i, j] = 1.0
                out.append(X)
    return out


def nilsoliton_find(mu: MetricLieAlgebra, cfg: FlowConfig = FlowConfig(grad_tol=1e-7),
                    diagonal_phase: bool = True) -> FlowResult:
    """Maximise F over the GL_n-orbit of a nilpotent bracket.

    Each step re-centres at the current bracket and estimates the gradient
    of X -> F(exp(X).mu) at X = 0 by central differences.  The search
    direction is a BFGS update of that gradient (plain gradient on the first
    step and after every reset), followed by backtracking until F increases.
    With ``diagonal_phase`` the first phase moves only along diagonal X, then
    all n^2 directions are used.  Convergence is declared when the relative
    solvsoliton residual is at most ``cfg.grad_tol``.  F increments scale like
    the square of that residual, so values much below 1e-8 are not reachable
    in double precision.
    """
    if not is_nilpotent(mu):
        raise PreconditionError("nilsoliton_find needs a nilpotent bracket")
    if ricci(mu).flat:
        raise FlatMetricError("flat metric: F undefined")
    tol = mu.tol
    c = _unit(np.array(mu.c))
    F = _F_of(c, tol)
    trace = [F]
    res = solvsoliton_residual(MetricLieAlgebra.trusted(c, tol)).relative
    res_trace = [res]
    n = mu.dim
    phases = ([True] if diagonal_phase else []) + [False]
    it = 0
    status = "max_iter"
    for diag in phases:
        params = _param_basis(n, diag)
        k = len(params)
        H = None
        g = _fd_gradient(c, params, tol)
        while it < cfg.max_iter and res > cfg.grad_tol:
            fresh = H is None
            d = cfg.step * g if fresh else H @ g
            if not fresh and g @ d <= 0:
                H, fresh, d = None, True, cfg.step * g
            dn = np.linalg.norm(d)
            if dn == 0.0:
                break
            t = min(1.0, 0.5 / dn)
            accepted = False
            while t * dn > 1e-13:
                X = sum(di * P for di, P in zip(t * d, params))
                cand = _unit(_moved(c, X, tol))
                Fc = _F_of(cand, tol)
                if Fc > F:
                    accepted = True
                    break
                t *= 0.5
            it += 1
            if not accepted:
                if fresh:
                    break
                H = None
                continue
            c, F = cand, Fc
            trace.append(F)
            res = solvsoliton_residual(MetricLieAlgebra.trusted(c, tol)).relative
            res_trace.append(res)
            gnew = _fd_gradient(c, params, tol)
            sv, y = t * d, g - gnew  # curvature pair of -F
            sy = sv @ y
            if sy > 1e-12 * np.linalg.norm(sv) * np.linalg.norm(y):
                if H is None:
                    H = (sy / (y @ y)) * np.eye(k)
                r = 1.0 / sy
                V = np.eye(k) - r * np.outer(sv, y)
                H = V @ H @ V.T + r * np.outer(sv, sv)
            g = gnew
        if res <= cfg.grad_tol:
            status = "converged"
            break
        status = "max_iter" if it >= cfg.max_iter else "stalled"
    return FlowResult(c, trace, status == "converged", it, res, status, res_trace)


# --------------------------------------------------------------------------
# beta types and bounds

def beta_from_nilsoliton(lam: MetricLieAlgebra, tol: float | None = None) -> BetaType:
    """Beta type of a nilsoliton: D - (tr D^2 / tr D) I, scaled to trace -1."""
    tol = lam.tol if tol is None else tol
    if not is_nilpotent(lam):
        raise PreconditionError("beta_from_nilsoliton needs a nilpotent bracket")
    sr = solvsoliton_residual(lam)
    if sr.relative > tol:
        raise PreconditionError(f"not a nilsoliton: relative residual {sr.relative:.3g} > {tol:g}")
    D = 0.5 * (sr.D + sr.D.T)
    trD = float(np.trace(D))
    scale = np.linalg.norm(D)
    if abs(trD) <= 1e-12 * max(scale, 1e-300):
        raise DegenerateError("tr D = 0: beta operator undefined")
    n = lam.dim
    beta0 = D - (float(np.sum(D * D)) / trD) * np.eye(n)
    tb = float(np.trace(beta0))
    if abs(tb) <= 1e-12 * max(np.linalg.norm(beta0), 1e-300):
        raise DegenerateError("tr beta_0 = 0: cannot normalise to tr beta = -1")
    beta = -beta0 / tb
    bt = BetaType.from_values(np.linalg.eigvalsh(beta), beta)
    rep = type_invariants_check(bt, 1e-6)
    if not rep.passed:
        raise DegenerateError(f"extracted beta violates type invariants: {rep}")
    return bt


def type_invariants_check(bt: BetaType, tol: float = 1e-9) -> TypeReport:
    b = np.asarray(bt.b, dtype=float)
    nsq = float(np.sum(b * b))
    tr = float(np.sum(b))
    nz = b[np.abs(b) > tol]
    return TypeReport(
        trace=tr,
        trace_ok=abs(tr + 1.0) <= tol,
        positivity_ok=bool(np.all(b + nsq > tol)),
        norm_sq=nsq,
        inverse_square_sum=float(np.sum(1.0 / nz ** 2)),
    )


def pinching_bound(n: int, m: int, bt: BetaType | None = None) -> float:
    """n - m + q, with q = 1/sum b_i^2 (q = 0 when the nilradical is abelian)."""
    if not 1 <= m <= n:
        raise PreconditionError(f"need 1 <= m <= n, got m={m}, n={n}")
    if bt is None:
        return float(n - m)
    if bt.m != m:
        raise PreconditionError(f"beta type has {bt.m} entries but m = {m}")
    val = n - m + bt.q
    if not val < n - 1:
        raise PreconditionError(f"bound {val:g} is not below n - 1 = {n - 1}")
    return val


def _beta_matrix(bt):
    return bt.operator if bt.operator is not None else np.diag(bt.b)


def beta_sigma(bt: BetaType, n: int) -> np.ndarray:
    """blockdiag(-|beta|^2 I_{n-m}, beta)."""
    if bt is None:
        raise PreconditionError("beta_sigma needs a beta type (non-abelian nilradical)")
    if n < bt.m:
        raise PreconditionError(f"n = {n} is smaller than m = {bt.m}")
    k = n - bt.m
    out = np.zeros((n, n))
    out[:k, :k] = -bt.norm_sq * np.eye(k)
    out[k:, k:] = _beta_matrix(bt)
    return out


def _split(mu, nil_idx):
    n = mu.dim
    nil = [int(i) for i in nil_idx]
    if len(set(nil)) != len(nil) or any(not 0 <= i < n for i in nil) or not nil:
        raise MalformedInputError(f"invalid nilradical index set {nil_idx!r}")
    a = [i for i in range(n) if i not in set(nil)]
    return a, nil


def _require_unimodular(mu):
    if not is_unimodular(mu):
        raise PreconditionError("bracket is not unimodular")


def _permute(M, order):
    """Matrix given in (a, n) block order, expressed back in mu's coordinates."""
    n = len(order)
    out = np.zeros((n, n))
    out[np.ix_(order, order)] = M
    return out


def solvsoliton_verify_unimodular(mu, nil_idx, bt: BetaType, tol: float = 1e-8) -> UnimodularSolitonReport:
    """Test Ric = -scal_N beta_sigma scale-invariantly (direction cosine and magnitude ratio).

    Without ``bt.operator`` the nilradical coordinates must diagonalise beta
    in ascending order.
    """
    _require_unimodular(mu)
    a, nil = _split(mu, nil_idx)
    if bt is None:
        raise PreconditionError("a beta type is required")
    if bt.m != len(nil):
        raise MalformedInputError(f"beta type has {bt.m} entries, nilradical has {len(nil)}")
    curv = ricci(mu)
    if curv.flat:
        return UnimodularSolitonReport(skipped=True)
    scal_N = ricci(mu.restrict(nil)).scal
    T = -scal_N * _permute(beta_sigma(bt, mu.dim), a + nil)
    rn, tn = np.linalg.norm(curv.ric), np.linalg.norm(T)
    if tn == 0.0:
        return UnimodularSolitonReport(False, scal_N, rn, 0.0, np.inf, False)
    cos = float(np.sum(curv.ric * T) / (rn * tn))
    ratio = float(rn / tn)
    res = float(np.linalg.norm(curv.ric - T))
    return UnimodularSolitonReport(False, scal_N, res, cos, ratio, bool(1 - cos <= tol and abs(ratio - 1) <= tol))


def E_beta(mu, nil_idx, bt: BetaType | None) -> np.ndarray:
    """blockdiag(0 on a, beta + |beta|^2 I on n); beta_+ = I when bt is None (abelian n)."""
    a, nil = _split(mu, nil_idx)
    m = len(nil)
    bplus = np.eye(m) if bt is None else _beta_matrix(bt) + bt.norm_sq * np.eye(m)
    M = np.zeros((mu.dim, mu.dim))
    M[len(a):, len(a):] = bplus
    return _permute(M, a + nil), bplus


def ebeta_pairing(mu, nil_idx, bt: BetaType | None, tol: float = 1e-9):
    """<Ric, E_beta> and, when it vanishes, the three structural conditions of the equality case."""
    _require_unimodular(mu)
    a, nil = _split(mu, nil_idx)
    E, bplus = E_beta(mu, nil_idx, bt)
    ric = ricci(mu).ric
    pairing = float(np.sum(ric * E))
    scale = max(1.0, mu.norm() ** 2)
    if pairing < -tol * scale:
        raise ArithmeticError(f"<Ric, E_beta> = {pairing:g} is negative")
    if pairing > tol * scale:
        return pairing, None
    c = mu.c
    stol = tol * max(1.0, mu.norm())
    a_abelian = bool(np.max(np.abs(c[np.ix_(a, a, range(mu.dim))]), initial=0.0) <= stol)
    beta = np.eye(len(nil)) if bt is None else _beta_matrix(bt)
    commutes = True
    for i in a:
        adn = c[i][np.ix_(nil, nil)].T  # ad e_i restricted to n
        if np.linalg.norm(comm(beta, adn)) > stol:
            commutes = False
    is_der = derivation_defect(mu.restrict(nil), bplus) <= stol * max(1.0, np.linalg.norm(bplus))
    return pairing, StructuralReport(a_abelian, commutes, bool(is_der))


def norm_estimate_check(mu, n: int, m: int, bt: BetaType | None, tol: float = 1e-9) -> NormEstimateReport:
    """|Ric| >= -scal (n - m + q)^(-1/2), i.e. F <= n - m + q, with equality exactly at solvsolitons."""
    _require_unimodular(mu)
    if n != mu.dim:
        raise MalformedInputError(f"n = {n} does not match the bracket dimension {mu.dim}")
    curv = ricci(mu)
    if curv.flat:
        raise FlatMetricError("flat metric: estimate undefined")
    bound = pinching_bound(n, m, bt)
    rn = float(np.sqrt(curv.ric_norm_sq))
    lower = -curv.scal / np.sqrt(bound) if bound > 0 else np.inf
    sol = solvsoliton_residual(mu).relative <= mu.tol
    eq_tol = 1e-8
    return NormEstimateReport(
        ric_norm=rn,
        lower_bound=float(lower),
        holds=bool(rn >= lower - tol * max(1.0, rn)),
        equality=bool(abs(rn - lower) <= eq_tol * max(1.0, rn)),
        is_solvsoliton=bool(sol),
        F=curv.F,
        bound=bound,
        F_below_bound=bool(curv.F <= bound + tol * max(1.0, bound)),
    )


# --------------------------------------------------------------------------
# Table 1

def _fmt_type(vals):
    return tuple(Fraction(x).limit_denominator(120) for x in vals)


def table1_row(name: str, cfg: FlowConfig = FlowConfig(grad_tol=1e-7), tol: float = 1e-6) -> Table1Row:
    _, ptype, pq = fixtures.TABLE1[name]
    mu = fixtures.table1_bracket(name)
    notes = []
    psq = sum(x * x for x in ptype)
    if 1 / psq != pq:
        notes.append(f"printed row inconsistent: 1/sum b^2 = {1 / psq} != printed q = {pq}")
    res = nilsoliton_find(mu, cfg)
    if not res.converged:
        notes.append(f"flow {res.status} after {res.iterations} steps, residual {res.residual:.3g}")
        return Table1Row(name, ptype, None, pq, None, "inconclusive", "; ".join(notes))
    lam = MetricLieAlgebra.trusted(res.final, mu.tol)
    bt = beta_from_nilsoliton(lam, max(cfg.grad_tol, mu.tol) * 10)
    pt = np.array([float(x) for x in ptype])
    ok = np.max(np.abs(np.array(bt.b) - pt)) <= tol and abs(bt.q - float(pq)) <= tol
    if not ok:
        notes.append(f"computed type {_fmt_str(bt.rational())}, q = {Fraction(bt.q).limit_denominator(120)}")
    return Table1Row(name, ptype, bt.b, pq, bt.q, "match" if ok else "mismatch", "; ".join(notes))


def _fmt_str(vals):
    return "(" + ", ".join(str(v) for v in vals) + ")"


def table1_reproduce(cfg: FlowConfig = FlowConfig(grad_tol=1e-7), rows=None) -> list[Table1Row]:
    names = list(fixtures.TABLE1) if rows is None else list(rows)
    for r in names:
        if r not in fixtures.TABLE1:
            raise MalformedInputError(f"unknown Table 1 row {r!r}")
    return [table1_row(r, cfg) for r in names]
