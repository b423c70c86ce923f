"""Closed-form curvature, gradient and second variation for almost-abelian brackets.

The bracket mu_A on R^n = R^{n-1} (+) R e_n has R^{n-1} as an abelian ideal
and ad e_n restricted to it equal to A.  All metrics on the group of mu_A
are reached, up to isometry and scaling, by conjugating A, so the functional
becomes a function of the (n-1) x (n-1) matrix A.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import expm

from .errors import FlatMetricError, MalformedInputError, PreconditionError
from .lie_core import DEFAULT_TOL, CurvatureData, MetricLieAlgebra


def comm(X, Y):
    return X @ Y - Y @ X


def sym(X):
    return 0.5 * (X + X.T)


def skew(X):
    return 0.5 * (X - X.T)


def _ip(X, Y):
    return float(np.sum(X * Y))


@dataclass(frozen=True, eq=False)
class AAData:
    """Matrix A of an almost-abelian bracket, plus cached invariants."""

    A: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        A = np.array(self.A, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            raise MalformedInputError(f"square matrix expected, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise MalformedInputError("matrix has non-finite entries")
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.A.shape[0] + 1

    @cached_property
    def S(self) -> np.ndarray:
        return sym(self.A)

    @cached_property
    def Sk(self) -> np.ndarray:
        return skew(self.A)

    @cached_property
    def trace(self) -> float:
        return float(np.trace(self.A))

    @cached_property
    def trS2(self) -> float:
        return _ip(self.S, self.S)

    @cached_property
    def AAt(self) -> np.ndarray:
        """[A, A^t]."""
        return comm(self.A, self.A.T)

    @cached_property
    def norm_sq(self) -> float:
        return _ip(self.A, self.A)

    @property
    def flat(self) -> bool:
        """A is skew-symmetric to tolerance; mu_A is then flat."""
        return self.trS2 <= self.tol * self.norm_sq or self.norm_sq == 0.0


def as_aa(x, tol=DEFAULT_TOL) -> AAData:
    return x if isinstance(x, AAData) else AAData(np.asarray(x, dtype=float), tol)


def _require_nonflat(aa):
    if aa.flat:
        raise FlatMetricError("flat metric: F undefined")


@dataclass(frozen=True)
class GradCoefficients:
    c1: float
    c2: float
    c3: float
    c4: float


@dataclass(frozen=True, eq=False)
class OrbitGradient:
    tangent: np.ndarray    # projection of grad F onto T_A C(A) = [gl, A]
    residual: float        # |grad F - tangent|
    generator: np.ndarray  # min-norm B with [B, A] = tangent


@dataclass(frozen=True)
class SolitonVerdict:
    kind: str  # normal | nilsoliton | not_solvsoliton
    c: float | None = None


@dataclass(frozen=True, eq=False)
class RicciSolitonSplit:
    N: np.ndarray
    C: np.ndarray
    c: float


@dataclass(frozen=True, eq=False)
class FamilyMember:
    aa: AAData
    F_closed: float


# --------------------------------------------------------------------------
# bracket and curvature

def bracket_of(aa) -> MetricLieAlgebra:
    aa = as_aa(aa)
    n = aa.n
    c = np.zeros((n, n, n))
    c[n - 1, : n - 1, : n - 1] = aa.A.T
    c[: n - 1, n - 1, : n - 1] = -aa.A.T
    return MetricLieAlgebra(c, aa.tol)


def ricci_aa(aa) -> CurvatureData:
    """Block form: 1/2[A,A^t] - tr(A) S(A) on the ideal, -tr S(A)^2 on e_n."""
    aa = as_aa(aa)
    m = aa.n - 1
    ric = np.zeros((aa.n, aa.n))
    ric[:m, :m] = 0.5 * aa.AAt - aa.trace * aa.S
    ric[m, m] = -aa.trS2
    scal = -(aa.trS2 + aa.trace ** 2)
    nsq = _ip(ric, ric)
    return CurvatureData(ric, scal, nsq, None if aa.flat else F_aa(aa))


def F_aa(aa) -> float:
    aa = as_aa(aa)
    _require_nonflat(aa)
    # F is scale invariant; rescaling avoids under/overflow in the quartic terms
    B = aa.A / np.max(np.abs(aa.A))
    S = sym(B)
    s, t2 = _ip(S, S), float(np.trace(B)) ** 2
    K = comm(B, B.T)
    k = _ip(K, K)
    u = s + t2
    return u * u / (s * u + 0.25 * k)


def unimodular_F(aa) -> float:
    """F for traceless A: (tr S^2)^2 / ((tr S^2)^2 + |[A,A^t]|^2/4) <= 1."""
    aa = as_aa(aa)
    if abs(aa.trace) > aa.tol * max(1.0, np.sqrt(aa.norm_sq)):
        raise PreconditionError(f"tr A = {aa.trace:g} is not zero")
    _require_nonflat(aa)
    s = aa.trS2
    return s * s / (s * s + 0.25 * _ip(aa.AAt, aa.AAt))


def grad_coefficients(aa) -> GradCoefficients:
    aa = as_aa(aa)
    _require_nonflat(aa)
    s, t = aa.trS2, aa.trace
    u = s + t * t
    k = _ip(aa.AAt, aa.AAt)
    return GradCoefficients(
        c1=t * u * (2 * s * u + k),
        c2=u * (-2 * t * t * u + k),
        c3=u * u,
        c4=s * u + 0.25 * k,
    )


def grad_F(aa) -> np.ndarray:
    """Euclidean gradient of F on gl_{n-1}."""
    aa = as_aa(aa)
    g = grad_coefficients(aa)
    m = aa.A.shape[0]
    return (g.c1 * np.eye(m) + g.c2 * aa.S + g.c3 * comm(aa.A, aa.AAt)) / g.c4 ** 2


def _ad_operator(A):
    """Matrix of B -> [B, A] on row-major vec(B)."""
    m = A.shape[0]
    I = np.eye(m)
    return np.kron(I, A.T) - np.kron(A, I)


def grad_F_orbit(aa) -> OrbitGradient:
    aa = as_aa(aa)
    g = grad_F(aa)
    L = _ad_operator(aa.A)
    Lp = np.linalg.pinv(L, rcond=1e-12)
    gen = Lp @ g.ravel()
    tangent = (L @ gen).reshape(g.shape)
    m = aa.A.shape[0]
    return OrbitGradient(tangent, float(np.linalg.norm(g - tangent)), gen.reshape(m, m))


def critical_residual(aa) -> float:
    """|c2 [A,A^t] - 2 c3 [A^t,[A,[A,A^t]]]|, zero exactly at critical points on the orbit."""
    aa = as_aa(aa)
    g = grad_coefficients(aa)
    X = g.c2 * aa.AAt - 2 * g.c3 * comm(aa.A.T, comm(aa.A, aa.AAt))
    return float(np.linalg.norm(X))


def _relative_critical(aa):
    # critical_residual is homogeneous of degree 8
    return critical_residual(aa) / aa.norm_sq ** 4


def is_orbit_critical(aa, tol=None) -> bool:
    aa = as_aa(aa)
    return bool(_relative_critical(aa) <= (aa.tol if tol is None else tol))


def global_critical_test(aa) -> str:
    """Critical points of F on all of gl_{n-1}: 'einstein', 'unimodular_normal' or 'not_critical'."""
    aa = as_aa(aa)
    _require_nonflat(aa)
    m = aa.A.shape[0]
    scale = np.sqrt(aa.norm_sq)
    cI = aa.S - (np.trace(aa.S) / m) * np.eye(m)
    if np.linalg.norm(cI) <= aa.tol * scale and abs(aa.trace) > aa.tol * scale:
        return "einstein"
    if np.linalg.norm(aa.AAt) <= aa.tol * aa.norm_sq and abs(aa.trace) <= aa.tol * scale:
        return "unimodular_normal"
    return "not_critical"


def matrix_is_nilpotent(A, tol=DEFAULT_TOL) -> bool:
    A = np.asarray(A, dtype=float)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return True
    P = np.linalg.matrix_power(A / scale, A.shape[0])
    return bool(np.linalg.norm(P) <= tol)


def is_normal(aa) -> bool:
    aa = as_aa(aa)
    return bool(np.linalg.norm(aa.AAt) <= aa.tol * max(aa.norm_sq, 1e-300))


def solvsoliton_test_aa(aa) -> SolitonVerdict:
    """Solvsolitons are the normal A and the nilpotent A with [A,[A,A^t]] = cA."""
    aa = as_aa(aa)
    if is_normal(aa):
        return SolitonVerdict("normal")
    A = aa.A
    if matrix_is_nilpotent(A, aa.tol):
        X = comm(A, aa.AAt)
        c = _ip(X, A) / aa.norm_sq
        if np.linalg.norm(X - c * A) <= aa.tol * aa.norm_sq ** 1.5:
            return SolitonVerdict("nilsoliton", c)
    return SolitonVerdict("not_solvsoliton")


# --------------------------------------------------------------------------
# second variation along e^{tB} A e^{-tB}

def _second_variation_raw(A, AAt, g, B):
    BA = comm(B, A)
    Q = sym(comm(A.T, BA))
    k = _ip(AAt, AAt)
    t = float(np.trace(A))
    u = _ip(sym(A), sym(A)) + t * t
    # the (tr A)^2 term comes from differentiating c2 and c3 along the curve;
    # it vanishes for traceless or normal A
    return (
        (0.5 * k - 2 * t * t * u) * _ip(AAt, B) ** 2
        + g.c2 * (0.5 * _ip(BA, BA) + 0.5 * _ip(comm(B.T, A), BA))
        + g.c3 * (_ip(comm(BA, AAt), BA) - 2 * _ip(Q, Q) + _ip(comm(A, AAt), comm(B, BA)))
    )


def second_variation(aa, B, tol=None) -> float:
    """d^2/dt^2 F(e^{tB} A e^{-tB}) at t = 0, valid at critical points of F on the orbit."""
    aa = as_aa(aa)
    B = np.asarray(B, dtype=float)
    g = grad_coefficients(aa)
    if not is_orbit_critical(aa, tol):
        raise PreconditionError(
            f"A is not a critical point on its orbit (relative residual {_relative_critical(aa):.3g})"
        )
    return _second_variation_raw(aa.A, aa.AAt, g, B) / g.c4 ** 2


def conjugate(A, B, t):
    E = expm(t * B)
    Einv = expm(-t * B)
    return E @ A @ Einv


def second_variation_fd(aa, B, h: float = 1e-4) -> float:
    """Central second difference of F along e^{tB} A e^{-tB}."""
    aa = as_aa(aa)
    if not h > 0:
        raise PreconditionError("step h must be positive")
    B = np.asarray(B, dtype=float)
    f0 = F_aa(aa)
    fp = F_aa(AAData(conjugate(aa.A, B, h), aa.tol))
    fm = F_aa(AAData(conjugate(aa.A, B, -h), aa.tol))
    return (fp - 2 * f0 + fm) / (h * h)


def _orthonormal_range(M, rcond=1e-10):
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if not s.size or s[0] == 0:
        return U[:, :0]
    return U[:, s > rcond * s[0]]


def _skew_basis(m):
    out = []
    for i in range(m):
        for j in range(i + 1, m):
            X = np.zeros((m, m))
            X[i, j], X[j, i] = 1.0, -1.0
            out.append(X.ravel() / np.sqrt(2))
    return np.array(out).T if out else np.zeros((m * m, 0))


def local_max_classify(aa, trials: int = 16, seed: int = 0, tol: float = 1e-8) -> str:
    """'saddle', 'max_candidate' or 'degenerate' from second variations at an orbit-critical A.

    The direction B = [A, A^t] is tried first; then ``trials`` seeded random
    tangent directions orthogonal to the isometry orbit O(n-1).A, where F
    is constant.  Each direction is scaled so that |[B, A]| = |A|.
    """
    aa = as_aa(aa)
    if not is_orbit_critical(aa):
        raise PreconditionError("local_max_classify needs an orbit-critical A")
    A = aa.A
    m = A.shape[0]
    g = grad_coefficients(aa)
    L = _ad_operator(A)
    Lp = np.linalg.pinv(L, rcond=1e-12)
    scale = np.sqrt(aa.norm_sq)

    def value(B):
        v = np.linalg.norm(comm(B, A))
        if v <= 1e-12 * scale:
            return None
        B = B * (scale / v)
        return _second_variation_raw(A, aa.AAt, g, B) / g.c4 ** 2

    values = []
    first = value(aa.AAt)
    if first is not None:
        values.append(first)
        if first > tol:
            return "saddle"

    T = _orthonormal_range(L)
    iso = _orthonormal_range(L @ _skew_basis(m)) if m > 1 else T[:, :0]
    W = T - iso @ (iso.T @ T)
    W = _orthonormal_range(W) if W.size else W
    rng = np.random.default_rng(seed)
    if W.shape[1]:
        for _ in range(trials):
            w = W @ rng.standard_normal(W.shape[1])
            val = value((Lp @ w).reshape(m, m))
            if val is not None:
                values.append(val)
        for j in range(W.shape[1]):
            val = value((Lp @ W[:, j]).reshape(m, m))
            if val is not None:
                values.append(val)
    if any(v > tol for v in values):
        return "saddle"
    if values and all(v < -tol for v in values):
        return "max_candidate"
    return "degenerate"


def ricci_soliton_decompose(aa, tol=None) -> RicciSolitonSplit | None:
    """Split an orbit-critical traceless A as N + C (nilsoliton plus commuting skew part).

    Returns None when one of the checks fails, e.g. for normal A.
    """
    aa = as_aa(aa)
    tol = aa.tol if tol is None else tol
    if not is_orbit_critical(aa, tol):
        raise PreconditionError("A is not a critical point on its orbit")
    scale = np.sqrt(aa.norm_sq)
    if abs(aa.trace) > tol * scale:
        raise PreconditionError(f"tr A = {aa.trace:g} is not zero")
    A = aa.A
    X = comm(A, aa.AAt)
    if np.linalg.norm(comm(A, X)) > tol * scale ** 4:
        return None
    SX = sym(X)
    den = _ip(SX, SX)
    if den <= (tol * scale ** 3) ** 2:
        return None
    c = _ip(aa.S, SX) / den
    if np.linalg.norm(aa.S - c * SX) > tol * scale or c >= 0:
        return None
    Bk = A / c - X
    N = A - c * Bk
    C = c * Bk
    NNt = comm(N, N.T)
    Y = comm(N, NNt)
    nn = _ip(N, N)
    lam = _ip(Y, N) / nn if nn else 0.0
    if (
        np.linalg.norm(Y - lam * N) > tol * scale ** 3
        or np.linalg.norm(sym(C)) > tol * scale
        or np.linalg.norm(comm(N, C)) > tol * scale ** 2
        or not matrix_is_nilpotent(N, max(tol, 1e-9))
    ):
        return None
    return RicciSolitonSplit(N, C, c)


# --------------------------------------------------------------------------
# moment map and families

def moment_map(aa):
    """(m(A), |[A,A^t]|/|A|^2) for the conjugation action; the ratio is at most sqrt(2)."""
    aa = as_aa(aa)
    if aa.norm_sq == 0.0:
        raise MalformedInputError("moment map undefined at A = 0")
    m = aa.AAt / aa.norm_sq
    return m, float(np.linalg.norm(m))


FAMILIES = ("a_t", "b_t", "c_t", "d_t", "e_t", "jordan_t")


def _family_matrix(name, t):
    if name == "a_t":
        return np.array([[t, -1.0], [1.0, -t]])
    if name == "b_t":
        return np.array([[t, -1.0], [1.0, t]])
    if name == "c_t":
        return np.array([[t, -1.0, 0.0], [1.0, -t, 0.0], [0.0, 0.0, t]])
    if name == "d_t":
        A = np.zeros((4, 4))
        A[0, 1], A[1, 0], A[2, 3] = -1.0, 1.0, t
        return A
    if name == "e_t":
        r = np.sqrt(1.0 + t * t)
        A = np.zeros((4, 4))
        A[0, 0], A[0, 1], A[1, 0], A[1, 1], A[2, 3] = t, -r, r, -t, t
        return A
    if name == "jordan_t":
        return np.array([[1.0, t], [0.0, 1.0]])
    raise MalformedInputError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")


def family_closed_form(name: str, t: float) -> float:
    t2, t4 = t * t, t ** 4
    if name == "a_t":
        return t4 / (t4 + 2 * t2)
    if name == "b_t":
        return 3.0
    if name == "c_t":
        return 4 * t4 / (3 * t4 + 2 * t2)
    if name == "d_t":
        return 1.0 / 3.0
    if name == "e_t":
        # the rotation block contributes |[A,A^t]|^2 = 32 t^2 (1 + t^2)
        return 25 * t4 / (59 * t4 + 32 * t2)
    if name == "jordan_t":
        u = 6 + t2 / 2
        return u * u / ((2 + t2 / 2) * u + t4 / 2)
    raise MalformedInputError(f"unknown family {name!r}")


def family_domain_ok(name: str, t: float) -> bool:
    if not np.isfinite(t):
        return False
    if name in ("a_t", "b_t"):
        return t != 0
    if name in ("c_t", "d_t", "e_t"):
        return t > 0
    return name == "jordan_t"


def family(name: str, t: float, n: int | None = None) -> FamilyMember:
    """Witness family member and its closed-form F; ``n`` pads A with zeros to ambient dimension n."""
    if name not in FAMILIES:
        raise MalformedInputError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    if not family_domain_ok(name, t):
        raise PreconditionError(f"t = {t!r} outside the domain of {name}")
    A = _family_matrix(name, float(t))
    if n is not None:
        m = n - 1
        if m < A.shape[0]:
            raise PreconditionError(f"{name} needs ambient dimension >= {A.shape[0] + 1}")
        P = np.zeros((m, m))
        P[: A.shape[0], : A.shape[1]] = A
        A = P
    return FamilyMember(AAData(A), family_closed_form(name, float(t)))


def collapse_family(a, eps: float, r: int = 1):
    """Bracket lambda_eps with ad Y_1 = blockdiag(B(a_j, eps)) on n and r - 1 extra central Y's.

    Returns ``(mu, F_closed)`` with F_closed = C1 e^4 / (C1 e^4 + 2 C2 e^2),
    C1 = (sum a_j^2)^2, C2 = sum a_j^4.
    """
    a = [float(x) for x in a]
    if not a:
        raise PreconditionError("a must be non-empty")
    if not 0 < eps < 1:
        raise PreconditionError(f"eps = {eps!r} must lie in (0, 1)")
    if r < 1:
        raise PreconditionError("r must be at least 1")
    k = len(a)
    A = np.zeros((2 * k, 2 * k))
    for j, aj in enumerate(a):
        A[2 * j: 2 * j + 2, 2 * j: 2 * j + 2] = [[eps * aj, -aj], [aj, -eps * aj]]
    m = 2 * k
    n = m + r
    c = np.zeros((n, n, n))
    y1 = m  # first complement vector
    c[y1, :m, :m] = A.T
    c[:m, y1, :m] = -A.T
    C1 = sum(x * x for x in a) ** 2
    C2 = sum(x ** 4 for x in a)
    e2, e4 = eps * eps, eps ** 4
    return MetricLieAlgebra(c), C1 * e4 / (C1 * e4 + 2 * C2 * e2)
