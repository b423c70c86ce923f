"""Metric Lie algebras given by structure constants in an orthonormal basis.

A bracket mu on R^n is stored as ``c[i, j, k] = <mu(e_i, e_j), e_k>``.
Everything here is a pure function of the structure constants; the
standard inner product is implicit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import FlatMetricError, MalformedInputError, RankAmbiguityWarning

DEFAULT_TOL = 1e-9


# --------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class BracketDiagnostics:
    antisymmetry: float
    jacobi: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.antisymmetry <= self.tol and self.jacobi <= self.tol


@dataclass(frozen=True, eq=False)
class MetricLieAlgebra:
    """Lie bracket on R^n with the standard inner product.

    Construction validates antisymmetry and the Jacobi identity at ``tol``
    and raises :class:`MalformedInputError` otherwise.  The array is stored
    read-only.
    """

    c: np.ndarray
    tol: float = DEFAULT_TOL
    _checked: bool = field(default=True, repr=False)

    def __post_init__(self):
        c = np.array(self.c, dtype=np.float64)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise MalformedInputError(f"structure constants must be n x n x n, got shape {c.shape}")
        if not self.tol > 0:
            raise MalformedInputError("tol must be positive")
        if self._checked:
            diag = validate_bracket(c, self.tol)
            if not diag.passed:
                raise MalformedInputError(
                    f"not a Lie bracket: antisymmetry residual {diag.antisymmetry:.3g}, "
                    f"Jacobi residual {diag.jacobi:.3g} (tol {self.tol:g})"
                )
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @classmethod
    def trusted(cls, c, tol=DEFAULT_TOL) -> "MetricLieAlgebra":
        """Wrap constants already known to satisfy the axioms (skips the O(n^5) Jacobi check)."""
        return cls(c, tol, _checked=False)

    @classmethod
    def from_entries(cls, dim, entries, tol=DEFAULT_TOL) -> "MetricLieAlgebra":
        """Build from ``(i, j, k, value)`` with 0-based indices, completing antisymmetrically."""
        c = np.zeros((dim, dim, dim))
        seen = {}
        for i, j, k, v in entries:
            if not (0 <= i < dim and 0 <= j < dim and 0 <= k < dim):
                raise MalformedInputError(f"index out of range in entry {(i, j, k, v)}")
            if i == j:
                if v != 0:
                    raise MalformedInputError(f"mu(e_{i + 1}, e_{i + 1}) must vanish")
                continue
            key, val = ((i, j, k), v) if i < j else ((j, i, k), -v)
            if key in seen and seen[key] != val:
                raise MalformedInputError(f"conflicting values for bracket entry {key}")
            seen[key] = val
            c[key] = val
            c[key[1], key[0], k] = -val
        return cls(c, tol)

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def norm(self) -> float:
        """|mu| with the natural inner product, sum over ordered pairs."""
        return float(np.sqrt(np.sum(self.c * self.c)))

    def bracket(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, y, self.c)

    def scaled(self, t: float) -> "MetricLieAlgebra":
        return MetricLieAlgebra.trusted(t * self.c, self.tol)

    def act(self, h) -> "MetricLieAlgebra":
        """h.mu = h mu(h^-1 ., h^-1 .); the metric <h., h.> on the group of mu."""
        h = np.asarray(h, dtype=float)
        return MetricLieAlgebra.trusted(_kernels.act(h, np.linalg.inv(h), self.c), self.tol)

    def restrict(self, idx) -> "MetricLieAlgebra":
        """Bracket restricted to the coordinate subspace ``idx`` (must be a subalgebra)."""
        idx = np.asarray(idx, dtype=int)
        return MetricLieAlgebra.trusted(self.c[np.ix_(idx, idx, idx)], self.tol)


@dataclass(frozen=True, eq=False)
class CurvatureData:
    ric: np.ndarray
    scal: float
    ric_norm_sq: float
    F: float | None

    @property
    def flat(self) -> bool:
        return self.F is None


@dataclass(frozen=True, eq=False)
class DerivationSpace:
    basis: np.ndarray  # (dim, n, n), orthonormal in the Frobenius inner product

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def project(self, X) -> np.ndarray:
        if self.dim == 0:
            return np.zeros_like(X)
        coeffs = np.einsum("kij,ij->k", self.basis, X)
        return np.einsum("k,kij->ij", coeffs, self.basis)


@dataclass(frozen=True)
class TypeVerdict:
    kind: str  # nilpotent | real_type | imaginary_type | mixed
    heuristic: bool


@dataclass(frozen=True, eq=False)
class SolitonResidual:
    c: float
    D: np.ndarray
    residual: float
    relative: float
    tol: float

    @property
    def is_soliton(self) -> bool:
        return bool(self.relative <= self.tol)


# --------------------------------------------------------------------------
# validation and basic structure

def validate_bracket(c, tol: float = DEFAULT_TOL) -> BracketDiagnostics:
    """Antisymmetry and Jacobi residuals (max-abs) of raw structure constants."""
    c = np.asarray(c, dtype=float)
    if c.ndim != 3 or len(set(c.shape)) != 1:
        raise MalformedInputError(f"structure constants must be n x n x n, got shape {c.shape}")
    if c.shape[0] == 0:
        return BracketDiagnostics(0.0, 0.0, tol)
    anti = float(np.max(np.abs(c + c.transpose(1, 0, 2))))
    return BracketDiagnostics(anti, _kernels.jacobi_residual(c), tol)


def adjoint(mu: MetricLieAlgebra, x) -> np.ndarray:
    """Matrix of ad x: column j is mu(x, e_j)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (mu.dim,):
        raise MalformedInputError(f"vector of length {mu.dim} expected")
    return np.einsum("i,ijk->kj", x, mu.c)


def _span_basis(vectors, tol, scale):
    """Orthonormal basis (rows) of the span of ``vectors`` (rows)."""
    if len(vectors) == 0:
        return np.zeros((0, 0))
    V = np.asarray(vectors, dtype=float)
    _, s, Vt = np.linalg.svd(V, full_matrices=False)
    ref = max(s[0] if s.size else 0.0, scale)
    if ref == 0.0:
        return np.zeros((0, V.shape[1]))
    thresh = tol * ref
    _warn_if_ambiguous(s, thresh)
    return Vt[s > thresh]


def _warn_if_ambiguous(s, thresh):
    live = s[s > 0]
    if thresh > 0 and live.size and np.any(np.abs(np.log10(live / thresh)) < 1.0):
        warnings.warn(
            "rank decision is within a factor 10 of the tolerance threshold",
            RankAmbiguityWarning,
            stacklevel=3,
        )


def _bracket_span(mu, U, W):
    vecs = [mu.bracket(u, w) for u in U for w in W]
    return _span_basis(vecs, mu.tol, mu.norm()) if vecs else np.zeros((0, mu.dim))


def lower_central_series(mu: MetricLieAlgebra) -> list[int]:
    """Dimensions of s, [s,s], [s,[s,s]], ... until it vanishes or stabilises."""
    I = np.eye(mu.dim)
    dims = [mu.dim]
    cur = I
    while cur.shape[0] > 0:
        nxt = _bracket_span(mu, I, cur)
        dims.append(nxt.shape[0])
        if nxt.shape[0] == cur.shape[0]:
            break
        cur = nxt
    return dims


def derived_series(mu: MetricLieAlgebra) -> list[int]:
    dims = [mu.dim]
    cur = np.eye(mu.dim)
    while cur.shape[0] > 0:
        nxt = _bracket_span(mu, cur, cur)
        dims.append(nxt.shape[0])
        if nxt.shape[0] == cur.shape[0]:
            break
        cur = nxt
    return dims


def is_nilpotent(mu: MetricLieAlgebra) -> bool:
    return lower_central_series(mu)[-1] == 0


def is_solvable(mu: MetricLieAlgebra) -> bool:
    return derived_series(mu)[-1] == 0


def is_unimodular(mu: MetricLieAlgebra) -> bool:
    traces = np.einsum("ajj->a", mu.c)
    return bool(np.all(np.abs(traces) <= mu.tol * max(1.0, mu.norm())))


def _matrix_is_nilpotent(X, tol):
    d = X.shape[0]
    scale = np.linalg.norm(X)
    if scale == 0.0:
        return True
    P = np.linalg.matrix_power(X / scale, d)
    return bool(np.linalg.norm(P) <= tol * 10)


def almost_abelian_matrix(mu: MetricLieAlgebra) -> np.ndarray | None:
    """A if mu = mu_A in standard form (span(e_1..e_{n-1}) abelian ideal), else None."""
    n = mu.dim
    if n < 2:
        return None
    c = mu.c
    thresh = mu.tol * max(1.0, mu.norm())
    if np.max(np.abs(c[: n - 1, : n - 1, :]), initial=0.0) > thresh:
        return None
    if np.max(np.abs(c[n - 1, :, n - 1])) > thresh:
        return None
    return c[n - 1, : n - 1, : n - 1].T.copy()


def classify_type(mu: MetricLieAlgebra, samples: int = 64, seed: int = 0) -> TypeVerdict:
    """Real / imaginary type of a solvable bracket.

    Exact for nilpotent and standard-form almost-abelian brackets; otherwise
    the universal quantifier over X is replaced by the basis vectors plus
    ``samples`` seeded random unit vectors and the verdict is marked heuristic.
    """
    if is_nilpotent(mu):
        return TypeVerdict("nilpotent", False)
    tol = mu.tol
    A = almost_abelian_matrix(mu)
    if A is not None:
        ev = np.linalg.eigvals(A)
        scale = max(np.linalg.norm(A), 1e-300)
        imaginary = bool(np.all(np.abs(ev.real) <= 1e3 * tol * scale))
        return TypeVerdict("imaginary_type" if imaginary else "real_type", False)

    rng = np.random.default_rng(seed)
    X = np.vstack([np.eye(mu.dim), _unit_rows(rng, samples, mu.dim)])
    imag_nonnil = nonimag = False
    for x in X:
        ad = adjoint(mu, x)
        scale = np.linalg.norm(ad)
        if scale == 0.0 or _matrix_is_nilpotent(ad, 1e3 * tol):
            continue
        ev = np.linalg.eigvals(ad)
        if np.all(np.abs(ev.real) <= 1e3 * tol * scale):
            imag_nonnil = True
        else:
            nonimag = True
    if imag_nonnil and nonimag:
        kind = "mixed"
    elif imag_nonnil:
        kind = "imaginary_type"
    else:
        kind = "real_type"
    return TypeVerdict(kind, True)


def _unit_rows(rng, k, n):
    X = rng.standard_normal((k, n))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


# --------------------------------------------------------------------------
# curvature

def ricci(mu: MetricLieAlgebra) -> CurvatureData:
    """Ricci operator Ric = M - B/2 - S(ad H) of the left-invariant metric.

    M is the usual quadratic term in mu, B the Killing form and H the mean
    curvature vector (<H, x> = tr ad x).
    """
    n = mu.dim
    if n == 0:
        return CurvatureData(np.zeros((0, 0)), 0.0, 0.0, None)
    ric = _kernels.ricci_operator(mu.c)
    scal = float(np.trace(ric))
    nsq = float(np.sum(ric * ric))
    flat = np.sqrt(nsq) <= mu.tol * max(1.0, mu.norm() ** 2)
    return CurvatureData(ric, scal, nsq, None if flat else scal * scal / nsq)


def flatness_test(mu: MetricLieAlgebra) -> bool:
    return ricci(mu).flat


def pinching_F(mu: MetricLieAlgebra) -> float:
    """scal^2/|Ric|^2; raises :class:`FlatMetricError` on flat metrics."""
    curv = ricci(mu)
    if curv.flat:
        raise FlatMetricError("flat metric: F undefined")
    return curv.F


def F_from_spectrum(eigs) -> float:
    """(sum r_i)^2 / sum r_i^2 for a prescribed Ricci spectrum."""
    r = np.asarray(eigs, dtype=float)
    return float(r.sum() ** 2 / np.sum(r * r))


def pinching_alpha_from_ricci(ric, tol: float = DEFAULT_TOL) -> float | None:
    r = np.linalg.eigvalsh(0.5 * (ric + np.transpose(ric)))
    big = np.max(np.abs(r))
    if big == 0.0:
        raise FlatMetricError("flat metric: pinching undefined")
    if np.all(r < -tol * big) or np.all(r > tol * big):
        a = np.abs(r)
        return float(a.min() / a.max())
    return None


def pinching_alpha(mu: MetricLieAlgebra) -> float | None:
    """Best alpha with Ric alpha-pinched, or None if Ric is indefinite."""
    curv = ricci(mu)
    if curv.flat:
        raise FlatMetricError("flat metric: pinching undefined")
    return pinching_alpha_from_ricci(curv.ric, mu.tol)


# --------------------------------------------------------------------------
# derivations and solitons

def derivation_operator(c) -> np.ndarray:
    """Matrix of D -> D mu - mu(D., .) - mu(., D.) on row-major vec(D)."""
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    I = np.eye(n)
    # L[i,j,k,p,q] acting on D[p,q]
    L = (
        np.einsum("kp,ijq->ijkpq", I, c)
        - np.einsum("qi,pjk->ijkpq", I, c)
        - np.einsum("qj,ipk->ijkpq", I, c)
    )
    return L.reshape(n ** 3, n ** 2)


def derivation_space(mu: MetricLieAlgebra) -> DerivationSpace:
    n = mu.dim
    L = derivation_operator(mu.c)
    _, s, Vt = np.linalg.svd(L, full_matrices=True)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return DerivationSpace(np.eye(n * n).reshape(n * n, n, n))
    thresh = mu.tol * smax
    _warn_if_ambiguous(s, thresh)
    rank = int(np.sum(s > thresh))
    return DerivationSpace(Vt[rank:].reshape(-1, n, n))


def derivation_defect(mu: MetricLieAlgebra, D) -> float:
    """max_{i,j} |D mu(e_i,e_j) - mu(D e_i, e_j) - mu(e_i, D e_j)|."""
    D = np.asarray(D, dtype=float)
    v = derivation_operator(mu.c) @ D.ravel()
    return float(np.max(np.abs(v))) if v.size else 0.0


def solvsoliton_residual(mu: MetricLieAlgebra, der: DerivationSpace | None = None) -> SolitonResidual:
    """Best fit Ric = cI + D with D in Der(mu).

    c minimises |(1 - P)(Ric - cI)| where P projects onto Der(mu); then
    D = P(Ric - cI).  ``relative`` is the residual divided by |Ric|.
    """
    curv = ricci(mu)
    if curv.flat:
        raise FlatMetricError("flat metric: soliton test undefined")
    n = mu.dim
    der = der if der is not None else derivation_space(mu)
    ric = curv.ric
    I = np.eye(n)
    perp_ric = ric - der.project(ric)
    perp_I = I - der.project(I)
    den = float(np.sum(perp_I * perp_I))
    c = float(np.sum(perp_ric * perp_I) / den) if den > mu.tol else 0.0
    D = der.project(ric - c * I)
    res = float(np.linalg.norm(ric - c * I - D))
    return SolitonResidual(c, D, res, res / np.sqrt(curv.ric_norm_sq), mu.tol)
