"""Matrix-level evaluation of the degenerate elliptic operator families.

The central objects are the lower/upper partial sums of ordered Hessian
eigenvalues,

    P-_k(X) = lambda_1 + ... + lambda_k,
    P+_k(X) = lambda_{N-k+1} + ... + lambda_N,

which sandwich every operator handled by the package.  Also provided:
partial sums over an arbitrary index list, projection traces Tr(A X),
sup-inf (Bellman/Isaacs style) combinations, the one-homogeneous
infinity Laplacian with its semicontinuous envelopes at q = 0, and the
nonparametric minimal-surface operator.  The frame relaxation

    P+_k(X) = sup { sum_i X v_i . v_i : v_i orthonormal }

over finite frame sets is the semantic core of the wide-stencil grid
scheme; it is exposed here for direct testing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BadFrame, BadRank, MissingGradient

LOWER_PARTIAL_SUM = "lower_partial_sum"
UPPER_PARTIAL_SUM = "upper_partial_sum"
INDEX_PARTIAL_SUM = "index_partial_sum"
PROJECTION_TRACE = "projection_trace"
BELLMAN_SUPINF = "bellman_supinf"
INFINITY_LAPLACIAN_LOWER = "infinity_laplacian_lower"
INFINITY_LAPLACIAN_UPPER = "infinity_laplacian_upper"
MINIMAL_SURFACE = "minimal_surface"

KINDS = (
    LOWER_PARTIAL_SUM,
    UPPER_PARTIAL_SUM,
    INDEX_PARTIAL_SUM,
    PROJECTION_TRACE,
    BELLMAN_SUPINF,
    INFINITY_LAPLACIAN_LOWER,
    INFINITY_LAPLACIAN_UPPER,
    MINIMAL_SURFACE,
)

GRADIENT_KINDS = (INFINITY_LAPLACIAN_LOWER, INFINITY_LAPLACIAN_UPPER, MINIMAL_SURFACE)

_SYM_TOL = 1e-12


class SymMatrix:
    """Dense symmetric matrix with ordered-eigenvalue queries.

    Symmetry is enforced at construction: the relative asymmetry must not
    exceed 1e-12, after which the symmetric part is stored.
    """

    def __init__(self, entries):
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("SymMatrix needs a square array")
        scale = max(1.0, float(np.abs(a).max()))
        asym = float(np.abs(a - a.T).max())
        if asym > _SYM_TOL * scale:
            raise ValueError(f"matrix asymmetry {asym:.3g} exceeds {_SYM_TOL:g} relative")
        self.array = 0.5 * (a + a.T)
        self.n = a.shape[0]
        self._eigs = None

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in ascending order (cached)."""
        if self._eigs is None:
            self._eigs = np.linalg.eigvalsh(self.array)
        return self._eigs

    def norm(self) -> float:
        return float(np.linalg.norm(self.array, 2))

    def __repr__(self):
        return f"SymMatrix(n={self.n})"


def _as_array(x) -> np.ndarray:
    return x.array if isinstance(x, SymMatrix) else np.asarray(x, dtype=float)


def _eigs(x) -> np.ndarray:
    if isinstance(x, SymMatrix):
        return x.eigenvalues()
    return np.linalg.eigvalsh(_as_array(x))


def _check_rank(k: int, n: int):
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= n):
        raise BadRank(f"k = {k} outside [1, {n}]")


def partial_sum_lower(x, k: int) -> float:
    """Sum of the k smallest eigenvalues."""
    eigs = _eigs(x)
    _check_rank(k, len(eigs))
    return float(eigs[:k].sum())


def partial_sum_upper(x, k: int) -> float:
    """Sum of the k largest eigenvalues."""
    eigs = _eigs(x)
    _check_rank(k, len(eigs))
    return float(eigs[-k:].sum())


@dataclass
class OperatorSpec:
    """One operator instance: a kind plus its parameters.

    k is the sandwich rank of the partial-sum bounds.  For
    index_partial_sum it is implied by the index list, for
    projection_trace by the trace of A, for the infinity Laplacian it is
    1, and for minimal_surface it is N - 1 on matrices with lambda_1 <= 0.
    """

    kind: str
    k: int = 1
    indices: Optional[tuple] = None
    projection: Optional[np.ndarray] = None
    members: Optional[list] = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.kind == INDEX_PARTIAL_SUM:
            if not self.indices:
                raise ValueError("index_partial_sum needs an index list")
            idx = tuple(int(j) for j in self.indices)
            if any(b <= a for a, b in zip(idx, idx[1:])) or idx[0] < 1:
                raise ValueError("indices must be strictly increasing and >= 1")
            self.indices = idx
            self.k = len(idx)
        if self.kind == PROJECTION_TRACE:
            if self.projection is None:
                raise ValueError("projection_trace needs the projection matrix A")
            a = np.asarray(self.projection, dtype=float)
            if np.abs(a - a.T).max() > 1e-10 or np.abs(a @ a - a).max() > 1e-10:
                raise ValueError("A must be a symmetric projection (A^2 = A)")
            tr = float(np.trace(a))
            if abs(tr - round(tr)) > 1e-10 or round(tr) < 1:
                raise ValueError("trace(A) must be a positive integer")
            self.projection = a
            self.k = int(round(tr))
        if self.kind == BELLMAN_SUPINF:
            if not self.members:
                raise ValueError("bellman_supinf needs a list of member lists")
        if self.kind in (INFINITY_LAPLACIAN_LOWER, INFINITY_LAPLACIAN_UPPER):
            self.k = 1

    def needs_gradient(self) -> bool:
        return self.kind in GRADIENT_KINDS


def spec_from_dict(data: dict) -> OperatorSpec:
    """Build an OperatorSpec from a config mapping (kind string + params)."""
    data = dict(data)
    kind = data.pop("kind")
    members = data.pop("members", None)
    if members is not None:
        members = [[spec_from_dict(m) for m in inner] for inner in members]
    proj = data.pop("projection", None)
    if proj is not None:
        proj = np.asarray(proj, dtype=float)
    if "indices" in data and data["indices"] is not None:
        data["indices"] = tuple(data["indices"])
    return OperatorSpec(kind=kind, members=members, projection=proj, **data)


def evaluate(spec: OperatorSpec, x, q=None) -> float:
    """Evaluate F(X) or F(q, X) for the given operator spec.

    Gradient-dependent kinds (infinity Laplacian, minimal surface) raise
    MissingGradient when q is absent; other kinds ignore q.
    """
    a = _as_array(x)
    n = a.shape[0]
    kind = spec.kind
    if kind == LOWER_PARTIAL_SUM:
        return partial_sum_lower(a, spec.k)
    if kind == UPPER_PARTIAL_SUM:
        return partial_sum_upper(a, spec.k)
    if kind == INDEX_PARTIAL_SUM:
        eigs = _eigs(a)
        if spec.indices[-1] > n:
            raise BadRank(f"index {spec.indices[-1]} exceeds dimension {n}")
        return float(sum(eigs[j - 1] for j in spec.indices))
    if kind == PROJECTION_TRACE:
        return float(np.trace(spec.projection @ a))
    if kind == BELLMAN_SUPINF:
        return max(min(evaluate(m, a, q) for m in inner) for inner in spec.members)
    if kind in (INFINITY_LAPLACIAN_LOWER, INFINITY_LAPLACIAN_UPPER):
        if q is None:
            raise MissingGradient(f"{kind} needs the gradient q")
        qv = np.asarray(q, dtype=float)
        nq2 = float(qv @ qv)
        if nq2 > 0:
            return float(qv @ a @ qv) / nq2
        eigs = _eigs(a)
        return float(eigs[0] if kind == INFINITY_LAPLACIAN_LOWER else eigs[-1])
    if kind == MINIMAL_SURFACE:
        if q is None:
            raise MissingGradient("minimal_surface needs the gradient q")
        qv = np.asarray(q, dtype=float)
        m = np.eye(n) - np.outer(qv, qv) / (1.0 + float(qv @ qv))
        return float(np.trace(m @ a))
    raise ValueError(f"unhandled kind {kind!r}")


def _frame_matrix(frame) -> np.ndarray:
    f = np.atleast_2d(np.asarray(frame, dtype=float))
    gram = f @ f.T
    if np.abs(gram - np.eye(len(f))).max() > 1e-10:
        raise BadFrame("frame vectors are not orthonormal within 1e-10")
    return f


def frame_relaxation(x, k: int, frames: Sequence, mode: str) -> float:
    """sup or inf of sum_i X v_i . v_i over a finite set of orthonormal k-frames.

    The sup is a lower bound for P+_k and the inf an upper bound for P-_k,
    with equality whenever an eigenframe subset is among the frames.
    """
    a = _as_array(x)
    _check_rank(k, a.shape[0])
    if mode not in ("sup", "inf"):
        raise ValueError("mode must be 'sup' or 'inf'")
    vals = []
    for frame in frames:
        f = _frame_matrix(frame)
        if f.shape[0] != k:
            raise BadFrame(f"expected a {k}-frame, got {f.shape[0]} vectors")
        vals.append(float(np.einsum("ki,ij,kj->", f, a, f)))
    return max(vals) if mode == "sup" else min(vals)


def sandwich_check(spec: OperatorSpec, x, q=None) -> bool:
    """Check P-_k(X) <= F <= P+_k(X) at the spec's declared rank.

    For minimal_surface the bound only holds on matrices with
    lambda_1 <= 0 and only on the upper side against P+_{N-1}; the check
    is vacuous (True) outside that set.
    """
    a = _as_array(x)
    n = a.shape[0]
    tol = 1e-9 * (1.0 + float(np.linalg.norm(a, 2)))
    if spec.kind == MINIMAL_SURFACE:
        eigs = _eigs(a)
        if eigs[0] > 0:
            return True
        return evaluate(spec, a, q) <= partial_sum_upper(a, n - 1) + tol
    val = evaluate(spec, a, q)
    k = spec.k
    return partial_sum_lower(a, k) - tol <= val <= partial_sum_upper(a, k) + tol


@dataclass(frozen=True)
class RadialEigenReport:
    """Hessian eigenstructure of a radial function at one radius.

    For u(|x|) the Hessian eigenvalues are u'' (once, radial direction)
    and u'/r (with multiplicity N - 1, tangential directions).
    lower_sums[k-1] and upper_sums[k-1] hold P-_k and P+_k of that
    multiset for each k in [1, N].
    """

    eigenvalues: np.ndarray
    lower_sums: np.ndarray
    upper_sums: np.ndarray

    def partial_sum_lower(self, k: int) -> float:
        _check_rank(k, len(self.eigenvalues))
        return float(self.lower_sums[k - 1])

    def partial_sum_upper(self, k: int) -> float:
        _check_rank(k, len(self.eigenvalues))
        return float(self.upper_sums[k - 1])


def radial_hessian_eigen(upp: float, upr: float, n: int) -> RadialEigenReport:
    """Eigenvalue multiset {u''} + {u'/r} * (N - 1) with all partial sums.

    upp is u''(r) and upr is u'(r)/r.  Which of the two enters P+_k or
    P-_k is decided by their ordering, so the report carries the sums for
    every k rather than fixing one.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    eigs = np.sort(np.concatenate(([upp], np.full(n - 1, upr))))
    cum = np.cumsum(eigs)
    cum_rev = np.cumsum(eigs[::-1])
    return RadialEigenReport(eigenvalues=eigs, lower_sums=cum, upper_sums=cum_rev)


def direction_frames_2d(m: int = 16) -> list:
    """m single-direction frames at equispaced angles in [0, pi)."""
    angles = np.arange(m) * np.pi / m
    return [np.array([[np.cos(a), np.sin(a)]]) for a in angles]


def frame_set(n: int, k: int, count: int = 32, seed: int = 0) -> list:
    """Deterministic orthonormal k-frames in R^N.

    In 2D with k = 1 the frames are equispaced directions; otherwise
    frames come from QR factorization of a seeded Gaussian sequence,
    reproducible for a fixed seed.
    """
    _check_rank(k, n)
    if n == 2 and k == 1:
        return direction_frames_2d(count)
    rng = np.random.default_rng(seed)
    frames = []
    for _ in range(count):
        g = rng.standard_normal((n, n))
        qmat, _ = np.linalg.qr(g)
        frames.append(qmat[:, :k].T.copy())
    return frames
