"""Linear estimators over private signals.

An estimator ``sum_v c_v S_v`` is stored as its coefficient tuple ``c``. Two
scalar backends are supported and chosen by the element type of the inputs:
``fractions.Fraction`` (exact, ``"rational"``) or ``float`` (``"float"``).
Rational results are exact; float results follow the tolerances below.

The minimum-variance unbiased estimator in the span of observed estimators
``a_1..a_k`` (each with coefficient sum 1) is ``sum_i g_i a_i`` where
``g = C^{-1} 1 / (1' C^{-1} 1)`` and ``C_ij = a_i . a_j``; its variance is
``1 / (1' C^{-1} 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from .errors import DimensionError, SingularMatrixError

Scalar = Union[Fraction, float]
CoefVector = tuple  # tuple[Scalar, ...]

RATIONAL = "rational"
FLOAT = "float"
BACKENDS = (RATIONAL, FLOAT)

# float backend: a vector is dependent when its squared residual after
# projection on the current basis is below RANK_RTOL * its squared norm.
# Genuine late-round innovations on 3-regular graphs reach ~1e-12 at n=48,
# while roundoff on dependent vectors stays near 1e-30.
RANK_RTOL = 1e-20
SUM_ATOL = 1e-12


@dataclass(frozen=True)
class GammaWeights:
    gamma: tuple
    tau_sq: Scalar


def backend_of(x) -> str:
    """Infer the backend from a scalar, a vector or a list of vectors."""
    while isinstance(x, (tuple, list, np.ndarray)):
        if len(x) == 0:
            raise DimensionError("cannot infer backend of an empty sequence")
        x = x[0]
    if isinstance(x, Rational):
        return RATIONAL
    if isinstance(x, (float, np.floating)):
        return FLOAT
    raise TypeError(f"unsupported scalar type {type(x).__name__}")


def check_backend(backend: str) -> str:
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    return backend


def as_vector(values, backend: str) -> CoefVector:
    if backend == RATIONAL:
        return tuple(Fraction(v) for v in values)
    return tuple(float(v) for v in values)


def unit_vector(n: int, i: int, backend: str) -> CoefVector:
    one, zero = (Fraction(1), Fraction(0)) if backend == RATIONAL else (1.0, 0.0)
    return tuple(one if j == i else zero for j in range(n))


def uniform_vector(n: int, backend: str) -> CoefVector:
    return (Fraction(1, n),) * n if backend == RATIONAL else (1.0 / n,) * n


def dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def coef_sum(v: Sequence):
    return sum(v)


def is_unbiased(v: Sequence) -> bool:
    """Coefficient sum is 1: exactly for rationals, within 1e-12 for floats."""
    s = coef_sum(v)
    if isinstance(s, Rational):
        return s == 1
    return abs(s - 1.0) <= SUM_ATOL


def _check_lengths(vectors) -> int:
    if not vectors:
        raise DimensionError("need at least one vector")
    n = len(vectors[0])
    for i, v in enumerate(vectors):
        if len(v) != n:
            raise DimensionError(f"vector {i} has length {len(v)}, expected {n}")
    return n


def gram(vectors: Sequence[CoefVector]) -> list[list]:
    """Covariance matrix ``C_ij = a_i . a_j`` of unit-variance signal combinations."""
    _check_lengths(vectors)
    if backend_of(vectors) == FLOAT:
        a = np.asarray(vectors, dtype=float)
        return (a @ a.T).tolist()
    k = len(vectors)
    c = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            c[i][j] = c[j][i] = dot(vectors[i], vectors[j])
    return c


class SpanBasis:
    """Incrementally grown linearly independent subset of a vector stream.

    ``add`` keeps a vector only if it enlarges the span. The exact backend
    reduces against a row-echelon copy; the float backend projects onto an
    orthonormal copy and applies the relative residual test.
    """

    def __init__(self, n: int, backend: str):
        self.n = n
        self.backend = check_backend(backend)
        self.vectors: list[CoefVector] = []
        self._pivots: list[tuple[int, list]] = []  # rational: (pivot col, row scaled to 1 at pivot)
        self._q = np.zeros((0, n))  # float: orthonormal rows

    def __len__(self):
        return len(self.vectors)

    def residual_is_zero(self, v: Sequence) -> bool:
        if self.backend == RATIONAL:
            return self._reduce(v) is None
        return self._float_residual(v) is None

    def _reduce(self, v):
        r = list(v)
        for col, row in self._pivots:
            f = r[col]
            if f:
                for j in range(col, self.n):
                    if row[j]:
                        r[j] -= f * row[j]
        for col, x in enumerate(r):
            if x:
                return col, r
        return None

    def _float_residual(self, v):
        x = np.asarray(v, dtype=float)
        norm_sq = float(x @ x)
        if norm_sq == 0.0:
            return None
        r = x
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            if len(self._q):
                r = r - self._q.T @ (self._q @ r)
        if float(r @ r) < RANK_RTOL * norm_sq:
            return None
        return r

    def add(self, v: CoefVector) -> bool:
        if len(v) != self.n:
            raise DimensionError(f"vector has length {len(v)}, expected {self.n}")
        if self.backend == RATIONAL:
            red = self._reduce(v)
            if red is None:
                return False
            col, r = red
            p = r[col]
            row = [x / p for x in r]
            # keep the echelon rows fully reduced at their pivots
            for i, (c, other) in enumerate(self._pivots):
                f = other[col]
                if f:
                    self._pivots[i] = (c, [a - f * b for a, b in zip(other, row)])
            self._pivots.append((col, row))
        else:
            r = self._float_residual(v)
            if r is None:
                return False
            self._q = np.vstack([self._q, r / np.sqrt(r @ r)])
        self.vectors.append(tuple(v))
        return True

    def estimator(self):
        """``(beta, tau_sq)``: the minimum-variance unbiased estimator in the span.

        Rational: the Gram/weights route. Float: with orthonormal rows ``Q``
        the same estimator is ``Q'y / |y|^2`` where ``y = Q 1``, which avoids
        the squared condition number of the Gram matrix.
        """
        if not self.vectors:
            raise DimensionError("empty basis")
        if self.backend == RATIONAL:
            return update_from_basis(self.vectors)
        y = self._q.sum(axis=1)
        info = float(y @ y)
        if not info > 0:
            raise SingularMatrixError("span contains no unbiased estimator")
        return tuple((self._q.T @ y / info).tolist()), 1.0 / info


def select_basis(vectors: Sequence[CoefVector]) -> list[int]:
    """Indices of a maximal independent subset, chosen greedily in list order."""
    n = _check_lengths(vectors)
    basis = SpanBasis(n, backend_of(vectors))
    return [i for i, v in enumerate(vectors) if basis.add(v)]


def _ldl_solve_ones(c: list[list]) -> list:
    """Solve ``C x = 1`` exactly by an LDL^T factorization; C must be PD."""
    k = len(c)
    low = [[Fraction(0)] * k for _ in range(k)]
    d = [Fraction(0)] * k
    for j in range(k):
        dj = c[j][j] - sum(low[j][m] ** 2 * d[m] for m in range(j))
        if dj <= 0:
            raise SingularMatrixError(f"Gram matrix not positive definite (pivot {j} = {dj})")
        d[j] = dj
        for i in range(j + 1, k):
            low[i][j] = (c[i][j] - sum(low[i][m] * low[j][m] * d[m] for m in range(j))) / dj
    y = [Fraction(0)] * k
    for i in range(k):
        y[i] = 1 - sum(low[i][m] * y[m] for m in range(i))
    x = [Fraction(0)] * k
    for i in reversed(range(k)):
        x[i] = y[i] / d[i] - sum(low[m][i] * x[m] for m in range(i + 1, k))
    return x


def solve_gamma(c: Sequence[Sequence]) -> GammaWeights:
    """Weights of the minimum-variance unbiased combination and its variance.

    ``c`` must be positive definite (restrict it with :func:`select_basis`).
    """
    k = len(c)
    if k == 0 or any(len(row) != k for row in c):
        raise DimensionError("Gram matrix must be square and non-empty")
    if backend_of(c) == RATIONAL:
        x = _ldl_solve_ones([[Fraction(e) for e in row] for row in c])
        total = sum(x)
        if total <= 0:
            raise SingularMatrixError("1' C^-1 1 is not positive")
        return GammaWeights(tuple(xi / total for xi in x), 1 / total)
    a = np.asarray(c, dtype=float)
    try:
        factor = scipy.linalg.cho_factor(a, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SingularMatrixError(f"Gram matrix not positive definite: {exc}") from None
    x = scipy.linalg.cho_solve(factor, np.ones(k))
    total = float(x.sum())
    if not np.isfinite(total) or total <= 0:
        raise SingularMatrixError("1' C^-1 1 is not positive")
    return GammaWeights(tuple((x / total).tolist()), 1.0 / total)


def combine(weights: GammaWeights | Sequence, basis: Sequence[CoefVector]) -> CoefVector:
    gamma = weights.gamma if isinstance(weights, GammaWeights) else tuple(weights)
    if len(gamma) != len(basis):
        raise DimensionError(f"{len(gamma)} weights for {len(basis)} vectors")
    n = _check_lengths(basis)
    if backend_of(basis) == FLOAT:
        out = np.asarray(gamma, dtype=float) @ np.asarray(basis, dtype=float)
        return tuple(out.tolist())
    return tuple(sum(g * a[v] for g, a in zip(gamma, basis)) for v in range(n))


def update_from_basis(basis: Sequence[CoefVector]):
    """``(beta, tau_sq)`` for an already independent basis."""
    w = solve_gamma(gram(basis))
    return combine(w, basis), w.tau_sq


def bayes_update(memory: Sequence[CoefVector]):
    """Posterior-mean estimator, its variance and the span dimension of ``memory``.

    Returns ``(beta, tau_sq, dim)``.
    """
    idx = select_basis(memory)
    basis = [memory[i] for i in idx]
    beta, tau_sq = update_from_basis(basis)
    return beta, tau_sq, len(basis)


def max_abs_diff(a: Sequence, b: Sequence) -> float:
    return max((abs(float(x) - float(y)) for x, y in zip(a, b)), default=0.0)


def format_scalar(x) -> str:
    """Rationals as ``"p/q"`` (or ``"p"``); floats with repr precision."""
    if isinstance(x, Rational):
        return str(Fraction(x))
    return repr(float(x))


def parse_scalar(x, backend: str):
    if backend == RATIONAL:
        return Fraction(x)
    return float(x)
