"""Fisher information of the degree vector and its closed-form inverse.

V has off-diagonal entries p_ij (1 - p_ij) and row-sum diagonal. Its inverse
is approximated entrywise by

    s_ij = delta_ij / v_ii - 1 / v_..

with v_.. the sum of all off-diagonal entries. The max-entry error of this
approximation decays like (t - 1)^-2 for bounded parameters.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.special import expit

from betagraph.graph import BetaVector, GraphError, _index

EXACT_MAX_T = 500


class FisherNumericError(ArithmeticError):
    """Raised when V cannot be factorized as positive definite."""


@dataclass(frozen=True)
class FisherMatrix:
    """Dense Fisher information matrix V at a given beta."""

    matrix: np.ndarray

    @property
    def t(self) -> int:
        return self.matrix.shape[0]

    @property
    def diag(self) -> np.ndarray:
        return np.diag(self.matrix)

    @property
    def total(self) -> float:
        """Sum of the off-diagonal entries, v_.."""
        return float(self.diag.sum())

    def entry(self, i: int, j: int) -> float:
        return float(self.matrix[_index(i, self.t), _index(j, self.t)])


@dataclass(frozen=True)
class ApproxInverse:
    """O(t) representation of the approximate inverse of V."""

    diag_terms: np.ndarray
    global_term: float

    @property
    def t(self) -> int:
        return self.diag_terms.size

    def entry(self, i: int, j: int) -> float:
        a, b = _index(i, self.t), _index(j, self.t)
        return (self.diag_terms[a] if a == b else 0.0) - self.global_term

    def dense(self) -> np.ndarray:
        """Materialized t x t matrix, for debugging and audits only."""
        return np.diag(self.diag_terms) - self.global_term


def fisher_csv(v: FisherMatrix) -> str:
    """Long-format dump ``i,j,v,s`` of V and its approximate inverse."""
    s = build_s(v)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "v", "s"])
    for i in range(1, v.t + 1):
        for j in range(1, v.t + 1):
            w.writerow([i, j, f"{v.entry(i, j):.6g}", f"{s.entry(i, j):.6g}"])
    return buf.getvalue()


def build_v(beta: BetaVector) -> FisherMatrix:
    b = beta.values if isinstance(beta, BetaVector) else BetaVector(beta).values
    t = b.size
    if t < 3:
        raise GraphError("Fisher matrix needs t >= 3")
    p = expit(b[:, None] + b[None, :])
    v = p * (1.0 - p)
    np.fill_diagonal(v, 0.0)
    np.fill_diagonal(v, v.sum(axis=1))
    v.setflags(write=False)
    return FisherMatrix(v)


def build_s(v: FisherMatrix) -> ApproxInverse:
    terms = 1.0 / v.diag
    terms.setflags(write=False)
    return ApproxInverse(terms, 1.0 / v.total)


def exact_inverse(v: FisherMatrix) -> np.ndarray:
    """Inverse of V through a Cholesky factorization.

    Intended as a reference for small and moderate t only.
    """
    t = v.t
    if t < 3:
        raise GraphError("exact inverse needs t >= 3")
    if t > EXACT_MAX_T:
        raise GraphError(f"exact inverse limited to t <= {EXACT_MAX_T}")
    try:
        factor = linalg.cho_factor(v.matrix, lower=True)
    except linalg.LinAlgError as exc:
        raise FisherNumericError(f"V is not numerically positive definite: {exc}") from exc
    inv = linalg.cho_solve(factor, np.eye(t))
    inv = 0.5 * (inv + inv.T)
    err = np.max(np.abs(v.matrix @ inv - np.eye(t)))
    if not err <= 1e-8:
        raise FisherNumericError(f"inverse residual {err:.3g} exceeds 1e-8")
    return inv


def min_pivot(v: FisherMatrix) -> float:
    """Smallest diagonal entry of the Cholesky factor."""
    try:
        c = linalg.cholesky(v.matrix, lower=True)
    except linalg.LinAlgError as exc:
        raise FisherNumericError(str(exc)) from exc
    return float(np.min(np.diag(c)))


def approx_error(v: FisherMatrix) -> float:
    """Max-entry distance between the exact and approximate inverse."""
    return float(np.max(np.abs(exact_inverse(v) - build_s(v).dense())))
