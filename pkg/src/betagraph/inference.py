"""Standard errors, Wald intervals and normality diagnostics for beta-hat.

Standardized by the diagonal of V, each coordinate of beta-hat is asymptotically
standard normal, so SE(beta_i) = v_ii^(-1/2). For a difference beta_i - beta_j
the approximate-inverse variance s_ii + s_jj - 2 s_ij reduces to
1/v_ii + 1/v_jj since the global term cancels.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from scipy.special import ndtri

from betagraph.fisher import FisherMatrix
from betagraph.graph import BetaVector, GraphError, _index
from betagraph.solver import FitResult


class InferenceError(ValueError):
    pass


@dataclass(frozen=True)
class IntervalEstimate:
    """Wald interval for a coordinate ``(i,)`` or a contrast ``(i, j)``."""

    target: tuple
    point: float
    se: float
    level: float
    lo: float
    hi: float

    @property
    def kind(self) -> str:
        return "coordinate" if len(self.target) == 1 else "contrast"

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def covers(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def normal_quantile(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise InferenceError(f"quantile level must be in (0, 1), got {p}")
    return NormalDist().inv_cdf(p)


def z_for_level(level: float) -> float:
    """Two-sided critical value z_{1 - alpha/2} for confidence ``level``."""
    if not 0.0 < level < 1.0:
        raise InferenceError(f"confidence level must be in (0, 1), got {level}")
    return normal_quantile(0.5 + level / 2.0)


def _require_converged(fit: FitResult):
    if not fit.converged:
        raise InferenceError(f"fit did not converge (status {fit.status.value})")


def se_beta(v: FisherMatrix, i: int) -> float:
    vii = v.diag[_index(i, v.t)]
    if not vii > 0:
        raise InferenceError(f"v_ii must be positive, got {vii}")
    return 1.0 / math.sqrt(vii)


def ci_coordinate(fit: FitResult, v: FisherMatrix, i: int, level: float = 0.95) -> IntervalEstimate:
    _require_converged(fit)
    z = z_for_level(level)
    point = fit.beta_hat[i]
    se = se_beta(v, i)
    return IntervalEstimate((i,), point, se, level, point - z * se, point + z * se)


def ci_contrast(fit: FitResult, v: FisherMatrix, i: int, j: int, level: float = 0.95) -> IntervalEstimate:
    if i == j:
        raise InferenceError("contrast needs two distinct vertices")
    _require_converged(fit)
    z = z_for_level(level)
    point = fit.beta_hat[i] - fit.beta_hat[j]
    se = math.sqrt(se_beta(v, i) ** 2 + se_beta(v, j) ** 2)
    return IntervalEstimate((i, j), point, se, level, point - z * se, point + z * se)


def z_statistics(fit: FitResult, v: FisherMatrix, beta_true: BetaVector) -> np.ndarray:
    """v_ii^(1/2) (beta-hat_i - beta_i), with ``v`` built at the true beta."""
    _require_converged(fit)
    if len(beta_true) != fit.beta_hat.t or v.t != fit.beta_hat.t:
        raise GraphError("dimension mismatch between fit, V and true beta")
    return np.sqrt(v.diag) * (fit.beta_hat.values - beta_true.values)


def table2_compat(v: FisherMatrix) -> np.ndarray:
    """v_ii^(1/2), the reciprocal of the standard error."""
    return np.sqrt(v.diag)


def qq_points(z) -> tuple[np.ndarray, np.ndarray]:
    """Normal quantiles at plotting positions (k - 0.5)/n and the sorted sample."""
    s = np.sort(np.asarray(z, dtype=float).ravel())
    n = s.size
    q = ndtri((np.arange(1, n + 1) - 0.5) / n)
    return q, s


def qq_correlation(z) -> float:
    q, s = qq_points(z)
    if s.size < 2 or np.ptp(s) == 0:
        return float("nan")
    return float(np.corrcoef(q, s)[0, 1])


def inference_csv(fit: FitResult, v: FisherMatrix, level: float = 0.95, compat: bool = False) -> str:
    """Per-vertex table ``vertex,beta_hat,se,ci_lo,ci_hi[,table2_compat]``."""
    _require_converged(fit)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["vertex", "beta_hat", "se", "ci_lo", "ci_hi"]
    if compat:
        header.append("table2_compat")
    w.writerow(header)
    root_v = table2_compat(v)
    for i in range(1, v.t + 1):
        ci = ci_coordinate(fit, v, i, level)
        row = [i] + [f"{x:.6g}" for x in (ci.point, ci.se, ci.lo, ci.hi)]
        if compat:
            row.append(f"{root_v[i - 1]:.6g}")
        w.writerow(row)
    return buf.getvalue()
