"""Maximum likelihood fitting of the beta-model from a degree sequence.

The MLE solves d_i = sum_{j != i} p_ij for every vertex. Rearranged, each
coordinate satisfies

    beta_i = log d_i - log sum_{j != i} 1 / (exp(-beta_j) + exp(beta_i))

and iterating this map from a bounded start converges whenever a finite
solution exists. Each sweep costs O(t^2) and needs no linear solve.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from betagraph.graph import BetaVector, DegreeSequence, GraphError, probability_matrix


class Status(enum.Enum):
    CONVERGED = "converged"
    NONEXISTENT = "nonexistent"
    MAXITER = "maxiter"


@dataclass(frozen=True)
class FitConfig:
    tol: float = 1e-8
    max_iter: int = 5000
    blowup: float = 30.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError("max_iter must be an integer >= 1")
        if not self.blowup > 0:
            raise ValueError("blowup must be positive")


@dataclass(frozen=True)
class FitResult:
    beta_hat: BetaVector
    status: Status
    iterations: int
    residual: float
    log_likelihood: float
    degrees: DegreeSequence
    reason: str = ""

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def _as_array(beta) -> np.ndarray:
    return beta.values if isinstance(beta, BetaVector) else np.asarray(beta, dtype=float)


def expected_degrees(beta) -> np.ndarray:
    return probability_matrix(beta).sum(axis=1)


def residual(beta: BetaVector, d: DegreeSequence) -> float:
    """Sup-norm gap between observed and fitted expected degrees."""
    b = _as_array(beta)
    if b.size != len(d):
        raise GraphError(f"length mismatch: beta has {b.size} entries, d has {len(d)}")
    return float(np.max(np.abs(d.values - expected_degrees(b))))


def log_likelihood(beta: BetaVector, d: DegreeSequence) -> float:
    b = _as_array(beta)
    iu, ju = np.triu_indices(b.size, k=1)
    return float(b @ d.values - np.logaddexp(0.0, b[iu] + b[ju]).sum())


def regular_closed_form(t: int, k: int) -> BetaVector:
    """MLE for a k-regular degree sequence on t vertices."""
    if not 0 < k < t - 1:
        raise GraphError(f"no finite MLE for k={k}, t={t}: need 0 < k < t-1")
    q = k / (t - 1)
    return BetaVector(np.full(t, 0.5 * np.log(q / (1.0 - q))))


def initial_beta(d: DegreeSequence, blowup: float) -> np.ndarray:
    q = d.values / (d.t - 1)
    with np.errstate(divide="ignore"):
        b = 0.5 * (np.log(q) - np.log1p(-q))
    return np.clip(b, -blowup, blowup)


def _sweep(b: np.ndarray, log_d: np.ndarray) -> np.ndarray:
    # iterates stay inside [-blowup, blowup], so plain exponentials cannot overflow
    e = np.exp(b)
    m = 1.0 / (1.0 / e[None, :] + e[:, None])
    np.fill_diagonal(m, 0.0)
    return log_d - np.log(m.sum(axis=1))


def solve_mle(d: DegreeSequence, cfg: FitConfig | None = None, beta0=None) -> FitResult:
    """Fit the beta-model to a degree sequence.

    Converged means the moment residual is at most ``cfg.tol`` in sup-norm and
    the estimated distance of the iterate to the fixed point is below
    ``cfg.tol / 10``. Degrees equal to 0 or t-1, an iterate leaving
    ``[-blowup, blowup]``, or a still-growing iterate at the iteration cap
    are reported as NONEXISTENT; a stalled but bounded iterate as MAXITER.
    """
    cfg = cfg or FitConfig()
    t = d.t
    if t < 3:
        raise GraphError("fitting needs t >= 3")

    def result(b, status, iters, reason=""):
        return FitResult(
            beta_hat=BetaVector(b),
            status=status,
            iterations=iters,
            residual=residual(b, d),
            log_likelihood=log_likelihood(b, d),
            degrees=d,
            reason=reason,
        )

    b = initial_beta(d, cfg.blowup)
    if np.any(d.values == 0) or np.any(d.values == t - 1):
        return result(b, Status.NONEXISTENT, 0, "degree 0 or t-1 present")
    if beta0 is not None:
        b = np.array(_as_array(beta0), dtype=float)
        if b.shape != (t,):
            raise GraphError("initial beta has the wrong length")
        if not np.all(np.abs(b) <= cfg.blowup):
            raise GraphError("initial beta must lie within [-blowup, blowup]")

    log_d = np.log(d.values.astype(float))
    checkpoints = {cfg.max_iter // 2, (3 * cfg.max_iter) // 4}
    norms = {}
    prev_step = np.inf
    for k in range(1, cfg.max_iter + 1):
        nb = _sweep(b, log_d)
        step = float(np.max(np.abs(nb - b)))
        b = nb
        if not np.all(np.isfinite(b)) or np.max(np.abs(b)) > cfg.blowup:
            return result(np.clip(np.nan_to_num(b), -cfg.blowup, cfg.blowup),
                          Status.NONEXISTENT, k, "iterate exceeded blowup")
        # a-posteriori distance to the fixed point of a contraction with rate rho
        rho = step / prev_step if prev_step > 0 else 0.0
        prev_step = step
        if step == 0.0 or (rho < 1.0 and step * rho / (1.0 - rho) <= 0.1 * cfg.tol):
            if residual(b, d) <= cfg.tol:
                return result(b, Status.CONVERGED, k)
        if k in checkpoints:
            norms[k] = float(np.max(np.abs(b)))

    end = float(np.max(np.abs(b)))
    half, three_q = cfg.max_iter // 2, (3 * cfg.max_iter) // 4
    # too few iterations to tell slow convergence from divergence
    if half >= 50 and half in norms and three_q in norms:
        early = norms[three_q] - norms[half]
        late = end - norms[three_q]
        if late > 10 * cfg.tol and late >= 0.5 * early:
            return result(b, Status.NONEXISTENT, cfg.max_iter, "iterate norm still growing at cap")
    return result(b, Status.MAXITER, cfg.max_iter, "iteration cap reached")
