"""Monte Carlo coverage study over the (t, L) simulation grid.

Each replication draws a graph at beta_i = i L / t, fits it, and records
whether Wald intervals for coordinates and chosen contrasts cover the truth.
Replication r uses a seed derived only from (master_seed, r), so the report
does not depend on how replications are scheduled across workers.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from betagraph.fisher import build_v
from betagraph.graph import BetaVector, GraphError, degree_sequence, sample_graph
from betagraph.inference import qq_correlation, qq_points, z_for_level
from betagraph.solver import FitConfig, Status, solve_mle


class LSpec(enum.Enum):
    ZERO = "zero"
    LOGLOG = "loglog"
    SQRTLOG = "sqrtlog"
    LOG = "log"

    def value_at(self, t: int) -> float:
        if self is LSpec.ZERO:
            return 0.0
        if self is LSpec.LOGLOG:
            return math.log(math.log(t))
        if self is LSpec.SQRTLOG:
            return math.sqrt(math.log(t))
        return math.log(t)


L_ORDER = list(LSpec)


def _l_label(l_spec) -> str:
    return l_spec.value if isinstance(l_spec, LSpec) else f"L={float(l_spec):g}"


def _l_sort_key(l_spec):
    if isinstance(l_spec, LSpec):
        return (0, L_ORDER.index(l_spec), 0.0)
    return (1, 0, float(l_spec))


def beta_grid(t: int, l_spec) -> BetaVector:
    """beta_i = i L / t for i = 1..t.

    ``l_spec`` is an :class:`LSpec` or a plain number used as a fixed L.
    """
    if t < 3:
        raise GraphError("beta grid needs t >= 3")
    L = l_spec.value_at(t) if isinstance(l_spec, LSpec) else float(l_spec)
    return BetaVector(np.arange(1, t + 1) * L / t)


def default_pairs(t: int) -> list[tuple[int, int]]:
    h = t // 2
    return [(1, t), (h, h + 1), (t - 1, t)]


def replication_seed(master_seed: int, rep: int) -> int:
    ss = np.random.SeedSequence(int(master_seed) & ((1 << 64) - 1), spawn_key=(int(rep),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class Scenario:
    t: int
    l_spec: object = LSpec.ZERO
    n_reps: int = 1000
    level: float = 0.95
    master_seed: int = 0
    contrast_pairs: tuple = None
    fit_config: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self):
        if self.t < 3:
            raise GraphError("scenario needs t >= 3")
        if self.n_reps < 1:
            raise GraphError("scenario needs n_reps >= 1")
        if not 0 < self.level < 1:
            raise GraphError("level must be in (0, 1)")
        pairs = default_pairs(self.t) if self.contrast_pairs is None else self.contrast_pairs
        pairs = tuple((int(i), int(j)) for i, j in pairs)
        for i, j in pairs:
            if i == j or not (1 <= i <= self.t and 1 <= j <= self.t):
                raise GraphError(f"invalid contrast pair ({i}, {j}) for t={self.t}")
        object.__setattr__(self, "contrast_pairs", pairs)

    @property
    def label(self) -> str:
        return _l_label(self.l_spec)

    def beta(self) -> BetaVector:
        return beta_grid(self.t, self.l_spec)


@dataclass(frozen=True)
class RepRecord:
    rep: int
    seed: int
    status: Status
    iterations: int
    residual: float
    pair_covered: tuple = ()
    coord_covered: int = 0
    z: np.ndarray = None


@dataclass(frozen=True)
class CoverageReport:
    scenario: Scenario
    n_existing: int
    n_nonexistent: int
    n_maxiter: int
    pair_covered: dict
    coord_covered: int
    z_first: np.ndarray
    z_pooled: np.ndarray
    trace: tuple

    @property
    def n_reps(self) -> int:
        return self.scenario.n_reps

    @property
    def nonexistence_rate(self) -> float:
        return self.n_nonexistent / self.n_reps

    @property
    def maxiter_rate(self) -> float:
        return self.n_maxiter / self.n_reps

    @property
    def pair_coverage(self) -> dict:
        if self.n_existing == 0:
            return {p: float("nan") for p in self.pair_covered}
        return {p: c / self.n_existing for p, c in self.pair_covered.items()}

    @property
    def acp(self) -> float:
        if self.n_existing == 0:
            return float("nan")
        return self.coord_covered / (self.n_existing * self.scenario.t)

    def z_summary(self, pooled: bool = False) -> dict:
        z = self.z_pooled if pooled else self.z_first
        if z.size < 2:
            return {"n": int(z.size), "mean": float("nan"), "sd": float("nan"), "qq_corr": float("nan")}
        return {
            "n": int(z.size),
            "mean": float(z.mean()),
            "sd": float(z.std(ddof=1)),
            "qq_corr": qq_correlation(z),
        }

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rep", "seed", "status", "iters", "residual"])
        for r in self.trace:
            w.writerow([r.rep, r.seed, r.status.value, r.iterations, f"{r.residual:.6g}"])
        return buf.getvalue()


class ReplicationError(RuntimeError):
    def __init__(self, rep: int, seed: int, cause: Exception):
        super().__init__(f"replication {rep} (seed {seed}) failed: {cause!r}")
        self.rep = rep
        self.seed = seed


def _replicate(s: Scenario, beta: BetaVector, root_v_true: np.ndarray, z_crit: float, rep: int) -> RepRecord:
    seed = replication_seed(s.master_seed, rep)
    try:
        g = sample_graph(beta, seed)
        fit = solve_mle(degree_sequence(g), s.fit_config)
        if not fit.converged:
            return RepRecord(rep, seed, fit.status, fit.iterations, fit.residual)
        bh = fit.beta_hat.values
        inv_v = 1.0 / build_v(fit.beta_hat).diag
        half = z_crit * np.sqrt(inv_v)
        truth = beta.values
        coord = int(np.count_nonzero(np.abs(bh - truth) <= half))
        covered = []
        for i, j in s.contrast_pairs:
            a, b = i - 1, j - 1
            hw = z_crit * math.sqrt(inv_v[a] + inv_v[b])
            covered.append(abs((bh[a] - bh[b]) - (truth[a] - truth[b])) <= hw)
        z = root_v_true * (bh - truth)
        return RepRecord(rep, seed, fit.status, fit.iterations, fit.residual, tuple(covered), coord, z)
    except Exception as exc:
        raise ReplicationError(rep, seed, exc) from exc


def _run_chunk(s: Scenario, reps: range) -> list:
    beta = s.beta()
    root_v_true = np.sqrt(build_v(beta).diag)
    z_crit = z_for_level(s.level)
    return [_replicate(s, beta, root_v_true, z_crit, r) for r in reps]


def run_scenario(s: Scenario, workers: int = 1) -> CoverageReport:
    """Run all replications of ``s`` and aggregate them.

    The result is identical for any ``workers`` value.
    """
    if workers <= 1:
        records = _run_chunk(s, range(1, s.n_reps + 1))
    else:
        bounds = np.linspace(1, s.n_reps + 1, min(workers * 4, s.n_reps) + 1).astype(int)
        chunks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [s] * len(chunks), chunks))
        records = [r for part in parts for r in part]
    records.sort(key=lambda r: r.rep)

    existing = [r for r in records if r.status is Status.CONVERGED]
    pair_covered = {p: 0 for p in s.contrast_pairs}
    for r in existing:
        for p, ok in zip(s.contrast_pairs, r.pair_covered):
            pair_covered[p] += int(ok)
    zs = [r.z for r in existing]
    return CoverageReport(
        scenario=s,
        n_existing=len(existing),
        n_nonexistent=sum(r.status is Status.NONEXISTENT for r in records),
        n_maxiter=sum(r.status is Status.MAXITER for r in records),
        pair_covered=pair_covered,
        coord_covered=sum(r.coord_covered for r in existing),
        z_first=np.array([z[0] for z in zs]),
        z_pooled=np.concatenate(zs) if zs else np.empty(0),
        trace=tuple(records),
    )


def _pct(x: float) -> str:
    return "NA" if math.isnan(x) else f"{100.0 * x:.1f}"


def export_table1(reports) -> str:
    """Coverage table with one row per (t, pair or ACP) and columns per L.

    For each L the coverage and nonexistence percentages sit side by side;
    max-iteration percentages and raw counts follow after all of them.
    """
    reports = list(reports)
    if not reports:
        raise GraphError("no reports to export")
    levels = {r.scenario.level for r in reports}
    if len(levels) != 1:
        raise GraphError("reports use different confidence levels")
    by_t: dict[int, dict] = {}
    for r in reports:
        cells = by_t.setdefault(r.scenario.t, {})
        key = r.scenario.l_spec
        if key in cells:
            raise GraphError(f"duplicate report for t={r.scenario.t}, {r.scenario.label}")
        cells[key] = r
    l_specs = sorted({r.scenario.l_spec for r in reports}, key=_l_sort_key)
    for t, cells in by_t.items():
        if set(cells) != set(l_specs):
            raise GraphError(f"t={t} is missing some L columns")
        if len({c.scenario.contrast_pairs for c in cells.values()}) != 1:
            raise GraphError(f"t={t} reports use different contrast pairs")

    labels = [_l_label(l) for l in l_specs]
    header = ["t", "pair"]
    for lab in labels:
        header += [f"cov_{lab}", f"nonexist_{lab}"]
    header += [f"maxiter_{lab}" for lab in labels]
    header += [f"n_existing_{lab}" for lab in labels]
    header += [f"n_reps_{lab}" for lab in labels]

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for t in sorted(by_t):
        cells = [by_t[t][l] for l in l_specs]
        rows = [(f"({i},{j})", lambda c, p=(i, j): c.pair_coverage[p]) for i, j in cells[0].scenario.contrast_pairs]
        rows.append(("ACP", lambda c: c.acp))
        for name, getter in rows:
            row = [t, name]
            for c in cells:
                row += [_pct(getter(c)), _pct(c.nonexistence_rate)]
            row += [_pct(c.maxiter_rate) for c in cells]
            row += [c.n_existing for c in cells]
            row += [c.n_reps for c in cells]
            w.writerow(row)
    return buf.getvalue()


def qq_csv(report: CoverageReport) -> str:
    """Sorted z-values against normal quantiles, first coordinate and pooled."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "l_spec", "sample", "normal_quantile", "z"])
    for name, z in (("first", report.z_first), ("pooled", report.z_pooled)):
        if z.size == 0:
            continue
        q, s = qq_points(z)
        for a, b in zip(q, s):
            w.writerow([report.scenario.t, report.scenario.label, name, f"{a:.6g}", f"{b:.6g}"])
    return buf.getvalue()
