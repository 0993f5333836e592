"""Undirected simple graphs, degree sequences and beta-model sampling.

Vertex ids are 1-based throughout the public API so that output lines up with
the vertex numbering used in published tables. Internally arrays are 0-based.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np
from scipy.special import expit

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


class GraphError(ValueError):
    """Domain error for graph, degree and parameter inputs."""


class EdgeListParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class BetaVector:
    """Influence parameters, one finite real per vertex."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float).reshape(-1)
        if arr.size == 0:
            raise GraphError("beta vector must be non-empty")
        if not np.all(np.isfinite(arr)):
            raise GraphError("beta entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def t(self) -> int:
        return self.values.size

    @property
    def L(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, i: int) -> float:
        """1-based coordinate access."""
        return float(self.values[_index(i, self.t)])

    def __eq__(self, other):
        if not isinstance(other, BetaVector):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


@dataclass(frozen=True)
class DegreeSequence:
    values: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.values).reshape(-1)
        if raw.size < 1:
            raise GraphError("degree sequence must be non-empty")
        if raw.dtype.kind == "f":
            if not np.all(np.isfinite(raw)) or not np.all(raw == np.round(raw)):
                raise GraphError("degrees must be integers")
        elif raw.dtype.kind not in "iu":
            raise GraphError("degrees must be integers")
        arr = raw.astype(np.int64)
        t = arr.size
        if np.any(arr < 0) or np.any(arr > t - 1):
            raise GraphError(f"degrees must lie in [0, {t - 1}]")
        if int(arr.sum()) % 2:
            raise GraphError("degree sum must be even")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def t(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, i: int) -> int:
        return int(self.values[_index(i, self.t)])

    def __eq__(self, other):
        if not isinstance(other, DegreeSequence):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices 1..t.

    ``edges`` holds pairs ``(i, j)`` with ``i < j``. ``duplicates`` counts
    repeated edges dropped while parsing and does not take part in equality.
    """

    t: int
    edges: frozenset
    duplicates: int = field(default=0, compare=False)

    def __post_init__(self):
        if not isinstance(self.t, (int, np.integer)) or self.t < 2:
            raise GraphError("graph needs t >= 2 vertices")
        norm = set()
        for e in self.edges:
            i, j = (int(x) for x in e)
            if i == j:
                raise GraphError(f"self-loop at vertex {i}")
            if not (1 <= i <= self.t and 1 <= j <= self.t):
                raise GraphError(f"edge ({i}, {j}) outside 1..{self.t}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "t", int(self.t))
        object.__setattr__(self, "edges", frozenset(norm))

    def degree(self, i: int) -> int:
        _index(i, self.t)
        return sum(1 for e in self.edges if i in e)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.t, self.t), dtype=np.int8)
        if self.edges:
            idx = np.array(sorted(self.edges)) - 1
            a[idx[:, 0], idx[:, 1]] = 1
            a[idx[:, 1], idx[:, 0]] = 1
        return a


def _index(i, t: int) -> int:
    if isinstance(i, bool) or not isinstance(i, (int, np.integer)):
        raise GraphError(f"vertex id must be an integer, got {i!r}")
    if not 1 <= i <= t:
        raise GraphError(f"vertex id {i} outside 1..{t}")
    return int(i) - 1


def _logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def edge_probability(beta: BetaVector, i: int, j: int) -> float:
    """Probability that the edge {i, j} is present under ``beta``."""
    a, b = _index(i, beta.t), _index(j, beta.t)
    if a == b:
        raise GraphError("edge probability needs two distinct vertices")
    return _logistic(float(beta.values[a] + beta.values[b]))


def probability_matrix(beta) -> np.ndarray:
    """All edge probabilities as a t x t array with a zero diagonal."""
    b = beta.values if isinstance(beta, BetaVector) else np.asarray(beta, dtype=float)
    p = expit(b[:, None] + b[None, :])
    np.fill_diagonal(p, 0.0)
    return p


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer; uint64 arithmetic wraps modulo 2**64
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def pair_uniforms(seed: int, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Uniform(0, 1) draws keyed by ``(seed, i, j)``.

    Each draw depends only on the seed and the pair, never on how many other
    pairs are drawn or in which order.
    """
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise GraphError("seed must be an integer")
    s = np.uint64(int(seed) & _MASK64)
    code = (np.asarray(i, dtype=np.uint64) << np.uint64(32)) | np.asarray(j, dtype=np.uint64)
    h = _mix64(np.full(code.shape, s, dtype=np.uint64) + _GOLDEN)
    h = _mix64(h ^ (code * _GOLDEN))
    h = _mix64(h + _GOLDEN)
    return (h >> np.uint64(11)).astype(np.float64) * 2.0**-53


def sample_graph(beta: BetaVector, seed: int) -> Graph:
    t = beta.t
    if t < 2:
        raise GraphError("sampling needs t >= 2")
    iu, ju = np.triu_indices(t, k=1)
    p = expit(beta.values[iu] + beta.values[ju])
    keep = pair_uniforms(seed, iu + 1, ju + 1) < p
    edges = zip((iu[keep] + 1).tolist(), (ju[keep] + 1).tolist())
    return Graph(t, frozenset(edges))


def degree_sequence(g: Graph) -> DegreeSequence:
    d = np.zeros(g.t, dtype=np.int64)
    if g.edges:
        idx = np.array(list(g.edges), dtype=np.int64) - 1
        np.add.at(d, idx.ravel(), 1)
    return DegreeSequence(d)


def parse_edge_list(stream: TextIO | Iterable[str]) -> Graph:
    """Read a whitespace-separated edge list.

    Lines starting with ``#`` and blank lines are skipped. A line ``t=<n>``
    fixes the vertex count; otherwise the largest id seen is used.
    """
    t_fixed = None
    edges: set[tuple[int, int]] = set()
    duplicates = 0
    max_id = 0
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if s.replace(" ", "").startswith("t="):
            if t_fixed is not None or edges:
                raise EdgeListParseError(lineno, "t= directive must precede edges and appear once")
            try:
                t_fixed = int(s.replace(" ", "")[2:])
            except ValueError:
                raise EdgeListParseError(lineno, f"bad vertex count {s!r}") from None
            if t_fixed < 2:
                raise EdgeListParseError(lineno, "vertex count must be >= 2")
            continue
        tokens = s.split()
        if len(tokens) != 2:
            raise EdgeListParseError(lineno, f"expected two vertex ids, got {len(tokens)} tokens")
        try:
            i, j = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListParseError(lineno, f"non-integer token in {s!r}") from None
        if i < 1 or j < 1:
            raise EdgeListParseError(lineno, "vertex ids must be >= 1")
        if i == j:
            raise EdgeListParseError(lineno, f"self-loop at vertex {i}")
        if t_fixed is not None and max(i, j) > t_fixed:
            raise EdgeListParseError(lineno, f"vertex id {max(i, j)} exceeds t={t_fixed}")
        e = (min(i, j), max(i, j))
        if e in edges:
            duplicates += 1
            continue
        edges.add(e)
        max_id = max(max_id, e[1])
    t = t_fixed if t_fixed is not None else max_id
    if t < 2:
        raise GraphError("edge list defines fewer than 2 vertices")
    if duplicates:
        logger.warning("collapsed %d duplicate edge(s)", duplicates)
    return Graph(t, frozenset(edges), duplicates=duplicates)


def format_edge_list(g: Graph, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f"t={g.t}")
    lines.extend(f"{i} {j}" for i, j in sorted(g.edges))
    return "\n".join(lines) + "\n"


def parse_degrees(stream: TextIO | Iterable[str]) -> DegreeSequence:
    """One integer degree per non-comment line."""
    out = []
    for lineno, line in enumerate(stream, start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            out.append(int(s))
        except ValueError:
            raise EdgeListParseError(lineno, f"non-integer degree {s!r}") from None
    return DegreeSequence(np.array(out, dtype=np.int64))
