"""Blockade graphs and brute-force graph classification (N <= 8)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from .errors import AmbiguityError, ParameterError
from .geometry import AtomArrangement
from .validation import check_scalar

BOUNDARY_RTOL = 1e-9
EDGE_LENGTH_SPREAD = 0.01
MAX_CLASSIFY_VERTICES = 8


@dataclass(frozen=True)
class BlockadeGraph:
    """Undirected simple graph on vertices ``0..n_vertices-1`` (vertex j is atom label j+1).

    ``edge_length`` is the common edge distance (um) when every edge agrees
    within a 1% relative spread, else ``None``.
    """

    n_vertices: int
    edges: frozenset
    edge_length: float | None = None

    def __post_init__(self):
        n = int(self.n_vertices)
        if n < 0:
            raise ParameterError("n_vertices must be non-negative")
        norm = set()
        for e in self.edges:
            j, k = (int(v) for v in e)
            if j == k:
                raise ParameterError(f"self-loop on vertex {j}")
            if not (0 <= j < n and 0 <= k < n):
                raise ParameterError(f"edge {e} out of range for {n} vertices")
            norm.add((min(j, k), max(j, k)))
        object.__setattr__(self, "n_vertices", n)
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n_vertices: int, edges, edge_length=None) -> "BlockadeGraph":
        return cls(n_vertices, frozenset(tuple(e) for e in edges), edge_length)

    @property
    def degree(self) -> tuple[int, ...]:
        deg = [0] * self.n_vertices
        for j, k in self.edges:
            deg[j] += 1
            deg[k] += 1
        return tuple(deg)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, j: int) -> tuple[int, ...]:
        return tuple(sorted({k for e in self.edges if j in e for k in e if k != j}))

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n_vertices, self.n_vertices), dtype=bool)
        for j, k in self.edges:
            A[j, k] = A[k, j] = True
        return A

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def relabeled(self, order) -> "BlockadeGraph":
        """Graph after the atom relabeling used by ``AtomArrangement.permuted(order)``."""
        inv = {old: new for new, old in enumerate(order)}
        return BlockadeGraph(self.n_vertices, frozenset((inv[j], inv[k]) for j, k in self.edges),
                             self.edge_length)


def blockade_graph(arr: AtomArrangement, r_b: float) -> BlockadeGraph:
    """Edge (j, k) iff the pair distance is strictly below ``r_b``."""
    r_b = check_scalar(r_b, "r_b", min_val=0.0, include_min=False)
    edges = []
    lengths = []
    for (j, k), dist in arr.pair_distances().items():
        if abs(dist - r_b) <= BOUNDARY_RTOL * r_b:
            raise AmbiguityError(
                f"atoms {j + 1} and {k + 1} are {dist!r} um apart, on the blockade radius {r_b!r} um",
                pair=(j + 1, k + 1), distance=dist)
        if dist < r_b:
            edges.append((j, k))
            lengths.append(dist)
    edge_length = None
    if lengths:
        lo, hi, mean = min(lengths), max(lengths), float(np.mean(lengths))
        if (hi - lo) <= EDGE_LENGTH_SPREAD * mean:
            edge_length = mean
    return BlockadeGraph(arr.n_atoms, frozenset(edges), edge_length)


# -- classification -----------------------------------------------------

def _certificate(n: int, edges) -> int:
    """Lexicographically smallest upper-triangle adjacency bitstring over all relabelings."""
    pairs = list(combinations(range(n), 2))
    edge_set = {(min(e), max(e)) for e in edges}
    best = None
    for perm in permutations(range(n)):
        bits = 0
        for j, k in pairs:
            a, b = perm[j], perm[k]
            bits = (bits << 1) | ((min(a, b), max(a, b)) in edge_set)
        if best is None or bits < best:
            best = bits
    return best if best is not None else 0


def _template_edges(kind: str, n: int):
    if kind == "complete":
        return list(combinations(range(n), 2))
    if kind == "path":
        return [(i, i + 1) for i in range(n - 1)]
    if kind == "cycle" and n >= 3:
        return [(i, (i + 1) % n) for i in range(n)]
    if kind == "star" and n >= 2:
        return [(0, i) for i in range(1, n)]
    if kind == "diamond" and n == 4:
        return [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]
    return None


@lru_cache(maxsize=None)
def _templates(n: int):
    out = []
    for kind in ("complete", "cycle", "path", "star", "diamond"):
        edges = _template_edges(kind, n)
        if edges is None:
            continue
        tag = "diamond" if kind == "diamond" else f"{kind}_{n}"
        out.append((tag, len(edges), tuple(sorted(_degrees(n, edges))), _certificate(n, edges)))
    return tuple(out)


def _degrees(n, edges):
    deg = [0] * n
    for j, k in edges:
        deg[j] += 1
        deg[k] += 1
    return deg


def canonical_certificate(g: BlockadeGraph) -> str:
    n = g.n_vertices
    width = max(1, n * (n - 1) // 2)
    return f"{n}:{_certificate(n, g.edges):0{width}b}"


def classify_graph(g: BlockadeGraph) -> str:
    """Name the isomorphism class of ``g``.

    Returns ``path_N``, ``cycle_N``, ``star_N``, ``complete_N``, ``diamond`` or
    ``other:<certificate>``. Where names coincide (a triangle is both
    ``complete_3`` and ``cycle_3``) the first of complete, cycle, path, star wins.
    """
    n = g.n_vertices
    if not 1 <= n <= MAX_CLASSIFY_VERTICES:
        raise ParameterError(f"classify_graph supports 1..{MAX_CLASSIFY_VERTICES} vertices, got {n}")
    deg = tuple(sorted(g.degree))
    cert = None
    for tag, n_edges, tdeg, tcert in _templates(n):
        if n_edges != g.n_edges or tdeg != deg:
            continue
        if cert is None:
            cert = _certificate(n, g.edges)
        if cert == tcert:
            return tag
    return "other:" + canonical_certificate(g)
