"""Weighted interaction graphs, edge colorings into matchings, and the
decomposition of a weighted graph into threshold levels.

A proper edge coloring partitions the edge set into matchings; the least
number of matchings needed is the chromatic index, which by Vizing's
theorem is either the maximum degree or one more.  ``chromatic_index_exact``
decides which by backtracking, ``edge_color_vizing`` is the constructive
max-degree-plus-one fallback, and ``level_decompose`` slices a weighted
graph at its distinct edge weights so that the weighted sum of per-level
indices equals the integral of the chromatic index over the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BadParams, TooLarge

EXACT_SEARCH_CAP = 64   # max edge count for the backtracking search
WEIGHT_MERGE_TOL = 1e-12  # edge weights closer than this share one level

__all__ = [
    "EXACT_SEARCH_CAP",
    "ChromaticIndexResult",
    "EdgeColoring",
    "Level",
    "LevelDecomposition",
    "WeightedGraph",
    "chromatic_index_exact",
    "edge_color_vizing",
    "level_decompose",
    "threshold_subgraph",
]


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph on vertices 0..n-1 with strictly positive edge weights."""

    n_vertices: int
    edges: tuple = ()

    def __post_init__(self):
        if self.n_vertices < 1:
            raise BadParams("graph needs at least one vertex")
        norm = []
        seen = set()
        for e in self.edges:
            k, l, w = int(e[0]), int(e[1]), float(e[2])
            if not 0 <= k < l < self.n_vertices:
                raise BadParams(f"edge ({k},{l}) violates 0 <= k < l < {self.n_vertices}")
            if (k, l) in seen:
                raise BadParams(f"duplicate edge ({k},{l})")
            if not w > 0.0:
                raise BadParams(f"edge ({k},{l}) has non-positive weight {w}")
            seen.add((k, l))
            norm.append((k, l, w))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def pairs(self):
        return tuple((k, l) for k, l, _ in self.edges)

    def degrees(self):
        deg = [0] * self.n_vertices
        for k, l, _ in self.edges:
            deg[k] += 1
            deg[l] += 1
        return deg

    def max_degree(self) -> int:
        return max(self.degrees(), default=0) if self.edges else 0


@dataclass(frozen=True)
class EdgeColoring:
    """Partition of an edge set into matchings (the color classes)."""

    classes: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self,
            "classes",
            tuple(tuple(tuple(map(int, p)) for p in cls) for cls in self.classes),
        )

    def n_classes(self) -> int:
        return len(self.classes)

    def all_pairs(self):
        return tuple(p for cls in self.classes for p in cls)

    def is_valid_for(self, g: WeightedGraph) -> bool:
        """Every graph edge in exactly one class, classes vertex-disjoint."""
        covered = sorted(self.all_pairs())
        if covered != sorted(g.pairs):
            return False
        for cls in self.classes:
            touched = set()
            for k, l in cls:
                if k in touched or l in touched:
                    return False
                touched.update((k, l))
        return True

    def restricted_to(self, pairs) -> "EdgeColoring":
        keep = set(tuple(p) for p in pairs)
        classes = []
        for cls in self.classes:
            sub = tuple(p for p in cls if p in keep)
            if sub:
                classes.append(sub)
        return EdgeColoring(tuple(classes))


@dataclass(frozen=True)
class ChromaticIndexResult:
    index: int
    coloring: EdgeColoring
    exact: bool = True


@dataclass(frozen=True)
class Level:
    """One threshold slice: the subgraph of edges with weight >= threshold."""

    threshold: float
    chromatic_index: int
    coloring: EdgeColoring
    exact: bool


@dataclass(frozen=True)
class LevelDecomposition:
    levels: tuple = field(default=())

    def thresholds(self):
        return tuple(lv.threshold for lv in self.levels)

    def weighted_sum(self) -> float:
        """Sum of chromatic_index * (r_j - r_{j-1}) over levels, r_0 = 0."""
        total = 0.0
        prev = 0.0
        for lv in self.levels:
            total += lv.chromatic_index * (lv.threshold - prev)
            prev = lv.threshold
        return total


def threshold_subgraph(g: WeightedGraph, r: float) -> WeightedGraph:
    """Subgraph keeping exactly the edges with weight strictly above ``r``."""
    if r < 0:
        raise BadParams("threshold must be non-negative")
    return WeightedGraph(g.n_vertices, tuple(e for e in g.edges if e[2] > r))


def _search_edge_coloring(n_vertices, order, k):
    """Backtracking search for a proper k-edge-coloring of ``order``.

    Colors are tried lowest-first and capped at one above the highest color
    used so far, which breaks color-permutation symmetry without losing
    completeness.  Returns the color list or None.
    """
    m = len(order)
    colors = [-1] * m
    used = [0] * n_vertices
    full = (1 << k) - 1

    def rec(i, high):
        if i == m:
            return True
        u, v = order[i]
        avail = full & ~(used[u] | used[v])
        limit = min(k - 1, high + 1)
        c = 0
        while c <= limit:
            if (avail >> c) & 1:
                bit = 1 << c
                colors[i] = c
                used[u] |= bit
                used[v] |= bit
                if rec(i + 1, c if c > high else high):
                    return True
                used[u] &= ~bit
                used[v] &= ~bit
            c += 1
        colors[i] = -1
        return False

    return colors if rec(0, -1) else None


def _coloring_from_assignment(order, colors, k):
    classes = [[] for _ in range(k)]
    for pair, c in zip(order, colors):
        classes[c].append(pair)
    return EdgeColoring(tuple(tuple(sorted(cls)) for cls in classes if cls))


def chromatic_index_exact(g: WeightedGraph, max_edges: int = EXACT_SEARCH_CAP) -> ChromaticIndexResult:
    """Exact chromatic index with a witnessing coloring.

    Decides max-degree colorability by backtracking (edges ordered by
    descending degree sum); by Vizing's theorem the answer is the max
    degree or one more.  Raises ``TooLarge`` beyond ``max_edges`` edges.
    """
    pairs = g.pairs
    m = len(pairs)
    if m == 0:
        return ChromaticIndexResult(0, EdgeColoring(()), True)
    if m > max_edges:
        raise TooLarge(f"{m} edges exceed the exact-search cap {max_edges}")
    deg = g.degrees()
    delta = max(deg)
    order = sorted(pairs, key=lambda e: (-(deg[e[0]] + deg[e[1]]), e))

    # A color class is a matching, so it covers at most half the touched vertices.
    active = sum(1 for d in deg if d > 0)
    colors = None
    if m <= delta * (active // 2):
        colors = _search_edge_coloring(g.n_vertices, order, delta)
    if colors is not None:
        return ChromaticIndexResult(delta, _coloring_from_assignment(order, colors, delta), True)
    colors = _search_edge_coloring(g.n_vertices, order, delta + 1)
    if colors is None:  # impossible by Vizing's theorem
        raise RuntimeError("no (max_degree + 1)-edge-coloring found; this is a bug")
    return ChromaticIndexResult(delta + 1, _coloring_from_assignment(order, colors, delta + 1), True)


def edge_color_vizing(g: WeightedGraph) -> EdgeColoring:
    """Proper edge coloring with at most max_degree + 1 classes (Misra-Gries).

    Deterministic: edges are processed in lexicographic order and the
    lowest admissible color always wins.
    """
    pairs = sorted(g.pairs)
    if not pairs:
        return EdgeColoring(())
    deg = g.degrees()
    n_colors = max(deg) + 1
    colour = {}
    incident = [dict() for _ in range(g.n_vertices)]  # vertex -> {color: neighbor}

    def key(a, b):
        return (a, b) if a < b else (b, a)

    def assign(a, b, c):
        old = colour.get(key(a, b))
        if old is not None:
            del incident[a][old]
            del incident[b][old]
        colour[key(a, b)] = c
        incident[a][c] = b
        incident[b][c] = a

    def unassign(a, b):
        old = colour.pop(key(a, b), None)
        if old is not None:
            del incident[a][old]
            del incident[b][old]

    def is_free(v, c):
        return c not in incident[v]

    def lowest_free(v):
        for c in range(1, n_colors + 1):
            if c not in incident[v]:
                return c
        raise RuntimeError("vertex saturated beyond max degree; this is a bug")

    for u, v in pairs:
        fan = [v]
        in_fan = {v}
        while True:
            nxt = None
            for c in sorted(incident[u]):
                w = incident[u][c]
                if w not in in_fan and is_free(fan[-1], c):
                    nxt = w
                    break
            if nxt is None:
                break
            fan.append(nxt)
            in_fan.add(nxt)

        c = lowest_free(u)
        d = lowest_free(fan[-1])

        if not is_free(u, d):
            # invert the alternating d/c path that starts at u
            path = [u]
            want = d
            while want in incident[path[-1]]:
                nxt = incident[path[-1]][want]
                path.append(nxt)
                want = c if want == d else d
            path_edges = [(path[i], path[i + 1]) for i in range(len(path) - 1)]
            olds = [colour[key(a, b)] for a, b in path_edges]
            for a, b in path_edges:
                unassign(a, b)
            for (a, b), old in zip(path_edges, olds):
                assign(a, b, c if old == d else d)

        # first fan vertex with d free whose prefix is still a fan
        w_idx = None
        for idx in range(len(fan)):
            if idx > 0:
                cc = colour.get(key(u, fan[idx]))
                if cc is None or not is_free(fan[idx - 1], cc):
                    break
            if is_free(fan[idx], d):
                w_idx = idx
                break
        if w_idx is None:  # excluded by the Misra-Gries invariant
            raise RuntimeError("fan rotation target not found; this is a bug")

        for i in range(w_idx):
            moved = colour[key(u, fan[i + 1])]
            unassign(u, fan[i + 1])
            assign(u, fan[i], moved)
        assign(u, fan[w_idx], d)

    classes = [[] for _ in range(n_colors)]
    for (a, b), c in colour.items():
        classes[c - 1].append((a, b))
    return EdgeColoring(tuple(tuple(sorted(cls)) for cls in classes if cls))


def level_decompose(g: WeightedGraph, exact_cap: int = EXACT_SEARCH_CAP) -> LevelDecomposition:
    """Slice ``g`` at its distinct edge weights, ascending.

    Level j is the subgraph of edges with weight >= r_j, colored exactly
    when it fits under ``exact_cap`` and by Misra-Gries otherwise.  Weights
    within ``WEIGHT_MERGE_TOL`` of each other share a level (threshold =
    their maximum).  Per-level indices are forced non-increasing: a larger
    fallback coloring is replaced by the previous level's coloring
    restricted to the smaller edge set.
    """
    if not g.edges:
        return LevelDecomposition(())
    ordered = sorted(g.edges, key=lambda e: e[2])
    clusters = [[ordered[0]]]
    for e in ordered[1:]:
        if e[2] - clusters[-1][-1][2] < WEIGHT_MERGE_TOL:
            clusters[-1].append(e)
        else:
            clusters.append([e])

    levels = []
    for j in range(len(clusters)):
        level_edges = tuple(e for cl in clusters[j:] for e in cl)
        sub = WeightedGraph(g.n_vertices, level_edges)
        threshold = max(e[2] for e in clusters[j])
        if len(level_edges) <= exact_cap:
            res = chromatic_index_exact(sub, max_edges=exact_cap)
            n_j, coloring, exact = res.index, res.coloring, True
        else:
            coloring = edge_color_vizing(sub)
            n_j, exact = coloring.n_classes(), False
        if levels and n_j > levels[-1].chromatic_index:
            coloring = levels[-1].coloring.restricted_to(sub.pairs)
            n_j, exact = coloring.n_classes(), False
        levels.append(Level(threshold, n_j, coloring, exact))
    return LevelDecomposition(tuple(levels))
