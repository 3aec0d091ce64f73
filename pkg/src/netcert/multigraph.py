"""Multigraphs with Z_d edge multiplicities.

A multigraph is a symmetric n x n matrix of multiplicities m_ij in
{0, ..., d-1} with zero diagonal; multiplicity 0 is the same thing as an
absent edge.  This module provides connectivity, the neighborhood
partition around a vertex triple, local complementation and its orbit,
canonical forms under vertex relabeling, and exhaustive enumeration of
connected multigraphs up to isomorphism.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionError, EnumerationOverflow, ResourceError, StructureError

#: Largest number of labeled multiplicity vectors an enumeration call will
#: examine unless the caller raises the budget explicitly.
DEFAULT_ENUMERATION_BUDGET = 2_000_000

#: canonical_form() scans all n! permutations; beyond this it refuses.
_CANONICAL_MAX_N = 8


@dataclass(frozen=True)
class Multigraph:
    """Immutable multigraph: dimension d, vertex count n, multiplicity matrix."""

    d: int
    n: int
    mult: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(cls, d: int, n: int, edges: Iterable[tuple[int, int, int]]) -> "Multigraph":
        """Build from (i, j, m) entries; vertices are 0-indexed."""
        if d < 2:
            raise DimensionError(f"qudit dimension must be >= 2, got {d}")
        if n < 2:
            raise StructureError(f"multigraph needs at least 2 vertices, got {n}")
        rows = [[0] * n for _ in range(n)]
        seen: set[tuple[int, int]] = set()
        for i, j, m in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise StructureError(f"edge ({i},{j}) outside vertex range 0..{n - 1}")
            if i == j:
                raise StructureError(f"self-loop at vertex {i} not allowed")
            pair = (min(i, j), max(i, j))
            if pair in seen:
                raise StructureError(f"duplicate edge entry for pair {pair}")
            seen.add(pair)
            m %= d
            rows[i][j] = m
            rows[j][i] = m
        return cls(d=d, n=n, mult=tuple(tuple(r) for r in rows))

    @classmethod
    def from_text(cls, text: str) -> "Multigraph":
        """Parse the line format: first line ``d n``, then ``i j m`` lines."""
        lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
        if not lines:
            raise StructureError("empty graph description")
        head = lines[0].split()
        if len(head) != 2:
            raise StructureError(f"first line must be 'd n', got {lines[0]!r}")
        try:
            d, n = int(head[0]), int(head[1])
        except ValueError as exc:
            raise StructureError(f"non-integer header {lines[0]!r}") from exc
        edges = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3:
                raise StructureError(f"edge line must be 'i j m', got {ln!r}")
            try:
                edges.append((int(parts[0]), int(parts[1]), int(parts[2])))
            except ValueError as exc:
                raise StructureError(f"non-integer edge line {ln!r}") from exc
        return cls.from_edges(d, n, edges)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "Multigraph":
        """Parse {"d": ..., "n": ..., "edges": [[i, j, m], ...]}."""
        try:
            d, n, edges = obj["d"], obj["n"], obj["edges"]
        except (TypeError, KeyError) as exc:
            raise StructureError(f"graph object needs keys d, n, edges: {obj!r}") from exc
        return cls.from_edges(int(d), int(n), [tuple(int(x) for x in e) for e in edges])

    def to_json_obj(self) -> dict:
        return {"d": self.d, "n": self.n, "edges": [list(e) for e in edges(self)]}

    def multiplicity(self, i: int, j: int) -> int:
        return self.mult[i][j]


def edges(g: Multigraph) -> list[tuple[int, int, int]]:
    """Nonzero (i, j, m) entries with i < j, in row-major order."""
    return [
        (i, j, g.mult[i][j])
        for i in range(g.n)
        for j in range(i + 1, g.n)
        if g.mult[i][j]
    ]


def neighbors(g: Multigraph, i: int) -> set[int]:
    """Vertices joined to i by a nonzero multiplicity."""
    return {j for j in range(g.n) if g.mult[i][j]}


def is_connected(g: Multigraph) -> bool:
    """Breadth-first reachability of every vertex from vertex 0."""
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in range(g.n):
            if g.mult[v][u] and u not in seen:
                seen.add(u)
                queue.append(u)
    return len(seen) == g.n


def permuted(g: Multigraph, perm: Sequence[int]) -> Multigraph:
    """Relabel vertices: old vertex i becomes perm[i]."""
    if sorted(perm) != list(range(g.n)):
        raise StructureError(f"not a permutation of 0..{g.n - 1}: {perm!r}")
    rows = [[0] * g.n for _ in range(g.n)]
    for i in range(g.n):
        for j in range(g.n):
            rows[perm[i]][perm[j]] = g.mult[i][j]
    return Multigraph(d=g.d, n=g.n, mult=tuple(tuple(r) for r in rows))


def _triu_vector(g: Multigraph) -> tuple[int, ...]:
    return tuple(g.mult[i][j] for i in range(g.n) for j in range(i + 1, g.n))


def canonical_form(g: Multigraph) -> tuple[int, ...]:
    """Lexicographically minimal upper-triangle vector over all relabelings.

    Two multigraphs are isomorphic iff their canonical forms agree.  Exact
    but factorial: refuses n > 8.
    """
    if g.n > _CANONICAL_MAX_N:
        raise ResourceError(f"canonical_form scans n! permutations; n={g.n} > {_CANONICAL_MAX_N}")
    import itertools

    best: tuple[int, ...] | None = None
    for perm in itertools.permutations(range(g.n)):
        vec = tuple(
            g.mult[perm[i]][perm[j]] for i in range(g.n) for j in range(i + 1, g.n)
        )
        if best is None or vec < best:
            best = vec
    assert best is not None
    return best


def from_triu_vector(d: int, n: int, vec: Sequence[int]) -> Multigraph:
    """Inverse of the upper-triangle flattening used by canonical_form."""
    if len(vec) != n * (n - 1) // 2:
        raise StructureError(f"expected {n * (n - 1) // 2} entries, got {len(vec)}")
    it = iter(vec)
    return Multigraph.from_edges(
        d, n, [(i, j, m) for i in range(n) for j in range(i + 1, n) if (m := next(it))]
    )


def canonicalize(g: Multigraph) -> Multigraph:
    """The canonical representative of g's isomorphism class."""
    return from_triu_vector(g.d, g.n, canonical_form(g))


def _pair_index(n: int) -> dict[tuple[int, int], int]:
    idx = {}
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            idx[(i, j)] = k
            k += 1
    return idx


def enumerate_connected_multigraphs(
    n: int, d: int, budget: int = DEFAULT_ENUMERATION_BUDGET
) -> Iterator[Multigraph]:
    """Stream one canonical representative per isomorphism class of connected
    multigraphs on n vertices with multiplicities mod d.

    A labeled multiplicity vector is emitted iff it is the lexicographic
    minimum of its relabeling orbit, so every class appears exactly once
    without any dedup storage.  Raises EnumerationOverflow (with progress
    counts) once more than ``budget`` labeled vectors would be examined.
    """
    if d < 2:
        raise DimensionError(f"qudit dimension must be >= 2, got {d}")
    if n < 2:
        raise StructureError(f"enumeration needs n >= 2, got {n}")
    if n > _CANONICAL_MAX_N:
        raise ResourceError(f"enumeration canonicalizes via n! scan; n={n} > {_CANONICAL_MAX_N}")
    import itertools

    ncols = n * (n - 1) // 2
    total = d**ncols
    if total >= 2**62:
        raise ResourceError(f"d^(n choose 2) = {total} does not fit packed 64-bit keys")

    # weights[k] makes the packed key of a row equal its row index.
    weights = np.array([d ** (ncols - 1 - k) for k in range(ncols)], dtype=np.int64)
    pidx = _pair_index(n)
    perms = list(itertools.permutations(range(n)))
    wmat = np.empty((ncols, len(perms)), dtype=np.int64)
    for p, perm in enumerate(perms):
        col = np.empty(ncols, dtype=np.int64)
        for (i, j), k in pidx.items():
            src = pidx[(min(perm[i], perm[j]), max(perm[i], perm[j]))]
            # relabeled vector reads position src of the original at position k
            col[src] = weights[k]
        wmat[:, p] = col

    chunk_rows = max(1024, min(262_144, 4_000_000 // len(perms)))
    examined = 0
    yielded = 0
    start = 0
    while start < total:
        stop = min(start + chunk_rows, total)
        if examined + (stop - start) > budget:
            stop = start + (budget - examined)
            if stop <= start:
                raise EnumerationOverflow(
                    f"enumeration budget {budget} exhausted for n={n}, d={d} "
                    f"({total} labeled vectors total)",
                    examined=examined,
                    yielded=yielded,
                )
        ids = np.arange(start, stop, dtype=np.int64)
        digits = (ids[:, None] // weights[None, :]) % d
        keys = digits @ wmat
        canonical = keys.min(axis=1) == ids
        for row in digits[canonical]:
            g = from_triu_vector(d, n, [int(x) for x in row])
            if is_connected(g):
                yielded += 1
                yield g
        examined += stop - start
        start = stop
        if examined >= budget and start < total:
            raise EnumerationOverflow(
                f"enumeration budget {budget} exhausted for n={n}, d={d} "
                f"({total} labeled vectors total)",
                examined=examined,
                yielded=yielded,
            )


@dataclass(frozen=True)
class NeighborhoodPartition:
    """The seven disjoint neighbor sets around an (A, B, C) triple.

    E_X holds vertices adjacent to X alone (among the triple), J_XY those
    adjacent to exactly X and Y, and T_ABC those adjacent to all three;
    ``far`` collects the vertices adjacent to none of the triple.  Together
    with {A, B, C} these sets partition the vertex set.
    """

    triple: tuple[int, int, int]
    kind: str  # "angle" or "triangle"
    e_a: frozenset[int]
    e_b: frozenset[int]
    e_c: frozenset[int]
    j_ab: frozenset[int]
    j_bc: frozenset[int]
    j_ca: frozenset[int]
    t_abc: frozenset[int]
    far: frozenset[int]


def find_angle_or_triangle(g: Multigraph) -> list[tuple[int, int, int, str]]:
    """All ordered triples (A, B, C) with edges AB and CA present.

    kind is "triangle" when the BC edge is present too, else "angle".
    Connected graphs with n >= 3 always admit at least one.
    """
    if g.n < 3:
        raise StructureError(f"need at least 3 vertices, got {g.n}")
    if not is_connected(g):
        raise StructureError("graph is not connected")
    found = []
    for a in range(g.n):
        for b in range(g.n):
            if b == a or not g.mult[a][b]:
                continue
            for c in range(g.n):
                if c in (a, b) or not g.mult[c][a]:
                    continue
                kind = "triangle" if g.mult[b][c] else "angle"
                found.append((a, b, c, kind))
    return found


def partition_neighborhoods(g: Multigraph, a: int, b: int, c: int) -> NeighborhoodPartition:
    """Split the remaining vertices by their adjacency pattern to (a, b, c)."""
    if len({a, b, c}) != 3 or not all(0 <= v < g.n for v in (a, b, c)):
        raise StructureError(f"invalid triple ({a}, {b}, {c})")
    if not (g.mult[a][b] and g.mult[c][a]):
        raise StructureError(f"triple ({a}, {b}, {c}) is missing edge AB or CA")
    kind = "triangle" if g.mult[b][c] else "angle"
    buckets: dict[tuple[bool, bool, bool], set[int]] = {}
    for v in range(g.n):
        if v in (a, b, c):
            continue
        pattern = (bool(g.mult[v][a]), bool(g.mult[v][b]), bool(g.mult[v][c]))
        buckets.setdefault(pattern, set()).add(v)

    def grab(pa: bool, pb: bool, pc: bool) -> frozenset[int]:
        return frozenset(buckets.get((pa, pb, pc), set()))

    return NeighborhoodPartition(
        triple=(a, b, c),
        kind=kind,
        e_a=grab(True, False, False),
        e_b=grab(False, True, False),
        e_c=grab(False, False, True),
        j_ab=grab(True, True, False),
        j_bc=grab(False, True, True),
        j_ca=grab(True, False, True),
        t_abc=grab(True, True, True),
        far=grab(False, False, False),
    )


def local_complement(g: Multigraph, a: int) -> Multigraph:
    """m_uv -> m_uv + m_au * m_av (mod d) for every pair u < v of neighbors of a."""
    if not 0 <= a < g.n:
        raise StructureError(f"vertex {a} outside 0..{g.n - 1}")
    nbrs = sorted(neighbors(g, a))
    rows = [list(r) for r in g.mult]
    for x in range(len(nbrs)):
        for y in range(x + 1, len(nbrs)):
            u, v = nbrs[x], nbrs[y]
            m = (rows[u][v] + g.mult[a][u] * g.mult[a][v]) % g.d
            rows[u][v] = m
            rows[v][u] = m
    return Multigraph(d=g.d, n=g.n, mult=tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class OrbitResult:
    """Closure of a graph under local complementation.

    ``graphs[i]`` is the first-seen member of the i-th isomorphism class
    discovered (``graphs[0]`` is the starting graph) and ``paths[i]`` is the
    vertex sequence whose successive local complementations take the
    starting graph to ``graphs[i]``.  ``truncated`` marks that the cap cut
    the search short and the closure may be larger.
    """

    graphs: tuple[Multigraph, ...]
    paths: tuple[tuple[int, ...], ...]
    keys: frozenset[tuple[int, ...]]
    truncated: bool

    @property
    def size(self) -> int:
        return len(self.graphs)


def lc_orbit(g: Multigraph, cap: int = 10**6) -> OrbitResult:
    """Breadth-first closure of g under local complementation at every vertex,
    deduplicated by canonical form, truncated (and flagged) at ``cap`` classes.
    """
    if cap < 1:
        raise StructureError(f"orbit cap must be positive, got {cap}")
    start_key = canonical_form(g)
    order: list[tuple[Multigraph, tuple[int, ...]]] = [(g, ())]
    seen: set[tuple[int, ...]] = {start_key}
    queue: deque[tuple[Multigraph, tuple[int, ...]]] = deque(order)
    truncated = False
    while queue and not truncated:
        graph, path = queue.popleft()
        for a in range(g.n):
            image = local_complement(graph, a)
            key = canonical_form(image)
            if key in seen:
                continue
            if len(seen) >= cap:
                truncated = True
                break
            seen.add(key)
            entry = (image, path + (a,))
            order.append(entry)
            queue.append(entry)
    return OrbitResult(
        graphs=tuple(item[0] for item in order),
        paths=tuple(item[1] for item in order),
        keys=frozenset(seen),
        truncated=truncated,
    )
