"""Stabilizer operators of graph states and GHZ states.

Graph-state generators are g_i = X at vertex i times Z^{m_ij} at every
neighbor j; they commute exactly (including phases) and generate an
abelian group of order d^n whose joint +1 eigenspace is the graph state.
The GHZ stabilizer group on three parties is parametrized by exponent
triples (a, b, c).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .errors import RangeError, StructureError
from .multigraph import Multigraph
from .pauli import PauliOperator, identity, multiply, power

GHZ_PARTIES = ("A", "B", "C")


@dataclass(frozen=True)
class StabilizerWord:
    """A stabilizer-group element together with how it was generated.

    ``factorization`` lists (vertex-label, exponent) pairs, exponents in
    [1, d); the operator equals the product of the corresponding generator
    powers (order irrelevant: generators commute exactly).
    """

    operator: PauliOperator
    factorization: tuple[tuple[str, int], ...]


def _vertex_labels(g: Multigraph, labels: Sequence[str] | None) -> list[str]:
    if labels is None:
        return [str(v) for v in range(g.n)]
    out = [str(x) for x in labels]
    if len(out) != g.n or len(set(out)) != g.n:
        raise StructureError(f"need {g.n} distinct labels, got {labels!r}")
    return out


def graph_generator(g: Multigraph, i: int, labels: Sequence[str] | None = None) -> PauliOperator:
    """The generator at vertex i: X there, Z^{m_ij} at each neighbor j."""
    if not 0 <= i < g.n:
        raise StructureError(f"vertex {i} outside 0..{g.n - 1}")
    names = _vertex_labels(g, labels)
    sites: dict[str, tuple[int, int]] = {names[i]: (1, 0)}
    for j in range(g.n):
        if g.mult[i][j]:
            sites[names[j]] = (0, g.mult[i][j])
    return PauliOperator.from_sites(g.d, sites)


def word(
    g: Multigraph,
    exponents: Mapping[int, int],
    labels: Sequence[str] | None = None,
) -> StabilizerWord:
    """Product of generator powers, one per vertex, in ascending vertex order."""
    names = _vertex_labels(g, labels)
    op = identity(g.d)
    factors = []
    for v in sorted(exponents):
        if not 0 <= v < g.n:
            raise StructureError(f"vertex {v} outside 0..{g.n - 1}")
        e = exponents[v] % g.d
        if e == 0:
            continue
        op = multiply(op, power(graph_generator(g, v, names), e))
        factors.append((names[v], e))
    return StabilizerWord(operator=op, factorization=tuple(factors))


def ghz_stabilizer_element(
    d: int, a: int, b: int, c: int, labels: Sequence[str] = GHZ_PARTIES
) -> PauliOperator:
    """The GHZ stabilizer S_abc = Z^a X^c (x) Z^{b-a} X^c (x) Z^{-b} X^c.

    The per-site reorder phases cancel exactly, so the stored phase is 0.
    Exponents must already lie in [0, d).
    """
    for name, value in (("a", a), ("b", b), ("c", c)):
        if not 0 <= value < d:
            raise RangeError(f"exponent {name}={value} outside 0..{d - 1}")
    la, lb, lc = (str(x) for x in labels)
    return PauliOperator.from_sites(
        d, {la: (c, a), lb: (c, (b - a) % d), lc: (c, (-b) % d)}
    )


def ghz_group(d: int, labels: Sequence[str] = GHZ_PARTIES) -> Iterator[PauliOperator]:
    """All d^3 GHZ stabilizer elements, in lexicographic (a, b, c) order."""
    for a in range(d):
        for b in range(d):
            for c in range(d):
                yield ghz_stabilizer_element(d, a, b, c, labels)
