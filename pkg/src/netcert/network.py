"""Source networks, marginal reduction, and the two inflations.

A network is a multiset of sources, each a set of parties.  Reducing to a
region keeps the intersection of every source with the region.  Two
inflations of a grouped network matter here:

* gamma: every source joining group 1 to group 2 is cut into independent
  halves;
* eta: group 1 is doubled.  Sources into groups 2 and 3 follow the copy,
  sources into group 4 stay with the original, internal sources are
  duplicated.

Both leave specific marginals identical to the base network, which is what
the certification chain consumes.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import StructureError, UnsupportedSource

GAMMA = "gamma"
ETA = "eta"


def prime(label: str) -> str:
    """Name of the copy of a party in the doubled inflation."""
    return f"{label}'"


@dataclass(frozen=True)
class Network:
    """Parties plus a multiset of sources (subsets of the parties)."""

    parties: frozenset[str]
    sources: tuple[frozenset[str], ...]

    @classmethod
    def make(cls, parties: Iterable[str], sources: Iterable[Iterable[str]]) -> "Network":
        party_set = frozenset(str(p) for p in parties)
        canon = []
        for src in sources:
            fs = frozenset(str(p) for p in src)
            if not fs:
                raise StructureError("empty source")
            if not fs <= party_set:
                raise StructureError(f"source {sorted(fs)} not within parties")
            canon.append(fs)
        canon.sort(key=lambda fs: (len(fs), sorted(fs)))
        return cls(parties=party_set, sources=tuple(canon))

    def source_multiset(self) -> Counter:
        return Counter(tuple(sorted(src)) for src in self.sources)


def complete_bipartite_network(parties: Iterable[str]) -> Network:
    """One two-party source for every pair of parties."""
    names = sorted(str(p) for p in parties)
    if len(names) < 2:
        raise StructureError("need at least two parties")
    pairs = [(names[i], names[j]) for i in range(len(names)) for j in range(i + 1, len(names))]
    return Network.make(names, pairs)


def reduce(net: Network, region: Iterable[str]) -> Network:
    """Marginal network on a region: intersect sources, drop empty ones."""
    reg = frozenset(str(p) for p in region)
    if not reg <= net.parties:
        raise StructureError(f"region {sorted(reg)} not within parties")
    kept = [src & reg for src in net.sources if src & reg]
    return Network.make(reg, kept)


def reduced_equal(
    net1: Network,
    region1: Iterable[str],
    net2: Network,
    region2: Iterable[str],
    bijection: Mapping[str, str] | None = None,
) -> bool:
    """Whether two marginal networks agree under a region bijection.

    ``bijection`` maps region1 names to region2 names; omitted entries map
    to themselves.  It must be one-to-one from region1 onto region2.
    """
    reg1 = frozenset(str(p) for p in region1)
    reg2 = frozenset(str(p) for p in region2)
    mapping = {p: p for p in reg1}
    if bijection:
        mapping.update({str(k): str(v) for k, v in bijection.items() if str(k) in reg1})
    image = set(mapping.values())
    if len(image) != len(reg1) or image != reg2:
        raise StructureError("relabeling is not a bijection between the regions")
    r1 = reduce(net1, reg1)
    r2 = reduce(net2, reg2)
    mapped = Counter(tuple(sorted(mapping[p] for p in src)) for src in r1.sources)
    return mapped == r2.source_multiset()


@dataclass(frozen=True)
class GroupedNetwork:
    """A network plus a partition of its parties into four groups."""

    base: Network
    g1: frozenset[str]
    g2: frozenset[str]
    g3: frozenset[str]
    g4: frozenset[str]

    @classmethod
    def make(
        cls,
        base: Network,
        groups: Sequence[Iterable[str]],
    ) -> "GroupedNetwork":
        if len(groups) != 4:
            raise StructureError("need exactly four groups")
        sets = [frozenset(str(p) for p in grp) for grp in groups]
        union: set[str] = set()
        total = 0
        for s in sets:
            union |= s
            total += len(s)
        if union != set(base.parties) or total != len(base.parties):
            raise StructureError("groups must partition the parties")
        return cls(base, *sets)

    @property
    def groups(self) -> tuple[frozenset[str], ...]:
        return (self.g1, self.g2, self.g3, self.g4)


@dataclass(frozen=True)
class InflationSpec:
    """Which inflation to build, of which grouped network.

    ``relabeling`` records copy-name -> original-name for the doubled
    parties (empty for the cut inflation).
    """

    kind: str
    grouping: GroupedNetwork
    relabeling: tuple[tuple[str, str], ...]

    @classmethod
    def make(cls, kind: str, grouping: GroupedNetwork) -> "InflationSpec":
        if kind not in (GAMMA, ETA):
            raise StructureError(f"unknown inflation kind {kind!r}")
        relabeling: tuple[tuple[str, str], ...] = ()
        if kind == ETA:
            relabeling = tuple(sorted((prime(p), p) for p in grouping.g1))
        return cls(kind=kind, grouping=grouping, relabeling=relabeling)


def _classify(src: frozenset[str], grouping: GroupedNetwork) -> tuple[frozenset[str], ...]:
    return tuple(src & g for g in grouping.groups)


def build_inflation(spec: InflationSpec) -> Network:
    """Materialize the inflated network described by the spec."""
    grouping = spec.grouping
    base = grouping.base
    if spec.kind == GAMMA:
        parties = set(base.parties)
        sources: list[frozenset[str]] = []
        for src in base.sources:
            in1, in2, _, _ = _classify(src, grouping)
            if in1 and in2:
                if len(src) > 2:
                    raise UnsupportedSource(
                        f"source {sorted(src)} joins groups 1 and 2 and is not bipartite"
                    )
                sources.extend(frozenset([p]) for p in sorted(src))
            else:
                sources.append(src)
        return Network.make(parties, sources)

    if spec.kind != ETA:
        raise StructureError(f"unknown inflation kind {spec.kind!r}")
    parties = set(base.parties) | {prime(p) for p in grouping.g1}
    sources = []
    for src in base.sources:
        in1 = src & grouping.g1
        if not in1:
            sources.append(src)
            continue
        if src <= grouping.g1:
            sources.append(src)
            sources.append(frozenset(prime(p) for p in src))
            continue
        if len(src) > 2:
            raise UnsupportedSource(
                f"source {sorted(src)} leaves group 1 and is not bipartite"
            )
        (u,) = sorted(in1)
        (v,) = sorted(src - in1)
        if v in grouping.g4:
            sources.append(src)
            sources.append(frozenset([prime(u)]))
        else:
            sources.append(frozenset([prime(u), v]))
            sources.append(frozenset([u]))
    return Network.make(parties, sources)


def marginal_chain_checks(
    parties: Iterable[str],
    groups: Sequence[Iterable[str]],
    support1: Iterable[str],
    support2: Iterable[str],
    support3: Iterable[str],
    support4: Iterable[str],
    relabel4: Mapping[str, str],
) -> list[tuple[str, bool]]:
    """The four marginal equalities behind an incompatibility certificate.

    The first two operators see the same sources in the base network and
    its cut inflation; the third sees the same in the cut and doubled
    inflations; the fourth, after renaming doubled parties, sees the same
    in the doubled inflation and the base network.
    """
    base = complete_bipartite_network(parties)
    grouping = GroupedNetwork.make(base, groups)
    gamma_net = build_inflation(InflationSpec.make(GAMMA, grouping))
    eta_net = build_inflation(InflationSpec.make(ETA, grouping))
    supp1 = frozenset(str(p) for p in support1)
    supp2 = frozenset(str(p) for p in support2)
    supp3 = frozenset(str(p) for p in support3)
    supp4 = frozenset(str(p) for p in support4)
    sigma = {str(k): str(v) for k, v in relabel4.items()}
    region4 = frozenset(sigma.get(p, p) for p in supp4)
    checks = [
        ("S1 base vs cut", reduced_equal(base, supp1, gamma_net, supp1)),
        ("S2 base vs cut", reduced_equal(base, supp2, gamma_net, supp2)),
        ("S3 cut vs doubled", reduced_equal(gamma_net, supp3, eta_net, supp3)),
        (
            "S4 base vs doubled",
            reduced_equal(base, supp4, eta_net, region4, bijection=sigma),
        ),
    ]
    return checks
