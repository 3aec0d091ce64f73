"""Fidelity ceilings for GHZ states in bipartite-source networks.

Three bounds of increasing sharpness and cost:

* ``ghz_closed_form_bound``: the certificate-chain bound
  (7 + sqrt(4 + 5 sin theta_d)) / 10, theta_d = 0 for even d and
  pi/(2d) for odd d;
* ``ghz_prime_bound``: for prime d, the self-consistent bound obtained by
  feeding the fidelity floor back into the stabilizer expectations;
* ``ghz_numeric_bound``: a certified numeric bound.  The full stabilizer
  group is relaxed to a finite constraint system (one variable per
  +/- conjugation class) whose infeasibility above a fidelity f is proven
  by interval branch-and-bound; bisection then returns the smallest f
  whose feasibility cannot be established, a sound upper bound.

``ghz_section3_chain`` assembles the explicit three-party certificate
chain behind the closed form, with all premises checked.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .certify import fidelity_bound_from_lambda, select_power_t
from .errors import DimensionError, RangeError, StructureError, Unconverged, WrongFamily
from .network import marginal_chain_checks
from .pauli import PauliOperator, commutation_phase, multiply, power, relabel, support
from .stabilizer import ghz_stabilizer_element

_GHZ_PARTIES = ("A", "B", "C")
_NUMERIC_RANGE = (2, 8)
_F_TOL = 1e-4
_BLOCK_GAP = 0.002
_CELL_BUDGET = 150_000
_MAX_BISECTIONS = 64


def theta_d(d: int) -> float:
    """Residual twist angle: zero for even d, pi/(2d) for odd d."""
    if d < 2:
        raise DimensionError(f"qudit dimension must be >= 2, got {d}")
    return 0.0 if d % 2 == 0 else math.pi / (2 * d)


def ghz_closed_form_bound(d: int) -> float:
    """Certificate-chain fidelity ceiling for the d-level GHZ state."""
    return fidelity_bound_from_lambda(2.0 * math.sin(theta_d(d)))


def is_prime(d: int) -> bool:
    if d < 2:
        return False
    if d < 4:
        return True
    if d % 2 == 0:
        return False
    f = 3
    while f * f <= d:
        if d % f == 0:
            return False
        f += 2
    return True


def ghz_prime_bound(d: int, tol: float = 1e-9) -> float:
    """Self-consistent fidelity ceiling, valid for prime d.

    Largest f in [3/4, 1] with
    f <= (d^2 + (d^3 - d^2) sqrt(1 + sin theta_d - (4f - 3)^2)) / d^3;
    the right side minus f is strictly decreasing, so bisection applies.
    """
    if not is_prime(d):
        raise WrongFamily(f"{d} is not prime")
    s = math.sin(theta_d(d))

    def residual(f: float) -> float:
        inner = 1.0 + s - (4.0 * f - 3.0) ** 2
        rhs = (d * d + (d**3 - d * d) * math.sqrt(max(0.0, inner))) / d**3
        return rhs - f

    lo, hi = 0.75, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if residual(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


@dataclass(frozen=True)
class GhzChainRecord:
    """The explicit three-party certificate chain and its premises."""

    d: int
    stabilizers: tuple[PauliOperator, PauliOperator, PauliOperator, PauliOperator]
    s4_relabeled: PauliOperator
    t_power: int
    premises: tuple[tuple[str, bool], ...]
    kappa: int
    sin_theta: float
    bound: float

    @property
    def all_premises_hold(self) -> bool:
        return all(ok for _, ok in self.premises)


def ghz_section3_chain(d: int) -> GhzChainRecord:
    """Build and check the GHZ incompatibility chain on a triangle network.

    S1 = Z_B Z_A^dag, S2 = Z_A Z_C^dag, S3 = S1 S2 = Z_B Z_C^dag and
    S4 = (X_A X_B X_C)^t with t = floor(d/2); the C leg of S4 is moved to
    the doubled copy C'.
    """
    if d < 2:
        raise DimensionError(f"qudit dimension must be >= 2, got {d}")
    s1 = ghz_stabilizer_element(d, d - 1, 0, 0)
    s2 = ghz_stabilizer_element(d, 1, 1, 0)
    s3 = ghz_stabilizer_element(d, 0, 1, 0)
    if multiply(s1, s2) != s3:
        raise StructureError("chain bug: S3 is not exactly S1 S2")
    choice = select_power_t(1, d)
    t = choice.t
    s4 = ghz_stabilizer_element(d, 0, 0, t)
    if power(ghz_stabilizer_element(d, 0, 0, 1), t) != s4:
        raise StructureError("chain bug: S4 is not the t-th power")
    sigma = {"C": "C'"}
    s4p = relabel(s4, sigma)
    kappa = commutation_phase(s3, s4p) % d
    groups = (frozenset({"C"}), frozenset({"B"}), frozenset({"A"}), frozenset())
    premises = tuple(
        marginal_chain_checks(
            _GHZ_PARTIES,
            groups,
            support(s1),
            support(s2),
            support(s3),
            support(s4),
            sigma,
        )
    )
    if kappa == 0:
        raise StructureError("chain bug: S3 and relabeled S4 commute")
    sin_theta = math.sin(theta_d(d))
    lam = 2.0 * choice.cos_value
    if abs(lam - 2.0 * abs(math.cos(math.pi * kappa / d))) > 1e-12:
        raise StructureError("chain bug: twist angle mismatch")
    bound = fidelity_bound_from_lambda(lam)
    if bound != ghz_closed_form_bound(d):
        raise StructureError("chain bug: bound disagrees with the closed form")
    return GhzChainRecord(
        d=d,
        stabilizers=(s1, s2, s3, s4),
        s4_relabeled=s4p,
        t_power=t,
        premises=premises,
        kappa=kappa,
        sin_theta=sin_theta,
        bound=bound,
    )


@dataclass(frozen=True)
class BoundReport:
    """All ceilings for one dimension, plus numeric-solver diagnostics."""

    d: int
    bound_closed_form: float
    bound_prime: float | None
    bound_numeric: float | None
    constraints_active: tuple[str, ...] = ()
    solver_trace: tuple[tuple[float, bool, int], ...] = ()


def _pm_classes(d: int) -> list[tuple[tuple[int, int, int], int]]:
    """Nonzero exponent triples up to sign, with class weights."""
    out = []
    for v in product(range(d), repeat=3):
        if v == (0, 0, 0):
            continue
        neg = tuple((-x) % d for x in v)
        if v <= neg:
            out.append((v, 1 if neg == v else 2))
    return out


def _min_sq(lo: float, hi: float) -> float:
    if lo <= 0.0 <= hi:
        return 0.0
    return min(lo * lo, hi * hi)


def _cap(k: float, h: float, hh: float) -> float:
    """Largest |<S>| compatible with twist k against floor h and modulus hh.

    Combines the twisted-pair phase constraint (via hh, the floor on the
    partner modulus) with the variance trade-off (via h, the floor on the
    partner real part); both are monotone, so evaluating at the floors
    upper-bounds every feasible point.
    """
    c1 = math.sqrt(max(0.0, 1.0 + k - hh * hh))
    if h <= k:
        c2 = 1.0
    else:
        c2 = k * h + math.sqrt(max(0.0, (1.0 - h * h) * (1.0 - k * k)))
    return min(1.0, c1, c2)


class _Block:
    """One partner index y: variables (p, q, r) and the classes it caps.

    p, q, r are the real stabilizer expectations for exponent triples
    (y,0,0), (0,y,0), (y,y,0); the coupled quantities h/hh floor the
    doubled-network correlators that the phase constraints consume.
    """

    def __init__(self, y: int, var_weight: int, cap_groups: dict[float, int]):
        self.y = y
        self.var_weight = var_weight
        self.cap_groups = sorted(cap_groups.items())

    def _floors(
        self, u: float, p_lo: float, q_lo: float, r_lo: float,
        p_sq: float, q_sq: float, r_sq: float,
    ) -> tuple[float, float, float, float]:
        h_yy = max(u, p_lo + q_lo - 1.5)
        hh_yy = max(h_yy, math.sqrt(max(0.0, p_sq + q_sq - 1.5)))
        h_0y = max(u, r_lo + p_lo - 1.5)
        hh_0y = max(h_0y, math.sqrt(max(0.0, r_sq + p_sq - 1.5)))
        return h_yy, hh_yy, h_0y, hh_0y

    def _cap_sum(self, floors: tuple[float, float, float, float]) -> float:
        h_yy, hh_yy, h_0y, hh_0y = floors
        total = 0.0
        for k, weight in self.cap_groups:
            total += weight * min(_cap(k, h_yy, hh_yy), _cap(k, h_0y, hh_0y))
        return total

    def value(self, u: float, p: float, q: float, r: float) -> float:
        floors = self._floors(u, p, q, r, p * p, q * q, r * r)
        return self.var_weight * (p + q + r) + self._cap_sum(floors)

    def box_bound(self, u: float, box: tuple[float, ...]) -> float:
        p1, p2, q1, q2, r1, r2 = box
        floors = self._floors(
            u, p1, q1, r1, _min_sq(p1, p2), _min_sq(q1, q2), _min_sq(r1, r2)
        )
        return self.var_weight * (p2 + q2 + r2) + self._cap_sum(floors)

    def maximize(
        self, u: float, gap: float, budget: int
    ) -> tuple[float, tuple[float, float, float], int]:
        """Certified maximum over the box: returns (upper bound, argbest, cells)."""
        p_lo = max(-1.0, u)
        if p_lo > 1.0:
            return -math.inf, (1.0, 1.0, 1.0), 0
        box0 = (p_lo, 1.0, -1.0, 1.0, -1.0, 1.0)

        def center(box: tuple[float, ...]) -> tuple[float, float, float]:
            return (
                (box[0] + box[1]) / 2,
                (box[2] + box[3]) / 2,
                (box[4] + box[5]) / 2,
            )

        best_pt = center(box0)
        best_lb = self.value(u, *best_pt)
        heap = [(-self.box_bound(u, box0), box0)]
        cells = 1
        while heap:
            neg_ub, box = heapq.heappop(heap)
            ub = -neg_ub
            if ub <= best_lb + gap or cells >= budget:
                return ub, best_pt, cells
            widths = (box[1] - box[0], box[3] - box[2], box[5] - box[4])
            axis = widths.index(max(widths))
            lo, hi = box[2 * axis], box[2 * axis + 1]
            mid = (lo + hi) / 2
            for piece in ((lo, mid), (mid, hi)):
                child = list(box)
                child[2 * axis], child[2 * axis + 1] = piece
                child_t = tuple(child)
                pt = center(child_t)
                val = self.value(u, *pt)
                if val > best_lb:
                    best_lb, best_pt = val, pt
                heapq.heappush(heap, (-self.box_bound(u, child_t), child_t))
                cells += 1
        return best_lb, best_pt, cells


def _build_blocks(d: int) -> tuple[list[_Block], float, dict[int, list[int]]]:
    """Blocks per partner index, plus the weight of unconstrained classes."""
    ys = list(range(1, d // 2 + 1))
    var_weight = {y: (1 if (2 * y) % d == 0 else 2) for y in ys}
    free_weight = 0.0
    cap_groups: dict[int, dict[float, int]] = {y: {} for y in ys}
    members: dict[int, list[int]] = {y: [] for y in ys}
    for (a, b, c), weight in _pm_classes(d):
        if c == 0:
            is_var = any(
                (a, b) in ((y, 0), (0, y), (y, y)) for y in ys
            )
            if not is_var:
                free_weight += weight
            continue
        choice = select_power_t(c, d)
        partner = min(choice.t, d - choice.t)
        groups = cap_groups[partner]
        groups[choice.cos_value] = groups.get(choice.cos_value, 0) + weight
        if c not in members[partner]:
            members[partner].append(c)
    blocks = [_Block(y, var_weight[y], cap_groups[y]) for y in ys]
    return blocks, free_weight, members


def ghz_numeric_bound(d: int) -> BoundReport:
    """Certified numeric fidelity ceiling for the d-level GHZ state, 2<=d<=8.

    Relaxation: one scalar per +/- class of stabilizer exponents, floored
    by the fidelity via <Re S> >= 4f - 3 on the class identified with its
    own doubled copy; twisted pairs across the doubling cap each |<S>| via
    the phase and variance constraints; correlator sums floor the doubled
    correlators.  If the relaxed objective cannot reach d^3 f, no network
    state has fidelity f.
    """
    lo_d, hi_d = _NUMERIC_RANGE
    if not lo_d <= d <= hi_d:
        raise RangeError(f"numeric bound implemented for {lo_d} <= d <= {hi_d}")
    blocks, free_weight, members = _build_blocks(d)
    target = float(d**3)

    def upper_bound(f: float) -> tuple[float, int, list[tuple[float, ...]]]:
        u = 4.0 * f - 3.0
        total = 1.0 + free_weight
        cells_used = 0
        points = []
        for block in blocks:
            val, pt, cells = block.maximize(u, _BLOCK_GAP, _CELL_BUDGET)
            total += val
            cells_used += cells
            points.append(pt)
        return total, cells_used, points

    def feasible(f: float) -> tuple[bool, int, list[tuple[float, ...]]]:
        total, cells, points = upper_bound(f)
        return total >= target * f - 1e-12, cells, points

    trace: list[tuple[float, bool, int]] = []
    ok, cells, _ = feasible(0.75)
    trace.append((0.75, ok, cells))
    if not ok:
        raise Unconverged("relaxation infeasible at f = 3/4; nothing to bisect")
    lo, hi = 0.75, 1.0
    iterations = 0
    while hi - lo > _F_TOL:
        if iterations >= _MAX_BISECTIONS:
            raise Unconverged(f"bisection stalled at [{lo}, {hi}]")
        mid = (lo + hi) / 2
        ok, cells, _ = feasible(mid)
        trace.append((mid, ok, cells))
        if ok:
            lo = mid
        else:
            hi = mid
        iterations += 1
    _, _, points = feasible(lo)
    active: set[str] = set()
    u_star = 4.0 * lo - 3.0
    for block, pt in zip(blocks, points):
        p, q, r = pt
        floors = block._floors(u_star, p, q, r, p * p, q * q, r * r)
        h_yy, hh_yy, h_0y, hh_0y = floors
        for c in members[block.y]:
            k = select_power_t(c, d).cos_value
            cap = min(_cap(k, h_yy, hh_yy), _cap(k, h_0y, hh_0y))
            if cap >= 1.0:
                active.add("unit")
                continue
            c1 = math.sqrt(max(0.0, 1.0 + k - min(hh_yy, hh_0y) ** 2))
            if cap == min(1.0, c1):
                active.add(f"phase(c={c},y={block.y})")
            else:
                active.add(f"uncert(c={c},y={block.y})")
    return BoundReport(
        d=d,
        bound_closed_form=ghz_closed_form_bound(d),
        bound_prime=ghz_prime_bound(d) if is_prime(d) else None,
        bound_numeric=hi,
        constraints_active=tuple(sorted(active)),
        solver_trace=tuple(trace),
    )


def bound_report(d: int, numeric: bool = True) -> BoundReport:
    """Best-effort report: closed form always, prime and numeric when defined."""
    if numeric and _NUMERIC_RANGE[0] <= d <= _NUMERIC_RANGE[1]:
        return ghz_numeric_bound(d)
    return BoundReport(
        d=d,
        bound_closed_form=ghz_closed_form_bound(d),
        bound_prime=ghz_prime_bound(d) if is_prime(d) else None,
        bound_numeric=None,
    )
