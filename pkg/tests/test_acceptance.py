"""Acceptance suite: one test per release criterion, tolerances pinned inline.

Each test prints a single ``CRITERION k: PASS/FAIL`` line (visible with
``pytest -s``); the test name states the claim.  Time limits are asserted
with a monotonic clock.  The long-running table cells are guarded by the
NETCERT_STRETCH environment variable and report any straggler classes
explicitly instead of passing silently.
"""

import json
import math
import os
import time
from contextlib import contextmanager

import numpy as np
import pytest

from netcert import (
    Certificate,
    Multigraph,
    NotCertified,
    PauliOperator,
    certificate_from_json,
    certificate_to_json,
    certify_any,
    commutation_phase,
    dagger,
    enumerate_connected_multigraphs,
    exhaustive_table,
    ghz_closed_form_bound,
    ghz_numeric_bound,
    ghz_prime_bound,
    graph_generator,
    is_connected,
    lc_orbit,
    multiply,
    verify_obs3,
)
from netcert.oracle import ALL_LEMMA_CHECKS, build_graph_state, dense

UNIVERSAL_CAP = 0.954951


class _Info:
    detail = ""


@contextmanager
def criterion(num: int):
    info = _Info()
    try:
        yield info
    except BaseException:
        print(f"CRITERION {num}: FAIL" + (f" - {info.detail}" if info.detail else ""))
        raise
    print(f"CRITERION {num}: PASS - {info.detail}")


def random_connected(rng, n, d, p=0.55):
    while True:
        eds = [
            (i, j, int(rng.integers(1, d)))
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < p
        ]
        g = Multigraph.from_edges(d, n, eds)
        if is_connected(g):
            return g


# --------------------------------------------------------------------------
# 1. Every connected qubit graph on 3..6 vertices certifies at exactly 0.9.
# --------------------------------------------------------------------------


def test_criterion_01_qubit_graphs_all_certified_at_exactly_0_9():
    with criterion(1) as c:
        start = time.monotonic()
        counts = {}
        total = 0
        for n in (3, 4, 5, 6):
            graphs = list(enumerate_connected_multigraphs(n, 2))
            counts[n] = len(graphs)
            for g in graphs:
                cert = certify_any(g)
                assert isinstance(cert, Certificate), g.to_json_obj()
                assert cert.fidelity_bound == 0.9, g.to_json_obj()
            total += len(graphs)
        elapsed = time.monotonic() - start
        assert counts == {3: 2, 4: 6, 5: 21, 6: 112}
        assert total == 141
        assert elapsed < 60.0
        c.detail = f"141 qubit classes, every bound exactly 0.9, {elapsed:.1f}s"


# --------------------------------------------------------------------------
# 2. No certificate across the sampled matrix (d <= 9, n <= 6) ever exceeds
#    the universal ceiling 0.954951.
# --------------------------------------------------------------------------


def test_criterion_02_every_emitted_bound_below_universal_cap():
    with criterion(2) as c:
        rng = np.random.default_rng(20260818)
        bounds = []

        def collect(result):
            if isinstance(result, Certificate):
                bounds.append(result.fidelity_bound)

        for d in range(2, 10):
            for g in enumerate_connected_multigraphs(3, d):
                collect(certify_any(g, orbit_cap=64))
        for d in range(2, 6):
            for g in enumerate_connected_multigraphs(4, d):
                collect(certify_any(g, orbit_cap=64))
        for n in (4, 5, 6):
            for d in range(2, 10):
                for _ in range(25):
                    collect(certify_any(random_connected(rng, n, d), orbit_cap=64))
        assert len(bounds) > 1500
        worst = max(bounds)
        assert worst <= UNIVERSAL_CAP
        c.detail = f"{len(bounds)} certificates, max bound {worst:.9f} <= {UNIVERSAL_CAP}"


# --------------------------------------------------------------------------
# 3. Desk-scale exhaustive tables: every class certifies; stretch cells are
#    env-guarded and must name any stragglers.
# --------------------------------------------------------------------------

DESK_CELLS = [(3, 3), (4, 3), (3, 4), (4, 4), (3, 5), (4, 5), (3, 7), (4, 7)]
STRETCH_CELLS = [(5, 3, 2_000_000), (6, 3, 15_000_000), (5, 4, 2_000_000)]


def test_criterion_03_desk_scale_tables_fully_certified():
    with criterion(3) as c:
        summary = []
        for n, d in DESK_CELLS:
            start = time.monotonic()
            report = exhaustive_table(n, d)
            elapsed = time.monotonic() - start
            assert report.complete, (n, d)
            assert report.all_certified, (
                (n, d),
                [nc.graph.to_json_obj() for nc in report.uncertified],
            )
            assert elapsed < 600.0, (n, d, elapsed)
            summary.append(f"({n},{d})={report.total}")
        c.detail = "all certified: " + " ".join(summary)


@pytest.mark.skipif(
    not os.environ.get("NETCERT_STRETCH"),
    reason="stretch table cells take minutes; set NETCERT_STRETCH=1 to run",
)
def test_criterion_03_stretch_tables_report_stragglers():
    stragglers = []
    summary = []
    for n, d, budget in STRETCH_CELLS:
        report = exhaustive_table(n, d, budget=budget, workers=4)
        assert report.complete, (n, d)
        summary.append(f"({n},{d})={report.certified}/{report.total}")
        for nc in report.uncertified:
            stragglers.append((n, d, nc.graph.to_json_obj(), nc.reasons[-1]))
    print("stretch cells:", " ".join(summary))
    if stragglers:
        for n, d, graph, reason in stragglers:
            print(f"STRAGGLER (n={n}, d={d}): {json.dumps(graph)}  [{reason}]")
        pytest.fail(
            f"{len(stragglers)} class(es) not certified by the implemented "
            "constructions (listed above); the published tally expects zero"
        )
    print("CRITERION 3 (stretch): PASS - " + " ".join(summary))


# --------------------------------------------------------------------------
# 4. Prime dimensions: exhaustive three-vertex enumeration certifies every
#    class below the universal ceiling.
# --------------------------------------------------------------------------


def test_criterion_04_prime_dimensions_exhaustive_n3():
    with criterion(4) as c:
        start = time.monotonic()
        checked = 0
        for d in (3, 5, 7, 11, 13):
            for g in enumerate_connected_multigraphs(3, d):
                cert = certify_any(g)
                assert isinstance(cert, Certificate), g.to_json_obj()
                assert cert.fidelity_bound <= UNIVERSAL_CAP
                checked += 1
        elapsed = time.monotonic() - start
        assert elapsed < 300.0
        c.detail = f"{checked} classes over d in {{3,5,7,11,13}}, {elapsed:.1f}s"


# --------------------------------------------------------------------------
# 5. Negative control: the d=6 angle with multiplicities (3, 2) is refused
#    with the degenerate-product reason, and its orbit is a singleton.
# --------------------------------------------------------------------------


def test_criterion_05_negative_control_d6_angle():
    with criterion(5) as c:
        g = Multigraph.from_edges(6, 3, [(0, 1, 3), (0, 2, 2)])
        result = certify_any(g)
        assert isinstance(result, NotCertified)
        assert any("m_tilde" in r and "(mod 6)" in r for r in result.reasons)
        assert result.orbit_size == 1
        assert not result.orbit_truncated
        orbit = lc_orbit(g)
        assert orbit.size == 1 and not orbit.truncated
        c.detail = "refused with m_tilde = 0 (mod 6); orbit is the singleton {G}"


# --------------------------------------------------------------------------
# 6. GHZ closed-form ceilings round to the published three-decimal values.
# --------------------------------------------------------------------------


def test_criterion_06_ghz_closed_form_values():
    with criterion(6) as c:
        want = {2: 0.900, 3: 0.955, 4: 0.900, 5: 0.935}
        got = {d: round(ghz_closed_form_bound(d), 3) for d in want}
        assert got == want
        c.detail = "closed form rounds to " + ", ".join(
            f"d={d}: {v:.3f}" for d, v in got.items()
        )


# --------------------------------------------------------------------------
# 7. Prime self-consistent ceilings match the published values.
# --------------------------------------------------------------------------


def test_criterion_07_ghz_prime_bound_values():
    with criterion(7) as c:
        b2, b3, b5 = ghz_prime_bound(2), ghz_prime_bound(3), ghz_prime_bound(5)
        assert abs(b2 - 0.900) <= 1e-6
        assert abs(b3 - 0.951) <= 0.002
        assert abs(b5 - 0.925) <= 0.002
        c.detail = f"d=2: {b2:.6f}, d=3: {b3:.6f}, d=5: {b5:.6f}"


# --------------------------------------------------------------------------
# 8. Certified numeric GHZ ceilings: near the published values and never
#    above the coarser bounds.
# --------------------------------------------------------------------------


def test_criterion_08_ghz_numeric_bound_values():
    with criterion(8) as c:
        want = {2: 0.893, 3: 0.950, 4: 0.881, 5: 0.925}
        parts = []
        for d, target in want.items():
            start = time.monotonic()
            report = ghz_numeric_bound(d)
            elapsed = time.monotonic() - start
            got = report.bound_numeric
            assert abs(got - target) <= 0.01, (d, got)
            assert got <= report.bound_closed_form + 1e-12
            if report.bound_prime is not None:
                assert got <= report.bound_prime + 1e-12
            assert elapsed < 300.0, (d, elapsed)
            parts.append(f"d={d}: {got:.4f}")
        c.detail = "numeric ceilings " + ", ".join(parts)


# --------------------------------------------------------------------------
# 9. Oracle equivalence: symbolic operator algebra matches dense matrices
#    (or matrix-free probes above 1024 dimensions) on >= 1000 random pairs,
#    and every enumerated graph state is fixed by all its generators.
# --------------------------------------------------------------------------


def pauli_matvec(p: PauliOperator, n: int, v: np.ndarray) -> np.ndarray:
    """Independent matrix-free action of p on a vector over sites '0'..'n-1'.

    X^x Z^z |q> = omega^(z q) |q + x> per site, times the stored tau phase.
    """
    d = p.d
    weights = d ** np.arange(n - 1, -1, -1)
    idx = np.arange(d**n)
    digits = (idx[:, None] // weights[None, :]) % d
    sm = p.site_map()
    xs = np.array([sm.get(str(k), (0, 0))[0] for k in range(n)])
    zs = np.array([sm.get(str(k), (0, 0))[1] for k in range(n)])
    tau = np.exp(1j * np.pi / d)
    omega = tau * tau
    phases = tau**p.phase_exp * omega ** (digits @ zs % d)
    target = ((digits + xs[None, :]) % d) @ weights
    out = np.zeros(d**n, dtype=complex)
    out[target] = phases * v
    return out


def random_pauli(rng, d, n):
    sites = {}
    for k in range(n):
        x, z = int(rng.integers(d)), int(rng.integers(d))
        if x or z:
            sites[str(k)] = (x, z)
    return PauliOperator.from_sites(d, sites, phase_exp=int(rng.integers(2 * d)))


def test_criterion_09_symbolic_algebra_matches_dense_oracle():
    with criterion(9) as c:
        rng = np.random.default_rng(99)

        # trust anchor: the matrix-free action agrees with the kron oracle
        for _ in range(25):
            d = int(rng.integers(2, 6))
            n = int(rng.integers(1, 4))
            p = random_pauli(rng, d, n)
            v = rng.standard_normal(d**n) + 1j * rng.standard_normal(d**n)
            parties = [str(k) for k in range(n)]
            assert np.allclose(pauli_matvec(p, n, v), dense(p, parties) @ v, atol=1e-10)

        cells = [(d, n) for d in range(2, 10) for n in range(1, 7) if d**n <= 4096]
        pairs = 0
        probe_cells = 0
        for d, n in cells:
            dim = d**n
            parties = [str(k) for k in range(n)]
            omega = np.exp(2j * np.pi / d)
            if dim > 1024:
                probe_cells += 1
            for _ in range(30):
                a = random_pauli(rng, d, n)
                b = random_pauli(rng, d, n)
                ab = multiply(a, b)
                kap = commutation_phase(a, b) % d
                if dim <= 1024:
                    ma, mb = dense(a, parties), dense(b, parties)
                    mab = ma @ mb
                    assert np.abs(dense(ab, parties) - mab).max() <= 1e-10
                    assert np.abs(mab - omega**kap * (mb @ ma)).max() <= 1e-10
                    assert np.abs(dense(dagger(a), parties) - ma.conj().T).max() <= 1e-10
                else:
                    for _ in range(8):
                        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
                        v /= np.linalg.norm(v)
                        bv = pauli_matvec(b, n, v)
                        lhs = pauli_matvec(ab, n, v)
                        rhs = pauli_matvec(a, n, bv)
                        assert np.abs(lhs - rhs).max() <= 1e-10
                        rev = omega**kap * pauli_matvec(b, n, pauli_matvec(a, n, v))
                        assert np.abs(rhs - rev).max() <= 1e-10
                pairs += 1
        assert pairs >= 1000

        # support soundness against the dense oracle: conjugation by the
        # local shift and clock fixes exactly the non-support sites
        support_checks = 0
        for _ in range(60):
            d = int(rng.integers(2, 5))
            n = int(rng.integers(2, 5))
            p = random_pauli(rng, d, n)
            parties = [str(k) for k in range(n)]
            mp = dense(p, parties)
            from netcert import single, support

            for k in range(n):
                fixed = True
                for x, z in ((1, 0), (0, 1)):
                    u = dense(single(d, str(k), x, z), parties)
                    fixed = fixed and np.allclose(u @ mp @ u.conj().T, mp, atol=1e-10)
                assert fixed == (str(k) not in support(p))
                support_checks += 1

        # stabilization: every enumerated graph state is fixed by every
        # generator
        graph_cells = [
            (2, 3), (2, 4), (2, 5), (2, 6),
            (3, 3), (3, 4), (3, 5),
            (4, 3), (4, 4),
            (5, 3), (6, 3), (7, 3),
        ]
        graphs_checked = 0
        for d, n in graph_cells:
            for g in enumerate_connected_multigraphs(n, d):
                psi = build_graph_state(g)
                for v in range(n):
                    gen = graph_generator(g, v)
                    assert np.abs(pauli_matvec(gen, n, psi) - psi).max() <= 1e-10
                graphs_checked += 1
        c.detail = (
            f"{pairs} operator pairs ({probe_cells} probe cells), "
            f"{support_checks} support checks, "
            f"{graphs_checked} graph states fixed by all generators"
        )


# --------------------------------------------------------------------------
# 10. Randomized operator-inequality suites: 1000 trials each, no
#     violations, both branches of the uncertainty hinge exercised.
# --------------------------------------------------------------------------


def test_criterion_10_inequality_suites_clean_at_1000_trials():
    with criterion(10) as c:
        parts = []
        for check in ALL_LEMMA_CHECKS:
            start = time.monotonic()
            report = check(1000, seed=2026)
            elapsed = time.monotonic() - start
            assert report.violations == 0, report
            assert report.trials == 1000
            assert report.extremal_slack >= -1e-9
            assert elapsed < 60.0, (report.name, elapsed)
            if report.name == "uncertainty":
                assert report.branch_counts.get("hinge_active", 0) >= 1
                assert report.branch_counts.get("hinge_inactive", 0) >= 1
            parts.append(f"{report.name} {elapsed:.1f}s")
        c.detail = "6 suites x 1000 trials, zero violations: " + ", ".join(parts)


# --------------------------------------------------------------------------
# 11. Round trip: serialize -> parse -> fully re-verify -> byte-identical
#     re-serialization, for 100 random certified graphs.
# --------------------------------------------------------------------------


def test_criterion_11_certificate_round_trip_100_random_graphs():
    with criterion(11) as c:
        rng = np.random.default_rng(1111)
        done = 0
        attempts = 0
        while done < 100:
            attempts += 1
            assert attempts < 2000, "not enough certifiable random graphs"
            d = int(rng.integers(2, 8))
            n = int(rng.integers(3, 7))
            g = random_connected(rng, n, d)
            result = certify_any(g, orbit_cap=256)
            if not isinstance(result, Certificate):
                continue
            text = certificate_to_json(result)
            parsed = certificate_from_json(text)
            assert parsed == result
            report = verify_obs3(parsed)
            assert report.all_passed, (g.to_json_obj(), report.failed())
            assert certificate_to_json(parsed) == text
            done += 1
        c.detail = f"100 certificates re-verified and re-serialized byte-identically"
