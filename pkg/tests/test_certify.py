"""Certificate constructions, verification, serialization, and tallies."""

import dataclasses
import math

import numpy as np
import pytest

from netcert import (
    Certificate,
    DegenerateMultiplicity,
    Multigraph,
    NotCertified,
    RangeError,
    StructureError,
    WrongFamily,
    certificate_from_json,
    certificate_to_json,
    certify_any,
    certify_constant_multiplicity,
    certify_obs4,
    enumerate_connected_multigraphs,
    exhaustive_table,
    fidelity_bound_from_lambda,
    select_power_t,
    verify_obs3,
)
from netcert.certify import certificate_to_json_obj
from netcert.multigraph import edges, permuted


def triangle(d, m=1):
    return Multigraph.from_edges(d, 3, [(0, 1, m), (1, 2, m), (0, 2, m)])


def angle(d, m_ab, m_ca):
    return Multigraph.from_edges(d, 3, [(0, 1, m_ab), (0, 2, m_ca)])


# ---------------------------------------------------------------- power choice


def test_select_power_t_pinned_cases():
    assert select_power_t(1, 2) == (1, 0.0)
    assert select_power_t(1, 4) == (2, 0.0)
    assert select_power_t(3, 6) == (1, 0.0)
    t, cv = select_power_t(1, 3)
    assert t == 1 and cv == math.sin(math.pi / 6)
    t, cv = select_power_t(2, 6)
    assert t == 1 and cv == math.sin(math.pi / 6)
    t, cv = select_power_t(4, 6)
    assert t == 2 and cv == math.sin(math.pi / 6)
    with pytest.raises(DegenerateMultiplicity):
        select_power_t(0, 5)
    with pytest.raises(DegenerateMultiplicity):
        select_power_t(10, 5)
    with pytest.raises(RangeError):
        select_power_t(1, 1)


def test_select_power_t_minimizes_cosine():
    for d in range(2, 16):
        for m in range(1, d):
            t, cv = select_power_t(m, d)
            assert (t * m) % d != 0
            attained = abs(math.cos(math.pi * t * m / d))
            assert abs(attained - cv) < 1e-12
            best = min(
                abs(math.cos(math.pi * s * m / d))
                for s in range(1, d)
                if (s * m) % d != 0
            )
            assert attained <= best + 1e-12


def test_fidelity_bound_from_lambda():
    assert fidelity_bound_from_lambda(0.0) == 0.9
    assert fidelity_bound_from_lambda(2.0) == 1.0
    assert fidelity_bound_from_lambda(1.0) == (7.0 + math.sqrt(6.5)) / 10.0
    with pytest.raises(RangeError):
        fidelity_bound_from_lambda(-0.1)
    with pytest.raises(RangeError):
        fidelity_bound_from_lambda(2.0000001)


# ---------------------------------------------------------------- constructions


def test_constant_multiplicity_triangle_d2():
    cert = certify_constant_multiplicity(triangle(2))
    assert cert.method == "obs1"
    assert cert.kind == "triangle"
    assert cert.kappa == 1
    assert cert.lambda_prime == 0.0
    assert cert.fidelity_bound == 0.9
    assert verify_obs3(cert).all_passed


def test_constant_multiplicity_rejects_mixed_weights():
    g = Multigraph.from_edges(3, 3, [(0, 1, 1), (1, 2, 2)])
    with pytest.raises(WrongFamily):
        certify_constant_multiplicity(g)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 7])
def test_constant_multiplicity_bounds_by_dimension(d):
    # bound depends only on d' = d/gcd(m, d): 0.9 when even, else the
    # closed form at sin(pi/(2 d')).
    for m in range(1, d):
        g = triangle(d, m)
        cert = certify_constant_multiplicity(g)
        d_red = d // math.gcd(m, d)
        if d_red % 2 == 0:
            assert cert.fidelity_bound == 0.9
        else:
            want = fidelity_bound_from_lambda(2.0 * math.sin(math.pi / (2 * d_red)))
            assert cert.fidelity_bound == want
        assert verify_obs3(cert).all_passed


def test_obs4_on_mixed_angle():
    g = angle(3, 1, 2)
    cert = certify_obs4(g, (0, 1, 2))
    assert isinstance(cert, Certificate)
    assert cert.method == "obs4"
    assert cert.kind == "angle"
    assert verify_obs3(cert).all_passed


def test_obs4_reports_reasons():
    res = certify_obs4(angle(6, 3, 2), (0, 1, 2))
    assert isinstance(res, NotCertified)
    assert any("m_tilde" in r for r in res.reasons)
    # apex shared neighbor blocks the triangle construction
    g = Multigraph.from_edges(
        2, 4, [(0, 1, 1), (1, 2, 1), (0, 2, 1), (0, 3, 1), (1, 3, 1)]
    )
    res = certify_obs4(g, (0, 1, 2))
    assert isinstance(res, NotCertified)
    assert any("shared neighbors" in r or "all three" in r for r in res.reasons)


def test_negative_control_d6_angle_is_orbit_singleton():
    g = angle(6, 3, 2)
    res = certify_any(g)
    assert isinstance(res, NotCertified)
    assert res.orbit_size == 1
    assert not res.orbit_truncated
    assert any("m_tilde" in r for r in res.reasons)
    assert any("not constant" in r for r in res.reasons)
    assert any("local-complementation orbit" in r for r in res.reasons)


def test_certify_any_small_and_disconnected():
    tiny = Multigraph.from_edges(3, 2, [(0, 1, 1)])
    res = certify_any(tiny)
    assert isinstance(res, NotCertified)
    assert res.reasons == ("fewer than three vertices",)
    broken = Multigraph.from_edges(2, 4, [(0, 1, 1), (2, 3, 1)])
    with pytest.raises(StructureError):
        certify_any(broken)


def test_lc_orbit_rescue():
    """A graph every direct construction misses but one hop of local
    complementation fixes."""
    g = Multigraph.from_edges(
        4, 4, [(0, 2, 2), (0, 3, 2), (1, 2, 2), (1, 3, 2), (2, 3, 1)]
    )
    from netcert.certify import _certify_direct

    assert isinstance(_certify_direct(g, (), g), list)
    cert = certify_any(g)
    assert isinstance(cert, Certificate)
    assert cert.lc_path == (2,)
    assert cert.graph == g
    assert cert.certified_graph != g
    assert cert.fidelity_bound == 0.9
    assert verify_obs3(cert).all_passed


def test_orbit_cap_truncation_reported():
    g = Multigraph.from_edges(6, 3, [(0, 1, 3), (0, 2, 2)])
    res = certify_any(g, orbit_cap=1)
    assert isinstance(res, NotCertified)
    # nothing new can be admitted beyond the start graph
    assert res.orbit_size == 1


def test_certification_status_is_relabeling_invariant():
    rng = np.random.default_rng(31)
    graphs = list(enumerate_connected_multigraphs(3, 6))
    for g in graphs[:: max(1, len(graphs) // 25)]:
        base = certify_any(g)
        perm = list(rng.permutation(g.n))
        other = certify_any(permuted(g, perm))
        assert isinstance(base, Certificate) == isinstance(other, Certificate)


def test_random_certificates_verify():
    rng = np.random.default_rng(32)
    verified = 0
    attempts = 0
    while verified < 30 and attempts < 400:
        attempts += 1
        d = int(rng.integers(2, 8))
        n = int(rng.integers(3, 6))
        eds = [
            (i, j, int(rng.integers(1, d)))
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < 0.55
        ]
        g = Multigraph.from_edges(d, n, eds)
        from netcert import is_connected

        if not is_connected(g):
            continue
        res = certify_any(g, orbit_cap=512)
        if isinstance(res, NotCertified):
            continue
        report = verify_obs3(res)
        assert report.all_passed, report.failed()
        verified += 1
    assert verified == 30


# ---------------------------------------------------------------- verification


def _tampered(cert, **changes):
    return dataclasses.replace(cert, **changes)


def test_verifier_rejects_tampering():
    cert = certify_constant_multiplicity(triangle(3))
    assert verify_obs3(cert).all_passed

    wrong_kappa = _tampered(cert, kappa=(cert.kappa + 1) % 3)
    report = verify_obs3(wrong_kappa)
    assert not report.all_passed
    assert any(c.name == "kappa" for c in report.failed())

    wrong_bound = _tampered(cert, fidelity_bound=0.99)
    report = verify_obs3(wrong_bound)
    assert any(c.name == "lambda_bound" for c in report.failed())

    wrong_lambda = _tampered(cert, lambda_prime=2.0)
    report = verify_obs3(wrong_lambda)
    assert any(c.name == "lambda_bound" for c in report.failed())

    swapped_groups = _tampered(
        cert, groups=(cert.groups[1], cert.groups[0], cert.groups[2], cert.groups[3])
    )
    report = verify_obs3(swapped_groups)
    assert not report.all_passed

    wrong_s3 = _tampered(cert, s3=cert.s1)
    report = verify_obs3(wrong_s3)
    assert any(c.name == "product" for c in report.failed())

    wrong_sigma = _tampered(cert, s4_relabeling=())
    report = verify_obs3(wrong_sigma)
    assert any(c.name == "relabel_map" for c in report.failed())

    # drop a populated group: use a path on four vertices, whose far vertex
    # lands in group 4
    path4 = Multigraph.from_edges(2, 4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    cert4 = certify_constant_multiplicity(path4)
    assert cert4.groups[3], "test needs a nonempty fourth group"
    missing_group = _tampered(
        cert4, groups=(cert4.groups[0], cert4.groups[1], cert4.groups[2], ())
    )
    report = verify_obs3(missing_group)
    assert any(c.name == "groups_partition" for c in report.failed())


def test_verifier_dense_check_can_be_skipped():
    cert = certify_constant_multiplicity(triangle(3))
    report = verify_obs3(cert, dense_cap=1)
    eig = [c for c in report.checks if c.name == "eigenspace_obstruction"]
    assert len(eig) == 1 and eig[0].passed and "skipped" in eig[0].detail
    assert report.all_passed


# ---------------------------------------------------------------- serialization


def test_json_round_trip_is_byte_identical():
    for g in [
        triangle(2),
        triangle(5, 3),
        Multigraph.from_edges(4, 4, [(0, 1, 1), (1, 2, 3), (2, 3, 2), (0, 3, 1)]),
    ]:
        res = certify_any(g)
        assert isinstance(res, Certificate)
        text = certificate_to_json(res)
        back = certificate_from_json(text)
        assert back == res
        assert certificate_to_json(back) == text


def test_json_schema_shape():
    cert = certify_constant_multiplicity(triangle(2))
    obj = certificate_to_json_obj(cert)
    assert list(obj) == [
        "graph",
        "triple",
        "kind",
        "groups",
        "operators",
        "exponents",
        "kappa",
        "lambda_prime",
        "fidelity_bound",
        "method",
        "lc_path",
    ]
    assert list(obj["groups"]) == ["G1", "G2", "G3", "G4"]
    assert list(obj["operators"]) == ["S1", "S2", "S3", "S4", "S4prime_relabel"]


def test_malformed_certificates_rejected():
    with pytest.raises(StructureError):
        certificate_from_json("not json at all")
    with pytest.raises(StructureError):
        certificate_from_json("{}")
    cert = certify_constant_multiplicity(triangle(2))
    obj = certificate_to_json_obj(cert)
    del obj["kappa"]
    import json

    with pytest.raises(StructureError):
        certificate_from_json(json.dumps(obj))


# ---------------------------------------------------------------- tallies


def test_exhaustive_table_3_3():
    report = exhaustive_table(3, 3)
    assert report.total == 7
    assert report.certified == 7
    assert report.all_certified
    assert report.complete
    assert dict(report.methods) == {"obs1": 4, "obs4": 3}


def test_exhaustive_table_parallel_matches_serial():
    serial = exhaustive_table(3, 4)
    parallel = exhaustive_table(3, 4, workers=2)
    assert serial == parallel


def test_exhaustive_table_budget_overflow_marks_incomplete():
    report = exhaustive_table(5, 3, budget=100)
    assert not report.complete
    assert not report.all_certified


def test_exhaustive_table_negative_case_d6():
    report = exhaustive_table(3, 6)
    assert report.total == 50
    assert report.complete
    assert report.certified < report.total
    bad = {tuple(sorted(m for _, _, m in edges(nc.graph))) for nc in report.uncertified}
    # the multiplicity-(3, 2) angle is among the failures
    assert (2, 3) in bad
