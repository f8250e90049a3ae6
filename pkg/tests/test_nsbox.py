import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nldistill import nsbox
from nldistill.exceptions import InvalidBehavior, NotInSimplex, SchemaError, UnknownName, WeightError

from conftest import ns_boxes, simplex_weights

SQ5 = math.sqrt(5)

# reference tables, row (x,y), column (a,b)
REFERENCE_VERTICES = {
    "P_NL": [[.5, 0, 0, .5], [0, .5, .5, 0], [0, .5, .5, 0], [0, .5, .5, 0]],
    "P_L1": [[0, 1, 0, 0]] * 4,
    "P_L2": [[0, 0, 1, 0]] * 4,
    "P_L3": [[0, 0, 0, 1], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
    "P_L4": [[0, 0, 0, 1], [0, 0, 0, 1], [0, 1, 0, 0], [0, 1, 0, 0]],
    "P_L5": [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
    "P_L6": [[1, 0, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 1, 0]],
    "P_L7": [[1, 0, 0, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0]],
    "P_L8": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
}

H_NS_REFERENCE = [[0.05, 0.85, 0.01, 0.09], [0, 0.90, 0.08, 0.02], [0, 0.93, 0.06, 0.01], [0.01, 0.92, 0.07, 0]]


# validation -------------------------------------------------------------

def test_deterministic_box_is_valid():
    assert nsbox.validate(nsbox.named_box("P_L1").p) == []


def test_normalization_violation_reports_row_and_deficit():
    t = np.array(nsbox.named_box("P_L1").p)
    t[0, 1] = 0.9
    (v,) = [v for v in nsbox.validate(t) if v.invariant == "NormalizationViolation"]
    assert v.location["row"] == 0
    assert v.location["deficit"] == pytest.approx(0.1)


def test_signaling_box_reports_party_a():
    t = np.zeros((4, 4))
    t[0, 0] = 1  # x=0, y=0: a=0
    t[1, 2] = 1  # x=0, y=1: a=1
    t[2, 0] = t[3, 0] = 1
    kinds = {(v.invariant, v.location.get("party")) for v in nsbox.validate(t)}
    assert ("NoSignalingViolation", "A") in kinds


def test_range_and_shape_violations():
    t = np.full((4, 4), 0.25)
    t[0, 0], t[0, 1] = -0.1, 0.6
    assert nsbox.validate(t)[0].invariant == "RangeViolation"
    assert nsbox.validate(np.ones((3, 4)))[0].invariant == "ShapeViolation"
    t = np.full((4, 4), 0.25)
    t[1, 1] = np.nan
    assert nsbox.validate(t)[0].invariant == "FiniteViolation"


def test_behavior_rejects_invalid_and_is_immutable():
    with pytest.raises(InvalidBehavior):
        nsbox.Behavior(np.zeros((4, 4)))
    b = nsbox.uniform_box()
    with pytest.raises(ValueError):
        b.p[0, 0] = 1.0


@given(ns_boxes())
def test_random_mixtures_are_valid(b):
    assert nsbox.validate(b.p) == []


# vertices ---------------------------------------------------------------

def test_vertex_count_and_validity():
    ids = nsbox.all_vertex_ids()
    assert len(ids) == 24 and len({v.name for v in ids}) == 24
    for vid in ids:
        p = nsbox.vertex(vid).p
        assert nsbox.validate(p) == []


@pytest.mark.parametrize("name", sorted(REFERENCE_VERTICES))
def test_simplex_vertices_match_reference_tables(name):
    np.testing.assert_array_equal(nsbox.named_box(name).p, REFERENCE_VERTICES[name])


def test_vertex_chsh_values():
    # one PR box reaches 4 for this functional, exactly eight local boxes reach 2
    values = [nsbox.chsh(nsbox.vertex(v)) for v in nsbox.all_vertex_ids()]
    assert sum(np.isclose(values, 4)) == 1
    assert sum(np.isclose(values, 2)) == 8
    assert max(values) == pytest.approx(4)


def test_pr_vertex_definition_brute_force():
    for alpha, beta, gamma in itertools.product((0, 1), repeat=3):
        p = nsbox.vertex(nsbox.VertexId("PR", (alpha, beta, gamma))).p
        for x, y, a, b in itertools.product((0, 1), repeat=4):
            want = 0.5 if (a ^ b) == ((x & y) ^ (alpha & x) ^ (beta & y) ^ gamma) else 0.0
            assert p[2 * x + y, 2 * a + b] == want


def test_local_vertex_definition_brute_force():
    for a1, a2, b1, b2 in itertools.product((0, 1), repeat=4):
        p = nsbox.vertex(nsbox.VertexId("L", (a1, a2, b1, b2))).p
        for x, y in itertools.product((0, 1), repeat=2):
            a, b = (a1 & x) ^ a2, (b1 & y) ^ b2
            assert p[2 * x + y, 2 * a + b] == 1.0


# mixing and measures ----------------------------------------------------

def test_mix_identity_and_errors():
    pnl = nsbox.named_box("P_NL")
    assert nsbox.mix([1.0], [pnl]).allclose(pnl)
    with pytest.raises(WeightError):
        nsbox.mix([0.5, 0.6], [pnl, pnl])
    with pytest.raises(WeightError):
        nsbox.mix([1.5, -0.5], [pnl, pnl])


def test_h_q_max_from_weights():
    b = nsbox.simplex_mix(nsbox.H_Q_MAX_WEIGHTS)
    assert b.p[0, 0] == pytest.approx((5 * SQ5 - 11) / 2, abs=1e-12)
    assert b.p[0, 0] == pytest.approx(0.0901699, abs=1e-7)


def test_h_ns_matches_reference_table():
    np.testing.assert_allclose(nsbox.named_box("H_NS").p, H_NS_REFERENCE, atol=1e-12)


def test_correlator_examples():
    pnl = nsbox.named_box("P_NL")
    assert nsbox.correlator(pnl, 0, 0) == 1
    assert nsbox.correlator(pnl, 1, 1) == -1
    u = nsbox.uniform_box()
    for x, y in itertools.product((0, 1), repeat=2):
        assert nsbox.correlator(u, x, y) == 0


def test_chsh_examples():
    assert nsbox.chsh(nsbox.named_box("P_NL")) == pytest.approx(4)
    assert nsbox.chsh(nsbox.named_box("P_L1")) == pytest.approx(2)
    assert nsbox.chsh(nsbox.named_box("H_NS")) == pytest.approx(2.2, abs=1e-12)
    assert nsbox.chsh(nsbox.named_box("B_Q_max")) == pytest.approx(2 * math.sqrt(2), abs=1e-12)


@given(ns_boxes())
def test_chsh_bounded_by_four(b):
    assert -4 - 1e-12 <= nsbox.chsh(b) <= 4 + 1e-12


@given(ns_boxes(), st.integers(0, 1), st.integers(0, 1))
def test_correlator_in_range(b, x, y):
    assert -1 - 1e-12 <= nsbox.correlator(b, x, y) <= 1 + 1e-12


# relabelings ------------------------------------------------------------

def test_group_size_and_identity():
    rs = nsbox.all_relabelings()
    assert len(rs) == 128
    assert rs[0] == nsbox.IDENTITY
    assert len({tuple(r.permutation()) for r in rs}) == 128


def test_identity_relabeling_is_noop():
    b = nsbox.named_box("H_NS")
    assert nsbox.apply_relabeling(b, nsbox.IDENTITY).allclose(b, 0)


def test_output_flip_is_involution():
    r = nsbox.Relabeling(flip_output_A=(1, 1), flip_output_B=(1, 1))
    b = nsbox.named_box("H_NS_prime")
    assert nsbox.apply_relabeling(nsbox.apply_relabeling(b, r), r).allclose(b, 0)


def test_some_relabeling_maps_pr000_to_pnl():
    pr = nsbox.named_box("PR_000")
    pnl = nsbox.named_box("P_NL")
    hits = [r for r in nsbox.all_relabelings() if nsbox.apply_relabeling(pr, r).allclose(pnl)]
    assert hits


@given(ns_boxes(), st.integers(0, 127))
def test_relabeling_inverse_and_validity(b, k):
    r = nsbox.all_relabelings()[k]
    q = nsbox.apply_relabeling(b, r)
    assert nsbox.validate(q.p) == []
    assert nsbox.apply_relabeling(q, r.inverse()).allclose(b, 1e-15)


def test_relabelings_permute_vertices():
    names = {tuple(nsbox.vertex(v).p.ravel()) for v in nsbox.all_vertex_ids()}
    for r in nsbox.all_relabelings():
        for v in nsbox.all_vertex_ids():
            assert tuple(nsbox.apply_relabeling(nsbox.vertex(v), r).p.ravel()) in names


def test_canonicalize_examples():
    _, _, v = nsbox.canonicalize(nsbox.named_box("PR_000"))
    assert v == pytest.approx(4)
    _, r, v = nsbox.canonicalize(nsbox.named_box("P_L1"))
    assert v == pytest.approx(2) and r == nsbox.IDENTITY
    _, _, v = nsbox.canonicalize(nsbox.uniform_box())
    assert v == pytest.approx(0, abs=1e-15)


@given(ns_boxes())
def test_canonicalize_is_max_over_group(b):
    canon, r, value = nsbox.canonicalize(b)
    brute = max(nsbox.chsh(nsbox.apply_relabeling(b, q)) for q in nsbox.all_relabelings())
    assert value == pytest.approx(brute, abs=1e-12)
    assert nsbox.chsh(canon) == pytest.approx(value, abs=1e-12)
    assert nsbox.apply_relabeling(b, r).allclose(canon, 0)


# simplex decomposition --------------------------------------------------

def test_decompose_h_q_max():
    dec = nsbox.decompose_simplex(nsbox.named_box("H_Q_max"))
    want = [5 * SQ5 - 11] + [(7 - 3 * SQ5) / 2] * 4 + [SQ5 - 2, 0, 0, 0]
    np.testing.assert_allclose(dec.c, want, atol=1e-12)


def test_decompose_vertex_and_outside():
    np.testing.assert_allclose(nsbox.decompose_simplex(nsbox.named_box("P_NL")).c, [1] + [0] * 8, atol=1e-12)
    with pytest.raises(NotInSimplex):
        nsbox.decompose_simplex(nsbox.uniform_box())


@given(simplex_weights())
def test_decompose_round_trip(c):
    b = nsbox.simplex_mix(c)
    dec = nsbox.decompose_simplex(b)
    np.testing.assert_allclose(dec.c, c, atol=1e-10)
    assert dec.behavior().allclose(b, 1e-12)
    assert nsbox.chsh(b) == pytest.approx(2 + 2 * c[0], abs=1e-12)


# Hardy test -------------------------------------------------------------

def test_hardy_examples():
    c = nsbox.hardy_test(nsbox.named_box("H_Q_max"))
    assert c.is_hardy and c.success == pytest.approx(0.0901699, abs=1e-7)
    c = nsbox.hardy_test(nsbox.named_box("H_NS"))
    assert c.is_hardy and c.success == pytest.approx(0.05, abs=1e-12)
    c = nsbox.hardy_test(nsbox.named_box("P_L1"))
    assert not c.is_hardy and c.success == 0


# catalog and JSON -------------------------------------------------------

def test_catalog_examples():
    assert nsbox.named_box("H_NS_prime").p[0, 0] == pytest.approx(0.0773)
    assert nsbox.validate(nsbox.named_box("H_NS_prime").p) == []
    with pytest.raises(UnknownName):
        nsbox.named_box("nope")
    assert len(nsbox.CATALOG_NAMES) == 24 + 9 + 4


def test_json_round_trip(tmp_path):
    b = nsbox.named_box("B_Q_max")
    path = tmp_path / "b.json"
    nsbox.save_behavior(b, path)
    assert nsbox.load_behavior(path).allclose(b, 0)
    doc = json.loads(path.read_text())
    assert doc["schema"] == nsbox.SCHEMA


def test_json_schema_errors():
    doc = nsbox.behavior_to_json(nsbox.named_box("P_L1"))
    for key, bad in (("schema", "other"), ("row_order", "xy:11,10,01,00")):
        with pytest.raises(SchemaError):
            nsbox.table_from_json({**doc, key: bad})
