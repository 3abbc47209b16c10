from math import comb

import pytest

from mub_atlas.classify import (
    EXPECTED_CLASSES,
    classify,
    verify_complete_set,
)
from mub_atlas.matrices import Mismatch

# cross-basis overlap counts for the complete (d+1)-set: C(d+1, 2) * d^2
CROSS_OVERLAPS = {2: 12, 3: 54, 4: 160, 5: 375}


@pytest.fixture(scope="module")
def reports():
    return {d: classify(d) for d in (2, 3, 4, 5)}


def test_complete_set_audits_are_exact():
    for d in (2, 3, 4, 5):
        audit = verify_complete_set(d)
        assert audit.ok
        assert audit.exact
        assert audit.n_bases == d + 1
        assert audit.pairs_checked == comb(d + 1, 2)
        assert audit.cross_overlaps == CROSS_OVERLAPS[d]
        assert audit.within_overlaps == (d + 1) * d * (d + 1) // 2
        # every cross overlap satisfies |<u,v>|^2 * d^2 == d on the nose
        assert audit.scaled_modulus_sq == d
        js = audit.to_json_dict()
        assert js["type"] == "complete_set_audit"
        assert js["ok"] is True


def test_every_dimension_matches_expected_table(reports):
    for d, report in reports.items():
        assert report.matches_expected, report.table()
        assert report.counts() == EXPECTED_CLASSES[d]


def test_rigid_dimensions_have_single_classes(reports):
    for d in (2, 3):
        for entry in reports[d].entries:
            assert entry.parameters == 0
        top = [e for e in reports[d].entries if e.n_bases == d + 1]
        assert len(top) == 1
        solver = top[0].evidence["solver"]
        assert solver["assembled_bases"] == solver["expected_extra_bases"]


def test_d4_pair_and_triple_continua(reports):
    report = reports[4]
    pairs = [e for e in report.entries if e.n_bases == 2]
    triples = [e for e in report.entries if e.n_bases == 3]
    assert len(pairs) == 1 and pairs[0].parameters == 1
    assert len(triples) == 1 and triples[0].parameters == 3
    assert pairs[0].evidence["witnesses"]
    assert pairs[0].evidence["refutations"]
    # distinct interior points never merge; the float engine cannot certify
    # inequivalence, so exhaustion reads back as undecided
    assert pairs[0].evidence["sampled_interior"] == "undecided"
    # H, J and K shaped triples are all listed under the one class
    assert len(triples[0].members) == 3
    assert triples[0].evidence["refutations"]
    table = report.table()
    assert "inf^1" in table
    assert "inf^3" in table


def test_d4_locked_subsets_are_rigid(reports):
    report = reports[4]
    quads = [e for e in report.entries if e.n_bases == 4]
    quints = [e for e in report.entries if e.n_bases == 5]
    assert len(quads) == 1 and quads[0].parameters == 0
    assert len(quints) == 1 and quints[0].parameters == 0
    assert len(quads[0].members) == comb(5, 4)
    assert len(quints[0].members) == 1


def test_d5_triples_split_into_two_classes(reports):
    report = reports[5]
    triples = [e for e in report.entries if e.n_bases == 3]
    assert len(triples) == 2
    assert sum(len(e.members) for e in triples) == comb(6, 3)
    for entry in triples:
        # the quotient verdicts are backed by a second, engine-free route
        assert entry.evidence["independent_route"]
    # refutations land on the class whose representative rejected the
    # candidate, so the first class carries one per foreign member
    refutations = [h for e in triples for h in e.evidence["refutations"]]
    assert len(refutations) == 10
    reps = {e.representative for e in triples}
    assert len(reps) == 2


def test_d5_larger_subsets_collapse(reports):
    report = reports[5]
    by_r = {e.n_bases: e for e in report.entries if e.n_bases >= 4}
    assert len(by_r[4].members) == comb(6, 4)
    assert len(by_r[5].members) == comb(6, 5)
    assert len(by_r[6].members) == 1
    assert by_r[6].evidence["solver"]["solver_vectors"] == 20


def test_unsupported_dimensions_rejected():
    for d in (1, 6, 7):
        with pytest.raises(Mismatch):
            classify(d)


def test_report_serialization_is_deterministic():
    a = classify(3)
    b = classify(3)
    assert a.replay_hash == b.replay_hash
    assert a.to_json_dict() == b.to_json_dict()
    assert "dimension 3" in a.table()
    assert "matches" in a.table()
