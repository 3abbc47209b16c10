import json
from math import pi

import numpy as np
import pytest

from mub_atlas.matrices import (
    BackendMismatch,
    ComplexMatrix,
    CycMatrix,
    MuBasisSet,
    NotStandardForm,
)
from mub_atlas.solvers import build_named
from mub_atlas.equivalence import (
    EquivalenceWitness,
    are_equivalent,
    canonical_json,
    inequivalence_d5_triples,
    right_monomial_factor,
    verify_identity_catalog,
    verify_witness,
)

HP = pi / 2


def exact_set(d, order, *bases):
    return MuBasisSet(d, (CycMatrix.identity(d, order),) + tuple(bases))


def float_set(d, *bases):
    arrs = [ComplexMatrix(d, np.eye(d, dtype=complex))]
    arrs += [ComplexMatrix(d, b.to_complex_array()) for b in bases]
    return MuBasisSet(d, tuple(arrs))


def d5_set(*ks):
    return exact_set(
        5, 5, build_named("F5"), *[build_named("H5", k=k) for k in ks]
    )


# ---------------------------------------------------------------------------
# identity catalog


def test_identity_catalog_all_hold():
    entries = verify_identity_catalog()
    failed = [e.name for e in entries if not e.holds]
    assert failed == []
    names = {e.name for e in entries}
    # the load-bearing ones for the classification must be present
    for required in (
        "enphase_d3_once",
        "enphase_d5_powers",
        "fourier_pair_d5_q1",
        "fourier_pair_d5_q2",
        "fourier_pair_d5_q3",
        "fourier_pair_d5_q4",
        "quadratic_sum_d5",
        "rebase_j_d4",
        "rebase_k_d4",
        "conj_pair_d5",
    ):
        assert required in names


def test_right_monomial_factor_positive_and_negative():
    f5 = build_named("F5")
    m = right_monomial_factor(f5.dagger(), f5)
    assert m is not None
    assert sorted(m.perm) == [0, 1, 2, 3, 4]
    # an enphasing acts on rows, not columns, so no right factor exists
    assert right_monomial_factor(build_named("H5", k=1), f5) is None


# ---------------------------------------------------------------------------
# equivalences with exact certificates


def test_d3_pair_equivalent():
    a = exact_set(3, 3, build_named("F3"), build_named("H3", k=1))
    b = exact_set(3, 3, build_named("F3"), build_named("H3", k=2))
    res = are_equivalent(a, b)
    assert res.verdict == "equivalent"
    assert verify_witness(a, b, res.witness)


def test_d5_triples_pair_up():
    assert are_equivalent(d5_set(1), d5_set(4)).verdict == "equivalent"
    assert are_equivalent(d5_set(2), d5_set(3)).verdict == "equivalent"


def test_d5_triples_two_classes():
    res = are_equivalent(d5_set(1), d5_set(2))
    assert res.verdict == "inequivalent"
    assert res.refutation.exhaustive
    assert res.refutation.trials == 7200
    assert res.equivalent is False
    # symmetric run agrees
    assert are_equivalent(d5_set(2), d5_set(1)).verdict == "inequivalent"
    # and the cross pairs collapse onto the same two classes
    assert are_equivalent(d5_set(1), d5_set(3)).verdict == "inequivalent"
    assert are_equivalent(d5_set(4), d5_set(2)).verdict == "inequivalent"


def test_d5_quadruples_single_class():
    pairs = [((1, 2), (1, 3)), ((1, 2), (2, 4)), ((1, 2), (3, 4)), ((1, 3), (2, 3))]
    for ka, kb in pairs:
        res = are_equivalent(d5_set(*ka), d5_set(*kb))
        assert res.verdict == "equivalent", (ka, kb)


def test_d5_quintuples_single_class_and_sextuple_reflexive():
    res = are_equivalent(d5_set(1, 2, 3), d5_set(2, 3, 4))
    assert res.verdict == "equivalent"
    res = are_equivalent(d5_set(1, 2, 4), d5_set(1, 3, 4))
    assert res.verdict == "equivalent"
    res = are_equivalent(d5_set(1, 2, 3, 4), d5_set(1, 2, 3, 4))
    assert res.verdict == "equivalent"
    assert res.witness.basis_map[0] == 0


def test_d4_exact_absorption_at_quarter_turn():
    f4 = build_named("F4", x=HP)
    h4 = build_named("H4", y=HP, z=HP)
    j4 = build_named("J4", r=HP, s=HP)
    k4 = build_named("K4", t=HP, u=HP)
    href = exact_set(4, 4, f4, h4)
    assert are_equivalent(exact_set(4, 4, f4, j4), href).verdict == "equivalent"
    assert are_equivalent(exact_set(4, 4, f4, k4), href).verdict == "equivalent"
    # basis relabeling inside a quintuple is recovered in the map
    a = MuBasisSet(4, (CycMatrix.identity(4, 4), f4, h4, j4, k4))
    b = MuBasisSet(4, (CycMatrix.identity(4, 4), f4, k4, h4, j4))
    res = are_equivalent(a, b)
    assert res.verdict == "equivalent"
    assert sorted(res.witness.basis_map) == [0, 1, 2, 3, 4]


def test_reflexivity_across_dimensions():
    sets = [
        exact_set(2, 4, build_named("F2"), build_named("H2")),
        exact_set(3, 3, build_named("F3"), build_named("H3", k=1)),
        d5_set(1, 2),
    ]
    for s in sets:
        res = are_equivalent(s, s)
        assert res.verdict == "equivalent"
        assert verify_witness(s, s, res.witness)


# ---------------------------------------------------------------------------
# float backend


def test_float_absorption_generic_parameters():
    f4 = build_named("F4", x=HP)
    for src, ref in (
        (build_named("J4", r=0.7, s=1.9), build_named("H4", y=0.7, z=1.9)),
        (build_named("K4", t=0.4, u=2.2), build_named("H4", y=0.4, z=2.2)),
    ):
        res = are_equivalent(float_set(4, f4, src), float_set(4, f4, ref))
        assert res.verdict == "equivalent"
        assert res.witness.backend == "float"


def test_float_conjugation_branch():
    a = float_set(4, build_named("F4", x=0.3), build_named("H4", y=0.4, z=1.0))
    b = float_set(
        4, build_named("F4", x=pi - 0.3), build_named("H4", y=pi - 0.4, z=pi - 1.0)
    )
    res = are_equivalent(a, b)
    assert res.verdict == "equivalent"
    assert res.witness.conjugated


def test_float_exhaustion_is_undecided_not_inequivalent():
    a = float_set(4, build_named("F4", x=0.3), build_named("H4", y=0.4, z=1.0))
    b = float_set(4, build_named("F4", x=0.3), build_named("H4", y=0.5, z=1.0))
    res = are_equivalent(a, b)
    assert res.verdict == "undecided"
    assert res.equivalent is None
    assert not res.refutation.exhaustive


# ---------------------------------------------------------------------------
# structural guards and witness integrity


def test_structural_mismatches():
    a = exact_set(3, 3, build_named("F3"))
    b = d5_set()
    assert are_equivalent(a, b).verdict == "inequivalent"
    assert are_equivalent(d5_set(1), d5_set(1, 2)).verdict == "inequivalent"


def test_non_standard_form_rejected():
    f5 = build_named("F5")
    with pytest.raises(NotStandardForm):
        are_equivalent(MuBasisSet(5, (f5, f5)), d5_set())


def test_internally_mixed_backend_rejected():
    mixed = MuBasisSet(
        4,
        (
            ComplexMatrix(4, np.eye(4, dtype=complex)),
            build_named("F4", x=0.0),  # exact basis inside a float set
        ),
    )
    with pytest.raises(BackendMismatch):
        are_equivalent(mixed, mixed)
    # mixed pairs (one exact set, one float set) run on the float engine
    res = are_equivalent(
        exact_set(4, 4, build_named("F4", x=0.0)),
        float_set(4, build_named("F4", x=0.0)),
    )
    assert res.verdict == "equivalent"
    assert res.witness.backend == "float"


def test_single_basis_sets_trivially_equivalent():
    a = MuBasisSet(3, (CycMatrix.identity(3, 3),))
    res = are_equivalent(a, a)
    assert res.verdict == "equivalent"


def test_witness_json_roundtrip_and_tamper_detection():
    a = d5_set(1)
    b = d5_set(4)
    res = are_equivalent(a, b)
    w = res.witness
    blob = json.dumps(w.to_json_dict())
    back = EquivalenceWitness.from_json_dict(json.loads(blob))
    assert back == w
    assert back.replay_hash == w.replay_hash
    assert verify_witness(a, b, back)
    # swapping two entries of the basis map must break the replay
    bm = list(w.basis_map)
    bm[1], bm[2] = bm[2], bm[1]
    tampered = EquivalenceWitness(
        w.dim, w.n_bases, w.conjugated, w.rho, tuple(bm),
        w.left_monomial, w.right_monomials, w.backend,
    )
    assert not verify_witness(a, b, tampered)
    assert tampered.replay_hash != w.replay_hash


def test_refutation_hash_is_deterministic():
    r1 = are_equivalent(d5_set(1), d5_set(2)).refutation
    r2 = are_equivalent(d5_set(1), d5_set(2)).refutation
    assert r1.replay_hash == r2.replay_hash
    assert canonical_json(r1.to_json_dict()) == canonical_json(r2.to_json_dict())


# ---------------------------------------------------------------------------
# independent route for the two d=5 triple classes


def test_triple_inequivalence_report():
    rep = inequivalence_d5_triples()
    assert rep.holds
    assert all(e.holds for e in rep.reductions)
    assert all(p.hits == 0 for p in rep.pairings)
    assert len(rep.pairings) == 4
    assert all(p.anchors == 600 for p in rep.pairings)
    # the same exhaustion does find the allowed k=1 -> k=4 rebasings
    assert rep.control.hits > 0
    assert rep.affine_stabilizers["affine"] == 20
    assert rep.residue_obstruction["disjoint"]
    assert rep.replay_hash == inequivalence_d5_triples().replay_hash
