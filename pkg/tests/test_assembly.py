"""Orthogonality graphs, basis assembly, family pairing, maximal MU sets."""

import math

import numpy as np
import pytest

from mub_atlas.assembly import (
    ParametricMuBasis,
    UnknownFamily,
    assemble_bases,
    maximal_mu_sets,
    mu_rule,
    orthogonality_graph,
    pair_families,
    standard_complete_set,
    unbiasedness_residual,
)
from mub_atlas.matrices import ComplexMatrix, Mismatch, PhaseMatrix
from mub_atlas.solvers import (
    FAMILY_CATALOG,
    build_named,
    solve_d2,
    solve_d3,
    tabulated_d5_vectors,
)


def _column_exps(pm: PhaseMatrix) -> list:
    return sorted(
        tuple(pm.exps[i][j] for i in range(pm.dim)) for j in range(pm.dim)
    )


def test_d3_vectors_assemble_into_the_two_enphased_bases():
    bases = assemble_bases(solve_d3().discrete)
    assert len(bases) == 2
    assert all(isinstance(b, PhaseMatrix) for b in bases)
    expected = [_column_exps(build_named("H3", k=k)) for k in (1, 2)]
    got = [_column_exps(b) for b in bases]
    assert sorted(map(tuple, got)) == sorted(map(tuple, expected))


def test_d2_vectors_assemble_into_one_basis():
    bases = assemble_bases(solve_d2().discrete)
    assert len(bases) == 1
    assert _column_exps(bases[0]) == _column_exps(build_named("H2"))


def test_d5_vectors_assemble_into_four_bases():
    bases = assemble_bases(tabulated_d5_vectors().discrete)
    assert len(bases) == 4
    expected = [_column_exps(build_named("H5", k=k)) for k in (1, 2, 3, 4)]
    got = [_column_exps(b) for b in bases]
    assert sorted(map(tuple, got)) == sorted(map(tuple, expected))


def test_d5_orthogonality_graph_is_four_disjoint_cliques():
    vecs = tabulated_d5_vectors().discrete
    adj = orthogonality_graph(vecs)
    # each vector is orthogonal to exactly its four basis mates
    assert all(len(a) == 4 for a in adj)
    comps = []
    seen = set()
    for i in range(len(vecs)):
        if i in seen:
            continue
        comp = {i} | set(adj[i])
        seen |= comp
        comps.append(comp)
    assert len(comps) == 4


def test_assembly_is_insensitive_to_input_order():
    vecs = list(tabulated_d5_vectors().discrete)
    a = assemble_bases(vecs)
    b = assemble_bases(vecs[::-1])
    assert [m.exps for m in a] == [m.exps for m in b]


def test_float_vectors_assemble_numerically():
    angles = [np.array(v.angles()) for v in solve_d3().discrete]
    bases = assemble_bases(angles)
    assert len(bases) == 2
    assert all(isinstance(b, ComplexMatrix) for b in bases)
    for b in bases:
        arr = b.to_complex_array()
        assert np.max(np.abs(arr.conj().T @ arr - np.eye(3))) < 1e-12


def test_empty_input_gives_no_bases():
    assert assemble_bases([]) == ()


def test_pairing_h_families():
    pm = pair_families(["h1", "h2", "h3", "h4"])
    assert pm.name == "H4"
    assert pm.column_labels == ("h2", "h1", "h3", "h4")
    assert pm.free_params == ("y", "z")


def test_pairing_accepts_family_objects():
    pm = pair_families([FAMILY_CATALOG[l] for l in ("k3", "k1", "k4", "k2")])
    assert pm.name == "K4"
    assert pm.free_params == ("t", "u")


def test_pairing_rejects_mixed_families():
    with pytest.raises(UnknownFamily):
        pair_families(["h1", "h2", "j3", "j4"])
    with pytest.raises(UnknownFamily):
        pair_families(["h1", "h2", "h3"])


@pytest.mark.parametrize(
    "labels,params",
    [
        (("h1", "h2", "h3", "h4"), {"y": 0.3, "z": 2.1}),
        (("j1", "j2", "j3", "j4"), {"r": 1.0, "s": 0.2}),
        (("k1", "k2", "k3", "k4"), {"t": 2.8, "u": 1.4}),
    ],
)
def test_paired_columns_form_orthonormal_bases(labels, params):
    pm = pair_families(labels)
    assert pm.orthonormal_residual(**params) < 1e-12
    built = pm.build(**{k: v for k, v in params.items()})
    cols = np.array(pm.columns_at(**params)).T
    assert np.allclose(built.to_complex_array(), cols, atol=1e-12)


def test_shared_parameter_is_required_for_orthogonality():
    pm = pair_families(["h1", "h2", "h3", "h4"])
    cols = [
        FAMILY_CATALOG["h2"].member(0.3),
        FAMILY_CATALOG["h1"].member(0.9),  # partner with a different parameter
        FAMILY_CATALOG["h3"].member(2.0),
        FAMILY_CATALOG["h4"].member(2.0),
    ]
    arr = np.array(cols).T
    gram = arr.conj().T @ arr
    assert abs(gram[0, 1]) > 0.1


def test_same_type_parametric_bases_are_never_unbiased():
    assert mu_rule("H4", "H4") == "never"
    rng_params = [0.0, 0.7, math.pi / 2, 2.2, 3.0]
    worst = math.inf
    for y in rng_params:
        for z in rng_params:
            a = build_named("H4", y=y, z=z)
            b = build_named("H4", y=2.9, z=0.4)
            worst = min(worst, unbiasedness_residual(a, b))
    assert worst >= 0.05


def test_different_type_parametric_bases_unbiased_only_at_right_angles():
    assert mu_rule("H4", "J4") == "right_angle_only"
    hp = math.pi / 2
    a = build_named("H4", y=hp, z=hp)
    b = build_named("J4", r=hp, s=hp)
    assert unbiasedness_residual(a, b) < 1e-12
    b_off = build_named("J4", r=hp + 0.2, s=hp)
    assert unbiasedness_residual(a, b_off) > 1e-3


def test_fourier_family_always_unbiased_to_h_type():
    assert mu_rule("F4", "H4") == "always"
    for x in (0.0, 0.5, 1.9):
        for (y, z) in ((0.1, 2.6), (math.pi / 2, 1.0)):
            a = build_named("F4", x=x)
            b = build_named("H4", y=y, z=z)
            assert unbiasedness_residual(a, b) < 1e-12


def test_mu_rule_rejects_unknown_names():
    with pytest.raises(UnknownFamily):
        mu_rule("F4", "F5")


def test_complete_reference_sets_audit_exactly():
    sizes = {2: 3, 3: 4, 4: 5, 5: 6}
    for d, n in sizes.items():
        ref = standard_complete_set(d)
        assert ref.n_bases == n
        assert ref.is_exact()
        report = ref.audit()
        assert report.ok and report.exact
        ref.check_standard()


def test_standard_complete_set_unknown_dimension():
    with pytest.raises(Mismatch):
        standard_complete_set(6)


def test_maximal_mu_sets_recover_complete_sets():
    for d, n in ((2, 3), (3, 4), (5, 6)):
        ref = standard_complete_set(d)
        sets = maximal_mu_sets(ref.bases)
        assert [s.n_bases for s in sets] == [n]


def test_maximal_mu_sets_d4_quintuple_plus_stranded_triple():
    hp = math.pi / 2
    ref = standard_complete_set(4)
    extra = build_named("H4", y=0.4, z=1.2)  # MU to I and F4 only
    sets = maximal_mu_sets(tuple(ref.bases) + (extra,))
    assert [s.n_bases for s in sets] == [5, 3]
    assert sets[0].audit().ok
    top = set(id(b) for b in sets[0].bases)
    assert id(extra) not in top


def test_parametric_basis_json():
    pm = pair_families(["j1", "j2", "j3", "j4"])
    obj = pm.to_json_dict()
    assert obj["name"] == "J4"
    assert obj["column_params"] == ["r", "r", "s", "s"]
