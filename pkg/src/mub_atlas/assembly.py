"""Assembling MU vectors into orthonormal bases and bases into maximal
mutually unbiased sets.

Vectors found by the solvers or the numeric search are only candidates; a
basis is a d-clique in their exact orthogonality graph, and a MU set is a
clique in the unbiasedness graph on bases.  Both graphs are built from
first-principles overlap checks, never from provenance of the inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm, pi, sqrt
from typing import Optional, Sequence, Union

import numpy as np

from .matrices import (
    FLOAT_TOL,
    AnyMatrix,
    ComplexMatrix,
    CycMatrix,
    Mismatch,
    MuBasisSet,
    PhaseMatrix,
    PhaseVector,
    mu_overlap,
)
from .solvers import VectorFamily, build_named, family_member

VectorLike = Union[PhaseVector, Sequence[float], np.ndarray]


class UnknownFamily(ValueError):
    """Family labels that do not form a known basis pattern."""


def _is_exact_batch(vectors: Sequence[VectorLike]) -> bool:
    return all(isinstance(v, PhaseVector) for v in vectors)


def _to_float_vector(v: VectorLike, dim: Optional[int] = None) -> np.ndarray:
    if isinstance(v, PhaseVector):
        return v.to_complex()
    arr = np.asarray(v)
    if arr.ndim != 1:
        raise Mismatch("vectors must be one-dimensional")
    if np.iscomplexobj(arr):
        return arr
    # a real vector is a list of dephased angles
    return np.exp(1j * arr) / sqrt(len(arr))


def orthogonality_graph(
    vectors: Sequence[VectorLike], tol: float = FLOAT_TOL
) -> tuple[frozenset[int], ...]:
    """Adjacency sets: i ~ j iff vectors i and j are orthogonal.

    PhaseVector inputs are decided exactly; anything else numerically.
    """
    n = len(vectors)
    exact = _is_exact_batch(vectors)
    cols = vectors if exact else [_to_float_vector(v) for v in vectors]
    adj: list[set[int]] = [set() for _ in range(n)]
    backend = "exact" if exact else "float"
    for i in range(n):
        for j in range(i + 1, n):
            ov = mu_overlap(cols[i], cols[j], backend=backend, tol=tol)
            if ov.kind == "orthogonal":
                adj[i].add(j)
                adj[j].add(i)
    return tuple(frozenset(s) for s in adj)


def _all_k_cliques(
    adj: Sequence[frozenset[int]], k: int
) -> list[tuple[int, ...]]:
    n = len(adj)
    out: list[tuple[int, ...]] = []

    def extend(clique: list[int], start: int) -> None:
        if len(clique) == k:
            out.append(tuple(clique))
            return
        # not enough vertices left to finish the clique
        if n - start < k - len(clique):
            return
        for v in range(start, n):
            if all(v in adj[u] for u in clique):
                clique.append(v)
                extend(clique, v + 1)
                clique.pop()

    extend([], 0)
    return out


def assemble_bases(
    vectors: Sequence[VectorLike], tol: float = FLOAT_TOL
) -> tuple[AnyMatrix, ...]:
    """All orthonormal bases formed from the given dephased unit vectors.

    Each d-clique of the orthogonality graph yields one basis; columns are
    sorted canonically so reruns and permuted inputs give identical output.
    Exact inputs give PhaseMatrix bases, float inputs ComplexMatrix.
    """
    if not vectors:
        return ()
    exact = _is_exact_batch(vectors)
    dim = vectors[0].dim if exact else len(_to_float_vector(vectors[0]))
    adj = orthogonality_graph(vectors, tol)
    keyed: dict[tuple, AnyMatrix] = {}
    for clique in _all_k_cliques(adj, dim):
        if exact:
            order = lcm(*(vectors[i].order for i in clique))
            cols = sorted(
                tuple(e * (order // vectors[i].order) % order for e in vectors[i].exps)
                for i in clique
            )
            key = (order, tuple(cols))
            if key in keyed:
                continue
            exps = tuple(tuple(col[i] for col in cols) for i in range(dim))
            keyed[key] = PhaseMatrix(dim, order, exps)
        else:
            cols_f = [np.round(_to_float_vector(vectors[i]), 12) for i in clique]
            cols_f.sort(key=lambda c: tuple(np.angle(c).round(9).tolist()))
            key = tuple(tuple(c.tolist()) for c in cols_f)
            if key in keyed:
                continue
            keyed[key] = ComplexMatrix(dim, np.array(cols_f).T)
    return tuple(keyed[k] for k in sorted(keyed, key=repr))


# ---------------------------------------------------------------------------
# pairing the d = 4 vector families into parametric Hadamard bases
#
# Partner families (curves that close up into one circle) must share their
# parameter for the four columns to be orthogonal; the two partner pairs keep
# independent parameters.

_PAIRINGS = {
    frozenset(("h1", "h2", "h3", "h4")): (
        "H4",
        ("h2", "h1", "h3", "h4"),
        ("y", "y", "z", "z"),
    ),
    frozenset(("j1", "j2", "j3", "j4")): (
        "J4",
        ("j1", "j2", "j3", "j4"),
        ("r", "r", "s", "s"),
    ),
    frozenset(("k1", "k2", "k3", "k4")): (
        "K4",
        ("k1", "k2", "k3", "k4"),
        ("t", "t", "u", "u"),
    ),
}


@dataclass(frozen=True)
class ParametricMuBasis:
    """A two-parameter Hadamard basis assembled from four vector families."""

    name: str
    column_labels: tuple[str, ...]
    column_params: tuple[str, ...]

    @property
    def free_params(self) -> tuple[str, ...]:
        seen: list[str] = []
        for p in self.column_params:
            if p not in seen:
                seen.append(p)
        return tuple(seen)

    def build(self, **params) -> AnyMatrix:
        return build_named(self.name, **params)

    def columns_at(self, **params) -> list[np.ndarray]:
        vals = [params[p] for p in self.column_params]
        return [family_member(l, t) for l, t in zip(self.column_labels, vals)]

    def orthonormal_residual(self, **params) -> float:
        arr = np.array(self.columns_at(**params)).T
        return float(np.max(np.abs(arr.conj().T @ arr - np.eye(len(arr)))))

    def to_json_dict(self) -> dict:
        return {
            "type": "parametric_basis",
            "name": self.name,
            "column_labels": list(self.column_labels),
            "column_params": list(self.column_params),
        }


def pair_families(
    families: Sequence[Union[VectorFamily, str]]
) -> ParametricMuBasis:
    """Pair four one-parameter families into a parametric basis."""
    labels = frozenset(
        f.label if isinstance(f, VectorFamily) else str(f) for f in families
    )
    if labels not in _PAIRINGS:
        raise UnknownFamily(f"no basis pattern for families {sorted(labels)}")
    name, cols, par = _PAIRINGS[labels]
    return ParametricMuBasis(name, cols, par)


# which parametric basis types can ever be mutually unbiased:
#   same type        never (two overlap magnitudes would have to sum to 1/2
#                    and to 1 at once)
#   different types  exactly when every parameter is pi/2
#   F4 vs h-type     always; F4 vs j/k-type only at the symmetric point
_RULES = {
    frozenset(("H4",)): "never",
    frozenset(("J4",)): "never",
    frozenset(("K4",)): "never",
    frozenset(("F4",)): "never",
    frozenset(("H4", "J4")): "right_angle_only",
    frozenset(("H4", "K4")): "right_angle_only",
    frozenset(("J4", "K4")): "right_angle_only",
    frozenset(("F4", "H4")): "always",
    frozenset(("F4", "J4")): "right_angle_only",
    frozenset(("F4", "K4")): "right_angle_only",
}


def mu_rule(name_a: str, name_b: str) -> str:
    """When two parametric basis types are mutually unbiased: 'never',
    'always', or 'right_angle_only' (every parameter equal to pi/2)."""
    key = frozenset((name_a, name_b))
    if key not in _RULES:
        raise UnknownFamily(f"no unbiasedness rule for {name_a!r} vs {name_b!r}")
    return _RULES[key]


def unbiasedness_residual(a: AnyMatrix, b: AnyMatrix) -> float:
    """max_ij | |<a_i, b_j>|^2 - 1/d |; zero iff the bases are MU."""
    fa, fb = a.to_complex_array(), b.to_complex_array()
    d = fa.shape[0]
    return float(np.max(np.abs(np.abs(fa.conj().T @ fb) ** 2 - 1.0 / d)))


# ---------------------------------------------------------------------------
# maximal MU sets


def _pair_unbiased(a: AnyMatrix, b: AnyMatrix, tol: float) -> bool:
    exact = not (isinstance(a, ComplexMatrix) or isinstance(b, ComplexMatrix))
    if exact:
        ca = a.to_cyc() if isinstance(a, PhaseMatrix) else a
        cb = b.to_cyc() if isinstance(b, PhaseMatrix) else b
        for i in range(a.dim):
            for j in range(b.dim):
                ov = mu_overlap(ca.column(i), cb.column(j), backend="exact")
                if ov.kind != "unbiased":
                    return False
        return True
    return unbiasedness_residual(a, b) < tol


def _maximal_cliques(adj: Sequence[set[int]]) -> list[list[int]]:
    out: list[list[int]] = []

    def bron_kerbosch(r: set[int], p: set[int], x: set[int]) -> None:
        if not p and not x:
            out.append(sorted(r))
            return
        for v in sorted(p):
            bron_kerbosch(r | {v}, p & adj[v], x & adj[v])
            p = p - {v}
            x = x | {v}

    bron_kerbosch(set(), set(range(len(adj))), set())
    return out


def maximal_mu_sets(
    bases: Sequence[AnyMatrix], tol: float = FLOAT_TOL, audit: bool = True
) -> tuple[MuBasisSet, ...]:
    """Maximal pairwise-MU subsets of the given bases, largest first.

    Unit bases (the identity) are fine to include; each returned set keeps
    the input ordering of its members and passes a full audit.
    """
    n = len(bases)
    if n == 0:
        return ()
    dim = bases[0].dim
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if _pair_unbiased(bases[i], bases[j], tol):
                adj[i].add(j)
                adj[j].add(i)
    sets = []
    for clique in _maximal_cliques(adj):
        mset = MuBasisSet(dim, tuple(bases[i] for i in clique))
        if audit:
            report = mset.audit(tol)
            if not report.ok:
                raise Mismatch(
                    f"unbiasedness graph and audit disagree: {report.failures[:3]}"
                )
        sets.append(mset)
    sets.sort(key=lambda s: (-s.n_bases, s.canonical_key()))
    return tuple(sets)


def standard_complete_set(dim: int) -> MuBasisSet:
    """The reference complete MU set in dimensions 2-5, in standard form."""
    if dim == 2:
        bases = (
            CycMatrix.identity(2, 4),
            build_named("F2"),
            build_named("H2"),
        )
    elif dim == 3:
        bases = (
            CycMatrix.identity(3, 3),
            build_named("F3"),
            build_named("H3", k=1),
            build_named("H3", k=2),
        )
    elif dim == 4:
        bases = (
            CycMatrix.identity(4, 4),
            build_named("F4", x=pi / 2),
            build_named("H4", y=pi / 2, z=pi / 2),
            build_named("J4", r=pi / 2, s=pi / 2),
            build_named("K4", t=pi / 2, u=pi / 2),
        )
    elif dim == 5:
        bases = (
            CycMatrix.identity(5, 5),
            build_named("F5"),
            build_named("H5", k=1),
            build_named("H5", k=2),
            build_named("H5", k=3),
            build_named("H5", k=4),
        )
    else:
        raise Mismatch(f"no reference complete set for dimension {dim}")
    return MuBasisSet(dim, bases, standard_form=True)
