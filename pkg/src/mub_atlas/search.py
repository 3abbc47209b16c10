"""Numeric search for all vectors MU to the identity and a given Hadamard.

Dephased candidates v(a) = (1, e^{i a_1}, ..., e^{i a_{d-1}})/sqrt(d) are
driven by damped Gauss-Newton iteration on the residuals
F_k(a) = |<h_k, v>|^2 - 1/d over a full grid of starting angles, then the
converged points are clustered on the torus.  Isolated clusters are reported
as discrete solutions; the rank of the Jacobian at each cluster center
estimates the local solution-manifold dimension, so one-parameter families
show up as dimension-1 clusters.  Everything is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree

from .matrices import AnyMatrix, is_hadamard
from .solvers import MuVectorSolution, VectorFamily

TWO_PI = 2.0 * math.pi


class NotHadamard(ValueError):
    """The search target is not a complex Hadamard matrix."""


class NoConvergence(RuntimeError):
    """No grid seed converged; the grid is too coarse."""


@dataclass(frozen=True)
class SearchConfig:
    grid_points_per_angle: Optional[int] = None  # None: 24 for d <= 4, 14 for d = 5
    newton_max_iter: int = 60
    newton_tol: float = 1e-12
    cluster_radius: float = 1e-4
    residual_accept: float = 1e-9
    svd_tol: float = 1e-7

    def __post_init__(self) -> None:
        if self.cluster_radius <= self.newton_tol:
            raise ValueError("cluster_radius must exceed newton_tol")

    def resolved_grid(self, dim: int) -> int:
        if self.grid_points_per_angle is not None:
            return self.grid_points_per_angle
        return 14 if dim >= 5 else 24


@dataclass(frozen=True)
class Cluster:
    center: tuple[float, ...]  # full dephased angle vector, leading entry 0
    dimension: int
    size: int
    residual: float


@dataclass(frozen=True)
class IsolatedVector:
    angles: tuple[float, ...]  # full dephased angle vector, leading entry 0
    residual: float
    cluster_size: int

    def vector(self) -> np.ndarray:
        d = len(self.angles)
        return np.exp(1j * np.asarray(self.angles)) / math.sqrt(d)


@dataclass(frozen=True)
class SearchResult:
    dim: int
    clusters: tuple[Cluster, ...]
    isolated: tuple[IsolatedVector, ...]
    dimension_estimate: tuple[int, ...]
    raw_cluster_sizes: tuple[int, ...]
    n_seeds: int
    n_converged: int
    config: SearchConfig = field(repr=False)


def _residuals(a_conj_t: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    n, dm1 = alphas.shape
    d = dm1 + 1
    v = np.empty((n, d), dtype=complex)
    v[:, 0] = 1.0 / math.sqrt(d)
    v[:, 1:] = np.exp(1j * alphas) / math.sqrt(d)
    s = v @ a_conj_t.T  # s[n, k] = <h_k, v>
    return np.abs(s) ** 2 - 1.0 / d


def _residual_and_jacobian(a_conj_t: np.ndarray, alphas: np.ndarray):
    """Residuals F (n, d) and Jacobian J (n, d, d-1) at each angle row."""
    n, dm1 = alphas.shape
    d = dm1 + 1
    v = np.empty((n, d), dtype=complex)
    v[:, 0] = 1.0 / math.sqrt(d)
    v[:, 1:] = np.exp(1j * alphas) / math.sqrt(d)
    s = v @ a_conj_t.T
    f = np.abs(s) ** 2 - 1.0 / d
    # dF_k/da_m = 2 Re( conj(s_k) * conj(H[m,k]) * i v_m )
    j = 2.0 * (
        s.conj()[:, :, None] * a_conj_t[None, :, 1:] * (1j * v[:, None, 1:])
    ).real
    return f, j


def _newton_polish(a_conj_t: np.ndarray, alphas: np.ndarray, cfg: SearchConfig):
    """Damped Gauss-Newton on a batch of angle vectors; returns (alphas, res)."""
    n, dm1 = alphas.shape
    ridge = 1e-13
    active = np.ones(n, dtype=bool)
    cur = alphas.copy()
    res = np.max(np.abs(_residuals(a_conj_t, cur)), axis=1)
    for _ in range(cfg.newton_max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        f, j = _residual_and_jacobian(a_conj_t, cur[idx])
        jt = np.swapaxes(j, 1, 2)
        g = jt @ j
        g[:, np.arange(dm1), np.arange(dm1)] += ridge
        rhs = (jt @ f[:, :, None])[:, :, 0]
        try:
            delta = -np.linalg.solve(g, rhs[..., None])[..., 0]
        except np.linalg.LinAlgError:
            delta = -np.einsum("nml,nl->nm", np.linalg.pinv(g), rhs)
        base_res = res[idx]
        step = np.ones(len(idx))
        new_alpha = cur[idx] + delta
        new_res = np.max(np.abs(_residuals(a_conj_t, new_alpha)), axis=1)
        for _ in range(4):
            worse = new_res > base_res
            if not worse.any():
                break
            step[worse] *= 0.5
            retry = cur[idx[worse]] + step[worse][:, None] * delta[worse]
            new_alpha[worse] = retry
            new_res[worse] = np.max(np.abs(_residuals(a_conj_t, retry)), axis=1)
        cur[idx] = new_alpha
        res[idx] = new_res
        small_step = np.max(np.abs(step[:, None] * delta), axis=1) < cfg.newton_tol
        done = (new_res < 1e-14) | small_step
        active[idx[done]] = False
    return cur, res


def _cluster(points: np.ndarray, radius: float) -> list[np.ndarray]:
    """Single-linkage clusters under the max-angle circular metric.

    Converged points pile up on shared roots by the thousand, so they are
    first collapsed onto a grid much finer than the linkage radius; the
    pair graph is then built between representatives only.
    """
    n, dm1 = points.shape
    quantum = min(1e-5, radius / 10.0)
    decimals = max(0, -int(math.floor(math.log10(quantum))))
    reps, inverse = np.unique(np.round(points, decimals), axis=0, return_inverse=True)
    m = len(reps)
    eff = radius + 2.0 * quantum
    emb = np.concatenate([np.cos(reps), np.sin(reps)], axis=1)
    tree = cKDTree(emb)
    pairs = tree.query_pairs(r=eff * math.sqrt(dm1) + 1e-12, output_type="ndarray")
    parent = np.arange(m)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    if len(pairs):
        diff = np.abs(reps[pairs[:, 0]] - reps[pairs[:, 1]])
        circ = np.minimum(diff, TWO_PI - diff)
        ok = np.max(circ, axis=1) <= eff
        for a, b in pairs[ok]:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    root_of_rep = np.array([find(i) for i in range(m)])
    groups: dict[int, list[int]] = {}
    for i, rep in enumerate(inverse):
        groups.setdefault(int(root_of_rep[rep]), []).append(i)
    return [np.array(v) for v in groups.values()]


def _circular_mean(points: np.ndarray) -> np.ndarray:
    z = np.exp(1j * points).mean(axis=0)
    return np.angle(z) % TWO_PI


def search(matrix: AnyMatrix, config: Optional[SearchConfig] = None) -> SearchResult:
    """Find all dephased vectors MU to both I and the given Hadamard."""
    cfg = config or SearchConfig()
    ok, witness = is_hadamard(matrix)
    if not ok:
        raise NotHadamard(f"search target is not Hadamard: {witness}")
    arr = matrix.to_complex_array()
    d = arr.shape[0]
    a_conj_t = arr.conj().T  # rows are conjugated columns of the target
    g = cfg.resolved_grid(d)
    dm1 = d - 1
    axes = [np.arange(g) * (TWO_PI / g)] * dm1
    mesh = np.meshgrid(*axes, indexing="ij")
    seeds = np.stack([m.ravel() for m in mesh], axis=1)
    n_seeds = len(seeds)

    chunk = 65536
    sols = []
    for start in range(0, n_seeds, chunk):
        alphas, res = _newton_polish(a_conj_t, seeds[start : start + chunk], cfg)
        keep = res < cfg.residual_accept
        if keep.any():
            sols.append(alphas[keep] % TWO_PI)
    if not sols:
        raise NoConvergence(
            f"no seed converged below {cfg.residual_accept} on a {g}^{dm1} grid"
        )
    points = np.concatenate(sols, axis=0)
    n_converged = len(points)

    clusters = []
    for members in _cluster(points, cfg.cluster_radius):
        group = points[members]
        ref = group[0]
        unwrapped = ref + np.angle(np.exp(1j * (group - ref)))
        center = _circular_mean(unwrapped)
        polished, res = _newton_polish(a_conj_t, center[None, :], cfg)
        center = polished[0] % TWO_PI
        _, j = _residual_and_jacobian(a_conj_t, center[None, :])
        sv = np.linalg.svd(j[0], compute_uv=False)
        rank = int(np.sum(sv > cfg.svd_tol))
        clusters.append(
            Cluster(
                center=(0.0, *center.tolist()),
                dimension=dm1 - rank,
                size=int(len(members)),
                residual=float(res[0]),
            )
        )
    clusters.sort(key=lambda c: tuple(round(x, 9) for x in c.center))
    isolated = tuple(
        IsolatedVector(c.center, c.residual, c.size)
        for c in clusters
        if c.dimension == 0
    )
    return SearchResult(
        dim=d,
        clusters=tuple(clusters),
        isolated=isolated,
        dimension_estimate=tuple(c.dimension for c in clusters),
        raw_cluster_sizes=tuple(c.size for c in clusters),
        n_seeds=n_seeds,
        n_converged=n_converged,
        config=cfg,
    )


# ---------------------------------------------------------------------------
# matching numeric output against closed-form solutions


@dataclass(frozen=True)
class FamilyAssignment:
    cluster_index: int
    label: str
    parameter: float
    deviation: float


@dataclass(frozen=True)
class MatchReport:
    perfect: bool
    pairs: tuple[tuple[int, int], ...]  # (isolated index, discrete index)
    max_angle_error: float
    unmatched_isolated: tuple[int, ...]
    unmatched_expected: tuple[int, ...]
    family_assignments: tuple[FamilyAssignment, ...]
    families_covered: tuple[str, ...]
    families_missed: tuple[str, ...]
    unassigned_clusters: tuple[int, ...]


def _circ_max_dist(a: Sequence[float], b: Sequence[float]) -> float:
    diff = np.abs(np.asarray(a) - np.asarray(b))
    return float(np.max(np.minimum(diff, TWO_PI - diff)))


def _assign_family(
    families: Sequence[VectorFamily], angles: Sequence[float], tol: float
):
    """Best family through the given angles, honoring the [0, pi) split."""
    best = None
    for fam in families:
        t = fam.locate(angles, tol)
        if t is None:
            continue
        label = fam.label
        dev = _circ_max_dist(angles, fam.angles(t % TWO_PI))
        if t >= math.pi:
            # partner family carries the other half of the circle
            partner = _partner_label(fam.label)
            if partner is not None:
                t = t - math.pi
                label = partner
        if best is None or dev < best[2]:
            best = (label, t % TWO_PI, dev)
    return best


def _partner_label(label: str) -> Optional[str]:
    pairs = {
        "h1": "h2", "h2": "h1", "h3": "h4", "h4": "h3",
        "k1": "k2", "k2": "k1", "k3": "k4", "k4": "k3",
        "j1": "j2", "j2": "j1", "j3": "j4", "j4": "j3",
    }
    return pairs.get(label)


def match_against(
    result: SearchResult,
    expected: MuVectorSolution,
    tol: float = 1e-8,
    family_tol: float = 1e-6,
) -> MatchReport:
    """Match isolated numeric vectors to discrete closed-form vectors and
    clusters to parametric families.

    family_tol is looser than tol: where solution curves cross, the Jacobian
    is rank-deficient and polished centers are only square-root accurate.
    """
    iso = list(result.isolated)
    exp = list(expected.discrete)
    if expected.dim != result.dim:
        return MatchReport(
            perfect=False,
            pairs=(),
            max_angle_error=math.inf,
            unmatched_isolated=tuple(range(len(iso))),
            unmatched_expected=tuple(range(len(exp))),
            family_assignments=(),
            families_covered=(),
            families_missed=tuple(sorted(f.label for f in expected.families)),
            unassigned_clusters=tuple(range(len(result.clusters))),
        )
    pairs: list[tuple[int, int]] = []
    max_err = 0.0
    unmatched_iso: list[int] = []
    unmatched_exp: list[int] = []
    if iso and exp:
        cost = np.array(
            [[_circ_max_dist(v.angles, e.angles()) for e in exp] for v in iso]
        )
        rows, cols = linear_sum_assignment(cost)
        taken_i, taken_e = set(), set()
        for i, j in zip(rows, cols):
            if cost[i, j] <= tol:
                pairs.append((int(i), int(j)))
                taken_i.add(int(i))
                taken_e.add(int(j))
                max_err = max(max_err, float(cost[i, j]))
        unmatched_iso = [i for i in range(len(iso)) if i not in taken_i]
        unmatched_exp = [j for j in range(len(exp)) if j not in taken_e]
    else:
        unmatched_iso = list(range(len(iso)))
        unmatched_exp = list(range(len(exp)))

    assignments: list[FamilyAssignment] = []
    unassigned: list[int] = []
    covered: set[str] = set()
    if expected.families:
        for ci, cluster in enumerate(result.clusters):
            found = _assign_family(expected.families, cluster.center, family_tol)
            if found is None:
                unassigned.append(ci)
            else:
                label, t, dev = found
                assignments.append(FamilyAssignment(ci, label, t, dev))
                covered.add(label)
    missed = sorted(f.label for f in expected.families if f.label not in covered)
    perfect = (
        not unmatched_iso
        and not unmatched_exp
        and not missed
        and not unassigned
    )
    return MatchReport(
        perfect=perfect,
        pairs=tuple(pairs),
        max_angle_error=max_err,
        unmatched_isolated=tuple(unmatched_iso),
        unmatched_expected=tuple(unmatched_exp),
        family_assignments=tuple(assignments),
        families_covered=tuple(sorted(covered)),
        families_missed=tuple(missed),
        unassigned_clusters=tuple(unassigned),
    )


def result_to_json(result: SearchResult) -> dict:
    return {
        "type": "search_result",
        "dim": result.dim,
        "n_seeds": result.n_seeds,
        "n_converged": result.n_converged,
        "clusters": [
            {
                "center": list(c.center),
                "dimension": c.dimension,
                "size": c.size,
                "residual": c.residual,
            }
            for c in result.clusters
        ],
        "isolated": [
            {
                "angles": list(v.angles),
                "residual": v.residual,
                "cluster_size": v.cluster_size,
            }
            for v in result.isolated
        ],
        "dimension_estimate": list(result.dimension_estimate),
        "raw_cluster_sizes": list(result.raw_cluster_sizes),
        "config": {
            "grid_points_per_angle": result.config.grid_points_per_angle,
            "newton_max_iter": result.config.newton_max_iter,
            "newton_tol": result.config.newton_tol,
            "cluster_radius": result.config.cluster_radius,
            "residual_accept": result.config.residual_accept,
            "svd_tol": result.config.svd_tol,
        },
    }


def match_to_json(report: MatchReport) -> dict:
    return {
        "type": "match_report",
        "perfect": report.perfect,
        "pairs": [list(p) for p in report.pairs],
        "max_angle_error": report.max_angle_error,
        "unmatched_isolated": list(report.unmatched_isolated),
        "unmatched_expected": list(report.unmatched_expected),
        "family_assignments": [
            {
                "cluster": a.cluster_index,
                "label": a.label,
                "parameter": a.parameter,
                "deviation": a.deviation,
            }
            for a in report.family_assignments
        ],
        "families_covered": list(report.families_covered),
        "families_missed": list(report.families_missed),
        "unassigned_clusters": list(report.unassigned_clusters),
    }
