"""Closed-form solutions of the MU conditions against the standard pair
{identity, Fourier-type Hadamard} in dimensions 2-5, plus constructors for
every named matrix used by the classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .matrices import ComplexMatrix, MonomialMatrix, PhaseMatrix, PhaseVector

HALF_PI = math.pi / 2.0
# snapping window for the special point x = pi/2 given as a float
X_SNAP_TOL = 1e-9


class DomainError(ValueError):
    """A parameter lies outside its documented range."""


class UnknownName(ValueError):
    """Unrecognized named matrix."""


@dataclass(frozen=True)
class VectorFamily:
    """One-parameter family of dephased vectors, rows theta_j = c_j + m_j*t.

    Constants are quarter-turn exponents (units of pi/2) so members at nice
    parameters stay exactly representable; multipliers are 0 or 1.  The
    parameter runs over [0, pi).
    """

    dim: int
    label: str
    const_quarter_exps: tuple[int, ...]
    multipliers: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.const_quarter_exps) != self.dim or len(self.multipliers) != self.dim:
            raise DomainError("family rows must match the dimension")
        if self.const_quarter_exps[0] != 0 or self.multipliers[0] != 0:
            raise DomainError("family members must be dephased")
        if any(m not in (0, 1) for m in self.multipliers):
            raise DomainError("multipliers must be 0 or 1")

    def angles(self, t: float) -> tuple[float, ...]:
        return tuple(
            (c * HALF_PI + m * t) % (2.0 * math.pi)
            for c, m in zip(self.const_quarter_exps, self.multipliers)
        )

    def member(self, t: float) -> np.ndarray:
        if not (0.0 <= t < math.pi):
            raise DomainError(f"parameter {t} outside [0, pi) for family {self.label}")
        return np.exp(1j * np.array(self.angles(t))) / math.sqrt(self.dim)

    def locate(self, angles, tol: float = 1e-8) -> Optional[float]:
        """The parameter t (mod 2*pi) at which the family passes through the
        given dephased angle vector, or None if it does not."""
        ts = []
        for ang, c, m in zip(angles, self.const_quarter_exps, self.multipliers):
            delta = (ang - c * HALF_PI) % (2.0 * math.pi)
            if m == 0:
                if min(delta, 2.0 * math.pi - delta) > tol:
                    return None
            else:
                ts.append(delta)
        if not ts:
            return None
        base = ts[0]
        for t in ts[1:]:
            diff = abs(t - base)
            if min(diff, 2.0 * math.pi - diff) > tol:
                return None
        return base

    def to_json_dict(self) -> dict:
        return {
            "type": "vector_family",
            "dim": self.dim,
            "label": self.label,
            "const_quarter_exps": list(self.const_quarter_exps),
            "multipliers": list(self.multipliers),
            "param_range": [0.0, math.pi],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "VectorFamily":
        return cls(
            dim=int(obj["dim"]),
            label=str(obj["label"]),
            const_quarter_exps=tuple(int(c) for c in obj["const_quarter_exps"]),
            multipliers=tuple(int(m) for m in obj["multipliers"]),
        )


@dataclass(frozen=True)
class MuVectorSolution:
    """All dephased vectors MU to the identity and to a reference Hadamard."""

    dim: int
    context: str
    discrete: tuple[PhaseVector, ...]
    families: tuple[VectorFamily, ...] = ()

    @property
    def n_discrete(self) -> int:
        return len(self.discrete)

    @property
    def n_families(self) -> int:
        return len(self.families)

    def to_json_dict(self) -> dict:
        return {
            "type": "mu_vector_solution",
            "dim": self.dim,
            "context": self.context,
            "discrete": [v.to_json_dict() for v in self.discrete],
            "families": [f.to_json_dict() for f in self.families],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "MuVectorSolution":
        return cls(
            dim=int(obj["dim"]),
            context=str(obj["context"]),
            discrete=tuple(PhaseVector.from_json_dict(v) for v in obj["discrete"]),
            families=tuple(VectorFamily.from_json_dict(f) for f in obj["families"]),
        )


# ---------------------------------------------------------------------------
# the d = 4 family catalog
#
# Against {I, F4(x)} the solutions form four one-parameter families for every
# x (h-type, unbiased to all F4(x) columns), plus eight more at the symmetric
# point x = pi/2 (k-type and j-type).  Constants are in units of pi/2.

_H_FAMILIES = (
    VectorFamily(4, "h1", (0, 0, 0, 2), (0, 0, 1, 1)),
    VectorFamily(4, "h2", (0, 0, 2, 0), (0, 0, 1, 1)),
    VectorFamily(4, "h3", (0, 2, 0, 0), (0, 0, 1, 1)),
    VectorFamily(4, "h4", (0, 2, 2, 2), (0, 0, 1, 1)),
)
_K_FAMILIES = (
    VectorFamily(4, "k1", (0, 0, 0, 2), (0, 1, 1, 0)),
    VectorFamily(4, "k2", (0, 2, 2, 2), (0, 1, 1, 0)),
    VectorFamily(4, "k3", (0, 0, 2, 0), (0, 1, 1, 0)),
    VectorFamily(4, "k4", (0, 2, 0, 0), (0, 1, 1, 0)),
)
_J_FAMILIES = (
    VectorFamily(4, "j1", (0, 0, 2, 0), (0, 1, 0, 1)),
    VectorFamily(4, "j2", (0, 2, 2, 2), (0, 1, 0, 1)),
    VectorFamily(4, "j3", (0, 0, 0, 2), (0, 1, 0, 1)),
    VectorFamily(4, "j4", (0, 2, 0, 0), (0, 1, 0, 1)),
)

FAMILY_CATALOG = {f.label: f for f in _H_FAMILIES + _K_FAMILIES + _J_FAMILIES}


def family_member(family: Union[VectorFamily, str], t: float) -> np.ndarray:
    """Evaluate a family (by object or label) at parameter t in [0, pi)."""
    if isinstance(family, str):
        try:
            family = FAMILY_CATALOG[family]
        except KeyError:
            raise UnknownName(f"unknown family label {family!r}") from None
    return family.member(t)


def solve_d2() -> MuVectorSolution:
    """Vectors MU to both I and F2: the two circular-polarization vectors."""
    return MuVectorSolution(
        2,
        "F2",
        (PhaseVector(4, (0, 1)), PhaseVector(4, (0, 3))),
    )


def solve_d3() -> MuVectorSolution:
    """Vectors MU to both I and F3: six cube-root vectors, two bases' worth."""
    exps = ((0, 1, 1), (0, 2, 0), (0, 0, 2), (0, 2, 2), (0, 1, 0), (0, 0, 1))
    return MuVectorSolution(3, "F3", tuple(PhaseVector(3, e) for e in exps))


def solve_d4(x: float) -> MuVectorSolution:
    """Vectors MU to both I and F4(x); 4 families, or 12 at x = pi/2."""
    if not (0.0 <= x <= math.pi):
        raise DomainError(f"x = {x} outside [0, pi]")
    families = _H_FAMILIES
    if abs(x - HALF_PI) < X_SNAP_TOL:
        families = _H_FAMILIES + _K_FAMILIES + _J_FAMILIES
    return MuVectorSolution(4, f"F4(x={x!r})", (), families)


def tabulated_d5_vectors() -> MuVectorSolution:
    """The twenty vectors MU to both I and F5: columns of the four enphased
    Fourier bases.  Completeness is certified by the numeric search."""
    diag = (0, 1, 4, 4, 1)
    vecs = []
    for k in range(1, 5):
        for j in range(5):
            vecs.append(PhaseVector(5, tuple((i * j + k * diag[i]) % 5 for i in range(5))))
    return MuVectorSolution(5, "F5", tuple(vecs))


# ---------------------------------------------------------------------------
# named matrices


def _fourier_exps(d: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple((i * j) % d for j in range(d)) for i in range(d))


_D5_EXPS = (0, 1, 4, 4, 1)
_D3_EXPS = (0, 1, 1)


def _f4(x: float) -> Union[PhaseMatrix, ComplexMatrix]:
    if abs(x) < X_SNAP_TOL:
        return PhaseMatrix(
            4, 4, ((0, 0, 0, 0), (0, 0, 2, 2), (0, 2, 1, 3), (0, 2, 3, 1))
        )
    if abs(x - HALF_PI) < X_SNAP_TOL:
        return PhaseMatrix(
            4, 4, ((0, 0, 0, 0), (0, 0, 2, 2), (0, 2, 2, 0), (0, 2, 0, 2))
        )
    e = np.exp(1j * x)
    arr = 0.5 * np.array(
        [
            [1, 1, 1, 1],
            [1, 1, -1, -1],
            [1, -1, 1j * e, -1j * e],
            [1, -1, -1j * e, 1j * e],
        ]
    )
    return ComplexMatrix(4, arr)


def _h4(y: float, z: float) -> Union[PhaseMatrix, ComplexMatrix]:
    if abs(y - HALF_PI) < X_SNAP_TOL and abs(z - HALF_PI) < X_SNAP_TOL:
        return PhaseMatrix(
            4, 4, ((0, 0, 0, 0), (0, 0, 2, 2), (3, 1, 1, 3), (1, 3, 1, 3))
        )
    ey, ez = np.exp(1j * y), np.exp(1j * z)
    arr = 0.5 * np.array(
        [
            [1, 1, 1, 1],
            [1, 1, -1, -1],
            [-ey, ey, ez, -ez],
            [ey, -ey, ez, -ez],
        ]
    )
    return ComplexMatrix(4, arr)


def _j4(r: float, s: float) -> Union[PhaseMatrix, ComplexMatrix]:
    if abs(r - HALF_PI) < X_SNAP_TOL and abs(s - HALF_PI) < X_SNAP_TOL:
        return PhaseMatrix(
            4, 4, ((0, 0, 0, 0), (1, 3, 1, 3), (2, 2, 0, 0), (1, 3, 3, 1))
        )
    er, es = np.exp(1j * r), np.exp(1j * s)
    arr = 0.5 * np.array(
        [
            [1, 1, 1, 1],
            [er, -er, es, -es],
            [-1, -1, 1, 1],
            [er, -er, -es, es],
        ]
    )
    return ComplexMatrix(4, arr)


def _k4(t: float, u: float) -> Union[PhaseMatrix, ComplexMatrix]:
    if abs(t - HALF_PI) < X_SNAP_TOL and abs(u - HALF_PI) < X_SNAP_TOL:
        return PhaseMatrix(
            4, 4, ((0, 0, 0, 0), (1, 3, 1, 3), (1, 3, 3, 1), (2, 2, 0, 0))
        )
    et, eu = np.exp(1j * t), np.exp(1j * u)
    arr = 0.5 * np.array(
        [
            [1, 1, 1, 1],
            [et, -et, eu, -eu],
            [et, -et, -eu, eu],
            [-1, -1, 1, 1],
        ]
    )
    return ComplexMatrix(4, arr)


def build_named(name: str, **params) -> Union[PhaseMatrix, ComplexMatrix, MonomialMatrix]:
    """Construct a named matrix.

    F2, F3, F5: Fourier matrices.  F4(x): the one-parameter Fourier family.
    H2: the circular-polarization basis.  H3(k), H5(k): the enphased Fourier
    bases D**k F.  D3, D5 (alias D): the enphasing diagonals.  H4(y, z),
    J4(r, s), K4(t, u): the d = 4 parametric Hadamards assembled from the h,
    j, k vector families.  Matrices are exact whenever their parameters sit
    at the special points 0 or pi/2.
    """

    def angle(key: str) -> float:
        if key not in params:
            raise DomainError(f"{name} needs parameter {key!r}")
        v = float(params.pop(key))
        if not (0.0 <= v <= math.pi):
            raise DomainError(f"{key} = {v} outside [0, pi]")
        return v

    known = {
        "F2",
        "F3",
        "F4",
        "F5",
        "H2",
        "H3",
        "H4",
        "H5",
        "J4",
        "K4",
        "D",
        "D3",
        "D5",
    }
    if name not in known:
        raise UnknownName(f"unknown matrix name {name!r}")
    if name == "F2":
        out: Union[PhaseMatrix, ComplexMatrix, MonomialMatrix] = PhaseMatrix(
            2, 2, _fourier_exps(2)
        )
    elif name == "F3":
        out = PhaseMatrix(3, 3, _fourier_exps(3))
    elif name == "F5":
        out = PhaseMatrix(5, 5, _fourier_exps(5))
    elif name == "F4":
        out = _f4(angle("x"))
    elif name == "H2":
        out = PhaseMatrix(2, 4, ((0, 0), (1, 3)))
    elif name == "H3":
        k = int(params.pop("k", 1))
        if k not in (1, 2):
            raise DomainError(f"H3 index k must be 1 or 2, got {k}")
        f3 = PhaseMatrix(3, 3, _fourier_exps(3))
        exps = tuple(
            tuple((f3.exps[i][j] + k * _D3_EXPS[i]) % 3 for j in range(3))
            for i in range(3)
        )
        out = PhaseMatrix(3, 3, exps)
    elif name == "H5":
        k = int(params.pop("k", 1))
        if k not in (1, 2, 3, 4):
            raise DomainError(f"H5 index k must be in 1..4, got {k}")
        out = PhaseMatrix(
            5,
            5,
            tuple(
                tuple((i * j + k * _D5_EXPS[i]) % 5 for j in range(5))
                for i in range(5)
            ),
        )
    elif name == "H4":
        out = _h4(angle("y"), angle("z"))
    elif name == "J4":
        out = _j4(angle("r"), angle("s"))
    elif name == "K4":
        out = _k4(angle("t"), angle("u"))
    elif name == "D3":
        out = MonomialMatrix.diagonal(_D3_EXPS, 3)
    else:  # "D" / "D5"
        out = MonomialMatrix.diagonal(_D5_EXPS, 5)
    if params:
        raise DomainError(f"unused parameters for {name}: {sorted(params)}")
    return out
