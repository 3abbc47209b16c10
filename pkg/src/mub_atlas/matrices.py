"""Matrix types for MU-basis work.

Exact matrices carry cyclotomic-integer numerators plus a power-of-1/sqrt(d)
scale: the value of an entry is ``numerator * d**(-scale/2)``.  A
``PhaseMatrix`` is the special case where every numerator is a single root of
unity and the scale is 1, i.e. a unimodular matrix divided by sqrt(d).
``ComplexMatrix`` is the float backend.  All types are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import lcm
from typing import Optional, Sequence, Union

import numpy as np

from .cyclotomic import SQRT_DIM, CycInt, UnsupportedOrder

FLOAT_TOL = 1e-9


class Mismatch(ValueError):
    """Incompatible shapes, orders or value domains."""


class NotUnitary(ValueError):
    """A basis matrix fails its exact or float unitarity check."""


class NotStandardForm(ValueError):
    """A basis set violates the dephased standard form."""


class BackendMismatch(ValueError):
    """Exact and float objects were mixed where one backend is required."""


# ---------------------------------------------------------------------------
# columns


@dataclass(frozen=True)
class PhaseVector:
    """A dephased unit vector (1, w**e_1, ..., w**e_{d-1}) / sqrt(d)."""

    order: int
    exps: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "exps", tuple(e % self.order for e in self.exps))

    @property
    def dim(self) -> int:
        return len(self.exps)

    def to_cyc(self) -> "CycVector":
        d = self.dim
        return CycVector(
            d, self.order, 1, tuple(CycInt.root(self.order, e) for e in self.exps)
        )

    def angles(self) -> tuple[float, ...]:
        return tuple(2.0 * math.pi * e / self.order for e in self.exps)

    def to_complex(self) -> np.ndarray:
        d = self.dim
        return np.exp(1j * np.array(self.angles())) / math.sqrt(d)

    def to_json_dict(self) -> dict:
        return {"type": "phase_vector", "order": self.order, "exps": list(self.exps)}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "PhaseVector":
        return cls(order=int(obj["order"]), exps=tuple(int(e) for e in obj["exps"]))


@dataclass(frozen=True)
class CycVector:
    """Exact column: entry value is ``entries[i] * dim**(-scale/2)``."""

    dim: int
    order: int
    scale: int
    entries: tuple[CycInt, ...]

    def embed(self, order: int) -> "CycVector":
        if order == self.order:
            return self
        return CycVector(
            self.dim, order, self.scale, tuple(e.embed(order) for e in self.entries)
        )

    def to_complex(self) -> np.ndarray:
        f = self.dim ** (-self.scale / 2.0)
        return np.array([e.to_complex() for e in self.entries]) * f

    @classmethod
    def basis_vector(cls, dim: int, i: int, order: int = 1) -> "CycVector":
        entries = [CycInt.zero(order) for _ in range(dim)]
        entries[i] = CycInt.one(order)
        return cls(dim, order, 0, tuple(entries))


# ---------------------------------------------------------------------------
# MU overlap


@dataclass(frozen=True)
class Overlap:
    """Classification of a pair of unit columns against the MU conditions."""

    kind: str  # "orthogonal" | "unbiased" | "neither"
    overlap_sq: float  # |<u, v>|**2
    residual: float  # distance from the claimed condition, 0.0 for exact
    scaled_modulus_sq: Optional[int] = None  # |<u, v>|**2 * d**2 when exact


def _as_cyc_vector(u: Union[CycVector, PhaseVector]) -> CycVector:
    if isinstance(u, PhaseVector):
        return u.to_cyc()
    if isinstance(u, CycVector):
        return u
    raise BackendMismatch(f"exact backend needs exact columns, got {type(u).__name__}")


def mu_overlap(
    u: Union[CycVector, PhaseVector, np.ndarray],
    v: Union[CycVector, PhaseVector, np.ndarray],
    backend: str = "exact",
    tol: float = FLOAT_TOL,
) -> Overlap:
    """Classify a pair of unit vectors as orthogonal, unbiased or neither.

    The exact backend decides by rationality of |<u,v>|**2 in the cyclotomic
    ring; the float backend compares against ``tol``.
    """
    if backend == "exact":
        cu, cv = _as_cyc_vector(u), _as_cyc_vector(v)
        if cu.dim != cv.dim:
            raise Mismatch(f"dimension mismatch: {cu.dim} vs {cv.dim}")
        d = cu.dim
        order = lcm(cu.order, cv.order)
        cu, cv = cu.embed(order), cv.embed(order)
        s = CycInt.zero(order)
        for a, b in zip(cu.entries, cv.entries):
            s = s + a.conj() * b
        m2 = (s * s.conj()).is_rational()
        sexp = cu.scale + cv.scale
        if m2 is None:
            # falls between the lattice points; classify numerically
            val = abs(complex(np.vdot(cu.to_complex(), cv.to_complex()))) ** 2
            return Overlap("neither", val, min(val, abs(val - 1.0 / d)), None)
        overlap_sq = m2 / float(d**sexp)
        scaled = m2 * d ** (2 - sexp) if sexp <= 2 else None
        if m2 == 0:
            return Overlap("orthogonal", 0.0, 0.0, scaled)
        if m2 == d ** (sexp - 1):
            return Overlap("unbiased", overlap_sq, 0.0, scaled)
        return Overlap(
            "neither", overlap_sq, min(overlap_sq, abs(overlap_sq - 1.0 / d)), scaled
        )
    if backend == "float":
        fu = u.to_complex() if not isinstance(u, np.ndarray) else u
        fv = v.to_complex() if not isinstance(v, np.ndarray) else v
        if fu.shape != fv.shape:
            raise Mismatch(f"shape mismatch: {fu.shape} vs {fv.shape}")
        d = fu.shape[0]
        val = abs(complex(np.vdot(fu, fv))) ** 2
        if val < tol:
            return Overlap("orthogonal", val, val, None)
        if abs(val - 1.0 / d) < tol:
            return Overlap("unbiased", val, abs(val - 1.0 / d), None)
        return Overlap("neither", val, min(val, abs(val - 1.0 / d)), None)
    raise ValueError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# exact matrices


def _check_perm(perm: Sequence[int], dim: int) -> tuple[int, ...]:
    p = tuple(perm)
    if sorted(p) != list(range(dim)):
        raise Mismatch(f"not a permutation of range({dim}): {p}")
    return p


@dataclass(frozen=True)
class PhaseMatrix:
    """d x d matrix with entries w_q**e / sqrt(d); always Hadamard-shaped."""

    dim: int
    order: int
    exps: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.exps) != self.dim or any(len(r) != self.dim for r in self.exps):
            raise Mismatch(f"need a {self.dim}x{self.dim} exponent grid")
        object.__setattr__(
            self,
            "exps",
            tuple(tuple(e % self.order for e in row) for row in self.exps),
        )

    def entry_root(self, i: int, j: int) -> CycInt:
        return CycInt.root(self.order, self.exps[i][j])

    def column(self, j: int) -> CycVector:
        return CycVector(
            self.dim,
            self.order,
            1,
            tuple(self.entry_root(i, j) for i in range(self.dim)),
        )

    def to_cyc(self) -> "CycMatrix":
        return CycMatrix(
            self.dim,
            self.order,
            1,
            tuple(
                tuple(self.entry_root(i, j) for j in range(self.dim))
                for i in range(self.dim)
            ),
        )

    def dagger(self) -> "PhaseMatrix":
        return PhaseMatrix(
            self.dim,
            self.order,
            tuple(
                tuple(-self.exps[j][i] for j in range(self.dim))
                for i in range(self.dim)
            ),
        )

    def conjugate(self) -> "PhaseMatrix":
        return PhaseMatrix(
            self.dim,
            self.order,
            tuple(tuple(-e for e in row) for row in self.exps),
        )

    def embed(self, order: int) -> "PhaseMatrix":
        if order == self.order:
            return self
        if order % self.order != 0:
            raise Mismatch(f"cannot embed order {self.order} into {order}")
        step = order // self.order
        return PhaseMatrix(
            self.dim, order, tuple(tuple(e * step for e in row) for row in self.exps)
        )

    def __matmul__(self, other: "ExactMatrix") -> "CycMatrix":
        return self.to_cyc() @ other

    def to_complex_array(self) -> np.ndarray:
        ang = 2.0 * np.pi * np.array(self.exps, dtype=float) / self.order
        return np.exp(1j * ang) / math.sqrt(self.dim)

    def to_complex(self) -> "ComplexMatrix":
        return ComplexMatrix(self.dim, self.to_complex_array())

    def to_json_dict(self) -> dict:
        return {
            "type": "phase",
            "dim": self.dim,
            "order": self.order,
            "exps": [list(r) for r in self.exps],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "PhaseMatrix":
        return cls(
            dim=int(obj["dim"]),
            order=int(obj["order"]),
            exps=tuple(tuple(int(e) for e in row) for row in obj["exps"]),
        )


@dataclass(frozen=True)
class CycMatrix:
    """d x d matrix of cyclotomic numerators scaled by d**(-scale/2)."""

    dim: int
    order: int
    scale: int
    entries: tuple[tuple[CycInt, ...], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.dim or any(
            len(r) != self.dim for r in self.entries
        ):
            raise Mismatch(f"need a {self.dim}x{self.dim} entry grid")

    @classmethod
    def identity(cls, dim: int, order: int = 1) -> "CycMatrix":
        one, zero = CycInt.one(order), CycInt.zero(order)
        return cls(
            dim,
            order,
            0,
            tuple(
                tuple(one if i == j else zero for j in range(dim))
                for i in range(dim)
            ),
        )

    def is_identity(self) -> bool:
        return self.equals_rescaled(CycMatrix.identity(self.dim, self.order))

    def embed(self, order: int) -> "CycMatrix":
        if order == self.order:
            return self
        return CycMatrix(
            self.dim,
            order,
            self.scale,
            tuple(tuple(e.embed(order) for e in row) for row in self.entries),
        )

    def column(self, j: int) -> CycVector:
        return CycVector(
            self.dim,
            self.order,
            self.scale,
            tuple(self.entries[i][j] for i in range(self.dim)),
        )

    def dagger(self) -> "CycMatrix":
        return CycMatrix(
            self.dim,
            self.order,
            self.scale,
            tuple(
                tuple(self.entries[j][i].conj() for j in range(self.dim))
                for i in range(self.dim)
            ),
        )

    def conjugate(self) -> "CycMatrix":
        return CycMatrix(
            self.dim,
            self.order,
            self.scale,
            tuple(tuple(e.conj() for e in row) for row in self.entries),
        )

    def __matmul__(self, other: "ExactMatrix") -> "CycMatrix":
        if isinstance(other, PhaseMatrix):
            other = other.to_cyc()
        if not isinstance(other, CycMatrix):
            return NotImplemented
        if other.dim != self.dim:
            raise Mismatch(f"dimension mismatch: {self.dim} vs {other.dim}")
        order = lcm(self.order, other.order)
        a, b = self.embed(order), other.embed(order)
        d = self.dim
        rows = []
        for i in range(d):
            row = []
            for j in range(d):
                s = CycInt.zero(order)
                for k in range(d):
                    s = s + a.entries[i][k] * b.entries[k][j]
                row.append(s)
            rows.append(tuple(row))
        return CycMatrix(d, order, a.scale + b.scale, tuple(rows)).normalize()

    def normalize(self) -> "CycMatrix":
        """Divide all numerators by d while possible, lowering scale by 2."""
        m = self
        d = self.dim
        while m.scale >= 2:
            divided = []
            ok = True
            for row in m.entries:
                new_row = []
                for e in row:
                    if any(c % d for c in e.coeffs):
                        ok = False
                        break
                    new_row.append(CycInt(m.order, [c // d for c in e.coeffs]))
                if not ok:
                    break
                divided.append(tuple(new_row))
            if not ok:
                break
            m = CycMatrix(d, m.order, m.scale - 2, tuple(divided))
        return m

    def _rescale_up(self, steps: int) -> "CycMatrix":
        """Multiply numerators by sqrt(d)**steps (exact orders only)."""
        if steps == 0:
            return self
        d = self.dim
        if steps % 2 == 0:
            factor = CycInt.integer(self.order, d ** (steps // 2))
        else:
            root = SQRT_DIM.get(d)
            if root is None or self.order % root.order != 0:
                raise UnsupportedOrder(
                    f"sqrt({d}) is not available in order {self.order}"
                )
            factor = root.embed(self.order) * d ** ((steps - 1) // 2)
        return CycMatrix(
            d,
            self.order,
            self.scale + steps,
            tuple(tuple(e * factor for e in row) for row in self.entries),
        )

    def equals_rescaled(self, other: "ExactMatrix") -> bool:
        """Value equality, tolerating different scale bookkeeping."""
        if isinstance(other, PhaseMatrix):
            other = other.to_cyc()
        if self.dim != other.dim:
            return False
        order = lcm(self.order, other.order)
        a, b = self.embed(order).normalize(), other.embed(order).normalize()
        if a.scale < b.scale:
            a, b = b, a
        diff = a.scale - b.scale
        try:
            b = b._rescale_up(diff)
        except UnsupportedOrder:
            return False
        return a.entries == b.entries

    def try_phase(self) -> Optional[PhaseMatrix]:
        """Downcast to a PhaseMatrix if every entry is a root over sqrt(d)."""
        m = self.normalize()
        d, q = m.dim, m.order
        try:
            target = CycMatrix.identity(d, q)._rescale_up(m.scale - 1)
        except UnsupportedOrder:
            return None
        unit = target.entries[0][0]  # numerator representing d**((scale-1)/2)
        roots = [CycInt.root(q, k) * unit for k in range(q)]
        exps = []
        for row in m.entries:
            exp_row = []
            for e in row:
                for k, r in enumerate(roots):
                    if e == r:
                        exp_row.append(k)
                        break
                else:
                    return None
            exps.append(tuple(exp_row))
        return PhaseMatrix(d, q, tuple(exps))

    def to_complex_array(self) -> np.ndarray:
        f = self.dim ** (-self.scale / 2.0)
        return (
            np.array([[e.to_complex() for e in row] for row in self.entries]) * f
        )

    def to_complex(self) -> "ComplexMatrix":
        return ComplexMatrix(self.dim, self.to_complex_array())

    def to_json_dict(self) -> dict:
        return {
            "type": "cyclotomic",
            "dim": self.dim,
            "order": self.order,
            "scale": self.scale,
            "coeffs": [[list(e.coeffs) for e in row] for row in self.entries],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "CycMatrix":
        order = int(obj["order"])
        return cls(
            dim=int(obj["dim"]),
            order=order,
            scale=int(obj["scale"]),
            entries=tuple(
                tuple(CycInt(order, e) for e in row) for row in obj["coeffs"]
            ),
        )


ExactMatrix = Union[PhaseMatrix, CycMatrix]


@dataclass(frozen=True)
class ComplexMatrix:
    """Float-backend d x d matrix."""

    dim: int
    array: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        a = np.array(self.array, dtype=complex, order="C")
        if a.shape != (self.dim, self.dim):
            raise Mismatch(f"need shape ({self.dim}, {self.dim}), got {a.shape}")
        if not np.all(np.isfinite(a.view(float))):
            raise Mismatch("matrix entries must be finite")
        a.setflags(write=False)
        object.__setattr__(self, "array", a)

    def column(self, j: int) -> np.ndarray:
        return self.array[:, j]

    def dagger(self) -> "ComplexMatrix":
        return ComplexMatrix(self.dim, self.array.conj().T)

    def conjugate(self) -> "ComplexMatrix":
        return ComplexMatrix(self.dim, self.array.conj())

    def __matmul__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        return ComplexMatrix(self.dim, self.array @ other.array)

    def to_complex_array(self) -> np.ndarray:
        return self.array

    def to_json_dict(self) -> dict:
        return {
            "type": "complex",
            "dim": self.dim,
            "re": self.array.real.tolist(),
            "im": self.array.imag.tolist(),
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ComplexMatrix":
        return cls(
            dim=int(obj["dim"]),
            array=np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"]),
        )


AnyMatrix = Union[PhaseMatrix, CycMatrix, ComplexMatrix]


def matrix_from_json(obj: dict) -> AnyMatrix:
    kinds = {
        "phase": PhaseMatrix,
        "cyclotomic": CycMatrix,
        "complex": ComplexMatrix,
    }
    try:
        cls = kinds[obj["type"]]
    except (KeyError, TypeError) as exc:
        raise Mismatch(f"unknown matrix encoding: {obj!r:.80}") from exc
    return cls.from_json_dict(obj)


# ---------------------------------------------------------------------------
# monomial matrices


@dataclass(frozen=True)
class MonomialMatrix:
    """Permutation-times-diagonal matrix: M[i][j] = phases[i] * [perm[i] == j].

    Phase kinds: ``exponent`` stores root exponents over ``order``; ``float``
    stores radians; ``cyclotomic`` stores ring numerators whose value is
    ``phases[i] * dim**(-scale/2)`` (each of unit modulus).
    """

    dim: int
    perm: tuple[int, ...]
    kind: str
    phases: tuple
    order: Optional[int] = None
    scale: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "perm", _check_perm(self.perm, self.dim))
        if len(self.phases) != self.dim:
            raise Mismatch(f"need {self.dim} phases")
        if self.kind == "exponent":
            if self.order is None:
                raise Mismatch("exponent phases need an order")
            object.__setattr__(
                self, "phases", tuple(int(e) % self.order for e in self.phases)
            )
        elif self.kind == "float":
            object.__setattr__(self, "phases", tuple(float(a) for a in self.phases))
        elif self.kind == "cyclotomic":
            if self.order is None:
                raise Mismatch("cyclotomic phases need an order")
            if not all(isinstance(p, CycInt) for p in self.phases):
                raise Mismatch("cyclotomic phases must be CycInt numerators")
        else:
            raise Mismatch(f"unknown phase kind {self.kind!r}")

    @classmethod
    def identity(cls, dim: int, order: int = 1) -> "MonomialMatrix":
        return cls(dim, tuple(range(dim)), "exponent", (0,) * dim, order)

    @classmethod
    def permutation(cls, perm: Sequence[int], order: int = 1) -> "MonomialMatrix":
        return cls(len(perm), tuple(perm), "exponent", (0,) * len(perm), order)

    @classmethod
    def diagonal(cls, exps: Sequence[int], order: int) -> "MonomialMatrix":
        d = len(exps)
        return cls(d, tuple(range(d)), "exponent", tuple(exps), order)

    def is_exact(self) -> bool:
        return self.kind != "float"

    def _phase_values(self) -> np.ndarray:
        if self.kind == "exponent":
            return np.exp(2j * np.pi * np.array(self.phases) / self.order)
        if self.kind == "float":
            return np.exp(1j * np.array(self.phases))
        f = self.dim ** (-self.scale / 2.0)
        return np.array([p.to_complex() for p in self.phases]) * f

    def to_complex_array(self) -> np.ndarray:
        m = np.zeros((self.dim, self.dim), dtype=complex)
        vals = self._phase_values()
        for i in range(self.dim):
            m[i, self.perm[i]] = vals[i]
        return m

    def _phase_cyc(self, order: int) -> tuple[CycInt, ...]:
        if self.kind == "exponent":
            step = order // self.order
            return tuple(CycInt.root(order, e * step) for e in self.phases)
        if self.kind == "cyclotomic":
            return tuple(p.embed(order) for p in self.phases)
        raise BackendMismatch("float monomial used in an exact context")

    def dagger(self) -> "MonomialMatrix":
        ip = [0] * self.dim
        for i, p in enumerate(self.perm):
            ip[p] = i
        if self.kind == "exponent":
            phases = tuple(-self.phases[ip[i]] for i in range(self.dim))
        elif self.kind == "float":
            phases = tuple(-self.phases[ip[i]] for i in range(self.dim))
        else:
            phases = tuple(self.phases[ip[i]].conj() for i in range(self.dim))
        return MonomialMatrix(
            self.dim, tuple(ip), self.kind, phases, self.order, self.scale
        )

    def __matmul__(self, other: "MonomialMatrix") -> "MonomialMatrix":
        if not isinstance(other, MonomialMatrix):
            return NotImplemented
        if other.dim != self.dim:
            raise Mismatch("dimension mismatch")
        perm = tuple(other.perm[self.perm[i]] for i in range(self.dim))
        if self.kind == other.kind == "exponent":
            order = lcm(self.order, other.order)
            sa, sb = order // self.order, order // other.order
            phases = tuple(
                self.phases[i] * sa + other.phases[self.perm[i]] * sb
                for i in range(self.dim)
            )
            return MonomialMatrix(self.dim, perm, "exponent", phases, order)
        if self.kind == "float" or other.kind == "float":
            pa = (
                self.phases
                if self.kind == "float"
                else tuple(np.angle(v) for v in self._phase_values())
            )
            pb = (
                other.phases
                if other.kind == "float"
                else tuple(np.angle(v) for v in other._phase_values())
            )
            phases = tuple(pa[i] + pb[self.perm[i]] for i in range(self.dim))
            return MonomialMatrix(self.dim, perm, "float", phases)
        order = lcm(self.order, other.order)
        a, b = self._phase_cyc(order), other._phase_cyc(order)
        phases = tuple(a[i] * b[self.perm[i]] for i in range(self.dim))
        return MonomialMatrix(
            self.dim, perm, "cyclotomic", phases, order, self.scale + other.scale
        )

    def to_json_dict(self) -> dict:
        obj: dict = {
            "type": "monomial",
            "dim": self.dim,
            "perm": list(self.perm),
            "kind": self.kind,
        }
        if self.kind == "exponent":
            obj["order"] = self.order
            obj["phases"] = list(self.phases)
        elif self.kind == "float":
            obj["phases"] = list(self.phases)
        else:
            obj["order"] = self.order
            obj["scale"] = self.scale
            obj["phases"] = [list(p.coeffs) for p in self.phases]
        return obj

    @classmethod
    def from_json_dict(cls, obj: dict) -> "MonomialMatrix":
        kind = obj["kind"]
        if kind == "exponent":
            return cls(
                int(obj["dim"]),
                tuple(obj["perm"]),
                "exponent",
                tuple(int(e) for e in obj["phases"]),
                int(obj["order"]),
            )
        if kind == "float":
            return cls(
                int(obj["dim"]),
                tuple(obj["perm"]),
                "float",
                tuple(float(a) for a in obj["phases"]),
            )
        order = int(obj["order"])
        return cls(
            int(obj["dim"]),
            tuple(obj["perm"]),
            "cyclotomic",
            tuple(CycInt(order, p) for p in obj["phases"]),
            order,
            int(obj.get("scale", 0)),
        )


def monomial_apply(
    mono: MonomialMatrix, matrix: AnyMatrix, side: str
) -> AnyMatrix:
    """Apply a monomial matrix on the given side, staying exact when possible.

    Left application permutes and rephases rows, right application columns.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if mono.dim != matrix.dim:
        raise Mismatch(f"dimension mismatch: {mono.dim} vs {matrix.dim}")
    d = matrix.dim
    if isinstance(matrix, ComplexMatrix) or mono.kind == "float":
        a = matrix.to_complex_array()
        m = mono.to_complex_array()
        res = m @ a if side == "left" else a @ m
        return ComplexMatrix(d, res)
    if isinstance(matrix, PhaseMatrix) and mono.kind == "exponent":
        order = lcm(mono.order, matrix.order)
        pm = matrix.embed(order)
        step = order // mono.order
        ph = tuple(e * step for e in mono.phases)
        if side == "left":
            exps = tuple(
                tuple(ph[i] + pm.exps[mono.perm[i]][j] for j in range(d))
                for i in range(d)
            )
        else:
            ip = [0] * d
            for k, p in enumerate(mono.perm):
                ip[p] = k
            exps = tuple(
                tuple(pm.exps[i][ip[j]] + ph[ip[j]] for j in range(d))
                for i in range(d)
            )
        return PhaseMatrix(d, order, exps)
    cm = matrix.to_cyc() if isinstance(matrix, PhaseMatrix) else matrix
    order = lcm(mono.order, cm.order)
    cm = cm.embed(order)
    ph = mono._phase_cyc(order)
    if side == "left":
        entries = tuple(
            tuple(ph[i] * cm.entries[mono.perm[i]][j] for j in range(d))
            for i in range(d)
        )
    else:
        ip = [0] * d
        for k, p in enumerate(mono.perm):
            ip[p] = k
        entries = tuple(
            tuple(cm.entries[i][ip[j]] * ph[ip[j]] for j in range(d))
            for i in range(d)
        )
    return CycMatrix(d, order, cm.scale + mono.scale, entries).normalize()


# ---------------------------------------------------------------------------
# Hadamard test


def is_hadamard(
    matrix: AnyMatrix, tol: float = FLOAT_TOL
) -> tuple[bool, Optional[dict]]:
    """Check for unimodular entries (times 1/sqrt(d)) and orthogonal columns.

    Returns (verdict, witness); the witness pinpoints the first failing entry
    or column pair.
    """
    d = matrix.dim
    if isinstance(matrix, ComplexMatrix):
        a = matrix.array
        mod = np.abs(a) ** 2 - 1.0 / d
        bad = np.argwhere(np.abs(mod) >= tol)
        if bad.size:
            i, j = map(int, bad[0])
            return False, {
                "kind": "entry",
                "row": i,
                "col": j,
                "abs_sq": float(abs(a[i, j]) ** 2),
            }
        g = a.conj().T @ a
        for i in range(d):
            for j in range(i + 1, d):
                if abs(g[i, j]) >= tol:
                    return False, {
                        "kind": "columns",
                        "col_a": i,
                        "col_b": j,
                        "overlap_sq": float(abs(g[i, j]) ** 2),
                    }
        return True, None
    cm = matrix.to_cyc() if isinstance(matrix, PhaseMatrix) else matrix
    target = d ** (cm.scale - 1)
    for i in range(d):
        for j in range(d):
            if cm.entries[i][j].norm2() != target:
                return False, {
                    "kind": "entry",
                    "row": i,
                    "col": j,
                    "abs_sq": float(abs(cm.entries[i][j].to_complex()) ** 2)
                    * d ** (-cm.scale),
                }
    for i in range(d):
        ci = cm.column(i)
        for j in range(i + 1, d):
            ov = mu_overlap(ci, cm.column(j), backend="exact")
            if ov.kind != "orthogonal":
                return False, {
                    "kind": "columns",
                    "col_a": i,
                    "col_b": j,
                    "overlap_sq": ov.overlap_sq,
                }
    return True, None


# ---------------------------------------------------------------------------
# basis sets


@dataclass(frozen=True)
class AuditResult:
    ok: bool
    exact: bool
    pairs_checked: int
    overlaps_checked: int
    failures: tuple[dict, ...]


@dataclass(frozen=True)
class MuBasisSet:
    """An ordered list of pairwise-MU bases; basis 0 is conventionally I."""

    dim: int
    bases: tuple[AnyMatrix, ...]
    standard_form: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "bases", tuple(self.bases))
        for b in self.bases:
            if b.dim != self.dim:
                raise Mismatch(f"basis of dimension {b.dim} in a dim-{self.dim} set")

    @property
    def n_bases(self) -> int:
        return len(self.bases)

    def is_exact(self) -> bool:
        return all(isinstance(b, (PhaseMatrix, CycMatrix)) for b in self.bases)

    def is_float(self) -> bool:
        return all(isinstance(b, ComplexMatrix) for b in self.bases)

    def to_float(self) -> "MuBasisSet":
        return MuBasisSet(
            self.dim,
            tuple(
                b if isinstance(b, ComplexMatrix) else b.to_complex()
                for b in self.bases
            ),
            self.standard_form,
        )

    def conjugate(self) -> "MuBasisSet":
        return MuBasisSet(self.dim, tuple(b.conjugate() for b in self.bases), False)

    def _columns(self, b: AnyMatrix):
        if isinstance(b, ComplexMatrix):
            return [b.column(j) for j in range(self.dim)]
        cm = b.to_cyc() if isinstance(b, PhaseMatrix) else b
        return [cm.column(j) for j in range(self.dim)]

    def audit(self, tol: float = FLOAT_TOL) -> AuditResult:
        """Check every cross-basis column pair for unbiasedness and every
        within-basis pair for orthonormality."""
        exact = self.is_exact()
        backend = "exact" if exact else "float"
        cols = [self._columns(b) for b in self.bases]
        failures = []
        pairs = 0
        overlaps = 0
        for a in range(self.n_bases):
            for i in range(self.dim):
                for j in range(i, self.dim):
                    ov = mu_overlap(cols[a][i], cols[a][j], backend=backend, tol=tol)
                    overlaps += 1
                    want = "unbiased" if i == j else "orthogonal"
                    if i == j:
                        norm_ok = (
                            abs(ov.overlap_sq - 1.0) < tol
                            if not exact
                            else ov.overlap_sq == 1.0
                        )
                        if not norm_ok:
                            failures.append(
                                {"basis": a, "cols": (i, j), "got": "unnormalized"}
                            )
                        continue
                    if ov.kind != want:
                        failures.append(
                            {"basis": a, "cols": (i, j), "got": ov.kind}
                        )
            for b in range(a + 1, self.n_bases):
                pairs += 1
                for i in range(self.dim):
                    for j in range(self.dim):
                        ov = mu_overlap(
                            cols[a][i], cols[b][j], backend=backend, tol=tol
                        )
                        overlaps += 1
                        if ov.kind != "unbiased":
                            failures.append(
                                {
                                    "bases": (a, b),
                                    "cols": (i, j),
                                    "got": ov.kind,
                                    "overlap_sq": ov.overlap_sq,
                                }
                            )
        return AuditResult(
            ok=not failures,
            exact=exact,
            pairs_checked=pairs,
            overlaps_checked=overlaps,
            failures=tuple(failures),
        )

    def check_standard(self, tol: float = FLOAT_TOL) -> None:
        """Raise NotStandardForm unless the set is dephased.

        Standard form: basis 0 is the identity, the other bases are Hadamard
        with an all-positive first row, and basis 1 (when present) has an
        all-positive first column.
        """
        if not self.bases:
            raise NotStandardForm("empty basis set")
        d = self.dim
        b0 = self.bases[0]
        if isinstance(b0, ComplexMatrix):
            if not np.allclose(b0.array, np.eye(d), atol=tol):
                raise NotStandardForm("basis 0 is not the identity")
        else:
            cm = b0.to_cyc() if isinstance(b0, PhaseMatrix) else b0
            if not cm.is_identity():
                raise NotStandardForm("basis 0 is not the identity")
        inv_sqrt = 1.0 / math.sqrt(d)
        for idx, b in enumerate(self.bases[1:], start=1):
            ok, witness = is_hadamard(b, tol)
            if not ok:
                raise NotStandardForm(f"basis {idx} is not Hadamard: {witness}")
            arr = b.to_complex_array()
            if not np.allclose(arr[0, :], inv_sqrt, atol=tol):
                raise NotStandardForm(f"basis {idx} first row is not all positive")
        if self.n_bases > 1:
            arr = self.bases[1].to_complex_array()
            if not np.allclose(arr[:, 0], inv_sqrt, atol=tol):
                raise NotStandardForm("basis 1 first column is not all positive")

    def canonical_key(self) -> tuple:
        """Order-insensitive structural key (used to deduplicate sets)."""
        parts = []
        for b in self.bases:
            if isinstance(b, ComplexMatrix):
                parts.append(
                    ("complex", tuple(np.round(b.array, 9).flatten().tolist()))
                )
            else:
                cm = b.to_cyc() if isinstance(b, PhaseMatrix) else b
                cm = cm.normalize()
                parts.append(
                    (
                        "cyc",
                        cm.order,
                        cm.scale,
                        tuple(e.coeffs for row in cm.entries for e in row),
                    )
                )
        return tuple(sorted(parts, key=repr))

    def to_json_dict(self) -> dict:
        return {
            "type": "mu_basis_set",
            "dim": self.dim,
            "standard_form": self.standard_form,
            "bases": [b.to_json_dict() for b in self.bases],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "MuBasisSet":
        if obj.get("type") != "mu_basis_set":
            raise Mismatch("not a MU basis set encoding")
        return cls(
            dim=int(obj["dim"]),
            bases=tuple(matrix_from_json(b) for b in obj["bases"]),
            standard_form=bool(obj.get("standard_form", False)),
        )


# ---------------------------------------------------------------------------
# dephasing


def _dephase_exact(mset: MuBasisSet) -> MuBasisSet:
    d = mset.dim
    bases = [
        b.to_cyc() if isinstance(b, PhaseMatrix) else b for b in mset.bases
    ]
    order = lcm(*[b.order for b in bases]) if bases else 1
    bases = [b.embed(order) for b in bases]
    b0 = bases[0]
    if not (b0.dagger() @ b0).is_identity():
        raise NotUnitary("basis 0 is not exactly unitary")
    rotated = [(b0.dagger() @ b).normalize() for b in bases]
    rotated[0] = CycMatrix.identity(d, order)

    def phase_conj(entry: CycInt, scale: int) -> tuple[CycInt, int]:
        # conj(z) has modulus d**((scale-1)/2): as a unit phase it carries
        # declared scale (scale - 1)
        n2 = entry.norm2()
        if n2 != d ** (scale - 1):
            raise NotUnitary("entry is not unimodular; set is not MU-shaped")
        return entry.conj(), scale - 1

    result = [rotated[0]]
    for b in rotated[1:]:
        phases = []
        for j in range(d):
            z, s = phase_conj(b.entries[0][j], b.scale)
            phases.append(z)
        mono = MonomialMatrix(
            d, tuple(range(d)), "cyclotomic", tuple(phases), order, b.scale - 1
        )
        result.append(monomial_apply(mono, b, side="right"))
    if len(result) > 1:
        b1 = result[1]
        col_phases = []
        for i in range(d):
            z, s = phase_conj(b1.entries[i][0], b1.scale)
            col_phases.append(z)
        left = MonomialMatrix(
            d, tuple(range(d)), "cyclotomic", tuple(col_phases), order, b1.scale - 1
        )
        result = [monomial_apply(left, b, side="left") for b in result]
        # undo the row phases on basis 0 so it stays the identity
        right = left.dagger()
        result[0] = monomial_apply(right, result[0], side="right")
    final: list[AnyMatrix] = []
    for idx, b in enumerate(result):
        b = b.normalize()
        if idx == 0:
            if not b.is_identity():
                raise NotStandardForm("dephasing failed to restore the identity")
            final.append(CycMatrix.identity(d, order))
            continue
        pm = b.try_phase()
        final.append(pm if pm is not None else b)
    return MuBasisSet(d, tuple(final), standard_form=True)


def _dephase_float(mset: MuBasisSet, tol: float) -> MuBasisSet:
    d = mset.dim
    arrays = [b.to_complex_array() for b in mset.bases]
    b0 = arrays[0]
    if not np.allclose(b0.conj().T @ b0, np.eye(d), atol=tol):
        raise NotUnitary("basis 0 is not unitary")
    rotated = [b0.conj().T @ a for a in arrays]
    rotated[0] = np.eye(d, dtype=complex)
    result = [rotated[0]]
    for a in rotated[1:]:
        row = a[0, :]
        if np.any(np.abs(row) < tol):
            raise NotUnitary("zero first-row entry; cannot dephase")
        result.append(a * (np.abs(row) / row)[None, :])
    if len(result) > 1:
        col = result[1][:, 0]
        phases = np.abs(col) / col
        result = [a * phases[:, None] for a in result]
        result[0] = result[0] * phases.conj()[None, :]
    return MuBasisSet(
        d, tuple(ComplexMatrix(d, a) for a in result), standard_form=True
    )


def dephase(mset: MuBasisSet, tol: float = FLOAT_TOL) -> MuBasisSet:
    """Bring a MU basis set to dephased standard form.

    Column order is never changed.  The output is audited: MU relations must
    survive and the standard-form properties must hold.
    """
    if mset.is_exact():
        out = _dephase_exact(mset)
    elif mset.is_float():
        out = _dephase_float(mset, tol)
    else:
        raise BackendMismatch("cannot dephase a mixed exact/float set")
    out.check_standard(tol)
    audit = out.audit(tol)
    if not audit.ok:
        raise NotStandardForm(f"dephasing broke MU relations: {audit.failures[:3]}")
    return out
