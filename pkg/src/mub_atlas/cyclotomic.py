"""Exact arithmetic in rings of cyclotomic integers Z[w_q], w_q = exp(2*pi*i/q).

An element is stored as an integer coefficient vector (c_0, ..., c_{q-1})
meaning sum_k c_k * w_q**k.  Construction always reduces to a canonical form:

* even q: the relation w**(q//2) = -1 folds the upper half (for q = 4 this
  leaves the Z-basis {1, i});
* prime q: the relation 1 + w + ... + w**(q-1) = 0 clears the top
  coefficient, leaving the Z-basis {1, w, ..., w**(q-2)}.

For prime q and q = 4 the canonical form is a normal form, so equality of
coefficient vectors decides equality of values.  Other orders keep their
coefficients verbatim (apart from the even fold) and are only supported for
embedding tricks; rationality tests on them raise ``UnsupportedOrder``.
"""

from __future__ import annotations

import cmath
from typing import Iterable, Union


class OrderMismatch(ValueError):
    """Raised when combining cyclotomic values over incompatible orders."""


class UnsupportedOrder(ValueError):
    """Raised when an operation needs a fully reduced order (prime or 4)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            return False
        p += 1
    return True


def _reduce(order: int, coeffs: list[int]) -> tuple[int, ...]:
    if order % 2 == 0 and order > 1:
        half = order // 2
        for k in range(half, order):
            if coeffs[k]:
                coeffs[k - half] -= coeffs[k]
                coeffs[k] = 0
    if order > 2 and is_prime(order):
        top = coeffs[order - 1]
        if top:
            for k in range(order):
                coeffs[k] -= top
    return tuple(coeffs)


class CycInt:
    """An element of Z[w_q] in canonical form.  Immutable and hashable."""

    __slots__ = ("_order", "_coeffs")

    def __init__(self, order: int, coeffs: Iterable[int]) -> None:
        if order < 1:
            raise ValueError(f"order must be positive, got {order}")
        cs = [int(c) for c in coeffs]
        if len(cs) > order:
            raise ValueError(f"got {len(cs)} coefficients for order {order}")
        cs.extend(0 for _ in range(order - len(cs)))
        object.__setattr__(self, "_order", order)
        object.__setattr__(self, "_coeffs", _reduce(order, cs))

    @property
    def order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self._coeffs

    @classmethod
    def zero(cls, order: int) -> "CycInt":
        return cls(order, ())

    @classmethod
    def one(cls, order: int) -> "CycInt":
        return cls(order, (1,))

    @classmethod
    def integer(cls, order: int, n: int) -> "CycInt":
        return cls(order, (n,))

    @classmethod
    def root(cls, order: int, k: int = 1) -> "CycInt":
        """The root of unity w_q**k."""
        coeffs = [0] * order
        coeffs[k % order] = 1
        return cls(order, coeffs)

    def _coerce(self, other: Union["CycInt", int]) -> "CycInt":
        if isinstance(other, CycInt):
            if other._order != self._order:
                raise OrderMismatch(
                    f"cannot combine orders {self._order} and {other._order}; "
                    "embed to a common order first"
                )
            return other
        if isinstance(other, int):
            return CycInt.integer(self._order, other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: Union["CycInt", int]) -> "CycInt":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return CycInt(self._order, [a + b for a, b in zip(self._coeffs, o._coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "CycInt":
        return CycInt(self._order, [-a for a in self._coeffs])

    def __sub__(self, other: Union["CycInt", int]) -> "CycInt":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return CycInt(self._order, [a - b for a, b in zip(self._coeffs, o._coeffs)])

    def __rsub__(self, other: int) -> "CycInt":
        return (-self) + other

    def __mul__(self, other: Union["CycInt", int]) -> "CycInt":
        if isinstance(other, int):
            return CycInt(self._order, [a * other for a in self._coeffs])
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        q = self._order
        res = [0] * q
        for i, ai in enumerate(self._coeffs):
            if ai:
                for j, bj in enumerate(o._coeffs):
                    if bj:
                        k = i + j
                        if k >= q:
                            k -= q
                        res[k] += ai * bj
        return CycInt(q, res)

    __rmul__ = __mul__

    def conj(self) -> "CycInt":
        """Complex conjugate: sends w**k to w**(q-k)."""
        q = self._order
        res = [0] * q
        for k, c in enumerate(self._coeffs):
            res[(q - k) % q] = c
        return CycInt(q, res)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self._coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> Union[int, None]:
        """The integer this value equals, or None if it is irrational.

        Only sound for orders where the canonical form is a normal form.
        """
        q = self._order
        if q == 1:
            return self._coeffs[0]
        if q == 4 or is_prime(q):
            if all(c == 0 for c in self._coeffs[1:]):
                return self._coeffs[0]
            return None
        raise UnsupportedOrder(f"rationality test unsupported for order {q}")

    def norm2(self) -> Union[int, None]:
        """|value|**2 when it is an integer, else None."""
        return (self * self.conj()).is_rational()

    def embed(self, target_order: int) -> "CycInt":
        """Rewrite over Z[w_t] where t is a multiple of the current order."""
        if target_order % self._order != 0:
            raise OrderMismatch(
                f"cannot embed order {self._order} into {target_order}"
            )
        step = target_order // self._order
        res = [0] * target_order
        for k, c in enumerate(self._coeffs):
            res[k * step] = c
        return CycInt(target_order, res)

    def to_complex(self) -> complex:
        q = self._order
        return sum(
            c * cmath.exp(2j * cmath.pi * k / q)
            for k, c in enumerate(self._coeffs)
            if c
        ) + 0j

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = CycInt.integer(self._order, other)
        if not isinstance(other, CycInt):
            return NotImplemented
        return self._order == other._order and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self._order, self._coeffs))

    def __repr__(self) -> str:
        return f"CycInt({self._order}, {list(self._coeffs)})"

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self._coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(f"w{k}" if k > 1 else "w")
            else:
                terms.append(f"{c}*w{k}" if k > 1 else f"{c}*w")
        return " + ".join(terms) if terms else "0"


def cyc_add(a: CycInt, b: CycInt) -> CycInt:
    return a + b


def cyc_mul(a: CycInt, b: CycInt) -> CycInt:
    return a * b


def cyc_conj(a: CycInt) -> CycInt:
    return a.conj()


def cyc_is_rational(a: CycInt) -> Union[int, None]:
    return a.is_rational()


def cyc_embed(a: CycInt, target_order: int) -> CycInt:
    return a.embed(target_order)


# sqrt(d) written in Z[w_d], where that is possible (d = q = 4 or 5).  The
# q = 5 value is the classical quadratic root sum 1 + 2w + 2w**4.
SQRT_DIM: dict[int, CycInt] = {
    1: CycInt.one(1),
    4: CycInt.integer(4, 2),
    5: CycInt(5, (1, 2, 0, 0, 2)),
}
