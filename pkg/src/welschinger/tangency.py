"""Tangency vectors and the counting formulas built on them.

A tangency vector records, for each order ``i``, how many contact points of
that order a curve has with a divisor.  When the real structure matters the
count is split into real points and points exchanged in conjugated pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import ContactError, InvalidKey, ParityError
from .lattice import HClass, c1_dot, intersect


def _sparse(counts) -> tuple[tuple[int, int], ...]:
    items = counts.items() if hasattr(counts, "items") else counts
    merged: dict[int, int] = {}
    for order, n in items:
        order, n = int(order), int(n)
        if order < 1:
            raise ValueError(f"contact order must be >= 1, got {order}")
        if n < 0:
            raise ValueError(f"negative count at order {order}")
        merged[order] = merged.get(order, 0) + n
    return tuple(sorted((i, n) for i, n in merged.items() if n))


@dataclass(frozen=True)
class TangencyVec:
    """Sparse order -> count map, optionally refined into real and conjugated parts.

    ``paired`` requires conjugated counts to be even; it is switched off for a
    vector relative to one component of a divisor whose other component holds
    the conjugate points.
    """

    real: tuple[tuple[int, int], ...] = ()
    conj: tuple[tuple[int, int], ...] = ()
    refined: bool = False
    paired: bool = True

    def __post_init__(self):
        object.__setattr__(self, "real", _sparse(self.real))
        object.__setattr__(self, "conj", _sparse(self.conj))
        if not self.real and not self.conj:
            # one zero vector regardless of flags
            object.__setattr__(self, "refined", False)
            object.__setattr__(self, "paired", True)
        if self.conj and not self.refined:
            raise ValueError("conjugated counts need a refined vector")
        if self.paired and any(n % 2 for _, n in self.conj):
            raise ValueError("conjugated contact points come in pairs")

    @classmethod
    def delta(cls, order: int = 1, count: int = 1, kind: str | None = None,
              paired: bool = True) -> TangencyVec:
        """``count`` copies of the basis vector of ``order``.

        ``kind`` is None (no reality information), "r" or "c".
        """
        if kind is None:
            return cls(((order, count),))
        if kind == "r":
            return cls(((order, count),), (), True, paired)
        if kind == "c":
            return cls((), ((order, count),), True, paired)
        raise ValueError(f"unknown kind {kind!r}")

    @classmethod
    def zero(cls) -> TangencyVec:
        return cls()

    @property
    def entries(self) -> dict[int, int]:
        out = dict(self.real)
        for i, n in self.conj:
            out[i] = out.get(i, 0) + n
        return out

    def __getitem__(self, order: int) -> int:
        return self.entries.get(order, 0)

    def __add__(self, other: TangencyVec) -> TangencyVec:
        return TangencyVec(self.real + other.real, self.conj + other.conj,
                           self.refined or other.refined, self.paired and other.paired)

    def unrefined(self) -> TangencyVec:
        return TangencyVec(tuple(self.entries.items()))

    def __bool__(self):
        return bool(self.real or self.conj)

    def __str__(self):
        if not self:
            return "0"
        terms = []
        for order in sorted(self.entries):
            parts = [(dict(self.conj).get(order, 0), "^c"), (dict(self.real).get(order, 0), "^r")]
            for n, tag in parts:
                if not n:
                    continue
                tag = tag if self.refined else ""
                terms.append(f"{'' if n == 1 else n}δ{order}{tag}")
        return " + ".join(terms)


def norm(alpha: TangencyVec) -> int:
    return sum(alpha.entries.values())


def weight(alpha: TangencyVec) -> int:
    return sum(i * n for i, n in alpha.entries.items())


def contact_holds(d, v, alpha: TangencyVec, beta: TangencyVec) -> bool:
    return weight(alpha) + weight(beta) == intersect(d, v)


def validate_contact(d, v, alpha: TangencyVec, beta: TangencyVec) -> None:
    lhs = weight(alpha) + weight(beta)
    rhs = intersect(d, v)
    if lhs != rhs:
        raise ContactError(f"I(alpha) + I(beta) = {lhs} but d.V = {rhs}")


class PointBudget(NamedTuple):
    off_divisor_count: int
    on_divisor_count: int


def point_budget(d, v, beta: TangencyVec) -> int:
    """Number of points off the divisor that cut the family down to finitely many curves."""
    return c1_dot(d) - 1 - intersect(d, v) + norm(beta)


def budget(d, v, alpha: TangencyVec, beta: TangencyVec) -> PointBudget:
    """Full point count: free points plus prescribed points on the divisor."""
    validate_contact(d, v, alpha, beta)
    off = point_budget(d, v, beta)
    if off < 0:
        raise ContactError(f"negative point budget {off}: configuration infeasible")
    return PointBudget(off, norm(alpha))


def node_count(d: HClass) -> int:
    """Number of nodes of a rational curve in class ``d``."""
    c = c1_dot(d)
    if c < 1:
        raise InvalidKey(f"c1.d = {c} < 1")
    twice = intersect(d, d) - c + 2
    if twice % 2:
        raise ParityError(f"d.d - c1.d + 2 = {twice} is odd")
    return twice // 2


def expected_dimension(d, m: int, real: bool = True) -> int:
    if m < 0:
        raise ValueError("point count must be non-negative")
    dim = c1_dot(d) - 1 - m
    return dim if real else 2 * dim


def key_violations(surface, d: HClass, s: int) -> list[str]:
    """Reasons why (surface, d, s) is not a valid invariant key; empty if valid."""
    out = []
    if (d.surface.base, d.surface.r, d.surface.s) != (surface.base, surface.r, surface.s):
        out.append(f"class lives on {d.surface}, not {surface}")
        return out
    c = c1_dot(d)
    if c < 1:
        out.append(f"c1.d = {c} < 1")
    if not d.tau_anti_invariant:
        out.append("pair coefficients differ, class is not tau-anti-invariant")
    if s < 0:
        out.append(f"s = {s} < 0")
    elif c - 1 - 2 * s < 0:
        out.append(f"r = c1.d - 1 - 2s = {c - 1 - 2 * s} < 0")
    return out


def key_validity(surface, d: HClass, s: int) -> bool:
    return not key_violations(surface, d, s)


def check_key(surface, d: HClass, s: int) -> None:
    problems = key_violations(surface, d, s)
    if problems:
        raise InvalidKey("; ".join(problems))


def real_point_count(d: HClass, s: int) -> int:
    return c1_dot(d) - 1 - 2 * s
