"""Blow-up and wall-crossing identities between invariants, as affine relations.

Every identity is an integer linear relation ``sum coef * W(key) = 0``
between a few invariant keys.  The engine registers each identity once
(:class:`Relation`) and may solve it for whichever key is unknown.

Rule ids are part of the fact-file format:

* ``Eq1`` real point, pullback class; ``Eq2`` real point, class minus E
* ``Eq3`` conjugated pair, pullback class; ``Eq4`` pair, class minus E'+E''
* ``Eq5`` / ``Eq6`` several points at once, pullback / subtracted class
* ``Eq7`` the wall-crossing relation, whose solved forms are named
  ``Eq7-down`` (lower s side), ``Eq7-up`` (higher s side) and ``Theta``
* ``Remark1.5`` marks any of the above applied to a key carrying labels
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping

from .errors import InvalidKey, ParityError, SideConditionError
from .lattice import HClass, Surface, blow_up, c1_dot, canonicalize, pullback, render_class
from .tangency import key_violations

SUM_RP2 = "#RP2"


@dataclass(frozen=True)
class InvariantKey:
    surface: Surface
    d: HClass
    s: int
    l_label: str | None = None
    f_label: str | None = None

    def __post_init__(self):
        bare = Surface(self.surface.base, self.surface.r, self.surface.s)
        object.__setattr__(self, "surface", bare)
        object.__setattr__(self, "d", canonicalize(self.d.with_surface(bare)))
        problems = key_violations(bare, self.d, self.s)
        if problems:
            raise InvalidKey(f"{self.describe()}: " + "; ".join(problems))

    @property
    def c1d(self) -> int:
        return c1_dot(self.d)

    @property
    def r(self) -> int:
        """Number of real points in the configuration."""
        return self.c1d - 1 - 2 * self.s

    @property
    def labeled(self) -> bool:
        return self.l_label is not None or self.f_label is not None

    @property
    def s_max(self) -> int:
        return (self.c1d - 1) // 2

    def at(self, s: int) -> InvariantKey:
        return InvariantKey(self.surface, self.d, s, self.l_label, self.f_label)

    def sort_key(self):
        b = self.surface.base
        return (b.kind, b.n, self.surface.r, self.surface.s, self.d.base,
                self.d.exc, self.d.pairs, self.s, self.l_label or "", self.f_label or "")

    def __lt__(self, other: InvariantKey):
        return self.sort_key() < other.sort_key()

    def describe(self) -> str:
        labels = ""
        if self.l_label is not None or self.f_label is not None:
            labels = f"; L={self.l_label or ''}, F={self.f_label or ''}"
        return f"W_{{{self.surface}}}({render_class(self.d)}, s={self.s}{labels})"

    def __str__(self):
        return self.describe()


def try_key(surface: Surface, d: HClass, s: int, l_label=None, f_label=None) -> InvariantKey | None:
    if key_violations(surface, d, s):
        return None
    return InvariantKey(surface, d, s, l_label, f_label)


# -- single transports --------------------------------------------------------

def _grow_label(label: str | None, real_points: int) -> str | None:
    return None if label is None else label + SUM_RP2 * real_points


def _shrink_label(label: str | None, real_points: int) -> str | None:
    """Inverse of :func:`_grow_label`; raises if the tag was not grown."""
    if label is None or real_points == 0:
        return label
    tail = SUM_RP2 * real_points
    if not label.endswith(tail):
        raise SideConditionError(f"label {label!r} does not carry {real_points} real blow-ups")
    return label[: -len(tail)]


def transport_labels(key: InvariantKey, real_points: int) -> tuple[str | None, str | None]:
    """Labels of the image of ``key`` after blowing up ``real_points`` real points.

    The real component gains one connected summand RP^2 per real point; the
    F tag is pulled back and keeps its name.
    """
    return _grow_label(key.l_label, real_points), key.f_label


def blowup_pullback(key: InvariantKey, r: int, s: int) -> InvariantKey:
    """Key of the same invariant on the blow-up at r real points and s pairs, class p!d."""
    target = blow_up(key.surface, r, s)
    return InvariantKey(target, pullback(key.d, target), key.s, *transport_labels(key, r))


def blowup_subtract(key: InvariantKey, r: int, s: int) -> InvariantKey:
    """Key on the blow-up whose class subtracts every new exceptional curve once.

    The blown-up points are taken from the configuration, so at most ``key.r``
    real points and ``key.s`` pairs can be used.
    """
    if r > key.r:
        raise SideConditionError(f"cannot blow up {r} of {key.r} real points")
    if s > key.s:
        raise SideConditionError(f"cannot blow up {s} of {key.s} conjugated pairs")
    target = blow_up(key.surface, r, s)
    p = pullback(key.d, target)
    d = HClass(target, p.base, key.d.exc + (1,) * r, key.d.pairs + ((1, 1),) * s)
    return InvariantKey(target, d, key.s - s, *transport_labels(key, r))


def real_pullback(key: InvariantKey) -> InvariantKey:
    return blowup_pullback(key, 1, 0)


def real_subtract(key: InvariantKey) -> InvariantKey:
    if key.c1d - 2 * key.s < 2:
        raise SideConditionError(f"c1.d - 2s = {key.c1d - 2 * key.s} < 2")
    return blowup_subtract(key, 1, 0)


def pair_pullback(key: InvariantKey) -> InvariantKey:
    return blowup_pullback(key, 0, 1)


def pair_subtract(key: InvariantKey) -> InvariantKey:
    if key.s < 1:
        raise SideConditionError("needs at least one conjugated pair (s >= 1)")
    return blowup_subtract(key, 0, 1)


def multi_pullback(key: InvariantKey, r: int, s: int) -> InvariantKey:
    return blowup_pullback(key, r, s)


def multi_subtract(key: InvariantKey, r: int, s: int) -> InvariantKey:
    return blowup_subtract(key, r, s)


def theta(key: InvariantKey) -> InvariantKey:
    """Key of the theta-invariant: class p!d - 2E on the blow-up at one real point."""
    target = blow_up(key.surface, 1, 0)
    p = pullback(key.d, target)
    d = HClass(target, p.base, key.d.exc + (2,), p.pairs)
    return InvariantKey(target, d, key.s, *transport_labels(key, 1))


def wall_applies(key: InvariantKey) -> bool:
    """Whether the wall between s-1 and s (s = key.s) is in range for key.d."""
    return key.c1d >= 4 and 1 <= key.s <= key.s_max


def wall_keys(key: InvariantKey) -> tuple[InvariantKey, InvariantKey, InvariantKey]:
    """(W(d, s-1), W(d, s), theta(d, s-1)) for s = key.s."""
    if key.c1d < 4:
        raise SideConditionError(f"c1.d = {key.c1d} < 4")
    if not 1 <= key.s <= key.s_max:
        raise SideConditionError(f"s = {key.s} outside 1..{key.s_max}")
    prev = key.at(key.s - 1)
    return prev, key, theta(prev)


def solve_wall(prev: int | None, nxt: int | None, th: int | None) -> tuple[int, int, int]:
    """Complete W(d,s-1) = W(d,s) + 2 theta(d,s-1) from any two values."""
    unknown = [v is None for v in (prev, nxt, th)]
    if sum(unknown) != 1:
        raise ValueError("exactly one of the three values must be missing")
    if prev is None:
        return nxt + 2 * th, nxt, th
    if nxt is None:
        return prev, prev - 2 * th, th
    diff = prev - nxt
    if diff % 2:
        raise ParityError(f"W(d,s-1) - W(d,s) = {diff} is odd")
    return prev, nxt, diff // 2


def wall_holds(prev: int, nxt: int, th: int) -> bool:
    return prev == nxt + 2 * th


# -- relations -----------------------------------------------------------------

@dataclass(frozen=True)
class Relation:
    """``sum coef * W(key) = 0`` for an identity named by ``rule``."""

    rule: str
    terms: tuple[tuple[InvariantKey, int], ...]
    params: tuple[int, ...] = ()

    @property
    def keys(self) -> tuple[InvariantKey, ...]:
        return tuple(k for k, _ in self.terms)

    @property
    def labeled(self) -> bool:
        return any(k.labeled for k in self.keys)

    def coefficient(self, key: InvariantKey) -> int:
        for k, c in self.terms:
            if k == key:
                return c
        raise KeyError(key)

    def holds(self, values: Mapping[InvariantKey, int]) -> bool:
        return sum(c * values[k] for k, c in self.terms) == 0

    def solve(self, target: InvariantKey, values: Mapping[InvariantKey, int]) -> int:
        """Value of ``target`` forced by the other terms (exact division only)."""
        rest = sum(c * values[k] for k, c in self.terms if k != target)
        c = self.coefficient(target)
        if rest % c:
            raise ParityError(f"{self.rule}: {-rest} is not divisible by {c}")
        return -rest // c

    def step_rule(self, target: InvariantKey) -> str:
        """Rule id recorded when this relation is solved for ``target``."""
        if self.rule != "Eq7":
            name = self.rule
        else:
            name = {1: "Eq7-up", -1: "Eq7-down", -2: "Theta"}[self.coefficient(target)]
        return "Remark1.5" if self.labeled else name

    def same_as(self, other: Relation) -> bool:
        return self.rule == other.rule and set(self.terms) == set(other.terms)


ELEMENTARY = {(1, 0): ("Eq1", "Eq2"), (0, 1): ("Eq3", "Eq4")}


def _pair_relation(rule: str, lower: InvariantKey, upper: InvariantKey, params=()) -> Relation:
    return Relation(rule, ((upper, 1), (lower, -1)), params)


def _wall_relation(prev: InvariantKey, nxt: InvariantKey, th: InvariantKey) -> Relation:
    return Relation("Eq7", ((prev, 1), (nxt, -1), (th, -2)))


def _drop(values: tuple, value, count: int) -> tuple:
    out = list(values)
    for _ in range(count):
        out.remove(value)
    return tuple(out)


def _lower_key(key: InvariantKey, r: int, s: int, exc_value: int, pair_value,
               shift: int) -> InvariantKey | None:
    """Key on the surface with r real points and s pairs fewer, dropping exceptional
    coefficients equal to ``exc_value`` / ``pair_value``."""
    src = key.surface
    if src.r < r or src.s < s:
        return None
    if key.d.exc.count(exc_value) < r or key.d.pairs.count(pair_value) < s:
        return None
    try:
        l_label = _shrink_label(key.l_label, r)
    except SideConditionError:
        return None
    low = Surface(src.base, src.r - r, src.s - s)
    d = HClass(low, key.d.base, _drop(key.d.exc, exc_value, r), _drop(key.d.pairs, pair_value, s))
    return try_key(low, d, key.s + shift, l_label, key.f_label)


def _counts(max_blowups: int, used: int, min_total: int) -> Iterator[tuple[int, int]]:
    room = max_blowups - used
    for r in range(room + 1):
        for s in range(room - r + 1):
            if r + s >= min_total:
                yield r, s


def pullback_relations(key: InvariantKey, max_blowups: int) -> Iterator[Relation]:
    """Eq1, Eq3 and Eq5 instances in which ``key`` is either side."""
    for r, s in _counts(max_blowups, key.surface.blowups, 1):
        rule = ELEMENTARY.get((r, s), ("Eq5",))[0]
        params = () if rule != "Eq5" else (r, s)
        yield _pair_relation(rule, key, blowup_pullback(key, r, s), params)
    for r, s in _counts(key.surface.blowups, 0, 1):
        low = _lower_key(key, r, s, 0, (0, 0), 0)
        if low is not None:
            rule = ELEMENTARY.get((r, s), ("Eq5",))[0]
            params = () if rule != "Eq5" else (r, s)
            yield _pair_relation(rule, low, key, params)


def _subtract_allowed(key: InvariantKey, r: int, s: int) -> bool:
    if (r, s) == (1, 0):
        return key.c1d - 2 * key.s >= 2
    if (r, s) == (0, 1):
        return key.s >= 1
    return r <= key.r and s <= key.s


def subtract_relations(key: InvariantKey, max_blowups: int) -> Iterator[Relation]:
    """Eq2, Eq4 and Eq6 instances in which ``key`` is either side."""
    for r, s in _counts(max_blowups, key.surface.blowups, 1):
        if _subtract_allowed(key, r, s):
            rule = ELEMENTARY.get((r, s), (None, "Eq6"))[1]
            params = () if rule != "Eq6" else (r, s)
            yield _pair_relation(rule, key, blowup_subtract(key, r, s), params)
    for r, s in _counts(key.surface.blowups, 0, 1):
        low = _lower_key(key, r, s, 1, (1, 1), s)
        if low is not None and _subtract_allowed(low, r, s):
            rule = ELEMENTARY.get((r, s), (None, "Eq6"))[1]
            params = () if rule != "Eq6" else (r, s)
            yield _pair_relation(rule, low, key, params)


def wall_relations(key: InvariantKey, max_blowups: int) -> Iterator[Relation]:
    """Eq7 instances in which ``key`` is W(d, s-1), W(d, s) or the theta term."""
    if key.surface.blowups < max_blowups:
        above = key.at(key.s + 1) if key.s + 1 <= key.s_max else None
        if above is not None and wall_applies(above):
            yield _wall_relation(*wall_keys(above))
        if wall_applies(key):
            yield _wall_relation(*wall_keys(key))
    low = _lower_key(key, 1, 0, 2, None, 0)
    if low is not None:
        nxt = low.at(low.s + 1) if low.s + 1 <= low.s_max else None
        if nxt is not None and wall_applies(nxt):
            prev, nxt, th = wall_keys(nxt)
            if th == key:
                yield _wall_relation(prev, nxt, th)


RuleFamily = Callable[[InvariantKey, int], Iterable[Relation]]

RULE_FAMILIES: tuple[RuleFamily, ...] = (pullback_relations, subtract_relations, wall_relations)


def relations_of(key: InvariantKey, max_blowups: int,
                 families: Iterable[RuleFamily] = RULE_FAMILIES) -> Iterator[Relation]:
    for family in families:
        yield from family(key, max_blowups)


def is_instance(relation: Relation, max_blowups: int | None = None) -> bool:
    """Whether ``relation`` is a genuine instance of its identity, side conditions included."""
    keys = relation.keys
    bound = max(k.surface.blowups for k in keys) if max_blowups is None else max_blowups
    return any(relation.same_as(other) for k in keys for other in relations_of(k, bound))
