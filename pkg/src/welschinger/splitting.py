"""Admissible splittings of rational curves under a neck-stretching degeneration.

A degeneration cuts the surface along a divisor.  The limit curve has a
part on the far side (``plus``: a plane, or a ruled surface for an
exceptional curve) and a part on the near side (``minus``, the blow-up).
Two questions are answered here:

* which component/multiplicity patterns ``(m, k, b)`` survive the integer
  inequalities coming from dimension counts (:func:`feasible_degenerations`,
  checked against :func:`brute_force_degenerations`);
* what the surviving limits look like, with tangency data, multiplicity and
  the mass shift contributed by the plus part (:func:`classify`).

:func:`derive_wall_crossing` assembles the signed counts of both sides of a
wall from the classified families and checks that they imply the
wall-crossing relation between W(d, s-1), W(d, s) and theta.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterator

from .lattice import HClass, PROJECTIVE_PLANE, Surface, c1_dot, intersect, pullback
from .tangency import TangencyVec, point_budget, validate_contact

MAX_COMPONENTS = 6
MAX_DELTA = 4
MAX_MULTIPLICITY = 6

_PLANE = Surface(PROJECTIVE_PLANE)
LINE = HClass(_PLANE, (1,))


class ContextError(ValueError):
    """A splitting context that does not make sense for its class."""


@dataclass(frozen=True)
class RuledClass:
    """a F + b E_inf on the ruled surface obtained by blowing up the plane once.

    E_0 = E_inf - F is the exceptional section.
    """

    a: int
    b: int

    def dot(self, other: RuledClass) -> int:
        return self.a * other.b + self.b * other.a + self.b * other.b

    def c1_dot(self) -> int:
        return self.dot(RULED_C1)

    def __str__(self):
        if (self.a, self.b) == (1, 0):
            return "F"
        parts = [f"{'' if c == 1 else c}{n}" for c, n in ((self.a, "F"), (self.b, "E_inf")) if c]
        return " + ".join(parts) or "0"


FIBER = RuledClass(1, 0)
E_INF = RuledClass(0, 1)
E_ZERO = RuledClass(-1, 1)
RULED_C1 = RuledClass(1, 2)


@dataclass(frozen=True)
class SplitSolution:
    plus_classes: tuple = ()
    minus_class: object = None
    minus_tangency: tuple[TangencyVec, TangencyVec] = (TangencyVec(), TangencyVec())
    multiplicity: int = 1
    mass_shift: int = 0
    divisor: object = None
    plus_points: tuple[tuple[str, ...], ...] = ()
    per_divisor: tuple[tuple[TangencyVec, TangencyVec], ...] = ()

    @property
    def alpha(self) -> TangencyVec:
        return self.minus_tangency[0]

    @property
    def beta(self) -> TangencyVec:
        return self.minus_tangency[1]

    @property
    def sign(self) -> int:
        return -1 if self.mass_shift % 2 else 1

    def family(self) -> tuple[str, str, str]:
        """Identifies the minus-side family this solution sums over."""
        return str(self.minus_class), str(self.alpha), str(self.beta)

    def tangency_text(self) -> str:
        return f"alpha={self.alpha}, beta={self.beta}"

    def row(self) -> list[str]:
        plus = " + ".join(f"[{c}]" for c in self.plus_classes) or "-"
        return [plus, str(self.minus_class), self.tangency_text(),
                str(self.multiplicity), str(self.mass_shift)]


# -- the inequality system --------------------------------------------------------

def _system_analytic(m: int, k: int, total: int, required: int) -> bool:
    """Closed form of the component inequality.

    There are m components, the first k non-simple with covering degree
    delta_i >= 2 over a simple curve of c1-degree c_i >= 0.  Counting
    points through the underlying simple curves gives
    sum_{i<=k} (1 - delta_i) c_i >= required + m - total; the left side is at
    most 0.  A single multiply covered component needs total/delta - 1 >= required.
    """
    if required + m > total:
        return False
    if m == 1 and k == 1:
        return required + 1 <= 0 or total >= 2 * (required + 1)
    return True


def _system_brute(m: int, k: int, total: int, required: int, cap: int) -> bool:
    """Same system, by exhausting delta_i in 2..MAX_DELTA and c_i in 0..cap."""
    sums = _achievable_sums(k, cap)
    if not any(v >= required + m - total for v in sums):
        return False
    if m == 1 and k == 1:
        return any(total - delta * (required + 1) >= 0 for delta in range(2, MAX_DELTA + 1))
    return True


@lru_cache(maxsize=None)
def _achievable_sums(k: int, cap: int) -> frozenset[int]:
    one = {(1 - delta) * c for delta in range(2, MAX_DELTA + 1) for c in range(cap + 1)}
    sums = {0}
    for _ in range(k):
        sums = {a + b for a in sums for b in one}
    return frozenset(sums)


class _CutContext:
    """Shared machinery for the contexts whose limit has a plus and a minus part."""

    fields = ("m", "k", "b")

    def _c(self) -> int:
        return c1_dot(self.d)

    def _multiplicities(self) -> range:
        return range(MAX_MULTIPLICITY + 1)

    def _admissible(self, b: int) -> bool:
        return True

    def _total(self, b: int) -> int:
        raise NotImplementedError

    def _required(self, b: int) -> int:
        raise NotImplementedError

    def _forced(self, b: int) -> int:
        return 0

    def _candidates(self) -> Iterator[tuple[int, int, int]]:
        for m in range(1, MAX_COMPONENTS + 1):
            for k in range(m + 1):
                for b in self._multiplicities():
                    if self._admissible(b):
                        yield m, k, b

    def feasible(self, brute: bool = False, refine: bool = True) -> list[tuple[int, int, int]]:
        """Tuples surviving the inequality system; ``refine`` adds the forced-point filter."""
        out = []
        cap = self._c()
        for m, k, b in self._candidates():
            total = self._total(b)
            for extra in (0, self._forced(b) if refine else 0):
                req = self._required(b) + extra
                ok = (_system_brute(m, k, total, req, cap) if brute
                      else _system_analytic(m, k, total, req))
                if not ok:
                    break
            else:
                out.append((m, k, b))
        return out


def _partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of n as non-increasing tuples."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


@dataclass(frozen=True)
class _Component:
    cls: object
    order: int
    points: frozenset
    free_on_plus: bool


def _plus_components(kind: str, orders: tuple[int, ...], points: tuple[str, ...],
                     fiber_total: int | None) -> Iterator[tuple[_Component, ...]]:
    """Ways to complete each contact point of the minus curve by a plus component.

    Each contact point of order o is met by one irreducible plus component
    touching the divisor only there, so its class has intersection o with
    the divisor.  Every component must be cut out exactly by its points.
    """
    v = LINE if kind == "plane" else E_INF
    if kind == "plane":
        class_options = [[HClass(_PLANE, (o,))] for o in orders]
    else:
        class_options = [[RuledClass(a, o - a) for a in range(o + 1)] for o in orders]
    t = len(orders)
    for classes in itertools.product(*class_options):
        if fiber_total is not None and sum(c.a for c in classes) != fiber_total:
            continue
        for owner in itertools.product(range(t), repeat=len(points)):
            for sides in itertools.product((False, True), repeat=t):
                comps = []
                for j in range(t):
                    pts = frozenset(p for p, o in zip(points, owner) if o == j)
                    free = TangencyVec.delta(orders[j]) if sides[j] else TangencyVec()
                    fixed = TangencyVec() if sides[j] else TangencyVec.delta(orders[j])
                    validate_contact(classes[j], v, fixed, free)
                    if point_budget(classes[j], v, free) != len(pts):
                        break
                    comps.append(_Component(classes[j], orders[j], pts, sides[j]))
                else:
                    yield tuple(comps)


def _matchings(comps: tuple[_Component, ...]) -> int:
    """Distinct ways to attach the components to the contact points."""
    total = 1
    by_order = Counter(c.order for c in comps)
    for order, count in by_order.items():
        same = Counter((str(c.cls), c.points, c.free_on_plus) for c in comps if c.order == order)
        total *= math.factorial(count) // math.prod(math.factorial(n) for n in same.values())
    return total


def _canonical(comps: tuple[_Component, ...]):
    return tuple(sorted((c.order, str(c.cls), tuple(sorted(c.points)), c.free_on_plus)
                        for c in comps))


def _dedupe(configs) -> list[tuple[_Component, ...]]:
    seen = {}
    for comps in configs:
        seen.setdefault(_canonical(comps), comps)
    return [seen[k] for k in sorted(seen)]


def _conjugate_points(points: frozenset, swap: dict) -> frozenset:
    return frozenset(swap.get(p, p) for p in points)


def _reality(comps, swap: dict, contacts: str) -> list[int | None]:
    """For each component: None if real, else the index of its conjugate."""
    out: list[int | None] = []
    for i, c in enumerate(comps):
        if c.points:
            image = _conjugate_points(c.points, swap)
            if image == c.points:
                out.append(None)
            else:
                out.append(next(j for j, e in enumerate(comps) if e.points == image and j != i))
        elif contacts == "real":
            out.append(None)
        else:
            partners = [j for j, e in enumerate(comps)
                        if j != i and not e.points and e.order == c.order]
            if not partners:
                raise ContextError("a conjugated contact point needs a partner")
            out.append(partners[0] if i < partners[0] else
                       next(j for j in partners if out[j] == i))
    return out


def _plus_dot(c1, c2) -> int:
    return intersect(c1, c2) if isinstance(c1, HClass) else c1.dot(c2)


def _glue(kind: str, orders, minus: HClass, divisor: HClass, points: tuple[str, ...],
          swap: dict, required: int, fiber_total: int | None = None,
          contacts: str = "real") -> list[SplitSolution]:
    out = []
    for comps in _dedupe(_plus_components(kind, orders, points, fiber_total)):
        conj = _reality(comps, swap, contacts)
        alpha_r, alpha_c, beta_r, beta_c = Counter(), Counter(), Counter(), Counter()
        shift = 0
        for i, c in enumerate(comps):
            if c.free_on_plus:
                (alpha_r if conj[i] is None else alpha_c)[c.order] += 1
            else:
                (beta_r if conj[i] is None else beta_c)[c.order] += 1
            if conj[i] is not None and i < conj[i]:
                shift += _plus_dot(c.cls, comps[conj[i]].cls)
        alpha = TangencyVec(alpha_r, alpha_c, refined=True)
        beta = TangencyVec(beta_r, beta_c, refined=True)
        if point_budget(minus, divisor, beta) != required:
            continue
        validate_contact(minus, divisor, alpha, beta)
        out.append(SplitSolution(
            plus_classes=tuple(c.cls for c in comps), minus_class=minus,
            minus_tangency=(alpha, beta), multiplicity=_matchings(comps), mass_shift=shift,
            divisor=divisor, plus_points=tuple(tuple(sorted(c.points)) for c in comps)))
    return out


def _mirror(solution: SplitSolution, minus: HClass, divisor: HClass,
            halves: tuple[HClass, HClass]) -> SplitSolution:
    """Double a one-plane solution onto the conjugate plane."""
    a, b = solution.minus_tangency
    half = [TangencyVec({}, dict(v.real), refined=True, paired=False) for v in (a, b)]
    per = ((half[0], half[1]), (half[0], half[1]))
    for (x, y), v in zip(per, halves):
        validate_contact(minus, v, x, y)
    alpha = TangencyVec((), tuple((i, 2 * n) for i, n in a.real), refined=True)
    beta = TangencyVec((), tuple((i, 2 * n) for i, n in b.real), refined=True)
    plus = solution.plus_classes + solution.plus_classes
    pts = solution.plus_points + tuple(tuple(p.replace("'", "''") for p in q)
                                       for q in solution.plus_points)
    return SplitSolution(plus, minus, (alpha, beta), solution.multiplicity ** 2, 0,
                         divisor, pts, per)


def _pair_divisor(surface: Surface, which: str | None = None) -> HClass:
    """E' + E'' of the last pair (or one of them) as a class."""
    pairs = [(0, 0)] * surface.s
    pairs[-1] = {None: (-1, -1), "'": (-1, 0), "''": (0, -1)}[which]
    return HClass(surface, (0,) * surface.base.rank, (0,) * surface.r, tuple(pairs))


def _subtract_last_real(d: HClass, b: int) -> HClass:
    up = pullback(d, d.surface.blow_up(1, 0))
    return HClass(up.surface, up.base, d.exc + (b,), up.pairs)


def _subtract_last_pair(d: HClass, b: int) -> HClass:
    up = pullback(d, d.surface.blow_up(0, 1))
    return HClass(up.surface, up.base, up.exc, d.pairs + ((b, b),))


# -- contexts ----------------------------------------------------------------------

@dataclass(frozen=True)
class RealPointCut(_CutContext):
    """Blow up a real point; ``n_plus`` configuration points go with the plane.

    For ``n_plus = 2`` the two plane points are either both real or a
    conjugated pair (``points``).
    """

    d: HClass
    n_plus: int
    points: str = "real"

    def __post_init__(self):
        if self.n_plus not in (0, 1, 2):
            raise ContextError("n_plus must be 0, 1 or 2")
        if self.points not in ("real", "conjugated"):
            raise ContextError("points must be 'real' or 'conjugated'")
        if self.points == "conjugated" and self.n_plus != 2:
            raise ContextError("a conjugated pair needs n_plus = 2")
        if self.n_plus and self._c() - 1 - self.n_plus < 1:
            raise ContextError(f"c1.d = {self._c()} leaves no point on the blow-up side")

    def _admissible(self, b):
        return b >= 1 if self.n_plus else True

    def _total(self, b):
        return self._c() - b

    def _required(self, b):
        return self._c() - 1 - self.n_plus

    def _forced(self, b):
        # a single line through both plane points has its contact point fixed
        return 1 if self.n_plus == 2 and b == 1 else 0

    def classify(self) -> list[SplitSolution]:
        pts = ("p1", "p2")[: self.n_plus]
        swap = {"p1": "p2", "p2": "p1"} if self.points == "conjugated" else {}
        out = []
        for m, k, b in self.feasible():
            if (m, k) != (1, 0):
                continue
            minus = _subtract_last_real(self.d, b)
            e = HClass.exceptional(minus.surface, minus.surface.r - 1)
            for orders in _partitions(b):
                out += _glue("plane", orders, minus, e, pts, swap, self._required(b))
        return out


@dataclass(frozen=True)
class ExceptionalCut(_CutContext):
    """Stretch along the exceptional curve of a real blow-up; the class is p!d - jE."""

    d: HClass
    j: int
    contacts: str = "real"
    fields = ("m", "k", "k_E")

    def __post_init__(self):
        if self.j not in (0, 1, 2):
            raise ContextError("target must be p!d, p!d - E or p!d - 2E")
        if self.contacts not in ("real", "conjugated"):
            raise ContextError("contacts must be 'real' or 'conjugated'")
        if self.contacts == "conjugated" and self.j != 2:
            raise ContextError("conjugated contact points need two of them")
        if self._c() - self.j < 1:
            raise ContextError("target class has c1.d < 1")

    @property
    def target(self) -> HClass:
        return _subtract_last_real(self.d, self.j)

    def _admissible(self, k):
        return k >= self.j

    def _total(self, k):
        return self._c() - k

    def _required(self, k):
        return self._c() - self.j - 1

    def classify(self) -> list[SplitSolution]:
        out = []
        for m, kc, k in self.feasible():
            if (m, kc) != (1, 0):
                continue
            minus = _subtract_last_real(self.d, k)
            e = HClass.exceptional(minus.surface, minus.surface.r - 1)
            for orders in _partitions(k):
                out += _glue("ruled", orders, minus, e, (), {}, self._required(k),
                             fiber_total=self.j, contacts=self.contacts)
        return out


@dataclass(frozen=True)
class ConjPairCut(_CutContext):
    """Blow up a conjugated pair; each of the two planes takes ``n_plus`` points."""

    d: HClass
    n_plus: int

    def __post_init__(self):
        if self.n_plus not in (0, 1):
            raise ContextError("n_plus per plane must be 0 or 1")
        if self.n_plus and self._c() - 1 - 2 * self.n_plus < 1:
            raise ContextError(f"c1.d = {self._c()} leaves no point on the blow-up side")

    def _admissible(self, b):
        return b >= 1 if self.n_plus else True

    def _total(self, b):
        return self._c() - 2 * b

    def _required(self, b):
        return self._c() - 1 - 2 * self.n_plus

    def classify(self) -> list[SplitSolution]:
        pts = ("q'",)[: self.n_plus]
        out = []
        for m, k, b in self.feasible():
            if (m, k) != (1, 0):
                continue
            minus = _subtract_last_pair(self.d, b)
            one = _pair_divisor(minus.surface, "'")
            both = _pair_divisor(minus.surface)
            halves = (one, _pair_divisor(minus.surface, "''"))
            # the conjugate plane doubles both the point count and the free contacts
            for orders in _partitions(b):
                for sol in _glue("plane", orders, minus, one, pts, {}, self._required(b)):
                    doubled = _mirror(sol, minus, both, halves)
                    if point_budget(minus, both, doubled.beta) == self._required(b):
                        out.append(doubled)
        return out


@dataclass(frozen=True)
class ConjExceptionalCut(_CutContext):
    """Stretch along both exceptional curves of a blown-up pair; class p!d - j(E'+E'')."""

    d: HClass
    j: int
    fields = ("m", "k", "k_E")

    def __post_init__(self):
        if self.j not in (0, 1):
            raise ContextError("target must be p!d or p!d - E' - E''")
        if self._c() - 2 * self.j < 1:
            raise ContextError("target class has c1.d < 1")

    @property
    def target(self) -> HClass:
        return _subtract_last_pair(self.d, self.j)

    def _admissible(self, k):
        return k >= self.j

    def _total(self, k):
        return self._c() - 2 * k

    def _required(self, k):
        return self._c() - 2 * self.j - 1

    def classify(self) -> list[SplitSolution]:
        out = []
        for m, kc, k in self.feasible():
            if (m, kc) != (1, 0):
                continue
            minus = _subtract_last_pair(self.d, k)
            one = _pair_divisor(minus.surface, "'")
            both = _pair_divisor(minus.surface)
            halves = (one, _pair_divisor(minus.surface, "''"))
            for orders in _partitions(k):
                for sol in _glue("ruled", orders, minus, one, (), {}, self._required(k),
                                 fiber_total=self.j):
                    doubled = _mirror(sol, minus, both, halves)
                    if point_budget(minus, both, doubled.beta) == self._required(k):
                        out.append(doubled)
        return out


@dataclass(frozen=True)
class TwoSpheresRelative:
    """Curves in class d relative to two disjoint (-1)-spheres, with free contacts."""

    d: HClass
    v1: HClass
    v2: HClass
    fields = ("m", "k", "k1", "k2")

    def __post_init__(self):
        for v in (self.v1, self.v2):
            if intersect(v, v) != -1 or c1_dot(v) != 1:
                raise ContextError(f"{v} is not a (-1)-sphere class")
        if intersect(self.v1, self.v2) != 0:
            raise ContextError("the two spheres must be disjoint")
        if c1_dot(self.d) < 1:
            raise ContextError("c1.d < 1")

    def _system(self, m, k, k1, k2, brute):
        c = c1_dot(self.d)
        # k_i components lie inside V_i, each with c1.V_i = 1 and no points;
        # the others carry all c1.d - 1 points, contacts with V being free
        total = c - k1 - k2
        required = c - 1
        if brute:
            return _system_brute(m, k, total, required, c)
        return _system_analytic(m, k, total, required)

    def feasible(self, brute: bool = False) -> list[tuple[int, int, int, int]]:
        out = []
        for m in range(1, MAX_COMPONENTS + 1):
            for k in range(m + 1):
                for k1, k2 in itertools.product(range(MAX_MULTIPLICITY + 1), repeat=2):
                    if self._system(m, k, k1, k2, brute):
                        out.append((m, k, k1, k2))
        return out

    def classify(self) -> list[SplitSolution]:
        out = []
        for m, k, k1, k2 in self.feasible():
            per = []
            for v in (self.v1, self.v2):
                beta = TangencyVec.delta(1, intersect(self.d, v)) if intersect(self.d, v) else TangencyVec()
                validate_contact(self.d, v, TangencyVec(), beta)
                per.append((TangencyVec(), beta))
            both = self.v1 + self.v2
            beta = per[0][1] + per[1][1]
            out.append(SplitSolution((), self.d, (TangencyVec(), beta), 1, 0, both, (), tuple(per)))
        return out


def _all_tangencies(total: int) -> Iterator[tuple[TangencyVec, TangencyVec]]:
    """Every split of contact weight ``total`` into fixed (alpha) and free (beta) points."""
    for wa in range(total + 1):
        for pa in _partitions(wa):
            for pb in _partitions(total - wa):
                yield (TangencyVec(tuple(Counter(pa).items())),
                       TangencyVec(tuple(Counter(pb).items())))


@dataclass(frozen=True)
class PlaneRelativeLine:
    """Curves aH in the plane, relative to a line, through ``budget`` points."""

    budget: int = 1
    fields = ("a", "|alpha|", "|beta|")

    def feasible(self, brute: bool = False) -> list[tuple[int, int, int]]:
        if brute:
            out = set()
            for a in range(MAX_MULTIPLICITY + 1):
                d = HClass(_PLANE, (a,))
                for alpha, beta in _all_tangencies(a):
                    if c1_dot(d) >= 1 and point_budget(d, LINE, beta) == self.budget:
                        out.add((a, sum(alpha.entries.values()), sum(beta.entries.values())))
            return sorted(out)
        out = set()
        for a in range(1, MAX_MULTIPLICITY + 1):
            nb = self.budget + 1 - 2 * a  # from 2a - 1 + |beta| = budget
            if nb < 0 or nb > a:
                continue
            weights = [0] if nb == 0 else range(nb, a + 1)
            for wb in weights:
                rest = a - wb
                for na in range(1 if rest else 0, rest + 1):
                    out.add((a, na, nb))
        return sorted(out)

    def classify(self) -> list[SplitSolution]:
        out = []
        for a in range(1, MAX_MULTIPLICITY + 1):
            d = HClass(_PLANE, (a,))
            for alpha, beta in _all_tangencies(a):
                if point_budget(d, LINE, beta) == self.budget:
                    out.append(SplitSolution((), d, (alpha, beta), 1, 0, LINE))
        return out


@dataclass(frozen=True)
class RuledRelativeSection:
    """Curves aF + bE_inf relative to the section E_inf, through ``budget`` points."""

    budget: int = 0
    fields = ("a", "b", "|alpha|", "|beta|")

    def _classes(self):
        for a in range(MAX_MULTIPLICITY + 1):
            for b in range(MAX_MULTIPLICITY + 1):
                d = RuledClass(a, b)
                if d.c1_dot() >= 1:
                    yield d

    def feasible(self, brute: bool = False) -> list[tuple[int, int, int, int]]:
        out = set()
        if brute:
            for d in self._classes():
                for alpha, beta in _all_tangencies(d.dot(E_INF)):
                    if point_budget(d, E_INF, beta) == self.budget:
                        out.add((d.a, d.b, sum(alpha.entries.values()),
                                 sum(beta.entries.values())))
            return sorted(out)
        # a + 2b - 1 + |beta| = budget, with |beta| <= I(beta) <= a + b
        for b in range(MAX_MULTIPLICITY + 1):
            for nb in range(self.budget + 2):
                a = self.budget + 1 - 2 * b - nb
                if a < 0 or nb > a + b:
                    continue
                weights = [0] if nb == 0 else range(nb, a + b + 1)
                for wb in weights:
                    rest = a + b - wb
                    for na in range(1 if rest else 0, rest + 1):
                        out.add((a, b, na, nb))
        return sorted(out)

    def classify(self) -> list[SplitSolution]:
        out = []
        for d in self._classes():
            for alpha, beta in _all_tangencies(d.dot(E_INF)):
                if point_budget(d, E_INF, beta) == self.budget:
                    out.append(SplitSolution((), d, (alpha, beta), 1, 0, E_INF))
        return out


def feasible_degenerations(context) -> list[tuple]:
    return context.feasible()


def brute_force_degenerations(context) -> list[tuple]:
    return context.feasible(brute=True)


def classify(context) -> list[SplitSolution]:
    return context.classify()


# -- formal wall crossing ------------------------------------------------------------

@dataclass
class WallCrossingReport:
    """Signed formal sums over minus-side families; symbols name the families."""

    below: dict = field(default_factory=dict)
    above: dict = field(default_factory=dict)
    theta: dict = field(default_factory=dict)
    symbols: dict = field(default_factory=dict)

    def residual(self) -> dict:
        """below - above - 2 theta, as a formal combination."""
        out = Counter()
        for form, coef in ((self.below, 1), (self.above, -1), (self.theta, -2)):
            for sym, c in form.items():
                out[sym] += coef * c
        return {s: c for s, c in out.items() if c}

    @property
    def holds(self) -> bool:
        return not self.residual()

    def evaluate(self, values: dict) -> tuple[int, int, int]:
        def ev(form):
            return sum(c * values.get(s, 0) for s, c in form.items())
        return ev(self.below), ev(self.above), ev(self.theta)

    def render(self) -> str:
        def fmt(form):
            return " ".join(f"{'+' if c > 0 else '-'} {abs(c)}*{s}" for s, c in sorted(form.items())) or "0"
        lines = [f"{s} = {fam}" for s, fam in sorted(self.symbols.items())]
        lines += [f"W(d,s-1) = {fmt(self.below)}", f"W(d,s)   = {fmt(self.above)}",
                  f"theta    = {fmt(self.theta)}",
                  "identity W(d,s-1) = W(d,s) + 2 theta: " + ("confirmed" if self.holds else
                                                              f"FAILS, residual {self.residual()}")]
        return "\n".join(lines)


def _default_class() -> HClass:
    return HClass(_PLANE, (3,))


def _signed_sum(solutions, names: dict) -> dict:
    form = Counter()
    for sol in solutions:
        fam = sol.family()
        if fam not in names:
            names[fam] = f"F{len(names) + 1}"
        form[names[fam]] += sol.sign * sol.multiplicity
    return dict(form)


def derive_wall_crossing(d: HClass | None = None, below=None, above=None,
                         theta_real=None, theta_conj=None) -> WallCrossingReport:
    """Assemble both sides of a wall from classified families.

    ``below`` / ``above`` are the solutions with the two plane points real /
    conjugated, ``theta_*`` those of the exceptional cut with two contact
    points; each defaults to :func:`classify` on the matching context.
    """
    d = d if d is not None else _default_class()
    below = RealPointCut(d, 2, "real").classify() if below is None else below
    above = RealPointCut(d, 2, "conjugated").classify() if above is None else above
    theta_real = ExceptionalCut(d, 2, "real").classify() if theta_real is None else theta_real
    theta_conj = (ExceptionalCut(d, 2, "conjugated").classify()
                  if theta_conj is None else theta_conj)
    names: dict = {}
    report = WallCrossingReport(_signed_sum(below, names), _signed_sum(above, names),
                                _signed_sum(list(theta_real) + list(theta_conj), names))
    report.symbols = {v: f"{fam[0]} with alpha={fam[1]}, beta={fam[2]}" for fam, v in names.items()}
    return report


def flip_mass_shift(solution: SplitSolution) -> SplitSolution:
    return replace(solution, mass_shift=1 - solution.mass_shift % 2)


CONTEXT_KINDS = {
    "real-point": RealPointCut,
    "exceptional": ExceptionalCut,
    "conj-pair": ConjPairCut,
    "conj-exceptional": ConjExceptionalCut,
    "two-spheres": TwoSpheresRelative,
    "plane-line": PlaneRelativeLine,
    "ruled-section": RuledRelativeSection,
}
