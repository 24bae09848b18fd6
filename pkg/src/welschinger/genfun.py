"""Generating polynomials W^d(T) = sum_s W(d, s) T^s and their identities."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import MissingFact
from .factbase import FactBase
from .lattice import HClass, Surface
from .relations import InvariantKey, blowup_pullback, theta, wall_holds


@dataclass(frozen=True)
class Poly:
    """Integer polynomial in T; trailing zeros are dropped so equality is mathematical."""

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(x) for x in c))

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __len__(self):
        return len(self.coeffs)

    def __add__(self, other: Poly) -> Poly:
        n = max(len(self), len(other))
        return Poly(tuple(self[i] + other[i] for i in range(n)))

    def __neg__(self) -> Poly:
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def scale(self, k: int) -> Poly:
        return Poly(tuple(k * c for c in self.coeffs))

    def shift(self, n: int = 1) -> Poly:
        """Multiply by T^n."""
        return Poly((0,) * n + self.coeffs)


@dataclass(frozen=True)
class GenPoly:
    key: InvariantKey
    coefficients: tuple[int, ...] = field(default=())

    @property
    def s_max(self) -> int:
        return self.key.s_max

    @property
    def poly(self) -> Poly:
        return Poly(self.coefficients)

    def __str__(self):
        terms = []
        for s, c in enumerate(self.coefficients):
            mono = "" if s == 0 else ("T" if s == 1 else f"T^{s}")
            if not terms:
                terms.append(f"{c}{mono}")
            else:
                terms.append(f"{'-' if c < 0 else '+'} {abs(c)}{mono}")
        return " ".join(terms)

    def to_json(self) -> dict:
        return {"surface": str(self.key.surface), "class": str(self.key.d),
                "L": self.key.l_label, "F": self.key.f_label,
                "coefficients": list(self.coefficients)}


def build(store: FactBase, surface: Surface, d: HClass, l_label=None, f_label=None) -> GenPoly:
    key = InvariantKey(surface, d, 0, l_label, f_label)
    return build_from_key(store, key)


def build_from_key(store: FactBase, key: InvariantKey) -> GenPoly:
    key = key.at(0)
    coeffs = []
    for s in range(key.s_max + 1):
        v = store.value(key.at(s))
        if v is None:
            raise MissingFact(f"no fact for {key.at(s)}")
        coeffs.append(v)
    return GenPoly(key, tuple(coeffs))


@dataclass
class Report:
    """Outcome of an identity check."""

    name: str
    mismatches: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def __str__(self):
        head = f"{self.name}: {'ok' if self.ok else 'VIOLATED'}"
        return "\n".join([head] + [f"  {m}" for m in self.mismatches] + [f"  note: {n}" for n in self.notes])


def verify_wall_identity(store: FactBase, surface: Surface, d: HClass,
                         l_label=None, f_label=None) -> Report:
    """W(d, s-1) = W(d, s) + 2 theta(d, s-1) coefficientwise, plus the series boundary term."""
    key = InvariantKey(surface, d, 0, l_label, f_label)
    report = Report(f"wall identity for {key.d} on {surface}")
    if key.c1d < 4:
        report.mismatches.append(f"c1.d = {key.c1d} < 4, identity not applicable")
        return report
    w = build_from_key(store, key)
    th = build_from_key(store, theta(w.key))
    for s in range(1, w.s_max + 1):
        if not wall_holds(w.coefficients[s - 1], w.coefficients[s], th.coefficients[s - 1]):
            report.mismatches.append(
                f"s={s}: {w.coefficients[s - 1]} != {w.coefficients[s]} + 2*{th.coefficients[s - 1]}")
    # series form: W(T) T = W(T) - W(d,0) + 2 theta(T) T, up to the top term of W(T) T
    lhs = w.poly.shift(1)
    rhs = w.poly - Poly((w.coefficients[0],)) + th.poly.scale(2).shift(1)
    boundary = Poly((0,) * (w.s_max + 1) + (w.coefficients[-1],))
    if lhs - boundary != rhs:
        report.mismatches.append("series identity fails after the boundary correction")
    if boundary != Poly():
        report.notes.append(f"printed series identity differs by the top term "
                            f"{w.coefficients[-1]}T^{w.s_max + 1}")
    return report


def verify_blowup_identities(store: FactBase, surface: Surface, d: HClass, r: int, s: int,
                             l_label=None, f_label=None) -> Report:
    """Pullback identity W^d = W^{p!d} and subtracted identity with the T^s shift."""
    w = build(store, surface, d, l_label, f_label)
    report = Report(f"blow-up identities for {w.key.d} on {surface} at ({r},{s})")
    up = build_from_key(store, blowup_pullback(w.key, r, s))
    if up.poly != w.poly or len(up.coefficients) != len(w.coefficients):
        report.mismatches.append(f"pullback: {up} != {w}")
    target = up.key.surface
    sub = HClass(target, up.key.d.base, w.key.d.exc + (1,) * r, w.key.d.pairs + ((1, 1),) * s)
    if sub.c1_dot() < 1:
        report.notes.append("subtracted class has c1.d < 1; identity 2 not checked")
        return report
    low_key = InvariantKey(target, sub, 0, up.key.l_label, up.key.f_label)
    low = build_from_key(store, low_key)
    shared = range(s, min(w.s_max, s + low.s_max) + 1)
    for t in shared:
        if w.coefficients[t] != low.coefficients[t - s]:
            report.mismatches.append(
                f"s={t}: W(d,{t}) = {w.coefficients[t]} but subtracted class gives "
                f"{low.coefficients[t - s]}")
    outside = [t for t in range(s, w.s_max + 1) if t not in shared]
    if outside:
        report.notes.append(f"coefficients s={outside} lie outside the shared range")
    return report
