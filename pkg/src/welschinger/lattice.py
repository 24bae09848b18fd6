"""Surfaces, their second homology lattices, blow-ups and pullbacks.

A surface is recorded as a base surface together with the number of real
blown-up points ``r`` and conjugated blown-up pairs ``s``.  Blown-up points
are anonymous, so classes are compared after sorting exceptional
coefficients (see :func:`canonicalize`).

A class is stored as ``base - sum b_i E_i - sum (c'_j E'_j + c''_j E''_j)``,
i.e. exceptional coefficients are the *subtracted* amounts.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import LatticeError

CP2 = "CP2"
QUADRIC = "P1xP1"
CONIC_BUNDLE = "B"
DEL_PEZZO_2 = "X1"

_KINDS = (CP2, QUADRIC, CONIC_BUNDLE, DEL_PEZZO_2)


@dataclass(frozen=True, order=True)
class Base:
    """One of the four base families.

    ``n`` is only meaningful for the real conic bundle, which has ``2n``
    singular fibers.
    """

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise LatticeError(f"unknown base {self.kind!r}")
        if self.kind == CONIC_BUNDLE:
            if not 1 <= self.n <= 3:
                raise LatticeError(f"conic bundle needs 1 <= n <= 3, got {self.n}")
        elif self.n:
            raise LatticeError(f"base {self.kind} takes no parameter")

    @property
    def c1_squared(self) -> int:
        if self.kind == CP2:
            return 9
        if self.kind == QUADRIC:
            return 8
        if self.kind == CONIC_BUNDLE:
            return 8 - 2 * self.n
        return 2

    @property
    def rank(self) -> int:
        """Number of integers in a base part."""
        return 2 if self.kind == QUADRIC else 1

    @property
    def c1(self) -> tuple[int, ...]:
        if self.kind == CP2:
            return (3,)
        if self.kind == QUADRIC:
            return (2, 2)
        return (1,)

    def pair(self, u: tuple[int, ...], v: tuple[int, ...]) -> int:
        if self.kind == CP2:
            return u[0] * v[0]
        if self.kind == QUADRIC:
            return u[0] * v[1] + u[1] * v[0]
        return u[0] * v[0] * self.c1_squared

    @property
    def name(self) -> str:
        return f"B{self.n}" if self.kind == CONIC_BUNDLE else self.kind


PROJECTIVE_PLANE = Base(CP2)
QUADRIC_SURFACE = Base(QUADRIC)
MINIMAL_DEL_PEZZO_2 = Base(DEL_PEZZO_2)


def conic_bundle(n: int) -> Base:
    return Base(CONIC_BUNDLE, n)


@dataclass(frozen=True)
class Surface:
    base: Base
    r: int = 0
    s: int = 0
    l_label: str | None = None
    f_label: str | None = None

    def __post_init__(self):
        if self.r < 0 or self.s < 0:
            raise LatticeError("blow-up counts must be non-negative")

    @property
    def c1_squared(self) -> int:
        return self.base.c1_squared - self.r - 2 * self.s

    @property
    def blowups(self) -> int:
        return self.r + self.s

    def blow_up(self, r: int = 0, s: int = 0) -> Surface:
        return blow_up(self, r, s)

    def extends(self, other: Surface) -> bool:
        return (self.base == other.base and self.r >= other.r and self.s >= other.s
                and self.l_label == other.l_label and self.f_label == other.f_label)

    @property
    def name(self) -> str:
        text = self.base.name
        if self.r or self.s:
            text += f"_{{{self.r},{self.s}}}"
        return text

    def __str__(self):
        return self.name


def blow_up(surface: Surface, r: int = 0, s: int = 0) -> Surface:
    if r < 0 or s < 0:
        raise LatticeError("blow-up counts must be non-negative")
    return Surface(surface.base, surface.r + r, surface.s + s,
                   surface.l_label, surface.f_label)


@dataclass(frozen=True)
class HClass:
    """A homology class on a blown-up base surface."""

    surface: Surface
    base: tuple[int, ...]
    exc: tuple[int, ...] = ()
    pairs: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(int(x) for x in self.base))
        object.__setattr__(self, "exc", tuple(int(x) for x in self.exc))
        object.__setattr__(self, "pairs", tuple((int(a), int(b)) for a, b in self.pairs))
        if len(self.base) != self.surface.base.rank:
            raise LatticeError(f"{self.surface.base.name} needs a base part of "
                               f"length {self.surface.base.rank}")
        if len(self.exc) != self.surface.r:
            raise LatticeError(f"expected {self.surface.r} real exceptional "
                               f"coefficients, got {len(self.exc)}")
        if len(self.pairs) != self.surface.s:
            raise LatticeError(f"expected {self.surface.s} exceptional pairs, "
                               f"got {len(self.pairs)}")

    @classmethod
    def anticanonical(cls, surface: Surface, k: int = 1) -> HClass:
        """k times the first Chern class of ``surface``."""
        return cls(surface, tuple(k * x for x in surface.base.c1),
                   (k,) * surface.r, ((k, k),) * surface.s)

    @classmethod
    def exceptional(cls, surface: Surface, index: int) -> HClass:
        """The class E_index of a real blown-up point (0-based index)."""
        exc = [0] * surface.r
        exc[index] = -1
        return cls(surface, (0,) * surface.base.rank, tuple(exc), ((0, 0),) * surface.s)

    @property
    def tau_anti_invariant(self) -> bool:
        return all(a == b for a, b in self.pairs)

    @property
    def degree(self) -> int:
        """H-coefficient, or the least anticanonical multiple bounding the base part."""
        if self.surface.base.kind == QUADRIC:
            return -(-max(self.base) // 2)
        return self.base[0]

    def dot(self, other: HClass) -> int:
        return intersect(self, other)

    def c1_dot(self) -> int:
        return c1_dot(self)

    def __add__(self, other: HClass) -> HClass:
        _same_surface(self, other)
        return HClass(self.surface,
                      tuple(a + b for a, b in zip(self.base, other.base)),
                      tuple(a + b for a, b in zip(self.exc, other.exc)),
                      tuple((a + c, b + d) for (a, b), (c, d) in zip(self.pairs, other.pairs)))

    def __neg__(self) -> HClass:
        return self.scale(-1)

    def __sub__(self, other: HClass) -> HClass:
        return self + (-other)

    def scale(self, k: int) -> HClass:
        return HClass(self.surface, tuple(k * x for x in self.base),
                      tuple(k * x for x in self.exc),
                      tuple((k * a, k * b) for a, b in self.pairs))

    def with_surface(self, surface: Surface) -> HClass:
        """Same coefficients, relabeled surface (labels only)."""
        return HClass(surface, self.base, self.exc, self.pairs)

    def __str__(self):
        return render_class(self)


def _same_surface(d1: HClass, d2: HClass):
    a, b = d1.surface, d2.surface
    if (a.base, a.r, a.s) != (b.base, b.r, b.s):
        raise LatticeError(f"classes live on different surfaces: {a} and {b}")


def pullback(d: HClass, target: Surface) -> HClass:
    """Pull ``d`` back to a blow-up ``target`` of its surface."""
    src = d.surface
    if target.base != src.base or target.r < src.r or target.s < src.s:
        raise LatticeError(f"{target} does not extend {src}")
    return HClass(target, d.base, d.exc + (0,) * (target.r - src.r),
                  d.pairs + ((0, 0),) * (target.s - src.s))


def intersect(d1, d2) -> int:
    if not isinstance(d1, HClass) or not isinstance(d2, HClass):
        return d1.dot(d2)
    _same_surface(d1, d2)
    total = d1.surface.base.pair(d1.base, d2.base)
    total -= sum(a * b for a, b in zip(d1.exc, d2.exc))
    total -= sum(a * c + b * e for (a, b), (c, e) in zip(d1.pairs, d2.pairs))
    return total


def c1_dot(d) -> int:
    if not isinstance(d, HClass):
        return d.c1_dot()
    base = d.surface.base
    return base.pair(base.c1, d.base) - sum(d.exc) - sum(a + b for a, b in d.pairs)


def canonicalize(d: HClass) -> HClass:
    return HClass(d.surface, d.base, tuple(sorted(d.exc, reverse=True)),
                  tuple(sorted(d.pairs, reverse=True)))


def self_intersection(d: HClass) -> int:
    return intersect(d, d)


# -- text form -------------------------------------------------------------

_SURFACE_RE = re.compile(r"^(CP2|P1xP1|X1|B([1-3]))(?:_\{?(\d+),(\d+)\}?)?$")


def parse_surface(text: str) -> Surface:
    m = _SURFACE_RE.match(text.strip())
    if not m:
        raise LatticeError(f"cannot parse surface {text!r}")
    kind = CONIC_BUNDLE if m.group(2) else m.group(1)
    base = Base(kind, int(m.group(2)) if m.group(2) else 0)
    r = int(m.group(3) or 0)
    s = int(m.group(4) or 0)
    return Surface(base, r, s)


def _coef(c: int, sym: str) -> str:
    if c == 1:
        return sym
    if c == -1:
        return "-" + sym
    return f"{c}{sym}"


def render_class(d: HClass) -> str:
    kind = d.surface.base.kind
    terms: list[tuple[int, str]] = []
    if kind == CP2:
        terms.append((d.base[0], "H"))
    elif kind == QUADRIC:
        terms += [(d.base[0], "f1"), (d.base[1], "f2")]
    else:
        terms.append((d.base[0], "c1"))
    for i, b in enumerate(d.exc, 1):
        terms.append((-b, f"E{i}"))
    for j, (a, b) in enumerate(d.pairs, 1):
        if a == b:
            terms.append((-a, f"(E'{j}+E''{j})"))
        else:
            terms += [(-a, f"E'{j}"), (-b, f"E''{j}")]
    terms = [(c, sym) for c, sym in terms if c]
    if not terms:
        return "0"
    out = _coef(terms[0][0], terms[0][1])
    for c, sym in terms[1:]:
        out += (" - " if c < 0 else " + ") + _coef(abs(c), sym)
    return out


_TERM_RE = re.compile(
    r"([+-]?)\s*(\d*)\s*(H|f1|f2|c1|E(\d+)|E'(\d+)|E''(\d+)|\(E'(\d+)\+E''(\d+)\))")


def parse_class(text: str, surface: Surface) -> HClass:
    """Parse strings such as ``3H - E1 - (E'1+E''1)`` or ``2c1 - 2E1``."""
    kind = surface.base.kind
    base = [0] * surface.base.rank
    exc = [0] * surface.r
    pairs = [[0, 0] for _ in range(surface.s)]
    src = text.replace(" ", "")
    if src in ("", "0"):
        return HClass(surface, tuple(base), tuple(exc), tuple(map(tuple, pairs)))
    pos = 0
    while pos < len(src):
        m = _TERM_RE.match(src, pos)
        if not m or m.start() != pos or (pos and not m.group(1)):
            raise LatticeError(f"cannot parse class {text!r} at {src[pos:]!r}")
        pos = m.end()
        c = int(m.group(2) or 1) * (-1 if m.group(1) == "-" else 1)
        sym = m.group(3)

        def index(g, count):
            i = int(g) - 1
            if not 0 <= i < count:
                raise LatticeError(f"{sym} out of range on {surface}")
            return i

        if sym == "H" and kind == CP2:
            base[0] += c
        elif sym in ("f1", "f2") and kind == QUADRIC:
            base[int(sym[1]) - 1] += c
        elif sym == "c1" and kind in (CONIC_BUNDLE, DEL_PEZZO_2):
            base[0] += c
        elif m.group(4):
            exc[index(m.group(4), surface.r)] -= c
        elif m.group(5):
            pairs[index(m.group(5), surface.s)][0] -= c
        elif m.group(6):
            pairs[index(m.group(6), surface.s)][1] -= c
        elif m.group(7):
            if m.group(7) != m.group(8):
                raise LatticeError(f"mismatched pair in {text!r}")
            j = index(m.group(7), surface.s)
            pairs[j][0] -= c
            pairs[j][1] -= c
        else:
            raise LatticeError(f"term {sym} makes no sense on {surface}")
    return HClass(surface, tuple(base), tuple(exc), tuple(map(tuple, pairs)))
