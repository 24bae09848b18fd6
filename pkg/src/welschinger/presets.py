"""Built-in seed sets and the tables they reproduce."""

from __future__ import annotations

from dataclasses import dataclass

from .factbase import FactBase
from .lattice import (HClass, MINIMAL_DEL_PEZZO_2, PROJECTIVE_PLANE, QUADRIC_SURFACE, Surface,
                      conic_bundle, pullback)
from .relations import InvariantKey

TABLE1 = "published plane table"
SECTION_DP2 = "published degree 2 del Pezzo table"

CP2 = Surface(PROJECTIVE_PLANE)

# W_{CP2}(3H, s) for s = 0..4
CUBIC_ROW = (8, 6, 4, 2, 0)

DEGREE2_SURFACES = (
    Surface(MINIMAL_DEL_PEZZO_2),
    Surface(conic_bundle(3)),
    Surface(conic_bundle(2), 0, 1),
    Surface(conic_bundle(1), 0, 2),
    Surface(QUADRIC_SURFACE, 0, 3),
)
DEGREE2_W0 = (0, 0, 0, 8, 32)
DEGREE2_BLOWUP_W0 = (18, 10, 6, 6, 10)
DEGREE2_W1 = (-36, -20, -12, -4, 12)


def line_class(k: int, surface: Surface = CP2) -> HClass:
    return pullback(HClass(CP2, (k,)), surface)


def cubic_key(s: int) -> InvariantKey:
    return InvariantKey(CP2, HClass.anticanonical(CP2), s)


def block_a_key(row: int, pairs: int) -> InvariantKey | None:
    """Cell (row, pairs) of the first block: c1 of CP2 blown up at ``pairs`` pairs."""
    surface = Surface(PROJECTIVE_PLANE, 0, pairs)
    d = HClass.anticanonical(surface)
    if d.c1_dot() - 1 - 2 * row < 0:
        return None
    return InvariantKey(surface, d, row)


BLOCK_B_SURFACES = (Surface(PROJECTIVE_PLANE, 3, 0), Surface(PROJECTIVE_PLANE, 1, 1))
BLOCK_B_VALUES = ((1, 1, 240), (1, 1, 144))


def block_b_keys(surface: Surface) -> tuple[InvariantKey, ...]:
    keys = [InvariantKey(surface, line_class(k, surface), 0) for k in (1, 2)]
    quartic = line_class(4, surface)
    if surface.s:
        # the quartic entry on a surface with a blown-up pair subtracts that pair
        quartic = HClass(surface, quartic.base, quartic.exc,
                         ((1, 1),) + quartic.pairs[1:])
    keys.append(InvariantKey(surface, quartic, 0))
    return tuple(keys)


def degree2_key(surface: Surface, s: int = 0) -> InvariantKey:
    return InvariantKey(surface, HClass.anticanonical(surface, 2), s)


def degree2_blowup_key(surface: Surface) -> InvariantKey:
    return degree2_key(surface.blow_up(1, 0))


def _table1_minimal(store: FactBase):
    for s, v in enumerate(CUBIC_ROW):
        store.insert_seed(cubic_key(s), v, TABLE1)
    for k, v in ((1, 1), (2, 1), (4, 240)):
        store.insert_seed(InvariantKey(CP2, line_class(k), 0), v, TABLE1)
    store.insert_seed(InvariantKey(CP2, line_class(4), 1), 144, TABLE1)


def _delpezzo2(store: FactBase):
    for surface, v0, vb in zip(DEGREE2_SURFACES, DEGREE2_W0, DEGREE2_BLOWUP_W0):
        store.insert_seed(degree2_key(surface), v0, SECTION_DP2)
        store.insert_seed(degree2_blowup_key(surface), vb, SECTION_DP2)


def _all_printed(store: FactBase):
    """Every printed table entry as a seed."""
    _table1_minimal(store)
    for row in range(4):
        for pairs in range(5):
            key = block_a_key(row, pairs)
            if key is not None:
                store.insert_seed(key, CUBIC_ROW[row + pairs], TABLE1)
    for surface, values in zip(BLOCK_B_SURFACES, BLOCK_B_VALUES):
        for key, v in zip(block_b_keys(surface), values):
            store.insert_seed(key, v, TABLE1)
    _delpezzo2(store)
    for surface, v in zip(DEGREE2_SURFACES, DEGREE2_W1):
        store.insert_seed(degree2_key(surface, 1), v, SECTION_DP2)


PRESETS = {
    "table1": _table1_minimal,
    "delpezzo2": _delpezzo2,
    "all": _all_printed,
}


def load_preset(name: str, store: FactBase | None = None) -> FactBase:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}")
    store = store if store is not None else FactBase()
    PRESETS[name](store)
    return store


@dataclass
class Table:
    """A block of cells with row and column labels; None marks an undefined cell."""

    title: str
    columns: list[str]
    rows: list[str]
    cells: list[list[int | None]]


def _cell(store: FactBase, key: InvariantKey | None):
    if key is None:
        return None
    v = store.value(key)
    if v is None:
        raise LookupError(f"missing fact {key}")
    return v


def table1(store: FactBase) -> list[Table]:
    block_a = Table("W_X(c1(X), s) for X = CP2_{0,n}",
                    [str(n) for n in range(5)],
                    [f"W(c1,{row})" for row in range(4)],
                    [[_cell(store, block_a_key(row, n)) for n in range(5)] for row in range(4)])
    block_b = Table("W_X(k[H], 0)", ["W([H],0)", "W(2[H],0)", "W(4[H],0)"],
                    [s.name for s in BLOCK_B_SURFACES],
                    [[_cell(store, k) for k in block_b_keys(s)] for s in BLOCK_B_SURFACES])
    return [block_a, block_b]


def delpezzo2(store: FactBase) -> list[Table]:
    names = [s.name for s in DEGREE2_SURFACES]
    rows = ["W(2c1(X),0)", "W(2c1(X_{1,0}),0)", "W(2c1(X),1)"]
    cells = [
        [_cell(store, degree2_key(s)) for s in DEGREE2_SURFACES],
        [_cell(store, degree2_blowup_key(s)) for s in DEGREE2_SURFACES],
        [_cell(store, degree2_key(s, 1)) for s in DEGREE2_SURFACES],
    ]
    return [Table("degree 2 del Pezzo surfaces", names, rows, cells)]


TABLES = {"table1": table1, "delpezzo2": delpezzo2}
