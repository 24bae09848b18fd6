"""Store of invariant values with forward-chaining closure and provenance."""

from __future__ import annotations

import hashlib
import json
import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import InvalidKey, LatticeError, MalformedRecord, ParityError
from .lattice import Base, HClass, Surface, CP2, QUADRIC, CONIC_BUNDLE
from .relations import (RULE_FAMILIES, InvariantKey, Relation, is_instance, relations_of,
                        wall_applies, wall_keys)

DEFAULT_MAX_BLOWUPS = 4
DEFAULT_MAX_DEGREE = 4


@dataclass(frozen=True)
class Seed:
    citation: str


@dataclass(frozen=True)
class Derived:
    relation: Relation
    output: InvariantKey

    @property
    def rule(self) -> str:
        return self.relation.step_rule(self.output)

    @property
    def inputs(self) -> tuple[InvariantKey, ...]:
        return tuple(k for k in self.relation.keys if k != self.output)


@dataclass(frozen=True)
class Fact:
    key: InvariantKey
    value: int
    provenance: Seed | Derived


@dataclass(frozen=True)
class Tree:
    """Derivation tree of a value; leaves are seeds."""

    key: InvariantKey
    value: int | None
    rule: str
    children: tuple[Tree, ...] = ()

    def leaves(self) -> Iterator[Tree]:
        if not self.children:
            yield self
        for child in self.children:
            yield from child.leaves()

    def render(self, indent: int = 0) -> str:
        value = "unknown" if self.value is None else self.value
        line = f"{'  ' * indent}{value}  {self.key}  [{self.rule}]"
        return "\n".join([line] + [c.render(indent + 1) for c in self.children])


class Contradiction(Exception):
    """Two derivations assign different values to one key, or a parity break."""

    def __init__(self, key: InvariantKey, first: int, second: int | None,
                 first_tree: Tree, second_tree: Tree | None, reason: str = ""):
        self.key = key
        self.first = first
        self.second = second
        self.first_tree = first_tree
        self.second_tree = second_tree
        self.reason = reason or f"{first} != {second}"
        super().__init__(f"{key}: {self.reason}")

    def render(self) -> str:
        parts = [f"contradiction at {self.key}: {self.reason}", self.first_tree.render(1)]
        if self.second_tree is not None:
            parts.append(self.second_tree.render(1))
        return "\n".join(parts)


@dataclass(frozen=True)
class Bounds:
    max_blowups: int = DEFAULT_MAX_BLOWUPS
    max_degree: int = DEFAULT_MAX_DEGREE


def _tree(facts: dict, key: InvariantKey, _memo=None) -> Tree:
    memo = {} if _memo is None else _memo
    if key in memo:
        return memo[key] or Tree(key, facts[key].value, "circular")
    fact = facts.get(key)
    if fact is None:
        return Tree(key, None, "missing")
    memo[key] = None
    if isinstance(fact.provenance, Seed):
        out = Tree(key, fact.value, f"seed: {fact.provenance.citation}")
    else:
        p = fact.provenance
        out = Tree(key, fact.value, p.rule, tuple(_tree(facts, k, memo) for k in p.inputs))
    memo[key] = out
    return out


def _step_tree(facts: dict, relation: Relation, output: InvariantKey, value: int) -> Tree:
    inputs = [k for k in relation.keys if k != output]
    return Tree(output, value, relation.step_rule(output), tuple(_tree(facts, k) for k in inputs))


def _parity_pairs(facts: dict) -> Iterator[tuple[InvariantKey, InvariantKey]]:
    for key in sorted(facts):
        if wall_applies(key) and key.at(key.s - 1) in facts:
            yield key.at(key.s - 1), key


def closure(seeds: dict[InvariantKey, Fact], bounds: Bounds,
            rng: random.Random | None = None) -> dict[InvariantKey, Fact]:
    """Fixpoint of all relations within ``bounds``, starting from ``seeds``.

    Raises :class:`Contradiction` on the first conflict.  ``rng`` shuffles the
    rule-family order and the worklist, which must not change the result.
    """
    facts: dict[InvariantKey, Fact] = {}
    order = sorted(k for k in seeds if k.d.degree <= bounds.max_degree
                   and k.surface.blowups <= bounds.max_blowups)
    for k in order:
        facts[k] = seeds[k]
    families = list(RULE_FAMILIES)
    queue = deque(order)
    if rng is not None:
        rng.shuffle(families)
        items = list(queue)
        rng.shuffle(items)
        queue = deque(items)
    while queue:
        key = queue.popleft()
        candidates = list(relations_of(key, bounds.max_blowups, families))
        if rng is not None:
            rng.shuffle(candidates)
        for rel in candidates:
            missing = [k for k in rel.keys if k not in facts]
            if len(missing) > 1:
                continue
            values = {k: facts[k].value for k in rel.keys if k in facts}
            target = missing[0] if missing else rel.keys[-1]
            try:
                value = rel.solve(target, values)
            except ParityError as exc:
                _raise_parity(facts, rel, str(exc))
            if missing:
                facts[target] = Fact(target, value, Derived(rel, target))
                queue.append(target)
            elif value != facts[target].value:
                raise Contradiction(target, facts[target].value, value, _tree(facts, target),
                                    _step_tree(facts, rel, target, value))
    for prev, nxt in _parity_pairs(facts):
        if (facts[prev].value - facts[nxt].value) % 2:
            _raise_parity_pair(facts, prev, nxt)
    return facts


def _raise_parity(facts, rel: Relation, reason: str):
    prev, nxt = rel.keys[0], rel.keys[1]
    _raise_parity_pair(facts, prev, nxt, f"odd difference across the wall ({reason})")


def _raise_parity_pair(facts, prev, nxt, reason=""):
    _, _, th = wall_keys(nxt)
    raise Contradiction(th, facts[prev].value, facts[nxt].value, _tree(facts, prev),
                        _tree(facts, nxt), reason or "odd difference across the wall")


def replay(facts: dict[InvariantKey, Fact], key: InvariantKey, bounds: Bounds | None = None) -> int:
    """Recompute a stored value from its seed leaves, checking every step."""
    memo: dict[InvariantKey, int] = {}
    active: set[InvariantKey] = set()

    def value_of(k):
        if k in memo:
            return memo[k]
        if k not in facts:
            raise KeyError(f"provenance refers to missing fact {k}")
        fact = facts[k]
        if isinstance(fact.provenance, Seed):
            memo[k] = fact.value
            return fact.value
        rel = fact.provenance.relation
        if k in active:
            raise ValueError(f"circular provenance at {k}")
        active.add(k)
        inputs = {i: value_of(i) for i in rel.keys if i != k}
        active.discard(k)
        if not is_instance(rel, None if bounds is None else bounds.max_blowups):
            raise ValueError(f"{rel.rule} step for {k} is not an instance of its identity")
        v = rel.solve(k, inputs)
        memo[k] = v
        return v

    return value_of(key)


@dataclass
class FactBase:
    facts: dict[InvariantKey, Fact] = field(default_factory=dict)
    bounds: Bounds = field(default_factory=Bounds)

    def __len__(self):
        return len(self.facts)

    def __contains__(self, key):
        return key in self.facts

    @property
    def seeds(self) -> dict[InvariantKey, Fact]:
        return {k: f for k, f in self.facts.items() if isinstance(f.provenance, Seed)}

    def insert_seed(self, key: InvariantKey, value: int, citation: str) -> InvariantKey:
        if not isinstance(key, InvariantKey):
            raise InvalidKey(f"not an invariant key: {key!r}")
        value = int(value)
        old = self.facts.get(key)
        if old is not None:
            if old.value != value:
                new_tree = Tree(key, value, f"seed: {citation}")
                raise Contradiction(key, old.value, value, _tree(self.facts, key), new_tree)
            return key
        self.facts[key] = Fact(key, value, Seed(citation))
        return key

    def add(self, fact: Fact):
        """Insert a fact read from a file, seeds and derived alike."""
        old = self.facts.get(fact.key)
        if old is not None and old.value != fact.value:
            raise Contradiction(fact.key, old.value, fact.value, _tree(self.facts, fact.key),
                                Tree(fact.key, fact.value, "imported"))
        if old is None:
            self.facts[fact.key] = fact

    def derive_closure(self, bounds: Bounds | None = None, rng: random.Random | None = None) -> int:
        """Run closure; returns the number of new facts. The store is replaced atomically."""
        bounds = bounds or self.bounds
        base = dict(self.facts)
        new = closure(self.seeds, bounds, rng)
        for k, f in base.items():
            if k in new and new[k].value != f.value:
                raise Contradiction(k, f.value, new[k].value, _tree(base, k), _tree(new, k))
        merged = dict(base)
        for k, f in new.items():
            merged.setdefault(k, f)
        added = len(merged) - len(base)
        self.facts = merged
        self.bounds = bounds
        return added

    def value(self, key: InvariantKey) -> int | None:
        f = self.facts.get(key)
        return None if f is None else f.value

    def query(self, key: InvariantKey) -> tuple[int, Tree] | None:
        if key not in self.facts:
            return None
        return self.facts[key].value, _tree(self.facts, key)

    def tree(self, key: InvariantKey) -> Tree:
        return _tree(self.facts, key)

    def check_consistency(self, bounds: Bounds | None = None) -> Contradiction | None:
        """Re-derive from seeds and compare; replay every stored derivation."""
        bounds = bounds or self.bounds
        try:
            fresh = closure(self.seeds, bounds)
        except Contradiction as exc:
            return exc
        for k in sorted(self.facts):
            f = self.facts[k]
            if isinstance(f.provenance, Derived):
                try:
                    v = replay(self.facts, k)
                except (KeyError, ValueError) as exc:
                    return Contradiction(k, f.value, None, _tree_or_leaf(self.facts, k), None,
                                         f"provenance does not replay: {exc}")
                if v != f.value:
                    return Contradiction(k, f.value, v, _tree(self.facts, k), None,
                                         f"replay gives {v}, stored {f.value}")
            if k in fresh and fresh[k].value != f.value:
                return Contradiction(k, f.value, fresh[k].value, _tree(self.facts, k),
                                     _tree(fresh, k))
        for prev, nxt in _parity_pairs(self.facts):
            if (self.facts[prev].value - self.facts[nxt].value) % 2:
                try:
                    _raise_parity_pair(self.facts, prev, nxt)
                except Contradiction as exc:
                    return exc
        return None

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        for k in sorted(self.facts):
            h.update(json.dumps(key_to_json(k), separators=(",", ":")).encode())
            h.update(str(self.facts[k].value).encode())
        return h.hexdigest()

    # -- persistence -------------------------------------------------------

    def export(self, path) -> int:
        lines = [record_line(self.facts[k]) for k in sorted(self.facts)]
        Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return len(lines)

    @classmethod
    def load(cls, path) -> FactBase:
        data = Path(path).read_bytes()
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            line = data[: exc.start].count(b"\n") + 1
            raise MalformedRecord(line, "not valid UTF-8") from None
        return cls.from_lines(text.split("\n"))

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> FactBase:
        store = cls()
        records = []
        for n, line in enumerate(lines, 1):
            if not line.strip():
                continue
            records.append((n, parse_record(line, n)))
        for n, (key, value, prov) in records:
            if isinstance(prov, Seed):
                fact = Fact(key, value, prov)
            else:
                rule, inputs, coeffs, params = prov
                rel = _relation_from_record(rule, key, inputs, coeffs, params, n)
                fact = Fact(key, value, Derived(rel, key))
            if key in store.facts:
                if store.facts[key].value == value:
                    raise MalformedRecord(n, f"duplicate record for {key}")
            store.add(fact)
        return store


def _tree_or_leaf(facts, key):
    return _tree(facts, key)


# -- JSON records ---------------------------------------------------------------

def surface_to_json(s: Surface) -> dict:
    out = {"base": s.base.kind}
    if s.base.kind == CONIC_BUNDLE:
        out["n"] = s.base.n
    out["r"] = s.r
    out["s"] = s.s
    return out


def class_to_json(d: HClass) -> dict:
    kind = d.surface.base.kind
    if kind == CP2:
        out = {"H": d.base[0]}
    elif kind == QUADRIC:
        out = {"f1": d.base[0], "f2": d.base[1]}
    else:
        out = {"c1": d.base[0]}
    out["E"] = list(d.exc)
    out["pairs"] = [list(p) for p in d.pairs]
    return out


def key_to_json(k: InvariantKey) -> dict:
    out = {"surface": surface_to_json(k.surface), "class": class_to_json(k.d), "s": k.s}
    if k.l_label is not None:
        out["L"] = k.l_label
    if k.f_label is not None:
        out["F"] = k.f_label
    return out


def _digest(record: dict) -> str:
    body = json.dumps(record, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(body.encode("utf-8")).hexdigest()[:16]


def record_line(fact: Fact, digest: bool = True) -> str:
    rec = key_to_json(fact.key)
    rec["value"] = str(fact.value)
    if isinstance(fact.provenance, Seed):
        rec["prov"] = {"seed": fact.provenance.citation}
    else:
        p = fact.provenance
        prov = {"rule": p.rule}
        if p.relation.labeled:
            prov["of"] = p.relation.rule
        if p.relation.params:
            prov["params"] = list(p.relation.params)
        prov["inputs"] = [key_to_json(k) for k in p.inputs]
        prov["coeffs"] = [p.relation.coefficient(fact.key)] + [
            p.relation.coefficient(k) for k in p.inputs]
        rec["prov"] = prov
    if digest:
        rec["digest"] = _digest(rec)
    return json.dumps(rec, separators=(",", ":"), ensure_ascii=False)


def _expect(obj, kind, what, line):
    if not isinstance(obj, kind) or (kind is int and isinstance(obj, bool)):
        raise MalformedRecord(line, f"{what} must be {kind.__name__}")
    return obj


def _fields(obj: dict, required: tuple, optional: tuple, what: str, line: int):
    if not isinstance(obj, dict):
        raise MalformedRecord(line, f"{what} must be an object")
    extra = set(obj) - set(required) - set(optional)
    missing = [f for f in required if f not in obj]
    if extra:
        raise MalformedRecord(line, f"unknown {what} field(s) {sorted(extra)}")
    if missing:
        raise MalformedRecord(line, f"missing {what} field(s) {missing}")


def surface_from_json(obj, line) -> Surface:
    kind = obj.get("base") if isinstance(obj, dict) else None
    required = ("base", "n", "r", "s") if kind == CONIC_BUNDLE else ("base", "r", "s")
    _fields(obj, required, (), "surface", line)
    try:
        base = Base(_expect(kind, str, "base", line), _expect(obj.get("n", 0), int, "n", line))
        return Surface(base, _expect(obj["r"], int, "r", line), _expect(obj["s"], int, "s", line))
    except LatticeError as exc:
        raise MalformedRecord(line, str(exc)) from None


def class_from_json(obj, surface: Surface, line) -> HClass:
    kind = surface.base.kind
    names = {CP2: ("H",), QUADRIC: ("f1", "f2")}.get(kind, ("c1",))
    _fields(obj, names + ("E", "pairs"), (), "class", line)
    base = tuple(_expect(obj[n], int, n, line) for n in names)
    exc = tuple(_expect(x, int, "E entry", line) for x in _expect(obj["E"], list, "E", line))
    pairs = []
    for p in _expect(obj["pairs"], list, "pairs", line):
        if not isinstance(p, list) or len(p) != 2:
            raise MalformedRecord(line, "pair entries must be [c', c'']")
        pairs.append(tuple(_expect(x, int, "pair entry", line) for x in p))
    try:
        return HClass(surface, base, exc, tuple(pairs))
    except LatticeError as exc_:
        raise MalformedRecord(line, str(exc_)) from None


def key_from_json(obj, line) -> InvariantKey:
    _fields(obj, ("surface", "class", "s"), ("L", "F"), "key", line)
    surface = surface_from_json(obj["surface"], line)
    d = class_from_json(obj["class"], surface, line)
    s = _expect(obj["s"], int, "s", line)
    labels = [obj.get(n) for n in ("L", "F")]
    for lab in labels:
        if lab is not None:
            _expect(lab, str, "label", line)
    try:
        return InvariantKey(surface, d, s, *labels)
    except InvalidKey as exc:
        raise MalformedRecord(line, str(exc)) from None


_DECIMAL = set("0123456789")


def _parse_value(text, line) -> int:
    _expect(text, str, "value", line)
    digits = text[1:] if text.startswith("-") else text
    if not digits or set(digits) - _DECIMAL or (len(digits) > 1 and digits[0] == "0") \
            or text == "-0":
        raise MalformedRecord(line, f"value {text!r} is not a canonical decimal integer")
    return int(text)


def parse_record(text: str, line: int = 1):
    try:
        rec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(line, f"invalid JSON: {exc.msg}") from None
    if not isinstance(rec, dict):
        raise MalformedRecord(line, "record must be an object")
    _fields(rec, ("surface", "class", "s", "value", "prov"), ("L", "F", "digest"), "record", line)
    if "digest" in rec:
        body = {k: v for k, v in rec.items() if k != "digest"}
        if rec["digest"] != _digest(body):
            raise MalformedRecord(line, "digest mismatch")
    key = key_from_json({k: rec[k] for k in ("surface", "class", "s", "L", "F") if k in rec}, line)
    value = _parse_value(rec["value"], line)
    prov = rec["prov"]
    if isinstance(prov, dict) and "seed" in prov:
        _fields(prov, ("seed",), (), "prov", line)
        return key, value, Seed(_expect(prov["seed"], str, "seed", line))
    _fields(prov, ("rule", "inputs", "coeffs"), ("of", "params"), "prov", line)
    inputs = [key_from_json(k, line) for k in _expect(prov["inputs"], list, "inputs", line)]
    coeffs = [_expect(c, int, "coefficient", line)
              for c in _expect(prov["coeffs"], list, "coeffs", line)]
    params = [_expect(p, int, "param", line)
              for p in _expect(prov.get("params", []), list, "params", line)]
    rule = _expect(prov["rule"], str, "rule", line)
    if rule == "Remark1.5":
        rule = _expect(prov.get("of"), str, "of", line)
    return key, value, (rule, inputs, coeffs, params)


_RULE_BASE = {"Eq7-down": "Eq7", "Eq7-up": "Eq7", "Theta": "Eq7"}
_KNOWN_RULES = {"Eq1", "Eq2", "Eq3", "Eq4", "Eq5", "Eq6", "Eq7"}


def _relation_from_record(rule, key, inputs, coeffs, params, line) -> Relation:
    base = _RULE_BASE.get(rule, rule)
    if base not in _KNOWN_RULES:
        raise MalformedRecord(line, f"unknown rule {rule!r}")
    if len(coeffs) != len(inputs) + 1:
        raise MalformedRecord(line, "coefficient count does not match inputs")
    terms = [(key, coeffs[0])] + list(zip(inputs, coeffs[1:]))
    order = {"Eq7": {1: 0, -1: 1, -2: 2}}.get(base)
    if order is not None:
        if sorted(c for _, c in terms) != [-2, -1, 1]:
            raise MalformedRecord(line, "wall relation needs coefficients 1, -1, -2")
        terms.sort(key=lambda t: order[t[1]])
    else:
        terms.sort(key=lambda t: -t[1])
    rel = Relation(base, tuple(terms), tuple(params))
    if rel.step_rule(key) not in (rule, "Remark1.5"):
        raise MalformedRecord(line, f"rule {rule!r} does not solve for this key")
    return rel
