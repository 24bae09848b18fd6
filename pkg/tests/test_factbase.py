import random

import pytest

from welschinger.errors import InvalidKey, MalformedRecord
from welschinger.factbase import (Bounds, Contradiction, Derived, FactBase, Seed, closure,
                                  record_line, replay)
from welschinger.lattice import HClass, MINIMAL_DEL_PEZZO_2, PROJECTIVE_PLANE, Surface, pullback
from welschinger.presets import CUBIC_ROW, block_a_key, cubic_key, load_preset
from welschinger.relations import InvariantKey, theta

CP2 = Surface(PROJECTIVE_PLANE)
X1 = Surface(MINIMAL_DEL_PEZZO_2)
CITE = "test seed"


def cubic_store():
    store = FactBase()
    for s, v in enumerate(CUBIC_ROW):
        store.insert_seed(cubic_key(s), v, CITE)
    return store


def x1_keys():
    k = InvariantKey(X1, HClass.anticanonical(X1, 2), 0)
    return k, theta(k), k.at(1)


def test_insert_seed():
    store = FactBase()
    store.insert_seed(cubic_key(0), 8, CITE)
    store.insert_seed(cubic_key(0), 8, CITE)
    assert len(store) == 1
    with pytest.raises(Contradiction) as exc:
        store.insert_seed(cubic_key(0), 9, CITE)
    assert exc.value.first == 8 and exc.value.second == 9
    with pytest.raises(InvalidKey):
        store.insert_seed("CP2 3H", 8, CITE)
    k, _, _ = x1_keys()
    store.insert_seed(k, 0, CITE)
    assert store.value(k) == 0


def test_closure_empty_and_cubic_block():
    assert FactBase().derive_closure() == 0
    store = cubic_store()
    assert store.derive_closure() > 0
    for row in range(4):
        for pairs in range(5):
            key = block_a_key(row, pairs)
            if key is not None:
                assert store.value(key) == 8 - 2 * (row + pairs)


def test_closure_x1_wall():
    k, th, k1 = x1_keys()
    store = FactBase()
    store.insert_seed(k, 0, CITE)
    store.insert_seed(th, 18, CITE)
    store.derive_closure()
    assert store.value(k1) == -36
    value, tree = store.query(k1)
    assert tree.rule == "Eq7-down" and {leaf.value for leaf in tree.leaves()} == {0, 18}


def test_query(table1_store):
    pulled = Surface(PROJECTIVE_PLANE, 0, 1)
    key = InvariantKey(pulled, pullback(HClass(CP2, (3,)), pulled), 1)
    value, tree = table1_store.query(key)
    assert value == 6 and tree.rule == "Eq3"
    seed = table1_store.query(cubic_key(2))
    assert seed[0] == 4 and seed[1].children == () and seed[1].rule.startswith("seed")
    unknown = InvariantKey(CP2, HClass(CP2, (5,)), 0)
    assert table1_store.query(unknown) is None
    assert table1_store.value(unknown) is None
    assert table1_store.tree(unknown).value is None


def test_tree_leaves_are_seeds(table1_store):
    for key, fact in table1_store.facts.items():
        for leaf in table1_store.tree(key).leaves():
            assert isinstance(table1_store.facts[leaf.key].provenance, Seed)


def test_consistency_ok_and_injected_conflict(table1_store):
    assert table1_store.check_consistency() is None
    store = cubic_store()
    store.insert_seed(block_a_key(1, 1), 5, "injected")
    with pytest.raises(Contradiction) as exc:
        store.derive_closure()
    assert {exc.value.first, exc.value.second} == {4, 5}
    assert exc.value.first_tree is not None and exc.value.second_tree is not None
    assert store.check_consistency() is not None


def test_conflict_against_stored_derived_fact():
    store = cubic_store()
    store.derive_closure()
    key = block_a_key(1, 1)
    store.facts[key] = store.facts[key].__class__(key, 5, store.facts[key].provenance)
    problem = store.check_consistency()
    assert problem is not None and problem.key == key


def test_odd_wall_difference_is_a_parity_contradiction():
    store = FactBase()
    store.insert_seed(cubic_key(0), 8, CITE)
    store.insert_seed(cubic_key(1), 5, CITE)
    with pytest.raises(Contradiction) as exc:
        store.derive_closure()
    assert "odd" in exc.value.reason
    assert store.check_consistency() is not None


def test_parity_checked_outside_bounds():
    store = FactBase()
    store.insert_seed(cubic_key(0), 8, CITE)
    store.insert_seed(cubic_key(1), 5, CITE)
    assert store.check_consistency(Bounds(0, 4)) is not None


def test_derive_is_atomic_on_contradiction():
    store = cubic_store()
    store.insert_seed(block_a_key(1, 1), 5, "injected")
    before = dict(store.facts)
    with pytest.raises(Contradiction):
        store.derive_closure()
    assert store.facts == before


def test_replay_every_fact(table1_store):
    for key in table1_store.facts:
        assert replay(table1_store.facts, key) == table1_store.value(key)


def test_replay_rejects_forged_step(table1_store):
    facts = dict(table1_store.facts)
    key = next(k for k, f in facts.items() if isinstance(f.provenance, Derived)
               and f.provenance.rule == "Eq3")
    fact = facts[key]
    rel = fact.provenance.relation
    forged = rel.__class__("Eq1", rel.terms, rel.params)
    facts[key] = fact.__class__(key, fact.value, Derived(forged, key))
    with pytest.raises(ValueError):
        replay(facts, key)


def test_closure_bounds():
    store = cubic_store()
    store.derive_closure(Bounds(max_blowups=1, max_degree=3))
    assert all(k.surface.blowups <= 1 for k in store.facts)
    assert store.value(block_a_key(0, 2)) is None


def test_shuffled_closure_is_deterministic():
    ref = cubic_store()
    ref.derive_closure()
    for seed in range(5):
        store = cubic_store()
        store.derive_closure(rng=random.Random(seed))
        assert store.fingerprint() == ref.fingerprint()


def test_monotonic_under_consistent_seed():
    store = cubic_store()
    store.derive_closure()
    keys = set(store.facts)
    store.insert_seed(InvariantKey(CP2, HClass(CP2, (1,)), 0), 1, CITE)
    store.derive_closure()
    assert keys <= set(store.facts)


def test_export_import_round_trip(tmp_path):
    store = load_preset("all")
    store.derive_closure(Bounds(2, 4))
    path = tmp_path / "facts.jsonl"
    store.export(path)
    back = FactBase.load(path)
    assert back.fingerprint() == store.fingerprint()
    assert {k: (f.value, type(f.provenance)) for k, f in back.facts.items()} == \
           {k: (f.value, type(f.provenance)) for k, f in store.facts.items()}
    text = path.read_text()
    assert '"value":"240"' in text and '"value":"-36"' in text
    assert back.check_consistency() is None
    path.write_text(text)
    assert path.read_text().splitlines() == [record_line(back.facts[k]) for k in sorted(back.facts)]


def test_spec_record_layout_without_digest():
    line = ('{"surface":{"base":"CP2","r":0,"s":0}, "class":{"H":3,"E":[],"pairs":[]}, '
            '"s":0, "value":"8", "prov":{"seed":"' + CITE + '"}}')
    store = FactBase.from_lines([line])
    assert store.value(cubic_key(0)) == 8


@pytest.mark.parametrize("line, reason", [
    ("not json", "invalid JSON"),
    ('{"surface":{"base":"CP2","r":0,"s":0},"class":{"H":3,"E":[],"pairs":[]},"s":0,'
     '"value":"08","prov":{"seed":"x"}}', "canonical decimal"),
    ('{"surface":{"base":"CP2","r":0,"s":0},"class":{"H":3,"E":[],"pairs":[]},"s":9,'
     '"value":"8","prov":{"seed":"x"}}', "r = c1.d"),
    ('{"surface":{"base":"CP2","r":0,"s":0},"class":{"H":3,"E":[0],"pairs":[]},"s":0,'
     '"value":"8","prov":{"seed":"x"}}', "real exceptional"),
    ('{"surface":{"base":"CP2","r":0,"s":0},"class":{"H":3,"E":[],"pairs":[]},"s":0,'
     '"value":"8","prov":{"seed":"x"},"extra":1}', "unknown record field"),
    ('{"surface":{"base":"CP2","r":0,"s":0},"class":{"H":3,"E":[],"pairs":[]},"s":0,'
     '"value":"8","prov":{"seed":"x"},"digest":"0000000000000000"}', "digest"),
])
def test_malformed_records_report_line(line, reason):
    with pytest.raises(MalformedRecord) as exc:
        FactBase.from_lines(["", line])
    assert str(exc.value).startswith("line 2:") and reason in str(exc.value)


def test_duplicate_and_conflicting_records():
    line = record_line(cubic_store().facts[cubic_key(0)])
    with pytest.raises(MalformedRecord) as exc:
        FactBase.from_lines([line, line])
    assert "line 2" in str(exc.value)
    other = FactBase()
    other.insert_seed(cubic_key(0), 9, CITE)
    with pytest.raises(Contradiction):
        FactBase.from_lines([line, record_line(other.facts[cubic_key(0)])])


def test_non_utf8_file(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_bytes(b'{"a":1}\n\xff\n')
    with pytest.raises(MalformedRecord) as exc:
        FactBase.load(path)
    assert "line 2" in str(exc.value)


def test_closure_function_direct():
    store = cubic_store()
    facts = closure(store.seeds, Bounds(1, 3))
    assert facts[theta(cubic_key(0))].value == 1
