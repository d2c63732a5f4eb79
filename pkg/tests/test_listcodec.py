from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gandyfix.errors import AtomOutsideAlphabet, AtomUsesReservedCharacter, NotAList
from gandyfix.listcodec import (
    SPLIT_CONSTANT, Alphabet, ListValue, decode, depth, encode, is_well_formed, left_count, lv,
    split, split_bound,
)
from gandyfix.meter import CostMeter

AB = Alphabet("ab")


# -- independent oracles -----------------------------------------------------

def parse_oracle(word: str):
    """Recursive-descent parse into nested Python data, or None."""
    pos = 0

    def value():
        nonlocal pos
        if pos < len(word) and word[pos] == "<":
            pos += 1
            items = [value()]
            while pos < len(word) and word[pos] == ",":
                pos += 1
                items.append(value())
            if pos >= len(word) or word[pos] != ">":
                raise ValueError
            pos += 1
            if any(i == "" for i in items):
                raise ValueError
            return items
        start = pos
        while pos < len(word) and word[pos] not in "<>,":
            pos += 1
        return word[start:pos]

    try:
        v = value()
    except ValueError:
        return None
    return v if pos == len(word) else None


def components_oracle(word: str):
    v = parse_oracle(word)
    if not isinstance(v, list):
        return None
    return tuple(render(i) for i in v)


def render(v) -> str:
    return v if isinstance(v, str) else "<" + ",".join(render(i) for i in v) + ">"


def nesting_oracle(word: str) -> int:
    level = best = 0
    for ch in word:
        if ch == "<":
            level += 1
            best = max(best, level)
        elif ch == ">":
            level -= 1
    return best


def list_nodes(v) -> int:
    return 0 if isinstance(v, str) else 1 + sum(list_nodes(i) for i in v)


atoms_st = st.text(alphabet="ab", min_size=1, max_size=4)
nested_st = st.recursive(atoms_st, lambda inner: st.lists(inner, min_size=1, max_size=4),
                         max_leaves=12)
lists_st = st.lists(nested_st, min_size=1, max_size=4)


# -- encode / decode ---------------------------------------------------------

@pytest.mark.parametrize("value, word", [
    (["aa", "b"], "<aa,b>"),
    ([["a"], "b"], "<<a>,b>"),
    ("aa", "aa"),
])
def test_encode_examples(value, word):
    assert encode(lv(value), AB) == word


def test_encode_rejects_reserved_atom():
    with pytest.raises(AtomUsesReservedCharacter):
        lv(["a,b"])


def test_encode_rejects_atom_outside_alphabet():
    with pytest.raises(AtomOutsideAlphabet):
        encode(lv(["abc"]), AB)


def test_empty_list_and_empty_component_rejected():
    with pytest.raises(ValueError):
        ListValue(items=())
    with pytest.raises(ValueError):
        lv(["a", ""])


def test_alphabet_invariants():
    with pytest.raises(ValueError):
        Alphabet("")
    with pytest.raises(ValueError):
        Alphabet("aa")
    with pytest.raises(AtomUsesReservedCharacter):
        Alphabet("a<")
    assert AB.reserved == "<>,"


@pytest.mark.parametrize("word, expected", [
    ("<aa,b>", ["aa", "b"]),
    ("<<aa>,bb>", [["aa"], "bb"]),
])
def test_decode_examples(word, expected):
    assert decode(word, AB) == lv(expected)


@pytest.mark.parametrize("word", ["<a,>", "<>", "<,a>", "<a", "a>", "<a>>", "<<a>", "<a,c>", "<a><b>"])
def test_decode_undefined(word):
    assert decode(word, AB) is None


@given(lists_st)
def test_round_trip_value(data):
    v = lv(data)
    assert decode(encode(v, AB), AB) == v


@given(lists_st)
def test_round_trip_word(data):
    word = render(data)
    assert encode(decode(word, AB), AB) == word


@given(st.text(alphabet="ab<>,", max_size=14))
def test_decode_matches_parser_oracle(word):
    expected = parse_oracle(word)
    got = decode(word, AB)
    if expected is None:
        assert got is None
    else:
        assert got is not None and got.encoded == word


# -- split ---------------------------------------------------------------------

@pytest.mark.parametrize("word, expected", [
    ("<aa,b>", ("aa", "b")),
    ("<<a>,b>", ("<a>", "b")),
    ("aa", None),
    ("<a,<b>", None),
    ("<a,>", None),
    ("", None),
])
def test_split_examples(word, expected):
    assert split(word) == expected


@given(st.text(alphabet="ab<>,", max_size=16))
def test_split_matches_oracle(word):
    # split only looks at the top level, so when it succeeds on a word the
    # full parser rejects, some component must be the malformed part.
    expected = components_oracle(word)
    got = split(word)
    if expected is not None:
        assert got == expected
    elif got is not None:
        assert any(parse_oracle(c) is None for c in got)


def _random_list(rng: random.Random, target: int) -> str:
    """A well-formed list encoding of length close to ``target``."""
    if target < 6 or rng.random() < 0.15:
        return "<" + "".join(rng.choice("ab") for _ in range(max(1, target - 2))) + ">"
    parts, budget = [], target - 2
    while budget > 0:
        size = rng.randint(1, max(1, budget))
        parts.append(_random_list(rng, size) if size >= 3 and rng.random() < 0.6
                     else "".join(rng.choice("ab") for _ in range(size)))
        budget -= size + 1
    return "<" + ",".join(parts) + ">"


def test_split_cost_bound_random_words():
    rng = random.Random(20241014)
    for i in range(300):
        n = rng.randint(1, 10_000)
        word = _random_list(rng, n) if i % 3 else "".join(rng.choice("ab<>,") for _ in range(n))
        meter = CostMeter()
        split(word, meter)
        assert meter.split == meter.units
        assert meter.units <= split_bound(len(word))


def test_split_bound_is_stated_form():
    for n in (1, 2, 3, 7, 8, 1000, 10_000):
        assert split_bound(n) == SPLIT_CONSTANT * n * n.bit_length()
        assert n.bit_length() == math.ceil(math.log2(n + 1))


# -- measures ------------------------------------------------------------------

@pytest.mark.parametrize("word, d", [("<aa,b>", 1), ("<<aa>,bb>", 2), ("<<<a>>>", 3)])
def test_depth_examples(word, d):
    assert depth(decode(word, AB)) == d


def test_depth_of_atom_is_error():
    with pytest.raises(NotAList):
        depth(lv("aa"))


@settings(max_examples=1000)
@given(lists_st)
def test_depth_matches_nesting_oracle(data):
    v = lv(data)
    assert depth(v) == nesting_oracle(v.encoded)


@given(lists_st)
def test_left_count_is_list_nodes(data):
    v = lv(data)
    assert left_count(encode(v)) == list_nodes(data) == v.left


@pytest.mark.parametrize("word, n", [("<aa,b>", 1), ("<<aa>,bb>", 2), ("aa", 0)])
def test_left_count_examples(word, n):
    assert left_count(word) == n


def test_is_well_formed():
    assert is_well_formed("<a,<b>>", AB)
    assert is_well_formed("ab", AB)
    assert not is_well_formed("<a,<b>", AB)
