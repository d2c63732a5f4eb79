"""Hereditarily finite lists over a base alphabet and their bracket encoding.

A list ``<w1,...,wn>`` is written with the three reserved characters
``<``, ``>`` and ``,``; atoms are words over the base alphabet.  The
encoding is canonical, so two values are equal exactly when their
encodings are.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import AtomOutsideAlphabet, AtomUsesReservedCharacter, NotAList
from .meter import CostMeter

RESERVED = "<>,"

# split() charges at most SPLIT_CONSTANT * |w| * ceil(log2(|w| + 1)) units.
SPLIT_CONSTANT = 3


@dataclass(frozen=True)
class Alphabet:
    symbols: str

    def __post_init__(self) -> None:
        if not self.symbols:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"alphabet {self.symbols!r} has duplicate symbols")
        bad = set(self.symbols) & set(RESERVED)
        if bad:
            raise AtomUsesReservedCharacter(
                f"alphabet uses reserved character(s) {''.join(sorted(bad))!r}")

    @property
    def reserved(self) -> str:
        return RESERVED

    def __contains__(self, ch: str) -> bool:
        return ch in self.symbols

    def is_word(self, word: str) -> bool:
        return all(ch in self.symbols for ch in word)


@dataclass(frozen=True, eq=False, slots=True)
class ListValue:
    """Either an atom (``items is None``) or a non-empty sequence of values."""

    atom: str | None = None
    items: tuple[ListValue, ...] | None = None
    encoded: str = field(init=False, repr=False)
    depth: int = field(init=False, repr=False)
    left: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if (self.atom is None) == (self.items is None):
            raise ValueError("ListValue is exactly one of atom or items")
        if self.atom is not None:
            for ch in self.atom:
                if ch in RESERVED:
                    raise AtomUsesReservedCharacter(
                        f"atom {self.atom!r} contains reserved character {ch!r}")
            encoded, depth, left = self.atom, 0, 0
        else:
            items = tuple(self.items)
            if not items:
                raise ValueError("empty list <> is not a hereditarily finite list")
            for item in items:
                if item.atom == "":
                    raise ValueError("the empty atom cannot be a list component")
            object.__setattr__(self, "items", items)
            encoded = "<" + ",".join(item.encoded for item in items) + ">"
            depth = 1 + max(item.depth for item in items)
            left = 1 + sum(item.left for item in items)
        object.__setattr__(self, "encoded", encoded)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "left", left)

    @property
    def is_atom(self) -> bool:
        return self.items is None

    @property
    def length(self) -> int:
        return len(self.encoded)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ListValue):
            return NotImplemented
        return self.encoded == other.encoded

    def __hash__(self) -> int:
        return hash(self.encoded)

    def __str__(self) -> str:
        return self.encoded


Nested = Union[str, ListValue, Iterable["Nested"]]


def lv(value: Nested) -> ListValue:
    """Build a value from nested Python data: ``lv([["a"], "b"])`` is ``<<a>,b>``."""
    if isinstance(value, ListValue):
        return value
    if isinstance(value, str):
        return ListValue(atom=value)
    return ListValue(items=tuple(lv(v) for v in value))


def encode(value: ListValue, alphabet: Alphabet | None = None) -> str:
    if alphabet is not None:
        _check_atoms(value, alphabet)
    return value.encoded


def _check_atoms(value: ListValue, alphabet: Alphabet) -> None:
    if value.items is None:
        for ch in value.atom:
            if ch not in alphabet.symbols:
                raise AtomOutsideAlphabet(
                    f"atom {value.atom!r} uses {ch!r}, not in {alphabet.symbols!r}")
        return
    for item in value.items:
        _check_atoms(item, alphabet)


def split(word: str, meter: CostMeter | None = None) -> tuple[str, ...] | None:
    """Top-level components of ``<w1,...,wn>``, or None when undefined.

    Scans once with two counters: ``count1`` is the length of the current
    component and ``count2`` the bracket depth.  Each character read costs one
    unit and each counter update costs ceil(log2(value + 1)) units.
    """
    n = len(word)
    if n < 2:
        if meter is not None:
            meter.split += n
        return None
    units = 2
    if word[0] != "<" or word[-1] != ">":
        if meter is not None:
            meter.split += units
        return None
    parts = []
    count1 = 0
    count2 = 0
    start = 1
    ok = True
    for i in range(1, n - 1):
        ch = word[i]
        units += 1
        if ch == "," and count2 == 0:
            if count1 == 0:
                ok = False
                break
            parts.append(word[start:i])
            start = i + 1
            count1 = 0
            continue
        if ch == "<":
            count2 += 1
            units += count2.bit_length()
        elif ch == ">":
            if count2 == 0:
                ok = False
                break
            units += count2.bit_length()
            count2 -= 1
        count1 += 1
        units += count1.bit_length()
    if meter is not None:
        meter.split += units
    if not ok or count2 != 0 or count1 == 0:
        return None
    parts.append(word[start:n - 1])
    return tuple(parts)


def split_bound(length: int) -> int:
    return SPLIT_CONSTANT * length * length.bit_length()


def decode(word: str, alphabet: Alphabet) -> ListValue | None:
    """Parse a full encoding; None for anything that is not a well-formed value."""
    if not word.startswith("<"):
        return ListValue(atom=word) if alphabet.is_word(word) else None
    parts = split(word)
    if parts is None:
        return None
    items = []
    for part in parts:
        item = decode(part, alphabet)
        if item is None:
            return None
        items.append(item)
    return ListValue(items=tuple(items))


def is_well_formed(word: str, alphabet: Alphabet) -> bool:
    return decode(word, alphabet) is not None


def depth(value: ListValue) -> int:
    if value.items is None:
        raise NotAList(f"{value.encoded!r} is an atom, not a list")
    return value.depth


def left_count(word: str) -> int:
    return word.count("<")
