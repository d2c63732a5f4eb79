"""Abstract work accounting.

One unit is one character comparison, one AST node visit, or one counter
update step; base-model calls charge what the builtin reports.
"""
from __future__ import annotations

CATEGORIES = ("split", "dispatch", "base", "nodes", "subst")


class CostMeter:
    __slots__ = CATEGORIES

    def __init__(self) -> None:
        self.split = 0
        self.dispatch = 0
        self.base = 0
        self.nodes = 0
        self.subst = 0

    @property
    def units(self) -> int:
        return self.split + self.dispatch + self.base + self.nodes + self.subst

    def breakdown(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in CATEGORIES}

    def snapshot(self) -> tuple[int, int, int, int, int]:
        return (self.split, self.dispatch, self.base, self.nodes, self.subst)

    def since(self, snap: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(now - then for now, then in zip(self.snapshot(), snap))

    def add(self, delta: tuple[int, ...]) -> None:
        """Replay a previously recorded charge (used on memo hits)."""
        self.split += delta[0]
        self.dispatch += delta[1]
        self.base += delta[2]
        self.nodes += delta[3]
        self.subst += delta[4]

    def __repr__(self) -> str:
        inner = " ".join(f"{k}={v}" for k, v in self.breakdown().items())
        return f"CostMeter(units={self.units} {inner})"
