"""Planar rooted trees whose internal vertices have at least two children."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

LEAF = None


@dataclass(frozen=True)
class PlanarTree:
    """A vertex with an ordered tuple of children; ``LEAF`` marks a leaf.

    Every child that is itself a tree hangs off an internal edge, which is
    where the homotopy is inserted when the tree is evaluated.
    """

    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("internal vertices need at least two children")
        for c in self.children:
            if c is not LEAF and not isinstance(c, PlanarTree):
                raise TypeError(f"bad child {c!r}")

    @property
    def arity(self) -> int:
        return len(self.children)

    @property
    def leaves(self) -> int:
        return sum(1 if c is LEAF else c.leaves for c in self.children)

    @property
    def internal_edges(self) -> int:
        return sum(0 if c is LEAF else 1 + c.internal_edges for c in self.children)

    def vertex_arities(self) -> list:
        out = [self.arity]
        for c in self.children:
            if c is not LEAF:
                out.extend(c.vertex_arities())
        return out

    def degree(self) -> int:
        """Degree of the evaluated operator: ``k - 2`` per ``k``-vertex and
        ``+1`` per internal edge."""
        return sum(k - 2 for k in self.vertex_arities()) + self.internal_edges

    def __str__(self):
        parts = ["id" if c is LEAF else f"h{c}" for c in self.children]
        return f"μ{self.arity}(" + "⊗".join(parts) + ")"


def corolla(n: int) -> PlanarTree:
    return PlanarTree((LEAF,) * n)


def compositions(n: int, k: int):
    """Compositions of ``n`` into ``k`` positive parts, lexicographic."""
    for cuts in combinations(range(1, n), k - 1):
        bounds = (0,) + cuts + (n,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(k))


@lru_cache(maxsize=None)
def _trees(n: int) -> tuple:
    if n == 1:
        return (LEAF,)
    out = []
    for k in range(2, n + 1):
        for parts in compositions(n, k):
            for kids in product(*(_trees(p) for p in parts)):
                out.append(PlanarTree(tuple(kids)))
    return tuple(out)


def enumerate_trees(n: int) -> list:
    """All trees with ``n`` leaves, by root arity, then by the composition of
    leaves among the children, then recursively."""
    if n < 2:
        raise ValueError("trees have at least two leaves")
    return list(_trees(n))


def count_trees(n: int) -> int:
    """Independent count: ``t(1) = 1`` and ``t(n) = Σ_{k≥2} c_k(n)`` where
    ``c_k(n)`` counts ordered ``k``-forests with ``n`` leaves, computed by
    dynamic programming rather than by listing compositions."""
    t = [0, 1] + [0] * (n - 1)
    for size in range(2, n + 1):
        # forest[k][m]: ordered forests of k trees/leaves with m leaves total
        forest = [[0] * (size + 1) for _ in range(size + 1)]
        forest[0][0] = 1
        for k in range(1, size + 1):
            for m in range(k, size + 1):
                forest[k][m] = sum(forest[k - 1][m - j] * t[j] for j in range(1, m - k + 2))
        t[size] = sum(forest[k][size] for k in range(2, size + 1))
    return t[n]


def parse_tree(text: str) -> PlanarTree:
    """Parse the bracket notation used by ``str``: ``μ3(id⊗hμ2(id⊗id)⊗id)``.
    ``m`` may replace ``μ`` and ``*`` may replace ``⊗``."""
    s = text.replace("μ", "m").replace("⊗", "*").replace(" ", "")
    pos = 0

    def node():
        nonlocal pos
        if not s.startswith("m", pos):
            raise ValueError(f"expected vertex at {pos} in {text!r}")
        pos += 1
        j = pos
        while pos < len(s) and s[pos].isdigit():
            pos += 1
        k = int(s[j:pos])
        if s[pos] != "(":
            raise ValueError(f"expected '(' at {pos} in {text!r}")
        pos += 1
        kids = []
        while True:
            if s.startswith("id", pos):
                kids.append(LEAF)
                pos += 2
            elif s.startswith("h", pos):
                pos += 1
                kids.append(node())
            else:
                raise ValueError(f"expected child at {pos} in {text!r}")
            if s[pos] == "*":
                pos += 1
                continue
            if s[pos] == ")":
                pos += 1
                break
            raise ValueError(f"unexpected {s[pos]!r} at {pos} in {text!r}")
        if len(kids) != k:
            raise ValueError(f"vertex μ{k} has {len(kids)} children")
        return PlanarTree(tuple(kids))

    try:
        tree = node()
    except IndexError:
        raise ValueError(f"unexpected end of input in {text!r}") from None
    if pos != len(s):
        raise ValueError(f"trailing input in {text!r}")
    return tree


# The seven-leaf tree μ3(hμ2(id⊗hμ2)⊗id⊗hμ3), read as
# μ3( h μ2(id ⊗ h μ2(id,id)) ⊗ id ⊗ h μ3(id,id,id) ).
SEVEN_LEAF_EXAMPLE = PlanarTree((
    PlanarTree((LEAF, PlanarTree((LEAF, LEAF)))),
    LEAF,
    PlanarTree((LEAF, LEAF, LEAF)),
))
