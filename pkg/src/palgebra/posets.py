"""Finite posets over index sets, stored as bitmask reachability rows.

Elements are 0..n-1 and subsets travel as int bit masks, so every order
computation is a handful of word operations.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

from .config import DEFAULT
from .errors import CapExceeded


def bit_indices(mask: int) -> list[int]:
    """Indices of the set bits, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class Poset:
    """A finite poset; ``up[i]`` is the mask of all j with i <= j."""

    __slots__ = ("n", "up", "down", "universe", "_covers")

    def __init__(self, up: Sequence[int], cap: int | None = None):
        cap = DEFAULT.poset_cap if cap is None else cap
        n = len(up)
        if n > cap:
            raise CapExceeded("poset size", n, cap)
        self.n = n
        self.up = tuple(up)
        self.universe = (1 << n) - 1
        down = [0] * n
        for i, row in enumerate(self.up):
            if row & ~self.universe:
                raise ValueError(f"row {i} mentions elements outside 0..{n - 1}")
            if not (row >> i) & 1:
                raise ValueError(f"relation is not reflexive at {i}")
            for j in bit_indices(row):
                if j != i and (self.up[j] >> i) & 1:
                    raise ValueError(f"relation is not antisymmetric at ({i}, {j})")
                if self.up[j] & ~row:
                    raise ValueError(f"relation is not transitive at ({i}, {j})")
                down[j] |= 1 << i
        self.down = tuple(down)
        self._covers = None

    @classmethod
    def from_leq(cls, n: int, leq: Callable[[int, int], bool], cap: int | None = None) -> "Poset":
        rows = []
        for i in range(n):
            row = 0
            for j in range(n):
                if leq(i, j):
                    row |= 1 << j
            rows.append(row)
        return cls(rows, cap=cap)

    @classmethod
    def from_covers(cls, n: int, pairs: Iterable[tuple[int, int]], cap: int | None = None) -> "Poset":
        """Build from (lower, upper) edges; the reflexive-transitive closure is taken."""
        rows = [1 << i for i in range(n)]
        edges = list(pairs)
        changed = True
        while changed:
            changed = False
            for lo, hi in edges:
                merged = rows[lo] | rows[hi]
                if merged != rows[lo]:
                    rows[lo] = merged
                    changed = True
        return cls(rows, cap=cap)

    def leq(self, i: int, j: int) -> bool:
        return bool((self.up[i] >> j) & 1)

    def lt(self, i: int, j: int) -> bool:
        return i != j and self.leq(i, j)

    def covers(self) -> list[tuple[int, int]]:
        """Transitive reduction as (lower, upper) pairs, sorted."""
        if self._covers is None:
            out = []
            for i in range(self.n):
                for j in bit_indices(self.up[i] ^ (1 << i)):
                    # j covers i iff nothing sits strictly between them
                    if (self.up[i] & self.down[j]) == (1 << i) | (1 << j):
                        out.append((i, j))
            self._covers = sorted(out)
        return self._covers

    def dual(self) -> "Poset":
        return Poset(self.down, cap=self.n)

    def __eq__(self, other) -> bool:
        return isinstance(other, Poset) and self.up == other.up

    def __hash__(self) -> int:
        return hash(self.up)

    def __repr__(self) -> str:
        return f"Poset(n={self.n}, covers={self.covers()})"


def is_upset(P: Poset, S: int) -> bool:
    """True iff S is upward closed in P."""
    for i in bit_indices(S):
        if P.up[i] & ~S:
            return False
    return True


def upset_closure(P: Poset, S: int) -> int:
    out = 0
    for i in bit_indices(S):
        out |= P.up[i]
    return out


def downset_closure(P: Poset, S: int) -> int:
    out = 0
    for i in bit_indices(S):
        out |= P.down[i]
    return out


def max_elements(P: Poset, S: int) -> int:
    """Mask of elements of S with nothing of S strictly above them."""
    out = 0
    for i in bit_indices(S):
        if not (P.up[i] & S & ~(1 << i)):
            out |= 1 << i
    return out


def min_elements(P: Poset, S: int) -> int:
    out = 0
    for i in bit_indices(S):
        if not (P.down[i] & S & ~(1 << i)):
            out |= 1 << i
    return out


def enumerate_upsets(P: Poset, cap: int | None = None) -> list[int]:
    """All upsets of P as masks, sorted by (cardinality, mask value).

    Raises CapExceeded as soon as the count passes ``cap``.
    """
    cap = DEFAULT.element_cap if cap is None else cap
    # Decide membership maximal elements first: including i is legal exactly
    # when everything strictly above i is already in.
    order = sorted(range(P.n), key=lambda i: (P.up[i].bit_count(), i))
    strict_up = [P.up[i] & ~(1 << i) for i in range(P.n)]
    found: list[int] = []

    def rec(pos: int, cur: int) -> None:
        if pos == len(order):
            if len(found) >= cap:
                raise CapExceeded("upset count", len(found) + 1, cap)
            found.append(cur)
            return
        i = order[pos]
        rec(pos + 1, cur)
        if not (strict_up[i] & ~cur):
            rec(pos + 1, cur | (1 << i))

    rec(0, 0)
    found.sort(key=lambda m: (m.bit_count(), m))
    return found


def is_pp_morphism(P: Poset, Q: Poset, f: Sequence[int]) -> bool:
    """Order-preserving f with f(max up(x)) = max up(f(x)) for every x."""
    if len(f) != P.n or any(not (0 <= v < Q.n) for v in f):
        return False
    for i in range(P.n):
        for j in bit_indices(P.up[i]):
            if not Q.leq(f[i], f[j]):
                return False
    for i in range(P.n):
        image = 0
        for m in bit_indices(max_elements(P, P.up[i])):
            image |= 1 << f[m]
        if image != max_elements(Q, Q.up[f[i]]):
            return False
    return True


def _refined_colors(P: Poset) -> list[int]:
    """Stable vertex colors: degree profile refined along the cover relation."""
    cov_up = [[] for _ in range(P.n)]
    cov_down = [[] for _ in range(P.n)]
    for lo, hi in P.covers():
        cov_up[lo].append(hi)
        cov_down[hi].append(lo)
    colors = [
        (P.up[i].bit_count(), P.down[i].bit_count(), len(cov_up[i]), len(cov_down[i]))
        for i in range(P.n)
    ]
    ids = _canonical_ids(colors)
    for _ in range(P.n):
        keys = [
            (ids[i], tuple(sorted(ids[j] for j in cov_up[i])), tuple(sorted(ids[j] for j in cov_down[i])))
            for i in range(P.n)
        ]
        new_ids = _canonical_ids(keys)
        if new_ids == ids:
            break
        ids = new_ids
    return ids


def _canonical_ids(keys: list) -> list[int]:
    rank = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [rank[k] for k in keys]


def poset_isomorphic(P: Poset, Q: Poset) -> tuple[int, ...] | None:
    """An order isomorphism P -> Q as an index tuple, or None.

    Deterministic: vertices are matched in a canonical order derived from the
    refined color profile, and candidates are tried by ascending index.
    """
    if P.n != Q.n:
        return None
    cp, cq = _refined_colors(P), _refined_colors(Q)
    if sorted(cp) != sorted(cq):
        return None
    freq: dict[int, int] = {}
    for c in cp:
        freq[c] = freq.get(c, 0) + 1
    order = sorted(range(P.n), key=lambda i: (freq[cp[i]], cp[i], i))
    by_color: dict[int, list[int]] = {}
    for j in range(Q.n):
        by_color.setdefault(cq[j], []).append(j)

    mapping = [-1] * P.n
    used = [False] * Q.n

    def rec(pos: int) -> bool:
        if pos == P.n:
            return True
        i = order[pos]
        for j in by_color.get(cp[i], ()):
            if used[j]:
                continue
            ok = True
            for i0 in order[:pos]:
                j0 = mapping[i0]
                if P.leq(i, i0) != Q.leq(j, j0) or P.leq(i0, i) != Q.leq(j0, j):
                    ok = False
                    break
            if ok:
                mapping[i] = j
                used[j] = True
                if rec(pos + 1):
                    return True
                mapping[i] = -1
                used[j] = False
        return False

    return tuple(mapping) if rec(0) else None


def export_dot(P: Poset, labels: Sequence[str] | None = None, name: str = "poset") -> str:
    """DOT text with nodes in index order and cover edges lower -> upper."""
    if labels is None:
        labels = [str(i) for i in range(P.n)]
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i in range(P.n):
        text = str(labels[i]).replace('"', '\\"')
        lines.append(f'  {i} [label="{text}"];')
    for lo, hi in P.covers():
        lines.append(f"  {lo} -> {hi};")
    lines.append("}")
    return "\n".join(lines) + "\n"
