"""Finite distributive p-algebras in two carriers.

UpsetAlgebra holds the upsets of a base poset (meet/join are mask and/or,
the pseudocomplement is the complement of a down-closure); TableAlgebra holds
explicit operation tables.  Most functions accept either carrier.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence, Union

from .config import DEFAULT
from .errors import CapExceeded, MalformedTables, NotACongruence
from .posets import Poset, bit_indices, downset_closure, enumerate_upsets, poset_isomorphic


@dataclass(frozen=True)
class Violation:
    """One failed law plus a witnessing tuple of element indices."""
    law: str
    witness: tuple


class TableAlgebra:
    """A p-algebra given by meet/join/star tables over indices 0..size-1."""

    __slots__ = ("size", "meet_table", "join_table", "star_table", "zero", "one", "labels")

    def __init__(self, meet, join, star, zero, one, labels=None):
        n = len(star)
        if len(meet) != n or len(join) != n:
            raise MalformedTables("meet/join/star tables disagree on size")
        for name, table in (("meet", meet), ("join", join)):
            for row in table:
                if len(row) != n or any(not (0 <= v < n) for v in row):
                    raise MalformedTables(f"{name} table has a bad row")
        if any(not (0 <= v < n) for v in star):
            raise MalformedTables("star table out of range")
        if not (0 <= zero < n and 0 <= one < n):
            raise MalformedTables("zero/one out of range")
        self.size = n
        self.meet_table = tuple(tuple(row) for row in meet)
        self.join_table = tuple(tuple(row) for row in join)
        self.star_table = tuple(star)
        self.zero = zero
        self.one = one
        self.labels = tuple(labels) if labels is not None else None

    def meet(self, i: int, j: int) -> int:
        return self.meet_table[i][j]

    def join(self, i: int, j: int) -> int:
        return self.join_table[i][j]

    def star(self, i: int) -> int:
        return self.star_table[i]

    def leq(self, i: int, j: int) -> bool:
        return self.meet_table[i][j] == i

    def __repr__(self) -> str:
        return f"TableAlgebra(size={self.size})"


class UpsetAlgebra:
    """The p-algebra of all upsets of a base poset."""

    __slots__ = ("base", "elements", "index", "size", "zero", "one", "labels", "_star")

    def __init__(self, base: Poset, cap: int | None = None, labels: Sequence[str] | None = None):
        self.base = base
        self.elements = tuple(enumerate_upsets(base, cap=cap))
        self.index = {m: i for i, m in enumerate(self.elements)}
        self.size = len(self.elements)
        self.zero = self.index[0]
        self.one = self.index[base.universe]
        self.labels = tuple(labels) if labels is not None else None
        self._star: list[int | None] = [None] * self.size

    def mask(self, i: int) -> int:
        return self.elements[i]

    def meet(self, i: int, j: int) -> int:
        return self.index[self.elements[i] & self.elements[j]]

    def join(self, i: int, j: int) -> int:
        return self.index[self.elements[i] | self.elements[j]]

    def star_mask(self, m: int) -> int:
        return self.base.universe & ~downset_closure(self.base, m)

    def star(self, i: int) -> int:
        cached = self._star[i]
        if cached is None:
            cached = self.index[self.star_mask(self.elements[i])]
            self._star[i] = cached
        return cached

    def leq(self, i: int, j: int) -> bool:
        return not (self.elements[i] & ~self.elements[j])

    def __repr__(self) -> str:
        return f"UpsetAlgebra(base={self.base.n}, size={self.size})"


PAlgebra = Union[TableAlgebra, UpsetAlgebra]


# ---------------------------------------------------------------- validation

def validate(A: PAlgebra) -> list[Violation]:
    """All failed bounded-distributive-p-algebra laws, one witness each."""
    out: list[Violation] = []
    rng = range(A.size)
    meet, join, star = A.meet, A.join, A.star
    zero, one = A.zero, A.one

    def first(law, gen):
        for w in gen:
            out.append(Violation(law, w))
            return

    first("meet-idempotent", ((a,) for a in rng if meet(a, a) != a))
    first("join-idempotent", ((a,) for a in rng if join(a, a) != a))
    first("meet-commutative", ((a, b) for a in rng for b in rng if meet(a, b) != meet(b, a)))
    first("join-commutative", ((a, b) for a in rng for b in rng if join(a, b) != join(b, a)))
    first("absorption-meet", ((a, b) for a in rng for b in rng if meet(a, join(a, b)) != a))
    first("absorption-join", ((a, b) for a in rng for b in rng if join(a, meet(a, b)) != a))
    first("meet-associative", ((a, b, c) for a in rng for b in rng for c in rng
                               if meet(meet(a, b), c) != meet(a, meet(b, c))))
    first("join-associative", ((a, b, c) for a in rng for b in rng for c in rng
                               if join(join(a, b), c) != join(a, join(b, c))))
    first("distributive", ((a, b, c) for a in rng for b in rng for c in rng
                           if meet(a, join(b, c)) != join(meet(a, b), meet(a, c))))
    first("zero-meet", ((a,) for a in rng if meet(zero, a) != zero))
    first("zero-join", ((a,) for a in rng if join(zero, a) != a))
    first("one-meet", ((a,) for a in rng if meet(one, a) != a))
    first("one-join", ((a,) for a in rng if join(one, a) != one))
    if star(one) != zero:
        out.append(Violation("star-one", (one,)))
    if star(zero) != one:
        out.append(Violation("star-zero", (zero,)))
    first("star-meet", ((a, b) for a in rng for b in rng
                        if meet(a, star(meet(a, b))) != meet(a, star(b))))
    first("pseudocomplement", ((a, b) for a in rng for b in rng
                               if (meet(a, b) == zero) != A.leq(a, star(b))))
    return out


def compatibility_witness(A: PAlgebra, rep: Sequence[int]):
    """None if the partition is operation-compatible, else a witness tuple."""
    rng = range(A.size)
    for i in rng:
        r = rep[i]
        if r == i:
            continue
        if rep[A.star(i)] != rep[A.star(r)]:
            return ("star", i, r)
        for c in rng:
            if rep[A.meet(i, c)] != rep[A.meet(r, c)]:
                return ("meet", i, r, c)
            if rep[A.join(i, c)] != rep[A.join(r, c)]:
                return ("join", i, r, c)
    return None


# ------------------------------------------------------------- constructions

def build_si(n: int, cap: int | None = None) -> TableAlgebra:
    """The subdirectly irreducible member with n atoms: a 2^n-element Boolean
    algebra with a new top glued above its unit e.  Indices 0..2^n-1 are the
    Boolean masks, index 2^n is the new top."""
    if n < 0:
        raise ValueError("n must be >= 0")
    cap = DEFAULT.element_cap if cap is None else cap
    size = (1 << n) + 1
    if size > cap:
        raise CapExceeded("algebra size", size, cap)
    top = size - 1
    e = top - 1
    meet = [[0] * size for _ in range(size)]
    join = [[0] * size for _ in range(size)]
    for a in range(size):
        for b in range(size):
            if a == top:
                meet[a][b], join[a][b] = b, top
            elif b == top:
                meet[a][b], join[a][b] = a, top
            else:
                meet[a][b], join[a][b] = a & b, a | b
    star = [0] * size
    star[0] = top
    star[top] = 0
    for a in range(1, top):
        star[a] = e ^ a if n > 0 else 0
    return TableAlgebra(meet, join, star, 0, top)


def si_cond_check(B: TableAlgebra) -> list[tuple[int, int]]:
    """Witnesses against: a & b* = 0  iff  a <= b or (a = 1 and b = e).

    Empty list means the characterization holds (expected for n >= 1).
    """
    top = B.one
    e = top - 1
    bad = []
    for a in range(B.size):
        for b in range(B.size):
            lhs = B.meet(a, B.star(b)) == B.zero
            rhs = B.leq(a, b) or (a == top and b == e)
            if lhs != rhs:
                bad.append((a, b))
    return bad


def build_chain(m: int) -> TableAlgebra:
    """The m-element chain with 0* = 1 and x* = 0 elsewhere (m >= 2)."""
    if m < 2:
        raise ValueError("chains need at least two elements")
    meet = [[min(a, b) for b in range(m)] for a in range(m)]
    join = [[max(a, b) for b in range(m)] for a in range(m)]
    star = [0] * m
    star[0] = m - 1
    return TableAlgebra(meet, join, star, 0, m - 1)


def product(A: PAlgebra, B: PAlgebra, cap: int | None = None) -> PAlgebra:
    """Direct product; upset carriers combine as a disjoint union of bases."""
    cap = DEFAULT.element_cap if cap is None else cap
    if isinstance(A, UpsetAlgebra) and isinstance(B, UpsetAlgebra):
        na = A.base.n
        rows = list(A.base.up) + [row << na for row in B.base.up]
        labels = None
        if A.labels is not None and B.labels is not None:
            labels = A.labels + B.labels
        return UpsetAlgebra(Poset(rows), cap=cap, labels=labels)
    Ta, Tb = to_table(A, cap=cap), to_table(B, cap=cap)
    size = Ta.size * Tb.size
    if size > cap:
        raise CapExceeded("product size", size, cap)

    def pair(i, j):
        return i * Tb.size + j

    meet = [[0] * size for _ in range(size)]
    join = [[0] * size for _ in range(size)]
    star = [0] * size
    for i in range(Ta.size):
        for j in range(Tb.size):
            p = pair(i, j)
            star[p] = pair(Ta.star(i), Tb.star(j))
            for x in range(Ta.size):
                for y in range(Tb.size):
                    q = pair(x, y)
                    meet[p][q] = pair(Ta.meet(i, x), Tb.meet(j, y))
                    join[p][q] = pair(Ta.join(i, x), Tb.join(j, y))
    return TableAlgebra(meet, join, star, pair(Ta.zero, Tb.zero), pair(Ta.one, Tb.one))


def product_many(algebras: Sequence[PAlgebra], cap: int | None = None) -> PAlgebra:
    out = algebras[0]
    for nxt in algebras[1:]:
        out = product(out, nxt, cap=cap)
    return out


@dataclass(frozen=True)
class Quotient:
    """A quotient algebra; class i has least member reps[i], proj maps down."""
    algebra: TableAlgebra
    proj: tuple[int, ...]
    reps: tuple[int, ...]


def quotient(A: PAlgebra, theta, check: bool = True) -> Quotient:
    """Quotient by a congruence (a Congruence or a raw class-label array)."""
    rep = list(theta.rep) if hasattr(theta, "rep") else _normalize_partition(theta)
    if len(rep) != A.size:
        raise NotACongruence("partition size does not match the algebra")
    if check:
        witness = compatibility_witness(A, rep)
        if witness is not None:
            raise NotACongruence(f"incompatible partition, witness {witness}")
    reps = sorted(set(rep))
    pos = {r: i for i, r in enumerate(reps)}
    proj = tuple(pos[r] for r in rep)
    q = len(reps)
    meet = [[proj[A.meet(reps[i], reps[j])] for j in range(q)] for i in range(q)]
    join = [[proj[A.join(reps[i], reps[j])] for j in range(q)] for i in range(q)]
    star = [proj[A.star(reps[i])] for i in range(q)]
    alg = TableAlgebra(meet, join, star, proj[A.zero], proj[A.one],
                       labels=[str(r) for r in reps])
    return Quotient(alg, proj, tuple(reps))


def _normalize_partition(labels: Sequence[int]) -> list[int]:
    least: dict[int, int] = {}
    for i, lab in enumerate(labels):
        least.setdefault(lab, i)
    return [least[lab] for lab in labels]


# ------------------------------------------------------ structural inventory

def _above_rows(A: PAlgebra) -> list[int]:
    """above[i] = mask over element indices j with i <= j."""
    if isinstance(A, UpsetAlgebra):
        masks = A.elements
        return [sum(1 << j for j in range(A.size) if not (masks[i] & ~masks[j]))
                for i in range(A.size)]
    return [sum(1 << j for j in range(A.size) if A.leq(i, j)) for i in range(A.size)]


def join_irreducibles(A: PAlgebra) -> list[int]:
    """Elements with exactly one lower cover."""
    above = _above_rows(A)
    below = [0] * A.size
    for i in range(A.size):
        for j in bit_indices(above[i] & ~(1 << i)):
            below[j] |= 1 << i
    out = []
    for a in range(A.size):
        covers = 0
        for b in bit_indices(below[a]):
            if not (above[b] & below[a] & ~(1 << b)):
                covers += 1
                if covers > 1:
                    break
        if covers == 1:
            out.append(a)
    return out


def atoms(A: PAlgebra) -> list[int]:
    return [a for a in range(A.size)
            if a != A.zero
            and all(b in (a, A.zero) for b in range(A.size) if A.leq(b, a))]


def dense_elements(A: PAlgebra) -> list[int]:
    return [a for a in range(A.size) if A.star(a) == A.zero]


def regular_elements(A: PAlgebra) -> list[int]:
    return [a for a in range(A.size) if A.star(A.star(a)) == a]


def glivenko(A: PAlgebra):
    """The congruence a ~ b iff a** = b**, and the skeleton on the regular
    elements with x join-regular y := (x v y)**; the pair (Congruence, TableAlgebra)."""
    from .congruences import Congruence

    least: dict[int, int] = {}
    key = [A.star(A.star(a)) for a in range(A.size)]
    for i, v in enumerate(key):
        least.setdefault(v, i)
    theta = Congruence([least[v] for v in key])
    regs = regular_elements(A)
    pos = {r: i for i, r in enumerate(regs)}
    meet = [[pos[A.meet(a, b)] for b in regs] for a in regs]
    join = [[pos[A.star(A.star(A.join(a, b)))] for b in regs] for a in regs]
    star = [pos[A.star(a)] for a in regs]
    skeleton = TableAlgebra(meet, join, star, pos[A.zero], pos[A.one],
                            labels=[str(r) for r in regs])
    return theta, skeleton


def is_isomorphic(A: PAlgebra, B: PAlgebra):
    """An operation-preserving bijection A -> B as an index tuple, or None.

    Matches the join-irreducible skeleton posets first, then verifies every
    operation of the induced map.
    """
    if A.size != B.size:
        return None
    ja, jb = join_irreducibles(A), join_irreducibles(B)
    if len(ja) != len(jb):
        return None
    Pa = Poset.from_leq(len(ja), lambda p, q: A.leq(ja[p], ja[q]), cap=len(ja))
    Pb = Poset.from_leq(len(jb), lambda p, q: B.leq(jb[p], jb[q]), cap=len(jb))
    f = poset_isomorphic(Pa, Pb)
    if f is None:
        return None
    mapping = []
    for a in range(A.size):
        img = B.zero
        for t, p in enumerate(ja):
            if A.leq(p, a):
                img = B.join(img, jb[f[t]])
        mapping.append(img)
    if len(set(mapping)) != A.size:
        return None
    for a in range(A.size):
        if mapping[A.star(a)] != B.star(mapping[a]):
            return None
        for b in range(A.size):
            if mapping[A.meet(a, b)] != B.meet(mapping[a], mapping[b]):
                return None
            if mapping[A.join(a, b)] != B.join(mapping[a], mapping[b]):
                return None
    if mapping[A.zero] != B.zero or mapping[A.one] != B.one:
        return None
    return tuple(mapping)


# ----------------------------------------------------------------- carriers

def to_table(A: PAlgebra, cap: int | None = None) -> TableAlgebra:
    cap = DEFAULT.element_cap if cap is None else cap
    if isinstance(A, TableAlgebra):
        return A
    if A.size > cap:
        raise CapExceeded("table size", A.size, cap)
    rng = range(A.size)
    meet = [[A.meet(i, j) for j in rng] for i in rng]
    join = [[A.join(i, j) for j in rng] for i in rng]
    star = [A.star(i) for i in rng]
    return TableAlgebra(meet, join, star, A.zero, A.one)


def to_upset(A: PAlgebra, cap: int | None = None) -> UpsetAlgebra:
    """Rebuild A as the upsets of its reversed join-irreducible poset."""
    if isinstance(A, UpsetAlgebra):
        return A
    ja = join_irreducibles(A)
    base = Poset.from_leq(len(ja), lambda p, q: A.leq(ja[q], ja[p]), cap=len(ja))
    masks = sorted(
        sum(1 << p for p in range(len(ja)) if A.leq(ja[p], a))
        for a in range(A.size)
    )
    if masks != sorted(enumerate_upsets(base, cap=cap)):
        raise ValueError("carrier is not the full upset lattice of its join-irreducibles")
    labels = None
    if A.labels is not None:
        labels = [A.labels[p] for p in ja]
    return UpsetAlgebra(base, cap=cap, labels=labels)


# -------------------------------------------------------------------- JSON

def algebra_to_json_dict(A: PAlgebra) -> dict:
    if isinstance(A, TableAlgebra):
        return {
            "kind": "table",
            "size": A.size,
            "meet": [list(row) for row in A.meet_table],
            "join": [list(row) for row in A.join_table],
            "star": list(A.star_table),
            "zero": A.zero,
            "one": A.one,
        }
    labels = A.labels if A.labels is not None else tuple(str(i) for i in range(A.base.n))
    return {
        "kind": "upset",
        "poset": {"size": A.base.n, "covers": [list(c) for c in A.base.covers()]},
        "labels": list(labels),
    }


def algebra_from_json_dict(doc: dict, cap: int | None = None) -> PAlgebra:
    try:
        kind = doc["kind"]
        if kind == "table":
            return TableAlgebra(doc["meet"], doc["join"], doc["star"], doc["zero"], doc["one"])
        if kind == "upset":
            poset = doc["poset"]
            base = Poset.from_covers(poset["size"], [tuple(c) for c in poset["covers"]])
            return UpsetAlgebra(base, cap=cap, labels=[str(s) for s in doc["labels"]])
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise MalformedTables(f"bad algebra document: {exc}") from exc
    raise MalformedTables(f"unknown algebra kind {kind!r}")


def algebra_dumps(A: PAlgebra) -> str:
    return json.dumps(algebra_to_json_dict(A), indent=2) + "\n"


def algebra_loads(text: str, cap: int | None = None) -> PAlgebra:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedTables(f"bad JSON: {exc}") from exc
    return algebra_from_json_dict(doc, cap=cap)
