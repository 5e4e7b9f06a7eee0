"""Congruences of finite p-algebras.

Principal congruences by Mal'cev-style closure, the congruence lattice as a
join-closure oracle for small carriers, and the completely meet-irreducible
records: every prime filter F determines a unique congruence whose 1-class is
F, built from the filter F-bar = {a : a** in F} and the I-type prime filters
above it.  Records carry the unique cover mu+, the storey tag, psi = min 1/mu,
and the subcover witness e_mu.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .config import DEFAULT
from .errors import CapExceeded, NotACongruence, NotPrime
from .posets import Poset, bit_indices


class Congruence:
    """A partition of 0..size-1; rep[i] is the least member of i's class."""

    __slots__ = ("rep", "_classes")

    def __init__(self, labels: Sequence[int]):
        least: dict[int, int] = {}
        for i, lab in enumerate(labels):
            least.setdefault(lab, i)
        self.rep = tuple(least[lab] for lab in labels)
        self._classes: tuple[int, ...] | None = None

    @property
    def size(self) -> int:
        return len(self.rep)

    def same(self, i: int, j: int) -> bool:
        return self.rep[i] == self.rep[j]

    def class_mask(self, i: int) -> int:
        r = self.rep[i]
        return sum(1 << j for j, s in enumerate(self.rep) if s == r)

    def classes(self) -> tuple[int, ...]:
        """Class masks ordered by least member."""
        if self._classes is None:
            by_rep: dict[int, int] = {}
            for i, r in enumerate(self.rep):
                by_rep[r] = by_rep.get(r, 0) | (1 << i)
            self._classes = tuple(by_rep[r] for r in sorted(by_rep))
        return self._classes

    @property
    def num_classes(self) -> int:
        return len(self.classes())

    def is_identity(self) -> bool:
        return self.num_classes == self.size

    def is_full(self) -> bool:
        return self.num_classes == 1

    def refines(self, other: "Congruence") -> bool:
        """self <= other in the congruence lattice (every class fits inside one)."""
        return all(other.rep[i] == other.rep[r] for i, r in enumerate(self.rep))

    def join(self, other: "Congruence") -> "Congruence":
        parent = list(range(self.size))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(self.size):
            for r in (self.rep[i], other.rep[i]):
                a, b = find(i), find(r)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        return Congruence([find(i) for i in range(self.size)])

    def meet(self, other: "Congruence") -> "Congruence":
        pairs = {}
        labels = []
        for i in range(self.size):
            key = (self.rep[i], other.rep[i])
            labels.append(pairs.setdefault(key, i))
        return Congruence(labels)

    def merge_classes(self, i: int, j: int) -> "Congruence":
        """The smallest partition above self that puts i and j together
        (not closed under the algebra operations)."""
        ri, rj = self.rep[i], self.rep[j]
        lo, hi = min(ri, rj), max(ri, rj)
        return Congruence([lo if r == hi else r for r in self.rep])

    def to_json(self) -> list[int]:
        return list(self.rep)

    def __eq__(self, other) -> bool:
        return isinstance(other, Congruence) and self.rep == other.rep

    def __hash__(self) -> int:
        return hash(self.rep)

    def __repr__(self) -> str:
        return f"Congruence({self.num_classes} classes on {self.size})"


def identity_congruence(size: int) -> Congruence:
    return Congruence(range(size))


def full_congruence(size: int) -> Congruence:
    return Congruence([0] * size)


def principal_congruence(A, a: int, b: int) -> Congruence:
    """Theta(a,b): close {(a,b)} under star and under meet/join with every
    fixed side argument, interleaved with equivalence closure."""
    parent = list(range(A.size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pending: list[tuple[int, int]] = []

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)
            pending.append((x, y))

    union(a, b)
    while pending:
        x, y = pending.pop()
        union(A.star(x), A.star(y))
        for c in range(A.size):
            union(A.meet(x, c), A.meet(y, c))
            union(A.join(x, c), A.join(y, c))
    return Congruence([find(i) for i in range(A.size)])


def congruence_closure(A, pairs: Sequence[tuple[int, int]]) -> Congruence:
    """Smallest congruence of A containing all the given pairs."""
    out = identity_congruence(A.size)
    for a, b in pairs:
        if not out.same(a, b):
            out = out.join(principal_congruence(A, a, b))
    return out


def all_congruences(A, cap: int | None = None) -> list[Congruence]:
    """The whole congruence lattice, by join-closing the principal ones.
    Exponential in the worst case; guarded by the oracle cap."""
    cap = DEFAULT.oracle_cap if cap is None else cap
    if A.size > cap:
        raise CapExceeded("carrier for congruence-lattice enumeration", A.size, cap)
    seen = {identity_congruence(A.size)}
    for a in range(A.size):
        for b in range(a + 1, A.size):
            seen.add(principal_congruence(A, a, b))
    frontier = list(seen)
    while frontier:
        fresh = []
        for th in frontier:
            for other in list(seen):
                j = th.join(other)
                if j not in seen:
                    seen.add(j)
                    fresh.append(j)
        frontier = fresh
    return sorted(seen, key=lambda c: c.rep)


# ------------------------------------------------------------- prime filters

def is_prime_filter(A, mask: int) -> bool:
    members = list(bit_indices(mask))
    if not members or mask == (1 << A.size) - 1:
        return False
    for a in members:
        for b in range(A.size):
            if A.leq(a, b) and not (mask >> b) & 1:
                return False
        for b in members:
            if not (mask >> A.meet(a, b)) & 1:
                return False
    for a in range(A.size):
        for b in range(A.size):
            if (mask >> A.join(a, b)) & 1 and not ((mask >> a) & 1 or (mask >> b) & 1):
                return False
    return True


def prime_filters(A) -> list[int]:
    """All prime filters, as element masks; in a finite distributive lattice
    these are exactly the up-sets of join-irreducibles."""
    from .algebras import join_irreducibles

    out = []
    for p in join_irreducibles(A):
        mask = sum(1 << a for a in range(A.size) if A.leq(p, a))
        if not is_prime_filter(A, mask):
            raise NotPrime(f"up-set of join-irreducible {p} failed the prime check")
        out.append(mask)
    return out


def closure_filter(A, mask: int) -> int:
    """F-bar = {a : a** in F}."""
    return sum(1 << a for a in range(A.size) if (mask >> A.star(A.star(a))) & 1)


def i_type_filters(A, filters: Sequence[int] | None = None) -> list[int]:
    """Prime filters F with: a** in F implies a in F (the 1-classes of the
    congruences whose quotient is the 2-element algebra)."""
    filters = prime_filters(A) if filters is None else filters
    return [F for F in filters if closure_filter(A, F) == F]


# ---------------------------------------------------------------- Cm records

@dataclass(frozen=True)
class CmRecord:
    """A completely meet-irreducible congruence with its derived data."""
    mu: Congruence
    mu_plus: Congruence
    storey: str
    one_mask: int
    psi: int
    e_mu: int

    @property
    def one_class(self) -> tuple[int, ...]:
        return tuple(bit_indices(self.one_mask))

    def to_json_dict(self) -> dict:
        return {
            "mu": self.mu.to_json(),
            "muPlus": self.mu_plus.to_json(),
            "storey": self.storey,
            "oneClass": list(self.one_class),
            "psi": self.psi,
            "eMu": self.e_mu,
        }


def _meet_fold(A, mask: int) -> int:
    acc = A.one
    for a in bit_indices(mask):
        acc = A.meet(acc, a)
    return acc


def _unique_subcover_check(A, mu: Congruence, one_mask: int) -> bool:
    """The quotient must have a unique subcover of the 1-class."""
    classes = mu.classes()
    reps = [next(iter(bit_indices(c))) for c in classes]
    one_rep = mu.rep[next(iter(bit_indices(one_mask)))]
    below = [r for r in reps if r != one_rep]
    maximal = [r for r in below
               if not any(s != r and mu.rep[A.meet(r, s)] == r for s in below)]
    return len(maximal) == 1


def cm_from_prime_filter(A, F: int, *, filters: Sequence[int] | None = None,
                         verify: bool | None = None) -> CmRecord:
    """The unique completely meet-irreducible congruence with 1-class F.

    Classes: F itself; F-bar minus F when nonempty; outside F-bar, elements
    grouped by which I-type prime filters above F-bar contain them.
    """
    if filters is not None and F in filters:
        pass  # already vetted by prime_filters
    elif not is_prime_filter(A, F):
        raise NotPrime("not a prime filter mask")
    fbar = closure_filter(A, F)
    full_mask = (1 << A.size) - 1
    if fbar == F:
        other = full_mask & ~F
        lo_f, lo_o = min(bit_indices(F)), min(bit_indices(other))
        labels = [lo_f if (F >> i) & 1 else lo_o for i in range(A.size)]
        mu = Congruence(labels)
        record = CmRecord(mu, full_congruence(A.size), "I", F,
                          psi=_meet_fold(A, F), e_mu=lo_o)
    else:
        gees = [G for G in i_type_filters(A, filters) if not (fbar & ~G)]
        sig: dict[int, int] = {}
        labels = []
        lo_f = min(bit_indices(F))
        lo_e = min(bit_indices(fbar & ~F))
        for a in range(A.size):
            if (F >> a) & 1:
                labels.append(lo_f)
            elif (fbar >> a) & 1:
                labels.append(lo_e)
            else:
                key = sum(1 << t for t, G in enumerate(gees) if (G >> a) & 1)
                labels.append(sig.setdefault(key, a))
        mu = Congruence(labels)
        record = CmRecord(mu, mu.merge_classes(lo_f, lo_e), "II", F,
                          psi=_meet_fold(A, F), e_mu=lo_e)
    if verify is None:
        verify = A.size <= 256
    if verify:
        from .algebras import compatibility_witness

        for cong, tag in ((record.mu, "mu"), (record.mu_plus, "mu-plus")):
            w = compatibility_witness(A, cong.rep)
            if w is not None:
                raise NotACongruence(f"{tag} construction broke compatibility at {w}")
        if not _unique_subcover_check(A, record.mu, F):
            raise NotACongruence("quotient lacks a unique subcover of 1")
    return record


def cm_all(A, *, verify: bool | None = None, cross_check: bool | None = None) -> list[CmRecord]:
    """One record per prime filter.  For small carriers the result is checked
    against the meet-irreducibles of the enumerated congruence lattice."""
    filters = prime_filters(A)
    records = [cm_from_prime_filter(A, F, filters=filters, verify=verify) for F in filters]
    if cross_check is None:
        cross_check = A.size <= DEFAULT.oracle_cap
    if cross_check:
        lattice = all_congruences(A, cap=max(DEFAULT.oracle_cap, A.size))
        expected = set()
        for th in lattice:
            uppers = [ph for ph in lattice if ph != th and th.refines(ph)]
            bound = full_congruence(A.size)
            for ph in uppers:
                bound = bound.meet(ph)
            if bound != th:
                expected.add(th)
        if expected != {r.mu for r in records}:
            raise RuntimeError("record construction disagrees with the lattice oracle")
    return records


def storey(record: CmRecord) -> str:
    return record.storey


def cm_leq(r: CmRecord, s: CmRecord) -> bool:
    """The tight order: inclusion of 1-classes."""
    return not (r.one_mask & ~s.one_mask)


def cm_subset(r: CmRecord, s: CmRecord) -> bool:
    """Plain congruence inclusion."""
    return r.mu.refines(s.mu)


def cm_posets(records: Sequence[CmRecord]) -> tuple[Poset, Poset]:
    """(inclusion order, 1-class order) over the given records."""
    n = len(records)
    by_subset = Poset.from_leq(n, lambda i, j: cm_subset(records[i], records[j]), cap=n)
    by_one = Poset.from_leq(n, lambda i, j: cm_leq(records[i], records[j]), cap=n)
    return by_subset, by_one


def m_of(phi: Congruence, records: Sequence[CmRecord]) -> list[CmRecord]:
    """M(phi): the records above phi."""
    return [r for r in records if phi.refines(r.mu)]


def m_hat(A, a: int, records: Sequence[CmRecord] | None = None) -> list[CmRecord]:
    """M-hat(a): the records whose 1-class contains a."""
    records = cm_all(A) if records is None else records
    return [r for r in records if (r.one_mask >> a) & 1]


def compose_check_permutability(A, c: int, n: int = 2,
                                congruences: Sequence[Congruence] | None = None,
                                cap: int | None = None) -> list[tuple[int, int]]:
    """Pairs (i, j) of congruence indices whose n-fold alternating relational
    compositions starting at c give different sets.  Empty means the algebra
    is n-permutable at c."""
    cons = all_congruences(A, cap=cap) if congruences is None else list(congruences)

    def chain(first: Congruence, second: Congruence) -> int:
        mask = 1 << c
        for step in range(n):
            th = first if step % 2 == 0 else second
            grown = 0
            for cls in th.classes():
                if cls & mask:
                    grown |= cls
            mask = grown
        return mask

    out = []
    for i in range(len(cons)):
        for j in range(i + 1, len(cons)):
            if chain(cons[i], cons[j]) != chain(cons[j], cons[i]):
                out.append((i, j))
    return out
