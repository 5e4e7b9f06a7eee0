"""Free p-algebras of finite rank.

The join-irreducibles of the k-generated free algebra at level n are indexed
by pairs (family, L): a nonempty family of at most n subsets of the generator
set, and L a subset of the family's intersection.  The index poset, with
(fam_a, L_a) <= (fam_b, L_b)  iff  fam_b is a subfamily of fam_a and
L_a a subset of L_b, is the reversed algebra order on join-irreducibles; the
free algebra is the lattice of its upsets.  n = None stands for the
unbounded level, which saturates at n = 2^k; n = 0 degenerates the index set
to the 2^k atom indices and yields the free Boolean algebra (an extension
beyond the n > 0 indexing).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .algebras import UpsetAlgebra, build_si, is_isomorphic, product_many, quotient
from .config import DEFAULT
from .errors import BadIndex, CapExceeded
from .posets import Poset, bit_indices, downset_closure, min_elements, poset_isomorphic
from .terms import (
    ONE,
    ZERO,
    Meet,
    Star,
    Term,
    Var,
    atom_term,
    compile_postfix,
    eval_postfix,
    jirr_term,
    join_all,
    max_var,
    meet_all,
)


@dataclass(frozen=True)
class JIndex:
    """One join-irreducible index: subset masks over variables 1..k."""
    k: int
    tees: tuple[int, ...]  # strictly ascending nonempty family of masks
    ell: int

    def __post_init__(self):
        if not self.tees or list(self.tees) != sorted(set(self.tees)):
            raise BadIndex("the family must be nonempty and strictly ascending")
        common = (1 << self.k) - 1
        for T in self.tees:
            if T >> self.k:
                raise BadIndex("family member exceeds the variable count")
            common &= T
        if self.ell & ~common:
            raise BadIndex("L must be included in every family member")

    @property
    def is_atom(self) -> bool:
        return len(self.tees) == 1 and self.ell == self.tees[0]

    @property
    def storey(self) -> str:
        return "I" if self.is_atom else "II"

    def sort_key(self):
        return (len(self.tees), self.tees, self.ell)

    def term(self) -> Term:
        return jirr_term(self.tees, self.ell, self.k)

    def to_json_dict(self) -> dict:
        return {
            "T": [[i + 1 for i in bit_indices(T)] for T in self.tees],
            "L": [i + 1 for i in bit_indices(self.ell)],
        }

    @classmethod
    def from_json_dict(cls, doc: dict, k: int) -> "JIndex":
        tees = tuple(sorted(sum(1 << (i - 1) for i in T) for T in doc["T"]))
        ell = sum(1 << (i - 1) for i in doc["L"])
        return cls(k, tees, ell)


def base_leq(a: JIndex, b: JIndex) -> bool:
    """The index order (reversed algebra order on join-irreducibles)."""
    return set(b.tees) <= set(a.tees) and not (a.ell & ~b.ell)


def enumerate_jindices(n: int | None, k: int) -> list[JIndex]:
    """All indices at level n over k variables, canonically sorted."""
    if k < 0 or (n is not None and n < 0):
        raise ValueError("need k >= 0 and n >= 0")
    subsets = range(1 << k)
    if n == 0:
        return [JIndex(k, (T,), T) for T in subsets]
    n_eff = (1 << k) if n is None else min(n, 1 << k)
    out = []
    for size in range(1, n_eff + 1):
        for fam in itertools.combinations(subsets, size):
            common = (1 << k) - 1
            for T in fam:
                common &= T
            ell = common
            while True:
                out.append(JIndex(k, fam, ell))
                if ell == 0:
                    break
                ell = (ell - 1) & common
    out.sort(key=JIndex.sort_key)
    return out


def count_jirr(n: int | None, k: int) -> int:
    """The index count, by the binomial double sum (no enumeration)."""
    if k < 0 or (n is not None and n < 0):
        raise ValueError("need k >= 0 and n >= 0")
    if n == 0:
        return 1 << k
    n_eff = (1 << k) if n is None else n
    total = 0
    for ell in range(k + 1):
        inner = sum(math.comb(1 << (k - ell), m) for m in range(1, n_eff + 1))
        total += math.comb(k, ell) * inner
    return total


@lru_cache(maxsize=None)
def _skeleton(n_key: int | None, k: int, cap: int) -> tuple[tuple[JIndex, ...], Poset]:
    expected = count_jirr(n_key, k)
    if expected > cap:
        raise CapExceeded("join-irreducible index set", expected, cap)
    indices = tuple(enumerate_jindices(n_key, k))
    fams = [frozenset(j.tees) for j in indices]

    def leq(i, j):
        return fams[j] <= fams[i] and not (indices[i].ell & ~indices[j].ell)

    return indices, Poset.from_leq(len(indices), leq, cap=cap)


def free_skeleton(n: int | None, k: int, poset_cap: int | None = None):
    """(indices, index poset) without materializing elements."""
    cap = DEFAULT.poset_cap if poset_cap is None else poset_cap
    n_key = None if n is None else min(n, 1 << k) if n > 0 else 0
    return _skeleton(n_key, k, cap)


class _SkeletonOps:
    """Upset-mask arithmetic over an index poset; quacks like an algebra."""

    __slots__ = ("poset", "one")
    zero = 0

    def __init__(self, poset: Poset):
        self.poset = poset
        self.one = poset.universe

    def meet(self, a: int, b: int) -> int:
        return a & b

    def join(self, a: int, b: int) -> int:
        return a | b

    def star(self, a: int) -> int:
        return self.poset.universe & ~downset_closure(self.poset, a)


class FreeAlgebra:
    """A materialized free algebra with its index layer kept visible."""

    def __init__(self, n, k, indices, poset, algebra, gen_masks):
        self.n = n
        self.k = k
        self.indices = indices
        self.poset = poset
        self.algebra = algebra
        self.gen_masks = gen_masks
        self.gens = tuple(algebra.index[m] for m in gen_masks)
        self.position = {j: p for p, j in enumerate(indices)}

    @property
    def size(self) -> int:
        return self.algebra.size

    def valuation(self) -> dict[int, int]:
        """Generators as a ready-made valuation x_i -> element."""
        return {i + 1: g for i, g in enumerate(self.gens)}

    def prime_filter_mask(self, pos: int) -> int:
        """The prime filter of index position pos: elements whose upset
        contains that join-irreducible."""
        return sum(1 << e for e in range(self.algebra.size)
                   if (self.algebra.mask(e) >> pos) & 1)

    def __repr__(self) -> str:
        return (f"FreeAlgebra(n={self.n}, k={self.k}, "
                f"jirr={len(self.indices)}, size={self.algebra.size})")


def build_free(n: int | None, k: int, poset_cap: int | None = None,
               element_cap: int | None = None) -> FreeAlgebra:
    indices, poset = free_skeleton(n, k, poset_cap)
    element_cap = DEFAULT.element_cap if element_cap is None else element_cap
    algebra = UpsetAlgebra(poset, cap=element_cap,
                           labels=[_emit_text(j) for j in indices])
    gen_masks = tuple(
        sum(1 << p for p, j in enumerate(indices) if (j.ell >> i) & 1)
        for i in range(k)
    )
    return FreeAlgebra(n, k, indices, poset, algebra, gen_masks)


def _emit(j: JIndex) -> Term:
    """Canonical term for one index; collapses to simpler shapes when the
    family is full (the term is 1) or a singleton (a meet of literals)."""
    if len(j.tees) == 1 << j.k:
        return ONE
    if len(j.tees) == 1:
        T = j.tees[0]
        factors = []
        for i in range(j.k):
            v = Var(i + 1)
            if (j.ell >> i) & 1:
                factors.append(v)
            elif (T >> i) & 1:
                factors.append(Star(Star(v)))
            else:
                factors.append(Star(v))
        return meet_all(factors)
    head = Star(Star(join_all([atom_term(T, j.k) for T in j.tees])))
    if not j.ell:
        return head
    return Meet(head, meet_all([Var(i + 1) for i in bit_indices(j.ell)]))


def _emit_text(j: JIndex) -> str:
    from .terms import to_text

    return to_text(_emit(j))


def normal_form(t: Term, n: int | None, k: int | None = None,
                poset_cap: int | None = None) -> Term:
    """The canonical join of maximal join-irreducibles below t at level n.

    Idempotent, and tree-equality of normal forms decides the identity at
    that level.  k widens the ambient variable set beyond max_var(t).
    """
    k = max(max_var(t), 0 if k is None else k)
    indices, poset = free_skeleton(n, k, poset_cap)
    ops = _SkeletonOps(poset)
    valuation = {
        i + 1: sum(1 << p for p, j in enumerate(indices) if (j.ell >> i) & 1)
        for i in range(k)
    }
    mask = eval_postfix(compile_postfix(t), ops, valuation)
    heads = sorted((indices[p] for p in bit_indices(min_elements(poset, mask))),
                   key=JIndex.sort_key)
    if not heads:
        return ZERO
    return join_all([_emit(j) for j in heads])


# --------------------------------------------------- free distributive D(s)

def free_distributive(s: int, element_cap: int | None = None) -> UpsetAlgebra:
    """The free bounded distributive lattice on s generators as a p-algebra:
    upsets of the subset cube ordered by inclusion.  The base has a single
    maximal node, so every nonzero element is dense."""
    if s < 0:
        raise ValueError("s must be >= 0")
    if s > 4:
        raise CapExceeded("distributive generator count", s, 4)
    cube = Poset.from_leq(1 << s, lambda a, b: not (a & ~b), cap=1 << s)
    labels = ["{" + ",".join(str(i + 1) for i in bit_indices(m)) + "}"
              for m in range(1 << s)]
    return UpsetAlgebra(cube, cap=element_cap, labels=labels)


def quotient_to_distributive(n: int | None, k: int, T: int,
                             poset_cap: int | None = None,
                             element_cap: int | None = None):
    """Collapse 1 with the double star of the atom term of T; the quotient
    is the free distributive lattice on |T| generators.  Returns the quotient
    and the element-level isomorphism (None if the comparison fails)."""
    from .congruences import principal_congruence

    if T >> k:
        raise BadIndex("T exceeds the variable count")
    F = build_free(n, k, poset_cap, element_cap)
    target = eval_postfix(compile_postfix(Star(Star(atom_term(T, k)))),
                          F.algebra, F.valuation())
    theta = principal_congruence(F.algebra, F.algebra.one, target)
    quo = quotient(F.algebra, theta, check=False)
    D = free_distributive(bin(T).count("1"), element_cap)
    return quo.algebra, is_isomorphic(quo.algebra, D)


@dataclass(frozen=True)
class StoneDecomposition:
    k: int
    subset_masks: tuple[int, ...]
    factors: tuple[UpsetAlgebra, ...]
    level: str                 # "elements" | "poset"
    iso: tuple[int, ...] | None


def stone_decompose(k: int, element_cap: int | None = None) -> StoneDecomposition:
    """Match the level-1 free algebra against the product of free
    distributive lattices, one factor of rank |T| per subset T.  Element-level
    when the element count fits under the cap, index-poset-level otherwise."""
    if k < 0 or k > 3:
        raise CapExceeded("generator count for the decomposition", k, 3)
    subset_masks = tuple(range(1 << k))
    factors = tuple(free_distributive(bin(T).count("1"), element_cap)
                    for T in subset_masks)
    element_cap = DEFAULT.element_cap if element_cap is None else element_cap
    total = math.prod(f.size for f in factors)
    if total <= element_cap:
        F = build_free(1, k, element_cap=element_cap)
        prod = product_many(list(factors), cap=element_cap)
        iso = is_isomorphic(F.algebra, prod)
        return StoneDecomposition(k, subset_masks, factors, "elements", iso)
    _, poset = free_skeleton(1, k)
    shift = 0
    rows: list[int] = []
    for f in factors:
        rows.extend(row << shift for row in f.base.up)
        shift += f.base.n
    iso = poset_isomorphic(poset, Poset(rows))
    return StoneDecomposition(k, subset_masks, factors, "poset", iso)


# ------------------------------------------------------------ H3 digression

def h3_poset(n: int | None, k: int, poset_cap: int | None = None):
    """The two orders carried by the same index set: plain congruence
    inclusion (reflexive pairs plus non-atom-below-atom pairs where the
    atom's subset belongs to the family) and the 1-class order (the index
    poset itself).  The identity is a pp-morphism from the first onto the
    second."""
    indices, by_one = free_skeleton(n, k, poset_cap)

    def subset_leq(i, j):
        a, b = indices[i], indices[j]
        return a == b or (not a.is_atom and b.is_atom and b.tees[0] in a.tees)

    by_subset = Poset.from_leq(len(indices), subset_leq, cap=len(indices))
    return by_subset, by_one, tuple(range(len(indices)))


# -------------------------------------------------- analytic homomorphisms

def homomorphism_g(n: int | None, k: int, tees, ell: int):
    """The generator assignment whose kernel is the congruence of the index
    (tees, ell): x_i goes to the top if i is in L, else to the Boolean tuple
    recording which family members contain i.  Returns (B, assignment) with
    B the subdirectly irreducible target of rank |family|."""
    j = JIndex(k, tuple(sorted(set(tees))), ell)  # validates the index data
    if n is not None and n != 0 and len(j.tees) > n:
        raise BadIndex("family too large for the level")
    s = len(j.tees)
    B = build_si(s)
    top = B.one
    assignment = []
    for i in range(k):
        if (ell >> i) & 1:
            assignment.append(top)
        else:
            assignment.append(sum(1 << t for t, T in enumerate(j.tees) if (T >> i) & 1))
    image = _generated_subuniverse(B, assignment)
    expect_full = not j.is_atom
    if expect_full and len(image) != B.size:
        raise BadIndex("assignment fails to generate the full target")
    if not expect_full and sorted(image) != [B.zero, B.one]:
        raise BadIndex("atom-index assignment must generate the two bounds")
    return B, tuple(assignment)


def _generated_subuniverse(B, seed) -> set[int]:
    out = {B.zero, B.one, *seed}
    frontier = list(out)
    while frontier:
        a = frontier.pop()
        for b in list(out):
            for c in (B.meet(a, b), B.join(a, b)):
                if c not in out:
                    out.add(c)
                    frontier.append(c)
        st = B.star(a)
        if st not in out:
            out.add(st)
            frontier.append(st)
    return out


def kernel_congruence(F: FreeAlgebra, j: JIndex):
    """The kernel of the homomorphism induced by homomorphism_g — an
    independent route to the meet-irreducible congruence of index j."""
    from .congruences import Congruence

    B, assignment = homomorphism_g(F.n, F.k, j.tees, j.ell)
    valuation = {i + 1: assignment[i] for i in range(F.k)}
    per_index = [
        eval_postfix(compile_postfix(idx.term()), B, valuation)
        for idx in F.indices
    ]
    labels = []
    for e in range(F.algebra.size):
        acc = B.zero
        for p in bit_indices(F.algebra.mask(e)):
            acc = B.join(acc, per_index[p])
        labels.append(acc)
    return Congruence(labels)
