"""Decision procedures over varieties of distributive p-algebras.

Identity validity at level n is decided on normal forms (or, when a
counter-valuation is wanted, by sweeping the level-n subdirectly irreducible
algebra, which generates the variety).  Level None stands for the whole
variety; with k variables it coincides with level 2^k.  Quasi-identities are
evaluated on a given finite algebra either exhaustively or by a pruned
backtracking search that solves premises for their last unassigned variable.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .algebras import PAlgebra, TableAlgebra, build_chain, build_si, is_isomorphic
from .config import DEFAULT
from .errors import BudgetExceeded, CapExceeded
from .free import build_free, normal_form
from .terms import (
    Join,
    Meet,
    ONE,
    Star,
    Term,
    Var,
    ZERO,
    compile_postfix,
    eval_postfix,
    parse,
    qb_system,
    term_from_json,
    to_text,
    vars_of,
)


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def to_json_dict(self) -> dict:
        return {"lhs": to_text(self.lhs), "rhs": to_text(self.rhs)}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Equation":
        try:
            lhs, rhs = doc["lhs"], doc["rhs"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"equation needs lhs and rhs: {exc}")
        return cls(_term_in(lhs), _term_in(rhs))


@dataclass(frozen=True)
class QuasiIdentity:
    premises: tuple[Equation, ...]
    conclusion: Equation

    def to_json_dict(self) -> dict:
        return {
            "premises": [p.to_json_dict() for p in self.premises],
            "conclusion": self.conclusion.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "QuasiIdentity":
        try:
            return cls(
                tuple(Equation.from_json_dict(p)
                      for p in doc.get("premises", [])),
                Equation.from_json_dict(doc["conclusion"]),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed quasi-identity document: {exc}")


def _term_in(obj) -> Term:
    return parse(obj) if isinstance(obj, str) else term_from_json(obj)


def qb_quasi_identity(n: int) -> QuasiIdentity:
    premises, conclusion = qb_system(n)
    return QuasiIdentity(tuple(Equation(l, r) for l, r in premises),
                         Equation(*conclusion))


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: dict | None
    method: str                 # normal-form | exhaustive | pruned
    budget_used: int = 0

    def to_json_dict(self) -> dict:
        out = {"holds": self.holds, "method": self.method,
               "budgetUsed": self.budget_used}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _vars_sorted(*terms: Term) -> list[int]:
    seen: set[int] = set()
    for t in terms:
        seen.update(vars_of(t))
    return sorted(seen)


def _max_var(*terms: Term) -> int:
    vs = _vars_sorted(*terms)
    return vs[-1] if vs else 0


def check_identity(e: Equation, n: int | None = None, want_witness: bool = False,
                   *, budget: int | None = None,
                   poset_cap: int | None = None) -> Verdict:
    """Validity of lhs = rhs at level n (None: the whole variety)."""
    budget = DEFAULT.budget if budget is None else budget
    k = _max_var(e.lhs, e.rhs)
    n_eff = (1 << k) if n is None else n
    try:
        equal = (normal_form(e.lhs, n, k=k, poset_cap=poset_cap)
                 == normal_form(e.rhs, n, k=k, poset_cap=poset_cap))
        if equal:
            return Verdict(True, None, "normal-form", 0)
        if not want_witness:
            return Verdict(False, None, "normal-form", 0)
    except CapExceeded:
        pass  # index skeleton too large; decide on the generating algebra
    witness, used = _sweep_equation(e, n_eff, k, budget)
    if witness is None:
        return Verdict(True, None, "exhaustive", used)
    return Verdict(False, witness, "exhaustive", used)


def _sweep_equation(e: Equation, n_eff: int, k: int, budget: int):
    """First counter-valuation of lhs = rhs over the level-n_eff generator,
    in canonical valuation order; None if the identity holds there."""
    total = ((1 << n_eff) + 1) ** k
    if total > budget:
        raise BudgetExceeded("valuation sweep", total, budget)
    B = build_si(n_eff)
    cl, cr = compile_postfix(e.lhs), compile_postfix(e.rhs)
    used = 0
    for tup in itertools.product(range(B.size), repeat=k):
        used += 1
        val = {i + 1: tup[i] for i in range(k)}
        a = eval_postfix(cl, B, val)
        b = eval_postfix(cr, B, val)
        if a != b:
            witness = {
                "algebra": f"si:{n_eff}",
                "valuation": {f"x{i + 1}": tup[i] for i in range(k)},
                "lhs": a,
                "rhs": b,
            }
            return witness, used
    return None, used


# ------------------------------------------------------- quasi-identities

def _joinands(t: Term) -> list[Term]:
    if isinstance(t, Join):
        return _joinands(t.left) + _joinands(t.right)
    return [t]


def _meetands(t: Term) -> list[Term]:
    if isinstance(t, Meet):
        return _meetands(t.left) + _meetands(t.right)
    return [t]


class _Budget:
    __slots__ = ("limit", "used", "what")

    def __init__(self, limit: int, what: str):
        self.limit = limit
        self.used = 0
        self.what = what

    def spend(self, amount: int = 1):
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceeded(self.what, self.used, self.limit)


def check_quasi_identity(q: QuasiIdentity, A: PAlgebra,
                         strategy: str = "exhaustive",
                         *, budget: int | None = None) -> Verdict:
    """Evaluate premises => conclusion over all valuations into A."""
    if strategy not in ("exhaustive", "pruned"):
        raise ValueError(f"unknown strategy: {strategy!r}")
    budget = DEFAULT.budget if budget is None else budget
    terms = [t for p in q.premises for t in (p.lhs, p.rhs)]
    terms += [q.conclusion.lhs, q.conclusion.rhs]
    variables = _vars_sorted(*terms)
    if strategy == "exhaustive":
        return _quasi_exhaustive(q, A, variables, budget)
    return _quasi_pruned(q, A, variables, budget)


def _quasi_exhaustive(q, A, variables, budget) -> Verdict:
    total = A.size ** len(variables)
    if total > budget:
        raise BudgetExceeded("valuation sweep", total, budget)
    prem = [(compile_postfix(p.lhs), compile_postfix(p.rhs)) for p in q.premises]
    ccl, ccr = compile_postfix(q.conclusion.lhs), compile_postfix(q.conclusion.rhs)
    used = 0
    for tup in itertools.product(range(A.size), repeat=len(variables)):
        used += 1
        val = dict(zip(variables, tup))
        if any(eval_postfix(l, A, val) != eval_postfix(r, A, val) for l, r in prem):
            continue
        a, b = eval_postfix(ccl, A, val), eval_postfix(ccr, A, val)
        if a != b:
            return Verdict(False, _quasi_witness(variables, tup, a, b),
                           "exhaustive", used)
    return Verdict(True, None, "exhaustive", used)


def _quasi_witness(variables, tup, a, b) -> dict:
    return {
        "valuation": {f"x{v}": tup[i] for i, v in enumerate(variables)},
        "conclusion": {"lhs": a, "rhs": b},
    }


def _quasi_pruned(q, A, variables, budget) -> Verdict:
    """Backtracking in ascending variable order.  Premises are checked the
    moment their last variable is assigned; a premise one variable short of
    closed either pins that variable down (bare variable / starred variable
    against a closed side) or, failing a recognizable shape, filters the
    candidate pool by direct evaluation.  Bare join/meet operands of premises
    with one closed side contribute order bounds even earlier."""
    spent = _Budget(budget, "pruned search")
    prems = []
    for p in q.premises:
        vs = frozenset(vars_of(p.lhs)) | frozenset(vars_of(p.rhs))
        prems.append((p, compile_postfix(p.lhs), compile_postfix(p.rhs), vs))
    ccl, ccr = compile_postfix(q.conclusion.lhs), compile_postfix(q.conclusion.rhs)
    star_pre: dict[int, tuple[int, ...]] | None = None
    val: dict[int, int] = {}
    for _, cl, cr, vs in prems:
        if not vs:  # ground premise: decide it once up front
            spent.spend()
            if eval_postfix(cl, A, val) != eval_postfix(cr, A, val):
                return Verdict(True, None, "pruned", spent.used)

    def star_preimages() -> dict[int, tuple[int, ...]]:
        nonlocal star_pre
        if star_pre is None:
            spent.spend(A.size)
            acc: dict[int, list[int]] = {}
            for x in range(A.size):
                acc.setdefault(A.star(x), []).append(x)
            star_pre = {v: tuple(xs) for v, xs in acc.items()}
        return star_pre

    def closed_value(code, term_vars) -> int | None:
        if all(w in val for w in term_vars):
            spent.spend()
            return eval_postfix(code, A, val)
        return None

    def candidates(v: int) -> list[int]:
        pool: list[int] | None = None

        def narrow(xs):
            nonlocal pool
            xs = list(xs)
            pool = xs if pool is None else [x for x in pool if x in set(xs)]

        generic: list[tuple] = []
        for p, cl, cr, vs in prems:
            if v not in vs:
                continue
            open_vars = vs - val.keys()
            for mine, mine_code, other, other_code in (
                (p.lhs, cl, p.rhs, cr), (p.rhs, cr, p.lhs, cl),
            ):
                c = closed_value(other_code, vars_of(other))
                if c is None:
                    continue
                if open_vars == {v} and v not in vars_of(other):
                    if mine == Var(v):
                        narrow([c])
                    elif mine == Star(Var(v)):
                        narrow(star_preimages().get(c, ()))
                if Var(v) in _joinands(mine):
                    spent.spend(A.size if pool is None else len(pool))
                    base = range(A.size) if pool is None else pool
                    narrow([x for x in base if A.leq(x, c)])
                elif Var(v) in _meetands(mine):
                    spent.spend(A.size if pool is None else len(pool))
                    base = range(A.size) if pool is None else pool
                    narrow([x for x in base if A.leq(c, x)])
            if open_vars == {v}:
                generic.append((cl, cr))
        if pool is None:
            pool = list(range(A.size))
        if generic:
            kept = []
            for x in pool:
                val[v] = x
                spent.spend(len(generic))
                if all(eval_postfix(cl, A, val) == eval_postfix(cr, A, val)
                       for cl, cr in generic):
                    kept.append(x)
            val.pop(v, None)
            pool = kept
        return pool

    def search(depth: int):
        if depth == len(variables):
            spent.spend()
            a, b = eval_postfix(ccl, A, val), eval_postfix(ccr, A, val)
            if a != b:
                tup = tuple(val[v] for v in variables)
                return _quasi_witness(variables, tup, a, b)
            return None
        v = variables[depth]
        for x in candidates(v):
            spent.spend()
            val[v] = x
            ok = True
            for p, cl, cr, vs in prems:
                if v in vs and vs <= val.keys():
                    spent.spend()
                    if eval_postfix(cl, A, val) != eval_postfix(cr, A, val):
                        ok = False
                        break
            if ok:
                found = search(depth + 1)
                if found is not None:
                    return found
            del val[v]
        return None

    witness = search(0)
    if witness is None:
        return Verdict(True, None, "pruned", spent.used)
    return Verdict(False, witness, "pruned", spent.used)


def admissible_in_free(q: QuasiIdentity, n: int | None, k_extra: int = 0,
                       *, budget: int | None = None) -> Verdict:
    """Necessary condition for admissibility at level n: validity of q in a
    free algebra of rank (variable count + k_extra), degrading the rank until
    the algebra fits the caps.  Exhaustive when the sweep fits the budget,
    pruned otherwise."""
    budget = DEFAULT.budget if budget is None else budget
    terms = [t for p in q.premises for t in (p.lhs, p.rhs)]
    terms += [q.conclusion.lhs, q.conclusion.rhs]
    variables = _vars_sorted(*terms)
    k_want = max(1, (variables[-1] if variables else 1) + k_extra)
    F = None
    for k_try in range(k_want, 0, -1):
        try:
            F = build_free(n, k_try)
            break
        except CapExceeded:
            continue
    if F is None:
        raise CapExceeded("free algebra rank", k_want, 0)
    strategy = "exhaustive" if F.size ** len(variables) <= budget else "pruned"
    return check_quasi_identity(q, F.algebra, strategy, budget=budget)


# ----------------------------------------------- structural (in)completeness

def subalgebra(A: PAlgebra, subset) -> tuple[TableAlgebra, tuple[int, ...]]:
    """The induced algebra on a subuniverse (must contain the bounds and be
    closed under the three operations); returns it with the element list."""
    elems = tuple(sorted(subset))
    pos = {e: i for i, e in enumerate(elems)}
    if A.zero not in pos or A.one not in pos:
        raise ValueError("subuniverse must contain the bounds")
    m = len(elems)
    meet = [[0] * m for _ in range(m)]
    join = [[0] * m for _ in range(m)]
    star = [0] * m
    for i, x in enumerate(elems):
        sx = A.star(x)
        if sx not in pos:
            raise ValueError(f"not closed under star at {x}")
        star[i] = pos[sx]
        for j, y in enumerate(elems):
            mv, jv = A.meet(x, y), A.join(x, y)
            if mv not in pos or jv not in pos:
                raise ValueError(f"not closed under meet/join at ({x}, {y})")
            meet[i][j] = pos[mv]
            join[i][j] = pos[jv]
    return TableAlgebra(meet, join, star, pos[A.zero], pos[A.one]), elems


def three_element_witness(A: PAlgebra, c: int) -> dict | None:
    """{0, c∨c*, 1} as a subalgebra isomorphic to the level-1 generator,
    available whenever c∨c* is neither bound."""
    w = A.join(c, A.star(c))
    if w in (A.zero, A.one):
        return None
    sub, elems = subalgebra(A, {A.zero, w, A.one})
    iso = is_isomorphic(sub, build_si(1))
    return {"construction": "0, c ∨ c*, 1", "element": c,
            "subuniverse": list(elems), "isomorphicTo": "si:1",
            "verified": iso is not None}


def five_element_witness(A: PAlgebra, d: int) -> dict | None:
    """{0, d*, d**, d*∨d**, 1} as a subalgebra isomorphic to the level-2
    generator, available whenever d*∨d** is not 1 and d*, d** avoid the
    bounds."""
    ds = A.star(d)
    dss = A.star(ds)
    top = A.join(ds, dss)
    subset = {A.zero, ds, dss, top, A.one}
    if top == A.one or len(subset) != 5:
        return None
    sub, elems = subalgebra(A, subset)
    iso = is_isomorphic(sub, build_si(2))
    return {"construction": "0, d*, d**, d* ∨ d**, 1", "element": d,
            "subuniverse": list(elems), "isomorphicTo": "si:2",
            "verified": iso is not None}


def structural_completeness_report(n: int, *, budget: int | None = None) -> dict:
    """Machine-checked witnesses for the structural completeness status of
    level n: below 3, the subquasivariety classification with its subalgebra
    constructions; from 3 on, the separating quasi-identity qb_3 (valid in
    the sampled free algebras, refuted in the level-3 generator)."""
    if n < 0:
        raise ValueError("level must be >= 0")
    budget = DEFAULT.budget if budget is None else budget
    if n < 3:
        names = ["Pa_-1", "Pa_0", "Pa_1", "Pa_2"]
        witnesses = []
        if n >= 1:
            c4 = build_chain(4)
            w = three_element_witness(c4, 1)
            w["algebra"] = "chain:4"
            witnesses.append(w)
        if n >= 2:
            b2 = build_si(2)
            w = five_element_witness(b2, 1)
            w["algebra"] = "si:2"
            witnesses.append(w)
        return {
            "variety": f"Pa_{n}",
            "n": n,
            "structurallyComplete": True,
            "hereditarily": True,
            "subquasivarieties": names[: n + 2],
            "witnesses": witnesses,
        }
    q = qb_quasi_identity(3)
    admissible = []
    for k in (1, 2):
        F = build_free(n, k)
        strategy = "exhaustive" if F.size ** 3 <= budget else "pruned"
        v = check_quasi_identity(q, F.algebra, strategy, budget=budget)
        admissible.append({"algebra": f"free:{n},{k}", "size": F.size,
                           "verdict": v.to_json_dict()})
    refuted = check_quasi_identity(q, build_si(3), "exhaustive", budget=budget)
    return {
        "variety": f"Pa_{n}",
        "n": n,
        "structurallyComplete": False,
        "quasiIdentity": "qb_3",
        "admissibleInFree": admissible,
        "failsIn": {"algebra": "si:3", "verdict": refuted.to_json_dict()},
        "note": ("free-algebra validity is machine-checked at ranks 1 and 2 "
                 "only; the general statement covers every rank and level"),
    }


# ----------------------------------------------------- cross-validation

def random_term(rng: random.Random, max_depth: int = 6, k: int = 3) -> Term:
    """Seeded random term: uniform node choice, leaves forced at depth 0."""
    kinds = ("zero", "one", "var") if max_depth == 0 else (
        "zero", "one", "var", "star", "meet", "join")
    kind = rng.choice(kinds)
    if kind == "zero":
        return ZERO
    if kind == "one":
        return ONE
    if kind == "var":
        return Var(rng.randint(1, k))
    if kind == "star":
        return Star(random_term(rng, max_depth - 1, k))
    l = random_term(rng, max_depth - 1, k)
    r = random_term(rng, max_depth - 1, k)
    return Meet(l, r) if kind == "meet" else Join(l, r)


def _pair_report(t1: Term, t2: Term, n: int, *, budget: int) -> dict:
    k = _max_var(t1, t2)
    nf_equal = normal_form(t1, n, k=k) == normal_form(t2, n, k=k)
    witness, _ = _sweep_equation(Equation(t1, t2), n, k, budget)
    out = {
        "lhs": to_text(t1),
        "rhs": to_text(t2),
        "normalFormEqual": nf_equal,
        "exhaustiveEqual": witness is None,
        "agree": nf_equal == (witness is None),
    }
    if witness is not None:
        out["witness"] = witness
    return out


def oracle_equivalence(t1: Term, t2: Term, n: int, trials: int = 0,
                       *, seed: int | None = None, k: int = 3,
                       max_depth: int = 6, budget: int | None = None) -> dict:
    """Cross-validate the normal-form decision against the exhaustive sweep
    on the given pair, plus `trials` seeded random pairs."""
    budget = DEFAULT.budget if budget is None else budget
    report = {"pair": _pair_report(t1, t2, n, budget=budget)}
    if trials:
        rng = random.Random(DEFAULT.seed if seed is None else seed)
        disagreements = []
        for _ in range(trials):
            a = random_term(rng, max_depth, k)
            b = random_term(rng, max_depth, k)
            r = _pair_report(a, b, n, budget=budget)
            if not r["agree"]:
                disagreements.append(r)
        report["trials"] = trials
        report["disagreements"] = disagreements
    report["agree"] = report["pair"]["agree"] and not report.get("disagreements")
    return report
