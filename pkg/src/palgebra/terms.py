"""Terms over the signature (meet, join, star, 0, 1) with variables x1, x2, ...

Surface syntax: `&` meet, `|` join, postfix `*` star, `0`, `1`, parentheses.
Star binds tightest, then `&`, then `|`; both binary operators associate left.
Empty meets render as 1 and empty joins as 0.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BadIndex, ParseError, UnboundVariable, UnknownIdentifier
from .posets import bit_indices


@dataclass(frozen=True)
class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Zero(Term):
    __slots__ = ()


@dataclass(frozen=True)
class One(Term):
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    index: int  # 1-based


@dataclass(frozen=True)
class Meet(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Join(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Star(Term):
    arg: Term


ZERO = Zero()
ONE = One()


# ------------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(x\d+)|([01&|*()∧∨])|([A-Za-z_]\w*))")
_ALIAS = {"∧": "&", "∨": "|"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            at = len(text) - len(rest)
            raise ParseError(f"unexpected character {rest[0]!r}", at)
        if m.group(1):
            out.append(("var", m.group(1), m.start(1)))
        elif m.group(2):
            sym = _ALIAS.get(m.group(2), m.group(2))
            out.append((sym, sym, m.start(2)))
        else:
            raise UnknownIdentifier(f"unknown identifier {m.group(3)!r}", m.start(3))
        pos = m.end()
    return out


def parse(text: str) -> Term:
    tokens = _tokenize(text)
    n = len(tokens)
    i = 0

    def peek():
        return tokens[i][0] if i < n else None

    def here():
        return tokens[i][2] if i < n else len(text)

    def primary() -> Term:
        nonlocal i
        kind = peek()
        if kind == "0":
            i += 1
            return ZERO
        if kind == "1":
            i += 1
            return ONE
        if kind == "var":
            idx = int(tokens[i][1][1:])
            if idx < 1:
                raise UnknownIdentifier("variable indices start at x1", tokens[i][2])
            i += 1
            return Var(idx)
        if kind == "(":
            i += 1
            t = disjunct()
            if peek() != ")":
                raise ParseError("expected ')'", here())
            i += 1
            return t
        raise ParseError("expected a term", here())

    def starred() -> Term:
        nonlocal i
        t = primary()
        while peek() == "*":
            i += 1
            t = Star(t)
        return t

    def conjunct() -> Term:
        nonlocal i
        t = starred()
        while peek() == "&":
            i += 1
            t = Meet(t, starred())
        return t

    def disjunct() -> Term:
        nonlocal i
        t = conjunct()
        while peek() == "|":
            i += 1
            t = Join(t, conjunct())
        return t

    out = disjunct()
    if i < n:
        raise ParseError("trailing input", here())
    return out


# ------------------------------------------------------------------ printing

def _prec(t: Term) -> int:
    if isinstance(t, Join):
        return 1
    if isinstance(t, Meet):
        return 2
    if isinstance(t, Star):
        return 3
    return 4


def to_text(t: Term, pretty: bool = False) -> str:
    """Minimal-parenthesis rendering; reparses to an equal tree."""
    meet_sym, join_sym = ("∧", "∨") if pretty else ("&", "|")

    def wrap(child: Term, floor: int) -> str:
        s = walk(child)
        return f"({s})" if _prec(child) < floor else s

    def walk(node: Term) -> str:
        if isinstance(node, Zero):
            return "0"
        if isinstance(node, One):
            return "1"
        if isinstance(node, Var):
            return f"x{node.index}"
        if isinstance(node, Star):
            return wrap(node.arg, 3) + "*"
        if isinstance(node, Meet):
            return f"{wrap(node.left, 2)} {meet_sym} {wrap(node.right, 3)}"
        return f"{wrap(node.left, 1)} {join_sym} {wrap(node.right, 2)}"

    return walk(t)


def term_to_json(t: Term):
    if isinstance(t, Zero):
        return ["zero"]
    if isinstance(t, One):
        return ["one"]
    if isinstance(t, Var):
        return ["var", t.index]
    if isinstance(t, Star):
        return ["star", term_to_json(t.arg)]
    if isinstance(t, Meet):
        return ["meet", term_to_json(t.left), term_to_json(t.right)]
    return ["join", term_to_json(t.left), term_to_json(t.right)]


def term_from_json(doc) -> Term:
    try:
        tag = doc[0]
        if tag == "zero":
            return ZERO
        if tag == "one":
            return ONE
        if tag == "var":
            return Var(int(doc[1]))
        if tag == "star":
            return Star(term_from_json(doc[1]))
        if tag == "meet":
            return Meet(term_from_json(doc[1]), term_from_json(doc[2]))
        if tag == "join":
            return Join(term_from_json(doc[1]), term_from_json(doc[2]))
    except (TypeError, IndexError, ValueError) as exc:
        raise ParseError(f"bad term document: {exc}", 0) from exc
    raise ParseError(f"bad term tag {tag!r}", 0)


# ---------------------------------------------------------------- evaluation

def vars_of(t: Term) -> tuple[int, ...]:
    seen: set[int] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            seen.add(node.index)
        elif isinstance(node, Star):
            stack.append(node.arg)
        elif isinstance(node, (Meet, Join)):
            stack.append(node.left)
            stack.append(node.right)
    return tuple(sorted(seen))


def max_var(t: Term) -> int:
    vs = vars_of(t)
    return vs[-1] if vs else 0


def compile_postfix(t: Term) -> tuple[tuple, ...]:
    """Flatten to postfix instructions; avoids recursion depth limits on the
    wide joins normal forms produce."""
    out: list[tuple] = []
    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        node, done = stack.pop()
        if isinstance(node, Zero):
            out.append(("zero",))
        elif isinstance(node, One):
            out.append(("one",))
        elif isinstance(node, Var):
            out.append(("var", node.index))
        elif done:
            out.append(("star",) if isinstance(node, Star) else
                       ("meet",) if isinstance(node, Meet) else ("join",))
        elif isinstance(node, Star):
            stack.append((node, True))
            stack.append((node.arg, False))
        else:
            stack.append((node, True))
            stack.append((node.right, False))
            stack.append((node.left, False))
    return tuple(out)


def eval_postfix(code: Sequence[tuple], A, valuation) -> int:
    """Run compiled code over algebra A; valuation maps 1-based indices to
    element indices of A."""
    stack: list[int] = []
    push = stack.append
    for ins in code:
        op = ins[0]
        if op == "var":
            try:
                push(valuation[ins[1]])
            except KeyError:
                raise UnboundVariable(f"x{ins[1]} has no value") from None
        elif op == "meet":
            b = stack.pop()
            stack[-1] = A.meet(stack[-1], b)
        elif op == "join":
            b = stack.pop()
            stack[-1] = A.join(stack[-1], b)
        elif op == "star":
            stack[-1] = A.star(stack[-1])
        elif op == "zero":
            push(A.zero)
        else:
            push(A.one)
    return stack[-1]


def evaluate(t: Term, A, valuation) -> int:
    return eval_postfix(compile_postfix(t), A, valuation)


# ------------------------------------------------------------- scheme terms

def meet_all(terms: Sequence[Term]) -> Term:
    """Balanced meet; empty meet is 1."""
    if not terms:
        return ONE
    if len(terms) == 1:
        return terms[0]
    mid = (len(terms) + 1) // 2
    return Meet(meet_all(terms[:mid]), meet_all(terms[mid:]))


def join_all(terms: Sequence[Term]) -> Term:
    """Balanced join; empty join is 0."""
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    mid = (len(terms) + 1) // 2
    return Join(join_all(terms[:mid]), join_all(terms[mid:]))


def subtraction_term() -> Term:
    """x - y over x1, x2."""
    return Meet(Join(Var(1), Var(2)), Star(Meet(Var(1), Var(2))))


def boolean_equiv_term() -> Term:
    """x . y over x1, x2."""
    return Join(Meet(Star(Var(1)), Star(Var(2))), Meet(Var(1), Var(2)))


def atom_term(T: int, k: int) -> Term:
    """x_T: meet of x_i for i in T and x_i* outside T; T is a bitmask over
    variables 1..k (bit i-1 stands for x_i)."""
    if T >> k:
        raise BadIndex(f"subset mask {T:#x} exceeds {k} variables")
    factors = [Var(i + 1) if (T >> i) & 1 else Star(Var(i + 1)) for i in range(k)]
    return meet_all(factors)


def jirr_term(tees: Iterable[int], ell: int, k: int) -> Term:
    """p^L_T: (join of x_T over the family)** meet the variables of L."""
    fam = sorted(set(tees))
    if not fam:
        raise BadIndex("the family must be nonempty")
    common = (1 << k) - 1
    for T in fam:
        if T >> k:
            raise BadIndex(f"subset mask {T:#x} exceeds {k} variables")
        common &= T
    if ell & ~common:
        raise BadIndex("L must be included in every member of the family")
    head = Star(Star(join_all([atom_term(T, k) for T in fam])))
    if not ell:
        return head
    return Meet(head, meet_all([Var(i + 1) for i in bit_indices(ell)]))


def ib_term(m: int) -> Term:
    """The join of (x_i & the stars of the other variables)* for i = 1..m+1;
    equal to 1 exactly where the variety level is at most m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    parts = []
    for i in range(1, m + 2):
        others = [Star(Var(j)) for j in range(1, m + 2) if j != i]
        parts.append(Star(Meet(Var(i), meet_all(others))))
    return join_all(parts)


def qb_system(n: int) -> tuple[list[tuple[Term, Term]], tuple[Term, Term]]:
    """Premises x_i* = join of the other variables, conclusion join = 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    premises = []
    for i in range(1, n + 1):
        rhs = join_all([Var(j) for j in range(1, n + 1) if j != i])
        premises.append((Star(Var(i)), rhs))
    conclusion = (join_all([Var(i) for i in range(1, n + 1)]), ONE)
    return premises, conclusion
