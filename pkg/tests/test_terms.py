import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from palgebra import (
    BadIndex,
    Join,
    Meet,
    ONE,
    ParseError,
    Star,
    UnknownIdentifier,
    Var,
    ZERO,
    atom_term,
    build_si,
    evaluate,
    ib_term,
    jirr_term,
    join_all,
    max_var,
    meet_all,
    parse,
    qb_system,
    term_from_json,
    term_to_json,
    to_text,
    vars_of,
)
from palgebra.errors import UnboundVariable
from palgebra.terms import compile_postfix, eval_postfix


def terms(max_depth=5, k=3):
    leaf = st.sampled_from([ZERO, ONE] + [Var(i) for i in range(1, k + 1)])
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            sub.map(Star),
            st.tuples(sub, sub).map(lambda p: Meet(*p)),
            st.tuples(sub, sub).map(lambda p: Join(*p)),
        ),
        max_leaves=2 ** max_depth,
    )


class TestParse:
    def test_precedence(self):
        assert parse("x1 | x2 & x3") == Join(Var(1), Meet(Var(2), Var(3)))
        assert parse("x1 & x2 | x3") == Join(Meet(Var(1), Var(2)), Var(3))
        assert parse("x1 & x2*") == Meet(Var(1), Star(Var(2)))
        assert parse("(x1 & x2)*") == Star(Meet(Var(1), Var(2)))
        assert parse("x1**") == Star(Star(Var(1)))

    def test_left_associativity(self):
        assert parse("x1 | x2 | x3") == Join(Join(Var(1), Var(2)), Var(3))
        assert parse("x1 & x2 & x3") == Meet(Meet(Var(1), Var(2)), Var(3))

    def test_constants(self):
        assert parse("0") is ZERO
        assert parse("1") is ONE
        assert parse("0*") == Star(ZERO)

    def test_whitespace(self):
        assert parse("  x1|x2  ") == parse("x1 | x2")

    def test_error_positions(self):
        with pytest.raises(ParseError) as e:
            parse("x1 &")
        assert e.value.pos == 4
        with pytest.raises(ParseError):
            parse("(x1")
        with pytest.raises(ParseError):
            parse("x1 x2")
        with pytest.raises(ParseError):
            parse("")

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifier):
            parse("y1")
        with pytest.raises(UnknownIdentifier):
            parse("x0")

    @given(terms())
    @settings(max_examples=200)
    def test_print_parse_round_trip(self, t):
        assert parse(to_text(t)) == t

    @given(terms())
    def test_pretty_print_round_trip(self, t):
        assert parse(to_text(t, pretty=True)) == t


class TestJson:
    @given(terms())
    def test_round_trip(self, t):
        assert term_from_json(term_to_json(t)) == t

    def test_shapes(self):
        assert term_to_json(ZERO) == ["zero"]
        assert term_to_json(Star(Var(2))) == ["star", ["var", 2]]
        assert term_to_json(Meet(ONE, ZERO)) == ["meet", ["one"], ["zero"]]

    def test_bad_json(self):
        with pytest.raises(ParseError):
            term_from_json(["quux"])


class TestEval:
    def test_on_si(self):
        B = build_si(2)
        val = {1: 1, 2: 2}
        assert evaluate(parse("x1 | x2"), B, val) == 3
        assert evaluate(parse("x1*"), B, val) == 2
        assert evaluate(parse("(x1 & x2)*"), B, val) == B.one
        assert evaluate(ONE, B, {}) == B.one

    def test_unbound(self):
        with pytest.raises(UnboundVariable):
            evaluate(Var(3), build_si(1), {1: 0})

    @given(terms(), st.integers(0, 3), st.data())
    @settings(max_examples=100)
    def test_postfix_matches_recursive_shape(self, t, n, data):
        # the compiled program and a direct recursive evaluation agree
        B = build_si(n)
        val = {i: data.draw(st.integers(0, B.size - 1)) for i in range(1, 4)}

        def rec(u):
            if u is ZERO or isinstance(u, type(ZERO)):
                return B.zero
            if u is ONE or isinstance(u, type(ONE)):
                return B.one
            if isinstance(u, Var):
                return val[u.index]
            if isinstance(u, Star):
                return B.star(rec(u.arg))
            if isinstance(u, Meet):
                return B.meet(rec(u.left), rec(u.right))
            return B.join(rec(u.left), rec(u.right))

        assert eval_postfix(compile_postfix(t), B, val) == rec(t)

    def test_deep_term_no_recursion_error(self):
        t = Var(1)
        for _ in range(5000):
            t = Star(t)
        code = compile_postfix(t)
        B = build_si(1)
        assert eval_postfix(code, B, {1: 1}) in range(B.size)


class TestHelpers:
    def test_vars_and_max(self):
        t = parse("x3 & (x1 | x3)*")
        assert vars_of(t) == (1, 3)
        assert max_var(t) == 3
        assert max_var(ONE) == 0

    def test_meet_join_all(self):
        assert meet_all([]) is ONE
        assert join_all([]) is ZERO
        assert meet_all([Var(1)]) == Var(1)
        B = build_si(2)
        xs = [Var(1), Var(2), Star(Var(1))]
        val = {1: 1, 2: 2}
        assert evaluate(meet_all(xs), B, val) == 0
        assert evaluate(join_all(xs), B, val) == 3


class TestSchemes:
    def test_atom_term(self):
        # T = {1} over k=2: x1 & x2*
        assert atom_term(0b01, 2) == Meet(Var(1), Star(Var(2)))
        assert atom_term(0b00, 1) == Star(Var(1))
        with pytest.raises(BadIndex):
            atom_term(0b100, 2)

    def test_jirr_term_validation(self):
        with pytest.raises(BadIndex):
            jirr_term((), 0, 2)  # empty family
        with pytest.raises(BadIndex):
            jirr_term((0b01,), 0b10, 2)  # L outside the intersection
        t = jirr_term((0b01, 0b11), 0b01, 2)
        assert max_var(t) == 2

    def test_jirr_term_atom_case_evaluates_like_atom(self):
        B = build_si(2)
        for val in ({1: a, 2: b} for a in range(5) for b in range(5)):
            lhs = evaluate(jirr_term((0b10,), 0b10, 2), B, val)
            ref = evaluate(Meet(Star(Star(atom_term(0b10, 2))), Var(2)), B, val)
            assert lhs == ref

    def test_ib_term_vars(self):
        assert max_var(ib_term(1)) == 2
        assert max_var(ib_term(3)) == 4
        with pytest.raises(ValueError):
            ib_term(0)

    def test_qb_system_shape(self):
        premises, conclusion = qb_system(3)
        assert len(premises) == 3
        lhs, rhs = premises[0]
        assert lhs == Star(Var(1))
        assert vars_of(rhs) == (2, 3)
        assert conclusion[1] is ONE
        assert vars_of(conclusion[0]) == (1, 2, 3)

    def test_qb_system_minimum(self):
        premises, conclusion = qb_system(1)
        assert len(premises) == 1
        with pytest.raises(ValueError):
            qb_system(0)
