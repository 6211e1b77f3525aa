"""Concrete syntax: parsing, printing, spans."""

import pytest
from hypothesis import given, strategies as st

from conftest import read_corpus

from idt import surface as S


def test_parse_nat_decl_structure():
    decls = S.parse_file(
        "data Nat : Set where\n  Nat => zero\n  Nat => suc (n : Nat)\n"
    )
    assert len(decls) == 1
    d = decls[0]
    assert isinstance(d, S.DataDecl)
    assert d.name == "Nat" and len(d.clauses) == 2
    assert d.clauses[0].ctor.name == "zero"
    assert d.clauses[1].ctor.args[0][0] == "n"


def test_parse_constrained_vec():
    decls = S.parse_file(
        "data Vec (A : Set) [n : Nat] : Set where\n"
        "  Vec A [n = zero] => vnil\n"
        "  Vec A [n = suc m] => vcons (m : Nat) (a : A) (vs : Vec A m)\n"
    )
    d = decls[0]
    assert d.params == (("A", S.ESet(0)),)
    assert len(d.indices) == 1
    con = d.clauses[1]
    pat = con.head.args[1].pat
    assert isinstance(pat, S.IConstraint) and pat.name == "n"
    assert len(con.ctor.args) == 3


def test_parse_empty_file():
    assert S.parse_file("") == []
    assert S.parse_file("\n\n-- just a comment\n") == []


def test_parse_print_roundtrip_corpus():
    for name in ("prelude.idt", "nat_tree_vec.idt", "bad.idt", "vec_computed.idt"):
        text = read_corpus(name)
        decls = S.parse_file(text)
        printed = S.print_file(decls)
        assert S.parse_file(printed) == decls


def test_print_is_right_inverse_on_exprs():
    for src in [
        "\\x. \\y. x",
        "(x : Set) -> (y : x) -> x",
        "(a : Set) * a",
        "{'l, 'r}",
        "[l -> (), r -> ()]",
        "f (g x) y",
        "(pair fst snd)",
        "suc zero == plus m n",
        "(e : Enum {'a})",
        "3",
    ]:
        e = S.parse_expr(src)
        assert S.parse_expr(S.print_expr(e)) == e


def test_syntax_error_span_within_input():
    text = "data Nat : Set where\n  Nat => \n"
    with pytest.raises(S.ParseError) as err:
        S.parse_file(text)
    line, col = err.value.span[0], err.value.span[1]
    lines = text.splitlines() + [""]
    assert 1 <= line <= len(lines) + 1
    assert col >= 1


def test_error_has_expected_tokens():
    with pytest.raises(S.ParseError) as err:
        S.parse_file("data Nat Set where")
    assert err.value.expected


def test_duplicate_tags_rejected_at_elaboration():
    # surface invariant: tag names unique within one enum literal
    from idt.elab import ElabError, Elaborator
    from idt import kernel as K
    from idt import values as V

    with pytest.raises(ElabError) as err:
        Elaborator().check(K.Context(), S.parse_expr("{'a, 'a}"), V.VEnumU())
    assert err.value.kind == "DuplicateTag"


# --- random declaration roundtrip ---------------------------------------------------


names = st.sampled_from(["x", "y", "zz", "foo", "A", "B"])


def expr_strategy():
    leaf = st.one_of(
        st.builds(lambda n: S.EVar(n), names),
        st.just(S.ESet(0)),
        st.just(S.EUnit()),
        st.builds(lambda n: S.ETag(n), st.sampled_from(["t", "u"])),
        st.builds(lambda k: S.ENum(k), st.integers(min_value=0, max_value=9)),
    )
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.builds(lambda a, b: S.EApp(a, b), sub, sub),
            st.builds(lambda n, b: S.ELam(n, b), names, sub),
            st.builds(lambda n, a, b: S.EPi(n, a, b), st.one_of(names, st.just("_")), sub, sub),
            st.builds(lambda a, b: S.EEq(a, b), sub, sub),
            st.builds(lambda ts: S.EEnumLit(tuple(dict.fromkeys(ts))), st.lists(st.sampled_from(["p", "q", "r"]), max_size=3)),
        ),
        max_leaves=10,
    )


@given(expr_strategy())
def test_expr_print_parse_roundtrip_generated(e):
    assert S.parse_expr(S.print_expr(e)) == e


@given(
    st.lists(
        st.tuples(st.sampled_from(["a", "b", "c"]), expr_strategy()), min_size=0, max_size=3
    )
)
def test_data_decl_roundtrip_generated(argspecs):
    # unique argument names to keep the telescope well-formed
    args = tuple((f"x{i}", ty) for i, (_, ty) in enumerate(argspecs))
    d = S.DataDecl(
        "D",
        (("A", S.ESet(0)),),
        (),
        (
            S.Clause(S.HeadPattern("D", (S.PVar("A"),)), S.CtorDecl("mk", args), None),
        ),
        (),
    )
    printed = S.print_decl(d)
    assert S.parse_file(printed) == [d]
