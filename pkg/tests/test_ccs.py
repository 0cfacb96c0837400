"""Parsing, printing, naming, components, projection, fragment checks."""

from __future__ import annotations

import pytest

from fairlab.labels import parse_label
from fairlab.parser import ParseError, parse_ccs, parse_expression, roundtrips
from fairlab.syntax import (Choice, Fix, Nil, Prefix, check_fragment,
                            component_paths, project, well_named)


def test_label_parsing_and_complement():
    a = parse_label("a")
    assert str(a.complement()) == "'a"
    assert a.complement().complement() == a
    b3 = parse_label("'b#3")
    assert b3.kind == "co" and b3.base == "b" and b3.index == 3
    assert str(parse_label("tau")) == "tau"


def test_parse_recursive_choice():
    spec = parse_ccs("X where X = a.X + b.0")
    root = spec.root
    assert isinstance(root, Fix)
    body = root.spec.body("X")
    assert isinstance(body, Choice)
    assert isinstance(body.left, Prefix) and str(body.left.action) == "a"
    assert isinstance(body.right, Prefix) and str(body.right.action) == "b"
    assert len(spec.name_table) == 2


def test_parse_nil_empty_table():
    spec = parse_ccs("0")
    assert isinstance(spec.root, Nil)
    assert spec.name_table == {}


def test_parse_two_component_spec_names_and_components():
    spec = parse_ccs("(X|Y)\\b where X = a.X + b.0, Y = c.Y + 'b.0")
    assert len(spec.name_table) == 4
    labels = sorted(str(lab) for _, lab in spec.name_table.values())
    assert labels == ["'b", "a", "b", "c"]
    by_label = {str(lab): name for name, (_, lab) in spec.name_table.items()}
    assert spec.cmp_of(by_label["a"]) == "L"
    assert spec.cmp_of(by_label["b"]) == "L"
    assert spec.cmp_of(by_label["c"]) == "R"
    assert spec.cmp_of(by_label["'b"]) == "R"


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_ccs("a.")
    with pytest.raises(ParseError):
        parse_ccs("X")  # unbound variable
    with pytest.raises(ParseError):
        parse_ccs("a.0 +")


def test_name_freshness_counts_prefix_nodes():
    spec = parse_ccs("a.b.0 | a.0 + c.a.0")
    prefix_count = 5
    assert len(spec.name_table) == prefix_count


def test_explicit_name_override():
    spec = parse_ccs("a{mine}.0 | b.0")
    assert "mine" in spec.name_table
    assert spec.cmp_of("mine") == "L"


def test_print_reparse_identity():
    for src in [
        "X where X = a.X + b.0",
        "(X|Y)\\b where X = a.X + b.0, Y = c.Y + 'b.0",
        "a | X where X = a.X",
        "tau.0 + (a.0 | 'a.0)\\a",
        "X where X = b#0.(X[b#i -> b#(i+1)])",
        "X where X = a.X + c.X + b.(X[a -> c, c -> a])",
    ]:
        assert roundtrips(parse_ccs(src)), src


def test_fragment_ok_guarded_recursion():
    assert check_fragment(parse_ccs("X where X = a.X")) == []


def test_fragment_unguarded_variable():
    diags = check_fragment(parse_ccs("X where X = X + a.0"))
    assert len(diags) == 1
    assert "unguarded occurrence of variable X" in diags[0].message


def test_fragment_unguarded_parallel_in_choice():
    # oracle: the guardedness predicate walks choice arms without passing a
    # prefix, so the second summand's parallel is flagged and the first is not
    src = "X where X = a.0 + b.0, Y = c.0"
    assert check_fragment(parse_ccs(src)) == []
    diags = check_fragment(parse_ccs("a.(Y | Z) + (P | Q) where Y = a.Y, Z = a.Z, P = a.P, Q = a.Q"))
    assert [d.message for d in diags] == ["unguarded parallel composition inside a choice"]


def test_fragment_parallel_in_definition():
    diags = check_fragment(parse_ccs("X where X = a.(Y | Y), Y = b.Y"))
    assert any("parallel composition in the definition of X" in d.message for d in diags)


def test_well_named_fresh_and_violation():
    spec = parse_ccs("(X|Y)\\b where X = a.X + b.0, Y = c.Y + 'b.0")
    assert well_named(spec.root)
    bad = parse_expression("a{n}.0 + a{n}.0")
    assert not well_named(bad)


def test_cmp_of_nested_parallel():
    e = parse_expression("a.(P | b.Q) | U")
    names = {str(p.action): p.name for p in
             [n for n in _prefixes(e)]}
    from fairlab.syntax import cmp_table
    table = cmp_table(e)
    assert table[names["a"]] == "L"
    assert table[names["b"]] == "LR"


def _prefixes(e):
    from fairlab.syntax import iter_prefixes
    return list(iter_prefixes(e))


def test_cmp_single_component_is_root():
    spec = parse_ccs("X where X = a.X + b.0")
    assert set(spec.cmp_map.values()) == {""}


def test_cmp_ex_5_1_split():
    spec = parse_ccs("a | X where X = a.X")
    by_cmp = sorted(spec.cmp_map.values())
    assert by_cmp == ["L", "R"]


def test_component_paths_prefix_closed():
    spec = parse_ccs("(a.0 | (b.0 | c.0))\\a")
    paths = component_paths(spec.root)
    assert paths == {"", "L", "R", "RL", "RR"}
    for p in paths:
        assert all(p[:k] in paths for k in range(len(p)))


def test_project_basics():
    spec = parse_ccs("(X|Y)\\b where X = a.X + b.0, Y = c.Y + 'b.0")
    left = project(spec.root, "L")
    assert left is not None and isinstance(left, Fix) and left.var == "X"
    assert project(spec.root, "") is spec.root
    single = parse_ccs("a.0")
    assert project(single.root, "L") is None


def test_duplicated_group_gets_fresh_copies():
    spec = parse_ccs("X | c.X where X = a.b.c.X")
    # 4 source prefixes, but the group is referenced from both arms: 3 + 1 + 3
    assert len(spec.name_table) == 7
    assert well_named(spec.root)
    comps = sorted(set(spec.cmp_map.values()))
    assert comps == ["L", "R"]
