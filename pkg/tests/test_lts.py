"""LTS model: serialization round-trips, goals, concurrency, validators."""

from __future__ import annotations

import pytest

from fairlab.lts import (AnnotationError, GoalSpec, SchemaError, concurrent,
                         from_exploration, goal_states, isomorphic, load_lts,
                         save_lts, validate_side_conditions)
from fairlab.parser import parse_ccs
from fairlab.semantics import explore
from fairlab.syntax import print_expr


MUTEX_JSON = """
{
  "states": [{"id": "init"}, {"id": "l2"}, {"id": "l3"},
             {"id": "m2"}, {"id": "m3"}],
  "transitions": [
    {"id": "l1", "source": "init", "target": "l2", "label": "a", "comp": ["L", "M"], "blocking": true},
    {"id": "l2t", "source": "l2", "target": "l3", "label": "b", "comp": ["L"], "blocking": true},
    {"id": "l3t", "source": "l3", "target": "init", "label": "c", "comp": ["L", "M"], "blocking": true},
    {"id": "m1", "source": "init", "target": "m2", "label": "d", "comp": ["R", "M"], "blocking": true},
    {"id": "m2t", "source": "m2", "target": "m3", "label": "e", "comp": ["R"], "blocking": true},
    {"id": "m3t", "source": "m3", "target": "init", "label": "f", "comp": ["R", "M"], "blocking": true}
  ],
  "initial": ["init"],
  "goals": {"critical": {"disjuncts": [{"kind": "explicit", "states": ["l2"]}]}},
  "tasks": {"LM": {"notion": "custom", "tasks": [
      {"name": "L", "members": ["l1", "l2t", "l3t"]},
      {"name": "M", "members": ["m1", "m2t", "m3t"]}]}},
  "origin": "handwritten",
  "truncated": false
}
"""


def test_load_mutex_tasks():
    lts = load_lts(MUTEX_JSON)
    ts = lts.tasks["LM"]
    assert ts.get("L").members == {"l1", "l2t", "l3t"}
    assert ts.get("M").members == {"m1", "m2t", "m3t"}


def test_load_minimal_system():
    lts = load_lts('{"states": [{"id": "s"}], "transitions": [], "initial": ["s"]}')
    assert lts.state_ids() == ["s"]


def test_load_rejects_dangling_task_member():
    bad = MUTEX_JSON.replace('"members": ["l1", "l2t", "l3t"]',
                             '"members": ["l1", "nope"]')
    with pytest.raises(SchemaError):
        load_lts(bad)


def test_load_rejects_dangling_endpoint():
    with pytest.raises(SchemaError):
        load_lts('{"states": [{"id": "s"}], "transitions": '
                 '[{"id": "t", "source": "s", "target": "gone", "label": "a"}], '
                 '"initial": ["s"]}')


def test_roundtrip_ex_5_1():
    lts = from_exploration(explore(parse_ccs("a | X where X = a.X")))
    again = load_lts(save_lts(lts))
    assert isomorphic(lts, again)


def test_roundtrip_mutex_preserves_tasks():
    lts = load_lts(MUTEX_JSON)
    again = load_lts(save_lts(lts))
    assert isomorphic(lts, again)
    assert again.tasks["LM"].get("L").members == {"l1", "l2t", "l3t"}


def test_roundtrip_truncated_flag():
    rep = explore(parse_ccs("a | X where X = b#0.(X[b#i -> b#(i+1)])"), state_cap=10)
    lts = from_exploration(rep)
    assert load_lts(save_lts(lts)).truncated


def test_goal_component_at_ex_5_1():
    lts = from_exploration(explore(parse_ccs("a | X where X = a.X")))
    hit = goal_states(lts, GoalSpec.component_at("L", "0"))
    assert len(hit) == 1
    (sid,) = hit
    assert lts.state(sid).expr.startswith("0 |")


def test_goal_state_is_initial():
    spec = parse_ccs("a | X where X = a.X")
    lts = from_exploration(explore(spec))
    hit = goal_states(lts, GoalSpec.state_is(print_expr(spec.root)))
    assert hit == frozenset(lts.initial)


def test_goal_monotone_in_disjuncts():
    lts = from_exploration(explore(parse_ccs("a | X where X = a.X")))
    one = GoalSpec.component_at("L", "0")
    both = GoalSpec(one.disjuncts + GoalSpec.state_is(lts.state(lts.initial[0]).expr).disjuncts)
    assert goal_states(lts, one) <= goal_states(lts, both)


def test_concurrent_reflexive_complement_and_symmetry():
    lts = from_exploration(explore(parse_ccs("X | c.0 where X = b.X")))
    for t in lts.transitions:
        assert not concurrent(lts, t.id, t.id)
        for u in lts.transitions:
            assert concurrent(lts, t.id, u.id) == concurrent(lts, u.id, t.id)


def test_concurrent_ex_12_2():
    lts = from_exploration(explore(parse_ccs("X | c.0 where X = b.X")))
    b_loop = next(t.id for t in lts.transitions
                  if str(t.label) == "b" and t.source == lts.initial[0])
    c_step = next(t.id for t in lts.transitions if str(t.label) == "c")
    assert concurrent(lts, b_loop, c_step)


def test_concurrent_ex_5_1_exit_vs_loop():
    # component sets from the two-occurrence split: {L} against {R}
    lts = from_exploration(explore(parse_ccs("a | X where X = a.X")))
    exit_ = next(t.id for t in lts.transitions if t.comp == frozenset({"L"}))
    loop = next(t.id for t in lts.transitions if t.comp == frozenset({"R"}))
    assert concurrent(lts, exit_, loop)


def test_tau_synchronisation_components_incomparable():
    for src in ["(X|Y)\\b where X = a.X + b.0, Y = c.Y + 'b.0",
                "X | Y where X = a.X + b.X, Y = a.Y + 'b.Y"]:
        lts = from_exploration(explore(parse_ccs(src)))
        for t in lts.transitions:
            if t.label.is_tau and t.instr and len(t.instr) == 2:
                a_, b = sorted(t.comp)
                assert len(t.comp) == 2
                assert not a_.startswith(b) and not b.startswith(a_)


def test_side_conditions_pass_on_ccs_systems():
    for src in ["a | X where X = a.X",
                "X | Y where X = a.X + b.X, Y = a.Y + 'b.Y",
                "(X|Y)\\b where X = a.X + b.0, Y = c.Y + 'b.0",
                "X | Y where X = a.b.c.X, Y = c.a.b.Y"]:
        lts = from_exploration(explore(parse_ccs(src)))
        for report in validate_side_conditions(lts):
            assert report.checked, (src, report)
            assert report.holds, (src, report)


def test_side_condition_3_fails_on_bad_comp():
    doc = ('{"states": [{"id": "s"}], "transitions": ['
           '{"id": "t", "source": "s", "target": "s", "label": "a", '
           '"instr": ["i"], "comp": ["L", "R"]}], "initial": ["s"]}')
    lts = load_lts(doc)
    by_name = {r.name: r for r in validate_side_conditions(lts)}
    r3 = by_name["(3) comp images of cmp"]
    assert r3.checked and not r3.holds


def test_goal_component_at_needs_expressions():
    lts = load_lts(MUTEX_JSON)
    with pytest.raises(AnnotationError):
        goal_states(lts, GoalSpec.component_at("L", "0"))
