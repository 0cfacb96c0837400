"""The state-shifting conversion and LTL evaluation on lassos."""

from __future__ import annotations

import random

import pytest

from fairlab.corpus import build_all, t_by
from fairlab.lts import from_exploration
from fairlab.ltl import (FormulaError, G,atom, convert_lasso, eval_ltl,
                         implies, ltl_convert, parse_formula,
                         strong_fairness_formula, weak_fairness_formula, F)
from fairlab.parser import parse_ccs
from fairlab.paths import Assumption, Lasso, classify_lasso
from fairlab.semantics import explore
from fairlab.tasks import extract_tasks


def _built(pattern):
    return {b.entry.id: b for b in build_all(pattern)}


def test_convert_two_state_one_transition():
    lts = from_exploration(explore(parse_ccs("a.0")))
    conv = ltl_convert(lts)
    assert len(conv.lts.states) == 2
    assert len(conv.lts.transitions) == 1


def test_convert_ex_5_1_counts():
    lts = _built("ex-5.1*")["ex-5.1-exit-loop"].lts
    conv = ltl_convert(lts)
    assert len(conv.lts.states) == 1 + 3  # one initial plus three transitions


def test_occurs_holds_exactly_at_member_copies():
    lts = _built("ex-5.1*")["ex-5.1-exit-loop"].lts
    lts.tasks["probe"] = extract_tasks(lts, "T")
    conv = ltl_convert(lts)
    for t in lts.transitions:
        for task in extract_tasks(lts, "T").tasks:
            expected = t.id in task.members
            assert conv.holds(f"t/{t.id}", f"occurs:{task.name}") == expected
    init = lts.initial[0]
    assert not any(conv.holds(f"s/{init}", f"occurs:{task.name}")
                   for task in extract_tasks(lts, "T").tasks)


def test_formula_parsing_and_printing():
    f = parse_formula("G(G(enabled:L) -> F(occurs:L))")
    assert str(f) == "G((G(enabled:L) -> F(occurs:L)))"
    assert parse_formula("true").op == "true"
    assert parse_formula("!p & q").op == "and"
    with pytest.raises(FormulaError):
        parse_formula("G(")


def test_g_true_everywhere():
    built = _built("ex-12.2*")["ex-12.2-breakfast"]
    lts = built.lts
    conv = ltl_convert(lts)
    lasso = convert_lasso(conv, Lasso(lts.initial[0], (),
                                      (t_by(lts, source=lts.initial[0], label="b"),)))
    assert eval_ltl(conv, lasso, parse_formula("true"))
    assert eval_ltl(conv, lasso, G(parse_formula("true")))


def test_fairness_formulas_on_mutex_m_cycle():
    # the m-cycle is weakly fair (the L task is enabled only at the recurring
    # initial state, not perpetually) but strongly unfair
    built = _built("ex-4.2-mutex-mem")["ex-4.2-mutex-mem"]
    lts = built.lts
    conv = ltl_convert(lts)
    base = Lasso("init", (), ("m1", "m2", "m3"))
    lasso = convert_lasso(conv, base)
    assert eval_ltl(conv, lasso, weak_fairness_formula(lts.tasks["LM"]))
    assert not eval_ltl(conv, lasso, strong_fairness_formula(lts.tasks["LM"]))
    # both agree with the direct classifier
    assert classify_lasso(lts, base, Assumption("W", "custom", lts.tasks["LM"]))
    assert not classify_lasso(lts, base, Assumption("S", "custom", lts.tasks["LM"]))


def test_fg_gf_equivalence_on_random_lassos():
    # FG p -> GF q is equivalent to G(G p -> F q) over infinite paths
    rng = random.Random(99)
    built = _built("ex-10.1*")["ex-10.1-offset-cycles"]
    lts = built.lts
    lts.tasks.setdefault("probeA", extract_tasks(lts, "A"))
    conv = ltl_convert(lts)
    tasks = extract_tasks(lts, "A").tasks
    checked = 0
    attempts = 0
    while checked < 200 and attempts < 2000:
        attempts += 1
        # random rooted lasso: short stem, then walk back to a seen state
        at = lts.initial[0]
        steps = []
        for _ in range(rng.randint(1, 12)):
            t = rng.choice(lts.outgoing(at))
            steps.append(t.id)
            at = t.target
        visited = [lts.initial[0]]
        for tid in steps:
            visited.append(lts.transition(tid).target)
        try:
            k = visited.index(at)
        except ValueError:
            continue
        if k == len(visited) - 1:
            continue
        lasso = Lasso(lts.initial[0], tuple(steps[:k]), tuple(steps[k:]))
        classo = convert_lasso(conv, lasso)
        task = rng.choice(tasks)
        p, q = atom(f"enabled:{task.name}"), atom(f"occurs:{task.name}")
        lhs = implies(F(G(p)), G(F(q)))
        rhs = G(implies(G(p), F(q)))
        assert eval_ltl(conv, classo, lhs) == eval_ltl(conv, classo, rhs)
        checked += 1
    assert checked == 200


def test_unknown_atom_rejected():
    built = _built("ex-12.2*")["ex-12.2-breakfast"]
    lts = built.lts
    conv = ltl_convert(lts)
    lasso = convert_lasso(conv, Lasso(lts.initial[0], (),
                                      (t_by(lts, source=lts.initial[0], label="b"),)))
    with pytest.raises(FormulaError):
        eval_ltl(conv, lasso, parse_formula("occurs:nonexistent"))


def test_ltl_agreement_with_direct_classification():
    # weak and strong fairness formulas agree with the path classifier
    for pattern in ("ex-5.1*", "ex-5.4*", "ex-5.6*"):
        for built in build_all(pattern):
            lts = built.lts
            conv = ltl_convert(lts)
            from fairlab.verify import rooted_walks, simple_cycles_at
            walks = rooted_walks(lts, 3)
            for entry in sorted(walks):
                start, steps = walks[entry][0]
                for cycle in simple_cycles_at(lts, entry, 4):
                    lasso = Lasso(start, steps, cycle)
                    classo = convert_lasso(conv, lasso)
                    for notion in ("A", "T", "I", "Z", "C", "G"):
                        ts = extract_tasks(lts, notion)
                        lts.tasks.setdefault(f"probe{notion}", ts)
                        direct_w = classify_lasso(lts, lasso, Assumption("W", notion))
                        direct_s = classify_lasso(lts, lasso, Assumption("S", notion))
                        assert direct_w == eval_ltl(conv, classo,
                                                    weak_fairness_formula(ts))
                        assert direct_s == eval_ltl(conv, classo,
                                                    strong_fairness_formula(ts))
