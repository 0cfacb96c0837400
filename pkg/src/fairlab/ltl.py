"""Linear-time temporal logic over converted transition systems.

Transition-based propositions (such as task occurrence) are shifted onto
states by a partial unfolding: the converted system has one state per
initial state plus one per transition, so a proposition about a transition
can live on that transition's copy without ambiguity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lts import AugmentedLTS, State, TaskSet, Transition
from .paths import Lasso, PathError, enabled
from .labels import TAU


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Formula:
    op: str  # atom not and or implies F G true false
    atom: str = ""
    left: "Formula | None" = None
    right: "Formula | None" = None

    def __str__(self) -> str:
        if self.op in ("true", "false"):
            return self.op
        if self.op == "atom":
            return self.atom
        if self.op == "not":
            return f"!{self.left}"
        if self.op in ("F", "G"):
            return f"{self.op}({self.left})"
        sym = {"and": "&", "or": "|", "implies": "->"}[self.op]
        return f"({self.left} {sym} {self.right})"


def atom(name: str) -> Formula:
    return Formula("atom", atom=name)


def true() -> Formula:
    return Formula("true")


def neg(f: Formula) -> Formula:
    return Formula("not", left=f)


def conj(*fs: Formula) -> Formula:
    out = fs[0] if fs else true()
    for f in fs[1:]:
        out = Formula("and", left=out, right=f)
    return out


def disj(a_: Formula, b: Formula) -> Formula:
    return Formula("or", left=a_, right=b)


def implies(a_: Formula, b: Formula) -> Formula:
    return Formula("implies", left=a_, right=b)


def F(f: Formula) -> Formula:  # noqa: N802 - LTL operator names
    return Formula("F", left=f)


def G(f: Formula) -> Formula:  # noqa: N802
    return Formula("G", left=f)


def parse_formula(text: str) -> Formula:
    """Grammar: p | !f | f & g | f "|" g | f -> g | F f | G f | (f) | true |
    false, with atoms of the shape name(argument) or bare identifiers."""
    tokens = _tokenize(text)
    pos = 0

    def peek() -> str:
        return tokens[pos] if pos < len(tokens) else ""

    def eat(tok: str) -> None:
        nonlocal pos
        if peek() != tok:
            raise FormulaError(f"expected {tok!r}, found {peek() or 'end'!r}")
        pos += 1

    def parse_implies() -> Formula:
        left = parse_or()
        if peek() == "->":
            eat("->")
            return implies(left, parse_implies())
        return left

    def parse_or() -> Formula:
        left = parse_and()
        while peek() == "|":
            eat("|")
            left = disj(left, parse_and())
        return left

    def parse_and() -> Formula:
        left = parse_unary()
        while peek() == "&":
            eat("&")
            left = Formula("and", left=left, right=parse_unary())
        return left

    def parse_unary() -> Formula:
        nonlocal pos
        t = peek()
        if t == "!":
            eat("!")
            return neg(parse_unary())
        if t in ("F", "G"):
            pos += 1
            return Formula(t, left=parse_unary())
        if t == "(":
            eat("(")
            f = parse_implies()
            eat(")")
            return f
        if t == "true":
            pos += 1
            return true()
        if t == "false":
            pos += 1
            return Formula("false")
        if t and t not in ("&", "|", "->", ")", "!"):
            pos += 1
            return atom(t)
        raise FormulaError(f"unexpected {t or 'end of formula'!r}")

    f = parse_implies()
    if pos != len(tokens):
        raise FormulaError(f"trailing input {tokens[pos]!r}")
    return f


def _tokenize(text: str) -> list[str]:
    out: list[str] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if text.startswith("->", i):
            out.append("->")
            i += 2
            continue
        if c in "!&|()":
            out.append(c)
            i += 1
            continue
        if c in ("F", "G") and (i + 1 >= n or not (text[i + 1].isalnum() or text[i + 1] in "_:(")):
            out.append(c)
            i += 1
            continue
        if c in ("F", "G") and i + 1 < n and text[i + 1] == "(":
            out.append(c)
            i += 1
            continue
        j = i
        depth = 0
        while j < n:
            ch = text[j]
            if ch == "(":
                depth += 1
            elif ch == ")":
                if depth == 0:
                    break
                depth -= 1
            elif depth == 0 and (ch.isspace() or ch in "!&|" or text.startswith("->", j)):
                break
            j += 1
        out.append(text[i:j])
        i = j
    return out


# ---------------------------------------------------------------------------
# The state-shifting conversion.
# ---------------------------------------------------------------------------

@dataclass
class ConvertedLTS:
    """States are the initial states plus the transitions of the input."""

    base: AugmentedLTS
    lts: AugmentedLTS

    def holds(self, converted_state: str, prop: str) -> bool:
        """Atomic proposition validity on a converted state.

        State props (enabled:TASK, goal-set membership via explicit ids) are
        read off the underlying target state; occurs:TASK holds exactly at
        converted states that are transitions in the task.
        """
        kind, _, arg = prop.partition(":")
        base = self.base
        is_transition = converted_state.startswith("t/")
        underlying = converted_state[2:]
        if kind == "occurs":
            if not is_transition:
                return False
            task = self._task(arg)
            return underlying in task.members
        if kind == "enabled":
            task = self._task(arg)
            state = base.transition(underlying).target if is_transition else underlying
            return enabled(base, task, state)
        if kind == "state":
            state = base.transition(underlying).target if is_transition else underlying
            return state == arg
        raise FormulaError(f"unknown atomic proposition {prop!r}")

    def _task(self, name: str):
        for ts in self.base.tasks.values():
            for t in ts.tasks:
                if t.name == name:
                    return t
        notion = name.partition(":")[0]
        if notion in ("A", "T", "I", "Z", "C", "G"):
            from .lts import AnnotationError
            from .tasks import extract_tasks
            try:
                return extract_tasks(self.base, notion).get(name)
            except (KeyError, AnnotationError):
                pass
        raise FormulaError(f"unknown task {name!r} in atomic proposition")


def ltl_convert(lts: AugmentedLTS) -> ConvertedLTS:
    """Partial unfolding: S' = I + Tr, with an edge from x to u whenever u can
    be taken right after x."""
    states = [State(f"s/{s}", None) for s in lts.initial]
    states += [State(f"t/{t.id}", None) for t in lts.transitions]
    transitions = []
    for t in lts.transitions:
        if t.source in lts.initial:
            transitions.append(Transition(f"c/{t.source}/{t.id}", f"s/{t.source}",
                                          f"t/{t.id}", TAU, None, None, False))
    for t in lts.transitions:
        for u in lts.transitions:
            if t.target == u.source:
                transitions.append(Transition(f"c/{t.id}/{u.id}", f"t/{t.id}",
                                              f"t/{u.id}", TAU, None, None, False))
    converted = AugmentedLTS(states, transitions, [f"s/{s}" for s in lts.initial],
                             origin="handwritten", truncated=lts.truncated)
    return ConvertedLTS(lts, converted)


def convert_lasso(conv: ConvertedLTS, lasso: Lasso) -> Lasso:
    """Image of a rooted lasso of the base system inside the converted system.

    The image's cycle runs over the copies of the base cycle's transitions,
    and the image's stem gains one edge (into the first cycle copy).
    """
    lasso.validate(conv.base)
    if lasso.start not in conv.base.initial:
        raise PathError("only rooted lassos exist in the converted system")
    chain = [f"s/{lasso.start}"] + [f"t/{t}" for t in lasso.stem] + [f"t/{lasso.cycle[0]}"]
    stem_edges = tuple(f"c/{a[2:]}/{b[2:]}" for a, b in zip(chain, chain[1:]))
    cyc_nodes = [f"t/{t}" for t in lasso.cycle]
    cycle_edges = tuple(f"c/{a[2:]}/{b[2:]}"
                        for a, b in zip(cyc_nodes, cyc_nodes[1:] + cyc_nodes[:1]))
    return Lasso(start=f"s/{lasso.start}", stem=stem_edges, cycle=cycle_edges)


def eval_ltl(conv: ConvertedLTS, lasso: Lasso, formula: Formula) -> bool:
    """Satisfaction on the infinite path denoted by a converted-system lasso,
    computed over its finitely many suffix classes."""
    lasso.validate(conv.lts)
    # suffix classes: one per stem position, one per cycle position
    stem_states = [lasso.start]
    for tid in lasso.stem:
        stem_states.append(conv.lts.transition(tid).target)
    entry = stem_states[-1]
    cyc_states = [entry]
    for tid in lasso.cycle[:-1]:
        cyc_states.append(conv.lts.transition(tid).target)
    classes = [("s", i) for i in range(len(lasso.stem))] + \
              [("c", j) for j in range(len(lasso.cycle))]
    state_of = {("s", i): stem_states[i] for i in range(len(lasso.stem))}
    state_of.update({("c", j): cyc_states[j] for j in range(len(lasso.cycle))})

    def nxt(cls):
        tag, k = cls
        if tag == "s":
            return ("s", k + 1) if k + 1 < len(lasso.stem) else ("c", 0)
        return ("c", (k + 1) % len(lasso.cycle))

    reach: dict[tuple, set[tuple]] = {}
    for cls in classes:
        seen = {cls}
        cur = cls
        while True:
            cur = nxt(cur)
            if cur in seen:
                break
            seen.add(cur)
        reach[cls] = seen

    def sat(f: Formula) -> dict[tuple, bool]:
        if f.op == "true":
            return {c: True for c in classes}
        if f.op == "false":
            return {c: False for c in classes}
        if f.op == "atom":
            return {c: conv.holds(state_of[c], f.atom) for c in classes}
        if f.op == "not":
            inner = sat(f.left)
            return {c: not inner[c] for c in classes}
        if f.op == "and":
            a_, b = sat(f.left), sat(f.right)
            return {c: a_[c] and b[c] for c in classes}
        if f.op == "or":
            a_, b = sat(f.left), sat(f.right)
            return {c: a_[c] or b[c] for c in classes}
        if f.op == "implies":
            a_, b = sat(f.left), sat(f.right)
            return {c: (not a_[c]) or b[c] for c in classes}
        if f.op == "F":
            inner = sat(f.left)
            return {c: any(inner[d] for d in reach[c]) for c in classes}
        if f.op == "G":
            inner = sat(f.left)
            return {c: all(inner[d] for d in reach[c]) for c in classes}
        raise FormulaError(f"unknown operator {f.op}")

    start_class = ("s", 0) if lasso.stem else ("c", 0)
    return sat(formula)[start_class]


def weak_fairness_formula(ts: TaskSet) -> Formula:
    """The conjunction over tasks of G(G enabled -> F occurs)."""
    parts = [G(implies(G(atom(f"enabled:{t.name}")), F(atom(f"occurs:{t.name}"))))
             for t in ts.tasks]
    return conj(*parts) if parts else true()


def strong_fairness_formula(ts: TaskSet) -> Formula:
    """The conjunction over tasks of GF enabled -> GF occurs."""
    parts = [implies(G(F(atom(f"enabled:{t.name}"))), G(F(atom(f"occurs:{t.name}"))))
             for t in ts.tasks]
    return conj(*parts) if parts else true()
