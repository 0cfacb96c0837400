"""Operational semantics: derive augmented transitions and explore state spaces.

States are identified by the canonical print of the named closed expression;
fix bodies are not unfolded for printing.  Each derived transition carries
the instruction name(s) threaded through its derivation (one name for a
prefix firing, two for a handshake) and the component set computed from the
innermost parallel arms of those instructions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .labels import ActionLabel, TAU
from .syntax import (Choice, Expr, Fix, Nil, Par, Prefix, ProcessSpec, Relabel,
                     Restrict, Var, print_expr)


class SemanticsError(ValueError):
    pass


@dataclass(frozen=True)
class Step:
    """One derivable transition of an expression, before id assignment."""

    label: ActionLabel
    instr: frozenset[str]
    target: Expr

    def key(self) -> tuple[str, tuple[str, ...], str]:
        return (str(self.label), tuple(sorted(self.instr)), print_expr(self.target))


def _subst_fix(body: Expr, spec) -> Expr:
    """Replace the host group's variables by their fix terms (one unfolding)."""
    dom = set(spec.domain())

    def sub(e: Expr) -> Expr:
        if isinstance(e, Var):
            return Fix(e.x, spec) if e.x in dom else e
        if isinstance(e, Prefix):
            return Prefix(e.action, e.name, sub(e.body))
        if isinstance(e, Choice):
            return Choice(sub(e.left), sub(e.right))
        if isinstance(e, Par):
            return Par(sub(e.left), sub(e.right))
        if isinstance(e, Restrict):
            return Restrict(sub(e.body), e.name)
        if isinstance(e, Relabel):
            return Relabel(sub(e.body), e.fn)
        if isinstance(e, Fix):
            if dom & set(e.spec.domain()):
                return e  # inner group shadows; its spec was closed already
            return Fix(e.var, type(e.spec)(tuple((v, sub(b)) for v, b in e.spec.bindings)))
        return e

    return sub(body)


def step(state: Expr) -> list[Step]:
    """All transitions derivable from a closed expression, deterministically
    ordered by (label, instruction set, target print).  Stuck states give []."""
    out: dict[tuple, Step] = {}
    for s in _step(state, 0):
        out.setdefault(s.key(), s)
    return [out[k] for k in sorted(out)]


def _step(e: Expr, depth: int) -> list[Step]:
    if depth > 4096:
        raise SemanticsError("unguarded recursion: derivation does not terminate")
    if isinstance(e, (Nil, Var)):
        if isinstance(e, Var):
            raise SemanticsError(f"cannot step open expression (free {e.x})")
        return []
    if isinstance(e, Prefix):
        return [Step(e.action, frozenset([e.name]), e.body)]
    if isinstance(e, Choice):
        return _step(e.left, depth) + _step(e.right, depth)
    if isinstance(e, Par):
        left = _step(e.left, depth)
        right = _step(e.right, depth)
        out = [Step(s.label, s.instr, Par(s.target, e.right)) for s in left]
        out += [Step(s.label, s.instr, Par(e.left, s.target)) for s in right]
        for ls in left:
            if ls.label.is_tau:
                continue
            comp = ls.label.complement()
            for rs in right:
                if rs.label == comp:
                    out.append(Step(TAU, ls.instr | rs.instr, Par(ls.target, rs.target)))
        return out
    if isinstance(e, Restrict):
        return [Step(s.label, s.instr, Restrict(s.target, e.name))
                for s in _step(e.body, depth)
                if s.label.is_tau or s.label.base != e.name]
    if isinstance(e, Relabel):
        return [Step(e.fn.apply(s.label), s.instr, Relabel(s.target, e.fn))
                for s in _step(e.body, depth)]
    if isinstance(e, Fix):
        return _step(_subst_fix(e.spec.body(e.var), e.spec), depth + 1)
    raise TypeError(f"unknown node {e!r}")


@dataclass
class ExploredState:
    id: str
    expr: Expr
    key: str


@dataclass
class ExploredTransition:
    id: str
    source: str
    target: str
    label: ActionLabel
    instr: frozenset[str]
    comp: frozenset[str]
    blocking: bool


@dataclass
class ExplorationReport:
    """Breadth-first closure of step from the root, possibly truncated."""

    spec: ProcessSpec
    states: list[ExploredState]
    transitions: list[ExploredTransition]
    initial: str
    truncated: bool
    state_cap: int
    depth_cap: int
    by_key: dict[str, str] = field(default_factory=dict)


def explore(spec: ProcessSpec, state_cap: int = 512, depth_cap: int = 256) -> ExplorationReport:
    """Explore the reachable state space, identifying states by canonical print.

    Stops at either cap; `truncated` is set iff some discovered state was left
    unexpanded or an expansion target was not admitted.  State and transition
    ids are assigned in discovery order and are stable across runs.
    """
    if state_cap < 1 or depth_cap < 1:
        raise ValueError("caps must be at least 1")
    root = spec.root
    states: list[ExploredState] = []
    transitions: list[ExploredTransition] = []
    by_key: dict[str, str] = {}
    truncated = False

    def admit(e: Expr) -> str | None:
        nonlocal truncated
        key = print_expr(e)
        if key in by_key:
            return by_key[key]
        if len(states) >= state_cap:
            truncated = True
            return None
        sid = f"s{len(states)}"
        by_key[key] = sid
        states.append(ExploredState(sid, e, key))
        return sid

    root_id = admit(root)
    assert root_id is not None
    frontier: list[tuple[str, Expr, int]] = [(root_id, root, 0)]
    expanded: set[str] = set()
    while frontier:
        next_frontier: list[tuple[str, Expr, int]] = []
        for sid, expr, depth in frontier:
            if sid in expanded:
                continue
            if depth >= depth_cap:
                truncated = True
                continue
            expanded.add(sid)
            for s in step(expr):
                tid = admit(s.target)
                if tid is None:
                    continue
                comp = frozenset(spec.cmp_of(i) for i in s.instr)
                blocking = (not s.label.is_tau) and s.label.base not in spec.nonblocking
                transitions.append(ExploredTransition(
                    f"t{len(transitions)}", sid, tid, s.label, s.instr, comp, blocking))
                if tid not in expanded:
                    next_frontier.append((tid, s.target, depth + 1))
        frontier = next_frontier
    if len(expanded) < len(states):
        truncated = True
    return ExplorationReport(spec, states, transitions, root_id, truncated,
                             state_cap, depth_cap, by_key)


def unique_synchronisation_check(report) -> bool:
    """At most one outgoing transition per (state, instruction set).

    Accepts an ExplorationReport or anything exposing `.transitions` with
    source/instr fields.
    """
    seen: set[tuple[str, frozenset[str]]] = set()
    for t in report.transitions:
        instr = t.instr if t.instr is not None else frozenset()
        key = (t.source, frozenset(instr))
        if key in seen:
            return False
        seen.add(key)
    return True
