"""Abstract syntax for the CCS fragment.

Expressions carry per-occurrence instruction names on action prefixes; the
canonical printer always prints them, so the printed form of a closed
expression is a faithful state key.  Component paths are words over {L, R}
addressing the arms of parallel compositions (empty word = whole system).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .labels import ActionLabel, RelabelFn


class SyntaxError_(ValueError):
    """Raised for structurally ill-formed expressions."""


Span = tuple[int, int]  # (line, column), 1-based


@dataclass(frozen=True)
class Expr:
    span: Span | None = field(default=None, compare=False, kw_only=True)


@dataclass(frozen=True)
class Nil(Expr):
    pass


@dataclass(frozen=True)
class Prefix(Expr):
    action: ActionLabel
    name: str  # instruction name of this occurrence
    body: "Expr"


@dataclass(frozen=True)
class Choice(Expr):
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Par(Expr):
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Restrict(Expr):
    body: "Expr"
    name: str  # restricted base name; blocks all indices of the base


@dataclass(frozen=True)
class Relabel(Expr):
    body: "Expr"
    fn: RelabelFn


@dataclass(frozen=True)
class Var(Expr):
    x: str


@dataclass(frozen=True)
class RecSpec:
    """A finite group of recursive definitions, in declaration order."""

    bindings: tuple[tuple[str, "Expr"], ...]

    def domain(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.bindings)

    def body(self, var: str) -> "Expr":
        for v, b in self.bindings:
            if v == var:
                return b
        raise KeyError(var)


@dataclass(frozen=True)
class Fix(Expr):
    var: str
    spec: RecSpec

    def __post_init__(self) -> None:
        if self.var not in self.spec.domain():
            raise SyntaxError_(f"fix variable {self.var!r} not defined in its group")


# ---------------------------------------------------------------------------
# Canonical printing.  Precedence, loosest to tightest: | , + , prefix-dot;
# postfix \a and [f] bind tighter than the dot and apply to the nearest atom.
# ---------------------------------------------------------------------------

_PREC_PAR, _PREC_CHOICE, _PREC_PREFIX, _PREC_ATOM = 0, 1, 2, 3


def _prn(e: Expr, prec: int) -> str:
    if isinstance(e, Nil):
        return "0"
    if isinstance(e, Var):
        return e.x
    if isinstance(e, Prefix):
        s = f"{e.action}{{{e.name}}}.{_prn(e.body, _PREC_PREFIX)}"
        return f"({s})" if prec > _PREC_PREFIX else s
    if isinstance(e, Choice):
        s = f"{_prn(e.left, _PREC_CHOICE)} + {_prn(e.right, _PREC_CHOICE + 1)}"
        return f"({s})" if prec > _PREC_CHOICE else s
    if isinstance(e, Par):
        s = f"{_prn(e.left, _PREC_PAR)} | {_prn(e.right, _PREC_PAR + 1)}"
        return f"({s})" if prec > _PREC_PAR else s
    if isinstance(e, Restrict):
        return f"{_prn(e.body, _PREC_ATOM)}\\{e.name}"
    if isinstance(e, Relabel):
        return f"{_prn(e.body, _PREC_ATOM)}{e.fn}"
    if isinstance(e, Fix):
        defs = ", ".join(f"{v} = {_prn(b, _PREC_PAR)}" for v, b in e.spec.bindings)
        return f"({e.var} where {defs})"
    raise TypeError(f"unknown node {e!r}")


def print_expr(e: Expr) -> str:
    """Canonical text of a named expression; parses back to an equal AST."""
    return _prn(e, _PREC_PAR)


# ---------------------------------------------------------------------------
# Traversal helpers.
# ---------------------------------------------------------------------------

def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Choice, Par)):
        return (e.left, e.right)
    if isinstance(e, Prefix):
        return (e.body,)
    if isinstance(e, (Restrict, Relabel)):
        return (e.body,)
    return ()


def iter_prefixes(e: Expr):
    """All action-prefix occurrences of e, in textual order (fix bodies included)."""
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Prefix):
            yield n
            stack.append(n.body)
        elif isinstance(n, (Choice, Par)):
            stack.extend((n.right, n.left))
        elif isinstance(n, (Restrict, Relabel)):
            stack.append(n.body)
        elif isinstance(n, Fix):
            for _, b in reversed(n.spec.bindings):
                stack.append(b)


def all_names(e: Expr) -> set[str]:
    """n(E): instruction names of all action occurrences in E."""
    return {p.name for p in iter_prefixes(e)}


def free_vars(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.x}
    if isinstance(e, Fix):
        out: set[str] = set()
        for _, b in e.spec.bindings:
            out |= free_vars(b)
        return out - set(e.spec.domain())
    out = set()
    for c in children(e):
        out |= free_vars(c)
    return out


def is_closed(e: Expr) -> bool:
    return not free_vars(e)


# ---------------------------------------------------------------------------
# Unguarded occurrences and well-namedness.
# ---------------------------------------------------------------------------

def _unguarded_var_names(e: Expr) -> set[str]:
    """Process variables with an unguarded occurrence in e (prefix bodies skipped)."""
    if isinstance(e, Var):
        return {e.x}
    if isinstance(e, Prefix):
        return set()
    if isinstance(e, Fix):
        return _fix_unguarded(e)[1]
    out: set[str] = set()
    for c in children(e):
        out |= _unguarded_var_names(c)
    return out


def _fix_unguarded(e: Fix) -> tuple[list[str], set[str]]:
    """Bodies of e's group that are unguarded-reachable from e.var, and the
    free variables still unguarded after closing under the group."""
    dom = set(e.spec.domain())
    reached: list[str] = []
    frontier = [e.var]
    outside: set[str] = set()
    while frontier:
        v = frontier.pop()
        if v in reached:
            continue
        reached.append(v)
        for w in _unguarded_var_names(e.spec.body(v)):
            if w in dom:
                if w not in reached:
                    frontier.append(w)
            else:
                outside.add(w)
    return reached, outside


def unguarded_prefix_names(e: Expr) -> list[str]:
    """Instruction names of unguarded action occurrences of e (with multiplicity)."""
    if isinstance(e, Prefix):
        return [e.name]
    if isinstance(e, Var):
        return []
    if isinstance(e, Fix):
        reached, _ = _fix_unguarded(e)
        out: list[str] = []
        for v in reached:
            body = e.spec.body(v)
            out.extend(_unguarded_skip_fix(body, e.spec))
        return out
    out = []
    for c in children(e):
        out.extend(unguarded_prefix_names(c))
    return out


def _unguarded_skip_fix(e: Expr, host: RecSpec) -> list[str]:
    # Within a body of `host`, variables of the host group were already handled
    # by the reachability closure; nested fix groups recurse normally.
    if isinstance(e, Prefix):
        return [e.name]
    if isinstance(e, Var):
        return []
    if isinstance(e, Fix):
        return unguarded_prefix_names(e)
    out: list[str] = []
    for c in children(e):
        out.extend(_unguarded_skip_fix(c, host))
    return out


def extended_subexpressions(e: Expr) -> list[Expr]:
    """All extended subexpressions of e (fix siblings included), deduplicated."""
    seen: dict[str, Expr] = {}
    stack = [e]
    while stack:
        n = stack.pop()
        key = print_expr(n)
        if key in seen:
            continue
        seen[key] = n
        stack.extend(children(n))
        if isinstance(n, Fix):
            for v, b in n.spec.bindings:
                stack.append(b)
                if v != n.var:
                    stack.append(Fix(v, n.spec))
    return list(seen.values())


def well_named(e: Expr) -> bool:
    """Every extended subexpression has pairwise-distinct names on its
    unguarded action occurrences, and parallel arms have disjoint name sets."""
    for sub in extended_subexpressions(e):
        names = unguarded_prefix_names(sub)
        if len(names) != len(set(names)):
            return False
        if isinstance(sub, Par) and all_names(sub.left) & all_names(sub.right):
            return False
    return True


# ---------------------------------------------------------------------------
# Components.
# ---------------------------------------------------------------------------

ComponentPath = str  # word over {L, R}; "" is the whole system


def component_paths(e: Expr) -> set[ComponentPath]:
    """Prefix-closed set of component paths of e (wrappers are transparent)."""
    out = {""}

    def walk(n: Expr, path: str) -> None:
        if isinstance(n, Par):
            out.add(path + "L")
            out.add(path + "R")
            walk(n.left, path + "L")
            walk(n.right, path + "R")
        elif isinstance(n, (Restrict, Relabel)):
            walk(n.body, path)
        elif isinstance(n, Prefix):
            walk(n.body, path)
        elif isinstance(n, Choice):
            walk(n.left, path)
            walk(n.right, path)
        elif isinstance(n, Fix):
            for _, b in n.spec.bindings:
                walk(b, path)

    walk(e, "")
    return out


def _cmp_walk(n: Expr, path: str, table: dict[str, str]) -> None:
    if isinstance(n, Prefix):
        table[n.name] = path
        _cmp_walk(n.body, path, table)
    elif isinstance(n, Par):
        _cmp_walk(n.left, path + "L", table)
        _cmp_walk(n.right, path + "R", table)
    elif isinstance(n, (Restrict, Relabel)):
        _cmp_walk(n.body, path, table)
    elif isinstance(n, Choice):
        _cmp_walk(n.left, path, table)
        _cmp_walk(n.right, path, table)
    elif isinstance(n, Fix):
        for _, b in n.spec.bindings:
            _cmp_walk(b, path, table)


def cmp_table(e: Expr) -> dict[str, ComponentPath]:
    """Innermost parallel arm of each instruction occurrence in e.

    Occurrences inside a fix group inherit the component of the fix term:
    the fragment forbids parallel composition inside definition bodies, so
    every occurrence of the group sits in the arm holding the reference.
    """
    table: dict[str, str] = {}
    _cmp_walk(e, "", table)
    return table


def project(state: Expr, c: ComponentPath) -> Expr | None:
    """Select the component of `state` addressed by c; None if absent.

    Restriction and relabelling wrappers are descended transparently (they are
    not components themselves, only the leaves of the parallel tree are).
    """
    e = state
    for step in c:
        while isinstance(e, (Restrict, Relabel)):
            e = e.body
        if not isinstance(e, Par):
            return None
        e = e.left if step == "L" else e.right
    return e


# ---------------------------------------------------------------------------
# ProcessSpec and fragment checking.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProcessSpec:
    """A named, closed expression with its name and component tables."""

    root: Expr
    name_table: dict[str, tuple[Span | None, ActionLabel]]
    cmp_map: dict[str, ComponentPath]
    nonblocking: frozenset[str] = frozenset()  # label bases declared non-blocking
    source: str = ""

    def cmp_of(self, instruction: str) -> ComponentPath:
        try:
            return self.cmp_map[instruction]
        except KeyError:
            raise KeyError(f"unknown instruction name {instruction!r}") from None


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: Span | None = None

    def __str__(self) -> str:
        if self.span:
            return f"{self.span[0]}:{self.span[1]}: {self.message}"
        return self.message


def check_fragment(spec: ProcessSpec) -> list[Diagnostic]:
    """Fragment restrictions, each violation with its source span.

    Violations: parallel composition anywhere inside a definition body; an
    unguarded occurrence of a process variable in a definition body; an
    unguarded parallel composition inside a choice arm.
    """
    out: list[Diagnostic] = []

    def walk(e: Expr, in_def: str | None, unguarded: bool, in_choice: bool) -> None:
        if isinstance(e, Par):
            if in_def is not None:
                out.append(Diagnostic(
                    f"parallel composition in the definition of {in_def}", e.span))
            elif in_choice and unguarded:
                out.append(Diagnostic(
                    "unguarded parallel composition inside a choice", e.span))
            walk(e.left, in_def, unguarded, False)
            walk(e.right, in_def, unguarded, False)
        elif isinstance(e, Choice):
            walk(e.left, in_def, unguarded, True)
            walk(e.right, in_def, unguarded, True)
        elif isinstance(e, Prefix):
            walk(e.body, in_def, False, False)
        elif isinstance(e, (Restrict, Relabel)):
            walk(e.body, in_def, unguarded, in_choice)
        elif isinstance(e, Var):
            if unguarded and in_def is not None:
                out.append(Diagnostic(
                    f"unguarded occurrence of variable {e.x} in the definition of {in_def}",
                    e.span))
        elif isinstance(e, Fix):
            for v, b in e.spec.bindings:
                walk(b, v, True, False)

    walk(spec.root, None, True, False)
    return out
