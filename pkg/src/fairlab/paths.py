"""Finite runs and lassos, enabledness predicates, and path classification
under every progress/justness/fairness assumption."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .lts import AnnotationError, AugmentedLTS, SchemaError, Task, TaskSet
from .tasks import NOTIONS, extract_tasks


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class PathPrefix:
    """A finite rooted-or-not path: a start state and consecutive transitions."""

    start: str
    steps: tuple[str, ...] = ()

    def validate(self, lts: AugmentedLTS) -> None:
        at = self.start
        lts.state(at)
        for tid in self.steps:
            t = lts.transition(tid)
            if t.source != at:
                raise PathError(f"transition {tid} does not continue the path at {at}")
            at = t.target

    def states(self, lts: AugmentedLTS) -> list[str]:
        out = [self.start]
        for tid in self.steps:
            out.append(lts.transition(tid).target)
        return out

    def end(self, lts: AugmentedLTS) -> str:
        return self.states(lts)[-1]


@dataclass(frozen=True)
class Lasso:
    """stem . cycle^omega: the canonical finite presentation of an infinite
    path in a finite-state system."""

    start: str
    stem: tuple[str, ...] = ()
    cycle: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.cycle:
            raise PathError("a lasso needs a nonempty cycle")

    def validate(self, lts: AugmentedLTS) -> None:
        PathPrefix(self.start, self.stem + self.cycle).validate(lts)
        entry = PathPrefix(self.start, self.stem).end(lts)
        if lts.transition(self.cycle[-1]).target != entry:
            raise PathError("cycle does not close at the stem's end state")

    def cycle_states(self, lts: AugmentedLTS) -> frozenset[str]:
        return frozenset(lts.transition(t).source for t in self.cycle)


def lasso_from_json(document: str) -> Lasso:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from None
    return Lasso(doc["start"], tuple(doc.get("stem", ())), tuple(doc["cycle"]))


def lasso_to_json(lasso: Lasso) -> str:
    return json.dumps({"start": lasso.start, "stem": list(lasso.stem),
                       "cycle": list(lasso.cycle)})


@dataclass(frozen=True)
class Assumption:
    """A path-level or liveness-level assumption.

    kind: P | Just | J | W | S | SWI | Fu | ST | Pr.  J/W/S carry a notion
    (A/T/I/Z/C/G or custom with an explicit task set).
    """

    kind: str
    notion: str = ""
    taskset: TaskSet | None = None
    reactive: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("P", "Just", "J", "W", "S", "SWI", "Fu", "ST", "Pr"):
            raise ValueError(f"unknown assumption kind {self.kind!r}")
        if self.kind in ("J", "W", "S"):
            if self.notion not in NOTIONS and self.notion != "custom":
                raise ValueError(f"assumption {self.kind} needs a notion or custom tasks")
            if self.notion == "custom" and self.taskset is None:
                raise ValueError("custom notion needs an explicit task set")

    def pathwise(self) -> bool:
        return self.kind not in ("Fu", "ST", "Pr")

    def __str__(self) -> str:
        base = {"P": "P", "Just": "just", "SWI": "SWI", "Fu": "Fu", "ST": "ST",
                "Pr": "Pr"}.get(self.kind)
        if base is None:
            base = f"{self.kind}:{self.notion}"
        return base + (",reactive" if self.reactive else "")


def parse_assumption(text: str, taskset: TaskSet | None = None) -> Assumption:
    """Parse the --assume grammar: P | just | J:y | W:y | S:y | SWI | Fu | ST
    | Pr | x:custom[=file handled by the caller], optionally ,reactive."""
    s = text.strip()
    reactive = False
    if s.endswith(",reactive"):
        reactive = True
        s = s[: -len(",reactive")].strip()
    if s in ("P", "p"):
        return Assumption("P", reactive=reactive)
    if s.lower() == "just":
        return Assumption("Just", reactive=reactive)
    if s in ("SWI", "Fu", "ST", "Pr"):
        return Assumption(s, reactive=reactive)
    if ":" in s:
        kind, _, notion = s.partition(":")
        if kind in ("J", "W", "S"):
            if notion.startswith("custom"):
                return Assumption(kind, "custom", taskset, reactive)
            return Assumption(kind, notion, None, reactive)
    raise ValueError(f"cannot parse assumption {text!r}")


def resolve_tasks(lts: AugmentedLTS, assumption: Assumption) -> TaskSet:
    if assumption.taskset is not None:
        return assumption.taskset
    return extract_tasks(lts, assumption.notion)


# ---------------------------------------------------------------------------
# Enabledness.
# ---------------------------------------------------------------------------

def _eligible(lts: AugmentedLTS, t, reactive: bool) -> bool:
    return not (reactive and t.blocking)


def enabled(lts: AugmentedLTS, task: Task, state: str, reactive: bool = False) -> bool:
    """A task is enabled in a state if a member (non-blocking, when reactive)
    leaves that state."""
    return any(t.id in task.members and _eligible(lts, t, reactive)
               for t in lts.outgoing(state))


def enabled_during(lts: AugmentedLTS, task: Task, u: str, reactive: bool = False) -> bool:
    """A task is enabled during a transition u if a member from source(u) is
    concurrent with u (disjoint component sets)."""
    ut = lts.transition(u)
    ucomp = lts.comp_of(u)
    for t in lts.outgoing(ut.source):
        if t.id in task.members and _eligible(lts, t, reactive):
            if not (lts.comp_of(t.id) & ucomp):
                return True
    return False


def instr_enabled(lts: AugmentedLTS, instruction: str, state: str,
                  reactive: bool = False) -> bool:
    return any(t.instr is not None and instruction in t.instr
               and _eligible(lts, t, reactive)
               for t in lts.outgoing(state))


def requested(lts: AugmentedLTS, instruction: str, state: str) -> bool:
    """An instruction is requested when its component, viewed in isolation,
    can fire it (no restriction context applies)."""
    from .semantics import step
    from .syntax import project
    cmp_map = _ccs_cmp_map(lts)
    if instruction not in cmp_map:
        raise AnnotationError(f"unknown instruction {instruction!r}")
    comp = project(lts.state_expr(state), cmp_map[instruction])
    if comp is None:
        raise AnnotationError(
            f"component {cmp_map[instruction]!r} absent in state {state}")
    return any(instruction in s.instr for s in step(comp))


def _requested_quiet(lts: AugmentedLTS, instruction: str, state: str) -> bool:
    try:
        return requested(lts, instruction, state)
    except AnnotationError:
        return False  # component no longer present: nothing is requested of it


def _ccs_cmp_map(lts: AugmentedLTS) -> dict[str, str]:
    """cmp over instructions, recovered from the initial state expression."""
    cached = getattr(lts, "_ccs_cmp", None)
    if cached is None:
        if lts.origin != "ccs":
            raise AnnotationError("instruction projection needs a ccs-origin system")
        from .syntax import cmp_table
        cached = cmp_table(lts.state_expr(lts.initial[0]))
        lts._ccs_cmp = cached
    return cached


# ---------------------------------------------------------------------------
# Classification.
# ---------------------------------------------------------------------------

def classify_lasso(lts: AugmentedLTS, lasso: Lasso, assumption: Assumption) -> bool:
    """Does the infinite path stem . cycle^omega satisfy the assumption?

    All conditions except justness depend only on the cycle: a task is
    relentlessly enabled iff enabled at a recurring state, perpetually
    enabled on a suffix iff enabled at every recurring state, and occurs
    infinitely often iff it meets the cycle.  Justness additionally owes an
    interference to every transition enabled along the stem.
    """
    if not assumption.pathwise():
        raise ValueError(f"{assumption.kind} is a liveness-level assumption, "
                         "not a path predicate")
    lasso.validate(lts)
    reactive = assumption.reactive
    kind = assumption.kind
    if kind == "P":
        return True
    cyc_states = sorted(lasso.cycle_states(lts))
    cyc_trans = frozenset(lasso.cycle)
    if kind == "Just":
        return _just_lasso(lts, lasso, reactive)
    if kind == "SWI":
        for i in _all_instructions(lts):
            occurs = any(i in lts.instr_of(t) for t in cyc_trans)
            if occurs:
                continue
            requested_everywhere = all(_requested_quiet(lts, i, s) for s in cyc_states)
            enabled_somewhere = any(instr_enabled(lts, i, s, reactive) for s in cyc_states)
            if requested_everywhere and enabled_somewhere:
                return False
        return True
    ts = resolve_tasks(lts, assumption)
    for task in ts.tasks:
        if task.members & cyc_trans:
            continue
        per_state = [enabled(lts, task, s, reactive) for s in cyc_states]
        if kind == "W":
            if all(per_state):
                return False
        elif kind == "S":
            if any(per_state):
                return False
        elif kind == "J":
            if all(per_state) and all(enabled_during(lts, task, u, reactive)
                                      for u in cyc_trans):
                return False
        else:
            raise AssertionError(kind)
    return True


def _just_lasso(lts: AugmentedLTS, lasso: Lasso, reactive: bool) -> bool:
    cyc_comp: set[str] = set()
    for u in lasso.cycle:
        cyc_comp |= lts.comp_of(u)

    def discharged_from(position: int, t) -> bool:
        # interference from the remaining stem or anywhere in the cycle
        tcomp = lts.comp_of(t.id)
        if tcomp & cyc_comp:
            return True
        return any(lts.comp_of(u) & tcomp for u in lasso.stem[position:])

    at = lasso.start
    for k in range(len(lasso.stem) + 1):
        for t in lts.outgoing(at):
            if reactive and t.blocking:
                continue
            if not discharged_from(k, t):
                return False
        if k < len(lasso.stem):
            at = lts.transition(lasso.stem[k]).target
    # states on the cycle: every occurrence is followed by the whole cycle
    for s in lasso.cycle_states(lts):
        for t in lts.outgoing(s):
            if reactive and t.blocking:
                continue
            if not (lts.comp_of(t.id) & cyc_comp):
                return False
    return True


def classify_finite(lts: AugmentedLTS, prefix: PathPrefix, assumption: Assumption) -> bool:
    """Completeness of a finite path: nothing the assumption promises is
    still possible at the last state."""
    if not assumption.pathwise():
        raise ValueError(f"{assumption.kind} is a liveness-level assumption, "
                         "not a path predicate")
    prefix.validate(lts)
    reactive = assumption.reactive
    last = prefix.end(lts)
    outs = [t for t in lts.outgoing(last) if _eligible(lts, t, reactive)]
    if assumption.kind in ("P", "Just"):
        return not outs
    if assumption.kind == "SWI":
        return not any(t.instr for t in outs)
    ts = resolve_tasks(lts, assumption)
    return not any(enabled(lts, task, last, reactive) for task in ts.tasks)


def _all_instructions(lts: AugmentedLTS) -> list[str]:
    instrs = lts.instructions()
    if not instrs:
        raise AnnotationError("system carries no instruction annotations")
    return instrs


# ---------------------------------------------------------------------------
# Prefix certificates: finite evidence on (possibly truncated) systems.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrefixCertificate:
    prefix: PathPrefix
    task: str
    enabled_everywhere: bool
    occurs: bool
    length: int


def prefix_certificate(lts: AugmentedLTS, prefix: PathPrefix, task: Task,
                       reactive: bool = False) -> PrefixCertificate:
    """Whether the task is enabled at every state of the prefix and whether
    it occurs in it; claims nothing about any continuation."""
    prefix.validate(lts)
    states = prefix.states(lts)
    return PrefixCertificate(
        prefix=prefix,
        task=task.name,
        enabled_everywhere=all(enabled(lts, task, s, reactive) for s in states),
        occurs=bool(task.members & set(prefix.steps)),
        length=len(prefix.steps),
    )
