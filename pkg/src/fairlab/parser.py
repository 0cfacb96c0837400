"""Concrete grammar for the CCS fragment.

Conventions: lowercase identifiers are actions, uppercase are process
variables.  ``'a`` is the co-name of ``a``; ``tau`` the internal action;
``\\a`` restriction; ``[a -> b, b#i -> b#(i+1)]`` relabelling (complement
closure implicit, identity elsewhere); ``+`` binds looser than ``.``, ``|``
looser than ``+``; postfix ``\\a``/``[..]`` bind tightest.  A bare action
abbreviates ``action.0``.  ``E where X = F, Y = G`` closes the free
variables of E; line comments start with ``--``; an optional leading pragma
``nonblocking a, b`` declares label bases non-blocking.  An explicit
instruction name may be attached to a prefix occurrence as ``a{n1}.E``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .labels import ActionLabel, LabelError, RelabelFn, RelabelRule, TAU
from .syntax import (Choice, Expr, Fix, Nil, Par, Prefix, ProcessSpec, RecSpec,
                     Relabel, Restrict, Span, Var, cmp_table, free_vars,
                     print_expr, well_named)


class ParseError(ValueError):
    def __init__(self, message: str, span: Span | None = None):
        self.span = span
        at = f" at {span[0]}:{span[1]}" if span else ""
        super().__init__(f"{message}{at}")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT UIDENT PUNCT INDEX NAMEANN EOF
    text: str
    span: Span


_PUNCT = ("->", "(", ")", "{", "}", "[", "]", "+", "|", ".", ",", "\\", "=", "'", "#", "0")
_KEYWORDS = ("where", "tau", "nonblocking")


def _tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        span = (line, col)
        if text.startswith("->", i):
            toks.append(Token("PUNCT", "->", span))
            i += 2
            col += 2
            continue
        if c == "{":
            j = text.find("}", i)
            if j < 0:
                raise ParseError("unterminated instruction name", span)
            toks.append(Token("PUNCT", "{", span))
            toks.append(Token("NAME", text[i + 1:j].strip(), (line, col + 1)))
            toks.append(Token("PUNCT", "}", (line, col + (j - i))))
            col += j - i + 1
            i = j + 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            word = text[i:j]
            toks.append(Token("PUNCT" if word == "0" else "INDEX", word, span))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "IDENT" if (word in _KEYWORDS or word[0].islower() or word[0] == "_") else "UIDENT"
            toks.append(Token(kind, word, span))
            col += j - i
            i = j
            continue
        if c in "()" or c in "{}[]" or c in "+|.,\\='#":
            toks.append(Token("PUNCT", c, span))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", span)
    toks.append(Token("EOF", "", (line, col)))
    return toks


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.span)
        return t

    def at(self, text: str) -> bool:
        return self.peek().text == text

    # expr := par; par := choice ('|' choice)*; choice := item ('+' item)*
    def parse_expr(self) -> Expr:
        e = self.parse_choice()
        while self.at("|"):
            sp = self.next().span
            e = Par(e, self.parse_choice(), span=sp)
        return e

    def parse_choice(self) -> Expr:
        e = self.parse_prefix()
        while self.at("+"):
            sp = self.next().span
            e = Choice(e, self.parse_prefix(), span=sp)
        return e

    def _at_action(self) -> bool:
        t = self.peek()
        return t.text == "'" or t.text == "tau" or (t.kind == "IDENT" and t.text not in _KEYWORDS)

    def parse_prefix(self) -> Expr:
        if self._at_action():
            # lookahead: an action is a prefix head unless followed by an
            # operator that turns the bare name into a standalone process
            sp = self.peek().span
            label, name = self.parse_action_head()
            if self.at("."):
                self.next()
                return Prefix(label, name, self.parse_prefix(), span=sp)
            return Prefix(label, name, Nil(), span=sp)  # bare action = action.0
        return self.parse_postfix()

    def parse_action_head(self) -> tuple[ActionLabel, str]:
        t = self.next()
        if t.text == "'":
            base = self.next()
            if base.kind != "IDENT" or base.text in _KEYWORDS:
                raise ParseError("expected an action name after '", base.span)
            label = ActionLabel("co", base.text, self._opt_index())
        elif t.text == "tau":
            label = TAU
        else:
            label = ActionLabel("name", t.text, self._opt_index())
        name = ""
        if self.at("{"):
            self.next()
            nt = self.next()
            if nt.kind != "NAME" or not nt.text:
                raise ParseError("empty instruction name", nt.span)
            name = nt.text
            self.expect("}")
        return label, name

    def _opt_index(self) -> int | None:
        if self.at("#"):
            self.next()
            t = self.next()
            if not t.text.isdigit():
                raise ParseError("expected a numeric index after #", t.span)
            return int(t.text)
        return None

    def parse_postfix(self) -> Expr:
        e = self.parse_atom()
        while True:
            if self.at("\\"):
                sp = self.next().span
                t = self.next()
                if t.kind != "IDENT" or t.text in _KEYWORDS:
                    raise ParseError("expected an action name after \\", t.span)
                e = Restrict(e, t.text, span=sp)
            elif self.at("["):
                sp = self.next().span
                e = Relabel(e, self.parse_relabel_rules(), span=sp)
            else:
                return e

    def parse_relabel_rules(self) -> RelabelFn:
        rules: list[RelabelRule] = []
        while not self.at("]"):
            rules.append(self.parse_rule())
            if self.at(","):
                self.next()
        self.expect("]")
        try:
            return RelabelFn(tuple(rules))
        except LabelError as exc:
            raise ParseError(str(exc)) from None

    def parse_rule(self) -> RelabelRule:
        src = self.next()
        if src.kind != "IDENT" or src.text in _KEYWORDS:
            raise ParseError("expected an action name in relabelling", src.span)
        src_idx: int | None = None
        family = False
        idxvar = ""
        if self.at("#"):
            self.next()
            t = self.next()
            if t.text.isdigit():
                src_idx = int(t.text)
            elif t.kind == "IDENT":
                family, idxvar = True, t.text
            else:
                raise ParseError("expected an index or index variable after #", t.span)
        self.expect("->")
        dst = self.next()
        if dst.kind != "IDENT" or dst.text in _KEYWORDS:
            raise ParseError("expected an action name in relabelling", dst.span)
        dst_idx: int | None = None
        offset = 0
        if self.at("#"):
            self.next()
            if self.at("("):
                self.next()
                v = self.next()
                if not family or v.text != idxvar:
                    raise ParseError("index variable mismatch in relabelling", v.span)
                self.expect("+")
                off = self.next()
                if off.kind != "INDEX":
                    raise ParseError("expected a numeric offset", off.span)
                offset = int(off.text)
                self.expect(")")
            else:
                t = self.next()
                if t.text.isdigit():
                    dst_idx = int(t.text)
                elif family and t.text == idxvar:
                    offset = 0
                else:
                    raise ParseError("bad relabelling target index", t.span)
        elif family:
            raise ParseError("family rule needs an indexed target", dst.span)
        if family:
            return RelabelRule(src.text, dst.text, family=True, offset=offset)
        return RelabelRule(src.text, dst.text, src_idx, dst_idx)

    def parse_atom(self) -> Expr:
        t = self.peek()
        if t.text == "0":
            self.next()
            return Nil(span=t.span)
        if t.kind == "UIDENT":
            self.next()
            return Var(t.text, span=t.span)
        if t.text == "(":
            self.next()
            e = self.parse_expr()
            if self.at("where"):
                self.next()
                e = _close(e, self.parse_bindings())
            self.expect(")")
            return e
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.span)

    def parse_bindings(self) -> RecSpec:
        bindings: list[tuple[str, Expr]] = []
        while True:
            v = self.next()
            if v.kind != "UIDENT":
                raise ParseError("expected a process variable", v.span)
            self.expect("=")
            bindings.append((v.text, self.parse_expr()))
            if self.at(","):
                self.next()
                continue
            break
        if len({v for v, _ in bindings}) != len(bindings):
            raise ParseError("duplicate definition in where-clause")
        return RecSpec(tuple(bindings))


def _close(root: Expr, spec: RecSpec) -> Expr:
    """Replace each free occurrence of a defined variable by its fix term."""
    dom = set(spec.domain())

    def sub(e: Expr) -> Expr:
        if isinstance(e, Var):
            return Fix(e.x, spec, span=e.span) if e.x in dom else e
        if isinstance(e, Prefix):
            return Prefix(e.action, e.name, sub(e.body), span=e.span)
        if isinstance(e, Choice):
            return Choice(sub(e.left), sub(e.right), span=e.span)
        if isinstance(e, Par):
            return Par(sub(e.left), sub(e.right), span=e.span)
        if isinstance(e, Restrict):
            return Restrict(sub(e.body), e.name, span=e.span)
        if isinstance(e, Relabel):
            return Relabel(sub(e.body), e.fn, span=e.span)
        if isinstance(e, Fix):
            shadowed = dom & set(e.spec.domain())
            if shadowed:
                raise ParseError(f"variable {sorted(shadowed)[0]} defined twice")
            new = RecSpec(tuple((v, sub(b)) for v, b in e.spec.bindings))
            return Fix(e.var, new, span=e.span)
        return e

    return sub(root)


def _restrict_groups(e: Expr) -> Expr:
    """Restrict every fix term to the definitions reachable from its variable.

    A where-group referenced from several positions of the root is thereby
    split: each reference carries only its own part of the group, and when
    the parts overlap each position gets a private copy (named apart below),
    which keeps cmp a function from instructions to components.
    """
    if isinstance(e, Fix):
        dom = set(e.spec.domain())
        reach = {e.var}
        frontier = [e.var]
        while frontier:
            for w in sorted(free_vars(e.spec.body(frontier.pop())) & dom):
                if w not in reach:
                    reach.add(w)
                    frontier.append(w)
        kept = tuple((v, _restrict_groups(b)) for v, b in e.spec.bindings if v in reach)
        return Fix(e.var, RecSpec(kept), span=e.span)
    if isinstance(e, Prefix):
        return Prefix(e.action, e.name, _restrict_groups(e.body), span=e.span)
    if isinstance(e, Choice):
        return Choice(_restrict_groups(e.left), _restrict_groups(e.right), span=e.span)
    if isinstance(e, Par):
        return Par(_restrict_groups(e.left), _restrict_groups(e.right), span=e.span)
    if isinstance(e, Restrict):
        return Restrict(_restrict_groups(e.body), e.name, span=e.span)
    if isinstance(e, Relabel):
        return Relabel(_restrict_groups(e.body), e.fn, span=e.span)
    return e


def _assign_names(root: Expr) -> tuple[Expr, dict[str, tuple[Span | None, ActionLabel]]]:
    """Give every prefix occurrence of the elaborated root an instruction name.

    Auto names are ``base@k`` with k a per-base occurrence ordinal, assigned
    in textual order; explicit ``a{n}`` names are kept.
    """
    table: dict[str, tuple[Span | None, ActionLabel]] = {}
    counters: dict[str, int] = {}

    def fresh(label: ActionLabel, span: Span | None, explicit: str) -> str:
        if explicit:
            # duplicates are legal in reparsed states, where a prefix occurs
            # both unfolded and inside its fix group; labels must agree
            if explicit in table and table[explicit][1] != label:
                raise ParseError(
                    f"instruction name {explicit!r} reused with a different action", span)
            table.setdefault(explicit, (span, label))
            return explicit
        base = str(label).lstrip("'").replace("#", "_")
        counters[base] = counters.get(base, 0) + 1
        name = f"{base}@{counters[base]}"
        while name in table:
            counters[base] += 1
            name = f"{base}@{counters[base]}"
        table[name] = (span, label)
        return name

    def walk(e: Expr) -> Expr:
        if isinstance(e, Prefix):
            name = fresh(e.action, e.span, e.name)
            return Prefix(e.action, name, walk(e.body), span=e.span)
        if isinstance(e, Choice):
            return Choice(walk(e.left), walk(e.right), span=e.span)
        if isinstance(e, Par):
            return Par(walk(e.left), walk(e.right), span=e.span)
        if isinstance(e, Restrict):
            return Restrict(walk(e.body), e.name, span=e.span)
        if isinstance(e, Relabel):
            return Relabel(walk(e.body), e.fn, span=e.span)
        if isinstance(e, Fix):
            named = RecSpec(tuple((v, walk(b)) for v, b in e.spec.bindings))
            return Fix(e.var, named, span=e.span)
        return e

    return walk(_restrict_groups(root)), table


def parse_expression(text: str) -> Expr:
    """Parse one (possibly open) expression and name its prefixes.

    Lower-level helper for syntactic queries on open terms; `parse_ccs` is
    the full-spec entry point and also enforces closedness.
    """
    p = _Parser(_tokenize(text))
    e = p.parse_expr()
    if p.at("where"):
        p.next()
        e = _close(e, p.parse_bindings())
    t = p.peek()
    if t.kind != "EOF":
        raise ParseError(f"trailing input {t.text!r}", t.span)
    named, _ = _assign_names(e)
    return named


def parse_ccs(text: str) -> ProcessSpec:
    """Parse a complete specification into a named, closed ProcessSpec."""
    toks = _tokenize(text)
    p = _Parser(toks)
    nonblocking: set[str] = set()
    while p.at("nonblocking"):
        p.next()
        while True:
            t = p.next()
            if t.kind != "IDENT" or t.text in _KEYWORDS:
                raise ParseError("expected an action name in nonblocking pragma", t.span)
            nonblocking.add(t.text)
            if p.at(","):
                p.next()
                continue
            break
    e = p.parse_expr()
    if p.at("where"):
        p.next()
        e = _close(e, p.parse_bindings())
    t = p.peek()
    if t.kind != "EOF":
        raise ParseError(f"trailing input {t.text!r}", t.span)
    fv = free_vars(e)
    if fv:
        raise ParseError(f"unbound variable {sorted(fv)[0]}")
    named, table = _assign_names(e)
    # explicit annotations may deliberately share a name across occurrences
    # (one instruction with several source positions), but only as far as
    # well-namedness allows: unguarded occurrences stay pairwise distinct
    if not well_named(named):
        raise ParseError("explicit instruction names violate well-namedness")
    paths: dict[str, set[str]] = {}
    _collect_paths(named, "", paths)
    for name, where in paths.items():
        if len(where) > 1:
            raise ParseError(f"instruction name {name!r} spans parallel "
                             f"components {sorted(where)}")
    return ProcessSpec(root=named, name_table=table, cmp_map=cmp_table(named),
                       nonblocking=frozenset(nonblocking), source=text)


def _collect_paths(e: Expr, path: str, out: dict[str, set[str]]) -> None:
    if isinstance(e, Prefix):
        out.setdefault(e.name, set()).add(path)
        _collect_paths(e.body, path, out)
    elif isinstance(e, Par):
        _collect_paths(e.left, path + "L", out)
        _collect_paths(e.right, path + "R", out)
    elif isinstance(e, (Restrict, Relabel)):
        _collect_paths(e.body, path, out)
    elif isinstance(e, Choice):
        _collect_paths(e.left, path, out)
        _collect_paths(e.right, path, out)
    elif isinstance(e, Fix):
        for _, b in e.spec.bindings:
            _collect_paths(b, path, out)


def reparse_state(text: str) -> Expr:
    """Parse a canonical state print back into a named expression.

    Names are taken verbatim; unannotated prefixes still get fresh names so
    that hand-written goal expressions are accepted too.
    """
    return parse_expression(text)


def roundtrips(spec: ProcessSpec) -> bool:
    """parse . print identity on the elaborated root."""
    return parse_expression(print_expr(spec.root)) == spec.root
