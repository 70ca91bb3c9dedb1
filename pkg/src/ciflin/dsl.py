"""Concrete syntax for models: a recursive-descent parser and a printer.

The printer emits text that the parser maps back to a structurally equal
model.  Location literals carry an ``@`` sigil so they never collide with
variable names; primed variables are written ``x'``.
"""
from __future__ import annotations

import re
from typing import NamedTuple

from .model import (
    TAU,
    TRUE,
    FALSE,
    And,
    Atom,
    Automaton,
    BinOp,
    BoolDomain,
    Cmp,
    Const,
    DomainSpec,
    Edge,
    IntRange,
    ListDomain,
    ListLit,
    Lit,
    Loc,
    LocDomain,
    Member,
    Model,
    Or,
    Par,
    Sync,
    VarRef,
    automata_of,
    free_vars,
)

KEYWORDS = {
    "domain", "int", "bool", "list", "maxlen", "loc", "actions", "automaton",
    "sync", "location", "initial", "when", "invariant", "edge", "goto",
    "composition", "true", "false", "and", "or", "in",
}


class ParseError(ValueError):
    """Syntax or static-semantics error at a source position."""

    def __init__(self, message, line=0, column=0):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>(//|\#)[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op>==|<=|\+\+|\|\||\.\.|[+\-{}()\[\],;:=@'])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            tokens.append(Token("kw" if m.group() in KEYWORDS else "ident", m.group(), line, col))
        elif kind in ("int", "op"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0
        # first token of every variable reference, for diagnostics
        self.positions = {}

    # -- token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def at(self, text):
        return self.tok.text == text and self.tok.kind in ("kw", "op")

    def accept(self, text):
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.at(text):
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        tok = self.tok
        self.i += 1
        return tok

    def ident(self, what="identifier"):
        if self.tok.kind != "ident":
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {what}, found {shown!r}")
        tok = self.tok
        self.i += 1
        return tok

    def integer(self):
        neg = self.accept("-")
        if self.tok.kind != "int":
            raise self.error("expected integer")
        value = int(self.tok.text)
        self.i += 1
        return -value if neg else value

    def ident_list(self, what):
        toks = [self.ident(what)]
        while self.accept(","):
            toks.append(self.ident(what))
        return toks

    # -- top level
    def model(self):
        actions, domains, automata, composition = [], [], [], None
        while self.tok.kind != "eof":
            if self.at("domain"):
                domains.append(self.domain_decl())
            elif self.at("actions"):
                self.i += 1
                actions.extend(self.ident_list("action name"))
                self.expect(";")
            elif self.at("automaton"):
                automata.append(self.automaton())
            elif self.at("composition"):
                if composition is not None:
                    raise self.error("only one composition may be declared")
                composition = self.composition_decl()
            else:
                raise self.error(f"unexpected {self.tok.text!r}")
        return actions, domains, automata, composition

    def domain_decl(self):
        self.expect("domain")
        name = self.ident("variable name")
        self.expect(":")
        dom = self.domain()
        self.expect(";")
        return name, dom

    def domain(self):
        if self.accept("int"):
            lo = self.integer()
            self.expect("..")
            hi = self.integer()
            if lo > hi:
                raise self.error(f"empty range {lo}..{hi}")
            return IntRange(lo, hi)
        if self.accept("bool"):
            return BoolDomain()
        if self.accept("list"):
            elem = self.domain()
            self.expect("maxlen")
            n = self.integer()
            if n < 0:
                raise self.error("maxlen must be >= 0")
            return ListDomain(elem, n)
        if self.accept("loc"):
            self.expect("{")
            locs = tuple(t.text for t in self.ident_list("location name"))
            self.expect("}")
            return LocDomain(locs)
        raise self.error("expected a domain (int, bool, list or loc)")

    def automaton(self):
        self.expect("automaton")
        name = self.ident("automaton name")
        self.expect("{")
        sync = []
        if self.accept("sync"):
            sync = self.ident_list("action name")
            self.expect(";")
        locations = []
        while self.at("location"):
            locations.append(self.location())
        if not locations:
            raise self.error("automaton needs at least one location")
        self.expect("}")
        return name, sync, locations

    def location(self):
        self.expect("location")
        name = self.ident("location name")
        self.expect("{")
        init = inv = None
        edges = []
        while not self.at("}"):
            if self.at("initial"):
                tok = self.expect("initial")
                if init is not None:
                    raise self.error("duplicate initial clause", tok)
                init = self.predicate() if self.accept("when") else TRUE
                self.expect(";")
            elif self.at("invariant"):
                tok = self.expect("invariant")
                if inv is not None:
                    raise self.error("duplicate invariant clause", tok)
                inv = self.predicate()
                self.expect(";")
            elif self.at("edge"):
                self.expect("edge")
                if self.tok.kind == "ident" and self.tok.text == TAU:
                    action = self.ident()
                else:
                    action = self.ident("action name")
                reset = self.predicate() if self.accept("when") else TRUE
                self.expect("goto")
                target = self.ident("location name")
                self.expect(";")
                edges.append((action, reset, target))
            else:
                raise self.error(f"unexpected {self.tok.text!r} in location body")
        self.expect("}")
        return name, init if init is not None else FALSE, inv if inv is not None else TRUE, edges

    def composition_decl(self):
        self.expect("composition")
        name = self.ident("composition name")
        self.expect("=")
        term = self.comp()
        self.expect(";")
        return name, term

    # composition terms are kept as raw trees until automata are resolved
    def comp(self):
        term = self.comp_primary()
        while self.accept("||"):
            term = ("par", term, self.comp_primary())
        return term

    def comp_primary(self):
        if self.at("sync"):
            tok = self.expect("sync")
            self.expect("{")
            acts = [] if self.at("}") else self.ident_list("action name")
            self.expect("}")
            return ("sync", tok, acts, self.comp_primary())
        if self.accept("("):
            term = self.comp()
            self.expect(")")
            return term
        return ("atom", self.ident("automaton name"))

    # -- predicates
    def predicate(self):
        p = self.conjunction()
        while self.accept("or"):
            p = Or(p, self.conjunction())
        return p

    def conjunction(self):
        p = self.pred_atom()
        while self.accept("and"):
            p = And(p, self.pred_atom())
        return p

    def pred_atom(self):
        start = self.i
        try:
            lhs = self.expr()
        except ParseError:
            lhs = None
        if lhs is not None:
            if self.at("==") or self.at("<="):
                op = self.tok.text
                self.i += 1
                return Cmp(lhs, op, self.expr())
            if self.at("in") and isinstance(lhs, VarRef):
                self.i += 1
                self.expect("{")
                locs = tuple(t.text for t in self.ident_list("location name"))
                self.expect("}")
                return Member(lhs, locs)
        self.i = start
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.accept("("):
            p = self.predicate()
            self.expect(")")
            return p
        raise self.error("expected a predicate")

    def expr(self):
        e = self.expr_primary()
        while self.at("+") or self.at("-") or self.at("++"):
            op = self.tok.text
            self.i += 1
            e = BinOp(op, e, self.expr_primary())
        return e

    def expr_primary(self):
        tok = self.tok
        if tok.kind == "int" or (self.at("-") and self.toks[self.i + 1].kind == "int"):
            return Lit(self.integer())
        if self.accept("true"):
            return Lit(True)
        if self.accept("false"):
            return Lit(False)
        if self.accept("@"):
            return Lit(Loc(self.ident("location name").text))
        if self.accept("["):
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.accept(","):
                    items.append(self.expr())
            self.expect("]")
            return ListLit(tuple(items))
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "ident":
            self.i += 1
            primed = self.accept("'")
            ref = VarRef(tok.text, primed)
            self.positions.setdefault(ref, tok)
            return ref
        raise self.error("expected an expression")


def parse_model(text: str) -> Model:
    """Parse model source text; raises :class:`ParseError` on any problem."""
    parser = _Parser(text)
    actions, domains, automata, composition = parser.model()
    return _resolve(parser, actions, domains, automata, composition)


def _resolve(parser, actions, domains, automata_src, composition):
    seen = {}
    for tok in actions:
        if tok.text == TAU:
            raise ParseError("tau is reserved", tok.line, tok.column)
        if tok.text in seen:
            raise ParseError(f"duplicate action {tok.text}", tok.line, tok.column)
        seen[tok.text] = tok
    action_set = set(seen)

    dom_entries = []
    for tok, dom in domains:
        if any(n == tok.text for n, _ in dom_entries):
            raise ParseError(f"duplicate domain for {tok.text}", tok.line, tok.column)
        dom_entries.append((tok.text, dom))
    domspec = DomainSpec(tuple(dom_entries))
    kinds = {n: d.kind for n, d in dom_entries}

    loc_universe = set()
    for _, _, locs in automata_src:
        loc_universe.update(l[0].text for l in locs)
    for _, d in dom_entries:
        if isinstance(d, LocDomain):
            loc_universe.update(d.locations)

    def check_actions(toks, allow_tau):
        for t in toks:
            if t.text == TAU and not allow_tau:
                raise ParseError("tau cannot be synchronizing", t.line, t.column)
            if t.text != TAU and t.text not in action_set:
                raise ParseError(f"undeclared action {t.text}", t.line, t.column)

    def check_pred(p, where, allow_primed):
        for ref in _refs(p):
            tok = parser.positions.get(ref, where)
            if ref.name not in kinds:
                raise ParseError(f"undeclared variable {ref.name}", tok.line, tok.column)
            if ref.primed and not allow_primed:
                raise ParseError(f"primed variable {ref} outside an edge", tok.line, tok.column)
        for loc in _loc_literals(p):
            if loc not in loc_universe:
                raise ParseError(f"unknown location literal @{loc}", where.line, where.column)
        try:
            check_kinds(p, kinds)
        except TypeError as exc:
            raise ParseError(str(exc), where.line, where.column) from None

    automata = []
    names = {}
    for name_tok, sync_toks, locs in automata_src:
        if name_tok.text in names:
            raise ParseError(f"duplicate automaton {name_tok.text}", name_tok.line, name_tok.column)
        names[name_tok.text] = None
        check_actions(sync_toks, allow_tau=False)
        loc_names = []
        for loc_tok, _, _, _ in locs:
            if loc_tok.text in loc_names:
                raise ParseError(f"duplicate location {loc_tok.text}", loc_tok.line, loc_tok.column)
            loc_names.append(loc_tok.text)
        init, inv, edges = [], [], []
        for loc_tok, ip, np, edge_src in locs:
            check_pred(ip, loc_tok, False)
            check_pred(np, loc_tok, False)
            init.append(ip)
            inv.append(np)
            for act_tok, reset, target_tok in edge_src:
                check_actions([act_tok], allow_tau=True)
                check_pred(reset, act_tok, True)
                if target_tok.text not in loc_names:
                    raise ParseError(f"unknown location {target_tok.text}", target_tok.line, target_tok.column)
                edges.append(Edge(loc_tok.text, act_tok.text, reset, target_tok.text))
        sync = frozenset(t.text for t in sync_toks)
        automata.append(Automaton(name_tok.text, tuple(loc_names), tuple(init), tuple(inv), tuple(edges), sync))
    by_name = {a.name: a for a in automata}

    comp_name = comp = None
    if composition is not None:
        name_tok, raw = composition
        comp_name = name_tok.text
        comp = _build(raw, by_name, check_actions)
        used = [a.name for a in automata_of(comp)]
        for n in used:
            if used.count(n) > 1:
                raise ParseError(f"automaton {n} used twice in composition", name_tok.line, name_tok.column)
    return Model(tuple(t.text for t in actions), domspec, tuple(automata), comp_name, comp)


def _build(raw, by_name, check_actions):
    tag = raw[0]
    if tag == "atom":
        tok = raw[1]
        if tok.text not in by_name:
            raise ParseError(f"undeclared automaton {tok.text}", tok.line, tok.column)
        return Atom(by_name[tok.text])
    if tag == "par":
        return Par(_build(raw[1], by_name, check_actions), _build(raw[2], by_name, check_actions))
    _, tok, acts, body = raw
    check_actions(acts, allow_tau=False)
    return Sync(frozenset(t.text for t in acts), _build(body, by_name, check_actions))


def _refs(p):
    return sorted(free_vars(p), key=lambda r: (r.name, r.primed))


def _loc_literals(p):
    out = set()

    def walk(q):
        if isinstance(q, Lit) and isinstance(q.value, Loc):
            out.add(q.value.name)
        elif isinstance(q, (BinOp, Cmp, And, Or)):
            walk(q.lhs)
            walk(q.rhs)
        elif isinstance(q, ListLit):
            for i in q.items:
                walk(i)
        elif isinstance(q, Member):
            out.update(q.locations)

    walk(p)
    return out


# -- kind checking ------------------------------------------------------------


def _unify(a, b):
    """Unify two kinds; ``('list', None)`` is a list of unknown elements."""
    if a == b:
        return a
    if isinstance(a, tuple) and isinstance(b, tuple):
        if a[1] is None:
            return b
        if b[1] is None:
            return a
        return ("list", _unify(a[1], b[1]))
    raise TypeError(f"kind mismatch: {_kind_str(a)} vs {_kind_str(b)}")


def _kind_str(k):
    if isinstance(k, tuple):
        return f"list of {_kind_str(k[1]) if k[1] else '?'}"
    return k


def expr_kind(e, kinds):
    if isinstance(e, Lit):
        v = e.value
        return "bool" if isinstance(v, bool) else "loc" if isinstance(v, Loc) else "int"
    if isinstance(e, VarRef):
        return kinds[e.name]
    if isinstance(e, ListLit):
        elem = None
        for item in e.items:
            k = expr_kind(item, kinds)
            elem = k if elem is None else _unify(elem, k)
        return ("list", elem)
    if isinstance(e, BinOp):
        lk, rk = expr_kind(e.lhs, kinds), expr_kind(e.rhs, kinds)
        if e.op == "++":
            if not (isinstance(lk, tuple) and isinstance(rk, tuple)):
                raise TypeError("++ needs list operands")
            return _unify(lk, rk)
        if lk != "int" or rk != "int":
            raise TypeError(f"{e.op} needs integer operands")
        return "int"
    raise TypeError(f"not an expression: {e!r}")


def check_kinds(p, kinds) -> None:
    """Raise ``TypeError`` if ``p`` is ill-kinded under ``kinds``."""
    if isinstance(p, Const):
        return
    if isinstance(p, (And, Or)):
        check_kinds(p.lhs, kinds)
        check_kinds(p.rhs, kinds)
    elif isinstance(p, Cmp):
        lk, rk = expr_kind(p.lhs, kinds), expr_kind(p.rhs, kinds)
        if p.op == "<=":
            if lk != "int" or rk != "int":
                raise TypeError("<= needs integer operands")
        else:
            _unify(lk, rk)
    elif isinstance(p, Member):
        if kinds[p.var.name] != "loc":
            raise TypeError(f"{p.var} is not a location pointer")
    else:
        raise TypeError(f"not a predicate: {p!r}")


# -- printing -----------------------------------------------------------------


def print_expr(e) -> str:
    if isinstance(e, Lit):
        v = e.value
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, Loc):
            return f"@{v.name}"
        return str(v)
    if isinstance(e, VarRef):
        return str(e)
    if isinstance(e, ListLit):
        return "[" + ", ".join(print_expr(i) for i in e.items) + "]"
    if isinstance(e, BinOp):
        rhs = print_expr(e.rhs)
        if isinstance(e.rhs, BinOp):
            rhs = f"({rhs})"
        return f"{print_expr(e.lhs)} {e.op} {rhs}"
    raise TypeError(f"not an expression: {e!r}")


def print_predicate(p) -> str:
    if isinstance(p, Const):
        return "true" if p.value else "false"
    if isinstance(p, Cmp):
        return f"{print_expr(p.lhs)} {p.op} {print_expr(p.rhs)}"
    if isinstance(p, Member):
        return f"{p.var} in {{{', '.join(p.locations)}}}"
    if isinstance(p, And):
        rhs = print_predicate(p.rhs)
        if isinstance(p.rhs, (And, Or)):
            rhs = f"({rhs})"
        lhs = print_predicate(p.lhs)
        if isinstance(p.lhs, Or):
            lhs = f"({lhs})"
        return f"{lhs} and {rhs}"
    if isinstance(p, Or):
        rhs = print_predicate(p.rhs)
        if isinstance(p.rhs, Or):
            rhs = f"({rhs})"
        return f"{print_predicate(p.lhs)} or {rhs}"
    raise TypeError(f"not a predicate: {p!r}")


def print_domain(d) -> str:
    if isinstance(d, IntRange):
        return f"int {d.lo}..{d.hi}"
    if isinstance(d, BoolDomain):
        return "bool"
    if isinstance(d, ListDomain):
        return f"list {print_domain(d.elem)} maxlen {d.maxlen}"
    if isinstance(d, LocDomain):
        return "loc {" + ", ".join(d.locations) + "}"
    raise TypeError(f"not a domain: {d!r}")


def print_composition(p) -> str:
    if isinstance(p, Atom):
        return p.automaton.name
    if isinstance(p, Par):
        rhs = print_composition(p.right)
        if isinstance(p.right, Par):
            rhs = f"({rhs})"
        return f"{print_composition(p.left)} || {rhs}"
    body = print_composition(p.body)
    if isinstance(p.body, Par):
        body = f"({body})"
    return "sync {" + ", ".join(sorted(p.actions)) + "} " + body


def print_automaton(a: Automaton) -> str:
    lines = [f"automaton {a.name} {{"]
    if a.sync:
        lines.append("  sync " + ", ".join(sorted(a.sync)) + ";")
    for v, ip, np in zip(a.locations, a.init, a.inv):
        lines.append(f"  location {v} {{")
        if ip == TRUE:
            lines.append("    initial;")
        elif ip != FALSE:
            lines.append(f"    initial when {print_predicate(ip)};")
        if np != TRUE:
            lines.append(f"    invariant {print_predicate(np)};")
        for e in a.edges:
            if e.source != v:
                continue
            when = "" if e.reset == TRUE else f" when {print_predicate(e.reset)}"
            lines.append(f"    edge {e.action}{when} goto {e.target};")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines)


def print_model(m: Model) -> str:
    """Render a model in the concrete syntax accepted by :func:`parse_model`."""
    out = []
    for name, d in m.domains.entries:
        out.append(f"domain {name} : {print_domain(d)};")
    if m.actions:
        out.append("actions " + ", ".join(m.actions) + ";")
    for a in m.automata:
        out.append("")
        out.append(print_automaton(a))
    if m.composition is not None:
        out.append("")
        out.append(f"composition {m.composition_name} = {print_composition(m.composition)};")
    return "\n".join(out) + "\n"
