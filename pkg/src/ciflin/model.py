"""Core data model: values, predicates, automata, compositions and domains.

Every type here is an immutable value.  AST nodes, automata and composition
nodes cache their hash because they are used heavily as dictionary keys
during state-space exploration.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

TAU = "tau"


def _cached_hash(self):
    try:
        return self.__dict__["_hash"]
    except KeyError:
        fields = tuple(getattr(self, f) for f in self.__dataclass_fields__)
        h = hash((type(self).__name__,) + fields + tuple(type(v).__name__ for v in fields))
        object.__setattr__(self, "_hash", h)
        return h


def node(cls):
    """Frozen dataclass whose hash is computed once."""
    cls = dataclass(frozen=True)(cls)
    cls.__hash__ = _cached_hash
    return cls


# -- values -----------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Loc:
    """A location name used as a value (location pointers)."""

    name: str

    def __repr__(self):
        return f"@{self.name}"


# int | bool | Loc | tuple of values (lists)
Value = Union[int, bool, Loc, tuple]


def kind_of(value: Value):
    """Return the kind of a value: 'int', 'bool', 'loc' or ('list', elem-kind)."""
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, Loc):
        return "loc"
    if isinstance(value, tuple):
        elem = None
        for v in value:
            k = kind_of(v)
            if elem is not None and k != elem:
                raise KindError(f"heterogeneous list {value!r}")
            elem = k
        return ("list", elem)
    raise KindError(f"not a value: {value!r}")


class EvaluationError(Exception):
    pass


class UnboundVariable(EvaluationError):
    pass


class KindError(EvaluationError):
    pass


# -- expressions and predicates ---------------------------------------------


@node
class VarRef:
    name: str
    primed: bool = False

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be nonempty")

    def __str__(self):
        return self.name + ("'" if self.primed else "")


@node
class Lit:
    """Scalar literal.  List values are written with :class:`ListLit`."""

    value: Value

    def __post_init__(self):
        if isinstance(self.value, tuple) or not isinstance(self.value, (int, Loc)):
            raise TypeError(f"Lit holds int, bool or Loc, got {self.value!r}")

    # True == 1 in Python; literals of different kinds must stay distinct.
    def __eq__(self, other):
        if not isinstance(other, Lit):
            return NotImplemented
        return type(self.value) is type(other.value) and self.value == other.value

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result


@node
class BinOp:
    op: str  # '+', '-', '++'
    lhs: "Expr"
    rhs: "Expr"

    def __post_init__(self):
        if self.op not in ("+", "-", "++"):
            raise ValueError(f"unknown operator {self.op!r}")


@node
class ListLit:
    items: tuple


Expr = Union[VarRef, Lit, BinOp, ListLit]


@node
class Const:
    value: bool


@node
class Cmp:
    lhs: Expr
    op: str  # '==', '<='
    rhs: Expr

    def __post_init__(self):
        if self.op not in ("==", "<="):
            raise ValueError(f"unknown comparison {self.op!r}")


@node
class And:
    lhs: "Predicate"
    rhs: "Predicate"


@node
class Or:
    lhs: "Predicate"
    rhs: "Predicate"


@node
class Member:
    """``var in {L1, L2, ...}`` for a location-pointer variable."""

    var: VarRef
    locations: tuple


Predicate = Union[Const, Cmp, And, Or, Member]

TRUE = Const(True)
FALSE = Const(False)


def eq(lhs: Expr, rhs: Expr) -> Cmp:
    return Cmp(lhs, "==", rhs)


def conjuncts(p: Predicate) -> tuple:
    """Flatten nested conjunctions, dropping literal ``true`` units."""
    if isinstance(p, And):
        return conjuncts(p.lhs) + conjuncts(p.rhs)
    if p == TRUE:
        return ()
    return (p,)


def conjoin(parts: Iterable[Predicate]) -> Predicate:
    """Left-nested conjunction of ``parts``; ``true`` when empty."""
    result = None
    for q in parts:
        result = q if result is None else And(result, q)
    return TRUE if result is None else result


def disjoin(parts: Iterable[Predicate]) -> Predicate:
    result = None
    for q in parts:
        result = q if result is None else Or(result, q)
    return FALSE if result is None else result


def free_vars(p) -> frozenset:
    """All :class:`VarRef` occurring in a predicate or expression."""
    out = set()
    _collect(p, out)
    return frozenset(out)


def _collect(p, out):
    if isinstance(p, VarRef):
        out.add(p)
    elif isinstance(p, (BinOp, Cmp, And, Or)):
        _collect(p.lhs, out)
        _collect(p.rhs, out)
    elif isinstance(p, ListLit):
        for item in p.items:
            _collect(item, out)
    elif isinstance(p, Member):
        out.add(p.var)
    elif isinstance(p, (Lit, Const)):
        pass
    else:
        raise TypeError(f"not a predicate or expression: {p!r}")


def primed_names(p) -> frozenset:
    """Names ``x`` such that ``x'`` occurs in ``p``."""
    return frozenset(v.name for v in free_vars(p) if v.primed)


# -- evaluation ---------------------------------------------------------------

_compiled: dict = {}


def compile_predicate(p) -> Callable[[Mapping, Mapping], object]:
    """Compile a predicate (or expression) into ``f(pre, post)``.

    ``pre`` maps plain variable names to values, ``post`` maps the names of
    primed variables to their new values.
    """
    try:
        return _compiled[p]
    except KeyError:
        pass
    f = _compile(p)
    _compiled[p] = f
    return f


def _compile(p):
    if isinstance(p, Const):
        v = p.value
        return lambda pre, post: v
    if isinstance(p, Lit):
        v = p.value
        return lambda pre, post: v
    if isinstance(p, VarRef):
        name = p.name
        if p.primed:
            def get_post(pre, post):
                try:
                    return post[name]
                except KeyError:
                    raise UnboundVariable(name + "'") from None
            return get_post

        def get_pre(pre, post):
            try:
                return pre[name]
            except KeyError:
                raise UnboundVariable(name) from None
        return get_pre
    if isinstance(p, ListLit):
        items = [compile_predicate(i) for i in p.items]
        return lambda pre, post: tuple(f(pre, post) for f in items)
    if isinstance(p, BinOp):
        lf, rf = compile_predicate(p.lhs), compile_predicate(p.rhs)
        if p.op == "++":
            def concat(pre, post):
                a, b = lf(pre, post), rf(pre, post)
                if type(a) is not tuple or type(b) is not tuple:
                    raise KindError(f"++ needs lists, got {a!r} and {b!r}")
                return a + b
            return concat
        sign = 1 if p.op == "+" else -1

        def arith(pre, post):
            a, b = lf(pre, post), rf(pre, post)
            if type(a) is not int or type(b) is not int:
                raise KindError(f"{p.op} needs integers, got {a!r} and {b!r}")
            return a + sign * b
        return arith
    if isinstance(p, Cmp):
        lf, rf = compile_predicate(p.lhs), compile_predicate(p.rhs)
        if p.op == "==":
            def equal(pre, post):
                a, b = lf(pre, post), rf(pre, post)
                if type(a) is not type(b):
                    raise KindError(f"cannot compare {a!r} with {b!r}")
                return a == b
            return equal

        def less_eq(pre, post):
            a, b = lf(pre, post), rf(pre, post)
            if type(a) is not int or type(b) is not int:
                raise KindError(f"<= needs integers, got {a!r} and {b!r}")
            return a <= b
        return less_eq
    if isinstance(p, And):
        lf, rf = compile_predicate(p.lhs), compile_predicate(p.rhs)
        return lambda pre, post: lf(pre, post) and rf(pre, post)
    if isinstance(p, Or):
        lf, rf = compile_predicate(p.lhs), compile_predicate(p.rhs)
        return lambda pre, post: lf(pre, post) or rf(pre, post)
    if isinstance(p, Member):
        name, locs = p.var.name, frozenset(p.locations)
        primed = p.var.primed

        def member(pre, post):
            src = post if primed else pre
            try:
                v = src[name]
            except KeyError:
                raise UnboundVariable(str(p.var)) from None
            if not isinstance(v, Loc):
                raise KindError(f"membership needs a location, got {v!r}")
            return v.name in locs
        return member
    raise TypeError(f"cannot evaluate {p!r}")


def holds(p: Predicate, pre: Mapping, post: Mapping = {}) -> bool:
    return bool(compile_predicate(p)(pre, post))


def eval_pred(p: Predicate, sigma: Mapping[VarRef, Value]) -> bool:
    """Evaluate ``p`` under a valuation keyed by :class:`VarRef`.

    Plain and primed references are distinct keys.
    """
    pre = {v.name: x for v, x in sigma.items() if not v.primed}
    post = {v.name: x for v, x in sigma.items() if v.primed}
    return holds(p, pre, post)


# -- automata and compositions ----------------------------------------------


@node
class Edge:
    source: str
    action: str
    reset: Predicate
    target: str


@node
class Automaton:
    """``(V, init, inv, E, actS)``; init/inv are aligned with ``locations``."""

    name: str
    locations: tuple
    init: tuple
    inv: tuple
    edges: tuple = ()
    sync: frozenset = frozenset()

    def __post_init__(self):
        if len(set(self.locations)) != len(self.locations):
            raise ValueError(f"automaton {self.name}: duplicate locations")
        if len(self.init) != len(self.locations) or len(self.inv) != len(self.locations):
            raise ValueError(f"automaton {self.name}: init/inv must cover every location")
        for e in self.edges:
            if e.source not in self.locations or e.target not in self.locations:
                raise ValueError(f"automaton {self.name}: edge endpoint outside V: {e}")
        if TAU in self.sync:
            raise ValueError(f"automaton {self.name}: tau cannot be synchronizing")

    def index(self, location: str) -> int:
        try:
            return self.locations.index(location)
        except ValueError:
            raise KeyError(f"{location} is not a location of {self.name}") from None

    def init_of(self, location: str) -> Predicate:
        return self.init[self.index(location)]

    def inv_of(self, location: str) -> Predicate:
        return self.inv[self.index(location)]

    def reinit(self, location: str) -> "Automaton":
        """``α[x]``: exactly ``location`` is initial (statically evaluated)."""
        self.index(location)
        init = tuple(TRUE if w == location else FALSE for w in self.locations)
        return Automaton(self.name, self.locations, init, self.inv, self.edges, self.sync)


@node
class Atom:
    automaton: Automaton


@node
class Par:
    left: "Composition"
    right: "Composition"


@node
class Sync:
    actions: frozenset
    body: "Composition"

    def __post_init__(self):
        if TAU in self.actions:
            raise ValueError("tau cannot be a synchronizing action")


Composition = Union[Atom, Par, Sync]


def automata_of(p: Composition) -> list:
    """Automata of ``p`` in left-to-right leaf order."""
    if isinstance(p, Atom):
        return [p.automaton]
    if isinstance(p, Par):
        return automata_of(p.left) + automata_of(p.right)
    if isinstance(p, Sync):
        return automata_of(p.body)
    raise TypeError(f"not a composition: {p!r}")


def reinit(p: Composition, locations: Sequence[str]) -> Composition:
    """``p[ℓ]``: make ``locations[i]`` the only initial location of automaton ``i``."""
    locations = tuple(locations)
    n = len(automata_of(p))
    if len(locations) != n:
        raise ValueError(f"expected {n} locations, got {len(locations)}")
    result, rest = _reinit(p, locations)
    assert not rest
    return result


def _reinit(p, locs):
    if isinstance(p, Atom):
        return Atom(p.automaton.reinit(locs[0])), locs[1:]
    if isinstance(p, Par):
        left, locs = _reinit(p.left, locs)
        right, locs = _reinit(p.right, locs)
        return Par(left, right), locs
    body, locs = _reinit(p.body, locs)
    return Sync(p.actions, body), locs


def composition_vars(p: Composition) -> frozenset:
    """Names of all variables occurring in ``p``."""
    names = set()
    for a in automata_of(p):
        for q in a.init + a.inv:
            names.update(v.name for v in free_vars(q))
        for e in a.edges:
            names.update(v.name for v in free_vars(e.reset))
    return frozenset(names)


def current_locations(p: Composition):
    """Location vector of a reinitialized composition, else ``None``."""
    out = []
    for a in automata_of(p):
        live = [v for v, q in zip(a.locations, a.init) if q != FALSE]
        if len(live) != 1 or a.init_of(live[0]) != TRUE:
            return None
        out.append(live[0])
    return tuple(out)


# -- finite domains -----------------------------------------------------------


@dataclass(frozen=True)
class IntRange:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty range {self.lo}..{self.hi}")

    def values(self) -> tuple:
        return tuple(range(self.lo, self.hi + 1))

    @property
    def kind(self):
        return "int"


@dataclass(frozen=True)
class BoolDomain:
    def values(self) -> tuple:
        return (False, True)

    @property
    def kind(self):
        return "bool"


@dataclass(frozen=True)
class ListDomain:
    elem: "Domain"
    maxlen: int

    def __post_init__(self):
        if self.maxlen < 0:
            raise ValueError("maxlen must be >= 0")

    def values(self) -> tuple:
        elems = self.elem.values()
        out = []
        for n in range(self.maxlen + 1):
            out.extend(itertools.product(elems, repeat=n))
        return tuple(out)

    @property
    def kind(self):
        return ("list", self.elem.kind)


@dataclass(frozen=True)
class LocDomain:
    locations: tuple

    def values(self) -> tuple:
        return tuple(Loc(v) for v in self.locations)

    @property
    def kind(self):
        return "loc"


Domain = Union[IntRange, BoolDomain, ListDomain, LocDomain]


class Valuation(dict):
    """Immutable, hashable mapping from variable names to values."""

    __slots__ = ("_hash",)

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            self._hash = hash(frozenset(self.items()))
            return self._hash

    def _immutable(self, *args, **kwargs):
        raise TypeError("Valuation is immutable")

    __setitem__ = __delitem__ = clear = pop = popitem = setdefault = update = _immutable

    def updated(self, changes: Mapping) -> "Valuation":
        d = dict(self)
        d.update(changes)
        return Valuation(d)

    def without(self, names: Iterable[str]) -> "Valuation":
        drop = set(names)
        return Valuation({k: v for k, v in self.items() if k not in drop})

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in sorted(self.items()))
        return f"Valuation({inner})"

    def __reduce__(self):
        return (Valuation, (dict(self),))


@dataclass(frozen=True)
class DomainSpec:
    """Finite domain per variable; ``entries`` keeps declaration order."""

    entries: tuple = ()
    _universe: list = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        names = [n for n, _ in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("duplicate domain entries")

    @classmethod
    def of(cls, mapping: Mapping[str, Domain]) -> "DomainSpec":
        return cls(tuple(mapping.items()))

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.entries)

    def __contains__(self, name):
        return any(n == name for n, _ in self.entries)

    def __getitem__(self, name) -> Domain:
        for n, d in self.entries:
            if n == name:
                return d
        raise KeyError(name)

    def values(self, name: str) -> tuple:
        return self[name].values()

    def extend(self, entries: Iterable) -> "DomainSpec":
        extra = [(n, d) for n, d in entries if n not in self]
        return DomainSpec(self.entries + tuple(extra))

    def universe(self) -> list:
        """All valuations, in lexicographic order of declaration."""
        if self._universe is None:
            names = self.names
            combos = itertools.product(*(d.values() for _, d in self.entries))
            object.__setattr__(self, "_universe", [Valuation(zip(names, c)) for c in combos])
        return self._universe

    def size(self) -> int:
        n = 1
        for _, d in self.entries:
            n *= len(d.values())
        return n


@dataclass(frozen=True)
class Model:
    actions: tuple
    domains: DomainSpec
    automata: tuple
    composition_name: str = None
    composition: Composition = None

    def automaton(self, name: str) -> Automaton:
        for a in self.automata:
            if a.name == name:
                return a
        raise KeyError(name)

    @property
    def main(self) -> Composition:
        if self.composition is None:
            raise ValueError("model declares no composition")
        return self.composition


def location_vectors(p: Composition) -> Iterator[tuple]:
    return itertools.product(*(a.locations for a in automata_of(p)))
