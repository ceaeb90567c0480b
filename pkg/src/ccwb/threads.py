"""Threads with guarded recursion, projection, and application to services.

A thread is a syntactic term: successful termination, deadlock, or a
postconditional composition that performs a ``focus.method`` action and
continues left or right depending on the service's reply.  Regular (infinite)
threads come from guarded recursive specifications; a recursion constant
names one variable of such a specification.

No semantic domain is built.  Equality of threads is always depth bounded:
``project(n, t)`` cuts a thread off after ``n`` actions, and two threads are
compared projection by projection.

A service is a reply function presented operationally: consuming a method
yields a reply (true, false, or divergent) and a successor service.  Replies
are divergence absorbing — once a service answers "divergent" it stays
divergent — and the distinguished undefined service answers divergent to
everything.  ``apply`` folds a thread's actions (all with one focus) through
a service, yielding the final service, or the undefined service when the
thread deadlocks, uses another focus, hits a divergent reply, or fails to
terminate within the step budget.  The outcome says which of those happened:
a fuel-bounded "undefined" is reported distinctly from a converged one.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

__all__ = [
    "BasicAction",
    "STOP",
    "DEAD",
    "Stop",
    "Dead",
    "Var",
    "PostCond",
    "GuardedRecSpec",
    "RecConst",
    "ThreadTerm",
    "prefix",
    "unfold",
    "project",
    "thread_equal_upto",
    "Reply",
    "Service",
    "UNDEFINED",
    "ApplyOutcome",
    "apply",
    "parse_thread",
    "render_thread",
    "actions_of",
]


@dataclass(frozen=True)
class BasicAction:
    """A ``focus.method`` pair: a command addressed to a named service."""

    focus: str
    method: str

    def __str__(self) -> str:
        return f"{self.focus}.{self.method}"


class Stop:
    """Successful termination."""

    __slots__ = ()

    def __repr__(self):
        return "S"


class Dead:
    """Deadlock: no action, no termination."""

    __slots__ = ()

    def __repr__(self):
        return "D"


STOP = Stop()
DEAD = Dead()


@dataclass(frozen=True)
class Var:
    """A specification variable; only valid inside recursive specifications."""

    name: str


@dataclass(frozen=True)
class PostCond:
    """Perform the action; continue as ``pos`` on a true reply, ``neg`` on false."""

    pos: "ThreadTerm"
    action: BasicAction
    neg: "ThreadTerm"


class GuardedRecSpec:
    """Equations ``X = rhs`` where every right-hand side is rooted in
    termination, deadlock, or a postconditional — never a bare variable.
    The structural shape makes unfolding total and single-step."""

    def __init__(self, equations: Dict[str, "ThreadTerm"]):
        self._equations = dict(equations)
        for name, rhs in self._equations.items():
            if isinstance(rhs, (Var, RecConst)):
                raise ValueError(f"equation for {name} is not guarded")
            if not isinstance(rhs, (Stop, Dead, PostCond)):
                raise ValueError(f"equation for {name} has no thread shape")
        free = set()
        for rhs in self._equations.values():
            _collect_vars(rhs, free)
        missing = free - set(self._equations)
        if missing:
            raise ValueError(f"unbound specification variables: {sorted(missing)}")

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(self._equations)

    def rhs(self, name: str) -> "ThreadTerm":
        return self._equations[name]

    def __eq__(self, other) -> bool:
        return isinstance(other, GuardedRecSpec) and self._equations == other._equations

    def __hash__(self) -> int:
        return hash(tuple(sorted((k, repr(v)) for k, v in self._equations.items())))

    def __repr__(self) -> str:
        eqs = "; ".join(f"{k} = {render_thread(v)}" for k, v in self._equations.items())
        return f"rec {{ {eqs} }}"


@dataclass(frozen=True)
class RecConst:
    """The solution of a guarded recursive specification for one variable."""

    var: str
    spec: GuardedRecSpec

    def __post_init__(self):
        if self.var not in self.spec.variables:
            raise ValueError(f"{self.var} is not a variable of the specification")


ThreadTerm = Union[Stop, Dead, PostCond, RecConst, Var]


def _collect_vars(t: ThreadTerm, acc: set) -> None:
    if isinstance(t, Var):
        acc.add(t.name)
    elif isinstance(t, PostCond):
        _collect_vars(t.pos, acc)
        _collect_vars(t.neg, acc)


def prefix(action: BasicAction, t: ThreadTerm) -> PostCond:
    """Action prefixing: perform the action and continue as ``t`` either way."""
    return PostCond(t, action, t)


def _subst(t: ThreadTerm, spec: GuardedRecSpec) -> ThreadTerm:
    if isinstance(t, Var):
        return RecConst(t.name, spec)
    if isinstance(t, PostCond):
        return PostCond(_subst(t.pos, spec), t.action, _subst(t.neg, spec))
    return t


def unfold(t: RecConst) -> ThreadTerm:
    """One unfolding: the right-hand side with every variable replaced by
    the corresponding recursion constant.  Guardedness guarantees the result
    is rooted in a real thread shape."""
    return _subst(t.spec.rhs(t.var), t.spec)


def project(n: int, t: ThreadTerm) -> ThreadTerm:
    """Cut the thread off after ``n`` actions (deadlock below the cut).

    Recursion constants are unfolded on demand; the result is a finite,
    recursion-free term of action depth at most ``n``.
    """
    if n < 0:
        raise ValueError("projection depth must be non-negative")
    if n == 0:
        return DEAD
    while isinstance(t, RecConst):
        t = unfold(t)
    if isinstance(t, (Stop, Dead)):
        return t
    if isinstance(t, PostCond):
        return PostCond(project(n - 1, t.pos), t.action, project(n - 1, t.neg))
    raise TypeError(f"not a closed thread term: {t!r}")


def thread_equal_upto(n: int, p: ThreadTerm, q: ThreadTerm) -> bool:
    """Structural equality of the depth-``n`` projections.  A bounded check:
    equal projections at one depth never prove full equality."""
    return project(n, p) == project(n, q)


class Reply(enum.Enum):
    TRUE = "T"
    FALSE = "F"
    DIVERGENT = "D"


class Service:
    """Operational view of a reply function.

    Implementations return a successor service from ``consume`` and never
    mutate in place; holding an old service value remains valid.  Once a
    service replies divergent, every successor must reply divergent.
    """

    is_undefined = False

    def consume(self, method: str) -> Tuple[Reply, "Service"]:
        raise NotImplementedError


class _UndefinedService(Service):
    is_undefined = True

    def consume(self, method: str) -> Tuple[Reply, "Service"]:
        return (Reply.DIVERGENT, self)

    def __repr__(self):
        return "UndefinedService"


UNDEFINED = _UndefinedService()


@dataclass
class ApplyOutcome:
    """Result of applying a thread to a service.

    ``converged`` holds exactly when the thread reached successful
    termination; then ``service`` is the evolved service.  Otherwise
    ``service`` is the undefined service and ``reason`` states why:
    ``dead``, ``wrong-focus``, ``divergent-reply``, ``undefined-input``,
    or ``fuel-exhausted``.  The last one is the bounded stand-in for
    non-convergence — it may mean genuine divergence or a too-small budget,
    and it is reported distinctly rather than silently collapsed.
    """

    service: Service
    converged: bool
    reason: str
    steps: int

    def __bool__(self) -> bool:
        return self.converged


def apply(p: ThreadTerm, focus: str, h: Service, depth_fuel: int = 1024) -> ApplyOutcome:
    """Fold the thread's actions through the service.

    Every action consumes one unit of ``depth_fuel``; unfolding recursion
    constants is free, which guardedness makes safe (at most one unfolding
    between consecutive actions).  If the projection of ``p`` at some depth
    ``n <= depth_fuel`` converges from ``h``, this call returns that exact
    service.
    """
    if depth_fuel < 1:
        raise ValueError("depth fuel must be positive")
    steps = 0
    t = p
    service = h
    while True:
        if service.is_undefined:
            return ApplyOutcome(UNDEFINED, False, "undefined-input", steps)
        if isinstance(t, RecConst):
            t = unfold(t)
            continue
        if isinstance(t, Stop):
            return ApplyOutcome(service, True, "stop", steps)
        if isinstance(t, Dead):
            return ApplyOutcome(UNDEFINED, False, "dead", steps)
        if not isinstance(t, PostCond):
            raise TypeError(f"not a closed thread term: {t!r}")
        if t.action.focus != focus:
            return ApplyOutcome(UNDEFINED, False, "wrong-focus", steps)
        if steps == depth_fuel:
            return ApplyOutcome(UNDEFINED, False, "fuel-exhausted", steps)
        reply, successor = service.consume(t.action.method)
        steps += 1
        if reply is Reply.DIVERGENT:
            return ApplyOutcome(UNDEFINED, False, "divergent-reply", steps)
        t = t.pos if reply is Reply.TRUE else t.neg
        service = successor


def actions_of(t: ThreadTerm) -> Tuple[BasicAction, ...]:
    """Every action occurring in the term, including recursion bodies."""
    seen = []
    specs = set()

    def walk(term):
        if isinstance(term, PostCond):
            seen.append(term.action)
            walk(term.pos)
            walk(term.neg)
        elif isinstance(term, RecConst):
            if id(term.spec) not in specs:
                specs.add(id(term.spec))
                for name in term.spec.variables:
                    walk(term.spec.rhs(name))

    walk(t)
    return tuple(seen)


# -- textual form -------------------------------------------------------------
#
# term   := 'S' | 'D' | action ';' term | simple '<|' action '|>' simple
#         | 'rec' NAME '{' NAME '=' term ';' ... '}' 'in' NAME | '(' term ')'
# action := focus '.' method
#
# The prefix form 'f.m ; t' abbreviates 't <| f.m |> t'.  Parenthesize to nest
# postconditionals.  Inside 'rec' bodies bare names are specification
# variables.  Methods may carry ':', '/', '.', '-' and alphanumerics, so
# execution-architecture instructions fit unquoted.

_TOKEN_RE = re.compile(r"\s*(<\||\|>|[(){};=]|rec\b|in\b|[A-Za-z0-9_][A-Za-z0-9_:./-]*)")


class _Parser:
    def __init__(self, text: str):
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m:
                if text[pos:].strip():
                    raise ValueError(f"bad thread syntax at {text[pos:pos + 20]!r}")
                break
            self.tokens.append(m.group(1))
            pos = m.end()
        self.i = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of thread expression")
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.next()
        if got != tok:
            raise ValueError(f"expected {tok!r}, got {got!r}")

    def parse_term(self, variables) -> ThreadTerm:
        left = self.parse_seq(variables)
        if self.peek() == "<|":
            self.next()
            action = self.parse_action()
            self.expect("|>")
            right = self.parse_seq(variables)
            return PostCond(left, action, right)
        return left

    def parse_seq(self, variables) -> ThreadTerm:
        tok = self.peek()
        if tok is not None and _is_action_token(tok) and self.lookahead_is(";"):
            action = self.parse_action()
            self.expect(";")
            rest = self.parse_seq(variables)
            return prefix(action, rest)
        return self.parse_atom(variables)

    def lookahead_is(self, tok: str) -> bool:
        return self.i + 1 < len(self.tokens) and self.tokens[self.i + 1] == tok

    def parse_action(self) -> BasicAction:
        tok = self.next()
        if not _is_action_token(tok):
            raise ValueError(f"expected an action, got {tok!r}")
        focus, method = tok.split(".", 1)
        return BasicAction(focus, method)

    def parse_atom(self, variables) -> ThreadTerm:
        tok = self.next()
        if tok == "S":
            return STOP
        if tok == "D":
            return DEAD
        if tok == "(":
            term = self.parse_term(variables)
            self.expect(")")
            return term
        if tok == "rec":
            return self.parse_rec(variables)
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok) and tok in variables:
            return Var(tok)
        raise ValueError(f"unexpected token {tok!r}")

    def parse_rec(self, outer_variables) -> ThreadTerm:
        root = self.next()
        self.expect("{")
        equations = {}
        names = {root}
        # first pass over tokens is not possible without full parse; collect
        # names lazily by allowing any identifier and validating afterwards.
        while True:
            name = self.next()
            self.expect("=")
            names.add(name)
            equations[name] = self.parse_term(_AnyVars())
            tok = self.next()
            if tok == "}":
                break
            if tok != ";":
                raise ValueError(f"expected ';' or '}}', got {tok!r}")
        self.expect("in")
        start = self.next()
        spec = GuardedRecSpec(equations)
        if start not in spec.variables:
            raise ValueError(f"'in {start}' names no equation")
        return RecConst(start, spec)


class _AnyVars:
    def __contains__(self, name) -> bool:
        return bool(re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name))


def _is_action_token(tok: str) -> bool:
    return "." in tok and tok not in ("<|", "|>") and not tok.startswith(".")


def parse_thread(text: str) -> ThreadTerm:
    """Parse the textual thread form; comments (``#`` to end of line) allowed."""
    stripped = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    parser = _Parser(stripped)
    term = parser.parse_term(frozenset())
    if parser.peek() is not None:
        raise ValueError(f"trailing tokens: {parser.tokens[parser.i:]}")
    return term


def render_thread(t: ThreadTerm) -> str:
    if isinstance(t, Stop):
        return "S"
    if isinstance(t, Dead):
        return "D"
    if isinstance(t, Var):
        return t.name
    if isinstance(t, RecConst):
        eqs = "; ".join(
            f"{name} = {render_thread(t.spec.rhs(name))}" for name in t.spec.variables
        )
        return f"rec {t.var} {{ {eqs} }} in {t.var}"
    if isinstance(t, PostCond):
        if t.pos == t.neg:
            return f"{t.action} ; {_atom(t.pos)}"
        return f"{_atom(t.pos)} <| {t.action} |> {_atom(t.neg)}"
    raise TypeError(f"not a thread term: {t!r}")


def _atom(t: ThreadTerm) -> str:
    text = render_thread(t)
    if isinstance(t, PostCond) and t.pos != t.neg:
        return f"({text})"
    return text
