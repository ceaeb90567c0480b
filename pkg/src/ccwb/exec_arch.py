"""The file-store execution architecture over a machine structure.

An abstract operating system reduced to file management plus loading and
running executable codes.  A state is either live — a finite map from file
names to bit sequences together with an optional loaded executable — or the
single absorbing divergence state.  Ten instruction forms operate on states;
each has a total effect function and a total yield function (the reply).

Running the loaded executable is the only instruction that can diverge:
then the effect is the divergence state and the yield is the divergent
reply, and both stay there for every later instruction.  Wrapping a state
as a service (methods are instruction texts; unparseable methods diverge)
therefore produces a genuine divergence-absorbing reply function, and the
divergence state's service is exactly the undefined service.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .bits import BitSeq
from .machine import DIV, MEA, Bits, MachineStructure
from .threads import Reply, Service

__all__ = [
    "FILENAME_RE",
    "valid_filename",
    "Set",
    "Remove",
    "Copy",
    "Move",
    "Cat",
    "Eq",
    "Neq",
    "Exists",
    "Load",
    "Exe",
    "EAInstruction",
    "InstructionParseError",
    "parse_instruction",
    "render_instruction",
    "Live",
    "DIVERGED_STATE",
    "EAState",
    "eff",
    "yld",
    "ceff",
    "EAService",
    "service_of",
    "EFF_ROWS",
    "YLD_ROWS",
    "load_snapshot",
    "save_snapshot",
    "run_script",
]

FILENAME_RE = re.compile(r"^[a-z0-9_.-]+$")


def valid_filename(name: str) -> bool:
    return bool(FILENAME_RE.match(name))


def _check_name(name: str) -> str:
    if not valid_filename(name):
        raise ValueError(f"bad file name: {name!r}")
    return name


@dataclass(frozen=True)
class Set:
    name: str
    bits: BitSeq


@dataclass(frozen=True)
class Remove:
    name: str


@dataclass(frozen=True)
class Copy:
    src: str
    dst: str


@dataclass(frozen=True)
class Move:
    src: str
    dst: str


@dataclass(frozen=True)
class Cat:
    src: str
    dst: str


@dataclass(frozen=True)
class Eq:
    a: str
    b: str


@dataclass(frozen=True)
class Neq:
    a: str
    b: str


@dataclass(frozen=True)
class Exists:
    name: str


@dataclass(frozen=True)
class Load:
    name: str


@dataclass(frozen=True)
class Exe:
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]


EAInstruction = Union[Set, Remove, Copy, Move, Cat, Eq, Neq, Exists, Load, Exe]


class InstructionParseError(ValueError):
    pass


def parse_instruction(text: str) -> EAInstruction:
    """Wire grammar, colon-separated:

    ``set:<f>:<bits-or-xhex>``  ``rmv:<f>``  ``cp:<f1>:<f2>``  ``mv:<f1>:<f2>``
    ``cat:<f1>:<f2>``  ``eq:<f1>:<f2>``  ``neq:<f1>:<f2>``  ``exists:<f>``
    ``load:<f>``  ``exe:<f1>:..:<fm>/<g1>:..:<gn>`` (``exe:/`` for none).

    The set payload accepts both bit-sequence literal forms; a missing
    payload is the empty sequence.
    """
    try:
        head, _, rest = text.partition(":")
        if head == "set":
            name, _, payload = rest.partition(":")
            return Set(_check_name(name), BitSeq.from_text(payload))
        if head == "rmv":
            return Remove(_check_name(rest))
        if head == "exists":
            return Exists(_check_name(rest))
        if head == "load":
            return Load(_check_name(rest))
        if head in ("cp", "mv", "cat", "eq", "neq"):
            a, sep, b = rest.partition(":")
            if not sep:
                raise ValueError("two file names required")
            cls = {"cp": Copy, "mv": Move, "cat": Cat, "eq": Eq, "neq": Neq}[head]
            return cls(_check_name(a), _check_name(b))
        if head == "exe":
            left, sep, right = rest.partition("/")
            if not sep:
                raise ValueError("missing '/' separator")
            ins = tuple(_check_name(t) for t in left.split(":") if t) if left else ()
            outs = tuple(_check_name(t) for t in right.split(":") if t) if right else ()
            if left and any(not t for t in left.split(":")):
                raise ValueError("empty input name")
            if right and any(not t for t in right.split(":")):
                raise ValueError("empty output name")
            return Exe(ins, outs)
        raise ValueError(f"unknown instruction {head!r}")
    except ValueError as exc:
        raise InstructionParseError(f"{text!r}: {exc}") from None


def render_instruction(i: EAInstruction) -> str:
    if isinstance(i, Set):
        return f"set:{i.name}:{i.bits.to_text()}"
    if isinstance(i, Remove):
        return f"rmv:{i.name}"
    if isinstance(i, Copy):
        return f"cp:{i.src}:{i.dst}"
    if isinstance(i, Move):
        return f"mv:{i.src}:{i.dst}"
    if isinstance(i, Cat):
        return f"cat:{i.src}:{i.dst}"
    if isinstance(i, Eq):
        return f"eq:{i.a}:{i.b}"
    if isinstance(i, Neq):
        return f"neq:{i.a}:{i.b}"
    if isinstance(i, Exists):
        return f"exists:{i.name}"
    if isinstance(i, Load):
        return f"load:{i.name}"
    if isinstance(i, Exe):
        return f"exe:{':'.join(i.inputs)}/{':'.join(i.outputs)}"
    raise TypeError(f"not an instruction: {i!r}")


# -- states -------------------------------------------------------------------


class Live:
    """A live state: file bindings plus the loaded executable (or none).

    Values are immutable by discipline; the effect function always builds a
    new state.  Equality is structural, which is what service equality in
    the portability checks relies on.
    """

    __slots__ = ("files", "loaded")

    def __init__(self, files: Optional[Dict[str, BitSeq]] = None, loaded: Optional[BitSeq] = None):
        object.__setattr__(self, "files", dict(files or {}))
        object.__setattr__(self, "loaded", loaded)

    def __setattr__(self, *_):
        raise AttributeError("states are immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Live)
            and self.files == other.files
            and self.loaded == other.loaded
        )

    def __hash__(self):
        return hash((tuple(sorted(self.files.items())), self.loaded))

    def __repr__(self) -> str:
        loaded = "none" if self.loaded is None else f"{len(self.loaded)} bits"
        return f"Live({len(self.files)} files, loaded={loaded})"

    def with_files(self, files: Dict[str, BitSeq]) -> "Live":
        return Live(files, self.loaded)

    def check(self, machine: MachineStructure) -> "Live":
        if self.loaded is not None and not machine.exec_member(self.loaded):
            raise ValueError("loaded slot holds a non-executable bit sequence")
        for name in self.files:
            _check_name(name)
        return self


class _DivergedState:
    __slots__ = ()

    def __repr__(self):
        return "DivergedState"

    def __eq__(self, other):
        return isinstance(other, _DivergedState)

    def __hash__(self):
        return hash(_DivergedState)


DIVERGED_STATE = _DivergedState()

EAState = Union[Live, _DivergedState]


# -- effect and yield ---------------------------------------------------------

# Row names for coverage-tracked conformance tests.  The test suite must
# exercise every named row at least once.
EFF_ROWS = (
    "eff.set",
    "eff.rmv",
    "eff.cp_hit",
    "eff.cp_miss",
    "eff.mv_hit",
    "eff.mv_miss",
    "eff.cat_hit",
    "eff.cat_miss",
    "eff.tests_noop",
    "eff.load_hit",
    "eff.load_miss",
    "eff.exe_ok",
    "eff.exe_noop",
    "eff.exe_div",
)

YLD_ROWS = (
    "yld.set_true",
    "yld.rmv_presence",
    "yld.cp_true",
    "yld.cp_false",
    "yld.mv_true",
    "yld.mv_false",
    "yld.cat_true",
    "yld.cat_false",
    "yld.eq_true",
    "yld.eq_false",
    "yld.neq_true",
    "yld.neq_false",
    "yld.exists_presence",
    "yld.load_true",
    "yld.load_false",
    "yld.exe_true",
    "yld.exe_false",
    "yld.exe_div",
)


def _exe_results(i: Exe, s: Live, m: MachineStructure):
    """None when the instruction is a no-op (no code loaded or an input name
    unbound); otherwise the first output of the loaded code on the bound
    input values (the later outputs are read lazily by the effect)."""
    if s.loaded is None:
        return None
    if any(name not in s.files for name in i.inputs):
        return None
    chi = (s.loaded,) + tuple(s.files[name] for name in i.inputs)
    return chi


def eff(i: EAInstruction, s: EAState, m: MachineStructure) -> EAState:
    """The total effect function; divergence is absorbing."""
    if s is DIVERGED_STATE:
        return DIVERGED_STATE
    assert isinstance(s, Live)
    files = s.files
    if isinstance(i, Set):
        new = dict(files)
        new[i.name] = i.bits
        return s.with_files(new)
    if isinstance(i, Remove):
        if i.name not in files:
            return s
        new = dict(files)
        del new[i.name]
        return s.with_files(new)
    if isinstance(i, Copy):
        if i.src not in files:
            return s
        new = dict(files)
        new[i.dst] = files[i.src]
        return s.with_files(new)
    if isinstance(i, Move):
        if i.src not in files:
            return s
        new = dict(files)
        new[i.dst] = files[i.src]
        del new[i.src]
        return s.with_files(new)
    if isinstance(i, Cat):
        if i.src not in files or i.dst not in files:
            return s
        new = dict(files)
        new[i.dst] = files[i.dst] + files[i.src]
        return s.with_files(new)
    if isinstance(i, (Eq, Neq, Exists)):
        return s
    if isinstance(i, Load):
        if i.name in files and m.exec_member(files[i.name]):
            return Live(files, files[i.name])
        return s
    if isinstance(i, Exe):
        chi = _exe_results(i, s, m)
        if chi is None:
            return s
        first = m.mf.eval(1, chi)
        if first is DIV:
            return DIVERGED_STATE
        if first is MEA:
            return s
        # outputs are written (or removed, when missing) left to right, so
        # with duplicated names the rightmost write wins; inputs were read
        # before any write.
        new = dict(files)
        for index, name in enumerate(i.outputs, start=1):
            out = m.mf.eval(index, chi)
            if isinstance(out, Bits):
                new[name] = out.payload
            else:
                new.pop(name, None)
        return s.with_files(new)
    raise TypeError(f"not an instruction: {i!r}")


def yld(i: EAInstruction, s: EAState, m: MachineStructure) -> Reply:
    """The total yield function; the divergence state replies divergent."""
    if s is DIVERGED_STATE:
        return Reply.DIVERGENT
    assert isinstance(s, Live)
    files = s.files

    def tf(cond: bool) -> Reply:
        return Reply.TRUE if cond else Reply.FALSE

    if isinstance(i, Set):
        return Reply.TRUE
    if isinstance(i, Remove):
        return tf(i.name in files)
    if isinstance(i, (Copy, Move)):
        return tf(i.src in files)
    if isinstance(i, Cat):
        return tf(i.src in files and i.dst in files)
    if isinstance(i, Eq):
        return tf(i.a in files and i.b in files and files[i.a] == files[i.b])
    if isinstance(i, Neq):
        return tf(i.a in files and i.b in files and files[i.a] != files[i.b])
    if isinstance(i, Exists):
        return tf(i.name in files)
    if isinstance(i, Load):
        return tf(i.name in files and m.exec_member(files[i.name]))
    if isinstance(i, Exe):
        chi = _exe_results(i, s, m)
        if chi is None:
            return Reply.FALSE
        first = m.mf.eval(1, chi)
        if first is DIV:
            return Reply.DIVERGENT
        return tf(isinstance(first, Bits))
    raise TypeError(f"not an instruction: {i!r}")


def ceff(s: EAState, instructions: Iterable[EAInstruction], m: MachineStructure) -> EAState:
    """Cumulative effect: left fold of the effect function."""
    state = s
    for i in instructions:
        state = eff(i, state, m)
    return state


# -- the service family -------------------------------------------------------


class EAService(Service):
    """One execution-architecture state wrapped as a service.

    Methods are instruction texts; a method outside the instruction grammar
    diverges (and moves to the divergence state).  Two services are equal
    when their backing states are equal — sound for reply functions, since
    the state determines all future replies.
    """

    def __init__(self, state: EAState, machine: MachineStructure):
        if isinstance(state, Live):
            state.check(machine)
        self.state = state
        self.machine = machine

    @property
    def is_undefined(self) -> bool:  # type: ignore[override]
        return self.state is DIVERGED_STATE

    def consume(self, method: str) -> Tuple[Reply, "EAService"]:
        try:
            instruction = parse_instruction(method)
        except InstructionParseError:
            return (Reply.DIVERGENT, EAService(DIVERGED_STATE, self.machine))
        reply = yld(instruction, self.state, self.machine)
        return (reply, EAService(eff(instruction, self.state, self.machine), self.machine))

    def __eq__(self, other) -> bool:
        return isinstance(other, EAService) and self.state == other.state

    def __hash__(self):
        return hash(self.state)

    def __repr__(self) -> str:
        return f"EAService({self.state!r})"


def service_of(s: EAState, m: MachineStructure) -> EAService:
    return EAService(s, m)


# -- snapshots and scripts ----------------------------------------------------


def save_snapshot(state: EAState, path) -> None:
    """Bit-exact text form: ``loaded=<bits|none>`` then one
    ``<name>\\t<bits>`` line per file in lexicographic order.  The divergence
    state is the single line ``diverged``."""
    with open(path, "w", encoding="ascii") as fh:
        if state is DIVERGED_STATE:
            fh.write("diverged\n")
            return
        assert isinstance(state, Live)
        loaded = "none" if state.loaded is None else state.loaded.to_text()
        fh.write(f"loaded={loaded}\n")
        for name in sorted(state.files):
            fh.write(f"{name}\t{state.files[name].to_text()}\n")


def load_snapshot(path, machine: Optional[MachineStructure] = None) -> EAState:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty snapshot")
    if lines[0] == "diverged":
        return DIVERGED_STATE
    if not lines[0].startswith("loaded="):
        raise ValueError(f"{path}: first line must be 'loaded=...' or 'diverged'")
    loaded_text = lines[0][len("loaded=") :]
    loaded = None if loaded_text == "none" else BitSeq.from_text(loaded_text)
    files: Dict[str, BitSeq] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        name, sep, bits = line.partition("\t")
        if not sep:
            raise ValueError(f"{path}:{line_no}: expected '<name>\\t<bits>'")
        files[_check_name(name)] = BitSeq.from_text(bits)
    state = Live(files, loaded)
    if machine is not None:
        state.check(machine)
    return state


def run_script(
    state: EAState, script_text: str, m: MachineStructure
) -> Tuple[EAState, List[Tuple[str, Reply]]]:
    """Run one instruction per line (``#`` comments and blanks skipped).

    Replies are collected per instruction; after divergence the remaining
    instructions still reply, all divergent, by absorption.
    """
    replies: List[Tuple[str, Reply]] = []
    current = state
    for raw in script_text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        instruction = parse_instruction(line)
        replies.append((line, yld(instruction, current, m)))
        current = eff(instruction, current, m)
    return current, replies
