"""Control code notations: code sets with a projection into executables.

A notation pairs a membership predicate over codes with two functions:
``project`` maps each code to the executable it stands for, and
``represent`` maps each code injectively to the bit sequence a machine can
consume.  Codes are opaque values (texts, bit sequences, anything); when
the carrier is itself a set of bit sequences both functions collapse to the
identity on executables.

Classification into assembly / source / intermediate / executable-form is a
registry concern: nothing at this level distinguishes the classes, so a
registry simply keeps them disjoint.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, List, Optional, Tuple

from .bits import BitSeq
from .machine import (
    DIV,
    MEA,
    Bits,
    MachineFunction,
    MachineStructure,
    Verdict,
    meaning,
)

__all__ = [
    "ControlCodeNotation",
    "NotationClass",
    "NotationRegistry",
    "NotationReport",
    "cc_meaning",
    "validate_notation",
    "transl_check",
]


@dataclass
class ControlCodeNotation:
    """A code set with projection into executables and bit representation.

    ``decode`` is the effective inverse of ``represent`` on members: it
    turns a bit sequence back into a code, or None when the sequence
    represents no member.  Every shipped notation supplies one, which is
    what makes "does this output land in the target notation?" decidable.
    """

    name: str
    member: Callable[[Any], bool]
    project: Callable[[Any], BitSeq]
    represent: Callable[[Any], BitSeq]
    decode: Callable[[BitSeq], Optional[Any]]
    carrier_is_bitseq: bool = False

    def require_member(self, code) -> None:
        if not self.member(code):
            raise ValueError(f"not a member of notation {self.name}: {code!r}")


class NotationClass(enum.Enum):
    ASSEMBLY = "assembly"
    SOURCE = "source"
    INTERMEDIATE = "intermediate"
    EXECUTABLE_FORM = "executable"


class NotationRegistry:
    """Per-machine registry keeping the notation classes pairwise disjoint."""

    def __init__(self):
        self._entries = {}

    def register(self, notation: ControlCodeNotation, cls: NotationClass) -> None:
        if notation.name in self._entries:
            raise ValueError(f"notation {notation.name!r} already registered")
        self._entries[notation.name] = (notation, cls)

    def notation(self, name: str) -> ControlCodeNotation:
        return self._entries[name][0]

    def class_of(self, name: str) -> NotationClass:
        return self._entries[name][1]

    def members(self, cls: NotationClass) -> Tuple[ControlCodeNotation, ...]:
        return tuple(n for n, c in self._entries.values() if c is cls)

    def names(self) -> Tuple[str, ...]:
        return tuple(self._entries)


def cc_meaning(m: MachineStructure, ccn: ControlCodeNotation, code) -> MachineFunction:
    """The meaning of a control code: the meaning of its projection."""
    ccn.require_member(code)
    return meaning(m, ccn.project(code))


@dataclass
class NotationReport:
    violations: List[Tuple[str, Any, str]] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, clause: str, code, detail: str) -> None:
        self.violations.append((clause, code, detail))


def validate_notation(
    m: MachineStructure, ccn: ControlCodeNotation, sample: Iterable[Any]
) -> NotationReport:
    """Check the notation laws on a finite sample of members:

    1. every projection lands in the executable set;
    2. representation is injective over the sample;
    3. on bit-sequence carriers, executable members project to themselves;
    4. on bit-sequence carriers members represent themselves, and any
       member whose representation is executable represents itself.
    """
    report = NotationReport()
    seen = {}
    for code in sample:
        if not ccn.member(code):
            report.add("membership", code, "sample element is not a member")
            continue
        report.checked += 1
        projected = ccn.project(code)
        if not m.exec_member(projected):
            report.add("projection", code, "projection is not executable")
        rep = ccn.represent(code)
        if rep in seen and seen[rep] != code:
            report.add("injectivity", code, f"representation collides with {seen[rep]!r}")
        seen[rep] = code
        if ccn.carrier_is_bitseq:
            if m.exec_member(code) and projected != code:
                raise_detail = "executable member does not project to itself"
                report.add("identity-projection", code, raise_detail)
            if rep != code:
                report.add("identity-representation", code, "member is not its own representation")
        if m.exec_member(rep) and rep != code:
            report.add("executable-representation", code, "representation is executable but differs from the code")
    return report


def transl_check(
    m: MachineStructure,
    cc,
    home: ControlCodeNotation,
    source: ControlCodeNotation,
    target: ControlCodeNotation,
    sample: Iterable[Any],
) -> Verdict:
    """Check that ``cc`` is a translator from ``source`` to ``target``.

    For every sample code, running the machine under ``cc``'s projection on
    the code's representation must yield the representation of some target
    member; membership of the output is decided by the target notation's
    decoder.  Meaningless or divergent outputs are reported distinctly from
    outputs that simply miss the target notation.
    """
    home.require_member(cc)
    exe = home.project(cc)
    for code in sample:
        if not source.member(code):
            return Verdict(False, witness=code, reason="sample element outside source notation")
        out = m.mf.eval(1, (exe, source.represent(code)))
        if out is MEA or out is DIV:
            return Verdict(False, witness=code, reason=f"machine output is {out!r}")
        assert isinstance(out, Bits)
        decoded = target.decode(out.payload)
        if decoded is None or not target.member(decoded):
            return Verdict(False, witness=code, reason="output not in target notation")
    return Verdict(True)
