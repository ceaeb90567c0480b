"""The toy machine: a fuel-bounded bytecode VM realizing a code-controlled
machine structure.

Programs are sequences of 40-bit instructions (8-bit opcode, 32-bit
big-endian operand).  Executable codes are exactly the bit sequences that
decode: the length is a multiple of 40, every opcode byte names one of the
17 instructions, and operand-less instructions carry operand 0.

Input is demand driven: programs pull bits one at a time from the current
argument (NEXTBIT, with 2 signalling exhaustion) and advance between
arguments explicitly (NEXTARG, halting when no argument remains).  A demand
on an argument that does not exist at all — NEXTBIT when the run received
no arguments, or NEXTARG past the last one — halts the machine, committing
the outputs written so far.  This design makes the machine-function input
rules hold by construction: a run on an input vector and a run on any
extension of it are step-identical until the shorter run halts on such a
demand, so extra inputs can only extend what a halted run produced and can
never rescue a diverging one.

Two interchangeable engines execute programs: a compiled core (built from
``_vmcore.pyx``) and a pure-Python fallback.  The compiled core is selected
at import when available; set ``CCWB_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os
from array import array
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

from . import _vmpure
from .bits import EMPTY, BitSeq
from .machine import (
    DIVERGED,
    HaltedOutputs,
    MachineFunction,
    MachineStructure,
    NotExecutableError,
    StructureKind,
)

__all__ = [
    "MNEMONICS",
    "NO_OPERAND",
    "ToyInstruction",
    "ToyProgram",
    "decode",
    "decode_verbose",
    "encode",
    "Halted",
    "FUEL_EXHAUSTED",
    "run",
    "as_machine_structure",
    "active_engine",
    "available_engines",
]

MNEMONICS = (
    "HALT", "LDI", "LDM", "LDX", "STM", "STX", "ADD", "SUB", "MUL",
    "DIV", "MOD", "JMP", "JZ", "JNZ", "NEXTBIT", "NEXTARG", "OUTBIT",
)
OPCODE_OF = {name: i for i, name in enumerate(MNEMONICS)}
NO_OPERAND = frozenset({"HALT", "NEXTBIT", "NEXTARG"})
_NO_OPERAND_CODES = frozenset(OPCODE_OF[m] for m in NO_OPERAND)

INSTRUCTION_BITS = 40
OPERAND_LIMIT = 1 << 32

_vmcore = None
if not os.environ.get("CCWB_PURE"):
    try:
        from . import _vmcore  # type: ignore[no-redef]
    except ImportError:
        _vmcore = None


@dataclass(frozen=True)
class ToyInstruction:
    opcode: int
    operand: int = 0

    def __post_init__(self):
        if not 0 <= self.opcode < len(MNEMONICS):
            raise ValueError(f"unknown opcode {self.opcode}")
        if not 0 <= self.operand < OPERAND_LIMIT:
            raise ValueError(f"operand {self.operand} out of range")
        if self.opcode in _NO_OPERAND_CODES and self.operand != 0:
            raise ValueError(f"{self.mnemonic} carries no operand")

    @property
    def mnemonic(self) -> str:
        return MNEMONICS[self.opcode]

    @classmethod
    def of(cls, mnemonic: str, operand: int = 0) -> "ToyInstruction":
        return cls(OPCODE_OF[mnemonic], operand)


@dataclass(frozen=True)
class ToyProgram:
    instructions: Tuple[ToyInstruction, ...]

    def __len__(self) -> int:
        return len(self.instructions)

    @classmethod
    def of(cls, *specs) -> "ToyProgram":
        """Build from ("LDI", 5) pairs or bare mnemonics."""
        instrs = []
        for spec in specs:
            if isinstance(spec, ToyInstruction):
                instrs.append(spec)
            elif isinstance(spec, str):
                instrs.append(ToyInstruction.of(spec))
            else:
                instrs.append(ToyInstruction.of(*spec))
        return cls(tuple(instrs))


def encode(program: ToyProgram) -> BitSeq:
    """Bit-exact 40-bit-per-instruction encoding."""
    out = bytearray()
    for ins in program.instructions:
        word = (ins.opcode << 32) | ins.operand
        out.extend((word >> k) & 1 for k in range(INSTRUCTION_BITS - 1, -1, -1))
    return BitSeq(bytes(out))


def decode_verbose(bits: BitSeq) -> Tuple[Optional[ToyProgram], Optional[str]]:
    """Decode, returning a reason when the sequence is not executable."""
    if len(bits) % INSTRUCTION_BITS:
        return None, f"length {len(bits)} is not a multiple of {INSTRUCTION_BITS}"
    instrs = []
    raw = bits.raw()
    for base in range(0, len(raw), INSTRUCTION_BITS):
        opcode = 0
        for b in raw[base : base + 8]:
            opcode = opcode << 1 | b
        operand = 0
        for b in raw[base + 8 : base + INSTRUCTION_BITS]:
            operand = operand << 1 | b
        index = base // INSTRUCTION_BITS
        if opcode >= len(MNEMONICS):
            return None, f"instruction {index}: opcode byte {opcode} out of range"
        if opcode in _NO_OPERAND_CODES and operand != 0:
            return None, (
                f"instruction {index}: {MNEMONICS[opcode]} carries operand {operand}"
            )
        instrs.append(ToyInstruction(opcode, operand))
    return ToyProgram(tuple(instrs)), None


def decode(bits: BitSeq) -> Optional[ToyProgram]:
    """The executable-code predicate: a program, or None for "not executable"."""
    program, _ = decode_verbose(bits)
    return program


@dataclass(frozen=True)
class Halted:
    """Outputs of a halting run: buffers 1..count, stored sparsely.

    Buffers below ``count`` that were never written read as the empty bit
    sequence.  ``count`` can be as large as the biggest buffer index a
    program names, so the dense view is materialized only on demand.
    """

    count: int
    written: Dict[int, BitSeq]

    def output(self, n: int) -> Optional[BitSeq]:
        """Buffer ``n``, or None when fewer than ``n`` outputs exist."""
        if 1 <= n <= self.count:
            return self.written.get(n, EMPTY)
        return None

    def outputs(self, limit: int = 4096) -> Tuple[BitSeq, ...]:
        if self.count > limit:
            raise ValueError(f"{self.count} buffers; raise limit to materialize")
        return tuple(self.written.get(i, EMPTY) for i in range(1, self.count + 1))


class _FuelExhausted:
    __slots__ = ()

    def __repr__(self):
        return "FuelExhausted"


FUEL_EXHAUSTED = _FuelExhausted()


def _program_arrays(program: ToyProgram) -> Tuple[bytes, array]:
    ops = bytes(ins.opcode for ins in program.instructions)
    args = array("I", (ins.operand for ins in program.instructions))
    return ops, args


def _execute(program: ToyProgram, inputs: Sequence[BitSeq], fuel: int, engine: Optional[str]):
    ops, args = _program_arrays(program)
    raw_inputs = [b.raw() for b in inputs]
    if engine is None:
        engine = "compiled" if _vmcore is not None else "pure"
    if engine == "compiled":
        if _vmcore is None:
            raise RuntimeError("compiled core is not available")
        try:
            return _vmcore.execute(ops, args, raw_inputs, fuel)
        except _vmcore.Bailout:
            return _vmpure.execute(ops, args, raw_inputs, fuel)
    if engine == "pure":
        return _vmpure.execute(ops, args, raw_inputs, fuel)
    raise ValueError(f"unknown engine {engine!r}")


def run(exe: BitSeq, inputs: Sequence[BitSeq] = (), fuel: int = 1_000_000, engine: Optional[str] = None):
    """Run an executable bit sequence.

    Returns :class:`Halted` or :data:`FUEL_EXHAUSTED`.  Raises
    :class:`NotExecutableError` when ``exe`` does not decode.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")
    program, reason = decode_verbose(exe)
    if program is None:
        raise NotExecutableError(reason)
    halted, written, count = _execute(program, inputs, fuel, engine)
    if not halted:
        return FUEL_EXHAUSTED
    return Halted(count, {k: BitSeq(v) for k, v in written.items()})


def active_engine() -> str:
    return "compiled" if _vmcore is not None else "pure"


def available_engines() -> Tuple[str, ...]:
    return ("compiled", "pure") if _vmcore is not None else ("pure",)


def as_machine_structure(fuel: int, engine: Optional[str] = None) -> MachineStructure:
    """The toy machine as a code-controlled machine structure.

    Conventions beyond the VM itself:

    * with no inputs at all there is no code to run, so every index is
      meaningless;
    * a non-executable first input means the machine halts producing no
      output (every index meaningless) rather than diverging;
    * fuel exhaustion is the divergence verdict, uniformly over indices.
    """
    if fuel < 1:
        raise ValueError("fuel must be positive")

    def outcome(chi):
        if not chi:
            return HaltedOutputs(0)
        program, _ = decode_verbose(chi[0])
        if program is None:
            return HaltedOutputs(0)
        result = _execute(program, chi[1:], fuel, engine)
        halted, written, count = result
        if not halted:
            return DIVERGED
        return HaltedOutputs(count, {k: BitSeq(v) for k, v in written.items()})

    mf = MachineFunction.from_outcomes(outcome, fuel_budget=fuel)
    return MachineStructure(
        bseq_member=lambda b: True,
        mf=mf,
        exec_member=lambda b: decode(b) is not None,
        kind=StructureKind.CODE_CONTROLLED,
    )
