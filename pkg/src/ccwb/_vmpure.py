"""Pure-Python execution engine for the toy machine.

Reference semantics; the compiled core in ``_vmcore`` must agree with this
engine bit for bit on every run.  Keep the loop free of attribute lookups —
it is the hot path whenever the compiled core is unavailable or bails out
on values beyond 64 bits.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

# Opcode numbers; order is the wire encoding.
HALT = 0
LDI = 1
LDM = 2
LDX = 3
STM = 4
STX = 5
ADD = 6
SUB = 7
MUL = 8
DIV = 9
MOD = 10
JMP = 11
JZ = 12
JNZ = 13
NEXTBIT = 14
NEXTARG = 15
OUTBIT = 16


def execute(
    opcodes: Sequence[int],
    operands: Sequence[int],
    inputs: Sequence[bytes],
    fuel: int,
) -> Tuple[bool, Dict[int, bytes], int]:
    """Run a decoded program.

    Returns ``(halted, written, count)`` where ``written`` maps the output
    buffers that received bits to their contents and ``count`` is the highest
    written buffer index.  ``halted`` False means the fuel ran out first.

    Semantics notes mirrored by the compiled core:

    * the accumulator and memory cells are unbounded non-negative integers;
    * SUB is monus, DIV/MOD with divisor 0 yield 0;
    * a jump beyond the program, or the program counter running off the
      end, halts;
    * NEXTBIT reads the next bit of the current argument, or 2 once the
      argument is exhausted (never advancing past it); when the current
      argument does not exist at all (a run with no arguments), demanding a
      bit halts the machine like NEXTARG does — both halts make runs on an
      input vector and on any extension of it step-identical up to the
      halt, which is what the input-extension rules of machine functions
      require;
    * NEXTARG advances to the next argument and halts the machine when
      there is none;
    * OUTBIT appends the accumulator's low bit to its buffer; buffer 0 is
      ignored;
    * each executed instruction costs one unit of fuel; halting by running
      off the end costs none.
    """
    pc = 0
    acc = 0
    mem: Dict[int, int] = {}
    arg = 0
    off = 0
    outs: Dict[int, List[int]] = {}
    count = 0
    n = len(opcodes)
    nin = len(inputs)

    while True:
        if pc >= n:
            break
        if fuel == 0:
            return (False, {}, 0)
        fuel -= 1
        op = opcodes[pc]
        a = operands[pc]
        if op == NEXTBIT:
            if arg >= nin:
                break
            cur = inputs[arg]
            if off < len(cur):
                acc = cur[off]
                off += 1
            else:
                acc = 2
            pc += 1
        elif op == LDM:
            acc = mem.get(a, 0)
            pc += 1
        elif op == STM:
            mem[a] = acc
            pc += 1
        elif op == ADD:
            acc += mem.get(a, 0)
            pc += 1
        elif op == SUB:
            v = mem.get(a, 0)
            acc = acc - v if acc > v else 0
            pc += 1
        elif op == MUL:
            acc *= mem.get(a, 0)
            pc += 1
        elif op == JZ:
            pc = a if acc == 0 else pc + 1
        elif op == JNZ:
            pc = a if acc != 0 else pc + 1
        elif op == JMP:
            pc = a
        elif op == LDI:
            acc = a
            pc += 1
        elif op == LDX:
            acc = mem.get(mem.get(a, 0), 0)
            pc += 1
        elif op == STX:
            mem[mem.get(a, 0)] = acc
            pc += 1
        elif op == DIV:
            v = mem.get(a, 0)
            acc = acc // v if v else 0
            pc += 1
        elif op == MOD:
            v = mem.get(a, 0)
            acc = acc % v if v else 0
            pc += 1
        elif op == OUTBIT:
            if a:
                try:
                    outs[a].append(acc & 1)
                except KeyError:
                    outs[a] = [acc & 1]
                    if a > count:
                        count = a
            pc += 1
        elif op == NEXTARG:
            if arg + 1 >= nin:
                break
            arg += 1
            off = 0
            pc += 1
        else:  # HALT
            break

    return (True, {k: bytes(v) for k, v in outs.items()}, count)
