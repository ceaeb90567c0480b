#!/usr/bin/env python3
"""Freeze the shipped corpora.

Three corpora live under ``src/ccwb/data/corpora``:

* ``asm`` — assembly programs for the assembler bootstrap experiment;
* ``src`` — source programs for the compiler bootstrap experiment;
* ``interp`` — source programs with input vectors for the interpreter
  correctness experiment (one program diverges on purpose).

Assembly corpus members are authored here in source form for readability
and frozen in compiled form.  Every corpus directory carries a manifest
pinning file digests; loaders verify them.
"""

from __future__ import annotations

import hashlib
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from ccwb.langs import host_compile  # noqa: E402

CORPORA = REPO / "src" / "ccwb" / "data" / "corpora"

# -- building blocks ---------------------------------------------------------

ECHO = """\
@loop:
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @end
LDM 0
OUTBIT 1
JMP @loop
@end:
HALT"""

FLIP = """\
# invert every bit of the first argument
@loop:
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @end
LDI 1
SUB 0
OUTBIT 1
JMP @loop
@end:
HALT"""

# -- assembly corpus (authored in source form, frozen compiled) --------------

ASM_PROGRAMS = {
    "halt": "HALT",
    "emit_one": "LDI 1\nOUTBIT 1\nHALT",
    "emit_zero": "LDI 0\nOUTBIT 1\nHALT",
    "echo": ECHO,
    "flip": FLIP,
    "pattern": "\n".join(f"LDI {b}\nOUTBIT 1" for b in (1, 0, 1, 0, 0, 1, 0, 1)) + "\nHALT",
    "two_buffers": "LDI 1\nOUTBIT 1\nLDI 0\nOUTBIT 2\nLDI 1\nOUTBIT 2\nHALT",
    "buffer_gap": "LDI 1\nOUTBIT 3\nHALT",
    "first_bit": "NEXTBIT\nSTM 0\nLDI 2\nSUB 0\nJZ @end\nLDM 0\nOUTBIT 1\n@end:\nHALT",
    "echo_two_args": """\
@one:
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @two
LDM 0
OUTBIT 1
JMP @one
@two:
NEXTARG
@stream:
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @end
LDM 0
OUTBIT 2
JMP @stream
@end:
HALT""",
    "count_parity": """\
# parity of the number of bits in argument 1
LDI 0
STM 1
@loop:
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @end
LDM 1
LDI 1
ADD 1
STM 1
JMP @loop
@end:
LDM 1
OUTBIT 1
HALT""",
    "mem_arith": """\
LDI 7
STM 5
LDI 3
STM 6
LDM 5
MUL 6
STM 7
LDM 7
MOD 6
OUTBIT 1
LDM 7
DIV 6
MOD 6
OUTBIT 1
HALT""",
    "indirect": """\
LDI 100
STM 1
LDI 1
STX 1
LDX 1
OUTBIT 1
HALT""",
    "divmod_zero": "LDI 5\nDIV 99\nOUTBIT 1\nLDI 5\nMOD 99\nOUTBIT 1\nHALT",
    "monus": "LDI 3\nSTM 0\nLDI 2\nSUB 0\nOUTBIT 1\nLDI 9\nSUB 0\nOUTBIT 1\nHALT",
    "jump_skip": """\
LDI 0
JZ @takeit
LDI 1
OUTBIT 1
@takeit:
LDI 1
JNZ @end
LDI 1
OUTBIT 1
@end:
LDI 1
OUTBIT 1
HALT""",
    "pc_off_end": "LDI 1\nOUTBIT 1\nJMP 4000000000",
    "nextarg_probe": "NEXTARG\nLDI 1\nOUTBIT 1\nHALT",
    "tight_loop": "@spin:\nJMP @spin",
    "big_values": """\
# values beyond 64 bits
LDI 4294967295
STM 0
MUL 0
MUL 0
STM 1
MOD 0
OUTBIT 1
LDM 1
DIV 0
DIV 0
SUB 0
OUTBIT 1
HALT""",
    "wide_operand": "LDI 4294967295\nSTM 0\nLDI 2\nSTM 1\nLDM 0\nMOD 1\nOUTBIT 1\nHALT",
    "sentinel_probe": """\
NEXTBIT
NEXTBIT
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @sawend
LDI 0
OUTBIT 1
HALT
@sawend:
LDI 1
OUTBIT 1
HALT""",
    "reverse": """\
# reverse the bits of argument 1
LDI 0
STM 1
@read:
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @dump
LDM 1
ADD 2
STM 3
LDM 0
STX 3
LDM 1
LDI 1
ADD 1
STM 1
JMP @read
@dump:
LDM 1
JZ @end
LDM 1
LDI 1
STM 4
LDM 1
SUB 4
STM 1
LDM 1
ADD 2
STM 3
LDX 3
OUTBIT 1
JMP @dump
@end:
HALT""",
    "unary_length": """\
# one output bit per input bit, all ones
@loop:
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @end
LDI 1
OUTBIT 1
JMP @loop
@end:
HALT""",
}

# "reverse" needs a base offset for its bit store; patch cell 2 to hold 10.
ASM_PROGRAMS["reverse"] = "LDI 10\nSTM 2\n" + ASM_PROGRAMS["reverse"]

# -- source corpus ------------------------------------------------------------

SRC_PROGRAMS = {
    "loop_echo": ECHO,
    "flip": FLIP,
    "comments": """\
# leading comment

LDI 1
# mid comment
OUTBIT 1

HALT""",
    "fwd_ref": """\
JMP @skip
LDI 0
OUTBIT 1
@skip:
LDI 1
OUTBIT 1
HALT""",
    "multi_label": """\
@a:
JMP @b
@b:
JMP @c
@c:
LDI 1
OUTBIT 1
HALT""",
    "pattern": "\n".join(f"LDI {b}\nOUTBIT 1" for b in (0, 1, 1, 0)) + "\nHALT",
    "divmod": """\
LDI 22
STM 0
LDI 7
STM 1
LDM 0
DIV 1
OUTBIT 1
LDM 0
MOD 1
OUTBIT 1
HALT""",
    "two_outputs": """\
@loop:
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @end
LDM 0
OUTBIT 1
LDI 1
SUB 0
OUTBIT 2
JMP @loop
@end:
HALT""",
    "counter": """\
# unary length of argument 1, then a parity bit on buffer 2
LDI 0
STM 1
@loop:
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @end
LDI 1
ADD 1
STM 1
LDI 1
OUTBIT 1
JMP @loop
@end:
LDM 1
OUTBIT 2
HALT""",
    "jz_jnz": """\
NEXTBIT
STM 0
LDI 2
SUB 0
JNZ @havebit
LDI 0
OUTBIT 1
HALT
@havebit:
LDM 0
JZ @zero
LDI 1
OUTBIT 1
HALT
@zero:
LDI 0
OUTBIT 1
HALT""",
    "nested": """\
# two ones per input bit
@outer:
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @end
LDI 2
STM 1
@inner:
LDM 1
JZ @outer
LDI 1
OUTBIT 1
LDM 1
STM 2
LDI 1
STM 3
LDM 2
SUB 3
STM 1
JMP @inner
@end:
HALT""",
    "plain_asm": "LDI 1\nOUTBIT 1\nLDI 0\nOUTBIT 1\nHALT",
}

SPIN = "@top:\nJMP @top"

# -- interpreter corpus: (source, input vectors) ------------------------------
# every vector carries at least one argument: the interpreter models a run
# that always forwards the arguments after the intermediate code.

INTERP_CASES = {
    "loop_echo": (ECHO, ["101", "e", "1 0", "x4f"]),
    "flip": (FLIP, ["101", "0", "111000 1"]),
    "two_outputs": (SRC_PROGRAMS["two_outputs"], ["10", "e", "0110"]),
    "counter": (SRC_PROGRAMS["counter"], ["1", "e", "10101"]),
    "jz_jnz": (SRC_PROGRAMS["jz_jnz"], ["1", "0", "e"]),
    "fwd_ref": (SRC_PROGRAMS["fwd_ref"], ["e", "1", "0 0"]),
    "divmod": (SRC_PROGRAMS["divmod"], ["e", "1", "11"]),
    "nested": (SRC_PROGRAMS["nested"], ["1", "10", "e"]),
    "pattern": (SRC_PROGRAMS["pattern"], ["e", "0", "101"]),
    "multi_label": (SRC_PROGRAMS["multi_label"], ["e", "1", "0"]),
    "args_hopper": (
        "NEXTARG\nNEXTBIT\nSTM 0\nLDI 2\nSUB 0\nJZ @end\nLDM 0\nOUTBIT 1\n@end:\nNEXTARG\nLDI 1\nOUTBIT 2\nHALT",
        ["1 0", "0", "1 1 1"],
    ),
    "spin": (SPIN, ["e", "1", "10"]),
}

# equivalence probe vectors shared by the bootstrap experiments
PROBES = ["-", "101", "e", "1 0011", "x4f 1"]


def _write(path: Path, text: str) -> None:
    path.write_bytes(text.encode("ascii"))


def _manifest(directory: Path) -> None:
    lines = []
    for path in sorted(directory.iterdir()):
        if path.name == "manifest.txt":
            continue
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        lines.append(f"{path.name} sha256={digest}")
    _write(directory / "manifest.txt", "\n".join(lines) + "\n")


def main() -> int:
    asm_dir = CORPORA / "asm"
    src_dir = CORPORA / "src"
    interp_dir = CORPORA / "interp"
    for d in (asm_dir, src_dir, interp_dir):
        d.mkdir(parents=True, exist_ok=True)
        for old in d.iterdir():
            old.unlink()

    for name, src in sorted(ASM_PROGRAMS.items()):
        asm = host_compile(src)
        _write(asm_dir / f"{name}.asm", asm + "\n" if asm else "")
    _write(asm_dir / "probes.txt", "\n".join(PROBES) + "\n")
    _manifest(asm_dir)

    for name, src in sorted(SRC_PROGRAMS.items()):
        host_compile(src)  # must be valid
        _write(src_dir / f"{name}.src", src + "\n")
    _write(src_dir / "probes.txt", "\n".join(PROBES) + "\n")
    _manifest(src_dir)

    for name, (src, vectors) in sorted(INTERP_CASES.items()):
        host_compile(src)
        _write(interp_dir / f"{name}.src", src + "\n")
        _write(interp_dir / f"{name}.inputs", "\n".join(vectors) + "\n")
    _manifest(interp_dir)

    print(f"asm corpus: {len(ASM_PROGRAMS)} programs")
    print(f"src corpus: {len(SRC_PROGRAMS)} programs")
    print(f"interp corpus: {len(INTERP_CASES)} cases")
    return 0


if __name__ == "__main__":
    sys.exit(main())
