#!/usr/bin/env python3
"""Generate the frozen self-hosted translator assets.

The translators shipped under ``src/ccwb/data/assets`` are written in the
toy languages themselves: an assembler in asm, two compilers in src, and an
interpreter frozen as an executable.  Authoring toy-machine code by hand is
error prone, so this script assembles the programs from composable code
templates and pushes them through the host oracles.  The outputs are frozen
with content digests; the test suite validates them behaviourally only, so
regenerating is needed solely when the templates change.

Usage:
    python tools/gen_assets.py --check    # verify frozen files match
    python tools/gen_assets.py --write    # (re)write assets + digests
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from ccwb import toyvm  # noqa: E402
from ccwb.langs import host_assemble, host_compile, text_rep  # noqa: E402

ASSET_DIR = REPO / "src" / "ccwb" / "data" / "assets"

MNEMONICS = toyvm.MNEMONICS
MNEM_CODE = {m: int.from_bytes(m.encode("ascii"), "big") for m in MNEMONICS}

LF = 10
SPACE = 32
HASH = 35
COLON = 58
AT = 64
ZERO = 48

# Memory layout shared by the generated programs.  Named cells live in
# 0..999, small buffers in 1000..1999, and the bulk regions above that.
BITBUF = 1000  # bit staging for MSB-first emission
DIGBUF = 1100  # decimal digit staging
TEXT = 100_000  # buffered input text (compiler)
TAB = 400_000  # label table, 3 cells per entry: text offset, length, index
ASMBUF = 700_000  # compiled assembly text (icn compiler)
OPS = 100_000  # decoded opcodes (interpreter)
ARGS = 1_000_000  # decoded operands (interpreter)
EMU = 16_777_216  # emulated memory base (interpreter)


class Prog:
    """Builds source text for the toy machine: ops, labels, named cells and
    pooled constants.  Constants are materialized by a prologue emitted ahead
    of the body, so the body can refer to them freely."""

    def __init__(self):
        self.body = []
        self._labels = 0
        self._cells = {}
        self._next_cell = 0
        self._consts = {}

    # -- assembly surface ------------------------------------------------

    def raw(self, line: str):
        self.body.append(line)

    def comment(self, text: str):
        self.body.append(f"# {text}")

    def fresh(self, stem: str) -> str:
        self._labels += 1
        return f"{stem}_{self._labels}"

    def label(self, name: str):
        self.body.append(f"@{name}:")

    def cell(self, name: str) -> int:
        if name not in self._cells:
            self._cells[name] = self._next_cell
            self._next_cell += 1
        return self._cells[name]

    def konst(self, value: int) -> str:
        """A cell holding ``value``, initialized by the prologue."""
        name = f"k{value}"
        if value not in self._consts:
            self._consts[value] = name
            self.cell(name)
        return name

    def op(self, mnemonic: str, operand=None):
        if operand is None:
            self.body.append(mnemonic)
        elif isinstance(operand, str) and operand.startswith("@"):
            self.body.append(f"{mnemonic} {operand}")
        else:
            addr = self.cell(operand) if isinstance(operand, str) else operand
            self.body.append(f"{mnemonic} {addr}")

    def ldi(self, v):
        self.op("LDI", v)

    def ldm(self, c):
        self.op("LDM", c)

    def ldx(self, c):
        self.op("LDX", c)

    def stm(self, c):
        self.op("STM", c)

    def stx(self, c):
        self.op("STX", c)

    def add(self, c):
        self.op("ADD", c)

    def sub(self, c):
        self.op("SUB", c)

    def mul(self, c):
        self.op("MUL", c)

    def div(self, c):
        self.op("DIV", c)

    def mod(self, c):
        self.op("MOD", c)

    def jmp(self, label):
        self.op("JMP", f"@{label}")

    def jz(self, label):
        self.op("JZ", f"@{label}")

    def jnz(self, label):
        self.op("JNZ", f"@{label}")

    def nextbit(self):
        self.op("NEXTBIT")

    def nextarg(self):
        self.op("NEXTARG")

    def outbit(self, buf: int):
        self.op("OUTBIT", buf)

    def halt(self):
        self.op("HALT")

    # -- macros -----------------------------------------------------------

    def inc(self, c, by: int = 1):
        self.ldm(c)
        self.add(self.konst(by))
        self.stm(c)

    def seti(self, c, v: int):
        self.ldi(v)
        self.stm(c)

    def copy(self, dst, src):
        self.ldm(src)
        self.stm(dst)

    def jeq_const(self, c, value: int, label: str):
        """Jump when cell ``c`` holds ``value`` (monus both ways sums to 0)."""
        if value == 0:
            self.ldm(c)
            self.jz(label)
            return
        k = self.konst(value)
        self.ldm(c)
        self.sub(k)
        self.stm("cmp_t")
        self.ldm(k)
        self.sub(c)
        self.add("cmp_t")
        self.jz(label)

    def jeq_cells(self, a, b, label: str):
        self.ldm(a)
        self.sub(b)
        self.stm("cmp_t")
        self.ldm(b)
        self.sub(a)
        self.add("cmp_t")
        self.jz(label)

    def read_char_input(self, dest, eof_label: str):
        """Read one ASCII char (8 bits, MSB first) from the current argument
        into ``dest``; jump out when the argument is exhausted."""
        self.nextbit()
        self.stm("rc_bit")
        self.ldi(2)
        self.sub("rc_bit")
        self.jz(eof_label)
        self.ldm("rc_bit")
        self.stm(dest)
        for _ in range(7):
            self.nextbit()
            self.stm("rc_bit")
            self.ldm(dest)
            self.mul(self.konst(2))
            self.add("rc_bit")
            self.stm(dest)

    def emit_value_bits(self, src_cell, nbits: int, buf: int):
        """Write the low ``nbits`` bits of a cell to an output buffer,
        MSB first, via the bit staging area."""
        fill = self.fresh("fb")
        filled = self.fresh("fd")
        out = self.fresh("ob")
        done = self.fresh("od")
        k1 = self.konst(1)
        k2 = self.konst(2)
        kbuf = self.konst(BITBUF)
        self.copy("ebv_v", src_cell)
        self.seti("ebv_i", nbits)
        self.label(fill)
        self.ldm("ebv_i")
        self.jz(filled)
        self.ldm("ebv_i")
        self.sub(k1)
        self.stm("ebv_i")
        self.ldm("ebv_i")
        self.add(kbuf)
        self.stm("ebv_p")
        self.ldm("ebv_v")
        self.mod(k2)
        self.stx("ebv_p")
        self.ldm("ebv_v")
        self.div(k2)
        self.stm("ebv_v")
        self.jmp(fill)
        self.label(filled)
        self.seti("ebv_i", 0)
        self.label(out)
        self.ldi(nbits)
        self.sub("ebv_i")
        self.jz(done)
        self.ldm("ebv_i")
        self.add(kbuf)
        self.stm("ebv_p")
        self.ldx("ebv_p")
        self.outbit(buf)
        self.ldm("ebv_i")
        self.add(k1)
        self.stm("ebv_i")
        self.jmp(out)
        self.label(done)

    def out_const_text(self, text: str, buf: int):
        """Emit a fixed ASCII message bit by bit (used for diagnostics)."""
        for bit in text_rep(text):
            self.ldi(bit)
            self.outbit(buf)

    # -- finalization -----------------------------------------------------

    def _const_prologue(self):
        lines = []
        small = sorted(v for v in self._consts if v < 2**32)
        big = sorted(v for v in self._consts if v >= 2**32)
        for v in small:
            lines.append(f"LDI {v}")
            lines.append(f"STM {self.cell(self._consts[v])}")
        if big:
            k65536 = self.cell(self.konst(65536))
            if 65536 not in [v for v in small]:
                lines.append("LDI 65536")
                lines.append(f"STM {k65536}")
            a = self.cell("big_a")
            b = self.cell("big_b")
            for v in big:
                chunks = []
                t = v
                while t:
                    chunks.append(t % 65536)
                    t //= 65536
                chunks.reverse()
                lines.append(f"LDI {chunks[0]}")
                for c in chunks[1:]:
                    lines.append(f"STM {a}")
                    lines.append(f"LDI {c}")
                    lines.append(f"STM {b}")
                    lines.append(f"LDM {a}")
                    lines.append(f"MUL {k65536}")
                    lines.append(f"ADD {b}")
                lines.append(f"STM {self.cell(self._consts[v])}")
        return lines

    def source(self, title: str) -> str:
        header = [f"# {title}", "# generated by tools/gen_assets.py"]
        prologue = ["# constant pool"] + self._const_prologue()
        return "\n".join(header + prologue + self.body)


# ---------------------------------------------------------------------------
# assembler: asm text (ASCII bits) -> executable encoding
# ---------------------------------------------------------------------------


def emit_assembler(p: Prog, read_char, out_buf: int = 1, err_buf: int = 2, marker_buf: int = 3, stop: str = "halt"):
    """The assembler proper, parameterized over its character source.

    Parses ``MNEMONIC [decimal]`` lines and emits 8 opcode bits followed by
    32 operand bits per line.  On an unknown mnemonic it writes ``ERR`` to
    the diagnostics buffer and stops without the completion marker.
    """
    line_loop = p.fresh("as_line")
    mn_loop = p.fresh("as_mn")
    op_loop = p.fresh("as_opd")
    eof_line = p.fresh("as_eofline")
    emit_line = p.fresh("as_emit")
    do_emit = p.fresh("as_word")
    error = p.fresh("as_err")
    finish = p.fresh("as_fin")

    p.comment("per-line parse: mnemonic code accumulates base 256, operand base 10")
    p.label(line_loop)
    p.ldi(0)
    p.stm("as_mncode")
    p.stm("as_operand")
    read_char(p, "as_ch", finish)
    p.copy("as_mncode", "as_ch")
    p.label(mn_loop)
    read_char(p, "as_ch", eof_line)
    p.jeq_const("as_ch", SPACE, op_loop)
    p.jeq_const("as_ch", LF, emit_line)
    p.ldm("as_mncode")
    p.mul(p.konst(256))
    p.add("as_ch")
    p.stm("as_mncode")
    p.jmp(mn_loop)
    p.label(op_loop)
    read_char(p, "as_ch", eof_line)
    p.jeq_const("as_ch", LF, emit_line)
    p.ldm("as_ch")
    p.sub(p.konst(ZERO))
    p.stm("as_digit")
    p.ldm("as_operand")
    p.mul(p.konst(10))
    p.add("as_digit")
    p.stm("as_operand")
    p.jmp(op_loop)
    p.label(eof_line)
    p.ldi(1)
    p.stm("as_ateof")
    p.jmp(emit_line)

    p.comment("mnemonic table dispatch")
    p.label(emit_line)
    arms = []
    for mnemonic in MNEMONICS:
        arm = p.fresh("as_m")
        arms.append(arm)
        p.jeq_const("as_mncode", MNEM_CODE[mnemonic], arm)
    p.jmp(error)
    for mnemonic, arm in zip(MNEMONICS, arms):
        p.label(arm)
        p.seti("as_opcode", toyvm.OPCODE_OF[mnemonic])
        p.jmp(do_emit)

    p.label(do_emit)
    p.emit_value_bits("as_opcode", 8, out_buf)
    p.emit_value_bits("as_operand", 32, out_buf)
    p.ldm("as_ateof")
    p.jnz(finish)
    p.jmp(line_loop)

    p.label(error)
    p.out_const_text("ERR", err_buf)
    p.halt()

    p.label(finish)
    p.ldi(1)
    p.outbit(marker_buf)
    if stop == "halt":
        p.halt()
    else:
        p.jmp(stop)


def gen_assembler_src() -> str:
    p = Prog()
    p.comment("assembler: reads assembly text as ASCII bits from argument 1,")
    p.comment("writes the executable encoding to buffer 1, diagnostics to")
    p.comment("buffer 2, and a completion bit to buffer 3")

    def read_input(prog, dest, eof_label):
        prog.read_char_input(dest, eof_label)

    emit_assembler(p, read_input)
    return p.source("self-hosted assembler")


# ---------------------------------------------------------------------------
# compiler: src text (ASCII bits) -> asm text (ASCII bits)
# ---------------------------------------------------------------------------


def _getch(p: Prog, pos_cell: str, base: int, dest: str):
    p.ldm(pos_cell)
    p.add(p.konst(base))
    p.stm("tp")
    p.ldx("tp")
    p.stm(dest)


def emit_compiler(p: Prog, emit_char, done_label: str, err_label: str):
    """Two-pass label resolution over text buffered at TEXT.

    Expects the input length in cell ``n``.  Pass 1 counts emitted
    instructions and records ``@name:`` definitions as (offset, length,
    index) entries; pass 2 re-emits instruction lines, rewriting ``@name``
    operands to decimal indices.  ``emit_char`` writes one character cell to
    the output channel.
    """
    k1 = p.konst(1)
    k3 = p.konst(3)
    ktab = p.konst(TAB)

    # -- pass 1
    p1_loop = p.fresh("c1_loop")
    p1_adv = p.fresh("c1_adv")
    p1_label = p.fresh("c1_label")
    p1_name = p.fresh("c1_name")
    p1_rec = p.fresh("c1_rec")
    p1_skip = p.fresh("c1_skip")
    p1_done = p.fresh("c1_done")

    p.comment("pass 1: index labels")
    p.ldi(0)
    p.stm("pos")
    p.stm("icount")
    p.stm("nlabels")
    p.label(p1_loop)
    p.ldm("n")
    p.sub("pos")
    p.jz(p1_done)
    _getch(p, "pos", TEXT, "ch")
    p.jeq_const("ch", HASH, p1_skip)
    p.jeq_const("ch", LF, p1_adv)
    p.jeq_const("ch", AT, p1_label)
    p.inc("icount")
    p.jmp(p1_skip)
    p.label(p1_adv)
    p.inc("pos")
    p.jmp(p1_loop)
    p.label(p1_label)
    p.inc("pos")
    p.copy("nptr", "pos")
    p.label(p1_name)
    p.ldm("n")
    p.sub("pos")
    p.jz(p1_rec)
    _getch(p, "pos", TEXT, "ch")
    p.jeq_const("ch", COLON, p1_rec)
    p.inc("pos")
    p.jmp(p1_name)
    p.label(p1_rec)
    p.ldm("pos")
    p.sub("nptr")
    p.stm("nlen")
    p.ldm("nlabels")
    p.mul(k3)
    p.add(ktab)
    p.stm("tp")
    p.ldm("nptr")
    p.stx("tp")
    p.ldm("tp")
    p.add(k1)
    p.stm("tp")
    p.ldm("nlen")
    p.stx("tp")
    p.ldm("tp")
    p.add(k1)
    p.stm("tp")
    p.ldm("icount")
    p.stx("tp")
    p.inc("nlabels")
    p.jmp(p1_skip)
    p.label(p1_skip)
    p.ldm("n")
    p.sub("pos")
    p.jz(p1_done)
    _getch(p, "pos", TEXT, "ch")
    p.inc("pos")
    p.jeq_const("ch", LF, p1_loop)
    p.jmp(p1_skip)
    p.label(p1_done)

    # -- pass 2
    p2_loop = p.fresh("c2_loop")
    p2_adv = p.fresh("c2_adv")
    p2_skip = p.fresh("c2_skip")
    p2_nosep = p.fresh("c2_nosep")
    p2_mn = p.fresh("c2_mn")
    p2_space = p.fresh("c2_space")
    p2_copy = p.fresh("c2_copy")
    p2_lref = p.fresh("c2_lref")
    p2_name = p.fresh("c2_name")
    p2_find = p.fresh("c2_find")
    lk_loop = p.fresh("c2_lk")
    lk_len_ok = p.fresh("c2_lklen")
    lkc_loop = p.fresh("c2_lkc")
    lkc_ok = p.fresh("c2_lkcok")
    lk_next = p.fresh("c2_lknext")
    lk_found = p.fresh("c2_hit")

    p.comment("pass 2: emit instruction lines, resolving label references")
    p.ldi(0)
    p.stm("pos")
    p.stm("sep")
    p.label(p2_loop)
    p.ldm("n")
    p.sub("pos")
    p.jz(done_label)
    _getch(p, "pos", TEXT, "ch")
    p.jeq_const("ch", HASH, p2_skip)
    p.jeq_const("ch", LF, p2_adv)
    p.jeq_const("ch", AT, p2_skip)
    p.ldm("sep")
    p.jz(p2_nosep)
    p.seti("och", LF)
    emit_char(p, "och")
    p.label(p2_nosep)
    p.seti("sep", 1)
    p.label(p2_mn)
    p.ldm("n")
    p.sub("pos")
    p.jz(p2_loop)
    _getch(p, "pos", TEXT, "ch")
    p.jeq_const("ch", LF, p2_adv)
    p.jeq_const("ch", SPACE, p2_space)
    emit_char(p, "ch")
    p.inc("pos")
    p.jmp(p2_mn)
    p.label(p2_adv)
    p.inc("pos")
    p.jmp(p2_loop)
    p.label(p2_skip)
    p.ldm("n")
    p.sub("pos")
    p.jz(p2_loop)
    _getch(p, "pos", TEXT, "ch")
    p.inc("pos")
    p.jeq_const("ch", LF, p2_loop)
    p.jmp(p2_skip)
    p.label(p2_space)
    p.inc("pos")
    p.ldm("n")
    p.sub("pos")
    p.jz(p2_loop)
    _getch(p, "pos", TEXT, "ch")
    p.jeq_const("ch", AT, p2_lref)
    p.seti("och", SPACE)
    emit_char(p, "och")
    p.label(p2_copy)
    emit_char(p, "ch")
    p.inc("pos")
    p.ldm("n")
    p.sub("pos")
    p.jz(p2_loop)
    _getch(p, "pos", TEXT, "ch")
    p.jeq_const("ch", LF, p2_adv)
    p.jmp(p2_copy)
    p.label(p2_lref)
    p.seti("och", SPACE)
    emit_char(p, "och")
    p.inc("pos")
    p.copy("nptr", "pos")
    p.label(p2_name)
    p.ldm("n")
    p.sub("pos")
    p.jz(p2_find)
    _getch(p, "pos", TEXT, "ch")
    p.jeq_const("ch", LF, p2_find)
    p.inc("pos")
    p.jmp(p2_name)
    p.label(p2_find)
    p.ldm("pos")
    p.sub("nptr")
    p.stm("nlen")
    p.comment("linear scan of the label table")
    p.seti("lk_i", 0)
    p.label(lk_loop)
    p.ldm("nlabels")
    p.sub("lk_i")
    p.jz(err_label)
    p.ldm("lk_i")
    p.mul(k3)
    p.add(ktab)
    p.stm("tp")
    p.ldx("tp")
    p.stm("e_ptr")
    p.ldm("tp")
    p.add(k1)
    p.stm("tp")
    p.ldx("tp")
    p.stm("e_len")
    p.jeq_cells("e_len", "nlen", lk_len_ok)
    p.jmp(lk_next)
    p.label(lk_len_ok)
    p.seti("lk_j", 0)
    p.label(lkc_loop)
    p.ldm("nlen")
    p.sub("lk_j")
    p.jz(lk_found)
    p.ldm("e_ptr")
    p.add("lk_j")
    p.add(p.konst(TEXT))
    p.stm("tp")
    p.ldx("tp")
    p.stm("ch_a")
    p.ldm("nptr")
    p.add("lk_j")
    p.add(p.konst(TEXT))
    p.stm("tp")
    p.ldx("tp")
    p.stm("ch_b")
    p.jeq_cells("ch_a", "ch_b", lkc_ok)
    p.jmp(lk_next)
    p.label(lkc_ok)
    p.inc("lk_j")
    p.jmp(lkc_loop)
    p.label(lk_next)
    p.inc("lk_i")
    p.jmp(lk_loop)
    p.label(lk_found)
    p.ldm("lk_i")
    p.mul(k3)
    p.add(ktab)
    p.add(p.konst(2))
    p.stm("tp")
    p.ldx("tp")
    p.stm("dec_v")
    emit_decimal(p, emit_char)
    p.jmp(p2_loop)


def emit_decimal(p: Prog, emit_char):
    """Emit cell ``dec_v`` as canonical decimal through ``emit_char``."""
    nz = p.fresh("dc_nz")
    collect = p.fresh("dc_c")
    collected = p.fresh("dc_cd")
    rev = p.fresh("dc_r")
    done = p.fresh("dc_d")
    k10 = p.konst(10)
    k48 = p.konst(ZERO)
    kdig = p.konst(DIGBUF)
    k1 = p.konst(1)
    p.ldm("dec_v")
    p.jnz(nz)
    p.seti("och", ZERO)
    emit_char(p, "och")
    p.jmp(done)
    p.label(nz)
    p.seti("dc_n", 0)
    p.label(collect)
    p.ldm("dec_v")
    p.jz(collected)
    p.ldm("dec_v")
    p.mod(k10)
    p.add(k48)
    p.stm("och")
    p.ldm("dc_n")
    p.add(kdig)
    p.stm("tp")
    p.ldm("och")
    p.stx("tp")
    p.inc("dc_n")
    p.ldm("dec_v")
    p.div(k10)
    p.stm("dec_v")
    p.jmp(collect)
    p.label(collected)
    p.label(rev)
    p.ldm("dc_n")
    p.jz(done)
    p.ldm("dc_n")
    p.sub(k1)
    p.stm("dc_n")
    p.ldm("dc_n")
    p.add(kdig)
    p.stm("tp")
    p.ldx("tp")
    p.stm("och")
    emit_char(p, "och")
    p.jmp(rev)
    p.label(done)


def emit_buffer_input(p: Prog, done_label: str):
    """Read the whole first argument (ASCII chars) into TEXT; length in ``n``."""
    loop = p.fresh("buf_loop")
    p.comment("buffer the input text")
    p.seti("n", 0)
    p.label(loop)
    p.read_char_input("ch", done_label)
    p.ldm("n")
    p.add(p.konst(TEXT))
    p.stm("tp")
    p.ldm("ch")
    p.stx("tp")
    p.inc("n")
    p.jmp(loop)


def gen_compiler_src() -> str:
    p = Prog()
    p.comment("compiler: reads source text as ASCII bits from argument 1,")
    p.comment("writes assembly text as ASCII bits to buffer 1, diagnostics")
    p.comment("to buffer 2, and a completion bit to buffer 3")
    buffered = p.fresh("main")
    finish = p.fresh("fin")
    error = p.fresh("err")

    emit_buffer_input(p, buffered)
    p.label(buffered)

    def emit_out(prog, cellname):
        prog.emit_value_bits(cellname, 8, 1)

    emit_compiler(p, emit_out, finish, error)

    p.label(error)
    p.out_const_text("ERR", 2)
    p.halt()
    p.label(finish)
    p.ldi(1)
    p.outbit(3)
    p.halt()
    return p.source("self-hosted compiler (src -> asm)")


def gen_icn_compiler_src() -> str:
    p = Prog()
    p.comment("compiler: reads source text as ASCII bits from argument 1,")
    p.comment("writes intermediate code (header + executable bits) to buffer 1,")
    p.comment("diagnostics to buffer 2, and a completion bit to buffer 3")
    buffered = p.fresh("main")
    compiled = p.fresh("stage2")
    error = p.fresh("err")

    emit_buffer_input(p, buffered)
    p.label(buffered)

    # stage 1: compile into the assembly text buffer
    def emit_mem(prog, cellname):
        prog.ldm("alen")
        prog.add(prog.konst(ASMBUF))
        prog.stm("tp")
        prog.ldm(cellname)
        prog.stx("tp")
        prog.inc("alen")

    p.seti("alen", 0)
    emit_compiler(p, emit_mem, compiled, error)

    # stage 2: emit the header, then assemble out of the text buffer
    p.label(compiled)
    p.comment("intermediate-code header, then assemble the buffered text")
    p.seti("hdr", int.from_bytes(b"I", "big"))
    p.emit_value_bits("hdr", 8, 1)
    p.seti("apos", 0)

    def read_mem(prog, dest, eof_label):
        prog.ldm("alen")
        prog.sub("apos")
        prog.jz(eof_label)
        prog.ldm("apos")
        prog.add(prog.konst(ASMBUF))
        prog.stm("tp")
        prog.ldx("tp")
        prog.stm(dest)
        prog.inc("apos")

    emit_assembler(p, read_mem)

    p.label(error)
    p.out_const_text("ERR", 2)
    p.halt()
    return p.source("self-hosted compiler (src -> icn)")


# ---------------------------------------------------------------------------
# interpreter: icn (+ forwarded arguments) -> behaviour of the wrapped program
# ---------------------------------------------------------------------------

MAX_FORWARDED_OUTBUF = 8  # highest output buffer the interpreter can forward


def gen_interpreter_src() -> str:
    p = Prog()
    p.comment("interpreter: argument 1 carries intermediate code; the wrapped")
    p.comment("program runs against arguments 2.. and writes its own buffers.")
    p.comment(f"output buffers up to {MAX_FORWARDED_OUTBUF} are forwarded")

    k1 = p.konst(1)
    k2 = p.konst(2)
    kops = p.konst(OPS)
    kargs = p.konst(ARGS)
    kemu = p.konst(EMU)
    k2p32 = p.konst(1 << 32)

    load_loop = p.fresh("ld_loop")
    load_commit = p.fresh("ld_commit")
    load_done = p.fresh("ld_done")
    fetch = p.fresh("fetch")
    nx = p.fresh("next")
    do_jump = p.fresh("dojump")
    i_halt = p.fresh("i_halt")

    p.comment("skip the 8 header bits")
    for _ in range(8):
        p.nextbit()

    p.comment("decode 40-bit words into opcode/operand tables")
    p.seti("cur", 0)
    p.seti("cnt", 0)
    p.seti("ni", 0)
    p.label(load_loop)
    p.nextbit()
    p.stm("bit")
    p.ldi(2)
    p.sub("bit")
    p.jz(load_done)
    p.ldm("cur")
    p.mul(k2)
    p.add("bit")
    p.stm("cur")
    p.inc("cnt")
    p.jeq_const("cnt", 40, load_commit)
    p.jmp(load_loop)
    p.label(load_commit)
    p.ldm("cur")
    p.div(k2p32)
    p.stm("t0")
    p.ldm("ni")
    p.add(kops)
    p.stm("tp")
    p.ldm("t0")
    p.stx("tp")
    p.ldm("cur")
    p.mod(k2p32)
    p.stm("t0")
    p.ldm("ni")
    p.add(kargs)
    p.stm("tp")
    p.ldm("t0")
    p.stx("tp")
    p.inc("ni")
    p.seti("cur", 0)
    p.seti("cnt", 0)
    p.jmp(load_loop)
    p.label(load_done)

    p.comment("position the input cursor on the first forwarded argument")
    p.nextarg()

    p.label(fetch)
    p.ldm("ni")
    p.sub("epc")
    p.jz(i_halt)
    p.ldm("epc")
    p.add(kops)
    p.stm("tp")
    p.ldx("tp")
    p.stm("cop")
    p.ldm("epc")
    p.add(kargs)
    p.stm("tp")
    p.ldx("tp")
    p.stm("carg")

    arms = {}
    for mnemonic in MNEMONICS:
        arms[mnemonic] = p.fresh(f"i_{mnemonic.lower()}")
    for mnemonic in MNEMONICS:
        if mnemonic == "HALT":
            p.jeq_const("cop", 0, i_halt)
        else:
            p.jeq_const("cop", toyvm.OPCODE_OF[mnemonic], arms[mnemonic])
    p.jmp(i_halt)

    def emu_addr_from_carg():
        # tp := EMU + operand
        p.ldm("carg")
        p.add(kemu)
        p.stm("tp")

    def emu_load_operand_cell(dest):
        emu_addr_from_carg()
        p.ldx("tp")
        p.stm(dest)

    p.label(arms["LDI"])
    p.copy("eacc", "carg")
    p.jmp(nx)

    p.label(arms["LDM"])
    emu_load_operand_cell("eacc")
    p.jmp(nx)

    p.label(arms["LDX"])
    emu_addr_from_carg()
    p.ldx("tp")
    p.add(kemu)
    p.stm("tp")
    p.ldx("tp")
    p.stm("eacc")
    p.jmp(nx)

    p.label(arms["STM"])
    emu_addr_from_carg()
    p.ldm("eacc")
    p.stx("tp")
    p.jmp(nx)

    p.label(arms["STX"])
    emu_addr_from_carg()
    p.ldx("tp")
    p.add(kemu)
    p.stm("tp")
    p.ldm("eacc")
    p.stx("tp")
    p.jmp(nx)

    for mnemonic, op in (("ADD", p.add), ("SUB", p.sub), ("MUL", p.mul), ("DIV", p.div), ("MOD", p.mod)):
        p.label(arms[mnemonic])
        emu_load_operand_cell("t0")
        p.ldm("eacc")
        op("t0")
        p.stm("eacc")
        p.jmp(nx)

    p.label(arms["JMP"])
    p.jmp(do_jump)
    p.label(arms["JZ"])
    p.ldm("eacc")
    p.jz(do_jump)
    p.jmp(nx)
    p.label(arms["JNZ"])
    p.ldm("eacc")
    p.jnz(do_jump)
    p.jmp(nx)
    p.label(do_jump)
    p.copy("epc", "carg")
    p.jmp(fetch)

    p.label(arms["NEXTBIT"])
    p.nextbit()
    p.stm("eacc")
    p.jmp(nx)

    p.label(arms["NEXTARG"])
    p.nextarg()
    p.jmp(nx)

    p.label(arms["OUTBIT"])
    p.jeq_const("carg", 0, nx)
    for buf in range(1, MAX_FORWARDED_OUTBUF + 1):
        arm = p.fresh(f"ob{buf}")
        p.jeq_const("carg", buf, arm)
        arms[f"ob{buf}"] = arm
    p.jmp(i_halt)
    for buf in range(1, MAX_FORWARDED_OUTBUF + 1):
        p.label(arms[f"ob{buf}"])
        p.ldm("eacc")
        p.outbit(buf)
        p.jmp(nx)

    p.label(nx)
    p.inc("epc")
    p.jmp(fetch)

    p.label(i_halt)
    p.halt()

    return p.source("self-hosted interpreter (icn)")


# ---------------------------------------------------------------------------


def build_assets() -> dict:
    asm_src = gen_assembler_src()
    asm_prime = host_compile(asm_src)
    compil_prime = gen_compiler_src()
    compil_icn_prime = gen_icn_compiler_src()
    interp_src = gen_interpreter_src()
    interp_exe = host_assemble(host_compile(interp_src))

    files = {
        "asm_prime.asm": (asm_prime + "\n").encode("ascii"),
        "compil_prime.src": (compil_prime + "\n").encode("ascii"),
        "compil_icn_prime.src": (compil_icn_prime + "\n").encode("ascii"),
        "interp.exe.txt": f"bits={len(interp_exe)}\n{interp_exe.to_text()}\n".encode("ascii"),
    }
    digest_lines = [
        f"{name} {hashlib.sha256(blob).hexdigest()}" for name, blob in sorted(files.items())
    ]
    files["digests.txt"] = ("\n".join(digest_lines) + "\n").encode("ascii")
    return files


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    mode = parser.add_mutually_exclusive_group(required=True)
    mode.add_argument("--write", action="store_true", help="write assets and digests")
    mode.add_argument("--check", action="store_true", help="verify frozen assets match")
    args = parser.parse_args()

    files = build_assets()
    if args.write:
        ASSET_DIR.mkdir(parents=True, exist_ok=True)
        for name, blob in files.items():
            (ASSET_DIR / name).write_bytes(blob)
            print(f"wrote {name} ({len(blob)} bytes)")
        return 0
    ok = True
    for name, blob in files.items():
        frozen = ASSET_DIR / name
        if not frozen.exists():
            print(f"MISSING {name}")
            ok = False
        elif frozen.read_bytes() != blob:
            print(f"STALE   {name}")
            ok = False
        else:
            print(f"ok      {name}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
