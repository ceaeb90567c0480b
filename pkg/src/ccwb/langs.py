"""Toy languages over the toy machine, host reference translators, and the
frozen self-hosted translators.

Three notations sit above the executable form:

* **asm** — one instruction per line, ``MNEMONIC`` or ``MNEMONIC <decimal>``,
  lines separated by LF, no labels, comments or blank lines;
* **src** — asm lines plus label definitions ``@name:``, jumps
  ``JMP|JZ|JNZ @name``, ``#`` comments and blank lines (names ``[a-z0-9_]+``);
* **icn** — a bit sequence made of the 8 header bits 01001001 (ASCII "I")
  followed by a valid executable encoding.

Textual codes are represented as bit sequences by their ASCII encoding,
8 bits per character, big-endian within each byte.  All texts are canonical
ASCII with LF separators and no trailing whitespace; values carry no
trailing newline (files on disk may end with one).

The host translators here are independent oracles: they define the intended
translation bit for bit.  The frozen assets are the same translators written
in the toy languages themselves; they are validated behaviourally against
the host oracles and are the raw material of the bootstrap experiments.

Output convention of all shipped translators (host-level and self-hosted):
buffer 1 carries the product, buffer 2 the diagnostics listing (empty on
success), and the self-hosted ones additionally write a single completion
bit to buffer 3.  The marker is what makes the empty diagnostics channel
representable on the toy machine, whose programs can only append bits to a
buffer: with buffer 3 written, the committed outputs extend past buffer 2
and the never-written buffer 2 reads back as the empty sequence.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional

from .bits import EMPTY, BitSeq
from .machine import MachineFunction, MachineStructure, StructureKind
from .notation import ControlCodeNotation, NotationClass, NotationRegistry
from .toyvm import (
    MNEMONICS,
    NO_OPERAND,
    OPERAND_LIMIT,
    ToyInstruction,
    ToyProgram,
    decode,
    decode_verbose,
    encode,
)

__all__ = [
    "AsmError",
    "SrcError",
    "parse_asm",
    "render_asm",
    "host_assemble",
    "host_disassemble",
    "Disassembly",
    "host_compile",
    "ICN_HEADER",
    "make_icn",
    "icn_body",
    "fmt_asm",
    "fmt_src",
    "text_rep",
    "compile_machine_function",
    "disassemble_machine_function",
    "dedicated_structure",
    "exe_notation",
    "asm_notation",
    "src_notation",
    "icn_notation",
    "standard_registry",
    "load_registry",
    "SelfHostedAssets",
    "load_assets",
    "asset_digests",
    "bootstrap_assembler",
    "TRANSLATOR_PRODUCT",
    "TRANSLATOR_DIAGNOSTICS",
    "TRANSLATOR_MARKER",
]

# Output buffers of the shipped translators.
TRANSLATOR_PRODUCT = 1
TRANSLATOR_DIAGNOSTICS = 2
TRANSLATOR_MARKER = 3

_DECIMAL_RE = re.compile(r"^(0|[1-9][0-9]*)$")
_LABEL_DEF_RE = re.compile(r"^@([a-z0-9_]+):$")
_LABEL_REF_RE = re.compile(r"^@([a-z0-9_]+)$")


class AsmError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class SrcError(AsmError):
    pass


def _lines(text: str) -> List[str]:
    return text.split("\n") if text else []


def _parse_operand(token: str, line_no: int, err=AsmError) -> int:
    if not _DECIMAL_RE.match(token):
        raise err(line_no, f"malformed operand {token!r}")
    value = int(token)
    if value >= OPERAND_LIMIT:
        raise err(line_no, f"operand {value} overflows 32 bits")
    return value


def _parse_asm_line(line: str, line_no: int) -> ToyInstruction:
    tokens = line.split(" ")
    if "" in tokens:
        raise AsmError(line_no, "stray whitespace")
    mnemonic = tokens[0]
    if mnemonic not in MNEMONICS:
        raise AsmError(line_no, f"unknown mnemonic {mnemonic!r}")
    if mnemonic in NO_OPERAND:
        if len(tokens) != 1:
            raise AsmError(line_no, f"{mnemonic} takes no operand")
        return ToyInstruction.of(mnemonic)
    if len(tokens) != 2:
        raise AsmError(line_no, f"{mnemonic} needs exactly one operand")
    return ToyInstruction.of(mnemonic, _parse_operand(tokens[1], line_no))


def parse_asm(text: str) -> ToyProgram:
    """Parse canonical assembly text; raises AsmError with a line number."""
    instrs = [ _parse_asm_line(line, i) for i, line in enumerate(_lines(text), start=1) ]
    return ToyProgram(tuple(instrs))


def render_asm(program: ToyProgram) -> str:
    lines = []
    for ins in program.instructions:
        if ins.mnemonic in NO_OPERAND:
            lines.append(ins.mnemonic)
        else:
            lines.append(f"{ins.mnemonic} {ins.operand}")
    return "\n".join(lines)


def host_assemble(asm_text: str) -> BitSeq:
    """Reference assembler: line-by-line translation to the 40-bit encoding."""
    return encode(parse_asm(asm_text))


@dataclass(frozen=True)
class Disassembly:
    asm: Optional[str]
    errors: str

    @property
    def ok(self) -> bool:
        return not self.errors


def host_disassemble(exe: BitSeq) -> Disassembly:
    """Inverse of assembly on executables; an error listing otherwise."""
    program, reason = decode_verbose(exe)
    if program is None:
        return Disassembly(None, f"not executable: {reason}")
    return Disassembly(render_asm(program), "")


def host_compile(src_text: str) -> str:
    """Reference compiler: resolve labels in two passes, drop the rest.

    Pass 1 assigns every emitted instruction an index and records label
    definitions; pass 2 drops comments, blanks and label-definition lines
    and rewrites ``@name`` operands to decimal indices.
    """
    lines = _lines(src_text)
    labels: Dict[str, int] = {}
    index = 0
    for line_no, line in enumerate(lines, start=1):
        if not line or line.startswith("#"):
            continue
        m = _LABEL_DEF_RE.match(line)
        if m:
            name = m.group(1)
            if name in labels:
                raise SrcError(line_no, f"duplicate label @{name}")
            labels[name] = index
            continue
        if line.startswith("@"):
            raise SrcError(line_no, f"malformed label definition {line!r}")
        index += 1

    out: List[str] = []
    for line_no, line in enumerate(lines, start=1):
        if not line or line.startswith("#") or _LABEL_DEF_RE.match(line):
            continue
        tokens = line.split(" ")
        if "" in tokens:
            raise SrcError(line_no, "stray whitespace")
        mnemonic = tokens[0]
        if mnemonic not in MNEMONICS:
            raise SrcError(line_no, f"unknown mnemonic {mnemonic!r}")
        if mnemonic in NO_OPERAND:
            if len(tokens) != 1:
                raise SrcError(line_no, f"{mnemonic} takes no operand")
            out.append(mnemonic)
            continue
        if len(tokens) != 2:
            raise SrcError(line_no, f"{mnemonic} needs exactly one operand")
        ref = _LABEL_REF_RE.match(tokens[1])
        if ref:
            if mnemonic not in ("JMP", "JZ", "JNZ"):
                raise SrcError(line_no, f"{mnemonic} cannot take a label")
            name = ref.group(1)
            if name not in labels:
                raise SrcError(line_no, f"undefined label @{name}")
            out.append(f"{mnemonic} {labels[name]}")
        else:
            out.append(f"{mnemonic} {_parse_operand(tokens[1], line_no, SrcError)}")
    return "\n".join(out)


ICN_HEADER = BitSeq.from_ascii("I")


def make_icn(asm_text: str) -> BitSeq:
    """Intermediate code: the header bits followed by the assembled encoding."""
    return ICN_HEADER + host_assemble(asm_text)


def icn_body(icn: BitSeq) -> Optional[BitSeq]:
    """The executable wrapped by an intermediate code, or None."""
    if len(icn) < len(ICN_HEADER) or icn[: len(ICN_HEADER)] != ICN_HEADER:
        return None
    body = icn[len(ICN_HEADER) :]
    return body if decode(body) is not None else None


# -- canonicalization -------------------------------------------------------


def fmt_asm(text: str) -> str:
    """Canonical assembly: normalized spacing, LF separators."""
    cleaned = []
    for line in text.split("\n"):
        line = " ".join(line.split())
        if line:
            cleaned.append(line)
    canon = "\n".join(cleaned)
    parse_asm(canon)
    return canon


def fmt_src(text: str) -> str:
    """Canonical source: trailing whitespace stripped, code spacing normalized,
    comments kept verbatim."""
    cleaned = []
    for line in text.split("\n"):
        stripped = line.strip()
        if stripped.startswith("#"):
            cleaned.append(line.rstrip())
        else:
            cleaned.append(" ".join(line.split()))
    canon = "\n".join(cleaned)
    host_compile(canon)
    return canon


def text_rep(text: str) -> BitSeq:
    """The bit-sequence representation of a textual code (ASCII, 8 bits per
    character, big-endian within each byte)."""
    return BitSeq.from_ascii(text)


def _text_of_bits(bits: BitSeq) -> Optional[str]:
    try:
        return bits.to_ascii()
    except ValueError:
        return None


# -- dedicated host machines (compiling / disassembling) --------------------


def compile_machine_function() -> MachineFunction:
    """A dedicated machine that compiles and assembles source text.

    Outputs: 1 = assembly version, 2 = error listing (empty on success),
    3 = executable code.  On errors only the first two outputs exist.
    """

    def outputs(chi):
        if not chi:
            return []
        text = _text_of_bits(chi[0])
        if text is None:
            return [EMPTY, text_rep("input is not ASCII text")]
        try:
            asm = host_compile(text)
            exe = host_assemble(asm)
        except AsmError as exc:
            return [EMPTY, text_rep(str(exc))]
        return [text_rep(asm), EMPTY, exe]

    return MachineFunction.from_outputs(outputs)


def disassemble_machine_function() -> MachineFunction:
    """A dedicated machine that disassembles executable codes.

    Outputs: 1 = assembly version, 2 = error listing (empty on success).
    """

    def outputs(chi):
        if not chi:
            return []
        result = host_disassemble(chi[0])
        if not result.ok:
            return [EMPTY, text_rep(result.errors)]
        return [text_rep(result.asm), EMPTY]

    return MachineFunction.from_outputs(outputs)


def dedicated_structure(mf: MachineFunction) -> MachineStructure:
    return MachineStructure(
        bseq_member=lambda b: True,
        mf=mf,
        exec_member=lambda b: False,
        kind=StructureKind.DEDICATED,
    )


# -- the four concrete notations --------------------------------------------


def exe_notation(machine: MachineStructure) -> ControlCodeNotation:
    """Executable codes as their own notation; both functions are identity."""

    def member(code) -> bool:
        return isinstance(code, BitSeq) and machine.exec_member(code)

    identity = lambda bits: bits
    return ControlCodeNotation(
        name="exe",
        member=member,
        project=identity,
        represent=identity,
        decode=lambda bits: bits if machine.exec_member(bits) else None,
        carrier_is_bitseq=True,
    )


def _is_asm_text(code) -> bool:
    # the empty text is excluded: its representation would be the empty bit
    # sequence, which is executable, and a representation that lands in the
    # executable set must be the code itself
    if not isinstance(code, str) or not code:
        return False
    try:
        parse_asm(code)
    except AsmError:
        return False
    return True


def asm_notation() -> ControlCodeNotation:
    def decode_rep(bits: BitSeq):
        text = _text_of_bits(bits)
        return text if text is not None and _is_asm_text(text) else None

    return ControlCodeNotation(
        name="asm",
        member=_is_asm_text,
        project=host_assemble,
        represent=text_rep,
        decode=decode_rep,
    )


def _is_src_text(code) -> bool:
    if not isinstance(code, str) or not code:
        return False
    try:
        host_compile(code)
    except AsmError:
        return False
    return True


def src_notation() -> ControlCodeNotation:
    def decode_rep(bits: BitSeq):
        text = _text_of_bits(bits)
        return text if text is not None and _is_src_text(text) else None

    return ControlCodeNotation(
        name="src",
        member=_is_src_text,
        project=lambda src: host_assemble(host_compile(src)),
        represent=text_rep,
        decode=decode_rep,
    )


def icn_notation() -> ControlCodeNotation:
    def member(code) -> bool:
        return isinstance(code, BitSeq) and icn_body(code) is not None

    return ControlCodeNotation(
        name="icn",
        member=member,
        project=lambda code: icn_body(code),
        represent=lambda code: code,
        decode=lambda bits: bits if icn_body(bits) is not None else None,
        carrier_is_bitseq=True,
    )


_BUILTIN_NOTATIONS = {
    "exe": lambda machine: exe_notation(machine),
    "asm": lambda machine: asm_notation(),
    "src": lambda machine: src_notation(),
    "icn": lambda machine: icn_notation(),
}

_CLASS_BY_NAME = {
    "assembly": NotationClass.ASSEMBLY,
    "source": NotationClass.SOURCE,
    "intermediate": NotationClass.INTERMEDIATE,
    "executable": NotationClass.EXECUTABLE_FORM,
}


def standard_registry(machine: MachineStructure) -> NotationRegistry:
    registry = NotationRegistry()
    registry.register(exe_notation(machine), NotationClass.EXECUTABLE_FORM)
    registry.register(asm_notation(), NotationClass.ASSEMBLY)
    registry.register(src_notation(), NotationClass.SOURCE)
    registry.register(icn_notation(), NotationClass.INTERMEDIATE)
    return registry


def load_registry(path, machine: MachineStructure) -> NotationRegistry:
    """Read a registry manifest: one ``<name> <class> <decoder>`` per line,
    ``#`` comments allowed.  Decoder identifiers name built-in decoders."""
    registry = NotationRegistry()
    with open(path, "r", encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{line_no}: expected '<name> <class> <decoder>'")
            name, cls_name, decoder = parts
            if cls_name not in _CLASS_BY_NAME:
                raise ValueError(f"{path}:{line_no}: unknown class {cls_name!r}")
            if decoder not in _BUILTIN_NOTATIONS:
                raise ValueError(f"{path}:{line_no}: unknown decoder {decoder!r}")
            notation = _BUILTIN_NOTATIONS[decoder](machine)
            notation.name = name
            registry.register(notation, _CLASS_BY_NAME[cls_name])
    return registry


# -- frozen self-hosted assets ----------------------------------------------


@dataclass(frozen=True)
class SelfHostedAssets:
    """The translators written in the toy languages themselves.

    * ``asm_prime`` — an assembler for asm, written in asm;
    * ``compil_prime`` — a compiler src -> asm, written in src;
    * ``compil_icn_prime`` — a compiler src -> icn, written in src;
    * ``interp_exe`` — an interpreter for icn, as an executable.

    All four are checked in frozen with content digests and validated only
    behaviourally, against the host oracles, on the shipped corpora.
    """

    asm_prime: str
    compil_prime: str
    compil_icn_prime: str
    interp_exe: BitSeq


_ASSET_FILES = {
    "asm_prime": "asm_prime.asm",
    "compil_prime": "compil_prime.src",
    "compil_icn_prime": "compil_icn_prime.src",
    "interp_exe": "interp.exe.txt",
}


def _data_root():
    return resources.files("ccwb").joinpath("data")


def asset_digests() -> Dict[str, str]:
    digests = {}
    root = _data_root().joinpath("assets")
    for line in root.joinpath("digests.txt").read_text("ascii").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, hexdigest = line.split()
        digests[name] = hexdigest
    return digests


def _read_asset(filename: str, verify: bool) -> bytes:
    blob = _data_root().joinpath("assets", filename).read_bytes()
    if verify:
        expected = asset_digests().get(filename)
        actual = hashlib.sha256(blob).hexdigest()
        if expected is None or expected != actual:
            raise ValueError(f"asset {filename}: digest mismatch (got {actual})")
    return blob


def _asset_text(blob: bytes) -> str:
    text = blob.decode("ascii")
    return text[:-1] if text.endswith("\n") else text


def load_assets(verify: bool = True) -> SelfHostedAssets:
    asm_prime = _asset_text(_read_asset(_ASSET_FILES["asm_prime"], verify))
    compil_prime = _asset_text(_read_asset(_ASSET_FILES["compil_prime"], verify))
    compil_icn = _asset_text(_read_asset(_ASSET_FILES["compil_icn_prime"], verify))
    raw = _asset_text(_read_asset(_ASSET_FILES["interp_exe"], verify))
    lines = raw.split("\n")
    nbits = int(lines[0][5:])
    interp = BitSeq.from_text(lines[1] if len(lines) > 1 else "")
    if len(interp) != nbits:
        raise ValueError("interpreter asset: bit count mismatch")
    return SelfHostedAssets(asm_prime, compil_prime, compil_icn, interp)


def bootstrap_assembler(assets: Optional[SelfHostedAssets] = None) -> BitSeq:
    """The first executable assembler: the frozen self-hosted assembler text
    pushed through the host oracle."""
    if assets is None:
        assets = load_assets()
    return host_assemble(assets.asm_prime)
