"""Finite bit sequences and their textual / binary renderings.

The whole workbench trades in finite sequences of binary digits.  They are
stored one byte per bit (values 0 and 1) so that indexing, slicing and
concatenation stay cheap and the compiled VM core can consume the raw
buffer directly.

Textual forms accepted everywhere downstream:

* a string over ``{0,1}``, the empty string standing for the empty sequence;
* ``x`` followed by hex digits, meaning big-endian bit expansion with no
  padding stripped (so the bit length is always a multiple of 4).
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator, Union

__all__ = ["BitSeq", "EMPTY", "read_bits_file", "write_bits_file"]

_HEX_RE = re.compile(r"^x[0-9a-fA-F]*$")
_BIN_RE = re.compile(r"^[01]*$")


class BitSeq:
    """An immutable finite sequence of bits."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Union[bytes, bytearray, "BitSeq", Iterable[int]] = b""):
        if isinstance(bits, BitSeq):
            data = bits._bits
        else:
            data = bytes(bits)
            if data.translate(None, b"\x00\x01"):
                raise ValueError("bit values must be 0 or 1")
        object.__setattr__(self, "_bits", data)

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> "BitSeq":
        """Parse the 0/1 form or the ``x``-prefixed hex form."""
        if _BIN_RE.match(text):
            return cls(bytes(int(ch) for ch in text))
        if _HEX_RE.match(text):
            out = bytearray()
            for digit in text[1:]:
                v = int(digit, 16)
                out.extend((v >> 3 & 1, v >> 2 & 1, v >> 1 & 1, v & 1))
            return cls(bytes(out))
        raise ValueError(f"not a bit sequence literal: {text!r}")

    @classmethod
    def from_ascii(cls, text: str) -> "BitSeq":
        """Encode ASCII text, 8 bits per character, big-endian within each byte."""
        out = bytearray()
        for ch in text:
            code = ord(ch)
            if code > 127:
                raise ValueError(f"non-ASCII character {ch!r}")
            out.extend((code >> k) & 1 for k in range(7, -1, -1))
        return cls(bytes(out))

    @classmethod
    def from_int(cls, value: int, width: int) -> "BitSeq":
        """Big-endian rendering of ``value`` in exactly ``width`` bits."""
        if value < 0 or value >= 1 << width:
            raise ValueError(f"{value} does not fit in {width} bits")
        return cls(bytes((value >> k) & 1 for k in range(width - 1, -1, -1)))

    @classmethod
    def from_packed(cls, data: bytes, nbits: int) -> "BitSeq":
        """Unpack ``nbits`` bits from bytes packed big-endian."""
        if nbits > 8 * len(data):
            raise ValueError("fewer packed bytes than the declared bit count")
        out = bytearray(nbits)
        for i in range(nbits):
            out[i] = (data[i >> 3] >> (7 - (i & 7))) & 1
        return cls(bytes(out))

    # -- views ----------------------------------------------------------

    def to_text(self) -> str:
        return "".join("01"[b] for b in self._bits)

    def to_ascii(self) -> str:
        """Decode as ASCII text; raises ValueError when not byte-aligned ASCII."""
        if len(self._bits) % 8:
            raise ValueError("bit length is not a multiple of 8")
        chars = []
        for i in range(0, len(self._bits), 8):
            code = 0
            for b in self._bits[i : i + 8]:
                code = code << 1 | b
            if code > 127:
                raise ValueError(f"byte value {code} is not ASCII")
            chars.append(chr(code))
        return "".join(chars)

    def to_int(self) -> int:
        value = 0
        for b in self._bits:
            value = value << 1 | b
        return value

    def packed(self) -> bytes:
        """Pack big-endian into bytes, zero-padding the final byte."""
        out = bytearray((len(self._bits) + 7) // 8)
        for i, b in enumerate(self._bits):
            if b:
                out[i >> 3] |= 1 << (7 - (i & 7))
        return bytes(out)

    def raw(self) -> bytes:
        """The one-byte-per-bit buffer (for the VM engines)."""
        return self._bits

    # -- sequence protocol ----------------------------------------------

    def __len__(self) -> int:
        return len(self._bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self._bits)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return BitSeq(self._bits[key])
        return self._bits[key]

    def __add__(self, other: "BitSeq") -> "BitSeq":
        if not isinstance(other, BitSeq):
            return NotImplemented
        return BitSeq(self._bits + other._bits)

    def __eq__(self, other) -> bool:
        return isinstance(other, BitSeq) and self._bits == other._bits

    def __hash__(self) -> int:
        return hash(self._bits)

    def __repr__(self) -> str:
        text = self.to_text()
        if len(text) > 64:
            text = f"{text[:61]}..."
        return f"BitSeq({text!r})"


EMPTY = BitSeq()


def write_bits_file(path, bits: BitSeq) -> None:
    """Write the canonical text form: ``bits=<N>`` then the 0/1 string."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"bits={len(bits)}\n{bits.to_text()}\n")


def read_bits_file(path) -> BitSeq:
    """Read a bit sequence from a file.

    ``*.bin`` files hold exact packed bytes.  Text files either carry the
    canonical ``bits=<N>`` header followed by the 0/1 string, or consist of
    a single bit-sequence literal (0/1 or x-hex form).
    """
    path = str(path)
    if path.endswith(".bin"):
        with open(path, "rb") as fh:
            data = fh.read()
        return BitSeq.from_packed(data, 8 * len(data))
    with open(path, "r", encoding="ascii") as fh:
        content = fh.read()
    lines = content.splitlines()
    if lines and lines[0].startswith("bits="):
        nbits = int(lines[0][5:])
        body = lines[1] if len(lines) > 1 else ""
        seq = BitSeq.from_text(body)
        if len(seq) != nbits:
            raise ValueError(f"{path}: header claims {nbits} bits, body has {len(seq)}")
        return seq
    return BitSeq.from_text(content.strip())
