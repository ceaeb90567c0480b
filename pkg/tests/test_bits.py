import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccwb.bits import EMPTY, BitSeq, read_bits_file, write_bits_file

bits_lists = st.lists(st.integers(0, 1), max_size=64)


def test_empty():
    assert len(EMPTY) == 0
    assert EMPTY.to_text() == ""
    assert BitSeq.from_text("") == EMPTY


def test_text_forms():
    assert BitSeq.from_text("101").to_text() == "101"
    assert BitSeq.from_text("x4f").to_text() == "01001111"
    assert BitSeq.from_text("xF").to_text() == "1111"
    with pytest.raises(ValueError):
        BitSeq.from_text("10a")
    with pytest.raises(ValueError):
        BitSeq([0, 2])


def test_ascii_round_trip():
    b = BitSeq.from_ascii("HALT")
    assert len(b) == 32
    assert b.to_ascii() == "HALT"
    assert BitSeq.from_ascii("I").to_text() == "01001001"
    with pytest.raises(ValueError):
        BitSeq.from_text("0101").to_ascii()  # not byte aligned
    with pytest.raises(ValueError):
        BitSeq.from_ascii("é")


def test_int_forms():
    assert BitSeq.from_int(5, 8).to_text() == "00000101"
    assert BitSeq.from_int(5, 8).to_int() == 5
    with pytest.raises(ValueError):
        BitSeq.from_int(256, 8)


def test_concat_slice_hash():
    a = BitSeq.from_text("10")
    b = BitSeq.from_text("01")
    assert (a + b).to_text() == "1001"
    assert (a + b)[1:3].to_text() == "00"
    assert (a + b)[0] == 1
    assert hash(a) == hash(BitSeq.from_text("10"))
    assert a != b


@given(bits_lists)
def test_packed_round_trip(bits):
    b = BitSeq(bits)
    assert BitSeq.from_packed(b.packed(), len(b)) == b


@given(bits_lists)
def test_text_round_trip(bits):
    b = BitSeq(bits)
    assert BitSeq.from_text(b.to_text()) == b


def test_bits_file_round_trip(tmp_path):
    b = BitSeq.from_text("10110")
    path = tmp_path / "x.exe.txt"
    write_bits_file(path, b)
    assert read_bits_file(path) == b
    # raw binary form
    raw = tmp_path / "y.bin"
    raw.write_bytes(BitSeq.from_text("01001111").packed())
    assert read_bits_file(raw).to_text() == "01001111"
    # bare literal form
    lit = tmp_path / "z.txt"
    lit.write_text("x4f\n")
    assert read_bits_file(lit).to_text() == "01001111"


def test_bits_file_header_mismatch(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("bits=9\n0101\n")
    with pytest.raises(ValueError):
        read_bits_file(path)
