import dataclasses

import pytest

from ccwb.bits import BitSeq
from ccwb.experiments import (
    assembler_fixpoint_experiment,
    check_rules_experiment,
    compiler_fixpoint_experiment,
    interpreter_experiment,
    load_asm_corpus,
    load_interp_corpus,
    load_src_corpus,
    parse_vector,
)
from ccwb.langs import bootstrap_assembler, host_assemble, host_compile

B = BitSeq.from_text


# -- corpus loading ---------------------------------------------------------------


def test_parse_vector_forms():
    assert parse_vector("-") == ()
    assert parse_vector("101") == (B("101"),)
    assert parse_vector("e 1") == (BitSeq(), B("1"))
    assert parse_vector("x4f 0") == (B("01001111"), B("0"))


def test_shipped_corpora_sizes():
    asm_members, asm_probes = load_asm_corpus()
    src_members, _ = load_src_corpus()
    interp_cases = load_interp_corpus()
    assert len(asm_members) >= 20
    assert len(src_members) >= 10
    assert len(interp_cases) >= 10
    assert asm_probes
    for _, _, vectors in interp_cases:
        assert len(vectors) >= 3
        assert all(len(v) >= 1 for v in vectors)


def test_corpus_digest_verification(tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    (d / "one.asm").write_text("HALT\n")
    (d / "manifest.txt").write_text("one.asm sha256=" + "0" * 64 + "\n")
    with pytest.raises(ValueError):
        load_asm_corpus(d)


# -- assembler bootstrap -------------------------------------------------------------


def test_assembler_fixpoint_passes(assets):
    report = assembler_fixpoint_experiment(assets=assets)
    assert report.ok, report.render()
    # deterministic existing and new assemblers coincide generation by generation
    assert report.artifacts["asm2"] == report.artifacts["asm0"]
    assert report.artifacts["asm3"] == report.artifacts["asm2"]


def test_assembler_fixpoint_detects_defective_new_assembler(assets):
    # corrupt the opcode the new assembler emits for the argument-advance
    # instruction; its own source never uses that instruction, so the
    # bootstrap still runs, but assembled corpus programs differ
    corrupt = assets.asm_prime.replace("\nLDI 15\n", "\nLDI 14\n")
    assert corrupt.count("LDI 14") == assets.asm_prime.count("LDI 14") + 1
    assert corrupt != assets.asm_prime
    broken = dataclasses.replace(assets, asm_prime=corrupt)
    report = assembler_fixpoint_experiment(
        assets=broken, existing_exe=bootstrap_assembler(assets)
    )
    assert not report.ok
    e1 = next(c for c in report.checks if c.label == "E1")
    assert e1.status == "FAIL"
    assert ".asm" in e1.detail  # a concrete corpus witness


# -- compiler bootstrap ---------------------------------------------------------------


def test_compiler_fixpoint_passes(assets):
    report = compiler_fixpoint_experiment(assets=assets)
    assert report.ok, report.render()


def test_compiler_fixpoint_empty_corpus(assets):
    report = compiler_fixpoint_experiment(corpus=[], probes=[()], assets=assets)
    assert report.ok
    by_label = {c.label: c for c in report.checks}
    assert by_label["C1"].status == "PASS"
    assert by_label["C3"].status == "PASS"
    assert by_label["C3"].detail == "bit-exact"


def test_compiler_fixpoint_detects_defective_new_compiler(assets):
    # break the new compiler's rendering of label index zero; its own labels
    # all sit far past the constant pool, so self-compilation is unaffected,
    # but corpus programs with a leading loop label compile differently
    marker = "\nLDI 48\n"
    pos = assets.compil_prime.rindex(marker)
    corrupt = assets.compil_prime[:pos] + "\nLDI 49\n" + assets.compil_prime[pos + len(marker):]
    broken = dataclasses.replace(assets, compil_prime=corrupt)
    report = compiler_fixpoint_experiment(
        assets=broken, existing_asm=host_compile(assets.compil_prime)
    )
    assert not report.ok
    c1 = next(c for c in report.checks if c.label == "C1")
    assert c1.status == "FAIL"


# -- interpreter ------------------------------------------------------------------------


def test_interpreter_experiment_passes(assets):
    report = interpreter_experiment(assets=assets, inner_fuel=250_000)
    assert report.ok, report.render()
    line = report.checks[0].detail
    assert "divergent pairs re-confirmed" in line


def test_interpreter_detects_defective_interpreter(assets):
    # an "interpreter" that ignores the intermediate code and echoes nothing
    broken = dataclasses.replace(assets, interp_exe=host_assemble("HALT"))
    report = interpreter_experiment(assets=broken, inner_fuel=50_000)
    assert not report.ok


# -- rule checks --------------------------------------------------------------------------


def test_check_rules_seeded_and_deterministic():
    a = check_rules_experiment(cases=120, seed=9)
    b = check_rules_experiment(cases=120, seed=9)
    assert a.ok and b.ok
    assert a.render() == b.render()
