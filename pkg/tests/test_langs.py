import random

import pytest

from ccwb.bits import EMPTY, BitSeq
from ccwb.experiments import load_asm_corpus, load_src_corpus, random_program
from ccwb.langs import (
    ICN_HEADER,
    AsmError,
    SrcError,
    asm_notation,
    compile_machine_function,
    dedicated_structure,
    disassemble_machine_function,
    exe_notation,
    fmt_asm,
    fmt_src,
    host_assemble,
    host_compile,
    host_disassemble,
    icn_body,
    icn_notation,
    make_icn,
    src_notation,
    standard_registry,
    text_rep,
)
from ccwb.machine import MEA, Bits
from ccwb.notation import NotationClass, cc_meaning, transl_check, validate_notation
from ccwb.toyvm import decode, encode

B = BitSeq.from_text


# -- host assembler -------------------------------------------------------------


def test_assemble_halt():
    assert host_assemble("HALT") == BitSeq([0] * 40)


def test_assemble_emitter():
    from ccwb.toyvm import ToyProgram

    assert host_assemble("LDI 1\nOUTBIT 1\nHALT") == encode(
        ToyProgram.of(("LDI", 1), ("OUTBIT", 1), "HALT")
    )


def test_assemble_empty_text():
    assert host_assemble("") == EMPTY


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("NOP", "unknown mnemonic"),
        ("LDI", "exactly one operand"),
        ("LDI x", "malformed operand"),
        ("LDI 04", "malformed operand"),
        ("LDI 4294967296", "overflows"),
        ("HALT 1", "no operand"),
        ("LDI  1", "stray whitespace"),
    ],
)
def test_assemble_errors_carry_line_numbers(text, fragment):
    with pytest.raises(AsmError) as exc:
        host_assemble("HALT\n" + text)
    assert "line 2" in str(exc.value)
    assert fragment in str(exc.value)


def test_disassemble_inverse_of_assemble():
    text = "LDI 5\nSTM 3\nLDM 3\nOUTBIT 1\nNEXTARG"
    result = host_disassemble(host_assemble(text))
    assert result.ok and result.asm == text


def test_disassemble_rejects_non_executable():
    result = host_disassemble(B("10101010"))
    assert not result.ok and result.asm is None
    assert "not executable" in result.errors


def test_assemble_of_disassembly_is_identity():
    rng = random.Random(5)
    for _ in range(200):
        exe = encode(random_program(rng))
        listing = host_disassemble(exe)
        assert listing.ok
        assert host_assemble(listing.asm) == exe


# -- host compiler ----------------------------------------------------------------


def test_compile_passthrough():
    assert host_compile("HALT") == "HALT"


def test_compile_single_label():
    assert host_compile("@top:\nJMP @top") == "JMP 0"


def test_compile_drops_comments_and_blanks():
    src = "# header\n\nLDI 1\n# middle\nOUTBIT 1\n\nHALT"
    assert host_compile(src) == "LDI 1\nOUTBIT 1\nHALT"


def test_compile_forward_reference():
    src = "JMP @end\nLDI 0\nOUTBIT 1\n@end:\nHALT"
    assert host_compile(src) == "JMP 3\nLDI 0\nOUTBIT 1\nHALT"


@pytest.mark.parametrize(
    "src,fragment",
    [
        ("JMP @nowhere", "undefined label"),
        ("@a:\n@a:\nHALT", "duplicate label"),
        ("@a\nHALT", "malformed label"),
        ("LDI @a", "cannot take a label"),
        ("WAT 1", "unknown mnemonic"),
    ],
)
def test_compile_errors(src, fragment):
    with pytest.raises(SrcError) as exc:
        host_compile(src)
    assert fragment in str(exc.value)


# -- canonicalization --------------------------------------------------------------


def test_fmt_asm_normalizes_and_is_idempotent():
    messy = "  LDI   1  \nOUTBIT 1\n\n HALT "
    canon = fmt_asm(messy)
    assert canon == "LDI 1\nOUTBIT 1\nHALT"
    assert fmt_asm(canon) == canon


def test_fmt_src_keeps_comments():
    messy = "# note   \n@top:\n  JMP   @top"
    canon = fmt_src(messy)
    assert canon == "# note\n@top:\nJMP @top"
    assert fmt_src(canon) == canon


# -- intermediate code --------------------------------------------------------------


def test_make_icn_header():
    icn = make_icn("HALT")
    assert icn == ICN_HEADER + BitSeq([0] * 40)
    assert icn_body(icn) == host_assemble("HALT")


def test_icn_body_rejects_bad_header():
    assert icn_body(BitSeq([0] * 48)) is None
    assert icn_body(ICN_HEADER + B("1")) is None


# -- dedicated machines (compile / disassemble) ---------------------------------------


def compile_mf():
    return compile_machine_function()


def test_compile_machine_success_outputs():
    cf = compile_mf()
    x = text_rep("@top:\nLDI 1\nOUTBIT 1\nHALT")
    asm = host_compile("@top:\nLDI 1\nOUTBIT 1\nHALT")
    assert cf.eval(1, (x,)) == Bits(text_rep(asm))
    assert cf.eval(2, (x,)) == Bits(EMPTY)
    assert cf.eval(3, (x,)) == Bits(host_assemble(asm))
    assert cf.eval(4, (x,)) is MEA


def test_compile_machine_error_outputs():
    cf = compile_mf()
    x = text_rep("JMP @nowhere")
    assert cf.eval(1, (x,)) == Bits(EMPTY)
    err = cf.eval(2, (x,))
    assert isinstance(err, Bits) and len(err.payload) > 0
    assert cf.eval(3, (x,)) is MEA


def test_disassemble_machine_outputs():
    df = disassemble_machine_function()
    exe = host_assemble("LDI 1\nOUTBIT 1\nHALT")
    assert df.eval(1, (exe,)) == Bits(text_rep("LDI 1\nOUTBIT 1\nHALT"))
    assert df.eval(2, (exe,)) == Bits(EMPTY)
    bad = df.eval(2, (B("1"),))
    assert isinstance(bad, Bits) and len(bad.payload) > 0


def test_dedicated_structure_has_no_executables():
    m = dedicated_structure(compile_mf())
    assert not m.exec_member(EMPTY)
    assert m.kind.value == "dedicated"


# -- notations ------------------------------------------------------------------------


def test_exe_notation_identity(tm):
    notation = exe_notation(tm)
    e = host_assemble("HALT")
    assert notation.member(e)
    assert notation.project(e) == e
    assert notation.represent(e) == e
    report = validate_notation(tm, notation, [e, EMPTY, host_assemble("NEXTARG")])
    assert report.ok, report.violations


def test_cc_meaning_on_executable_notation_matches_meaning(tm):
    from ccwb.machine import meaning

    notation = exe_notation(tm)
    e = host_assemble("LDI 1\nOUTBIT 1\nHALT")
    mf1 = cc_meaning(tm, notation, e)
    mf2 = meaning(tm, e)
    for n in (1, 2):
        for chi in ((), (B("1"),)):
            assert mf1.eval(n, chi) == mf2.eval(n, chi)


def test_cc_meaning_on_asm_notation(tm_big):
    flipper = "NEXTBIT\nSTM 0\nLDI 2\nSUB 0\nJZ 9\nLDI 1\nSUB 0\nOUTBIT 1\nJMP 0\nHALT"
    mf = cc_meaning(tm_big, asm_notation(), flipper)
    assert mf.eval(1, (B("1"),)) == Bits(B("0"))
    assert mf.eval(1, (B("10"),)) == Bits(B("01"))


def test_cc_meaning_rejects_non_member(tm):
    with pytest.raises(ValueError):
        cc_meaning(tm, asm_notation(), "NOT A MNEMONIC")


def test_validate_notation_flags_collision(tm):
    notation = asm_notation()
    notation.represent = lambda code: B("1")  # collapse everything
    report = validate_notation(tm, notation, ["HALT", "NEXTARG"])
    assert not report.ok
    assert any(clause == "injectivity" for clause, _, _ in report.violations)


def test_validate_asm_notation_on_corpus(tm_big):
    members, _ = load_asm_corpus()
    report = validate_notation(tm_big, asm_notation(), [text for _, text in members])
    assert report.ok, report.violations
    assert report.checked == len(members) >= 20


def test_text_representation_is_identity_free(tm):
    # textual codes are never their own representation, and representations
    # are never executable (first byte is an ASCII letter, not a valid opcode)
    notation = asm_notation()
    rep = notation.represent("HALT")
    assert not tm.exec_member(rep)


def test_registry_classes_disjoint(tm):
    registry = standard_registry(tm)
    assert registry.class_of("asm") is NotationClass.ASSEMBLY
    assert registry.class_of("src") is NotationClass.SOURCE
    assert registry.class_of("icn") is NotationClass.INTERMEDIATE
    with pytest.raises(ValueError):
        registry.register(asm_notation(), NotationClass.SOURCE)


def test_load_registry(tm, tmp_path):
    manifest = tmp_path / "notations.txt"
    manifest.write_text("# registry\nmyasm assembly asm\nmysrc source src\nexe executable exe\n")
    from ccwb.langs import load_registry

    registry = load_registry(manifest, tm)
    assert registry.class_of("myasm") is NotationClass.ASSEMBLY
    assert registry.notation("mysrc").member("HALT")


# -- translator checks -------------------------------------------------------------


def test_bootstrapped_assembler_is_asm_to_exe_translator(tm_big, asm0):
    members, _ = load_asm_corpus()
    sample = [text for _, text in members]
    home = exe_notation(tm_big)
    verdict = transl_check(tm_big, asm0, home, asm_notation(), home, sample)
    assert verdict, verdict


def test_transl_check_monotone_in_sample(tm_big, asm0):
    members, _ = load_asm_corpus()
    sample = [text for _, text in members]
    home = exe_notation(tm_big)
    assert transl_check(tm_big, asm0, home, asm_notation(), home, sample)
    assert transl_check(tm_big, asm0, home, asm_notation(), home, sample[:3])
    assert transl_check(tm_big, asm0, home, asm_notation(), home, [])


def test_transl_check_rejects_outputs_outside_target(tm):
    # a machine whose executables all emit the empty sequence, checked
    # against a target notation that excludes it
    from ccwb.machine import MachineFunction, MachineStructure, StructureKind
    from ccwb.notation import ControlCodeNotation

    def outputs(chi):
        return [EMPTY] if chi else []

    m = MachineStructure(
        bseq_member=lambda b: True,
        mf=MachineFunction.from_outputs(outputs),
        exec_member=lambda b: len(b) == 0,
        kind=StructureKind.CODE_CONTROLLED,
    )
    carrier = ControlCodeNotation(
        name="nonempty",
        member=lambda c: isinstance(c, BitSeq) and len(c) > 0,
        project=lambda c: EMPTY,
        represent=lambda c: c,
        decode=lambda bits: bits if len(bits) > 0 else None,
    )
    home = ControlCodeNotation(
        name="all",
        member=lambda c: isinstance(c, BitSeq),
        project=lambda c: EMPTY,
        represent=lambda c: c,
        decode=lambda bits: bits,
        carrier_is_bitseq=True,
    )
    verdict = transl_check(m, EMPTY, home, carrier, carrier, [B("1")])
    assert not verdict
    assert "not in target notation" in verdict.reason


def test_icn_compiler_is_src_to_icn_translator(tm_big, asm0, assets):
    members, _ = load_src_corpus()
    sample = [src for _, src in members]
    home = exe_notation(tm_big)
    icn_exe = tm_big.mf.eval(1, (asm0, text_rep(host_compile(assets.compil_icn_prime)))).payload
    verdict = transl_check(tm_big, icn_exe, home, src_notation(), icn_notation(), sample)
    assert verdict, verdict


def test_validate_src_and_icn_notations(tm_big):
    members, _ = load_src_corpus()
    report = validate_notation(tm_big, src_notation(), [s for _, s in members])
    assert report.ok, report.violations
    icn_samples = [make_icn(host_compile(s)) for _, s in members[:5]]
    report = validate_notation(tm_big, icn_notation(), icn_samples)
    assert report.ok, report.violations


def test_transl_check_reports_divergence_distinctly(tm):
    spin = host_assemble("JMP 0")
    home = exe_notation(tm)
    verdict = transl_check(tm, spin, home, asm_notation(), home, ["HALT"])
    assert not verdict
    assert "Div" in verdict.reason


# -- frozen assets -------------------------------------------------------------------


def test_assets_verify_digests(assets):
    assert assets.asm_prime.splitlines()
    assert assets.compil_prime.splitlines()
    assert decode(assets.interp_exe) is not None


def test_frozen_assets_are_canonical(assets):
    assert fmt_asm(assets.asm_prime) == assets.asm_prime
    assert fmt_src(assets.compil_prime) == assets.compil_prime
    assert fmt_src(assets.compil_icn_prime) == assets.compil_icn_prime


def test_asset_digest_mismatch_detected(tmp_path, monkeypatch):
    import ccwb.langs as langs

    real = langs.asset_digests()
    real["asm_prime.asm"] = "0" * 64
    monkeypatch.setattr(langs, "asset_digests", lambda: real)
    with pytest.raises(ValueError):
        langs.load_assets()


def test_bootstrapped_assembler_matches_host_on_corpus(tm_big, asm0):
    members, _ = load_asm_corpus()
    assert len(members) >= 20
    for name, text in members:
        out = tm_big.mf.eval(1, (asm0, text_rep(text)))
        assert out == Bits(host_assemble(text)), f"disagreement on {name}"


def test_self_hosted_compiler_matches_host_on_corpus(tm_big, asm0, assets):
    members, _ = load_src_corpus()
    assert len(members) >= 10
    compiler_exe = tm_big.mf.eval(1, (asm0, text_rep(host_compile(assets.compil_prime)))).payload
    for name, src in members:
        out = tm_big.mf.eval(1, (compiler_exe, text_rep(src)))
        assert out == Bits(text_rep(host_compile(src))), f"disagreement on {name}"


def test_self_hosted_icn_compiler_matches_host_on_corpus(tm_big, asm0, assets):
    members, _ = load_src_corpus()
    icn_exe = tm_big.mf.eval(1, (asm0, text_rep(host_compile(assets.compil_icn_prime)))).payload
    for name, src in members:
        out = tm_big.mf.eval(1, (icn_exe, text_rep(src)))
        assert out == Bits(make_icn(host_compile(src))), f"disagreement on {name}"


def test_self_hosted_assembler_on_empty_text(tm_big, asm0):
    # the empty text is outside the notation but the assembler executable
    # still maps its representation to the empty encoding, like the oracle
    out = tm_big.mf.eval(1, (asm0, EMPTY))
    assert out == Bits(host_assemble(""))


def test_assembler_diagnostics_channel(tm_big, asm0):
    # success: empty diagnostics at index 2, completion marker at index 3
    out2 = tm_big.mf.eval(2, (asm0, text_rep("HALT")))
    out3 = tm_big.mf.eval(3, (asm0, text_rep("HALT")))
    assert out2 == Bits(EMPTY)
    assert out3 == Bits(B("1"))
    # failure: non-empty diagnostics, no marker
    bad = tm_big.mf.eval(2, (asm0, text_rep("WAT")))
    assert isinstance(bad, Bits) and bad.payload.to_ascii() == "ERR"
    assert tm_big.mf.eval(3, (asm0, text_rep("WAT"))) is MEA
