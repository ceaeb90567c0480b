import pytest

from ccwb.bits import EMPTY, BitSeq
from ccwb.langs import host_assemble
from ccwb.machine import (
    DIV,
    MEA,
    Bits,
    Corpus,
    MachineFunction,
    NotExecutableError,
    behaviourally_equivalent,
    check_mf_rules,
    is_asymmetric,
    meaning,
    overrules,
)

B = BitSeq.from_text


def one_emitter():
    return host_assemble("LDI 1\nOUTBIT 1\nHALT")


def zero_emitter():
    return host_assemble("LDI 0\nOUTBIT 1\nHALT")


def echo_exe():
    # emit every bit of the first data argument
    return host_assemble(
        "NEXTBIT\nSTM 0\nLDI 2\nSUB 0\nJZ 8\nLDM 0\nOUTBIT 1\nJMP 0\nHALT"
    )


# -- meaning -------------------------------------------------------------------


def test_meaning_unfolds_definitionally(tm):
    e = one_emitter()
    mf = meaning(tm, e)
    for n in (1, 2):
        for chi in ((), (B("1"),)):
            assert mf.eval(n, chi) == tm.mf.eval(n, (e,) + chi)


def test_meaning_of_one_bit_emitter(tm):
    assert meaning(tm, one_emitter()).eval(1, ()) == Bits(B("1"))


def test_meaning_rejects_non_executable(tm):
    with pytest.raises(NotExecutableError):
        meaning(tm, B("10101010"))


# -- behavioural equivalence ---------------------------------------------------


def probe_corpus():
    return Corpus.of([(), (B("1"),), (B("0101"), B("1"))], n_max=3)


def test_equivalence_reflexive(tm):
    for exe in (one_emitter(), echo_exe()):
        assert behaviourally_equivalent(tm, exe, exe, probe_corpus())


def test_equivalence_counterexample(tm):
    v = behaviourally_equivalent(tm, zero_emitter(), one_emitter(), probe_corpus())
    assert not v
    chi, n = v.witness
    assert (chi, n) == ((), 1)


def test_equivalence_symmetric_transitive(tm):
    c = probe_corpus()
    # two distinct encodings with the same behaviour: add a dead instruction
    a = one_emitter()
    b = host_assemble("LDI 1\nOUTBIT 1\nHALT\nHALT")
    c2 = host_assemble("LDI 3\nOUTBIT 1\nHALT")  # 3 mod 2 = 1
    assert behaviourally_equivalent(tm, a, b, c)
    assert behaviourally_equivalent(tm, b, a, c)
    assert behaviourally_equivalent(tm, b, c2, c)
    assert behaviourally_equivalent(tm, a, c2, c)


# -- rule checks ----------------------------------------------------------------


def test_constant_div_machine_function():
    mf = MachineFunction(lambda n, chi: DIV, fuel_budget=1)
    report = check_mf_rules(mf, Corpus.of([(), (B("1"),)], n_max=3), [(B("0"),)])
    assert report.ok
    assert not report.r2_inconclusive  # R2 holds vacuously: nothing non-divergent


def test_broken_r1_detected():
    def lawless(n, chi):
        return DIV if n == 1 else MEA

    report = check_mf_rules(MachineFunction(lawless, 1), Corpus.of([()], n_max=2), [])
    rules = {f.rule for f in report.failures}
    assert "R1" in rules


def test_broken_r4_detected():
    def lawless(n, chi):
        return DIV if len(chi) == 0 else MEA

    report = check_mf_rules(MachineFunction(lawless, 1), Corpus.of([()], n_max=2), [(B("1"),)])
    rules = {f.rule for f in report.failures}
    assert "R4" in rules


def test_toy_machine_rules_hold(tm):
    exe = echo_exe()
    corpus = Corpus.of([(exe,), (exe, B("10")), (B("1111"),)], n_max=4)
    report = check_mf_rules(tm.mf, corpus, [(B("1"),), (B("0"), B("11"))])
    assert report.ok, report.failures


# -- asymmetry and overruling ----------------------------------------------------


def test_constant_mf_symmetric():
    mf = MachineFunction(lambda n, chi: Bits(EMPTY), 1)
    assert not is_asymmetric(mf, [(B("1"), B("0")), (B("11"), B("00"))])


def test_toy_machine_asymmetric(tm):
    # an executable echoing its data input differs under argument swap
    v = is_asymmetric(tm.mf, [(echo_exe(), B("1"))])
    assert v
    assert v.witness == (echo_exe(), B("1"))


def test_empty_pairs_symmetric(tm):
    assert not is_asymmetric(tm.mf, [])


def test_overrules_constant_emitters(tm):
    probes = [B("0"), B("1"), B("0011")]
    v = overrules(tm, [zero_emitter(), one_emitter()], probes)
    assert v
    _, _, z1, z2 = v.witness
    assert {z1.to_text(), z2.to_text()} == {"0", "1"}


def test_overrules_needs_two_constants(tm):
    assert not overrules(tm, [one_emitter()], [B("0"), B("1")])


def test_echo_never_witnesses_overruling(tm):
    probes = [B("0"), B("1")]
    v = overrules(tm, [echo_exe(), one_emitter()], probes)
    assert not v  # echo's output varies with the probe


def test_overrules_no_probes(tm):
    assert not overrules(tm, [zero_emitter(), one_emitter()], [])


def test_overruling_is_one_sided(tm):
    # witnessed first-position overruling excludes the swapped direction
    probes = [B("0"), B("1"), B("10")]
    controllers = [zero_emitter(), one_emitter()]
    assert overrules(tm, controllers, probes)
    assert not overrules(tm, probes, controllers, position=2)
