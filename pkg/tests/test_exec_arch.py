import random

import pytest

from ccwb.bits import BitSeq
from ccwb.exec_arch import (
    DIVERGED_STATE,
    EFF_ROWS,
    YLD_ROWS,
    Eq,
    Exe,
    InstructionParseError,
    Live,
    Neq,
    Set,
    ceff,
    eff,
    load_snapshot,
    parse_instruction,
    render_instruction,
    run_script,
    save_snapshot,
    service_of,
    yld,
)
from ccwb.langs import host_assemble, text_rep
from ccwb.threads import Reply

from rows import make_row_checks

B = BitSeq.from_text


@pytest.fixture(scope="module")
def rows(tm, asm0):
    return make_row_checks(tm, asm0)


def test_row_lists_are_complete(rows):
    assert set(rows) == set(EFF_ROWS) | set(YLD_ROWS)
    assert len(EFF_ROWS) == 14
    assert len(YLD_ROWS) == 18


@pytest.mark.parametrize("row", sorted(EFF_ROWS + YLD_ROWS))
def test_table_row(rows, row):
    rows[row]()


# -- parsing ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "text",
    ["set:a:101", "set:a:", "rmv:x", "cp:a:b", "mv:a:b", "cat:a:b", "eq:a:b",
     "neq:a:b", "exists:a", "load:a", "exe:a/o1:o2", "exe:/", "exe:a:b/", "exe:/o"],
)
def test_parse_render_round_trip(text):
    instruction = parse_instruction(text)
    assert parse_instruction(render_instruction(instruction)) == instruction


def test_parse_hex_payload():
    assert parse_instruction("set:a:x4f") == Set("a", B("01001111"))


@pytest.mark.parametrize("text", ["bogus", "set:A:1", "cp:a", "exe:a:o1", "set::1", "rmv:"])
def test_parse_failures(text):
    with pytest.raises(InstructionParseError):
        parse_instruction(text)


# -- divergence absorption ----------------------------------------------------------


def test_divergence_absorbing(tm):
    for text in ("set:a:1", "rmv:a", "exists:a", "exe:/", "load:a"):
        i = parse_instruction(text)
        assert eff(i, DIVERGED_STATE, tm) is DIVERGED_STATE
        assert yld(i, DIVERGED_STATE, tm) is Reply.DIVERGENT


def test_diverged_service_is_undefined(tm):
    svc = service_of(DIVERGED_STATE, tm)
    assert svc.is_undefined
    rng = random.Random(17)
    methods = ["set:a:1", "exe:/", "garbage", "eq:a:b", "load:x"]
    current = svc
    for _ in range(10):
        reply, current = current.consume(rng.choice(methods))
        assert reply is Reply.DIVERGENT


# -- service laws ----------------------------------------------------------------------


def test_first_reply_and_successor(tm):
    state = Live({"a": B("1")})
    svc = service_of(state, tm)
    for text in ("set:b:0", "exists:a", "rmv:a", "exe:/"):
        i = parse_instruction(text)
        reply, successor = svc.consume(text)
        assert reply == yld(i, state, tm)
        assert successor.state == eff(i, state, tm)


def test_unparseable_method_diverges(tm):
    svc = service_of(Live(), tm)
    reply, successor = svc.consume("not-an-instruction")
    assert reply is Reply.DIVERGENT
    assert successor.state is DIVERGED_STATE


def test_once_divergent_always_divergent_random(tm):
    spin = host_assemble("JMP 0")
    rng = random.Random(23)
    methods = [
        "set:a:101", "set:code:" + spin.to_text(), "load:code", "cp:a:b",
        "mv:a:c", "cat:a:b", "eq:a:b", "neq:a:b", "exists:a", "rmv:b",
        "exe:a/o", "exe:/", "zzz",
    ]
    for trial in range(50):
        svc = service_of(Live(), tm)
        diverged = False
        for _ in range(rng.randrange(1, 12)):
            reply, svc = svc.consume(rng.choice(methods))
            if diverged:
                assert reply is Reply.DIVERGENT
            if reply is Reply.DIVERGENT:
                diverged = True


def test_service_agrees_with_cumulative_effect(tm):
    # consuming a method sequence one by one equals folding eff and reading
    # the final yield: the service is the state's reply function
    rng = random.Random(31)
    pool = ["set:a:1", "set:b:10", "cp:a:c", "mv:b:d", "cat:a:c", "eq:a:c",
            "neq:a:d", "exists:q", "rmv:c", "load:a", "exe:/"]
    for _ in range(40):
        script = [rng.choice(pool) for _ in range(rng.randrange(1, 8))]
        state = Live()
        svc = service_of(state, tm)
        for k, text in enumerate(script):
            i = parse_instruction(text)
            expect = yld(i, ceff(state, [parse_instruction(t) for t in script[:k]], tm), tm)
            reply, svc = svc.consume(text)
            assert reply == expect


def test_single_action_thread_reaches_effected_state(tm):
    # applying "perform one store instruction, then terminate" to a service
    # yields exactly the service of the instruction's effect
    from ccwb.threads import STOP, BasicAction, apply, prefix

    state = Live({"k": B("0")})
    instruction = parse_instruction("set:k:1")
    thread = prefix(BasicAction("ea", "set:k:1"), STOP)
    outcome = apply(thread, "ea", service_of(state, tm), 8)
    assert outcome.converged
    assert outcome.service.state == eff(instruction, state, tm)


def test_eq_neq_never_both_true(tm):
    states = [
        Live({"a": B("1"), "b": B("1")}),
        Live({"a": B("1"), "b": B("0")}),
        Live({"a": B("1")}),
        Live(),
    ]
    for state in states:
        eq = yld(Eq("a", "b"), state, tm)
        neq = yld(Neq("a", "b"), state, tm)
        assert not (eq is Reply.TRUE and neq is Reply.TRUE)
        both_false = eq is Reply.FALSE and neq is Reply.FALSE
        some_absent = "a" not in state.files or "b" not in state.files
        assert both_false == some_absent


def test_exe_never_modifies_inputs(tm, asm0):
    state = Live({"src": text_rep("HALT"), "keep": B("01")}, asm0)
    out = eff(Exe(("src", "keep"), ("o1",)), state, tm)
    assert out.files["src"] == state.files["src"]
    assert out.files["keep"] == state.files["keep"]


def test_exe_output_collision_rightmost_wins(tm, asm0):
    # the same name as output 1 and 2: buffer 2 (empty diagnostics) lands last
    state = Live({"src": text_rep("HALT")}, asm0)
    out = eff(Exe(("src",), ("o", "o")), state, tm)
    assert out.files["o"] == BitSeq()


def test_exe_input_also_output(tm, asm0):
    # inputs are read before any write: the program still assembles "HALT"
    state = Live({"src": text_rep("HALT")}, asm0)
    out = eff(Exe(("src",), ("src",)), state, tm)
    assert out.files["src"] == host_assemble("HALT")


# -- cumulative effect -------------------------------------------------------------


def test_ceff_empty_is_identity(tm):
    s = Live({"a": B("1")})
    assert ceff(s, [], tm) == s


def test_ceff_single_step(tm):
    s = Live()
    i = parse_instruction("set:a:1")
    assert ceff(s, [i], tm) == eff(i, s, tm)


def test_ceff_add_then_remove(tm):
    s = Live()
    out = ceff(s, [parse_instruction("set:a:1"), parse_instruction("rmv:a")], tm)
    assert out == Live()


# -- snapshots and scripts -----------------------------------------------------------


def test_snapshot_round_trip(tmp_path, tm, asm0):
    state = Live({"b": B("01"), "a": BitSeq(), "z.x-1": B("1")}, asm0)
    path = tmp_path / "s.snap"
    save_snapshot(state, path)
    assert load_snapshot(path, tm) == state
    lines = path.read_text().splitlines()
    assert lines[0].startswith("loaded=")
    assert lines[1] == "a\t"  # empty sequence renders as empty field
    assert [l.split("\t")[0] for l in lines[1:]] == ["a", "b", "z.x-1"]


def test_snapshot_diverged_round_trip(tmp_path, tm):
    path = tmp_path / "d.snap"
    save_snapshot(DIVERGED_STATE, path)
    assert load_snapshot(path, tm) is DIVERGED_STATE


def test_snapshot_rejects_non_executable_loaded(tmp_path, tm):
    path = tmp_path / "bad.snap"
    path.write_text("loaded=1\n")
    with pytest.raises(ValueError):
        load_snapshot(path, tm)


def test_run_script_replies_and_comments(tm):
    script = "# comment\nset:a:101\n\nexists:a\neq:a:b\n"
    final, replies = run_script(Live(), script, tm)
    assert [r.value for _, r in replies] == ["T", "T", "F"]
    assert final.files["a"] == B("101")


def test_run_script_after_divergence(tm):
    spin = host_assemble("JMP 0")
    script = "\n".join([f"set:code:{spin.to_text()}", "load:code", "exe:/", "set:a:1", "exists:a"])
    final, replies = run_script(Live(), script, tm)
    assert [r.value for _, r in replies] == ["T", "T", "D", "D", "D"]
    assert final is DIVERGED_STATE
