import random

import pytest

from ccwb.threads import (
    DEAD,
    STOP,
    UNDEFINED,
    BasicAction,
    GuardedRecSpec,
    PostCond,
    RecConst,
    Reply,
    Service,
    Var,
    apply,
    parse_thread,
    prefix,
    project,
    render_thread,
    thread_equal_upto,
    unfold,
)

A = BasicAction("f", "a")
B_ = BasicAction("f", "b")
G = BasicAction("g", "a")


class TableService(Service):
    """Finite test service: replies per method, default true."""

    def __init__(self, replies=None, trace=()):
        self.replies = replies or {}
        self.trace = trace

    def consume(self, method):
        reply = self.replies.get(method, Reply.TRUE)
        return (reply, TableService(self.replies, self.trace + (method,)))


# -- projection ------------------------------------------------------------------


def test_projection_at_zero_is_deadlock():
    for t in (STOP, DEAD, prefix(A, STOP), RecConst("X", GuardedRecSpec({"X": prefix(A, Var("X"))}))):
        assert project(0, t) is DEAD


def test_projection_preserves_terminals():
    assert project(3, STOP) is STOP
    assert project(3, DEAD) is DEAD


def test_projection_prefix():
    t = prefix(A, STOP)
    assert project(2, t) == t
    assert project(1, t) == prefix(A, DEAD)


def test_projection_unfolds_recursion():
    spec = GuardedRecSpec({"X": prefix(A, Var("X"))})
    t = RecConst("X", spec)
    expected = prefix(A, prefix(A, prefix(A, DEAD)))
    assert project(3, t) == expected


def test_projection_depth_bounded():
    spec = GuardedRecSpec({"X": prefix(A, Var("X"))})
    p5 = project(5, RecConst("X", spec))
    assert thread_equal_upto(5, p5, RecConst("X", spec))
    assert not thread_equal_upto(6, p5, RecConst("X", spec))  # cut vs ongoing


# -- unfolding --------------------------------------------------------------------


def test_unfold_terminal():
    assert unfold(RecConst("X", GuardedRecSpec({"X": STOP}))) is STOP


def test_unfold_substitutes():
    spec = GuardedRecSpec({"X": prefix(A, Var("X"))})
    t = unfold(RecConst("X", spec))
    assert t == PostCond(RecConst("X", spec), A, RecConst("X", spec))


def test_unfold_two_variables():
    spec = GuardedRecSpec({"X": prefix(A, Var("Y")), "Y": DEAD})
    t = unfold(RecConst("X", spec))
    assert t == PostCond(RecConst("Y", spec), A, RecConst("Y", spec))


def test_guardedness_enforced():
    with pytest.raises(ValueError):
        GuardedRecSpec({"X": Var("X")})
    with pytest.raises(ValueError):
        GuardedRecSpec({"X": prefix(A, Var("Z"))})  # unbound
    with pytest.raises(ValueError):
        RecConst("Q", GuardedRecSpec({"X": STOP}))


# -- bounded equality ---------------------------------------------------------------


def test_equal_upto_reflexive():
    spec = GuardedRecSpec({"X": prefix(A, Var("X"))})
    for t in (STOP, DEAD, prefix(A, STOP), RecConst("X", spec)):
        assert thread_equal_upto(7, t, t)


def test_equal_upto_identical_unfoldings():
    s1 = GuardedRecSpec({"X": prefix(A, Var("X"))})
    s2 = GuardedRecSpec({"Y": prefix(A, Var("Y"))})
    assert thread_equal_upto(5, RecConst("X", s1), RecConst("Y", s2))


def test_unequal_actions_differ_at_depth_one():
    assert not thread_equal_upto(1, prefix(A, STOP), prefix(B_, STOP))


# -- apply -----------------------------------------------------------------------


def test_apply_stop_returns_service():
    h = TableService()
    out = apply(STOP, "f", h)
    assert out.converged and out.service is h


def test_apply_dead_is_undefined():
    out = apply(DEAD, "f", TableService())
    assert not out.converged and out.reason == "dead"
    assert out.service is UNDEFINED


def test_apply_wrong_focus_is_undefined():
    out = apply(PostCond(STOP, G, STOP), "f", TableService())
    assert not out.converged and out.reason == "wrong-focus"


def test_apply_undefined_service_in():
    out = apply(prefix(A, STOP), "f", UNDEFINED)
    assert not out.converged and out.reason == "undefined-input"


def test_apply_true_false_branches():
    t = PostCond(prefix(B_, STOP), A, STOP)
    out = apply(t, "f", TableService({"a": Reply.TRUE}))
    assert out.converged and out.service.trace == ("a", "b")
    out = apply(t, "f", TableService({"a": Reply.FALSE}))
    assert out.converged and out.service.trace == ("a",)


def test_apply_divergent_reply():
    out = apply(prefix(A, STOP), "f", TableService({"a": Reply.DIVERGENT}))
    assert not out.converged and out.reason == "divergent-reply"


def test_apply_fuel_flagged_distinctly():
    spec = GuardedRecSpec({"X": prefix(A, Var("X"))})
    out = apply(RecConst("X", spec), "f", TableService(), depth_fuel=16)
    assert not out.converged and out.reason == "fuel-exhausted"
    assert out.steps == 16


def test_apply_respects_unfolding():
    spec = GuardedRecSpec({"X": PostCond(STOP, A, Var("X"))})
    t = RecConst("X", spec)
    a = apply(t, "f", TableService({"a": Reply.TRUE}), 8)
    b = apply(unfold(t), "f", TableService({"a": Reply.TRUE}), 8)
    assert a.converged and b.converged and a.service.trace == b.service.trace


def random_finite_thread(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        return STOP if rng.random() < 0.7 else DEAD
    action = BasicAction("f", rng.choice("abc"))
    return PostCond(
        random_finite_thread(rng, depth - 1), action, random_finite_thread(rng, depth - 1)
    )


def test_projection_stabilization_random():
    # when the depth-n projection converges, the full thread converges to
    # the same service with any step budget of at least n
    rng = random.Random(100)
    checked = 0
    for _ in range(200):
        t = random_finite_thread(rng, 5)
        replies = {m: rng.choice((Reply.TRUE, Reply.FALSE)) for m in ("a", "b", "c")}
        h = TableService(replies)
        for n in range(0, 7):
            cut = apply(project(n, t), "f", h, 64)
            if cut.converged:
                full = apply(t, "f", h, max(n, 1))
                assert full.converged
                assert full.service.trace == cut.service.trace
                checked += 1
                break
    assert checked > 50


# -- textual form ------------------------------------------------------------------


@pytest.mark.parametrize(
    "text",
    [
        "S",
        "D",
        "f.a ; S",
        "f.a ; f.b ; D",
        "S <| f.a |> D",
        "(f.a ; S) <| f.b |> D",
        "rec X { X = f.a ; X } in X",
        "rec X { X = S <| f.a |> Y; Y = D } in X",
        "ea.set:a.txt:101 ; (S <| ea.eq:a:b |> D)",
    ],
)
def test_parse_render_round_trip(text):
    term = parse_thread(text)
    assert parse_thread(render_thread(term)) == term


def test_parse_rejects_garbage():
    for bad in ("", "S S", "f.a ;", "rec X { X = X } in X", "<| f.a |>"):
        with pytest.raises(ValueError):
            parse_thread(bad)


def test_parse_comments():
    term = parse_thread("# setup\nf.a ; S  # done\n")
    assert term == prefix(A, STOP)
