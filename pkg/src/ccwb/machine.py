"""Abstract machine functions and machine structures.

A machine function models a non-interactive machine as an indexed family:
``eval(n, chi)`` yields the machine's n-th output on the input sequence
``chi``, the marker ``MEA`` ("meaningless": fewer than n outputs were
produced), or ``DIV`` ("divergent": the machine does not halt).  Divergence
is approximated by a fuel budget, so every evaluation is total; ``DIV``
means "did not halt within the budget".

A machine structure adds the set of admissible bit sequences and the subset
of executable codes.  A structure with executables models a code-controlled
machine: the first input selects the behaviour.
"""

from __future__ import annotations

import enum
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence, Tuple

from .bits import EMPTY, BitSeq

__all__ = [
    "Bits",
    "MEA",
    "DIV",
    "OutVal",
    "DIVERGED",
    "HaltedOutputs",
    "MachineFunction",
    "StructureKind",
    "MachineStructure",
    "Corpus",
    "Verdict",
    "NotExecutableError",
    "meaning",
    "behaviourally_equivalent",
    "check_mf_rules",
    "RuleReport",
    "RuleFailure",
    "is_asymmetric",
    "overrules",
]

Chi = Tuple[BitSeq, ...]


@dataclass(frozen=True)
class Bits:
    """An actual n-th output."""

    payload: BitSeq


class _Mea:
    __slots__ = ()

    def __repr__(self):
        return "Mea"


class _Div:
    __slots__ = ()

    def __repr__(self):
        return "Div"


MEA = _Mea()
DIV = _Div()

OutVal = Any  # Bits | MEA | DIV


class _Diverged:
    __slots__ = ()

    def __repr__(self):
        return "Diverged"


DIVERGED = _Diverged()


@dataclass(frozen=True)
class HaltedOutputs:
    """Outcome of one halting evaluation: outputs 1..count, sparsely stored.

    ``written`` only holds the buffers that were actually produced; indices
    up to ``count`` that are absent read as the empty bit sequence.
    """

    count: int
    written: Any = field(default_factory=dict)  # Mapping[int, BitSeq]

    def out(self, n: int) -> OutVal:
        if n <= self.count:
            return Bits(self.written.get(n, EMPTY))
        return MEA


class NotExecutableError(ValueError):
    """Raised when a bit sequence outside the executable set is used as code."""


class MachineFunction:
    """Total, deterministic indexed output family over input sequences.

    Built either from an outcome function (one evaluation of ``chi`` fixes
    all indices at once, which also guarantees the index-monotonicity rules
    by construction) or from a raw ``eval(n, chi)`` procedure, used by tests
    that need deliberately lawless functions.
    """

    def __init__(self, eval_fn: Callable[[int, Chi], OutVal], fuel_budget: int):
        if fuel_budget < 1:
            raise ValueError("fuel budget must be positive")
        self._eval_fn = eval_fn
        self.fuel_budget = fuel_budget

    @classmethod
    def from_outcomes(
        cls,
        outcome_fn: Callable[[Chi], Any],
        fuel_budget: int,
        cache_size: int = 4096,
    ) -> "MachineFunction":
        """Wrap ``outcome_fn(chi) -> HaltedOutputs | DIVERGED`` with a cache."""
        cache: "OrderedDict[Chi, Any]" = OrderedDict()

        def evaluate(n: int, chi: Chi) -> OutVal:
            try:
                outcome = cache[chi]
                cache.move_to_end(chi)
            except KeyError:
                outcome = outcome_fn(chi)
                cache[chi] = outcome
                if len(cache) > cache_size:
                    cache.popitem(last=False)
            if outcome is DIVERGED:
                return DIV
            return outcome.out(n)

        return cls(evaluate, fuel_budget)

    @classmethod
    def from_outputs(
        cls, outputs_fn: Callable[[Chi], Optional[Sequence[BitSeq]]], fuel_budget: int = 1
    ) -> "MachineFunction":
        """Adapter for host-level machines: ``outputs_fn`` returns the full
        output list, or ``None`` for divergence."""

        def outcome(chi: Chi) -> Any:
            outs = outputs_fn(chi)
            if outs is None:
                return DIVERGED
            return HaltedOutputs(len(outs), {i + 1: b for i, b in enumerate(outs)})

        return cls.from_outcomes(outcome, fuel_budget)

    def eval(self, n: int, chi: Sequence[BitSeq]) -> OutVal:
        if n < 1:
            raise ValueError("output indices start at 1")
        return self._eval_fn(n, tuple(chi))


class StructureKind(enum.Enum):
    CODE_CONTROLLED = "code-controlled"
    DEDICATED = "dedicated"


@dataclass
class MachineStructure:
    """Admissible bit sequences, a machine function, and the executable subset.

    Both sets are predicates rather than enumerations; they are typically
    infinite.  The ``kind`` flag is authoritative: finite sampling can only
    refute it, never confirm it.
    """

    bseq_member: Callable[[BitSeq], bool]
    mf: MachineFunction
    exec_member: Callable[[BitSeq], bool]
    kind: StructureKind = StructureKind.CODE_CONTROLLED

    def require_executable(self, x: BitSeq) -> None:
        if not self.exec_member(x):
            raise NotExecutableError(f"not an executable code: {x!r}")


@dataclass(frozen=True)
class Corpus:
    """Finite witness set for the universally quantified checks.

    Every check that quantifies over all inputs is decided here on a finite
    corpus of input vectors and a bound on the inspected output indices;
    a positive verdict certifies the corpus-bounded statement only.
    """

    inputs: Tuple[Chi, ...]
    n_max: int

    def __post_init__(self):
        if not self.inputs:
            raise ValueError("corpus must be non-empty")
        if self.n_max < 1:
            raise ValueError("n_max must be positive")

    @classmethod
    def of(cls, vectors: Iterable[Sequence[BitSeq]], n_max: int) -> "Corpus":
        return cls(tuple(tuple(v) for v in vectors), n_max)


@dataclass
class Verdict:
    """A boolean answer carrying a concrete witness or failed clause."""

    ok: bool
    witness: Any = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __repr__(self) -> str:
        tail = f", witness={self.witness!r}" if self.witness is not None else ""
        why = f", reason={self.reason!r}" if self.reason else ""
        return f"Verdict({self.ok}{tail}{why})"


def meaning(m: MachineStructure, x: BitSeq) -> MachineFunction:
    """The machine function obtained by fixing executable ``x`` as the
    controlling first input."""
    if m.kind is not StructureKind.CODE_CONTROLLED:
        raise NotExecutableError("dedicated machine structures have no executables")
    m.require_executable(x)
    mf = m.mf

    def evaluate(n: int, chi: Chi) -> OutVal:
        return mf.eval(n, (x,) + chi)

    return MachineFunction(evaluate, mf.fuel_budget)


def behaviourally_equivalent(
    m: MachineStructure, x1: BitSeq, x2: BitSeq, c: Corpus
) -> Verdict:
    """Corpus-bounded test that two executables have the same meaning.

    Returns the first differing ``(chi, n)`` as witness.  A positive verdict
    is a semi-decision over the corpus, never a proof of the unbounded
    statement.
    """
    mf1 = meaning(m, x1)
    mf2 = meaning(m, x2)
    for chi in c.inputs:
        for n in range(1, c.n_max + 1):
            a = mf1.eval(n, chi)
            b = mf2.eval(n, chi)
            if a != b:
                return Verdict(False, witness=(chi, n), reason=f"{a!r} != {b!r}")
    return Verdict(True)


@dataclass(frozen=True)
class RuleFailure:
    rule: str
    chi: Chi
    extension: Optional[Chi]
    n: int
    m: int
    detail: str


@dataclass
class RuleReport:
    """Outcome of checking the five machine-function rules on a corpus.

    The existence rule (R2) quantifies an output index over all naturals;
    when no meaningless index shows up within the bound the case is counted
    inconclusive rather than failed, since the index may simply exceed the
    bound.
    """

    failures: list
    r2_inconclusive: list
    cases_checked: int

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        parts = [f"cases={self.cases_checked}", f"failures={len(self.failures)}"]
        parts.append(f"r2_inconclusive={len(self.r2_inconclusive)}")
        return " ".join(parts)


def check_mf_rules(
    mf: MachineFunction,
    c: Corpus,
    extensions: Iterable[Sequence[BitSeq]] = (),
) -> RuleReport:
    """Check the five index/input monotonicity rules of machine functions.

    R1: divergence at one index means divergence at every index.
    R2: a non-divergent index has a meaningless index above it (bounded
        search; "inconclusive" when none is found within ``c.n_max``).
    R3: meaninglessness persists at higher indices.
    R4: divergence persists when inputs are appended.
    R5: meaninglessness on extended inputs implies it on the original.
    """
    ext = tuple(tuple(e) for e in extensions)
    failures = []
    inconclusive = []
    cases = 0
    n_max = c.n_max

    for chi in c.inputs:
        vals = {n: mf.eval(n, chi) for n in range(1, n_max + 1)}
        cases += 1
        for n in range(1, n_max + 1):
            if vals[n] is DIV:
                for k in range(1, n_max + 1):
                    if vals[k] is not DIV:
                        failures.append(
                            RuleFailure("R1", chi, None, n, k, f"Div at {n} but {vals[k]!r} at {k}")
                        )
            else:
                if not any(vals[k] is MEA for k in range(n + 1, n_max + 1)):
                    inconclusive.append(RuleFailure("R2", chi, None, n, n_max, "no Mea within bound"))
            if vals[n] is MEA:
                for k in range(n + 1, n_max + 1):
                    if vals[k] is not MEA:
                        failures.append(
                            RuleFailure("R3", chi, None, n, k, f"Mea at {n} but {vals[k]!r} at {k}")
                        )
        for chi_ext in ext:
            extended = chi + chi_ext
            evals = {n: mf.eval(n, extended) for n in range(1, n_max + 1)}
            cases += 1
            for n in range(1, n_max + 1):
                if vals[n] is DIV and evals[n] is not DIV:
                    failures.append(
                        RuleFailure("R4", chi, chi_ext, n, n, f"Div lost on extension: {evals[n]!r}")
                    )
                if evals[n] is MEA and vals[n] is not MEA:
                    failures.append(
                        RuleFailure("R5", chi, chi_ext, n, n, f"Mea on extension but {vals[n]!r} plain")
                    )
    return RuleReport(failures, inconclusive, cases)


def is_asymmetric(mf: MachineFunction, pairs: Iterable[Tuple[BitSeq, BitSeq]]) -> Verdict:
    """Does swapping the first two inputs change the first output somewhere?"""
    for x, y in pairs:
        if mf.eval(1, (x, y)) != mf.eval(1, (y, x)):
            return Verdict(True, witness=(x, y))
    return Verdict(False, reason="no witnessing pair")


def _constant_first_output(
    mf: MachineFunction, fixed: BitSeq, probes: Sequence[BitSeq], position: int
) -> Optional[BitSeq]:
    """The constant Bits value of the first output with ``fixed`` in the given
    argument position, or None when absent or varying.  The candidate value is
    read off from the first probe."""
    value = None
    for y in probes:
        chi = (fixed, y) if position == 1 else (y, fixed)
        out = mf.eval(1, chi)
        if not isinstance(out, Bits):
            return None
        if value is None:
            value = out.payload
        elif out.payload != value:
            return None
    return value


def overrules(
    m: MachineStructure,
    controllers: Sequence[BitSeq],
    probes: Sequence[BitSeq],
    position: int = 1,
) -> Verdict:
    """Does the given argument position overrule the other one?

    True when two controllers force two distinct constant first outputs
    regardless of the probe in the other position.  The search is
    exhaustive over controller pairs; candidate outputs are read off from
    the first probe.  With no probes there is nothing to read off and the
    verdict is negative.
    """
    if position == 1:
        for x in controllers:
            m.require_executable(x)
    if not probes:
        return Verdict(False, reason="no probes")
    constants = [(x, _constant_first_output(m.mf, x, probes, position)) for x in controllers]
    for i, (x1, z1) in enumerate(constants):
        if z1 is None:
            continue
        for x2, z2 in constants[i + 1 :]:
            if z2 is not None and z1 != z2:
                return Verdict(True, witness=(x1, x2, z1, z2))
    return Verdict(False, reason="no pair of distinct constant outputs")
