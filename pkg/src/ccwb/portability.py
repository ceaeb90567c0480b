"""Installed, expansible, pre-installed, and portable control codes.

All four predicates quantify existentially over names, threads, or transfer
plans; searching those spaces is infeasible in general, so the checkers here
take the witnesses as certificates and verify them exactly.  A bounded
brute-force search over small witness name tuples is provided for the one
negative clause that needs it ("not installed") and as a convenience for
small fixtures.

Every verdict is corpus- and witness-bounded: a positive answer certifies
the witnessed instance on the given corpus, a negative one carries the
failed clause or a concrete counterexample.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .bits import BitSeq
from .exec_arch import EAService, Live, Set, parse_instruction
from .machine import DIV, Corpus, MachineStructure, Verdict
from .notation import ControlCodeNotation
from .threads import (
    STOP,
    BasicAction,
    ThreadTerm,
    actions_of,
    apply,
    prefix,
)

__all__ = [
    "InstallWitness",
    "ExpansionWitness",
    "TransferPlan",
    "check_installed",
    "search_install_witness",
    "check_expansible",
    "check_preinstalled",
    "check_portable",
    "Example3Fixture",
    "Example4Fixture",
    "scenario_example3",
    "scenario_example4",
]

SEARCH_NAME_LIMIT = 3  # witness tuples up to this many names are searched


@dataclass(frozen=True)
class InstallWitness:
    """File names ``(f0, ..., fl)``: the executable at ``f0`` run on the
    values of the remaining names emulates the control code."""

    names: Tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise ValueError("an install witness names at least one file")
        if len(set(self.names)) != len(self.names):
            raise ValueError("witness names must be distinct")


@dataclass(frozen=True)
class ExpansionWitness:
    """A thread whose actions all address the file store, none of them a
    set instruction: expansion may only use what is already there."""

    thread: ThreadTerm

    def validate(self, focus: str = "ea") -> Verdict:
        for action in actions_of(self.thread):
            if action.focus != focus:
                return Verdict(False, witness=str(action), reason="action outside the store focus")
            try:
                instruction = parse_instruction(action.method)
            except ValueError:
                return Verdict(False, witness=str(action), reason="method is not an instruction")
            if isinstance(instruction, Set):
                return Verdict(False, witness=str(action), reason="set instruction in expansion thread")
        return Verdict(True)


@dataclass(frozen=True)
class TransferPlan:
    """Names whose values are replayed onto the destination via set
    instructions; transportability of bit sequences is assumed."""

    names: Tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise ValueError("plan names must be distinct")


def check_installed(
    m: MachineStructure,
    ccn: ControlCodeNotation,
    code,
    eas: EAService,
    witness: InstallWitness,
    corpus: Corpus,
) -> Verdict:
    """Is the control code installed on the service, per the witness?

    The executable bound to the first witness name, run on the values of
    the remaining names followed by the corpus inputs, must agree with the
    code's projection on every corpus vector and index."""
    ccn.require_member(code)
    if not isinstance(eas.state, Live):
        return Verdict(False, reason="service has diverged")
    files = eas.state.files
    for name in witness.names:
        if name not in files:
            return Verdict(False, witness=name, reason="witness name unbound")
    anchor = files[witness.names[0]]
    if not m.exec_member(anchor):
        return Verdict(False, witness=witness.names[0], reason="anchor file is not executable")
    projected = ccn.project(code)
    fixed = tuple(files[name] for name in witness.names[1:])
    for chi in corpus.inputs:
        for n in range(1, corpus.n_max + 1):
            want = m.mf.eval(n, (projected,) + chi)
            got = m.mf.eval(n, (anchor,) + fixed + chi)
            if want != got:
                return Verdict(False, witness=(chi, n), reason=f"{want!r} != {got!r}")
    return Verdict(True)


def search_install_witness(
    m: MachineStructure,
    ccn: ControlCodeNotation,
    code,
    eas: EAService,
    corpus: Corpus,
    name_limit: int = SEARCH_NAME_LIMIT,
) -> Optional[InstallWitness]:
    """Brute-force search over witness tuples of up to ``name_limit``
    distinct names from the store.  A convenience for small fixtures; the
    bound is part of any verdict derived from it."""
    if not isinstance(eas.state, Live):
        return None
    names = sorted(eas.state.files)
    anchors = [n for n in names if m.exec_member(eas.state.files[n])]
    for anchor in anchors:
        rest_pool = [n for n in names if n != anchor]
        for extra in range(0, name_limit):
            for tail in itertools.permutations(rest_pool, extra):
                witness = InstallWitness((anchor,) + tail)
                if check_installed(m, ccn, code, eas, witness, corpus):
                    return witness
    return None


def check_expansible(
    eas: EAService,
    eas_target: EAService,
    witness: ExpansionWitness,
    fuel: int = 4096,
    focus: str = "ea",
) -> Verdict:
    """Can the service be expanded to the target by the witness thread?

    Three clauses: the target preserves every existing binding; the thread
    uses no set instruction; applying the thread to the service converges
    on exactly the target's backing state.  Fuel exhaustion during the
    application is reported distinctly from state inequality."""
    if not isinstance(eas.state, Live) or not isinstance(eas_target.state, Live):
        return Verdict(False, reason="expansion needs live states")
    for name, value in eas.state.files.items():
        if eas_target.state.files.get(name) != value:
            return Verdict(False, witness=name, reason="target does not preserve the binding")
    thread_ok = witness.validate(focus)
    if not thread_ok:
        return thread_ok
    outcome = apply(witness.thread, focus, eas, fuel)
    if not outcome.converged:
        reason = "fuel exhausted during expansion" if outcome.reason == "fuel-exhausted" else (
            f"expansion thread did not converge ({outcome.reason})"
        )
        return Verdict(False, reason=reason)
    if not isinstance(outcome.service, EAService) or outcome.service.state != eas_target.state:
        return Verdict(False, reason="expansion reached a different state")
    return Verdict(True)


def check_preinstalled(
    m: MachineStructure,
    ccn: ControlCodeNotation,
    code,
    eas: EAService,
    expansion: Tuple[ExpansionWitness, EAService],
    install_witness: InstallWitness,
    corpus: Corpus,
    search_limit: int = SEARCH_NAME_LIMIT,
    fuel: int = 4096,
) -> Verdict:
    """Pre-installed: not installed, but installed on a witnessed expansion.

    The negative clause is a negated existential; it is decided by
    exhausting witness tuples up to ``search_limit`` names, and that bound
    is part of the verdict."""
    already = search_install_witness(m, ccn, code, eas, corpus, search_limit)
    if already is not None:
        return Verdict(False, witness=already.names, reason="already installed")
    expansion_witness, target = expansion
    expandable = check_expansible(eas, target, expansion_witness, fuel)
    if not expandable:
        return Verdict(False, witness=expandable.witness, reason=f"not expansible: {expandable.reason}")
    installed = check_installed(m, ccn, code, target, install_witness, corpus)
    if not installed:
        return Verdict(False, witness=installed.witness, reason=f"not installed on target: {installed.reason}")
    return Verdict(True)


def _set_replay_thread(plan: TransferPlan, source_files: Dict[str, BitSeq]) -> ThreadTerm:
    thread: ThreadTerm = STOP
    for name in reversed(plan.names):
        bits = source_files[name]
        thread = prefix(BasicAction("ea", f"set:{name}:{bits.to_text()}"), thread)
    return thread


def check_portable(
    m: MachineStructure,
    m_dst: MachineStructure,
    ccn_pair: Tuple[ControlCodeNotation, ControlCodeNotation],
    code,
    eas0: EAService,
    eas0_dst: EAService,
    expansion: Tuple[ExpansionWitness, EAService],
    plan: TransferPlan,
    dest_expansion: Tuple[ExpansionWitness, EAService],
    install_witness: InstallWitness,
    corpus: Corpus,
    search_limit: int = SEARCH_NAME_LIMIT,
    fuel: int = 4096,
) -> Verdict:
    """Portable from a source service to a destination service over another
    machine structure.

    Three clauses: (1) prerequisite — on every corpus vector where the code
    halts on the source machine, both machines produce identical outputs at
    every inspected index; (2) the source service is expansible to the
    witnessed expansion; (3) the plan names are bound on the expansion but
    not on the destination, and after replaying them onto the destination
    via set instructions, the code is pre-installed there (witnessed by
    ``dest_expansion`` and ``install_witness``).

    The pre-installation clause needs its own expansion certificate for the
    destination; it cannot be derived from the source-side witness.
    """
    ccn_src, ccn_dst = ccn_pair
    ccn_src.require_member(code)
    ccn_dst.require_member(code)
    projected_src = ccn_src.project(code)
    projected_dst = ccn_dst.project(code)

    sample = [v for chi in corpus.inputs for v in chi]
    for bits in sample:
        if m.bseq_member(bits) and not m_dst.bseq_member(bits):
            return Verdict(False, reason="destination does not admit a corpus bit sequence")

    for chi in corpus.inputs:
        if m.mf.eval(1, (projected_src,) + chi) is DIV:
            continue
        for n in range(1, corpus.n_max + 1):
            a = m.mf.eval(n, (projected_src,) + chi)
            b = m_dst.mf.eval(n, (projected_dst,) + chi)
            if a != b:
                return Verdict(False, witness=(chi, n), reason=f"machines disagree: {a!r} vs {b!r}")

    expansion_witness, expanded = expansion
    ok = check_expansible(eas0, expanded, expansion_witness, fuel)
    if not ok:
        return Verdict(False, witness=ok.witness, reason=f"source not expansible: {ok.reason}")

    if not isinstance(expanded.state, Live) or not isinstance(eas0_dst.state, Live):
        return Verdict(False, reason="live states required")
    for name in plan.names:
        if name not in expanded.state.files:
            return Verdict(False, witness=name, reason="plan name unbound on the expansion")
        if name in eas0_dst.state.files:
            raise ValueError(f"plan name {name!r} already bound at the destination")

    replay = _set_replay_thread(plan, expanded.state.files)
    outcome = apply(replay, "ea", eas0_dst, fuel)
    if not outcome.converged:
        return Verdict(False, reason=f"transfer replay failed ({outcome.reason})")
    replayed = outcome.service

    pre = check_preinstalled(
        m_dst, ccn_dst, code, replayed, dest_expansion, install_witness, corpus, search_limit, fuel
    )
    if not pre:
        return Verdict(False, witness=pre.witness, reason=f"not pre-installed after transfer: {pre.reason}")
    return Verdict(True)


# -- the two worked scenarios --------------------------------------------------


@dataclass
class Example3Fixture:
    """A compiler shipped in assembly form next to an assembler executable:
    not installed as such, but pre-installed via one load and one run."""

    machine: MachineStructure
    notation: ControlCodeNotation
    code: object
    eas: EAService
    expansion: Tuple[ExpansionWitness, EAService]
    install_witness: InstallWitness
    corpus: Corpus


@dataclass
class Example4Fixture:
    """A source program portable from a machine holding a compiler to a
    machine holding only an assembler, by compiling at the source side and
    transferring the compiled text."""

    machine: MachineStructure
    machine_dst: MachineStructure
    notations: Tuple[ControlCodeNotation, ControlCodeNotation]
    code: object
    eas0: EAService
    eas0_dst: EAService
    expansion: Tuple[ExpansionWitness, EAService]
    plan: TransferPlan
    dest_expansion: Tuple[ExpansionWitness, EAService]
    install_witness: InstallWitness
    corpus: Corpus


def _expanded_target(eas: EAService, witness: ExpansionWitness, fuel: int = 4096) -> EAService:
    outcome = apply(witness.thread, "ea", eas, fuel)
    if not outcome.converged or not isinstance(outcome.service, EAService):
        raise RuntimeError(f"fixture expansion did not converge: {outcome.reason}")
    return outcome.service


def scenario_example3(fuel: int = 1 << 26) -> Example3Fixture:
    """fn1 holds the assembler executable, fn2 the compiler in assembly
    form, fn3 is free; expanding by load fn1, run fn2 into fn3 installs the
    compiler at fn3."""
    from .langs import asm_notation, bootstrap_assembler, host_compile, load_assets, text_rep
    from .toyvm import as_machine_structure

    assets = load_assets()
    machine = as_machine_structure(fuel)
    asm0 = bootstrap_assembler(assets)
    compiler_asm = host_compile(assets.compil_prime)

    eas = EAService(
        Live({"fn1": asm0, "fn2": text_rep(compiler_asm)}),
        machine,
    )
    thread = parse_expansion("ea.load:fn1 ; ea.exe:fn2/fn3 ; S")
    target = _expanded_target(eas, thread)

    src_samples = ["LDI 1\nOUTBIT 1\nHALT", "NEXTBIT\nOUTBIT 1\nHALT", "HALT"]
    corpus = Corpus.of([(text_rep(s),) for s in src_samples], n_max=3)
    return Example3Fixture(
        machine=machine,
        notation=asm_notation(),
        code=compiler_asm,
        eas=eas,
        expansion=(thread, target),
        install_witness=InstallWitness(("fn3",)),
        corpus=corpus,
    )


def scenario_example4(fuel: int = 1 << 26, dst_fuel_factor: int = 4) -> Example4Fixture:
    """Source side: fn1 holds a compiler executable, fn2 a source program,
    fn3 is free.  Destination side (the same machine family at a larger
    fuel budget): fn1 holds the assembler, fn3 is free.  Compiling at the
    source and transferring fn3 makes the program pre-installed at the
    destination."""
    from .langs import bootstrap_assembler, host_compile, load_assets, src_notation, text_rep
    from .toyvm import as_machine_structure

    assets = load_assets()
    machine = as_machine_structure(fuel)
    machine_dst = as_machine_structure(fuel * dst_fuel_factor)
    asm0 = bootstrap_assembler(assets)
    compil_exe = machine.mf.eval(1, (asm0, text_rep(host_compile(assets.compil_prime))))
    compil_exe_bits = compil_exe.payload

    program_src = "\n".join(
        [
            "# double every input bit",
            "@loop:",
            "NEXTBIT",
            "STM 0",
            "LDI 2",
            "SUB 0",
            "JZ @end",
            "LDM 0",
            "OUTBIT 1",
            "LDM 0",
            "OUTBIT 1",
            "JMP @loop",
            "@end:",
            "HALT",
        ]
    )

    eas0 = EAService(
        Live({"fn1": compil_exe_bits, "fn2": text_rep(program_src)}),
        machine,
    )
    eas0_dst = EAService(Live({"fn1": asm0}), machine_dst)

    expansion_thread = parse_expansion("ea.load:fn1 ; ea.exe:fn2/fn3 ; S")
    expanded = _expanded_target(eas0, expansion_thread)

    dest_thread = parse_expansion("ea.load:fn1 ; ea.exe:fn3/fn4 ; S")

    # destination target: replay fn3 onto the destination, then expand
    plan = TransferPlan(("fn3",))
    replay = _set_replay_thread(plan, expanded.state.files)
    replayed = apply(replay, "ea", eas0_dst, 64).service
    dest_target = _expanded_target(replayed, dest_thread)

    vectors = [(BitSeq.from_text("1"),), (BitSeq.from_text("010"),), (BitSeq(),)]
    corpus = Corpus.of(vectors, n_max=2)
    return Example4Fixture(
        machine=machine,
        machine_dst=machine_dst,
        notations=(src_notation(), src_notation()),
        code=program_src,
        eas0=eas0,
        eas0_dst=eas0_dst,
        expansion=(expansion_thread, expanded),
        plan=plan,
        dest_expansion=(dest_thread, dest_target),
        install_witness=InstallWitness(("fn4",)),
        corpus=corpus,
    )


def parse_expansion(text: str) -> ExpansionWitness:
    from .threads import parse_thread

    witness = ExpansionWitness(parse_thread(text))
    ok = witness.validate()
    if not ok:
        raise ValueError(f"invalid expansion thread: {ok.reason}")
    return witness


# -- fixture manifests ----------------------------------------------------------
#
# A portability run is described by a key=value manifest naming snapshot
# files, thread expression files, witness name lists, and a corpus file:
#
#   mode=installed | preinstalled | portable
#   machine.fuel=<N>
#   dest.machine.fuel=<N>              (portable; defaults to machine.fuel)
#   code.kind=asm | src | exe | icn
#   code.path=<file>
#   source.snapshot=<file>
#   dest.snapshot=<file>               (portable)
#   expansion.thread=<file>            (preinstalled, portable)
#   expansion.target=<file>
#   plan=<name,name,...>               (portable)
#   dest.expansion.thread=<file>       (portable)
#   dest.expansion.target=<file>
#   install.witness=<name,name,...>
#   corpus=<file>                      (one input vector per line)
#   n_max=<K>
#   apply.fuel=<N>                     (optional)


def _fixture_notation(kind: str, machine: MachineStructure) -> ControlCodeNotation:
    from .langs import asm_notation, exe_notation, icn_notation, src_notation

    builders = {
        "asm": lambda: asm_notation(),
        "src": lambda: src_notation(),
        "exe": lambda: exe_notation(machine),
        "icn": lambda: icn_notation(),
    }
    if kind not in builders:
        raise ValueError(f"unknown code kind {kind!r}")
    return builders[kind]()


def _read_code(notation: ControlCodeNotation, path) -> object:
    from .bits import read_bits_file

    if notation.carrier_is_bitseq:
        return read_bits_file(path)
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    return text[:-1] if text.endswith("\n") else text


def load_fixture_manifest(path) -> Dict[str, str]:
    entries: Dict[str, str] = {}
    with open(path, "r", encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{line_no}: expected key=value")
            entries[key.strip()] = value.strip()
    return entries


def run_port_check(manifest_path, notations_path=None) -> Tuple[Verdict, List[str]]:
    """Run the check described by a fixture manifest; returns the verdict
    plus report lines.

    With ``notations_path``, code kinds are resolved by name through that
    notation-registry manifest instead of the built-in kinds.
    """
    import os

    from .exec_arch import load_snapshot
    from .experiments import parse_vector
    from .threads import parse_thread
    from .toyvm import as_machine_structure

    manifest = load_fixture_manifest(manifest_path)
    base = os.path.dirname(os.fspath(manifest_path))

    def path_of(key: str) -> str:
        return os.path.join(base, manifest[key])

    mode = manifest["mode"]
    fuel = int(manifest["machine.fuel"])
    machine = as_machine_structure(fuel)
    apply_fuel = int(manifest.get("apply.fuel", "4096"))

    def notation_for(target_machine) -> ControlCodeNotation:
        kind = manifest["code.kind"]
        if notations_path is None:
            return _fixture_notation(kind, target_machine)
        from .langs import load_registry

        return load_registry(notations_path, target_machine).notation(kind)

    notation = notation_for(machine)
    code = _read_code(notation, path_of("code.path"))
    notation.require_member(code)

    with open(path_of("corpus"), "r", encoding="ascii") as fh:
        vectors = [parse_vector(line) for line in fh if line.strip() and not line.lstrip().startswith("#")]
    corpus = Corpus.of(vectors, int(manifest["n_max"]))

    lines = [f"mode: {mode}", f"machine fuel: {fuel}", f"corpus: {len(vectors)} vectors, n_max {corpus.n_max}"]

    def expansion_of(prefix_key: str, service_machine) -> Tuple[ExpansionWitness, EAService]:
        with open(path_of(f"{prefix_key}.thread"), "r", encoding="ascii") as fh:
            witness = ExpansionWitness(parse_thread(fh.read()))
        target_state = load_snapshot(path_of(f"{prefix_key}.target"), service_machine)
        return witness, EAService(target_state, service_machine)

    source = EAService(load_snapshot(path_of("source.snapshot"), machine), machine)
    install = InstallWitness(tuple(manifest["install.witness"].split(",")))

    if mode == "installed":
        verdict = check_installed(machine, notation, code, source, install, corpus)
    elif mode == "preinstalled":
        expansion = expansion_of("expansion", machine)
        verdict = check_preinstalled(
            machine, notation, code, source, expansion, install, corpus, fuel=apply_fuel
        )
    elif mode == "portable":
        dst_fuel = int(manifest.get("dest.machine.fuel", manifest["machine.fuel"]))
        machine_dst = as_machine_structure(dst_fuel)
        lines.append(f"destination machine fuel: {dst_fuel}")
        dest = EAService(load_snapshot(path_of("dest.snapshot"), machine_dst), machine_dst)
        expansion = expansion_of("expansion", machine)
        dest_expansion = expansion_of("dest.expansion", machine_dst)
        plan = TransferPlan(tuple(manifest["plan"].split(",")))
        notation_dst = notation_for(machine_dst)
        verdict = check_portable(
            machine,
            machine_dst,
            (notation, notation_dst),
            code,
            source,
            dest,
            expansion,
            plan,
            dest_expansion,
            install,
            corpus,
            fuel=apply_fuel,
        )
    else:
        raise ValueError(f"unknown mode {mode!r}")

    status = "PASS" if verdict else f"FAIL ({verdict.reason})"
    lines.append(f"{mode}: {status}")
    return verdict, lines


def save_example4_fixture(directory, fixture: Optional[Example4Fixture] = None) -> str:
    """Write the portability scenario as a manifest-driven fixture directory;
    returns the manifest path."""
    import os

    from .exec_arch import save_snapshot
    from .threads import render_thread

    if fixture is None:
        fixture = scenario_example4()
    os.makedirs(directory, exist_ok=True)

    def put(name: str, text: str) -> str:
        with open(os.path.join(directory, name), "w", encoding="ascii") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
        return name

    save_snapshot(fixture.eas0.state, os.path.join(directory, "source.snap"))
    save_snapshot(fixture.eas0_dst.state, os.path.join(directory, "dest.snap"))
    save_snapshot(fixture.expansion[1].state, os.path.join(directory, "expanded.snap"))
    save_snapshot(fixture.dest_expansion[1].state, os.path.join(directory, "dest_expanded.snap"))
    put("expand.thread", render_thread(fixture.expansion[0].thread))
    put("dest_expand.thread", render_thread(fixture.dest_expansion[0].thread))
    put("program.src", str(fixture.code))
    corpus_lines = []
    for chi in fixture.corpus.inputs:
        if not chi:
            corpus_lines.append("-")
        else:
            corpus_lines.append(" ".join(b.to_text() if len(b) else "e" for b in chi))
    put("inputs.txt", "\n".join(corpus_lines))
    manifest = "\n".join(
        [
            "mode=portable",
            f"machine.fuel={fixture.machine.mf.fuel_budget}",
            f"dest.machine.fuel={fixture.machine_dst.mf.fuel_budget}",
            "code.kind=src",
            "code.path=program.src",
            "source.snapshot=source.snap",
            "dest.snapshot=dest.snap",
            "expansion.thread=expand.thread",
            "expansion.target=expanded.snap",
            f"plan={','.join(fixture.plan.names)}",
            "dest.expansion.thread=dest_expand.thread",
            "dest.expansion.target=dest_expanded.snap",
            f"install.witness={','.join(fixture.install_witness.names)}",
            "corpus=inputs.txt",
            f"n_max={fixture.corpus.n_max}",
        ]
    )
    put("manifest.txt", manifest)
    return os.path.join(directory, "manifest.txt")
