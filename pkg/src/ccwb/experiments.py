"""Bootstrap experiments on the toy machine.

Three experiment drivers, all phrased over the machine structure (every
translation leg is an actual run of the machine on the bit-sequence
representation of a code):

* the assembler bootstrap: assembling the self-hosted assembler with the
  host-built one, then with its own output, stabilizes after one round —
  further self-application reproduces the same executable bit for bit;
* the compiler bootstrap: identical story one level up, with the compiler
  kept in assembly form so every generation is assembled before use;
* interpreter correctness: compiling a source program to an executable and
  running it agrees, index for index, with compiling it to intermediate
  code and running the interpreter on that.

Every universal claim is checked corpus-bounded: the reports say exactly
what was run, with witnesses on failure.  Translation legs and behavioural
probes use separate machine budgets: translator runs need millions of steps
while probe runs are tiny, and a diverging probe program must not burn the
translator budget per probe.  When both sides of an interpreter comparison
diverge, the pair is re-run at four times the fuel to confirm the verdict
is not a budget artifact.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .bits import BitSeq
from .langs import (
    SelfHostedAssets,
    bootstrap_assembler,
    host_compile,
    load_assets,
    text_rep,
)
from .machine import DIV, Bits, Corpus, MachineStructure, behaviourally_equivalent
from .toyvm import as_machine_structure

__all__ = [
    "ExperimentError",
    "CheckLine",
    "ExperimentReport",
    "parse_vector",
    "load_asm_corpus",
    "load_src_corpus",
    "load_interp_corpus",
    "assembler_fixpoint_experiment",
    "compiler_fixpoint_experiment",
    "interpreter_experiment",
    "check_rules_experiment",
    "random_program",
    "INTERPRETATION_OVERHEAD",
]

# Interpretation multiplies step counts; outer (interpreter-side) legs get
# this factor more fuel than the direct leg they are compared against.
INTERPRETATION_OVERHEAD = 64

DEFAULT_TRANSLATOR_FUEL = 1 << 26
DEFAULT_PROBE_FUEL = 1 << 18
DEFAULT_PROBE_N_MAX = 3


class ExperimentError(RuntimeError):
    """A translation leg produced no usable output (meaningless/divergent)."""


@dataclass
class CheckLine:
    label: str
    status: str  # PASS | FAIL | ERROR
    detail: str = ""

    def render(self) -> str:
        return f"{self.label}: {self.status}" + (f" ({self.detail})" if self.detail else "")


@dataclass
class ExperimentReport:
    name: str
    config: List[str] = field(default_factory=list)
    checks: List[CheckLine] = field(default_factory=list)
    artifacts: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.status == "PASS" for c in self.checks)

    def add(self, label: str, ok: bool, detail: str = "") -> None:
        self.checks.append(CheckLine(label, "PASS" if ok else "FAIL", detail))

    def error(self, label: str, detail: str) -> None:
        self.checks.append(CheckLine(label, "ERROR", detail))

    def render(self) -> str:
        lines = [f"experiment: {self.name}"]
        lines += [f"  {c}" for c in self.config]
        lines += [c.render() for c in self.checks]
        lines.append(f"result: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


# -- corpus loading -----------------------------------------------------------


def parse_vector(line: str) -> Tuple[BitSeq, ...]:
    """One input vector per line: bit-sequence tokens separated by spaces,
    ``e`` for an empty argument, a sole ``-`` for the empty vector."""
    tokens = line.split()
    if tokens == ["-"]:
        return ()
    return tuple(BitSeq() if t == "e" else BitSeq.from_text(t) for t in tokens)


def _default_dir(kind: str):
    return resources.files("ccwb").joinpath("data", "corpora", kind)


def _read_manifest(root) -> List[str]:
    names = []
    for line in root.joinpath("manifest.txt").read_text("ascii").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, digest_part = line.split()
        expected = digest_part.split("=", 1)[1]
        blob = root.joinpath(name).read_bytes()
        actual = hashlib.sha256(blob).hexdigest()
        if actual != expected:
            raise ValueError(f"corpus file {name}: digest mismatch")
        names.append(name)
    return names


def _corpus_files(root, suffix: str) -> List[str]:
    manifest = root.joinpath("manifest.txt")
    exists = manifest.is_file() if hasattr(manifest, "is_file") else manifest.exists()
    if exists:
        names = _read_manifest(root)
    else:
        names = sorted(p.name for p in root.iterdir())
    return [n for n in names if n.endswith(suffix)]


def _read_text(root, name: str) -> str:
    text = root.joinpath(name).read_text("ascii")
    return text[:-1] if text.endswith("\n") else text


def _load_probes(root) -> List[Tuple[BitSeq, ...]]:
    probe_file = root.joinpath("probes.txt")
    exists = probe_file.is_file() if hasattr(probe_file, "is_file") else probe_file.exists()
    if not exists:
        return [(), (BitSeq.from_text("101"),)]
    vectors = []
    for line in probe_file.read_text("ascii").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            vectors.append(parse_vector(line))
    return vectors


def _as_root(path):
    if path is None:
        return None
    return Path(path) if isinstance(path, (str, Path)) else path


def load_asm_corpus(path=None):
    """[(name, asm_text)] plus equivalence probe vectors."""
    root = _as_root(path) or _default_dir("asm")
    members = [(n, _read_text(root, n)) for n in _corpus_files(root, ".asm")]
    return members, _load_probes(root)


def load_src_corpus(path=None):
    root = _as_root(path) or _default_dir("src")
    members = [(n, _read_text(root, n)) for n in _corpus_files(root, ".src")]
    return members, _load_probes(root)


def load_interp_corpus(path=None):
    """[(name, src_text, [input vector, ...])] — vectors are never empty."""
    root = _as_root(path) or _default_dir("interp")
    cases = []
    for name in _corpus_files(root, ".src"):
        src = _read_text(root, name)
        vec_name = name[: -len(".src")] + ".inputs"
        vectors = [
            parse_vector(line)
            for line in root.joinpath(vec_name).read_text("ascii").splitlines()
            if line.strip() and not line.lstrip().startswith("#")
        ]
        cases.append((name, src, vectors))
    return cases


# -- shared machinery ---------------------------------------------------------


def _run1(m: MachineStructure, label: str, exe: BitSeq, *args: BitSeq) -> BitSeq:
    out = m.mf.eval(1, (exe,) + args)
    if not isinstance(out, Bits):
        raise ExperimentError(f"{label} produced {out!r}")
    return out.payload


def _probe_corpus(vectors: Sequence[Tuple[BitSeq, ...]], n_max: int) -> Corpus:
    return Corpus.of(vectors, n_max)


# -- the assembler bootstrap ---------------------------------------------------


def assembler_fixpoint_experiment(
    corpus=None,
    probes=None,
    assets: Optional[SelfHostedAssets] = None,
    translator_fuel: int = DEFAULT_TRANSLATOR_FUEL,
    probe_fuel: int = DEFAULT_PROBE_FUEL,
    probe_n_max: int = DEFAULT_PROBE_N_MAX,
    extra_iterations: int = 3,
    existing_exe: Optional[BitSeq] = None,
) -> ExperimentReport:
    """Bootstrap the self-hosted assembler and check the three claims:

    correctness (existing and self-built assemblers produce behaviourally
    equivalent executables on every corpus program), one-round equivalence
    of the two self-built generations, and the bit-exact fixed point under
    further self-application.

    The existing assembler defaults to the host-assembled form of the new
    assembler text itself; passing ``existing_exe`` decouples them, which is
    how a defective new assembler shows up as a correctness failure.
    """
    if corpus is None or probes is None:
        default_members, default_probes = load_asm_corpus()
        corpus = default_members if corpus is None else corpus
        probes = default_probes if probes is None else probes
    if assets is None:
        assets = load_assets()

    report = ExperimentReport(
        "assembler-fixpoint",
        config=[
            f"corpus: {len(corpus)} assembly programs",
            f"translator fuel: {translator_fuel}",
            f"probe fuel: {probe_fuel}, probe n_max: {probe_n_max}",
        ],
    )
    trans_m = as_machine_structure(translator_fuel)
    probe_m = as_machine_structure(probe_fuel)
    source_rep = text_rep(assets.asm_prime)

    try:
        asm0 = existing_exe if existing_exe is not None else bootstrap_assembler(assets)
        gen1 = _run1(trans_m, "self-assembly round 1", asm0, source_rep)
        gen2 = _run1(trans_m, "self-assembly round 2", gen1, source_rep)
    except ExperimentError as exc:
        report.error("E1", str(exc))
        return report
    report.artifacts.update({"asm0": asm0, "asm2": gen1, "asm3": gen2})

    probe_m = as_machine_structure(probe_fuel)
    probe_c = _probe_corpus(probes, probe_n_max)
    bad = 0
    first = ""
    for name, asm_text in corpus:
        rep = text_rep(asm_text)
        try:
            via_host = _run1(trans_m, f"assemble {name} via bootstrap", asm0, rep)
            via_self = _run1(trans_m, f"assemble {name} via generation 1", gen1, rep)
        except ExperimentError as exc:
            report.error("E1", str(exc))
            return report
        verdict = behaviourally_equivalent(probe_m, via_host, via_self, probe_c)
        if not verdict:
            bad += 1
            if not first:
                first = f"{name}: {verdict.reason} at {verdict.witness}"
    report.add("E1", bad == 0, f"{len(corpus)} programs" if bad == 0 else first)

    if corpus:
        equiv_c = Corpus.of([(text_rep(t),) for _, t in corpus], n_max=4)
        verdict = behaviourally_equivalent(trans_m, gen1, gen2, equiv_c)
        report.add("E2", bool(verdict), "" if verdict else f"witness {verdict.witness}")
    else:
        report.add("E2", True, "vacuous: empty corpus")

    try:
        fixed = _run1(trans_m, "fixed-point check", gen2, source_rep)
    except ExperimentError as exc:
        report.error("E3", str(exc))
        return report
    stable = fixed == gen2
    current = fixed
    rounds = 0
    for _ in range(extra_iterations):
        if not stable:
            break
        nxt = _run1(trans_m, "fixed-point iteration", current, source_rep)
        stable = nxt == current
        current = nxt
        rounds += 1
    report.add(
        "E3",
        stable,
        f"bit-exact, stable for {1 + rounds} further iterations" if stable else "fixed point lost",
    )
    return report


# -- the compiler bootstrap ----------------------------------------------------


def compiler_fixpoint_experiment(
    corpus=None,
    probes=None,
    assets: Optional[SelfHostedAssets] = None,
    translator_fuel: int = DEFAULT_TRANSLATOR_FUEL,
    probe_fuel: int = DEFAULT_PROBE_FUEL,
    probe_n_max: int = DEFAULT_PROBE_N_MAX,
    existing_asm: Optional[str] = None,
) -> ExperimentReport:
    """Bootstrap the self-hosted compiler, kept in assembly form throughout
    (compilers produce assembly text; every generation is assembled by the
    bootstrapped assembler before it can run).

    The existing compiler defaults to the host-compiled assembly form of
    the new compiler source; ``existing_asm`` decouples them for defect
    demonstrations, as with the assembler experiment.
    """
    if corpus is None or probes is None:
        default_members, default_probes = load_src_corpus()
        corpus = default_members if corpus is None else corpus
        probes = default_probes if probes is None else probes
    if assets is None:
        assets = load_assets()

    report = ExperimentReport(
        "compiler-fixpoint",
        config=[
            f"corpus: {len(corpus)} source programs",
            f"translator fuel: {translator_fuel}",
            f"probe fuel: {probe_fuel}, probe n_max: {probe_n_max}",
        ],
    )
    trans_m = as_machine_structure(translator_fuel)
    source_rep = text_rep(assets.compil_prime)

    try:
        asm0 = bootstrap_assembler(assets)
        if existing_asm is None:
            existing_asm = host_compile(assets.compil_prime)
        existing_exe = _run1(trans_m, "assemble existing compiler", asm0, text_rep(existing_asm))
        gen2 = _run1(trans_m, "compile new compiler", existing_exe, source_rep)
        gen2_exe = _run1(trans_m, "assemble generation 2", asm0, gen2)
        gen3 = _run1(trans_m, "recompile with generation 2", gen2_exe, source_rep)
        gen3_exe = _run1(trans_m, "assemble generation 3", asm0, gen3)
    except ExperimentError as exc:
        report.error("C1", str(exc))
        return report
    report.artifacts.update(
        {"asm0": asm0, "compil2": gen2, "compil3": gen3, "compil2_exe": gen2_exe, "compil3_exe": gen3_exe}
    )

    probe_m = as_machine_structure(probe_fuel)
    probe_c = _probe_corpus(probes, probe_n_max)
    bad = 0
    first = ""
    for name, src in corpus:
        rep = text_rep(src)
        try:
            via_old = _run1(trans_m, f"compile {name} with existing", existing_exe, rep)
            old_exe = _run1(trans_m, f"assemble {name} (existing path)", asm0, via_old)
            via_new = _run1(trans_m, f"compile {name} with generation 2", gen2_exe, rep)
            new_exe = _run1(trans_m, f"assemble {name} (new path)", asm0, via_new)
        except ExperimentError as exc:
            report.error("C1", str(exc))
            return report
        verdict = behaviourally_equivalent(probe_m, old_exe, new_exe, probe_c)
        if not verdict:
            bad += 1
            if not first:
                first = f"{name}: {verdict.reason} at {verdict.witness}"
    report.add("C1", bad == 0, f"{len(corpus)} programs" if bad == 0 else first)

    if corpus:
        equiv_c = Corpus.of([(text_rep(s),) for _, s in corpus], n_max=4)
        verdict = behaviourally_equivalent(trans_m, gen2_exe, gen3_exe, equiv_c)
        report.add("C2", bool(verdict), "" if verdict else f"witness {verdict.witness}")
    else:
        report.add("C2", True, "vacuous: empty corpus")

    try:
        fixed = _run1(trans_m, "fixed-point check", gen3_exe, source_rep)
    except ExperimentError as exc:
        report.error("C3", str(exc))
        return report
    report.add("C3", fixed == gen3, "bit-exact" if fixed == gen3 else "fixed point lost")
    return report


# -- interpreter correctness ----------------------------------------------------


def interpreter_experiment(
    corpus=None,
    assets: Optional[SelfHostedAssets] = None,
    n_max: int = 4,
    inner_fuel: int = 1_000_000,
    overhead: int = INTERPRETATION_OVERHEAD,
) -> ExperimentReport:
    """Compare compile-assemble-run against compile-to-intermediate-and-
    interpret, index for index, on every corpus case and input vector."""
    if corpus is None:
        corpus = load_interp_corpus()
    if assets is None:
        assets = load_assets()

    outer_fuel = inner_fuel * overhead
    report = ExperimentReport(
        "interpreter",
        config=[
            f"corpus: {len(corpus)} source programs",
            f"direct fuel: {inner_fuel}, interpreter fuel: {outer_fuel} (overhead {overhead})",
            f"indices checked: 1..{n_max}",
        ],
    )
    trans_m = as_machine_structure(outer_fuel)
    direct_m = as_machine_structure(inner_fuel)
    interp_m = as_machine_structure(outer_fuel)

    try:
        asm0 = bootstrap_assembler(assets)
        compil_a_exe = _run1(
            trans_m, "assemble src->asm compiler", asm0, text_rep(host_compile(assets.compil_prime))
        )
        compil_i_exe = _run1(
            trans_m, "assemble src->icn compiler", asm0, text_rep(host_compile(assets.compil_icn_prime))
        )
    except ExperimentError as exc:
        report.error("I1", str(exc))
        return report

    interp = assets.interp_exe
    mismatches = 0
    first = ""
    compared = 0
    div_retries = 0
    for name, src, vectors in corpus:
        rep = text_rep(src)
        try:
            asm_text_bits = _run1(trans_m, f"compile {name}", compil_a_exe, rep)
            exe = _run1(trans_m, f"assemble {name}", asm0, asm_text_bits)
            icn = _run1(trans_m, f"compile {name} to icn", compil_i_exe, rep)
        except ExperimentError as exc:
            report.error("I1", str(exc))
            return report
        for vec in vectors:
            saw_div_pair = False
            for n in range(1, n_max + 1):
                lhs = direct_m.mf.eval(n, (exe,) + vec)
                rhs = interp_m.mf.eval(n, (interp, icn) + vec)
                compared += 1
                if lhs != rhs:
                    mismatches += 1
                    if not first:
                        first = f"{name} {tuple(v.to_text() for v in vec)} n={n}: {lhs!r} vs {rhs!r}"
                elif lhs is DIV:
                    saw_div_pair = True
            if saw_div_pair:
                # confirm the divergence verdict is not a fuel artifact
                div_retries += 1
                direct4 = as_machine_structure(inner_fuel * 4)
                interp4 = as_machine_structure(outer_fuel * 4)
                for n in range(1, n_max + 1):
                    lhs = direct4.mf.eval(n, (exe,) + vec)
                    rhs = interp4.mf.eval(n, (interp, icn) + vec)
                    if lhs != rhs:
                        mismatches += 1
                        if not first:
                            first = f"{name} (4x fuel) n={n}: {lhs!r} vs {rhs!r}"
    detail = f"{compared} comparisons, {div_retries} divergent pairs re-confirmed at 4x fuel"
    report.add("I1", mismatches == 0, detail if mismatches == 0 else first)
    return report


# -- randomized machine-function rule checks ------------------------------------


def random_program(rng, max_len: int = 12):
    """A random valid program, biased towards small operands and local jumps
    so that a useful fraction of runs halts, loops, and touches memory."""
    from . import toyvm

    length = rng.randrange(0, max_len + 1)
    instructions = []
    for _ in range(length):
        mnemonic = rng.choice(toyvm.MNEMONICS)
        if mnemonic in toyvm.NO_OPERAND:
            operand = 0
        elif mnemonic in ("JMP", "JZ", "JNZ"):
            operand = rng.randrange(0, max_len + 4)
        elif mnemonic == "OUTBIT":
            operand = rng.randrange(0, 5)
        elif mnemonic == "LDI":
            operand = rng.choice((0, 1, 2, 3, 7, rng.randrange(1 << 32)))
        else:
            operand = rng.randrange(0, 8)
        instructions.append(toyvm.ToyInstruction.of(mnemonic, operand))
    return toyvm.ToyProgram(tuple(instructions))


def check_rules_experiment(
    cases: int = 1000,
    seed: int = 0,
    fuel: int = 4096,
    n_max: int = 4,
) -> ExperimentReport:
    """Randomized check of the five machine-function rules against the toy
    machine: random (program, inputs, extension) triples, fixed seed."""
    import random

    from .machine import check_mf_rules
    from .toyvm import encode

    rng = random.Random(seed)
    machine = as_machine_structure(fuel)
    report = ExperimentReport(
        "check-rules",
        config=[f"cases: {cases}, seed: {seed}, fuel: {fuel}, n_max: {n_max}"],
    )

    def random_bits():
        return BitSeq([rng.randrange(2) for _ in range(rng.randrange(0, 9))])

    failures = 0
    inconclusive = 0
    first = ""
    for index in range(cases):
        exe = encode(random_program(rng))
        chi = (exe,) + tuple(random_bits() for _ in range(rng.randrange(0, 3)))
        extension = tuple(random_bits() for _ in range(rng.randrange(1, 3)))
        outcome = check_mf_rules(machine.mf, Corpus.of([chi], n_max), [extension])
        failures += len(outcome.failures)
        inconclusive += len(outcome.r2_inconclusive)
        if outcome.failures and not first:
            f = outcome.failures[0]
            first = f"case {index}: {f.rule} {f.detail}"
    report.add(
        "R1-R5",
        failures == 0,
        f"{cases} cases, 0 failures, {inconclusive} bounded-search inconclusives"
        if failures == 0
        else first,
    )
    return report
