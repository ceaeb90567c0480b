"""Command-line workbench.

Exit status: 0 when every check in the invoked report passes, 1 on check
failures, 2 on usage errors.  Reports are line-oriented plain text with
stable PASS/FAIL markers so acceptance runs diff cleanly; randomized
commands take an explicit seed.
"""

from __future__ import annotations

import argparse
import sys

from .bits import read_bits_file, write_bits_file
from .langs import (
    AsmError,
    fmt_asm,
    fmt_src,
    host_assemble,
    host_compile,
    host_disassemble,
    make_icn,
)
from .machine import DIV, MEA, Bits
from .toyvm import as_machine_structure

TM_RUN_FUEL = 1_000_000
INTERP_LEG_FUEL = 64_000_000


def _read_text(path) -> str:
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    return text[:-1] if text.endswith("\n") else text


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(text + "\n" if text else "")


def _cmd_tm_run(args) -> int:
    exe = read_bits_file(args.exe)
    inputs = [read_bits_file(p) for p in args.inputs]
    machine = as_machine_structure(args.fuel)
    chi = (exe,) + tuple(inputs)
    for n in range(1, args.n_max + 1):
        out = machine.mf.eval(n, chi)
        if out is MEA:
            print(f"out[{n}] = Mea")
        elif out is DIV:
            print(f"out[{n}] = Div")
        else:
            assert isinstance(out, Bits)
            print(f"out[{n}] = bits:{out.payload.to_text()}")
    return 0


def _cmd_asm(args) -> int:
    try:
        exe = host_assemble(_read_text(args.source))
    except AsmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_bits_file(args.output, exe)
    print(f"wrote {args.output} ({len(exe)} bits)")
    return 0


def _cmd_compile(args) -> int:
    try:
        asm = host_compile(_read_text(args.source))
    except AsmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_text(args.output, asm)
    print(f"wrote {args.output} ({len(asm.splitlines())} lines)")
    return 0


def _cmd_disasm(args) -> int:
    result = host_disassemble(read_bits_file(args.exe))
    if not result.ok:
        print(result.errors, file=sys.stderr)
        return 1
    print(result.asm)
    return 0


def _cmd_icn(args) -> int:
    try:
        icn = make_icn(_read_text(args.source))
    except AsmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_bits_file(args.output, icn)
    print(f"wrote {args.output} ({len(icn)} bits)")
    return 0


def _cmd_ea_script(args) -> int:
    from .exec_arch import load_snapshot, run_script, save_snapshot

    machine = as_machine_structure(args.fuel)
    state = load_snapshot(args.snapshot, machine)
    final, replies = run_script(state, _read_text(args.script), machine)
    for text, reply in replies:
        print(f"{reply.value}  {text}")
    if args.output:
        save_snapshot(final, args.output)
        print(f"wrote {args.output}")
    return 0


def _cmd_thread_apply(args) -> int:
    from .exec_arch import EAService, load_snapshot, save_snapshot
    from .threads import apply, parse_thread

    machine = as_machine_structure(args.machine_fuel)
    state = load_snapshot(args.snapshot, machine)
    thread = parse_thread(_read_text(args.thread))
    outcome = apply(thread, args.focus, EAService(state, machine), args.fuel)
    if outcome.converged:
        print(f"converged after {outcome.steps} actions")
        if args.output:
            save_snapshot(outcome.service.state, args.output)
            print(f"wrote {args.output}")
        return 0
    print(f"undefined: {outcome.reason} (after {outcome.steps} actions)")
    return 1


def _cmd_experiment(args) -> int:
    from . import experiments

    if args.which == "assembler-fixpoint":
        members, probes = experiments.load_asm_corpus(args.corpus)
        kwargs = {}
        if args.fuel:
            kwargs["translator_fuel"] = args.fuel
        report = experiments.assembler_fixpoint_experiment(members, probes, **kwargs)
    elif args.which == "compiler-fixpoint":
        members, probes = experiments.load_src_corpus(args.corpus)
        kwargs = {}
        if args.fuel:
            kwargs["translator_fuel"] = args.fuel
        report = experiments.compiler_fixpoint_experiment(members, probes, **kwargs)
    else:
        corpus = experiments.load_interp_corpus(args.corpus)
        inner = (args.fuel or INTERP_LEG_FUEL) // experiments.INTERPRETATION_OVERHEAD
        report = experiments.interpreter_experiment(corpus, inner_fuel=max(inner, 1))
    print(report.render())
    return 0 if report.ok else 1


def _cmd_check_rules(args) -> int:
    from .experiments import check_rules_experiment

    report = check_rules_experiment(cases=args.cases, seed=args.seed, fuel=args.fuel)
    print(report.render())
    return 0 if report.ok else 1


def _cmd_port_check(args) -> int:
    from .portability import run_port_check

    verdict, lines = run_port_check(args.manifest, args.notations)
    print("\n".join(lines))
    return 0 if verdict else 1


def _cmd_fmt(args) -> int:
    text = _read_text(args.path)
    kind = args.kind
    if kind == "auto":
        kind = "src" if str(args.path).endswith(".src") else "asm"
    try:
        canon = fmt_src(text) if kind == "src" else fmt_asm(text)
    except AsmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.output:
        _write_text(args.output, canon)
        print(f"wrote {args.output}")
    else:
        print(canon)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccwb",
        description="workbench for the toy code-controlled machine: run programs, "
        "translate between notations, script the file-store architecture, apply "
        "threads to services, and reproduce the bootstrap experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tm-run", help="run an executable and print its outputs")
    p.add_argument("exe")
    p.add_argument("--in", dest="inputs", action="append", default=[], metavar="BITSFILE")
    p.add_argument("--fuel", type=int, default=TM_RUN_FUEL)
    p.add_argument("--n-max", type=int, default=1)
    p.set_defaults(func=_cmd_tm_run)

    p = sub.add_parser("asm", help="assemble to an executable file")
    p.add_argument("source")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_asm)

    p = sub.add_parser("compile", help="compile source text to assembly text")
    p.add_argument("source")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("disasm", help="disassemble an executable file")
    p.add_argument("exe")
    p.set_defaults(func=_cmd_disasm)

    p = sub.add_parser("icn", help="build intermediate code from assembly text")
    p.add_argument("source")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_icn)

    p = sub.add_parser("ea-script", help="run a file-store instruction script")
    p.add_argument("snapshot")
    p.add_argument("script")
    p.add_argument("-o", "--output")
    p.add_argument("--fuel", type=int, default=TM_RUN_FUEL)
    p.set_defaults(func=_cmd_ea_script)

    p = sub.add_parser("thread-apply", help="apply a thread to a file-store service")
    p.add_argument("snapshot")
    p.add_argument("thread")
    p.add_argument("-o", "--output")
    p.add_argument("--fuel", type=int, default=4096, help="thread step budget")
    p.add_argument("--machine-fuel", type=int, default=TM_RUN_FUEL)
    p.add_argument("--focus", default="ea")
    p.set_defaults(func=_cmd_thread_apply)

    p = sub.add_parser("experiment", help="run a bootstrap experiment")
    p.add_argument("which", choices=("assembler-fixpoint", "compiler-fixpoint", "interpreter"))
    p.add_argument("--corpus", default=None, help="corpus directory (default: shipped)")
    p.add_argument("--fuel", type=int, default=0, help="translator / interpreter-leg fuel")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("check-rules", help="randomized machine-function rule checks")
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fuel", type=int, default=4096)
    p.set_defaults(func=_cmd_check_rules)

    p = sub.add_parser("port-check", help="run a portability fixture manifest")
    p.add_argument("manifest")
    p.add_argument(
        "--notations",
        default=None,
        help="notation-registry manifest; code kinds then resolve by registry name",
    )
    p.set_defaults(func=_cmd_port_check)

    p = sub.add_parser("fmt", help="canonicalize assembly or source text")
    p.add_argument("path")
    p.add_argument("-o", "--output")
    p.add_argument("--kind", choices=("auto", "asm", "src"), default="auto")
    p.set_defaults(func=_cmd_fmt)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
