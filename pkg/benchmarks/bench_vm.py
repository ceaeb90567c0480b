#!/usr/bin/env python3
"""Compare the compiled VM core against the pure-Python fallback.

Three workloads dominated by the interpreter loop:

* ``spin``          — a two-instruction loop burning a fixed fuel budget
                      (exact step count, so steps/second is meaningful);
* ``self-assembly`` — the bootstrapped assembler assembling its own source;
* ``interpret``     — the shipped interpreter running an intermediate-code
                      program that echoes and re-echoes its input.

Both engines must produce identical results; the script asserts that while
timing.  Run after ``pip install -e . --no-build-isolation``.
"""

from __future__ import annotations

import argparse
import time

from ccwb import toyvm
from ccwb.bits import BitSeq
from ccwb.langs import bootstrap_assembler, host_compile, load_assets, make_icn, text_rep

SPIN_FUEL = 4_000_000

ECHO_TWICE_SRC = """\
@read:
NEXTBIT
STM 0
LDI 2
SUB 0
JZ @emit
LDM 0
OUTBIT 1
LDM 0
OUTBIT 2
JMP @read
@emit:
HALT"""


def build_workloads():
    assets = load_assets()
    asm0 = bootstrap_assembler(assets)
    spin = toyvm.encode(toyvm.ToyProgram.of(("JMP", 0)))
    icn = make_icn(host_compile(ECHO_TWICE_SRC))
    payload = BitSeq.from_text("10" * 400)
    return [
        ("spin", spin, (), SPIN_FUEL),
        ("self-assembly", asm0, (text_rep(assets.asm_prime),), 1 << 26),
        ("interpret", assets.interp_exe, (icn, payload), 1 << 26),
    ]


def time_engine(engine, exe, inputs, fuel, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = toyvm.run(exe, inputs, fuel, engine=engine)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    engines = toyvm.available_engines()
    print(f"engines: {', '.join(engines)} (default: {toyvm.active_engine()})")
    if len(engines) < 2:
        print("compiled core not built; timing the pure engine only")

    for name, exe, inputs, fuel in build_workloads():
        print(f"\n{name}:")
        results = {}
        timings = {}
        for engine in engines:
            timings[engine], results[engine] = time_engine(engine, exe, inputs, fuel, args.repeat)
            line = f"  {engine:>9}: {timings[engine] * 1e3:9.2f} ms"
            if name == "spin":
                line += f"  ({SPIN_FUEL / timings[engine] / 1e6:8.1f} M steps/s)"
            print(line)
        if len(engines) == 2:
            assert results["compiled"] == results["pure"], "engines disagree"
            print(f"  speedup: {timings['pure'] / timings['compiled']:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
