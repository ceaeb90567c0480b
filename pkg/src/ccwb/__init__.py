"""ccwb: a workbench for code-controlled machine models.

The pieces fit together like this:

* :mod:`ccwb.bits` / :mod:`ccwb.machine` — bit sequences, machine functions,
  machine structures, behavioural equivalence, and the machine-function
  rule checker.
* :mod:`ccwb.toyvm` — a concrete fuel-bounded bytecode VM whose machine
  function satisfies those rules by construction.
* :mod:`ccwb.notation` / :mod:`ccwb.langs` — control code notations
  (projection into executables, injective bit-sequence representation),
  the toy assembly/source/intermediate languages, host reference
  translators, and the frozen self-hosted translators.
* :mod:`ccwb.experiments` — the assembler fixed point, the compiler fixed
  point, and interpreter correctness, run end to end on the toy machine.
* :mod:`ccwb.threads` / :mod:`ccwb.exec_arch` — thread terms with guarded
  recursion applied to services, and the file-store execution architecture
  wrapped as a service family.
* :mod:`ccwb.portability` — certificate-checked installation, expansion,
  pre-installation and portability of control codes.
"""

from .bits import EMPTY, BitSeq
from .machine import (
    DIV,
    MEA,
    Bits,
    Corpus,
    MachineFunction,
    MachineStructure,
    NotExecutableError,
    StructureKind,
    Verdict,
    behaviourally_equivalent,
    check_mf_rules,
    is_asymmetric,
    meaning,
    overrules,
)
from .toyvm import (
    FUEL_EXHAUSTED,
    Halted,
    ToyInstruction,
    ToyProgram,
    as_machine_structure,
    decode,
    encode,
    run,
)

__version__ = "0.1.0"
