"""Write the trace of every corpus program and a batch of random ones.

Usage: python trace_suite.py OUTDIR [SEED]

Run twice (e.g. under different PYTHONHASHSEED values) and compare the
directories byte for byte.
"""

import sys
from pathlib import Path

from circir import parse_program
from circir.cli import corpus_files, corpus_path
from circir.runtime import IoScript, parse_script, run_program, serialize_trace
from circir.splitter import emit_ir

from generators import random_surface


def traces(seed: int):
    for name in corpus_files():
        if not name.endswith(".cir"):
            continue
        program = parse_program(corpus_path(name).read_text(), "surface")
        script_path = corpus_path(name[:-4] + ".script")
        script = parse_script(script_path.read_text()) if script_path.is_file() else IoScript()
        yield name, run_program(program, script, seed=seed, max_steps=2000)
    for k in range(40):
        program, script = random_surface(seed * 1000 + k)
        yield f"random_{k}.cir", run_program(program, script, seed=seed)
        yield f"random_{k}.split.cir", run_program(emit_ir(program), script, seed=seed)


def main(argv):
    out = Path(argv[1])
    seed = int(argv[2]) if len(argv) > 2 else 0
    out.mkdir(parents=True, exist_ok=True)
    for name, result in traces(seed):
        (out / (name + ".trace")).write_text(f"status {result.status}\n" + serialize_trace(result.trace),
                                             encoding="utf-8")


if __name__ == "__main__":
    main(sys.argv)
