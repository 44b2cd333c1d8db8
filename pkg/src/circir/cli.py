"""Command-line interface: ``circir check|run|split|fmt|corpus``.

Exit codes: 0 success, 1 diagnostics or runtime error, 2 missing file.
Defaults for most flags can be set through ``CIRCIR_*`` environment
variables (``CIRCIR_SEED``, ``CIRCIR_MAX_STEPS``, ``CIRCIR_MAX_DEPTH``,
``CIRCIR_SCRIPT``, ``CIRCIR_TRACE_OUT``, ``CIRCIR_MODE``).
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources
from pathlib import Path

from .checker import check_program
from .diagnostics import ParseError
from .errors import CircirError, ScriptExhausted
from .parser import parse_program
from .printer import pretty_print
from .runtime import IoScript, parse_script, run_program, serialize_trace
from .runtime.interpreter import DEFAULT_MAX_DEPTH, DEFAULT_MAX_STEPS
from .runtime.script import parse_values
from .runtime.world import World
from .values import format_value


class _Missing(Exception):
    pass


def _env(name: str, default):
    raw = os.environ.get(f"CIRCIR_{name}")
    if raw is None:
        return default
    return type(default)(raw) if default is not None else raw


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {n}")
    return n


def _read_bytes(path: str) -> bytes:
    p = Path(path)
    if not p.is_file():
        raise _Missing(path)
    return p.read_bytes()


def _read(path: str) -> str:
    return _read_bytes(path).decode("utf-8")


def _mode(args) -> str:
    return args.mode or _env("MODE", args.default_mode)


def _load(path: str, mode: str, err):
    """Parse and check; print diagnostics. Returns the program or None."""
    try:
        program = parse_program(_read_bytes(path), mode)
    except ParseError as e:
        for d in e.diagnostics:
            print(d.format(path), file=err)
        return None
    diags = check_program(program, mode)
    for d in diags:
        print(d.format(path), file=err)
    if any(d.is_error for d in diags):
        return None
    return program


def cmd_check(args, out, err) -> int:
    return 0 if _load(args.path, _mode(args), err) is not None else 1


def _stdin_reader(host: str):
    sys.stderr.write(f"{host}> ")
    sys.stderr.flush()
    line = sys.stdin.readline()
    if not line.strip():
        raise ScriptExhausted(host)
    return parse_values(line)[0]


def cmd_run(args, out, err) -> int:
    program = _load(args.path, _mode(args), err)
    if program is None:
        return 1
    script_path = args.script or _env("SCRIPT", None)
    script = parse_script(_read(script_path)) if script_path else IoScript()
    world = None
    if args.stdin:
        world = World(program.universe(), script, seed=args.seed, stdin=_stdin_reader)
    result = run_program(program, script, seed=args.seed, max_steps=args.max_steps,
                         max_depth=args.max_depth, world=world)
    for host, values in result.outputs.items():
        for v in values:
            print(f"{host}: {format_value(v)}", file=out)
    trace_out = args.trace_out or _env("TRACE_OUT", None)
    if trace_out:
        Path(trace_out).write_text(serialize_trace(result.trace), encoding="utf-8")
    if result.status == "step_limit":
        print(f"notice: step limit of {args.max_steps} reached", file=err)
    elif result.status == "error":
        print(f"error: {type(result.error).__name__}: {result.error}", file=err)
        return 1
    return 0


def cmd_split(args, out, err) -> int:
    from .splitter import split

    program = _load(args.path, "surface", err)
    if program is None:
        return 1
    strict, metrics = split(program)
    text = pretty_print(strict)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        out.write(metrics.report())
    else:
        out.write(text)
        err.write(metrics.report())
    return 0


def cmd_fmt(args, out, err) -> int:
    try:
        program = parse_program(_read_bytes(args.path), _mode(args))
    except ParseError as e:
        for d in e.diagnostics:
            print(d.format(args.path), file=err)
        return 1
    out.write(pretty_print(program))
    return 0


def corpus_files() -> list[str]:
    root = resources.files("circir") / "corpus"
    return sorted(p.name for p in root.iterdir() if p.name.endswith((".cir", ".script")))


def corpus_path(name: str) -> Path:
    return Path(str(resources.files("circir") / "corpus" / name))


def cmd_corpus(args, out, err) -> int:
    if not args.name:
        for name in corpus_files():
            print(corpus_path(name), file=out)
        return 0
    name = args.name
    path = corpus_path(name if "." in name else name + ".cir")
    if not path.is_file():
        raise _Missing(name)
    out.write(path.read_text(encoding="utf-8"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="circir", description="Array IR toolchain and simulated runtime.")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_mode(p, default):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--strict", dest="mode", action="store_const", const="strict",
                       help="no computation outside circuit functions")
        g.add_argument("--surface", dest="mode", action="store_const", const="surface",
                       help="allow inline protocol-annotated computation")
        p.set_defaults(default_mode=default)

    p = sub.add_parser("check", help="parse and check a program")
    p.add_argument("path")
    with_mode(p, "strict")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("run", help="run a program against an input script")
    p.add_argument("path")
    with_mode(p, "strict")
    p.add_argument("--script", help="input script (host queues)")
    p.add_argument("--seed", type=int, default=_env("SEED", 0))
    p.add_argument("--max-steps", type=_positive, default=_env("MAX_STEPS", DEFAULT_MAX_STEPS))
    p.add_argument("--max-depth", type=_positive, default=_env("MAX_DEPTH", DEFAULT_MAX_DEPTH))
    p.add_argument("--trace-out", help="write the serialized trace here")
    p.add_argument("--stdin", action="store_true",
                   help="read further inputs interactively once the script runs out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("split", help="split a surface program into strict IR")
    p.add_argument("path")
    p.add_argument("-o", "--output", help="write the strict program here")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("fmt", help="print a program in canonical form")
    p.add_argument("path")
    with_mode(p, "surface")
    p.set_defaults(func=cmd_fmt)

    p = sub.add_parser("corpus", help="list the bundled examples, or print one")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out, err)
    except _Missing as e:
        print(f"error: no such file: {e}", file=err)
        return 2
    except CircirError as e:
        print(f"error: {e}", file=err)
        return 1


if __name__ == "__main__":
    sys.exit(main())
