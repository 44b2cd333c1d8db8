import pytest

from circir import check_program, parse_program
from circir.checker import check_shapes
from circir.cli import corpus_path
from circir.runtime import run_program

from generators import AstGen, random_surface


def msgs(text, mode="strict"):
    return [d.message for d in check_program(parse_program(text, mode), mode)]


def circuit(body, params="a: int[n]", sizes="n, m", proto="MPC(A, B)"):
    return (f"circuit fun f<{sizes}>@{proto}({params}) -> (r: int[n]) {{ {body} return r }}\n"
            "fun main() -> () { return }")


def test_biometric_corpus_is_clean():
    p = parse_program(corpus_path("biometric.cir").read_text())
    assert check_program(p, "strict") == []


def test_local_circuit_ok_commit_circuit_rejected():
    ok = circuit("let r[i < n] = a[i];", proto="Local(A)")
    assert msgs(ok) == []
    bad = circuit("let r[i < n] = a[i];", proto="Commit(A; B)")
    assert any("not a computation protocol" in m for m in msgs(bad))


def test_rank_mismatch():
    m = msgs(circuit("let r[i < n] = a[i, i];"))
    assert any("rank mismatch: expected 1 index" in x for x in m)


def test_shapes_nominal():
    assert msgs(circuit("let r[i < n] = a[i] + b[i];", params="a: int[n], b: int[n]")) == []
    m = msgs(circuit("let r[i < n] = a[i];", params="a: int[m]"))
    assert any(x.startswith("shape mismatch") for x in m)


def test_biometric_reduce_shapes():
    p = parse_program(corpus_path("biometric.cir").read_text())
    assert check_shapes(p.lookup("biometric"), p) == []


def test_protocol_host_counts():
    m = msgs("fun main() -> () { val x@MPC(A) = 1; return }")
    assert any("MPC requires at least 2 hosts" in x for x in m)
    m = msgs("fun main() -> () { val x@Local(A, B) = 1; return }")
    assert any("Local requires exactly 1 host" in x for x in m)


def test_scoping_and_shadowing():
    m = msgs("fun main() -> () { val x@Local(A) = 1; val x@Local(A) = 2; return }")
    assert any("already bound" in x for x in m)
    m = msgs("fun main() -> () { val x@Local(A) = y; return }")
    assert any("unknown variable 'y'" in x for x in m)


def test_call_arity_and_sizes():
    text = ("circuit fun f<n>@Repl(A)(a: int[n]) -> (r: int[n]) { let r[i < n] = a[i]; return r }\n"
            "fun main() -> () { val x@Local(A) = input A int[3]; val y@Local(A) = f(x); return }")
    assert any("size arguments" in x for x in msgs(text))
    text2 = text.replace("f(x)", "f<3>(x, x)")
    assert any("expects 1 arguments" in x for x in msgs(text2))
    assert msgs(text.replace("f(x)", "f<3>(x)")) == []
    assert any("expected int[4]" in x for x in msgs(text.replace("f(x)", "f<4>(x)")))


def test_condition_must_be_bool():
    m = msgs("fun main() -> () { val c@Local(A) = input A int; if c { } else { } return }")
    assert any("condition must be bool" in x for x in m)


def test_returns_must_be_bound():
    m = msgs("fun main() -> () { return }\nfun g() -> (r: int[]) { return q }")
    assert m


def test_entry_rules():
    assert any("entry" in x for x in msgs("fun other() -> () { return }"))
    assert any("value parameters" in x for x in msgs("fun main(a: int[]) -> () { return }"))


def test_circuit_index_must_be_binder_size_or_literal():
    m = msgs(circuit("let r[i < n] = a[k];", params="a: int[n], k: int[]"))
    assert any("must be a binder" in x for x in m)


def test_reduce_typing():
    assert any("reduce" in x for x in msgs(circuit("let r[i < n] = reduce(+, true, j < n, a[j]);")))
    assert any("reduce operator" in x
               for x in msgs(circuit("let r[i < n] = reduce(<, 0, j < n, a[j]);")))


@pytest.mark.parametrize("seed", range(40))
def test_strictness_monotone(seed):
    p = AstGen(seed).program()
    strict = {(d.message, d.span) for d in check_program(p, "strict")}
    surface = {(d.message, d.span) for d in check_program(p, "surface")}
    assert surface <= strict


@pytest.mark.parametrize("seed", range(20))
def test_checker_deterministic(seed):
    p = AstGen(seed).program()
    assert check_program(p, "surface") == check_program(p, "surface")


@pytest.mark.parametrize("seed", range(40))
def test_soundness_no_rank_or_scope_errors_at_runtime(seed):
    p, script = random_surface(5000 + seed)
    assert check_program(p, "surface") == []
    r = run_program(p, script)
    assert r.status == "completed", r.error
