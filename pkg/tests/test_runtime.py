import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circir import parse_program
from circir.cli import corpus_path
from circir.errors import (
    CommitmentMismatch, DepthExceeded, DivisionByZero, EquivocationError, InternalError,
    NoTransferRule, ScriptExhausted, ShapeMismatch, TypeMismatch,
)
from circir.ir import IndexBound, Lit, Lookup, Reduce, Ref
from circir.runtime import IoScript, World, io_events, parse_script, run_program, serialize_trace
from circir.runtime.backends import (
    BACKENDS, CircuitSession, MPCBackend, eval_circuit_call, register_backend,
)
from circir.runtime.evaluator import eval_scalar
from circir.runtime.formats import (
    AdditiveShares, Committed, LocalCleartext, Replicated, StoredValue, reconstruct,
    reconstruct_scalar, share, store,
)
from circir.runtime.script import ScriptError, format_script
from circir.runtime.trace import CircuitEvalEvent, EquivocationCheckEvent, ExportEvent, ImportEvent
from circir.runtime.transfer import equivocation_check, transfer
from circir.values import INT_MAX, INT_MIN, Value

from oracles import closest_distance, left_fold, to_signed

S, C = "Server", "Client"
SUM = ("circuit fun sum<n>@MPC(Server, Client)(a: int[n]) -> (r: int[]) "
       "{ let r[] = reduce(+, 0, i < n, a[i]); return r }\nfun main() -> () { return }")


def load(name):
    return parse_program(corpus_path(name).read_text())


def world(seed=0, script=None):
    return World((S, C), script, seed=seed)


def vec(*xs):
    return Value.array("int", (len(xs),), xs)


# -- interpreter --------------------------------------------------------------


def test_echo_trace():
    r = run_program(load("echo.cir"), IoScript().add("Client", 7))
    assert r.status == "completed"
    assert io_events(r.trace) == [("input", "Client", 7), ("output", "Client", 7)]
    assert len(r.trace) == 2


def test_biometric_small_instance():
    script = IoScript().add(S, 2, 2, Value.array("int", (2, 2), (1, 2, 3, 4)))
    script.add(C, vec(1, 1), False)
    r = run_program(load("biometric.cir"), script)
    assert r.status == "completed"
    # frozen from the brute-force oracle: distances 1 and 13
    assert closest_distance([[1, 2], [3, 4]], [1, 1]) == 1
    assert r.outputs[C][-1] == 1


def test_recursion_without_base_case_hits_depth_limit():
    p = parse_program("fun f() -> (r: int[]) { val r@Local(A) = f(); return r }\n"
                      "fun main() -> () { val x@Local(A) = f(); return }")
    r = run_program(p, max_depth=40)
    assert r.status == "error" and isinstance(r.error, DepthExceeded)


def test_tail_recursive_loop_runs_until_step_limit():
    r = run_program(load("loop.cir"), max_steps=5000, max_depth=10)
    assert r.status == "step_limit"
    assert len(r.outputs["Client"]) > 1000


def test_script_exhausted_names_host():
    r = run_program(load("echo.cir"), IoScript())
    assert isinstance(r.error, ScriptExhausted) and r.error.host == "Client"


def test_input_type_mismatch():
    r = run_program(load("echo.cir"), IoScript().add("Client", True))
    assert isinstance(r.error, TypeMismatch)


def test_runtime_division_by_zero():
    p = parse_program("circuit fun d@Local(A)(x: int[]) -> (y: int[]) { let y[] = 1 / x; return y }\n"
                      "fun main() -> () { val x@Local(A) = input A int; val y@Local(A) = d(x); return }")
    r = run_program(p, IoScript().add("A", 0))
    assert r.status == "error" and isinstance(r.error, DivisionByZero)


def test_if_branches():
    p = parse_program("fun main() -> () { val c@Local(A) = input A bool; "
                      "if c { val _@Local(A) = output A 1; } else { val _@Local(A) = output A 2; } return }")
    assert run_program(p, IoScript().add("A", True)).outputs == {"A": [Value.scalar(1)]}
    assert run_program(p, IoScript().add("A", False)).outputs == {"A": [Value.scalar(2)]}


def test_commit_reveal_corpus():
    r = run_program(load("commit_reveal.cir"), parse_script(corpus_path("commit_reveal.script").read_text()))
    assert r.status == "completed"
    assert r.outputs == {"Alice": [Value.scalar(120)], "Bob": [Value.scalar(120)]}
    commits = [e for e in r.trace if isinstance(e, ExportEvent) and e.target.startswith("Commit")]
    assert len(commits) == 2 and all(len(e.digest) == 64 for e in commits)


def test_equivocation_corpus_fails_naming_both_hosts():
    r = run_program(load("equivocation_failure.cir"),
                    parse_script(corpus_path("equivocation_failure.script").read_text()))
    assert isinstance(r.error, EquivocationError)
    assert set(r.error.hosts) == {S, C}


# -- circuit calls -----------------------------------------------------------------


def test_sum_circuit_on_mpc():
    fn = parse_program(SUM).lookup("sum")
    w = world()
    arg = store(vec(1, 2, 3), LocalCleartext(S), w.rng)
    (out,) = eval_circuit_call(fn, {"n": 3}, [arg], [LocalCleartext(C)], w)
    assert out.fmt == LocalCleartext(C) and out.payloads[C] == left_fold("+", 0, [1, 2, 3]) == 6
    kinds = [type(e) for e in w.trace]
    assert kinds.count(ImportEvent) == 1
    assert kinds.count(CircuitEvalEvent) == 1
    assert kinds.count(ExportEvent) == 1


def test_sum_circuit_empty_range():
    fn = parse_program(SUM).lookup("sum")
    w = world()
    arg = store(Value.array("int", (0,), ()), LocalCleartext(S), w.rng)
    (out,) = eval_circuit_call(fn, {"n": 0}, [arg], [LocalCleartext(C)], w)
    assert out.payloads[C] == 0


def test_circuit_call_shape_checked():
    fn = parse_program(SUM).lookup("sum")
    w = world()
    arg = store(vec(1, 2), LocalCleartext(S), w.rng)
    with pytest.raises(ShapeMismatch):
        eval_circuit_call(fn, {"n": 3}, [arg], [LocalCleartext(C)], w)


def _biometric_with(proto: str):
    text = corpus_path("biometric.cir").read_text().replace("@MPC(Server, Client)(db", f"@{proto}(db")
    return parse_program(text).lookup("biometric")


@pytest.mark.parametrize("seed", range(10))
def test_biometric_mpc_equals_replicated_backend(seed):
    rng = random.Random(seed)
    n, d = rng.randint(1, 5), rng.randint(1, 4)
    db = Value.array("int", (n, d), [rng.randint(-100, 100) for _ in range(n * d)])
    sample = Value.array("int", (d,), [rng.randint(-100, 100) for _ in range(d)])
    results = []
    for proto in ("MPC(Server, Client)", "Repl(Server, Client)"):
        w = world(seed)
        args = [store(db, LocalCleartext(S), w.rng), store(sample, LocalCleartext(C), w.rng)]
        (out,) = eval_circuit_call(_biometric_with(proto), {"n": n, "d": d}, args, [LocalCleartext(C)], w)
        results.append(reconstruct(out))
    assert results[0] == results[1]


def test_session_lifecycle_enforced():
    fn = parse_program(SUM).lookup("sum")
    w = world()
    session = BACKENDS["MPC"].build(fn, {"n": 1}, w)
    assert isinstance(session, CircuitSession)
    with pytest.raises(InternalError):
        session.export(0, LocalCleartext(C), "r")
    session.import_("a", store(vec(4), LocalCleartext(S), w.rng), "a")
    session.evaluate()
    with pytest.raises(InternalError):
        session.evaluate()
    session.destroy()
    with pytest.raises(InternalError):
        session.export(0, LocalCleartext(C), "r")


def test_backends_registered_once():
    with pytest.raises(Exception):
        register_backend(MPCBackend())


@settings(max_examples=200)
@given(st.sampled_from(("+", "min", "max", "*", "^")),
       st.integers(-1000, 1000),
       st.lists(st.integers(INT_MIN, INT_MAX), max_size=8))
def test_reduce_is_left_fold(op, init, xs):
    e = Reduce(op, Lit(Value.scalar(init)), IndexBound("i", Ref("n")), Lookup("a", (Ref("i"),)))
    env = {"n": len(xs), "a": Value.array("int", (len(xs),), xs)}
    assert eval_scalar(e, env) == left_fold(op, init, xs)


# -- sharing -------------------------------------------------------------------


BOUNDARY = [0, 1, -1, 2, -2, INT_MAX, INT_MIN, INT_MAX - 1, INT_MIN + 1]


@pytest.mark.parametrize("v", BOUNDARY)
def test_share_roundtrip_boundary(v):
    sh = share(v, (S, C), random.Random(v & 0xFFFF))
    assert reconstruct_scalar(sh.values()) == v
    assert to_signed(sum(sh.values())) == v


def test_share_roundtrip_random():
    rng = random.Random(1)
    for _ in range(1000):
        v = rng.randint(INT_MIN, INT_MAX)
        sh = share(v, ("A", "B", "C"), rng)
        assert reconstruct_scalar(sh.values()) == v


def test_share_depends_on_seed_not_value():
    a = share(0, (S, C), random.Random(1))
    b = share(0, (S, C), random.Random(2))
    assert a != b
    assert reconstruct_scalar(a.values()) == reconstruct_scalar(b.values()) == 0


def test_share_needs_two_hosts():
    with pytest.raises(ValueError):
        share(5, (S,), random.Random(0))


def test_share_privacy_shape():
    # k-1 of k shares of a fixed secret should look random across seeds
    seen = {tuple(share(42, ("A", "B", "C"), random.Random(seed))[h] for h in ("B", "C")) for seed in range(200)}
    assert len(seen) >= 100
    firsts = {share(42, (S, C), random.Random(seed))[S] for seed in range(200)}
    assert len(firsts) >= 100


def test_array_sharing_roundtrip():
    w = world()
    v = Value.array("bool", (2, 2), (True, False, False, True))
    sv = store(v, AdditiveShares((S, C)), w.rng)
    assert reconstruct(sv) == v


# -- equivocation and transfers ---------------------------------------------------


def test_equivocation_ok():
    w = world()
    sv = StoredValue(Replicated((S, C)), {S: Value.scalar(5), C: Value.scalar(5)}, "int", ())
    equivocation_check(sv, w, "x")
    assert isinstance(w.trace[-1], EquivocationCheckEvent) and w.trace[-1].ok


def test_equivocation_detects_disagreement():
    w = world()
    sv = StoredValue(Replicated((S, C)), {S: Value.scalar(5), C: Value.scalar(6)}, "int", ())
    with pytest.raises(EquivocationError) as e:
        equivocation_check(sv, w, "x")
    assert set(e.value.hosts) == {S, C}
    assert "Server" in str(e.value) and "Client" in str(e.value)
    assert not w.trace[-1].ok


def test_equivocation_single_host_trivial():
    w = world()
    equivocation_check(StoredValue(Replicated((S,)), {S: Value.scalar(1)}, "int", ()), w, "x")


def test_local_to_replicated_broadcast():
    w = world()
    out = transfer(store(Value.scalar(9), LocalCleartext(S), w.rng), Replicated((S, C)), w, "x")
    assert out.payloads == {S: 9, C: 9}
    checks = [e for e in w.trace if isinstance(e, EquivocationCheckEvent)]
    assert len(checks) == 1 and checks[0].ok


def test_shares_to_local():
    w = world()
    sv = store(Value.scalar(13), AdditiveShares((S, C)), w.rng)
    s1, s2 = sv.payloads[S], sv.payloads[C]
    out = transfer(sv, LocalCleartext(C), w, "x")
    assert out.payloads[C] == 13 == to_signed(s1[0] + s2[0])


def test_commitment_open_and_tamper():
    w = world()
    sv = transfer(store(Value.scalar(4), LocalCleartext(S), w.rng), Committed(S, (C,)), w, "c")
    opened = transfer(sv, Replicated((S, C)), w, "o")
    assert opened.payloads == {S: 4, C: 4}
    w.corrupt("o2", S, 5)
    with pytest.raises(CommitmentMismatch):
        transfer(sv, Replicated((S, C)), w, "o2")


@pytest.mark.parametrize("src,dst", [
    (AdditiveShares((S, C)), Committed(S, (C,))),
    (AdditiveShares((S, C)), AdditiveShares((C, "Third"))),
    (LocalCleartext(C), Committed(S, (C,))),
])
def test_unsupported_transfers(src, dst):
    w = World((S, C, "Third"))
    sv = store(Value.scalar(1), src, w.rng)
    with pytest.raises(NoTransferRule):
        transfer(sv, dst, w, "x")


def test_commitment_only_opens_to_replicated():
    w = world()
    sv = transfer(store(Value.scalar(4), LocalCleartext(S), w.rng), Committed(S, (C,)), w, "c")
    with pytest.raises(NoTransferRule):
        transfer(sv, LocalCleartext(C), w, "x")


# -- determinism and scripts --------------------------------------------------------


def test_same_seed_same_trace_different_seed_same_io():
    script = parse_script(corpus_path("biometric.script").read_text())
    p = load("biometric.cir")
    a = serialize_trace(run_program(p, script, seed=3).trace)
    b = serialize_trace(run_program(p, script, seed=3).trace)
    assert a == b
    c = run_program(p, script, seed=4)
    assert io_events(c.trace) == io_events(run_program(p, script, seed=3).trace)


def test_script_format_roundtrip():
    text = "host Server: 2 -3 int[2,2] [1,2,3,4] true\nhost Client: int[0] []\ncorrupt y Client: 6\n"
    s = parse_script(text)
    assert s.inputs["Server"][2] == Value.array("int", (2, 2), (1, 2, 3, 4))
    assert s.inputs["Client"][0].shape == (0,)
    assert parse_script(format_script(s)) == s


@pytest.mark.parametrize("bad", ["host Server 1", "hose S: 1", "host S: int[2] [1]", "corrupt x S: 1 2"])
def test_script_errors(bad):
    with pytest.raises(ScriptError):
        parse_script(bad)


def test_purity_instrumentation_flags_io_inside_circuit():
    from circir.runtime.trace import InputEvent

    w = World((S, C), IoScript().add(S, 1))
    w.emit(InputEvent, host=S, var="x", value=Value.scalar(1))
    assert w.purity_violations == []
    w.circuit_depth = 1
    w.emit(InputEvent, host=S, var="x", value=Value.scalar(1))
    w.read_input(S)
    assert len(w.purity_violations) == 2
