import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circir.errors import DivisionByZero, IndexOutOfBounds, RankMismatch, TypeMismatch
from circir.ir import BinOp, Lit, Lookup, Reduce, IndexBound, Ref, free_vars
from circir.values import INT_MAX, INT_MIN, Value, array_get, eval_binop, format_value, offset

from oracles import all_index_vectors, binop128, nested_get

i64 = st.integers(min_value=INT_MIN, max_value=INT_MAX)
ARITH = ("+", "-", "*", "min", "max", "^")


def test_add_small():
    assert eval_binop("+", Value.scalar(2), Value.scalar(3)) == 5


def test_mul_wraps():
    # expected value frozen from the 128-bit oracle
    assert eval_binop("*", Value.scalar(INT_MAX), Value.scalar(2)) == -2
    assert binop128("*", INT_MAX, 2) == -2


def test_min():
    assert eval_binop("min", Value.scalar(13), Value.scalar(1)) == 1


def test_division_truncates_toward_zero():
    assert eval_binop("/", Value.scalar(-7), Value.scalar(2)) == -3
    assert eval_binop("%", Value.scalar(-7), Value.scalar(2)) == -1
    assert eval_binop("%", Value.scalar(7), Value.scalar(-2)) == 1
    assert eval_binop("/", Value.scalar(INT_MIN), Value.scalar(-1)) == INT_MIN


@pytest.mark.parametrize("op", ["/", "%"])
def test_division_by_zero(op):
    with pytest.raises(DivisionByZero):
        eval_binop(op, Value.scalar(1), Value.scalar(0))


def test_comparisons_yield_bool():
    r = eval_binop("<", Value.scalar(1), Value.scalar(2))
    assert r.elem == "bool" and r == True  # noqa: E712


def test_xor_on_bools_and_ints():
    assert eval_binop("^", Value.scalar(True), Value.scalar(True)) == False  # noqa: E712
    assert eval_binop("^", Value.scalar(6), Value.scalar(3)) == 5


@pytest.mark.parametrize("op,a,b", [("+", 1, True), ("&&", 1, 2), ("<", True, False)])
def test_type_mismatch(op, a, b):
    with pytest.raises(TypeMismatch):
        eval_binop(op, Value.scalar(a), Value.scalar(b))


@settings(max_examples=300)
@given(st.sampled_from(ARITH + ("==", "!=", "<", "<=")), i64, i64)
def test_binop_matches_128_bit_oracle(op, a, b):
    r = eval_binop(op, Value.scalar(a), Value.scalar(b))
    assert r.item() == binop128(op, a, b)
    assert r.shape == ()


@settings(max_examples=300)
@given(st.sampled_from(("/", "%")), i64, i64.filter(lambda x: x != 0))
def test_division_matches_oracle(op, a, b):
    assert eval_binop(op, Value.scalar(a), Value.scalar(b)).item() == binop128(op, a, b)


def test_array_get_examples():
    a = Value.array("int", (2, 2), (1, 2, 3, 4))
    assert array_get(a, [1, 0]) == 3
    assert array_get(Value.array("int", (), (42,)), []) == 42
    with pytest.raises(IndexOutOfBounds):
        array_get(Value.array("int", (3,), (5, 6, 7)), [3])
    with pytest.raises(IndexOutOfBounds):
        array_get(Value.array("int", (3,), (5, 6, 7)), [-1])
    with pytest.raises(RankMismatch):
        array_get(a, [1])


@st.composite
def arrays(draw):
    shape = tuple(draw(st.lists(st.integers(1, 5), max_size=4)))
    n = 1
    for d in shape:
        n *= d
    data = draw(st.lists(st.integers(-1000, 1000), min_size=n, max_size=n))
    return Value.array("int", shape, data)


@settings(max_examples=100)
@given(arrays())
def test_array_get_matches_nested_loop_oracle(a):
    for idx in all_index_vectors(a.shape):
        assert array_get(a, idx) == nested_get(a.data, a.shape, idx)
        assert 0 <= offset(a.shape, idx) < len(a.data)


def test_zero_dim_equals_scalar():
    assert Value.scalar(5) == 5
    assert Value.array("int", (), (5,)) == Value.scalar(5)
    assert Value.scalar(1) != True  # noqa: E712  int and bool are distinct
    assert hash(Value.scalar(7)) == hash(7)


def test_value_invariants():
    with pytest.raises(ValueError):
        Value.array("int", (2,), (1,))
    with pytest.raises(TypeMismatch):
        Value.array("int", (2,), (1, True))
    with pytest.raises(ValueError):
        Value.scalar(INT_MAX + 1)


def test_format_value():
    assert format_value(Value.array("int", (2, 2), (1, 2, 3, 4))) == "int[2,2] [1,2,3,4]"
    assert format_value(Value.scalar(-3)) == "-3"
    assert format_value(Value.scalar(True)) == "true"


def test_free_vars_examples():
    assert free_vars(Lookup("x", (Ref("i"), Ref("j")))) == {"x", "i", "j"}
    red = Reduce("+", Lit(Value.scalar(0)), IndexBound("i", Ref("n")), Lookup("a", (Ref("i"),)))
    assert free_vars(red) == {"n", "a"}
    assert free_vars(Lit(Value.scalar(5))) == set()
    assert free_vars(BinOp("+", Ref("a"), Ref("b"))) == {"a", "b"}
