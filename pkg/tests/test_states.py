import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tpx.errors import DegenerateClassError, SizeLimitError, UnsupportedRegimeError
from tpx.partitions import SetPartition, enumerate_partitions, is_refinement, join
from tpx.states import (
    StateVector,
    TupleSpace,
    build_state_E,
    build_state_I,
    class_mask_I,
    class_size_E,
    class_size_I,
    e_gram,
    e_in_i_coeffs,
    equality_pattern,
    i_in_e_coeffs,
)

P = SetPartition.parse


def test_space_guards():
    with pytest.raises(SizeLimitError):
        TupleSpace(1, 2)
    with pytest.raises(SizeLimitError):
        TupleSpace(2**13, 4)
    with pytest.raises(SizeLimitError):
        TupleSpace(2**12, 4).check_dense()


@given(st.integers(2, 9), st.integers(1, 4), st.data())
def test_encode_decode_round_trip(N, c, data):
    space = TupleSpace(N, c)
    i = data.draw(st.integers(0, space.dim - 1))
    t = space.decode(i)
    assert space.encode(t) == i
    np.testing.assert_array_equal(space.digits[i], t)


def test_big_endian_layout():
    space = TupleSpace(3, 2)
    assert space.encode((1, 2)) == 5
    assert space.decode(7) == (2, 1)


def test_class_sizes():
    assert class_size_I(P("1,2|3"), 5) == 20
    assert class_size_I(SetPartition.top(4), 7) == 7
    assert class_size_I(SetPartition.bottom(4), 3) == 0
    assert class_size_E(P("1,2|3"), 5) == 25
    assert class_size_E(SetPartition.top(3), 6) == 6


@pytest.mark.parametrize("N", [2, 3, 5, 8])
@pytest.mark.parametrize("n", [2, 4])
def test_classes_tile_the_space(N, n):
    space = TupleSpace(N, n)
    total = 0
    for p in enumerate_partitions(n):
        m = class_mask_I(p, space)
        assert m.sum() == class_size_I(p, N)
        total += m.sum()
    assert total == N**n


@pytest.mark.parametrize("N", range(6, 13))
def test_stirling_relation(N):
    idx = enumerate_partitions(4)
    for p in idx:
        assert sum(class_size_I(q, N) for q in idx if is_refinement(p, q)) == class_size_E(p, N)


def test_equality_pattern():
    assert equality_pattern((3, 3, 5, 7)) == P("1,2|3|4")
    assert equality_pattern((4, 4, 4)) == SetPartition.top(3)
    assert equality_pattern((0, 1, 2)) == SetPartition.bottom(3)


def test_equality_pattern_agrees_with_masks():
    space = TupleSpace(3, 4)
    for t in product(range(3), repeat=4):
        assert class_mask_I(equality_pattern(t), space)[space.encode(t)]


def test_top_state_n2():
    v = build_state_I(SetPartition.top(2), TupleSpace(2, 2)).amplitudes
    np.testing.assert_allclose(v, np.array([1, 0, 0, 1]) / math.sqrt(2))


def test_degenerate_class():
    with pytest.raises(DegenerateClassError):
        build_state_I(SetPartition.bottom(4), TupleSpace(3, 4))


@pytest.mark.parametrize("N", [4, 5])
def test_i_states_orthonormal(N):
    space = TupleSpace(N, 4)
    idx = enumerate_partitions(4)
    basis = np.stack([build_state_I(p, space).amplitudes for p in idx if len(p) <= N], axis=1)
    np.testing.assert_allclose(basis.conj().T @ basis, np.eye(basis.shape[1]), atol=1e-12)


def test_e_state_from_i_states():
    N = 4
    space = TupleSpace(N, 4)
    for p in enumerate_partitions(4):
        lhs = math.sqrt(class_size_E(p, N)) * build_state_E(p, space).amplitudes
        rhs = sum(
            math.sqrt(class_size_I(q, N)) * build_state_I(q, space).amplitudes
            for q in enumerate_partitions(4)
            if is_refinement(p, q) and class_size_I(q, N)
        )
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_i_in_e_examples():
    top = i_in_e_coeffs(SetPartition.top(3), 5)
    assert list(top) == [SetPartition.top(3)] and top[SetPartition.top(3)].value == 1.0
    c = i_in_e_coeffs(SetPartition.bottom(2), 3)
    assert c[SetPartition.bottom(2)].value == pytest.approx(math.sqrt(9 / 6))
    assert c[SetPartition.top(2)].value == pytest.approx(-math.sqrt(3 / 6))
    assert c[SetPartition.top(2)].mu == -1
    with pytest.raises(UnsupportedRegimeError):
        i_in_e_coeffs(SetPartition.bottom(4), 3)


def test_i_reconstructed_from_e_states():
    N = 5
    space = TupleSpace(N, 4)
    for p in enumerate_partitions(4):
        rec = sum(c.value * build_state_E(q, space).amplitudes for q, c in i_in_e_coeffs(p, N).items())
        np.testing.assert_allclose(rec, build_state_I(p, space).amplitudes, atol=1e-12)


def test_e_in_i_coefficients():
    N = 5
    space = TupleSpace(N, 4)
    for p in enumerate_partitions(4):
        rec = sum(v * build_state_I(q, space).amplitudes for q, v in e_in_i_coeffs(p, N).items())
        np.testing.assert_allclose(rec, build_state_E(p, space).amplitudes, atol=1e-12)


def test_e_gram_matches_dense():
    N = 4
    space = TupleSpace(N, 4)
    idx = enumerate_partitions(4)
    for a in idx[::3]:
        for b in idx:
            dense = build_state_E(a, space).inner(build_state_E(b, space))
            assert dense.real == pytest.approx(e_gram(a, b, N), abs=1e-12)
            assert e_gram(a, b, N) == pytest.approx(float(N) ** (len(join(a, b)) - (len(a) + len(b)) / 2))


def test_state_csv():
    v = StateVector(TupleSpace(2, 1), np.array([1.0 + 0j, 0.0]))
    assert v.to_csv() == "index,re,im\n0,1.0,0.0\n"
    assert v.norm() == 1.0
