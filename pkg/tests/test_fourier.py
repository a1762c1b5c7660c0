import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpx.errors import ArgumentError, UnsupportedRegimeError
from tpx.fourier import (
    constraint_matrix,
    count_congruence_solutions,
    dft_matrix,
    e_matrix,
    e_matrix_element,
    e_matrix_element_dense,
    i_matrix,
    i_matrix_dense,
    i_matrix_element,
    pair_partitions,
    reduced_constraint_matrix,
    signed_dot,
    vanishing_characterization,
)
from tpx.partitions import SetPartition, enumerate_partitions, is_refinement, perm_partition
from tpx.states import class_size_E

P = SetPartition.parse


def test_signed_dot():
    assert signed_dot((1, 1), (1, 1), 1) == 0
    assert signed_dot((1, 0), (2, 5), 1) == 2
    with pytest.raises(ArgumentError):
        signed_dot((1, 2, 3), (1, 2), 1)


@given(st.integers(1, 3), st.data())
def test_signed_dot_vanishes_on_pair_classes(k, data):
    pi = data.draw(st.permutations(range(k)))
    p = perm_partition(pi)
    free_m = data.draw(st.lists(st.integers(0, 50), min_size=k, max_size=k))
    free_n = data.draw(st.lists(st.integers(0, 50), min_size=k, max_size=k))
    m = [free_m[lab] for lab in p.labels]
    n = [free_n[lab] for lab in p.labels]
    assert signed_dot(m, n, k) == 0


def test_constraint_matrix_examples():
    np.testing.assert_array_equal(constraint_matrix(SetPartition.top(2), 1), [[1, -1]])
    np.testing.assert_array_equal(constraint_matrix(SetPartition.bottom(2), 1), [[1, 0], [0, -1]])
    np.testing.assert_array_equal(
        reduced_constraint_matrix(SetPartition.bottom(2), SetPartition.bottom(2), 1), [[1, 0], [0, -1]]
    )


@settings(max_examples=100)
@given(st.integers(1, 3), st.data())
def test_constraint_matrix_reproduces_dot(k, data):
    idx = enumerate_partitions(2 * k)
    p1 = data.draw(st.sampled_from(list(idx)))
    a = constraint_matrix(p1, k)
    assert set(np.unique(a)) <= {-1, 0, 1}
    mfree = data.draw(st.lists(st.integers(0, 20), min_size=len(p1), max_size=len(p1)))
    n = data.draw(st.lists(st.integers(0, 20), min_size=2 * k, max_size=2 * k))
    m = [mfree[lab] for lab in p1.labels]
    assert int(np.dot(mfree, a @ n)) == signed_dot(m, n, k)
    p2 = data.draw(st.sampled_from(list(idx)))
    assert np.abs(reduced_constraint_matrix(p1, p2, k)).max() <= 2 * k


def test_counting_brute_force_agreement():
    for k in (1, 2):
        idx = enumerate_partitions(2 * k)
        for N in (2, 3, 5, 8):
            for p1 in idx:
                a = constraint_matrix(p1, k)
                for p2 in idx:
                    assert count_congruence_solutions(a, p2, N, "snf") == count_congruence_solutions(a, p2, N, "brute")


def test_count_helper_shape_check():
    with pytest.raises(ArgumentError):
        count_congruence_solutions(np.ones((1, 3)), SetPartition.top(2), 5)


def test_e_element_examples():
    b = SetPartition.bottom(2)
    v = e_matrix_element(b, b, 3, 1)
    assert v.value == pytest.approx(1 / 3) and v.derivation == "counting"
    d = e_matrix_element_dense(b, b, 3, 1)
    assert d.value == pytest.approx(1 / 3, abs=1e-12) and abs(d.imag) < 1e-12
    for k in (1, 2, 3):
        for p in pair_partitions(k):
            assert e_matrix_element(p, p, 7, k).value == 1.0


@pytest.mark.parametrize("N", [5, 8, 16])
@pytest.mark.parametrize("k", [1, 2])
def test_e_element_lemmas(N, k):
    idx = enumerate_partitions(2 * k)
    e = e_matrix(N, k)
    b = idx.block_counts
    assert e.min() >= -1e-12
    np.testing.assert_allclose(e, e.T, atol=1e-12)
    bound = float(N) ** (-np.abs(2 * k - (b[:, None] + b[None, :])) / 2)
    assert (e <= bound + 1e-12).all()
    pairs = set(pair_partitions(k))
    for i, p1 in enumerate(idx):
        for j, p2 in enumerate(idx):
            if b[i] + b[j] == 2 * k and not (p1 == p2 and p1 in pairs):
                assert e[i, j] <= 2 * k / N + 1e-12


@pytest.mark.parametrize("N", [5, 8])
def test_e_element_monotone(N):
    k = 2
    idx = enumerate_partitions(4)
    e = e_matrix(N, k)
    s = np.array([math.sqrt(class_size_E(p, N)) for p in idx])
    scaled = s[:, None] * e * s[None, :]
    for i, p1 in enumerate(idx):
        for i2, q1 in enumerate(idx):
            if not is_refinement(q1, p1):
                continue
            for j, p2 in enumerate(idx):
                for j2, q2 in enumerate(idx):
                    if is_refinement(q2, p2):
                        assert scaled[i, j] <= scaled[i2, j2] * (1 + 1e-12)


@pytest.mark.parametrize("N", [3, 4])
def test_e_elements_counting_vs_dense(N):
    idx = enumerate_partitions(4)
    for p1 in idx:
        for p2 in idx:
            d = e_matrix_element_dense(p1, p2, N, 2)
            assert abs(d.imag) <= 1e-12
            assert d.value == pytest.approx(e_matrix_element(p1, p2, N, 2).value, abs=1e-10)


def test_i_element_examples():
    top, bot = SetPartition.top(2), SetPartition.bottom(2)
    for N in (3, 4, 8, 100):
        assert i_matrix_element(top, top, N, 1) == pytest.approx(1.0, abs=1e-12)
        assert abs(i_matrix_element(bot, bot, N, 1)) < 1e-12
    with pytest.raises(UnsupportedRegimeError):
        i_matrix_element(top, top, 3, 2)


@pytest.mark.parametrize("N,k", [(3, 1), (8, 1), (5, 2), (8, 2)])
def test_i_matrix_vs_dense(N, k):
    dense = i_matrix_dense(N, k)
    assert np.abs(dense.imag).max() < 1e-10
    np.testing.assert_allclose(i_matrix(N, k), dense.real, atol=1e-10)


def test_i_matrix_matches_elementwise():
    idx = enumerate_partitions(4)
    m = i_matrix(6, 2)
    for i in (0, 4, 14):
        for j in (1, 7, 14):
            assert m[i, j] == pytest.approx(i_matrix_element(idx[i], idx[j], 6, 2).real, abs=1e-12)


def test_dft_matrix_unitary():
    f = dft_matrix(6)
    np.testing.assert_allclose(f @ f.conj().T, np.eye(6), atol=1e-12)


def test_vanishing_characterization():
    c1 = vanishing_characterization(1)
    assert c1["equal_reading_matches"] and c1["common_reading_matches"]
    c2 = vanishing_characterization(2)
    assert c2["common_reading_matches"]
    assert not c2["equal_reading_matches"]
    assert ("1,2,3,4", "1,3|2,4") in c2["equal_reading_missing"]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_pair_partition_reduced_matrix_zero(k):
    for p in pair_partitions(k):
        assert not reduced_constraint_matrix(p, p, k).any()
