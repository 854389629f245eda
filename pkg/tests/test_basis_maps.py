import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topomaps.basis_maps import (
    arbitrary_components, arbitrary_unitary, bijection_kernel, extract_set, garbage_norm, injection_components,
    injection_unitary, input_register, prepare_input, represent_set, surjection_components,
    surjection_decomposition, surjection_unitary,
)
from topomaps.functions import FunctionError
from topomaps.state import AmplitudeVector, apply, unitarity_residual

from conftest import abs_function, functions, make_function, preimage_count, random_injection, random_surjection

R2 = 1 / math.sqrt(2)


def image_state(op, members):
    reg = input_register(op)
    return apply(op, prepare_input(op, represent_set(members, reg)))


# --- bijections --------------------------------------------------------------


def test_identity_kernel():
    assert np.array_equal(bijection_kernel(make_function([0, 1, 2], 3)).dense(), np.eye(3))


def test_cyclic_shift_kernel():
    T = bijection_kernel(make_function([1, 2, 3, 0], 4))
    expected = np.roll(np.eye(4), 1, axis=0)
    assert np.array_equal(T.dense(), expected)
    assert np.array_equal(np.linalg.matrix_power(T.dense(), 4), np.eye(4))


def test_bijection_superposition():
    f = make_function([2, 0, 1], 3)
    T = bijection_kernel(f)
    v = apply(T, AmplitudeVector(T.in_basis, [0.6, 0.8j, 0]))
    assert v.amplitude("y3") == 0.6 and v.amplitude("y1") == 0.8j


def test_bijection_rejects():
    with pytest.raises(FunctionError, match="not injective"):
        bijection_kernel(make_function([0, 0], 2))
    with pytest.raises(FunctionError, match="not bijective"):
        bijection_kernel(make_function([0, 1], 3))


# --- injections --------------------------------------------------------------


def test_injection_example():
    f = make_function([1, 2], 3)
    U = injection_unitary(f)
    assert U.shape == (6, 6)
    assert U.components == {"T": 2, "S": 1, "R": 2, "Q": 1}
    for j, x in enumerate(f.domain):
        v = apply(U, AmplitudeVector.basis_state(U.in_basis, f"{x}⊗y1"))
        assert v.amplitude(f"{f.codomain[f(j)]}⊗x1") == 1


def test_injection_superposition():
    f = make_function([1, 2], 3)
    U = injection_unitary(f)
    v = apply(U, prepare_input(U, AmplitudeVector(input_register(U), [0.6, 0.8])))
    assert v.amplitude("y2⊗x1") == 0.6 and v.amplitude("y3⊗x1") == 0.8


def test_injection_rejects():
    with pytest.raises(FunctionError, match="not injective"):
        injection_unitary(make_function([0, 0], 3))
    with pytest.raises(FunctionError, match="n < m"):
        injection_unitary(make_function([1, 0], 2))


def test_injection_is_permutation_with_expected_component_sizes(rng):
    for _ in range(100):
        m = rng.randint(2, 8)
        f = random_injection(rng, rng.randint(1, m - 1), m)
        U = injection_unitary(f)
        d = U.dense()
        assert set(np.unique(d)) <= {0, 1}
        assert (d.sum(axis=0) == 1).all() and (d.sum(axis=1) == 1).all()
        n = f.n
        assert U.components == {"T": n, "S": f.m_nr, "R": (m - 1) * (n - 1), "Q": n - 1}
        parts = injection_components(f)
        assert np.array_equal(sum(p.dense() for p in parts.values()), d)


# --- surjections -------------------------------------------------------------


def test_abs_decomposition_vectors():
    f = abs_function(3)  # domain -2..2
    dec = surjection_decomposition(f)
    idx = {lab: j for j, lab in enumerate(f.domain)}
    e = lambda lab: np.eye(5)[idx[lab]]  # noqa: E731
    assert np.allclose(dec.nonnull[0], e("0"), atol=0, rtol=0)
    for k in (1, 2):
        assert np.allclose(dec.nonnull[k], (e(str(-k)) + e(str(k))) * R2, atol=1e-15)
        v = dec.null[k - 1]
        assert np.allclose(v, (e(str(-k)) - e(str(k))) * R2, atol=1e-15)
        # sign of the input survives in the garbage
        assert v @ e(str(-k)) > 0 > v @ e(str(k))
    G = np.vstack([dec.nonnull, dec.null])
    assert np.abs(G @ G.T - np.eye(5)).max() < 1e-15


def test_abs_attenuation():
    f = abs_function(3)
    T = surjection_unitary(f)
    v = apply(T, AmplitudeVector.basis_state(T.in_basis, "1"))
    assert abs(v.amplitude("1") - R2) < 1e-15
    assert abs(garbage_norm(v) - R2) < 1e-15
    v0 = apply(T, AmplitudeVector.basis_state(T.in_basis, "0"))
    assert v0.amplitude("0") == 1 and garbage_norm(v0) == 0


def test_constant_surjection():
    f = make_function([0, 0, 0], 1)
    T = surjection_unitary(f)
    for x in f.domain:
        v = apply(T, AmplitudeVector.basis_state(T.in_basis, x))
        assert abs(v.amplitude("y1") - 1 / math.sqrt(3)) < 1e-15


def test_bijective_surjection_is_permutation():
    f = make_function([2, 0, 1], 3)
    dec = surjection_decomposition(f)
    assert dec.null.shape == (0, 3)
    assert np.array_equal(surjection_unitary(f).dense(), bijection_kernel(f).dense())


def test_surjection_rejects_with_missing_elements():
    with pytest.raises(FunctionError, match=r"not surjective.*y3"):
        surjection_unitary(make_function([0, 1], 3))


def test_surjection_law_random(rng):
    for _ in range(50):
        m = rng.randint(1, 8)
        f = random_surjection(rng, rng.randint(m, 8), m)
        T = surjection_unitary(f)
        assert unitarity_residual(T) <= 1e-12
        for j, x in enumerate(f.domain):
            v = apply(T, AmplitudeVector.basis_state(T.in_basis, x))
            nx = preimage_count(f, j)
            assert abs(v.amplitudes[f(j)] - 1 / math.sqrt(nx)) < 1e-12
            assert abs(garbage_norm(v) - math.sqrt((nx - 1) / nx)) < 1e-12
        comps = surjection_components(f)
        assert comps["M"].components["M"] == m and comps["N"].components["N"] == f.n - m


# --- arbitrary functions -----------------------------------------------------


def test_arbitrary_example_counts():
    f = make_function([0, 0, 0], 2)
    U = arbitrary_unitary(f)
    assert U.components == {"M": 1, "N": 2, "S": 1, "R": 6, "Q": 1, "P": 1}
    assert sum(U.components.values()) == 12 == U.shape[0]


def test_arbitrary_empty_value_swap():
    f = make_function([1, 0, 1], 3)
    U = arbitrary_unitary(f)
    v = apply(U, AmplitudeVector.basis_state(U.in_basis, "x0⊗y0"))
    assert v.amplitude("y0⊗x0") == 1


@settings(max_examples=150, deadline=None)
@given(functions())
def test_arbitrary_unitary_laws(f):
    U = arbitrary_unitary(f)
    assert unitarity_residual(U) <= 1e-12
    assert sum(U.components.values()) == (f.m + 1) * (f.n + 1)
    # permutation blocks
    for name, part in arbitrary_components(f).items():
        if name in "SRQP":
            d = part.dense()
            assert set(np.unique(d)) <= {0, 1}
            assert (d.sum(axis=0) <= 1).all() and (d.sum(axis=1) <= 1).all()
    reg = input_register(U)
    for j in range(f.n):
        v = apply(U, prepare_input(U, represent_set({j}, reg)))
        nx = preimage_count(f, j)
        out = v.basis.position_of_ordinal(f(j))
        assert abs(v.amplitudes[out] - 1 / math.sqrt(nx)) < 1e-12
        assert abs(garbage_norm(v) ** 2 + 1 / nx - 1) < 1e-12


def test_arbitrary_superposed_with_empty_value():
    f = make_function([0, 0], 1)
    U = arbitrary_unitary(f)
    s, t = 0.6, 0.8
    amps = np.zeros(len(input_register(U)), complex)
    amps[0], amps[1] = t, s  # x0, x1
    v = apply(U, prepare_input(U, AmplitudeVector(input_register(U), amps)))
    assert abs(v.amplitude("y1⊗x0") - s * R2) < 1e-15
    assert abs(v.amplitude("y0⊗x0") - t) < 1e-15


def test_bijective_arbitrary_amplitude_is_one():
    f = make_function([1, 2, 0], 3)
    U = arbitrary_unitary(f)
    for j in range(3):
        v = image_state(U, {j})
        assert v.amplitudes[v.basis.position_of_ordinal(f(j))] == 1


@pytest.mark.parametrize("mapping,m", [([0], 1), ([0, 0, 0], 1), ([2], 3)])
def test_degenerate_shapes(mapping, m):
    f = make_function(mapping, m)
    assert unitarity_residual(arbitrary_unitary(f)) <= 1e-12


# --- set semantics ------------------------------------------------------------


def test_represent_set():
    f = make_function([0, 1], 2)
    B = bijection_kernel(f).in_basis
    assert represent_set({0}, B).amplitudes.tolist() == [1, 0]
    assert np.allclose(represent_set({0, 1}, B).amplitudes, [R2, R2], atol=0)
    empty = represent_set(set(), B)
    assert empty.norm() == 0 and extract_set(empty) == set()


def test_abs_set_image():
    f = abs_function(3)
    T = surjection_unitary(f)
    v = image_state(T, {1, 3})  # {-1, 1}
    assert extract_set(v) == {1}
    assert abs(v.amplitudes[1] - 1) < 1e-15


def all_functions(n, m):
    for mapping in itertools.product(range(m), repeat=n):
        yield make_function(list(mapping), m)


EXHAUSTIVE_SHAPES = [(n, m) for n in range(1, 5) for m in range(1, 5)] + [(5, m) for m in range(1, 4)]


def test_set_image_exhaustive_small():
    checked = 0
    for n, m in EXHAUSTIVE_SHAPES:
        for f in all_functions(n, m):
            U = arbitrary_unitary(f)
            for r in range(n + 1):
                for S in itertools.combinations(range(n), r):
                    v = image_state(U, S)
                    assert extract_set(v) == f.image_of(S)
                    off = [v.basis.position_of_ordinal(i) for i in range(m) if i not in f.image_of(S)]
                    assert np.abs(v.amplitudes[off]).max(initial=0) <= 1e-12
            checked += 1
    assert checked >= 729


@settings(max_examples=100, deadline=None)
@given(functions(), st.data())
def test_set_image_random(f, data):
    S = data.draw(st.sets(st.integers(0, f.n - 1)))
    assert extract_set(image_state(arbitrary_unitary(f), S)) == f.image_of(S)


def test_extract_set_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        extract_set(represent_set({0}, input_register(bijection_kernel(make_function([0], 1)))), eps=0)


def test_bare_graph_kernel_is_not_unitary():
    # sum |f(x)><x| for a many-to-one f, padded square with a zero row
    from topomaps.state import BasisMapOperator

    f = make_function([0, 0], 1)
    T = surjection_unitary(f)
    K = BasisMapOperator(T.in_basis, T.out_basis, np.array([[1.0, 1.0], [0.0, 0.0]]))
    assert unitarity_residual(K) >= 1
