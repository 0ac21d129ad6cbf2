"""Core state/operator utilities."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rtl.qcore import (
    LN2,
    CompositeSpace,
    Observable,
    SpaceMismatchError,
    State,
    basis_ket,
    binary_entropy,
    bits_to_nats,
    expectation,
    fidelity,
    is_orthogonal,
    nats_to_bits,
    partial_trace,
    permute_factors,
    projector,
    psd_sqrt,
    ptrace_raw,
    purified_distance,
    rel_entropy,
    spread,
    tensor,
    trace_norm,
    variance,
    vn_entropy,
)


def rand_density(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real


def test_state_validation():
    State(np.eye(2) / 2)
    with pytest.raises(ValueError):
        State(np.eye(2))  # trace 2
    with pytest.raises(ValueError):
        State(np.array([[0.5, 0.1j], [0.1j, 0.5]]))  # not hermitian
    with pytest.raises(ValueError):
        State(np.diag([1.5, -0.5]))  # negative eigenvalue
    with pytest.raises(SpaceMismatchError):
        State(np.eye(2) / 2, CompositeSpace((3,)))


def test_composite_space():
    sp = CompositeSpace((2, 3))
    assert sp.total_dim == 6
    assert (sp * CompositeSpace((2,))).dims == (2, 3, 2)


def test_tensor_and_partial_trace_roundtrip():
    rng = np.random.default_rng(3)
    a = rand_density(rng, 2)
    b = rand_density(rng, 3)
    ab = State(tensor(a, b), CompositeSpace((2, 3)))
    ra = partial_trace(ab, [0])
    rb = partial_trace(ab, [1])
    assert np.allclose(ra.matrix, a)
    assert np.allclose(rb.matrix, b)


def test_ptrace_raw_entangled():
    # Bell state reduces to maximally mixed
    v = (np.kron([1, 0], [1, 0]) + np.kron([0, 1], [0, 1])) / math.sqrt(2)
    m = np.outer(v, v.conj())
    red = ptrace_raw(m, (2, 2), [0])
    assert np.allclose(red, np.eye(2) / 2)


def test_permute_factors():
    rng = np.random.default_rng(5)
    a, b = rand_density(rng, 2), rand_density(rng, 3)
    m = tensor(a, b)
    assert np.allclose(permute_factors(m, (2, 3), (1, 0)), tensor(b, a))


def test_fidelity_known_values():
    plus = State.from_vector([1, 1])
    zero = State.from_vector([1, 0])
    one = State.from_vector([0, 1])
    assert fidelity(zero, one) < 1e-7
    assert abs(fidelity(plus, zero) - 1 / math.sqrt(2)) < 1e-12
    assert abs(fidelity(zero, zero) - 1.0) < 1e-12
    mixed = State(np.eye(2) / 2)
    assert abs(fidelity(zero, mixed) - 1 / math.sqrt(2)) < 1e-12


def test_purified_distance():
    zero = State.from_vector([1, 0])
    plus = State.from_vector([1, 1])
    assert abs(purified_distance(zero, plus) - 1 / math.sqrt(2)) < 1e-12
    assert purified_distance(zero, zero) < 1e-7


def test_is_orthogonal_robust_for_pure_pairs():
    # fidelity picks up sqrt(eps) noise on rank-deficient states; the
    # overlap test must stay exact
    rng = np.random.default_rng(11)
    for _ in range(50):
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        q, _ = np.linalg.qr(g)
        r1 = State.from_vector(q[:, 0])
        r2 = State.from_vector(q[:, 1])
        assert is_orthogonal(r1, r2)
        assert not is_orthogonal(r1, r1)


def test_trace_norm():
    assert abs(trace_norm(np.diag([1.0, -2.0])) - 3.0) < 1e-12
    assert abs(trace_norm(np.diag([0.7, -0.3]) + 0j) - 1.0) < 1e-12


def test_psd_sqrt_squares_back():
    rng = np.random.default_rng(7)
    m = rand_density(rng, 4)
    r = psd_sqrt(m)
    assert np.allclose(r @ r, m, atol=1e-12)
    # rank-deficient input: junk modes must not leak into the root
    v = np.zeros(4)
    v[0] = 1.0
    pure = np.outer(v, v)
    assert np.allclose(psd_sqrt(pure), pure, atol=1e-14)


def test_entropies():
    mixed = State(np.eye(2) / 2)
    assert abs(vn_entropy(mixed) - LN2) < 1e-12
    assert vn_entropy(State.from_vector([1, 0])) < 1e-10
    assert abs(binary_entropy(0.5) - LN2) < 1e-12
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0


def test_rel_entropy():
    mixed = State(np.eye(2) / 2)
    zero = State.from_vector([1, 0])
    assert abs(rel_entropy(zero, mixed) - LN2) < 1e-10
    assert rel_entropy(mixed, mixed) < 1e-12
    assert math.isinf(rel_entropy(mixed, zero))


def test_observable_helpers():
    h = Observable(np.diag([0.0, 1.0, 3.0]))
    assert abs(spread(h) - 3.0) < 1e-12
    plus = State.from_vector([1, 1])
    sz = Observable(np.diag([0.5, -0.5]))
    assert abs(expectation(plus, sz)) < 1e-12
    assert abs(variance(plus, sz) - 0.25) < 1e-12


def test_unit_conversion():
    assert abs(nats_to_bits(LN2) - 1.0) < 1e-15
    assert abs(bits_to_nats(1.0) - LN2) < 1e-15


def test_basis_and_projector():
    e1 = basis_ket(3, 1)
    assert e1[1] == 1.0 and abs(np.linalg.norm(e1) - 1) < 1e-15
    p = projector([1, 1j])
    assert np.allclose(p @ p, p)
    assert abs(np.trace(p) - 1) < 1e-12


# -- property tests ---------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 4))
def test_fidelity_bounds_and_symmetry(seed, d):
    rng = np.random.default_rng(seed)
    r1 = State(rand_density(rng, d))
    r2 = State(rand_density(rng, d))
    f = fidelity(r1, r2)
    assert -1e-10 <= f <= 1.0 + 1e-10
    assert abs(f - fidelity(r2, r1)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 4))
def test_fuchs_van_de_graaf(seed, d):
    # 1 - F <= ||r1 - r2||_1 / 2 <= sqrt(1 - F^2)
    rng = np.random.default_rng(seed)
    r1 = State(rand_density(rng, d))
    r2 = State(rand_density(rng, d))
    f = fidelity(r1, r2)
    half_tn = trace_norm(r1.matrix - r2.matrix) / 2
    assert 1 - f <= half_tn + 1e-9
    assert half_tn <= purified_distance(r1, r2) + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_partial_trace_preserves_trace_and_psd(seed):
    rng = np.random.default_rng(seed)
    rho = State(rand_density(rng, 6), CompositeSpace((2, 3)))
    for keep in ([0], [1]):
        red = partial_trace(rho, keep)
        assert abs(np.trace(red.matrix).real - 1.0) < 1e-10
        assert np.linalg.eigvalsh(red.matrix)[0] > -1e-10
