"""Binary discrimination, the irreversibility measure, and dilation gaps."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rtl.qcore import CompositeSpace, State
from rtl.channels import Channel, Implementation, Povm, two_valued_pvm
from rtl.discrimination import (
    TestEnsemble,
    avg_recovery_error,
    epsilon_approx,
    helstrom,
    image_ensemble,
    irreversibility,
    lemma_dilation_gap,
    p_fail,
    recovery_from_povm,
    smoothing,
)


def rand_density(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real


def test_ensemble_validation():
    zero = State.from_vector([1, 0])
    one = State.from_vector([0, 1])
    plus = State.from_vector([1, 1])
    TestEnsemble(zero, one, 0.5, require_orthogonal=True)
    with pytest.raises(ValueError):
        TestEnsemble(zero, plus, 0.5, require_orthogonal=True)
    with pytest.raises(ValueError):
        TestEnsemble(zero, one, 1.0)


def test_helstrom_orthogonal_pair_is_perfect():
    ens = TestEnsemble(State.from_vector([1, 0]), State.from_vector([0, 1]), 0.3)
    res = helstrom(ens)
    assert res.p_fail < 1e-12
    assert p_fail(ens, res.povm) < 1e-12


def test_helstrom_pure_pair_closed_form():
    # p_fail = (1 - sqrt(1 - 4 q1 q2 |<psi1|psi2>|^2)) / 2
    zero = State.from_vector([1, 0])
    plus = State.from_vector([1, 1])
    for p in (0.5, 0.3, 0.8):
        ens = TestEnsemble(zero, plus, p)
        want = (1 - math.sqrt(1 - 4 * p * (1 - p) * 0.5)) / 2
        got = helstrom(ens).p_fail
        assert abs(got - want) < 1e-12


def test_helstrom_skewed_prior_never_beats_guessing():
    # guessing the likelier state gives p_fail = min(q1, q2)
    rng = np.random.default_rng(0)
    for _ in range(50):
        sp = CompositeSpace((3,))
        ens = TestEnsemble(State(rand_density(rng, 3), sp),
                           State(rand_density(rng, 3), sp),
                           float(rng.uniform(0.05, 0.95)))
        res = helstrom(ens)
        assert res.p_fail <= min(ens.priors) + 1e-12
        assert abs(p_fail(ens, res.povm) - res.p_fail) < 1e-10


def test_identity_channel_is_reversible():
    ens = TestEnsemble(State.from_vector([1, 0]), State.from_vector([0, 1]), 0.5)
    irr = irreversibility(Channel.identity((2,)), ens)
    assert irr.delta < 1e-8


def test_irreversibility_requires_orthogonality():
    ens = TestEnsemble(State.from_vector([1, 0]), State.from_vector([1, 1]), 0.5)
    with pytest.raises(ValueError):
        irreversibility(Channel.identity((2,)), ens)


def test_depolarizing_irreversibility_value():
    # full depolarizing to I/2: images coincide, p_fail = min prior,
    # so delta = sqrt(min(p, 1-p))
    paulis = [np.eye(2), np.array([[0, 1], [1, 0]]),
              np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    lam = Channel([s / 2 for s in paulis], (2,), (2,))
    ens = TestEnsemble(State.from_vector([1, 0]), State.from_vector([0, 1]), 0.3)
    irr = irreversibility(lam, ens)
    assert abs(irr.delta - math.sqrt(0.3)) < 1e-10


def test_recovery_achieves_delta_squared():
    rng = np.random.default_rng(9)
    ks = [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
          for _ in range(2)]
    s = sum(k.conj().T @ k for k in ks)
    w, v = np.linalg.eigh(s)
    inv = (v / np.sqrt(w)) @ v.conj().T
    lam = Channel([k @ inv for k in ks], (2,), (2,))
    ens = TestEnsemble(State.from_vector([1, 0]), State.from_vector([0, 1]), 0.5)
    irr = irreversibility(lam, ens)
    rec = recovery_from_povm(irr.discrimination.povm, ens)
    err = avg_recovery_error(lam, ens, rec)
    assert abs(err - irr.delta ** 2) < 1e-10


def test_image_ensemble_keeps_prior():
    ens = TestEnsemble(State.from_vector([1, 0]), State.from_vector([0, 1]), 0.7)
    img = image_ensemble(Channel.from_unitary(np.eye(2)), ens)
    assert img.p == 0.7


def test_smoothing():
    assert smoothing(0.0) == 0.0
    assert abs(smoothing(0.1) - 0.41) < 1e-15


def test_epsilon_approx_perfect_measurement():
    # identity channel read against the same projective test: eps = 0
    pvm = two_valued_pvm(np.diag([1.0, 0.0]))
    lam = Channel.identity((2,))
    rho = State(np.diag([0.6, 0.4]))
    assert epsilon_approx(rho, pvm, pvm, lam) < 1e-9


def test_lemma_gap_zero_for_exact_implementation():
    # CNOT with a |0> ancilla measures the computational PVM exactly:
    # eps vanishes and the compared operators coincide
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                    dtype=complex)
    anc = State.from_vector([1, 0])
    impl = Implementation(anc, cnot, (2,), (2,))
    pvm = two_valued_pvm(np.diag([1.0, 0.0]))
    qovm = Povm([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], is_projective=True)
    rho = State(np.diag([0.6, 0.4]))
    rep = lemma_dilation_gap(rho, pvm, qovm, impl)
    assert rep["epsilon"] < 1e-9
    assert rep["lhs"] < 1e-9


def test_lemma_gap_random_instances():
    rng = np.random.default_rng(1)
    for _ in range(25):
        d_a, d_b = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        g = rng.standard_normal((d_a * d_b, d_a * d_b)) \
            + 1j * rng.standard_normal((d_a * d_b, d_a * d_b))
        v, _ = np.linalg.qr(g)
        anc = State(rand_density(rng, d_b), CompositeSpace((d_b,)))
        impl = Implementation(anc, v, (d_a,), (d_b,))
        rho = State(rand_density(rng, d_a), CompositeSpace((d_a,)))
        gp = rng.standard_normal((d_a, d_a)) + 1j * rng.standard_normal((d_a, d_a))
        q, _ = np.linalg.qr(gp)
        rank = int(rng.integers(1, d_a))
        proj = q[:, :rank] @ q[:, :rank].conj().T
        pvm = two_valued_pvm(proj)
        u = np.linalg.qr(rng.standard_normal((d_a, d_a))
                         + 1j * rng.standard_normal((d_a, d_a)))[0]
        eff = (u * rng.uniform(0, 1, d_a)) @ u.conj().T
        qovm = Povm([eff, np.eye(d_a) - eff])
        rep = lemma_dilation_gap(rho, pvm, qovm, impl)
        assert rep["lhs"] <= rep["bound"] + 1e-9


# -- property tests ---------------------------------------------------------

@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0.05, 0.95))
def test_helstrom_beats_random_projective_guess(seed, p):
    rng = np.random.default_rng(seed)
    sp = CompositeSpace((2,))
    ens = TestEnsemble(State(rand_density(rng, 2), sp),
                       State(rand_density(rng, 2), sp), float(p))
    res = helstrom(ens)
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, _ = np.linalg.qr(g)
    guess = two_valued_pvm(np.outer(q[:, 0], q[:, 0].conj()))
    assert res.p_fail <= p_fail(ens, guess) + 1e-10
