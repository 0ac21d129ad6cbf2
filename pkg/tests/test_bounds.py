"""Scalar cost lower bounds: frozen values, divergence rules, dominance."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rtl.qcore import Observable
from rtl.channels import two_valued_pvm
from rtl.bounds import (
    athermality_bound,
    c_erase_gap_bound,
    conversion_tradeoff,
    energy_error_bound,
    energy_irrev_bound,
    f,
    g,
    general_tradeoff,
    plus_part,
    povm_tradeoff,
    proj_meas_energy_bound,
    simplified_tradeoff,
    unitary_energy_bound,
    way_bound,
    work_bound,
)


def test_f_and_g():
    assert f(0.0) == 0.0
    assert abs(f(0.1) - 0.41) < 1e-15
    assert abs(g(1.0, 1.0) - 0.25) < 1e-15
    with pytest.raises(ValueError):
        g(0.5, 0.5)


def test_plus_part():
    assert plus_part(-3.0) == 0.0
    assert plus_part(2.5) == 2.5


def test_general_tradeoff_frozen_value():
    rep = general_tradeoff(gap=2.0, K=1.0, a=1.0, b=1.0, error=0.01,
                           c_max=0.5)
    assert abs(rep.value - 22.437655860349125) < 1e-12
    assert not rep.divergent


def test_general_tradeoff_infinite_exponent():
    rep = general_tradeoff(gap=1.0, K=2.0, a=math.inf, b=1.0, error=0.01,
                           a_prime=math.log(2))
    assert abs(rep.value - (-0.41136674861247347)) < 1e-12
    with pytest.raises(ValueError):
        general_tradeoff(gap=1.0, K=2.0, a=math.inf, b=1.0, error=0.01)


def test_simplified_tradeoff_frozen_value():
    rep = simplified_tradeoff(gap=2.0, K=1.0, delta=0.01, c_max=0.5)
    assert abs(rep.value - 22.4375) < 1e-12
    assert abs(rep.intermediates["c_prime"] - 2.5625) < 1e-12


def test_povm_and_conversion_consistent_with_simplified():
    base = simplified_tradeoff(gap=1.5, K=2.0, delta=0.2)
    assert abs(povm_tradeoff(gap=1.5, K=2.0, p_fail=0.04).value
               - base.value) < 1e-12
    assert abs(conversion_tradeoff(gap=1.5, K=2.0, epsilon=0.2).value
               - base.value) < 1e-12


def test_energy_bounds_frozen_values():
    assert abs(energy_error_bound(0.5, 1.0, 0.0, 0.01).value - 2.125) < 1e-12
    assert abs(energy_irrev_bound(0.5, 1.0, 0.0, 0.05).value
               - 0.11728395061728392) < 1e-12


def test_proj_meas_energy_spin_x():
    pvm = two_valued_pvm(np.array([[0.5, 0.5], [0.5, 0.5]]))
    h = Observable(np.diag([0.5, -0.5]))
    rep = proj_meas_energy_bound(pvm, h, 0.01)
    assert abs(rep.value - 10.5) < 1e-9


def test_unitary_energy_hadamard():
    h = Observable(np.diag([0.5, -0.5]))
    v = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    rep = unitary_energy_bound(v, h, 0.01)
    assert abs(rep.value - 1.095) < 1e-12


def test_athermality_and_work_frozen_values():
    a = athermality_bound(gap=2.0, K_A=5.0, beta=1.0, error=0.01)
    assert abs(a.value - 2.2943528194400544) < 1e-12
    w = work_bound(gap=2.0, K_A=5.0, beta=1.0, error=0.01)
    assert abs(w.value - 1.601205638880109) < 1e-12
    assert abs(a.value - w.value - math.log(2)) < 1e-12


def test_c_erase_gap():
    assert abs(c_erase_gap_bound(0.0, 4.0, 1.0)
               - (2.0 - 2.0 * math.log(2))) < 1e-12
    # symmetric in the two levels
    assert c_erase_gap_bound(4.0, 0.0, 1.0) == c_erase_gap_bound(0.0, 4.0, 1.0)


def test_way_bound_frozen_value():
    rep = way_bound(m_em_max=math.log(2), probe_power=0.0,
                    K=2 * math.log(2), eps=0.1)
    assert abs(rep.value - (-0.47653868663496235)) < 1e-12


def test_divergence_rule_every_evaluator():
    h = Observable(np.diag([0.5, -0.5]))
    pvm = two_valued_pvm(np.array([[0.5, 0.5], [0.5, 0.5]]))
    v = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    cases = [
        lambda e, gp: general_tradeoff(gp, 1.0, 1.0, 1.0, e),
        lambda e, gp: general_tradeoff(gp, 1.0, math.inf, 1.0, e,
                                       a_prime=1.0),
        lambda e, gp: simplified_tradeoff(gp, 1.0, e),
        lambda e, gp: povm_tradeoff(gp, 1.0, e),
        lambda e, gp: conversion_tradeoff(gp, 1.0, e),
        lambda e, gp: energy_irrev_bound(gp, 1.0, 0.0, e),
        lambda e, gp: energy_error_bound(gp, 1.0, 0.0, e),
        lambda e, gp: proj_meas_energy_bound(pvm, h, e) if gp else
        proj_meas_energy_bound(pvm, Observable(np.zeros((2, 2))), e),
        lambda e, gp: unitary_energy_bound(v if gp else np.eye(2), h, e),
        lambda e, gp: athermality_bound(gp, 1.0, 1.0, e),
        lambda e, gp: work_bound(gp, 1.0, 1.0, e),
        lambda e, gp: way_bound(gp, 0.0, 1.0, e),
    ]
    for make in cases:
        assert make(0.0, 1.0).divergent  # positive gap, zero error
        assert not make(0.1, 1.0).divergent
        assert not make(0.0, 0.0).divergent  # zero gap never diverges
        rep = make(0.0, 1.0)
        assert rep.to_dict()["value"] == "divergent"


def test_vacuous_bounds_not_clipped():
    rep = simplified_tradeoff(gap=0.1, K=10.0, delta=0.5, c_max=1.0)
    assert rep.value < 0.0


def test_zero_gap_values():
    assert simplified_tradeoff(0.0, 1.0, 0.1, c_max=0.3).value == -0.3
    assert general_tradeoff(-1.0, 1.0, 1.0, 1.0, 0.1, c_max=0.3).value == -0.3


# -- property tests ---------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 10.0), st.floats(0.1, 50.0), st.floats(1e-4, 1.0),
       st.floats(0.0, 5.0))
def test_simplified_never_exceeds_general(gap, K, err, c_max):
    lo = simplified_tradeoff(gap, K, err, c_max).value
    hi = general_tradeoff(gap, K, 1.0, 1.0, err, c_max).value
    assert lo <= hi + 1e-9


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(0.1, 20.0), st.floats(1e-4, 0.5))
def test_bounds_decrease_with_error(gap, K, err):
    a = simplified_tradeoff(gap, K, err).value
    b = simplified_tradeoff(gap, K, err * 2).value
    assert b <= a + 1e-12
