"""Seeded invariant suites: discrimination oracles, the dilation-gap sweep,
measure axioms, and bound dominance.

Each suite reports the number of instances, failures, and the worst margin
(violation minus tolerance; negative means satisfied). `budget` scales the
instance counts proportionally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import (
    CompositeSpace,
    Observable,
    State,
    basis_ket,
    projector,
    trace_norm,
)
from .channels import (
    Channel,
    Implementation,
    Povm,
    apply,
    two_valued_pvm,
)
from .discrimination import (
    TestEnsemble,
    avg_recovery_error,
    helstrom,
    irreversibility,
    lemma_dilation_gap,
    recovery_from_povm,
)
from .resources import ResourceMeasure, gibbs_state
from .bounds import (
    athermality_bound,
    conversion_tradeoff,
    energy_error_bound,
    energy_irrev_bound,
    general_tradeoff,
    povm_tradeoff,
    simplified_tradeoff,
    way_bound,
)


@dataclass
class SuiteResult:
    name: str
    instances: int
    failures: int
    worst_margin: float

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {"name": self.name, "instances": self.instances,
                "failures": self.failures, "worst_margin": self.worst_margin,
                "pass": self.passed}


def _scaled(n: int, budget: float) -> int:
    return max(2, int(round(n * budget)))


def random_density(rng, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_unitary(rng, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(rng, d_in: int, d_out: int, n_kraus: int = 3) -> Channel:
    ks = [rng.standard_normal((d_out, d_in))
          + 1j * rng.standard_normal((d_out, d_in)) for _ in range(n_kraus)]
    s = sum(k.conj().T @ k for k in ks)
    w, v = np.linalg.eigh(s)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    return Channel([k @ inv_sqrt for k in ks], (d_in,), (d_out,))


def random_effect(rng, d: int) -> np.ndarray:
    u = random_unitary(rng, d)
    return (u * rng.uniform(0.0, 1.0, d)) @ u.conj().T


# ---------------------------------------------------------------------------

def suite_discrimination(seed: int = 0, budget: float = 1.0) -> SuiteResult:
    """Closed-form optimum never beaten by sampled POVMs; the derived
    recovery map realizes average error delta^2."""
    rng = np.random.default_rng(seed)
    n_ens = _scaled(200, budget)
    n_povm = _scaled(10 ** 4, budget)
    failures, worst = 0, -math.inf

    for _ in range(n_ens):
        d = int(rng.integers(2, 4))
        sp = CompositeSpace((d,))
        rho1 = random_density(rng, d)
        rho2 = random_density(rng, d)
        p = float(rng.uniform(0.05, 0.95))
        ens = TestEnsemble(State(rho1, sp), State(rho2, sp), p)
        res = helstrom(ens)
        # batch of random effects E; POVM {E, 1-E} with E for outcome 1
        g = rng.standard_normal((n_povm, d, d)) \
            + 1j * rng.standard_normal((n_povm, d, d))
        g = g + np.conj(np.transpose(g, (0, 2, 1)))
        _w, v = np.linalg.eigh(g)
        u = rng.uniform(0.0, 1.0, (n_povm, d))
        eff = np.einsum("kij,kj,klj->kil", v, u, v.conj())
        gamma = p * rho1 - (1.0 - p) * rho2
        pf = p - np.real(np.einsum("kij,ji->k", eff, gamma))
        margin = res.p_fail - float(np.min(pf)) - 1e-9
        worst = max(worst, margin)
        if margin > 0:
            failures += 1

        # recovery oracle on an orthogonal pure pair pushed through a channel
        u2 = random_unitary(rng, d)
        pure = TestEnsemble(State.from_vector(u2[:, 0], sp),
                            State.from_vector(u2[:, 1], sp), p)
        lam = random_channel(rng, d, int(rng.integers(2, 4)))
        irr = irreversibility(lam, pure)
        rec = recovery_from_povm(irr.discrimination.povm, pure)
        err = avg_recovery_error(lam, pure, rec)
        margin = abs(err - irr.delta ** 2) - 1e-8
        worst = max(worst, margin)
        if margin > 0:
            failures += 1
    return SuiteResult("discrimination", 2 * n_ens, failures, worst)


def suite_lemma(seed: int = 0, budget: float = 1.0) -> SuiteResult:
    """Random dilation instances: trace-norm gap never exceeds 4e + e^2."""
    rng = np.random.default_rng(seed + 1)
    n = _scaled(500, budget)
    failures, worst = 0, -math.inf
    for _ in range(n):
        d_a = int(rng.integers(2, 5))
        d_b = int(rng.integers(2, 5))
        sp_a = CompositeSpace((d_a,))
        rho = State(random_density(rng, d_a), sp_a)
        up = random_unitary(rng, d_a)
        rank = int(rng.integers(1, d_a))
        pvm = two_valued_pvm(up[:, :rank] @ up[:, :rank].conj().T)
        e1 = random_effect(rng, d_a)
        qovm = Povm([e1, np.eye(d_a) - e1])
        impl = Implementation(
            ancilla=State(random_density(rng, d_b), CompositeSpace((d_b,))),
            unitary=random_unitary(rng, d_a * d_b),
            out_dims_a=(d_a,), out_dims_b=(d_b,))
        res = lemma_dilation_gap(rho, pvm, qovm, impl)
        margin = res["lhs"] - res["bound"] - 1e-9
        worst = max(worst, margin)
        if margin > 0:
            failures += 1
    return SuiteResult("dilation-gap", n, failures, worst)


# ---------------------------------------------------------------------------
# measure axioms

_H2 = np.diag([0.0, 1.0]).astype(complex)


def _base_measures():
    h = Observable(_H2)
    return {
        "energy": ResourceMeasure.energy(h),
        "athermality": ResourceMeasure.athermality(h, 1.0),
        "coherence": ResourceMeasure.coherence((2,)),
        "qfi": ResourceMeasure.qfi(h),
        "magic": ResourceMeasure.magic(1),
    }


def _m_copy_measure(kind: str, m: int):
    d = 2 ** m
    hm = np.zeros((d, d), dtype=complex)
    for k in range(m):
        term = np.eye(1, dtype=complex)
        for j in range(m):
            term = np.kron(term, _H2 if j == k else np.eye(2))
        hm += term
    h = Observable(hm, CompositeSpace((2,) * m))
    if kind == "energy":
        return ResourceMeasure.energy(h)
    if kind == "athermality":
        return ResourceMeasure.athermality(h, 1.0)
    if kind == "coherence":
        return ResourceMeasure.coherence((2,) * m)
    if kind == "qfi":
        return ResourceMeasure.qfi(h)
    return ResourceMeasure.magic(m)


def _free_channel(rng, kind: str) -> Channel:
    """A randomly sampled operation that is free for the given theory."""
    sp = (2,)
    phases = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 2)))
    if kind in ("energy", "qfi", "athermality"):
        u = Channel.from_unitary(phases, sp)  # commutes with diagonal H
        if kind == "energy":
            # mix with the ground reset
            t = float(rng.uniform(0, 1))
            reset = [math.sqrt(1) * np.outer(basis_ket(2, 0),
                                             basis_ket(2, k).conj())
                     for k in range(2)]
            ks = [math.sqrt(1 - t) * k for k in u.kraus] \
                + [math.sqrt(t) * k for k in reset]
            return Channel(ks, sp, sp)
        if kind == "athermality":
            # mix with full thermalization
            t = float(rng.uniform(0, 1))
            tau = gibbs_state(Observable(_H2), 1.0).matrix
            wt, vt = np.linalg.eigh(tau)
            therm = [math.sqrt(wt[a]) * np.outer(vt[:, a],
                                                 basis_ket(2, k).conj())
                     for a in range(2) for k in range(2)]
            ks = [math.sqrt(1 - t) * k for k in u.kraus] \
                + [math.sqrt(t) * k for k in therm]
            return Channel(ks, sp, sp)
        # qfi: mix with dephasing in the H eigenbasis (covariant)
        t = float(rng.uniform(0, 1))
        deph = [projector(basis_ket(2, k)) for k in range(2)]
        ks = [math.sqrt(1 - t) * k for k in u.kraus] \
            + [math.sqrt(t) * k for k in deph]
        return Channel(ks, sp, sp)
    if kind == "coherence":
        perm = np.eye(2)[rng.permutation(2)].astype(complex)
        t = float(rng.uniform(0, 1))
        deph = [projector(basis_ket(2, k)) for k in range(2)]
        ks = [math.sqrt(1 - t) * perm @ phases] \
            + [math.sqrt(t) * k for k in deph]
        return Channel(ks, sp, sp)
    # magic: random single-qubit Clifford word, optionally mixed with reset
    hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    s_gate = np.diag([1, 1j]).astype(complex)
    word = np.eye(2, dtype=complex)
    for _ in range(int(rng.integers(1, 8))):
        word = (hadamard if rng.integers(2) else s_gate) @ word
    t = float(rng.uniform(0, 1))
    reset = [np.outer(basis_ket(2, 0), basis_ket(2, k).conj())
             for k in range(2)]
    ks = [math.sqrt(1 - t) * word] + [math.sqrt(t) * k for k in reset]
    return Channel(ks, sp, sp)


def suite_axioms(seed: int = 0, budget: float = 1.0) -> SuiteResult:
    rng = np.random.default_rng(seed + 2)
    measures = _base_measures()
    failures, worst, instances = 0, -math.inf, 0

    n_pairs = _scaled(200, budget)
    additive = ("energy", "athermality", "coherence", "qfi")
    two = {k: _m_copy_measure(k, 2) for k in measures}
    sp2 = CompositeSpace((2, 2))
    for _ in range(n_pairs):
        rho = random_density(rng, 2)
        sig = random_density(rng, 2)
        joint = State(np.kron(rho, sig), sp2)
        for kind in additive:
            m1 = measures[kind]
            lhs = two[kind].value(joint)
            rhs = m1.value(State(rho)) + m1.value(State(sig))
            margin = abs(lhs - rhs) - 1e-7
            instances += 1
            worst = max(worst, margin)
            if margin > 0:
                failures += 1

    n_free = _scaled(100, budget)
    for kind, m1 in measures.items():
        for _ in range(n_free):
            lam = _free_channel(rng, kind)
            rho = State(random_density(rng, 2))
            gain = m1.value(apply(lam, rho)) - m1.value(rho)
            margin = gain - 1e-8
            instances += 1
            worst = max(worst, margin)
            if margin > 0:
                failures += 1

    n_cont = _scaled(200, budget)
    for kind, m1 in measures.items():
        c = m1.constants
        for mm in (1, 2):
            m_meas = m1 if mm == 1 else two[kind]
            d = 2 ** mm
            sp = CompositeSpace((2,) * mm)
            for _ in range(max(2, n_cont // 2)):
                rho = random_density(rng, 2)
                rho_m = rho if mm == 1 else np.kron(rho, rho)
                sig = random_density(rng, d)
                eps = trace_norm(rho_m - sig)
                lhs = abs(m_meas.value(State(rho_m, sp))
                          - m_meas.value(State(sig, sp)))
                if math.isinf(c.a):
                    rhs = c.K * math.exp(c.a_prime * mm) * eps ** c.b
                else:
                    rhs = mm ** c.a * c.K * eps ** c.b
                rhs += c.c(min(eps, 2.0))
                margin = lhs - rhs - 1e-9
                instances += 1
                worst = max(worst, margin)
                if margin > 0:
                    failures += 1
    return SuiteResult("measure-axioms", instances, failures, worst)


def suite_dominance(seed: int = 0, budget: float = 1.0) -> SuiteResult:
    """The quadratic simplification never exceeds the general bound (a=b=1),
    and every evaluator is divergent exactly when gap > 0 at zero error."""
    rng = np.random.default_rng(seed + 3)
    n = _scaled(10 ** 4, budget)
    failures, worst = 0, -math.inf
    for _ in range(n):
        gap = float(rng.uniform(0.0, 5.0))
        k = float(rng.uniform(0.1, 10.0))
        err = float(rng.uniform(1e-6, 1.0))
        c_max = float(rng.uniform(0.0, 1.0))
        simple = simplified_tradeoff(gap, k, err, c_max)
        general = general_tradeoff(gap, k, 1.0, 1.0, err, c_max)
        margin = simple.value - general.value - 1e-9
        worst = max(worst, margin)
        if margin > 0:
            failures += 1

    evaluators = [
        lambda g, e: general_tradeoff(g, 1.0, 1.0, 1.0, e),
        lambda g, e: general_tradeoff(g, 2.0, math.inf, 1.0, e, a_prime=1.0),
        lambda g, e: simplified_tradeoff(g, 1.0, e),
        lambda g, e: povm_tradeoff(g, 1.0, e * e),
        lambda g, e: conversion_tradeoff(g, 1.0, e),
        lambda g, e: energy_irrev_bound(g, 1.0, 1.0, e),
        lambda g, e: energy_error_bound(g, 1.0, 1.0, e),
        lambda g, e: athermality_bound(g, 1.0, 1.0, e),
        lambda g, e: way_bound(g, 0.0, 1.0, e),
    ]
    for fn in evaluators:
        for gap, err, want in ((1.0, 0.0, True), (1.0, 0.5, False),
                               (0.0, 0.0, False), (0.0, 0.5, False)):
            got = fn(gap, err).divergent
            margin = 0.0 if got == want else 1.0
            worst = max(worst, margin - 0.5)
            if got != want:
                failures += 1
    return SuiteResult("bound-dominance", n + 4 * len(evaluators),
                       failures, worst)


def suite_forced_failure(seed: int = 0, budget: float = 1.0) -> SuiteResult:
    """Fixture with a negated tolerance; must always fail (used to verify
    the failure path end to end)."""
    sp = CompositeSpace((2,))
    ens = TestEnsemble(State.from_vector([1, 1], sp),
                       State.from_vector([1, 0], sp))
    pf = helstrom(ens).p_fail
    margin = pf - (-1e-9)  # negated tolerance: demands p_fail <= -1e-9
    return SuiteResult("forced-failure", 1, int(margin > 0), margin)


SUITES = {
    "discrimination": suite_discrimination,
    "dilation-gap": suite_lemma,
    "measure-axioms": suite_axioms,
    "bound-dominance": suite_dominance,
}


def run_all(seed: int = 0, budget: float = 1.0,
            force_failure: bool = False) -> list[SuiteResult]:
    results = [fn(seed, budget) for fn in SUITES.values()]
    if force_failure:
        results.append(suite_forced_failure(seed, budget))
    return results
