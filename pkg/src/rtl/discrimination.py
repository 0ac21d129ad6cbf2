"""Binary state discrimination, the irreversibility measure, and recovery maps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qcore import (
    TOL,
    CompositeSpace,
    SpaceMismatchError,
    State,
    is_orthogonal,
    purified_distance,
    trace_norm,
)
from .channels import (
    Channel,
    Implementation,
    Povm,
    apply,
    channel_from_implementation,
)


def smoothing(x: float) -> float:
    """f(x) = 4x + x^2, the trace-norm control of the dilation comparison."""
    return 4.0 * x + x * x


@dataclass
class TestEnsemble:
    """Binary ensemble (rho1, rho2) with prior p on rho1."""

    rho1: State
    rho2: State
    p: float = 0.5
    require_orthogonal: bool = False

    def __post_init__(self):
        if self.rho1.dim != self.rho2.dim:
            raise SpaceMismatchError("ensemble states on different spaces")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"prior {self.p} outside (0,1)")
        if self.require_orthogonal and not is_orthogonal(self.rho1, self.rho2):
            raise ValueError("ensemble states are not orthogonal")

    @property
    def priors(self):
        return (self.p, 1.0 - self.p)

    @property
    def states(self):
        return (self.rho1, self.rho2)


@dataclass
class DiscriminationResult:
    p_fail: float
    povm: Povm
    method: str


def p_fail(ens: TestEnsemble, povm: Povm) -> float:
    """sum_k q_k Tr[(1 - Q_k) rho_k]."""
    if len(povm) != 2:
        raise ValueError("p_fail requires a two-valued POVM")
    if povm.dim != ens.rho1.dim:
        raise SpaceMismatchError("POVM dimension mismatch")
    out = 0.0
    for q, rho, eff in zip(ens.priors, ens.states, povm.effects):
        out += q * float(np.real(np.trace((np.eye(povm.dim) - eff) @ rho.matrix)))
    return float(min(1.0, max(0.0, out)))


def helstrom(ens: TestEnsemble) -> DiscriminationResult:
    """Optimal two-valued POVM: project on the strictly positive eigenspace of
    q1 rho1 - q2 rho2; zero modes (within tol) are assigned to the second effect."""
    q1, q2 = ens.priors
    gamma = q1 * ens.rho1.matrix - q2 * ens.rho2.matrix
    w, v = np.linalg.eigh(gamma)
    pos = w > TOL.psd
    d = ens.rho1.dim
    if np.any(pos):
        p1 = v[:, pos] @ v[:, pos].conj().T
    else:
        p1 = np.zeros((d, d), dtype=complex)
    povm = Povm([p1, np.eye(d) - p1], is_projective=True)
    pf = (1.0 - float(np.sum(np.abs(w)))) / 2.0
    return DiscriminationResult(float(min(1.0, max(0.0, pf))), povm, "helstrom")


@dataclass
class IrreversibilityResult:
    delta: float
    image: TestEnsemble
    discrimination: DiscriminationResult


def image_ensemble(lam: Channel, ens: TestEnsemble) -> TestEnsemble:
    return TestEnsemble(apply(lam, ens.rho1), apply(lam, ens.rho2), ens.p)


def irreversibility(lam: Channel, ens: TestEnsemble) -> IrreversibilityResult:
    """delta(Lam, Omega_p) = sqrt of the minimum failure probability of
    distinguishing the image ensemble; requires an orthogonal test pair."""
    if not is_orthogonal(ens.rho1, ens.rho2):
        raise ValueError("irreversibility requires an orthogonal test pair")
    img = image_ensemble(lam, ens)
    res = helstrom(img)
    return IrreversibilityResult(math.sqrt(max(0.0, res.p_fail)), img, res)


def recovery_from_povm(povm: Povm, ens: TestEnsemble) -> Channel:
    """Measure-and-prepare map X -> sum_i Tr[Q_i X] rho_i."""
    if len(povm) != 2:
        raise ValueError("recovery_from_povm requires a two-valued POVM")
    ks = []
    for eff, rho in zip(povm.effects, ens.states):
        wq, vq = np.linalg.eigh(eff)
        wr, vr = np.linalg.eigh(rho.matrix)
        for a in range(len(wr)):
            if wr[a] <= TOL.psd:
                continue
            for b in range(len(wq)):
                if wq[b] <= TOL.psd:
                    continue
                ks.append(math.sqrt(wr[a] * wq[b])
                          * np.outer(vr[:, a], vq[:, b].conj()))
    return Channel(ks, CompositeSpace((povm.dim,)), ens.rho1.space)


def avg_recovery_error(lam: Channel, ens: TestEnsemble, recovery: Channel) -> float:
    """sum_k p_k D_F(rho_k, R(Lam(rho_k)))^2."""
    out = 0.0
    for q, rho in zip(ens.priors, ens.states):
        rec = apply(recovery, apply(lam, rho))
        out += q * purified_distance(rho, rec) ** 2
    return float(out)


def epsilon_approx(rho: State, pvm: Povm, qovm: Povm, lam: Channel) -> float:
    """eps with eps^2 = sum_i <1 - Lam^dag(Q_i)> on P_i rho P_i."""
    if len(pvm) != 2 or not pvm.is_projective:
        raise ValueError("epsilon_approx requires a two-valued PVM on the input")
    if len(qovm) != 2:
        raise ValueError("epsilon_approx requires a two-valued POVM on the output")
    d_out = lam.out_space.total_dim
    total = 0.0
    for p_eff, q_eff in zip(pvm.effects, qovm.effects):
        block = p_eff @ rho.matrix @ p_eff
        rest = np.eye(d_out) - q_eff
        total += float(np.real(np.trace(adjoint_apply_op(lam, rest) @ block)))
    return math.sqrt(max(0.0, total))


def adjoint_apply_op(lam: Channel, x: np.ndarray) -> np.ndarray:
    return sum(k.conj().T @ x @ k for k in lam.kraus)


def lemma_dilation_gap(rho: State, pvm: Povm, qovm: Povm,
                       impl: Implementation, reg=None) -> dict:
    """Trace-norm gap between the dilated POVM measurement and the ideal PVM
    measurement, together with its proven bound f(eps) = 4 eps + eps^2.

    Output ordering of both compared operators: A (x) B (x) K.
    """
    from .channels import Register
    reg = reg or Register()
    lam = channel_from_implementation(impl)
    eps = epsilon_approx(rho, pvm, qovm, lam)

    v = impl.unitary
    d_a = impl.in_dim_a
    d_b = impl.ancilla.dim
    d_ap = int(np.prod(impl.out_dims_a))
    d_bp = int(np.prod(impl.out_dims_b))
    eta = impl.ancilla.matrix
    joint = np.kron(rho.matrix, eta)
    rotated = v @ joint @ v.conj().T  # on A' (x) B'

    # (Lam_Q on A') (x) id_B', then append the register: ordering A' B' K
    d_tot = d_a * d_b
    acc = np.zeros((d_tot * 2, d_tot * 2), dtype=complex)
    from .qcore import psd_sqrt
    for k, q_eff in enumerate(qovm.effects):
        m = np.kron(psd_sqrt(q_eff), np.eye(d_bp))
        branch = m @ rotated @ m.conj().T
        kk = np.outer(reg.ket(k), reg.ket(k).conj())
        acc += np.kron(branch, kk)
    # undo the unitary on the A'B' part: back to A (x) B, register untouched
    vk = np.kron(v.conj().T, np.eye(2))
    lhs_op = vk @ acc @ vk.conj().T

    ideal = np.zeros_like(lhs_op)
    for k, p_eff in enumerate(pvm.effects):
        branch = p_eff @ rho.matrix @ p_eff
        kk = np.outer(reg.ket(k), reg.ket(k).conj())
        ideal += np.kron(np.kron(branch, eta), kk)

    lhs = trace_norm(lhs_op - ideal)
    return {"lhs": lhs, "bound": smoothing(eps), "epsilon": eps}
