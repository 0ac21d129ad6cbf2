"""CPTP maps: Kraus/Choi/Stinespring views, measurement channels, channel distance."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .qcore import (
    TOL,
    CompositeSpace,
    Observable,
    SpaceMismatchError,
    State,
    Tolerances,
    basis_ket,
    fidelity,
    is_hermitian,
    psd_sqrt,
)


class NotCPTPError(ValueError):
    """The given Kraus family is not completely positive trace preserving."""


@dataclass(frozen=True)
class Register:
    """Two-level classical register: an orthonormal basis pair plus a Hamiltonian."""

    basis: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))
    hamiltonian: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), dtype=complex))

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.shape != (2, 2):
            raise ValueError("register basis must be two vectors of a 2-level space")
        if np.max(np.abs(b.conj().T @ b - np.eye(2))) > TOL.orth:
            raise ValueError("register basis not orthonormal")
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "hamiltonian", np.asarray(self.hamiltonian, dtype=complex))

    def ket(self, k: int) -> np.ndarray:
        return self.basis[:, k]


class Povm:
    """Finite POVM; `is_projective` additionally demands orthogonal projectors."""

    __slots__ = ("effects", "is_projective")

    def __init__(self, effects, is_projective: bool = False, tol: Tolerances = TOL):
        effs = [np.asarray(e, dtype=complex) for e in effects]
        d = effs[0].shape[0]
        total = sum(effs)
        if np.max(np.abs(total - np.eye(d))) > tol.cptp:
            raise ValueError("POVM effects do not sum to identity")
        for e in effs:
            if not is_hermitian(e, tol.herm):
                raise ValueError("POVM effect not Hermitian")
            if np.linalg.eigvalsh(e)[0] < -tol.psd:
                raise ValueError("POVM effect not PSD")
        if is_projective:
            for i, e in enumerate(effs):
                if np.max(np.abs(e @ e - e)) > 1e-8:
                    raise ValueError("projective effect not idempotent")
                for f in effs[i + 1:]:
                    if np.max(np.abs(e @ f)) > 1e-8:
                        raise ValueError("projective effects not orthogonal")
        self.effects = effs
        self.is_projective = is_projective

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    def __len__(self):
        return len(self.effects)


def two_valued_pvm(p1: np.ndarray) -> Povm:
    """PVM {P, 1-P} from a projector."""
    p1 = np.asarray(p1, dtype=complex)
    return Povm([p1, np.eye(p1.shape[0]) - p1], is_projective=True)


class Channel:
    """CPTP map in Kraus form between composite spaces.

    `n_register_factors` counts trailing output factors that are classical
    registers (free in every resource theory); measurement channels set it.
    """

    __slots__ = ("in_space", "out_space", "kraus", "n_register_factors")

    def __init__(self, kraus, in_space=None, out_space=None, tol: Tolerances = TOL,
                 validate: bool = True, n_register_factors: int = 0):
        ks = [np.asarray(k, dtype=complex) for k in kraus]
        if not ks:
            raise ValueError("empty Kraus family")
        d_out, d_in = ks[0].shape
        in_sp = CompositeSpace.of(in_space if in_space is not None else d_in)
        out_sp = CompositeSpace.of(out_space if out_space is not None else d_out)
        if (in_sp.total_dim, out_sp.total_dim) != (d_in, d_out):
            raise SpaceMismatchError("Kraus shape does not match declared spaces")
        if validate:
            acc = sum(k.conj().T @ k for k in ks)
            if np.max(np.abs(acc - np.eye(d_in))) > tol.cptp:
                raise NotCPTPError("sum K^dag K != identity")
        self.in_space = in_sp
        self.out_space = out_sp
        self.kraus = ks
        self.n_register_factors = int(n_register_factors)

    @classmethod
    def identity(cls, space) -> "Channel":
        sp = CompositeSpace.of(space)
        return cls([np.eye(sp.total_dim, dtype=complex)], sp, sp)

    @classmethod
    def from_unitary(cls, u, space=None) -> "Channel":
        u = np.asarray(u, dtype=complex)
        return cls([u], space, space)

    def __repr__(self):
        return (f"Channel({self.in_space.dims}->{self.out_space.dims}, "
                f"{len(self.kraus)} Kraus)")


def apply(lam: Channel, rho: State) -> State:
    if rho.dim != lam.in_space.total_dim:
        raise SpaceMismatchError("apply: state does not match channel input")
    out = sum(k @ rho.matrix @ k.conj().T for k in lam.kraus)
    return State(out, lam.out_space)


def apply_raw(lam: Channel, m: np.ndarray) -> np.ndarray:
    return sum(k @ m @ k.conj().T for k in lam.kraus)


def adjoint_apply(lam: Channel, x) -> np.ndarray:
    """Heisenberg picture: sum K^dag X K."""
    m = x.matrix if isinstance(x, Observable) else np.asarray(x, dtype=complex)
    if m.shape[0] != lam.out_space.total_dim:
        raise SpaceMismatchError("adjoint_apply: operator does not match channel output")
    return sum(k.conj().T @ m @ k for k in lam.kraus)


def compose(lam2: Channel, lam1: Channel) -> Channel:
    """lam2 after lam1."""
    if lam1.out_space.total_dim != lam2.in_space.total_dim:
        raise SpaceMismatchError("compose: spaces incompatible")
    ks = [k2 @ k1 for k2 in lam2.kraus for k1 in lam1.kraus]
    return _compress(Channel(ks, lam1.in_space, lam2.out_space, validate=False))


def tensor_with_identity(lam: Channel, side_space, side: str = "left") -> Channel:
    """id_R (x) lam (side='left') or lam (x) id_R (side='right')."""
    sp = CompositeSpace.of(side_space)
    eye = np.eye(sp.total_dim, dtype=complex)
    if side == "left":
        ks = [np.kron(eye, k) for k in lam.kraus]
        return Channel(ks, sp * lam.in_space, sp * lam.out_space, validate=False,
                       n_register_factors=lam.n_register_factors)
    ks = [np.kron(k, eye) for k in lam.kraus]
    return Channel(ks, lam.in_space * sp, lam.out_space * sp, validate=False)


def to_choi(lam: Channel) -> np.ndarray:
    """Choi matrix sum_ij |i><j| (x) Lam(|i><j|), input factor first."""
    d_in = lam.in_space.total_dim
    d_out = lam.out_space.total_dim
    c = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for k in lam.kraus:
        vec = k.T.reshape(-1)  # |i>|K i>
        c += np.outer(vec, vec.conj())
    return c


def from_choi(choi, in_dims, out_dims, tol: Tolerances = TOL) -> Channel:
    in_sp = CompositeSpace.of(in_dims)
    out_sp = CompositeSpace.of(out_dims)
    d_in, d_out = in_sp.total_dim, out_sp.total_dim
    c = np.asarray(choi, dtype=complex)
    if c.shape != (d_in * d_out, d_in * d_out):
        raise SpaceMismatchError("Choi matrix shape mismatch")
    w, v = np.linalg.eigh((c + c.conj().T) / 2)
    if w[0] < -10 * tol.psd * max(1.0, w[-1]):
        raise NotCPTPError(f"Choi matrix not PSD (min eig {w[0]})")
    ks = []
    for i in range(len(w)):
        if w[i] > tol.psd:
            ks.append(math.sqrt(w[i]) * v[:, i].reshape(d_in, d_out).T)
    return Channel(ks, in_sp, out_sp, tol=tol)


def _compress(lam: Channel) -> Channel:
    """Re-derive a minimal Kraus family via the Choi eigendecomposition."""
    return from_choi(to_choi(lam), lam.in_space, lam.out_space)


def cptp_check(lam: Channel) -> dict:
    acc = sum(k.conj().T @ k for k in lam.kraus)
    tp_err = float(np.max(np.abs(acc - np.eye(lam.in_space.total_dim))))
    min_eig = float(np.linalg.eigvalsh(to_choi(lam))[0])
    return {
        "tp_error": tp_err,
        "choi_min_eig": min_eig,
        "ok": tp_err <= TOL.cptp and min_eig >= -TOL.psd * 10,
    }


@dataclass
class Implementation:
    """Dilation data: ancilla eta on B, unitary V on A(x)B, output split A'|B'.

    The unitary output space is factored as out_dims_a + out_dims_b in order;
    the realized channel is rho -> Tr_B'[ V (rho (x) eta) V^dag ].
    """

    ancilla: State
    unitary: np.ndarray
    out_dims_a: tuple
    out_dims_b: tuple

    def __post_init__(self):
        v = np.asarray(self.unitary, dtype=complex)
        n = v.shape[0]
        if np.max(np.abs(v.conj().T @ v - np.eye(n))) > 1e-8:
            raise ValueError("implementation unitary is not unitary")
        self.unitary = v
        self.out_dims_a = tuple(int(d) for d in self.out_dims_a)
        self.out_dims_b = tuple(int(d) for d in self.out_dims_b)
        da = int(np.prod(self.out_dims_a))
        db = int(np.prod(self.out_dims_b))
        if da * db != n:
            raise SpaceMismatchError("output partition does not factor the unitary")

    @property
    def in_dim_a(self) -> int:
        return self.unitary.shape[0] // self.ancilla.dim


def channel_from_implementation(impl: Implementation) -> Channel:
    """Kraus operators K_{ij} = sqrt(q_j) (I (x) <b_i|) V (I (x) |e_j>)."""
    v = impl.unitary
    d_a = impl.in_dim_a
    d_ap = int(np.prod(impl.out_dims_a))
    d_bp = int(np.prod(impl.out_dims_b))
    w, vecs = np.linalg.eigh(impl.ancilla.matrix)
    ks = []
    vt = v.reshape(d_ap, d_bp, d_a, impl.ancilla.dim)
    for j in range(len(w)):
        if w[j] <= TOL.psd:
            continue
        amp = math.sqrt(w[j])
        # contract ancilla input vector, then slice each B' basis output
        block = np.tensordot(vt, vecs[:, j], axes=([3], [0]))  # (d_ap, d_bp, d_a)
        for i in range(d_bp):
            ks.append(amp * block[:, i, :])
    return Channel(ks, CompositeSpace((d_a,)), CompositeSpace.of(impl.out_dims_a))


def stinespring(lam: Channel) -> Implementation:
    """Canonical dilation with pure ancilla |0> and deterministic completion."""
    lam = _compress(lam)
    d_in = lam.in_space.total_dim
    d_out = lam.out_space.total_dim
    r = len(lam.kraus)
    # B' must index every Kraus operator, and d_in * d_b = d_out * d_bp
    d_bp = r
    while (d_out * d_bp) % d_in != 0:
        d_bp += 1
    kraus = lam.kraus + [np.zeros((d_out, d_in), dtype=complex)] * (d_bp - r)
    d_b = d_out * d_bp // d_in
    n = d_in * d_b
    # isometry columns for inputs |psi>_A |0>_B; output ordered as A' (x) B'
    v = np.zeros((n, n), dtype=complex)
    for col in range(d_in):
        w = np.zeros((d_out, d_bp), dtype=complex)
        for k in range(len(kraus)):
            w[:, k] = kraus[k][:, col]
        v[:, col * d_b] = w.reshape(-1)
    # complete remaining columns by Gram-Schmidt over the standard basis, in order
    filled = [col * d_b for col in range(d_in)]
    basis_cols = [v[:, c] for c in filled]
    free = [c for c in range(n) if c not in filled]
    idx = 0
    for c in free:
        while True:
            cand = basis_ket(n, idx)
            idx += 1
            for _ in range(2):  # double Gram-Schmidt pass for stability
                for b in basis_cols:
                    cand = cand - b * (b.conj() @ cand)
            nn = np.linalg.norm(cand)
            if nn > 1e-6:
                cand = cand / nn
                break
        v[:, c] = cand
        basis_cols.append(cand)
    anc = State.from_vector(basis_ket(d_b, 0), CompositeSpace((d_b,)))
    return Implementation(anc, v, lam.out_space.dims, (d_bp,))


def measurement_channel_pvm(pvm: Povm, reg: Register) -> Channel:
    """Lam_P(rho) = sum_k P_k rho P_k (x) |k><k|, two-valued projective."""
    if len(pvm) != 2 or not pvm.is_projective:
        raise ValueError("measurement_channel_pvm requires a two-valued PVM")
    ks = [np.kron(p, reg.ket(k).reshape(2, 1)) for k, p in enumerate(pvm.effects)]
    in_sp = CompositeSpace((pvm.dim,))
    return Channel(ks, in_sp, CompositeSpace((pvm.dim, 2)), n_register_factors=1)


def measurement_channel_povm(povm: Povm, reg: Register) -> Channel:
    """Lam_Q(rho) = sum_k sqrt(Q_k) rho sqrt(Q_k) (x) |k><k|, two-valued."""
    if len(povm) != 2:
        raise ValueError("measurement_channel_povm requires a two-valued POVM")
    ks = [np.kron(psd_sqrt(q), reg.ket(k).reshape(2, 1))
          for k, q in enumerate(povm.effects)]
    in_sp = CompositeSpace((povm.dim,))
    return Channel(ks, in_sp, CompositeSpace((povm.dim, 2)), n_register_factors=1)


def readout_channel(povm: Povm, out_basis: np.ndarray | None = None) -> Channel:
    """Gamma_P(rho) = sum_k Tr[P_k rho] |k><k|; any number of outcomes."""
    r = len(povm)
    if out_basis is None:
        out_basis = np.eye(r, dtype=complex)
    ks = []
    for k, eff in enumerate(povm.effects):
        w, v = np.linalg.eigh(eff)
        for i in range(len(w)):
            if w[i] > TOL.psd:
                ks.append(math.sqrt(w[i])
                          * np.outer(out_basis[:, k], v[:, i].conj()))
    return Channel(ks, CompositeSpace((povm.dim,)), CompositeSpace((r,)),
                   n_register_factors=1)


def dephase(rho: State, basis: np.ndarray | None = None) -> State:
    """Kill off-diagonal elements in the given (default computational) basis."""
    m = rho.matrix
    if basis is not None:
        b = np.asarray(basis, dtype=complex)
        m = b.conj().T @ m @ b
        out = b @ np.diag(np.diag(m)) @ b.conj().T
    else:
        out = np.diag(np.diag(m))
    return State(out, rho.space)


@dataclass
class OptOptions:
    restarts: int = 32
    seed: int = 0
    maxiter: int = 300


@dataclass
class OptResult:
    value: float
    state: State | None
    restarts: int
    heuristic: bool = True


def _pure_from_params(x: np.ndarray) -> np.ndarray:
    n = len(x) // 2
    v = x[:n] + 1j * x[n:]
    nn = np.linalg.norm(v)
    if nn < 1e-12:
        v = np.zeros(n, dtype=complex)
        v[0] = 1.0
        return v
    return v / nn


def channel_purified_distance(lam1: Channel, lam2: Channel,
                              opts: OptOptions | None = None) -> OptResult:
    """max_rho D_F(id(x)Lam1(rho), id(x)Lam2(rho)) over pure inputs on R(x)A.

    dim R = dim A; multi-start local ascent, so the result is a certified
    lower bound on the true maximum.
    """
    if lam1.in_space.dims != lam2.in_space.dims or \
            lam1.out_space.dims != lam2.out_space.dims:
        raise SpaceMismatchError("channel_purified_distance: space mismatch")
    opts = opts or OptOptions()
    d_a = lam1.in_space.total_dim
    ref = CompositeSpace((d_a,))
    big1 = tensor_with_identity(lam1, ref, "left")
    big2 = tensor_with_identity(lam2, ref, "left")
    n = d_a * d_a

    def neg_obj(x):
        psi = _pure_from_params(x)
        rho = np.outer(psi, psi.conj())
        o1 = State(apply_raw(big1, rho), big1.out_space, validate=False)
        o2 = State(apply_raw(big2, rho), big2.out_space, validate=False)
        f = fidelity(o1, o2)
        return -(math.sqrt(max(0.0, 1.0 - f * f)))

    rng = np.random.default_rng(opts.seed)
    best_val, best_x = -1.0, None
    for _ in range(opts.restarts):
        x0 = rng.standard_normal(2 * n)
        res = minimize(neg_obj, x0, method="L-BFGS-B",
                       options={"maxiter": opts.maxiter})
        val = -res.fun
        if val > best_val + 1e-15:
            best_val, best_x = val, res.x
    psi = _pure_from_params(best_x)
    arg = State.from_vector(psi, ref * lam1.in_space)
    return OptResult(float(max(0.0, best_val)), arg, opts.restarts)
