"""The five resource measures, their continuity constants, and channel quantities.

Measures: energy expectation (ground level shifted to zero), relative entropy
of athermality, relative entropy of coherence, quantum Fisher information of
a conserved observable, and the max-relative entropy of magic. All values are
in nats except magic, which is in bits by its own base-2 definition.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import cvxpy as cp
import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .qcore import (
    TOL,
    CompositeSpace,
    Observable,
    SpaceMismatchError,
    State,
    basis_ket,
    binary_entropy,
    expectation,
    rel_entropy,
    spread,
    vn_entropy,
)
from .channels import (
    Channel,
    OptOptions,
    OptResult,
    Povm,
    Register,
    _pure_from_params,
    apply,
    apply_raw,
    adjoint_apply,
    dephase,
    measurement_channel_pvm,
    measurement_channel_povm,
    tensor_with_identity,
    two_valued_pvm,
)
from .discrimination import TestEnsemble


# ---------------------------------------------------------------------------
# continuity constants

@dataclass(frozen=True)
class HoelderConstants:
    """Continuity data: |M(rho^m) - M(sigma_m)| <= m^a K eps^b + c(eps)
    (finite a), or K e^{a'm} eps^b + c(eps) when a is infinite."""

    K: float
    a: float
    b: float
    a_prime: float | None = None
    c_fn: object = None  # callable [0,2] -> R
    c_max: float = 0.0

    def c(self, x: float) -> float:
        return 0.0 if self.c_fn is None else float(self.c_fn(x))


def _coherence_c(x: float) -> float:
    if x <= 0.0:
        return 0.0
    return (1.0 + x / 2.0) * binary_entropy((x / 2.0) / (1.0 + x / 2.0))


@lru_cache(maxsize=1)
def coherence_c_max() -> float:
    res = minimize_scalar(lambda x: -_coherence_c(x), bounds=(0.0, 2.0),
                          method="bounded", options={"xatol": 1e-12})
    return float(-res.fun)


# ---------------------------------------------------------------------------
# stabilizer machinery (magic)

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S = np.diag([1, 1j]).astype(complex)


def _cnot(n, c, t):
    d = 2 ** n
    m = np.zeros((d, d), dtype=complex)
    for i in range(d):
        bits = [(i >> (n - 1 - k)) & 1 for k in range(n)]
        if bits[c]:
            bits[t] ^= 1
        j = sum(b << (n - 1 - k) for k, b in enumerate(bits))
        m[j, i] = 1.0
    return m


def _one_qubit_gate(n, q, g):
    m = np.eye(1, dtype=complex)
    for k in range(n):
        m = np.kron(m, g if k == q else np.eye(2, dtype=complex))
    return m


def _state_key(v: np.ndarray) -> bytes:
    i = int(np.argmax(np.abs(v) > 1e-8))
    w = v * np.exp(-1j * np.angle(v[i]))
    return (np.round(w, 8) + (0.0 + 0.0j)).tobytes()  # merge -0.0 into +0.0


@lru_cache(maxsize=4)
def pure_stabilizer_states(n_qubits: int) -> tuple:
    """All pure stabilizer state vectors on n qubits (6 for n=1, 60 for n=2)."""
    if n_qubits > 2:
        raise ValueError("stabilizer enumeration limited to 2 qubits")
    gates = []
    for q in range(n_qubits):
        gates.append(_one_qubit_gate(n_qubits, q, _H))
        gates.append(_one_qubit_gate(n_qubits, q, _S))
    for c in range(n_qubits):
        for t in range(n_qubits):
            if c != t:
                gates.append(_cnot(n_qubits, c, t))
    start = basis_ket(2 ** n_qubits, 0)
    seen = {_state_key(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gates:
                w = g @ v
                key = _state_key(w)
                if key not in seen:
                    seen[key] = w
                    nxt.append(w)
        frontier = nxt
    return tuple(seen.values())


@lru_cache(maxsize=4)
def _magic_sdp(n_qubits: int):
    stabs = np.array([np.outer(v, v.conj())
                      for v in pure_stabilizer_states(n_qubits)])
    d = 2 ** n_qubits
    lam = cp.Variable(len(stabs), nonneg=True)
    target = cp.Parameter((d, d), hermitian=True)
    mix = cp.sum([w * s for w, s in zip(lam, stabs)])
    prob = cp.Problem(cp.Minimize(cp.sum(lam)), [mix - target >> 0])
    return prob, lam, target, stabs


def d_max_magic(rho: State | np.ndarray, n_qubits: int | None = None,
                tol: float = 1e-11) -> float:
    """Max-relative entropy of magic in bits.

    Solves min sum(lam) s.t. sum lam_i s_i - rho >= 0, lam >= 0 over the pure
    stabilizer states; the answer is log2 of the optimal total weight.
    """
    m = rho.matrix if isinstance(rho, State) else np.asarray(rho, dtype=complex)
    d = m.shape[0]
    if n_qubits is None:
        n_qubits = int(round(math.log2(d)))
    if 2 ** n_qubits != d:
        raise ValueError("magic is defined on qubit systems only")
    prob, lam, target, stabs = _magic_sdp(n_qubits)
    target.value = (m + m.conj().T) / 2
    with warnings.catch_warnings():
        # the solver often stops one notch short of these tolerances; the
        # eigenvalue shift below repairs the iterate to exact feasibility,
        # so its accuracy warning carries no information here
        warnings.simplefilter("ignore", UserWarning)
        prob.solve(solver=cp.CLARABEL, tol_gap_abs=tol, tol_gap_rel=tol,
                   tol_feas=tol)
    if lam.value is None:
        raise RuntimeError(f"magic SDP failed: status {prob.status}")
    weights = np.asarray(lam.value)
    # repair any residual infeasibility: lam plus mu on each computational
    # basis state is exactly feasible, certifying the reported value
    z = np.einsum("k,kij->ij", weights, stabs) - m
    mu = max(0.0, -float(np.linalg.eigvalsh(z)[0]))
    return float(np.log2(float(weights.sum()) + d * mu))


# ---------------------------------------------------------------------------
# Gibbs helpers

def gibbs_state(h: Observable, beta: float) -> State:
    w, v = h.eig()
    z = np.exp(-beta * (w - w[0]))
    z /= z.sum()
    return State((v * z) @ v.conj().T, h.space)


def free_energy(rho: State, h: Observable, beta: float) -> float:
    """F(rho) = <H> - S(rho)/beta."""
    return expectation(rho, h) - vn_entropy(rho) / beta


# ---------------------------------------------------------------------------
# the measures

_KINDS = ("energy", "athermality", "coherence", "qfi", "magic")


class ResourceMeasure:
    """One of the five measures, bound to a concrete space and context."""

    def __init__(self, kind: str, space: CompositeSpace,
                 hamiltonian: Observable | None = None,
                 beta: float | None = None,
                 basis: np.ndarray | None = None,
                 constants: HoelderConstants | None = None):
        if kind not in _KINDS:
            raise ValueError(f"unknown measure kind {kind!r}")
        self.kind = kind
        self.space = space
        self.hamiltonian = hamiltonian
        self.beta = beta
        self.basis = basis
        self.constants = constants
        self._gibbs = None

    # -- constructors

    @classmethod
    def energy(cls, h: Observable) -> "ResourceMeasure":
        w = h.eig()[0]
        shifted = Observable(h.matrix - w[0] * np.eye(h.dim), h.space)
        consts = HoelderConstants(K=spread(h) / 2.0, a=1.0, b=1.0)
        return cls("energy", h.space, hamiltonian=shifted, constants=consts)

    @classmethod
    def athermality(cls, h: Observable, beta: float) -> "ResourceMeasure":
        d = h.dim
        consts = HoelderConstants(
            K=spread(h) + 2.0 * math.log(d) / beta, a=1.0, b=1.0,
            c_fn=lambda x, _b=beta: binary_entropy(min(1.0, x / 2.0)) / _b,
            c_max=math.log(2.0) / beta)
        return cls("athermality", h.space, hamiltonian=h, beta=beta,
                   constants=consts)

    @classmethod
    def coherence(cls, space, basis: np.ndarray | None = None) -> "ResourceMeasure":
        sp = CompositeSpace.of(space)
        d = sp.total_dim
        consts = HoelderConstants(K=2.0 * math.log(d), a=1.0, b=1.0,
                                  c_fn=_coherence_c, c_max=coherence_c_max())
        return cls("coherence", sp, basis=basis, constants=consts)

    @classmethod
    def qfi(cls, h: Observable) -> "ResourceMeasure":
        consts = HoelderConstants(K=32.0 * (spread(h) / 2.0) ** 2, a=2.0, b=0.5)
        return cls("qfi", h.space, hamiltonian=h, constants=consts)

    @classmethod
    def magic(cls, n_qubits: int) -> "ResourceMeasure":
        sp = CompositeSpace((2,) * n_qubits)
        consts = HoelderConstants(K=2.0, a=math.inf, b=1.0,
                                  a_prime=math.log(sp.total_dim))
        return cls("magic", sp, constants=consts)

    # -- evaluation

    def value(self, rho: State) -> float:
        if rho.dim != self.space.total_dim:
            raise SpaceMismatchError(
                f"{self.kind} measure on dim {self.space.total_dim}, "
                f"state has dim {rho.dim}")
        if self.kind == "energy":
            return expectation(rho, self.hamiltonian)
        if self.kind == "athermality":
            if self._gibbs is None:
                self._gibbs = gibbs_state(self.hamiltonian, self.beta)
            return rel_entropy(rho, self._gibbs) / self.beta
        if self.kind == "coherence":
            return max(0.0, vn_entropy(dephase(rho, self.basis)) - vn_entropy(rho))
        if self.kind == "qfi":
            return self._qfi(rho)
        return d_max_magic(rho, len(self.space.dims))

    def _qfi(self, rho: State) -> float:
        lam, v = np.linalg.eigh(rho.matrix)
        lam = np.maximum(lam, 0.0)
        hb = v.conj().T @ self.hamiltonian.matrix @ v
        num = (lam[:, None] - lam[None, :]) ** 2
        den = lam[:, None] + lam[None, :]
        mask = den > 1e-14
        out = 2.0 * np.sum(num[mask] / den[mask] * np.abs(hb[mask]) ** 2)
        return float(out)

    # -- free extension to larger spaces

    def extend(self, pre_dims=(), post_dims=()) -> "ResourceMeasure":
        """Same theory on (pre (x) self (x) post) where the added factors are
        free: zero Hamiltonian, computational free basis, qubit registers."""
        pre = tuple(int(d) for d in pre_dims)
        post = tuple(int(d) for d in post_dims)
        if not pre and not post:
            return self
        sp = CompositeSpace(pre + self.space.dims + post)
        d_pre = int(np.prod(pre)) if pre else 1
        d_post = int(np.prod(post)) if post else 1
        if self.kind in ("energy", "athermality", "qfi"):
            h = np.kron(np.kron(np.eye(d_pre), self.hamiltonian.matrix),
                        np.eye(d_post))
            hh = Observable(h, sp)
            if self.kind == "energy":
                m = ResourceMeasure("energy", sp, hamiltonian=hh,
                                    constants=self.constants)
                return m
            if self.kind == "athermality":
                consts = HoelderConstants(
                    K=spread(hh) + 2.0 * math.log(sp.total_dim) / self.beta,
                    a=1.0, b=1.0, c_fn=self.constants.c_fn,
                    c_max=self.constants.c_max)
                return ResourceMeasure("athermality", sp, hamiltonian=hh,
                                       beta=self.beta, constants=consts)
            consts = HoelderConstants(K=self.constants.K, a=2.0, b=0.5)
            return ResourceMeasure("qfi", sp, hamiltonian=hh, constants=consts)
        if self.kind == "coherence":
            basis = self.basis
            if basis is not None:
                basis = np.kron(np.kron(np.eye(d_pre), basis), np.eye(d_post))
            consts = HoelderConstants(K=2.0 * math.log(sp.total_dim), a=1.0,
                                      b=1.0, c_fn=_coherence_c,
                                      c_max=coherence_c_max())
            return ResourceMeasure("coherence", sp, basis=basis, constants=consts)
        # magic: added factors must be qubit registers
        for d in pre + post:
            if 2 ** int(round(math.log2(d))) != d:
                raise ValueError("magic extension requires power-of-two factors")
        n = int(round(math.log2(sp.total_dim)))
        return ResourceMeasure.magic(n)

    def for_space(self, space: CompositeSpace) -> "ResourceMeasure":
        """Measure for an arbitrary space: identity if it matches, a suffix
        extension if the space starts with this measure's factors, else the
        fully free measure of the same kind on that space."""
        if space.dims == self.space.dims:
            return self
        k = len(self.space.dims)
        if space.dims[:k] == self.space.dims:
            return self.extend(post_dims=space.dims[k:])
        return self.free_like(space)

    def free_like(self, space: CompositeSpace) -> "ResourceMeasure":
        """Fully free measure of the same kind on another space."""
        sp = CompositeSpace.of(space)
        zero = Observable(np.zeros((sp.total_dim, sp.total_dim)), sp)
        if self.kind == "energy":
            return ResourceMeasure("energy", sp, hamiltonian=zero,
                                   constants=HoelderConstants(0.0, 1.0, 1.0))
        if self.kind == "athermality":
            return ResourceMeasure.athermality(zero, self.beta)
        if self.kind == "coherence":
            return ResourceMeasure.coherence(sp)
        if self.kind == "qfi":
            return ResourceMeasure("qfi", sp, hamiltonian=zero,
                                   constants=HoelderConstants(0.0, 2.0, 0.5))
        n = int(round(math.log2(sp.total_dim)))
        if 2 ** n != sp.total_dim:
            raise ValueError("magic requires qubit spaces")
        return ResourceMeasure.magic(n)

    def descriptor(self) -> dict:
        c = self.constants
        a = "inf" if math.isinf(c.a) else c.a
        out = {"kind": self.kind,
               "constants": {"K": c.K, "a": a, "b": c.b,
                             "a_prime": c.a_prime, "c_max": c.c_max}}
        if self.hamiltonian is not None:
            out["hamiltonian"] = True
        if self.beta is not None:
            out["beta"] = self.beta
        return out


def measure_state(m: ResourceMeasure, rho: State) -> float:
    return m.value(rho)


# ---------------------------------------------------------------------------
# channel quantities

def output_measure(m: ResourceMeasure, lam: Channel) -> ResourceMeasure:
    """Measure instance for a channel's output space.

    Trailing register factors of the output are free; the remaining core
    reuses `m` when the factor shapes agree, otherwise falls back to a free
    measure of the same kind (classical outputs carry no Hamiltonian).
    """
    dims = lam.out_space.dims
    nr = min(lam.n_register_factors, len(dims))
    core = dims[:len(dims) - nr]
    if not core:
        return m.free_like(lam.out_space)
    base = m.for_space(CompositeSpace(core))
    if nr:
        return base.extend(post_dims=dims[len(dims) - nr:])
    return base


def channel_gain(m: ResourceMeasure, lam: Channel, rho: State,
                 out_measure: ResourceMeasure | None = None) -> float:
    """M(Lam(rho)) - M(rho)."""
    m_in = m.for_space(rho.space)
    m_out = out_measure or output_measure(m, lam)
    return m_out.value(apply(lam, rho)) - m_in.value(rho)


def _power_candidates(m_big: ResourceMeasure, d_tot: int, rng) -> list[np.ndarray]:
    cands = [np.eye(d_tot, dtype=complex) / d_tot]
    if m_big.kind == "athermality":
        cands.append(gibbs_state(m_big.hamiltonian, m_big.beta).matrix)
    for i in range(min(d_tot, 4)):
        cands.append(np.outer(basis_ket(d_tot, i), basis_ket(d_tot, i)))
    return cands


def channel_power(m: ResourceMeasure, lam: Channel,
                  opts: OptOptions | None = None) -> OptResult:
    """Heuristic lower estimate of the resource-increasing power
    sup_sigma [M(id_R (x) Lam(sigma)) - M(sigma)] with dim R = dim A."""
    opts = opts or OptOptions()
    d_a = lam.in_space.total_dim
    ref = CompositeSpace((d_a,))
    big = tensor_with_identity(lam, ref, "left")
    m_in = m.for_space(lam.in_space).extend(pre_dims=(d_a,))
    m_out = output_measure(m_in, big)
    d_tot = d_a * d_a

    def gain_of(mat: np.ndarray) -> float:
        rho = State(mat, big.in_space, validate=False)
        out = State(apply_raw(big, mat), big.out_space, validate=False)
        return m_out.value(out) - m_in.value(rho)

    rng = np.random.default_rng(opts.seed)
    best_val, best_mat = -math.inf, None
    for cand in _power_candidates(m_in, d_tot, rng):
        v = gain_of(cand)
        if v > best_val:
            best_val, best_mat = v, cand

    if m.kind == "magic":
        # SDP-backed objective: sample pure states instead of smooth ascent
        for _ in range(opts.restarts):
            psi = _pure_from_params(rng.standard_normal(2 * d_tot))
            mat = np.outer(psi, psi.conj())
            v = gain_of(mat)
            if v > best_val:
                best_val, best_mat = v, mat
    else:
        def neg_obj(x):
            psi = _pure_from_params(x)
            return -gain_of(np.outer(psi, psi.conj()))

        for _ in range(opts.restarts):
            x0 = rng.standard_normal(2 * d_tot)
            res = minimize(neg_obj, x0, method="L-BFGS-B",
                           options={"maxiter": opts.maxiter})
            if -res.fun > best_val:
                psi = _pure_from_params(res.x)
                best_val, best_mat = -res.fun, np.outer(psi, psi.conj())

    arg = State(best_mat, big.in_space, validate=False)
    return OptResult(float(best_val), arg, opts.restarts)


def _pure_vector(rho: State) -> np.ndarray:
    w, v = np.linalg.eigh(rho.matrix)
    if w[-1] < 1.0 - 1e-7:
        raise ValueError("state is not pure")
    return v[:, -1]


def _support_projector(rho: State) -> np.ndarray:
    w, v = np.linalg.eigh(rho.matrix)
    keep = w > 1e-9
    return v[:, keep] @ v[:, keep].conj().T


def m_em(m: ResourceMeasure, ens: TestEnsemble, reg: Register | None = None,
         opts: OptOptions | None = None, extra_states=()) -> OptResult:
    """Lower estimate of the maximal resource gain from a measurement channel
    that records which test state was given.

    The PVM is fixed to (support of rho1, orthocomplement). For a pure test
    pair the search family is rho(theta, r) = p psi1 + (1-p) psi2
    + r e^{i theta}|psi1><psi2| + h.c. with a refined theta grid; the r = 0
    point is the classical mixture and interior r values cover the thermal
    two-level candidates. Extra caller-supplied candidates are screened for
    the recording constraint and included.
    """
    reg = reg or Register()
    opts = opts or OptOptions()
    from .qcore import is_orthogonal
    if not is_orthogonal(ens.rho1, ens.rho2):
        raise ValueError("m_em requires an orthogonal test pair")
    d = ens.rho1.dim
    p1 = _support_projector(ens.rho1)
    pvm = two_valued_pvm(p1)
    lam_p = measurement_channel_pvm(pvm, reg)
    m_in = m.for_space(ens.rho1.space)
    m_out = output_measure(m_in, lam_p)
    p = ens.p

    def valid(mat: np.ndarray) -> bool:
        for q, rho, eff in zip(ens.priors, ens.states, pvm.effects):
            blk = eff @ mat @ eff
            if np.max(np.abs(blk - q * rho.matrix)) > 1e-9:
                return False
        return True

    def gain_of(mat: np.ndarray) -> float:
        rho = State(mat, ens.rho1.space, validate=False)
        return m_out.value(apply(lam_p, rho)) - m_in.value(rho)

    candidates: list[np.ndarray] = [p * ens.rho1.matrix + (1 - p) * ens.rho2.matrix]
    pure_pair = True
    try:
        v1 = _pure_vector(ens.rho1)
        v2 = _pure_vector(ens.rho2)
    except ValueError:
        pure_pair = False

    if m.kind == "athermality" and m.hamiltonian is not None:
        # Gibbs state compressed onto the test-pair support
        tau = gibbs_state(m.for_space(ens.rho1.space).hamiltonian, m.beta)
        pi = _support_projector(State(
            (ens.rho1.matrix + ens.rho2.matrix) / 2.0, ens.rho1.space,
            validate=False))
        blk = pi @ tau.matrix @ pi
        tr = float(np.real(np.trace(blk)))
        if tr > 1e-12:
            candidates.append(blk / tr)
    for extra in extra_states:
        candidates.append(extra.matrix if isinstance(extra, State) else
                          np.asarray(extra, dtype=complex))

    best_val, best_mat = -math.inf, None
    for cand in candidates:
        if valid(cand):
            v = gain_of(cand)
            if v > best_val:
                best_val, best_mat = v, cand

    if pure_pair:
        r_max = math.sqrt(p * (1 - p))
        base = p * np.outer(v1, v1.conj()) + (1 - p) * np.outer(v2, v2.conj())
        cross = np.outer(v1, v2.conj())

        def family(theta, r):
            off = r * np.exp(1j * theta) * cross
            return base + off + off.conj().T

        def best_theta(r, grid):
            vals = [(gain_of(family(t, r)), t) for t in grid]
            return max(vals)

        for r in np.linspace(0.0, r_max, 5)[1:]:
            lo, hi = 0.0, 2 * math.pi
            pts = 32
            val, th = best_theta(r, np.linspace(lo, hi, pts, endpoint=False))
            for _ in range(4):  # refine around the best angle
                width = (hi - lo) / pts
                grid = np.linspace(th - width, th + width, 17)
                val, th = best_theta(r, grid)
                lo, hi, pts = th - width, th + width, 17
            if val > best_val:
                best_val, best_mat = val, family(th, r)

    arg = None if best_mat is None else State(best_mat, ens.rho1.space,
                                              validate=False)
    return OptResult(float(best_val), arg, opts.restarts)


def m_cos(m: ResourceMeasure, image_ens: TestEnsemble,
          reg: Register | None = None, opts: OptOptions | None = None,
          kernel_samples: int = 64) -> OptResult:
    """Heuristic upper bound on the minimal power of a measurement channel
    that discriminates the image ensemble optimally.

    Evaluates the power of the measurement channel built from the closed-form
    optimal POVM; when that optimum is degenerate, zero modes are re-assigned
    between the two effects over a seeded sample and the smallest power wins.
    """
    reg = reg or Register()
    opts = opts or OptOptions()
    q1, q2 = image_ens.priors
    gamma = q1 * image_ens.rho1.matrix - q2 * image_ens.rho2.matrix
    w, v = np.linalg.eigh(gamma)
    pos = w > TOL.psd
    kern = np.abs(w) <= TOL.psd
    d = image_ens.rho1.dim
    p_pos = v[:, pos] @ v[:, pos].conj().T if np.any(pos) else \
        np.zeros((d, d), dtype=complex)

    def power_of(eff1: np.ndarray) -> float:
        povm = Povm([eff1, np.eye(d) - eff1])
        lam_q = measurement_channel_povm(povm, reg)
        return channel_power(m, lam_q, opts).value

    best = power_of(p_pos)
    k = int(np.sum(kern))
    if k > 0:
        rng = np.random.default_rng(opts.seed)
        wk = v[:, kern]
        for _ in range(kernel_samples):
            z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
            u, _r = np.linalg.qr(z)
            bits = rng.integers(0, 2, size=k)
            if not np.any(bits):
                continue
            sub = (u * bits) @ u.conj().T
            cand = power_of(p_pos + wk @ sub @ wk.conj().T)
            if cand < best:
                best = cand
    return OptResult(float(best), None, opts.restarts)


def c_quantity(lam: Channel, ens: TestEnsemble, h: Observable,
               h_prime: Observable) -> float:
    """|<psi2| H - Lam^dag(H') |psi1>| for a pure orthogonal test pair."""
    v1 = _pure_vector(ens.rho1)
    v2 = _pure_vector(ens.rho2)
    if abs(np.vdot(v1, v2)) > TOL.orth:
        raise ValueError("c_quantity requires an orthogonal pure pair")
    op = h.matrix - adjoint_apply(lam, h_prime)
    return float(abs(v2.conj() @ op @ v1))


def m_colon(m: ResourceMeasure, rho: State, lam: Channel, lam_p: Channel,
            reg: Register | None = None) -> float:
    """|M_rho(Lam) + M_rho(Lam_P) - M_rho((Lam (x) id_K) o Lam_P)|_+.

    Only meaningful for measures additive across non-interacting systems;
    restricted to the energy measure.
    """
    if m.kind != "energy":
        raise ValueError("m_colon requires the energy measure")
    reg = reg or Register()
    m_in = m.for_space(rho.space)
    g1 = channel_gain(m, lam, rho)
    g2 = channel_gain(m, lam_p, rho)
    mid = apply(lam_p, rho)
    joint_out = apply(tensor_with_identity(lam, (2,), "right"), mid)
    m_joint = output_measure(m, lam).extend(post_dims=(2,))
    g12 = m_joint.value(joint_out) - m_in.value(rho)
    return max(0.0, g1 + g2 - g12)
