"""Dense operator numerics: tensor structure, metrics, entropies, matrix functions.

Everything here works on explicit complex matrices over composite
finite-dimensional spaces (total dimension <= 64 by design). All entropic
quantities are in nats; use :func:`nats_to_bits` to convert.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances; the defaults are used throughout unless overridden."""

    herm: float = 1e-9
    trace: float = 1e-9
    psd: float = 1e-10
    supp: float = 1e-12
    cptp: float = 1e-9
    orth: float = 1e-9


TOL = Tolerances()


class SpaceMismatchError(ValueError):
    """Operands live on incompatible spaces."""


@dataclass(frozen=True)
class CompositeSpace:
    """Ordered tensor factorization of a finite-dimensional Hilbert space."""

    dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError(f"invalid factor dimensions {self.dims}")

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def __mul__(self, other: "CompositeSpace") -> "CompositeSpace":
        return CompositeSpace(self.dims + other.dims)

    @staticmethod
    def of(dims) -> "CompositeSpace":
        if isinstance(dims, CompositeSpace):
            return dims
        if isinstance(dims, int):
            return CompositeSpace((dims,))
        return CompositeSpace(tuple(dims))


def _as_matrix(x, name: str) -> np.ndarray:
    m = np.asarray(x, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    return m


def is_hermitian(m: np.ndarray, tol: float = TOL.herm) -> bool:
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


class State:
    """Density operator with composite-system factor structure."""

    __slots__ = ("space", "matrix")

    def __init__(self, matrix, space=None, tol: Tolerances = TOL, validate: bool = True):
        m = _as_matrix(matrix, "state")
        sp = CompositeSpace.of(space if space is not None else m.shape[0])
        if sp.total_dim != m.shape[0]:
            raise SpaceMismatchError(
                f"matrix dim {m.shape[0]} != space dim {sp.total_dim}"
            )
        if validate:
            if not is_hermitian(m, tol.herm):
                raise ValueError("state matrix is not Hermitian")
            if abs(np.trace(m).real - 1.0) > tol.trace or abs(np.trace(m).imag) > tol.trace:
                raise ValueError(f"state trace {np.trace(m)} != 1")
            w = np.linalg.eigvalsh(m)
            if w[0] < -tol.psd:
                raise ValueError(f"state has negative eigenvalue {w[0]}")
        self.space = sp
        self.matrix = m

    @classmethod
    def from_vector(cls, vec, space=None) -> "State":
        v = np.asarray(vec, dtype=complex).ravel()
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("zero vector")
        v = v / n
        return cls(np.outer(v, v.conj()), space if space is not None else len(v))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"State(dims={self.space.dims})"


class Observable:
    """Hermitian operator with a cached eigendecomposition."""

    __slots__ = ("space", "matrix", "_eig")

    def __init__(self, matrix, space=None, tol: Tolerances = TOL):
        m = _as_matrix(matrix, "observable")
        sp = CompositeSpace.of(space if space is not None else m.shape[0])
        if sp.total_dim != m.shape[0]:
            raise SpaceMismatchError(
                f"matrix dim {m.shape[0]} != space dim {sp.total_dim}"
            )
        if not is_hermitian(m, tol.herm):
            raise ValueError("observable is not Hermitian")
        self.space = sp
        self.matrix = m
        self._eig = None

    def eig(self):
        """(eigenvalues ascending, eigenvector columns), cached."""
        if self._eig is None:
            self._eig = np.linalg.eigh(self.matrix)
        return self._eig

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self):
        return f"Observable(dims={self.space.dims})"


def _mat(x) -> np.ndarray:
    return x.matrix if isinstance(x, (State, Observable)) else np.asarray(x, dtype=complex)


def tensor(a, b):
    """Kronecker product keeping the kind (State/Observable) and factor order."""
    m = np.kron(_mat(a), _mat(b))
    if isinstance(a, State) and isinstance(b, State):
        return State(m, a.space * b.space)
    if isinstance(a, Observable) and isinstance(b, Observable):
        return Observable(m, a.space * b.space)
    return m


def ptrace_raw(m: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace of a raw matrix over the factors not in `keep`."""
    dims = tuple(dims)
    keep = sorted(set(keep))
    n = len(dims)
    if not keep or any(k < 0 or k >= n for k in keep):
        raise ValueError(f"invalid keep set {keep} for {n} factors")
    t = m.reshape(dims + dims)
    drop = [i for i in range(n) if i not in keep]
    for offset, i in enumerate(drop):
        ax = i - offset
        t = np.trace(t, axis1=ax, axis2=ax + (n - offset))
    d = int(np.prod([dims[i] for i in keep]))
    return t.reshape(d, d)


def partial_trace(x: State, keep) -> State:
    keep = sorted(set(keep))
    red = ptrace_raw(x.matrix, x.space.dims, keep)
    return State(red, CompositeSpace(tuple(x.space.dims[i] for i in keep)))


def permute_factors(m: np.ndarray, dims, perm) -> np.ndarray:
    """Reorder tensor factors of a matrix: new factor i is old factor perm[i]."""
    dims = tuple(dims)
    n = len(dims)
    perm = list(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"invalid permutation {perm}")
    t = m.reshape(dims + dims)
    t = t.transpose(perm + [n + p for p in perm])
    d = int(np.prod(dims))
    return t.reshape(d, d)


def herm_eig_clamped(m: np.ndarray, tol: float = TOL.psd):
    """Eigendecomposition with eigenvalues clamped at tol from below."""
    w, v = np.linalg.eigh(m)
    return np.maximum(w, tol), v


def psd_sqrt(m: np.ndarray, tol: float = TOL.psd) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    # zero out numerical-rank junk: sqrt(1e-16) = 1e-8 would otherwise leak
    # into fidelities of rank-deficient states
    cut = len(w) * np.finfo(float).eps * max(float(w[-1]), 0.0)
    w = np.sqrt(np.where(w > cut, w, 0.0))
    return (v * w) @ v.conj().T


def trace_norm(x) -> float:
    """Sum of singular values, unhalved."""
    m = _mat(x)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def fidelity(rho: State, sigma: State) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)), via ||sqrt(rho) sqrt(sigma)||_1."""
    if rho.dim != sigma.dim:
        raise SpaceMismatchError("fidelity: dimension mismatch")
    f = trace_norm(psd_sqrt(rho.matrix) @ psd_sqrt(sigma.matrix))
    return float(min(1.0, max(0.0, f)))


def is_orthogonal(rho: State, sigma: State, tol: float = TOL.orth) -> bool:
    """Support orthogonality via Tr[rho sigma] (more robust than fidelity
    for rank-deficient states)."""
    return float(np.real(np.trace(rho.matrix @ sigma.matrix))) <= tol


def purified_distance(rho: State, sigma: State) -> float:
    f = fidelity(rho, sigma)
    return math.sqrt(max(0.0, 1.0 - f * f))


def vn_entropy(rho: State) -> float:
    """von Neumann entropy in nats; 0 log 0 := 0."""
    w = np.linalg.eigvalsh(rho.matrix)
    w = w[w > 0.0]
    return float(-np.sum(w * np.log(w)))


def rel_entropy(rho: State, sigma: State, tol_supp: float = TOL.supp) -> float:
    """Relative entropy D(rho||sigma) in nats; +inf outside sigma's support."""
    if rho.dim != sigma.dim:
        raise SpaceMismatchError("rel_entropy: dimension mismatch")
    ws, vs = np.linalg.eigh(sigma.matrix)
    outside = ws <= tol_supp
    if np.any(outside):
        proj = vs[:, outside]
        leak = float(np.real(np.einsum("ij,ik,kj->", proj.conj(), rho.matrix, proj)))
        if leak > tol_supp:
            return math.inf
    wr = np.linalg.eigvalsh(rho.matrix)
    wr = wr[wr > 0.0]
    tr_rho_log_rho = float(np.sum(wr * np.log(wr)))
    inside = ~outside
    diag = np.real(np.einsum("ij,ik,kj->j", vs.conj(), rho.matrix, vs))
    tr_rho_log_sigma = float(np.sum(diag[inside] * np.log(ws[inside])))
    return tr_rho_log_rho - tr_rho_log_sigma


def binary_entropy(x: float) -> float:
    """h(x) = -x log x - (1-x) log(1-x), in nats."""
    if x < -1e-12 or x > 1 + 1e-12:
        raise ValueError(f"binary_entropy argument {x} outside [0,1]")
    x = min(1.0, max(0.0, x))
    out = 0.0
    if x > 0.0:
        out -= x * math.log(x)
    if x < 1.0:
        out -= (1.0 - x) * math.log(1.0 - x)
    return out


def spread(x) -> float:
    """Difference between the largest and smallest eigenvalue."""
    if isinstance(x, Observable):
        w = x.eig()[0]
    else:
        w = np.linalg.eigvalsh(_mat(x))
    return float(w[-1] - w[0])


def expectation(rho: State, x) -> float:
    return float(np.real(np.trace(rho.matrix @ _mat(x))))


def variance(rho: State, x) -> float:
    m = _mat(x)
    e = expectation(rho, m)
    e2 = float(np.real(np.trace(rho.matrix @ m @ m)))
    return max(0.0, e2 - e * e)


def nats_to_bits(x: float) -> float:
    return x / LN2


def bits_to_nats(x: float) -> float:
    return x * LN2


def basis_ket(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).ravel()
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())
