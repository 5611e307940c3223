"""Truncated Fock spaces, ladder operators, and standard oscillator states.

All operators are stored sparse (CSR); states are plain numpy arrays wrapped
with their space so that mode bookkeeping survives tensor products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse


class TruncationError(ValueError):
    """Requested state does not fit in the truncated space."""


def truncation_guard_dim(beta_abs: float) -> int:
    """Smallest dimension considered safe for a state of amplitude |beta|.

    Mean occupancy plus six standard deviations of the coherent-state
    number distribution.
    """
    n = abs(beta_abs) ** 2
    return int(math.ceil(n + 6.0 * math.sqrt(n + 1.0)))


@dataclass(frozen=True)
class FockSpace:
    dims: tuple
    names: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        names = tuple(str(n) for n in self.names)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "names", names)
        if len(dims) != len(names):
            raise ValueError("dims and names must have equal length")
        if len(set(names)) != len(names):
            raise ValueError("mode names must be unique")
        if any(d < 1 for d in dims):
            raise ValueError("every mode needs dimension >= 1")

    @property
    def size(self) -> int:
        return int(np.prod(self.dims))

    def index(self, mode: str) -> int:
        try:
            return self.names.index(mode)
        except ValueError:
            raise KeyError(f"unknown mode {mode!r}; have {self.names}") from None


def _as_space(space_or_dim, name="mech") -> FockSpace:
    if isinstance(space_or_dim, FockSpace):
        return space_or_dim
    return FockSpace((int(space_or_dim),), (name,))


def _single_mode(space: FockSpace) -> str:
    if len(space.dims) != 1:
        raise ValueError("operation requires a single-mode space")
    return space.names[0]


class Operator:
    """Sparse operator on a FockSpace. Supports +, -, scalar *, @, dag()."""

    __slots__ = ("space", "matrix")

    def __init__(self, space: FockSpace, matrix):
        self.space = space
        self.matrix = sparse.csr_matrix(matrix, dtype=complex)
        if self.matrix.shape != (space.size, space.size):
            raise ValueError("matrix shape does not match space size")

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T.tocsr())

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def _check(self, other):
        if self.space != other.space:
            raise ValueError("operators live on different spaces")

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.matrix @ other.matrix)

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.space, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.matrix)


def ladder(space: FockSpace, mode: str) -> Operator:
    """Annihilation operator of the named mode, identity on the others."""
    k = space.index(mode)
    mats = []
    for i, d in enumerate(space.dims):
        if i == k:
            mats.append(sparse.diags(np.sqrt(np.arange(1, d)), 1, format="csr"))
        else:
            mats.append(sparse.identity(d, format="csr"))
    m = mats[0]
    for factor in mats[1:]:
        m = sparse.kron(m, factor, format="csr")
    return Operator(space, m.astype(complex))


@dataclass(frozen=True)
class StateVector:
    space: FockSpace
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.size,):
            raise ValueError("amplitude vector does not match space size")
        object.__setattr__(self, "amplitudes", amps)


@dataclass(frozen=True)
class CatSpec:
    beta: float
    parity: str  # "even" | "odd"

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise ValueError("parity must be 'even' or 'odd'")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")


class DensityMatrix:
    __slots__ = ("space", "elements")

    def __init__(self, space: FockSpace, elements):
        self.space = space
        self.elements = np.asarray(elements, dtype=complex)
        if self.elements.shape != (space.size, space.size):
            raise ValueError("density matrix shape does not match space size")

    @classmethod
    def from_pure(cls, psi: StateVector) -> "DensityMatrix":
        return cls(psi.space, np.outer(psi.amplitudes, psi.amplitudes.conj()))

    def trace(self) -> complex:
        return complex(np.trace(self.elements))

    def expectation(self, op: Operator) -> complex:
        if op.space != self.space:
            raise ValueError("operator space does not match state space")
        # tr(rho A) = sum_ij A_ij rho_ji, cheap on the sparse pattern of A
        return complex(op.matrix.multiply(self.elements.T).sum())

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.space, self.elements.copy())


def _coherent_amplitudes(dim: int, beta: complex) -> np.ndarray:
    amps = np.zeros(dim, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(beta) ** 2)
    for n in range(1, dim):
        amps[n] = amps[n - 1] * beta / math.sqrt(n)
    return amps


def coherent_state(space_or_dim, beta) -> StateVector:
    space = _as_space(space_or_dim)
    _single_mode(space)
    dim = space.dims[0]
    beta = complex(beta)
    guard = truncation_guard_dim(abs(beta))
    if dim < guard:
        raise TruncationError(
            f"dim {dim} too small for |beta| = {abs(beta):.3g} (need >= {guard})"
        )
    amps = _coherent_amplitudes(dim, beta)
    amps /= np.linalg.norm(amps)
    return StateVector(space, amps)


def cat_state(space_or_dim, spec: CatSpec) -> StateVector:
    """Even/odd superposition of coherent states at +/-beta."""
    space = _as_space(space_or_dim)
    _single_mode(space)
    if spec.parity == "odd" and spec.beta == 0:
        raise ValueError("odd cat is degenerate at beta = 0")
    dim = space.dims[0]
    guard = truncation_guard_dim(spec.beta)
    if dim < guard:
        raise TruncationError(
            f"dim {dim} too small for beta = {spec.beta:.3g} (need >= {guard})"
        )
    plus = _coherent_amplitudes(dim, spec.beta)
    sign = 1.0 if spec.parity == "even" else -1.0
    minus = plus * ((-1.0) ** np.arange(dim))  # (-1)^n flips the sign of beta
    amps = plus + sign * minus
    amps /= np.linalg.norm(amps)
    return StateVector(space, amps)


def thermal_state(space_or_dim, nbar: float) -> DensityMatrix:
    """Truncated thermal (geometric) state, renormalized to unit trace."""
    space = _as_space(space_or_dim)
    _single_mode(space)
    if nbar < 0:
        raise ValueError("nbar must be non-negative")
    dim = space.dims[0]
    if nbar == 0:
        probs = np.zeros(dim)
        probs[0] = 1.0
    else:
        q = nbar / (nbar + 1.0)
        probs = q ** np.arange(dim)
        probs /= probs.sum()
    return DensityMatrix(space, np.diag(probs).astype(complex))


def fock_probabilities(state, mode: str = None) -> np.ndarray:
    """Diagonal of the number distribution for one mode."""
    if isinstance(state, StateVector):
        rho_diag = np.abs(state.amplitudes) ** 2
        space = state.space
    else:
        rho_diag = np.diag(state.elements).real
        space = state.space
    if len(space.dims) == 1:
        return np.asarray(rho_diag, dtype=float)
    if mode is None:
        raise ValueError("mode required for a multi-mode state")
    k = space.index(mode)
    grid = rho_diag.reshape(space.dims)
    axes = tuple(i for i in range(len(space.dims)) if i != k)
    return np.asarray(grid.sum(axis=axes), dtype=float)


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Trace out every mode except `keep`."""
    space = rho.space
    if len(space.dims) < 2:
        raise ValueError("partial trace needs at least two modes")
    k = space.index(keep)
    dims = space.dims
    n = len(dims)
    t = rho.elements.reshape(dims + dims)
    # contract bra/ket index pairs of every other mode, highest axis first
    for i in reversed([j for j in range(n) if j != k]):
        t = np.trace(t, axis1=i, axis2=i + t.ndim // 2)
    d = dims[k]
    return DensityMatrix(FockSpace((d,), (keep,)), t.reshape(d, d))


def parity_expectation(state, mode: str = None) -> float:
    """Expectation of (-1)^n in the given (or only) mode."""
    if isinstance(state, StateVector):
        state = DensityMatrix.from_pure(state)
    if len(state.space.dims) > 1:
        probs = fock_probabilities(state, mode)  # raises if mode is None
    else:
        probs = np.diag(state.elements).real
    signs = (-1.0) ** np.arange(probs.size)
    return float(np.dot(signs, probs))


def fidelity(rho: DensityMatrix, target) -> float:
    """Fidelity of rho against a target state.

    Pure targets use <psi|rho|psi>; a multi-mode rho is first reduced to the
    target's mode. Mixed targets use the Uhlmann formula.
    """
    if isinstance(target, StateVector):
        red = rho
        if len(rho.space.dims) > 1:
            red = partial_trace(rho, target.space.names[0])
        amps = target.amplitudes
        da, dr = amps.size, red.elements.shape[0]
        if da != dr:
            d = max(da, dr)
            a = np.zeros(d, complex)
            a[:da] = amps
            m = np.zeros((d, d), complex)
            m[:dr, :dr] = red.elements
            return float(np.real(np.vdot(a, m @ a)))
        return float(np.real(np.vdot(amps, red.elements @ amps)))
    if isinstance(target, DensityMatrix):
        from scipy.linalg import sqrtm

        red = rho
        if len(rho.space.dims) > 1:
            red = partial_trace(rho, target.space.names[0])
        s = sqrtm(red.elements)
        inner = sqrtm(s @ target.elements @ s)
        return float(np.real(np.trace(inner)) ** 2)
    raise TypeError("target must be a StateVector or DensityMatrix")
