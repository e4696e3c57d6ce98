"""Dense operator algebra on small tensor-product Hilbert spaces.

Conventions used by every module in this package:

* basis order is row-major over the layout factors, with qubit factors
  first and the Fock factor last, so the Fock index is innermost;
* the qubit basis order is ``(g, e)`` and ``sigma_z |e> = +|e>``;
* everything is dense ``complex128``.  Total dimensions stay around 100
  (the largest model is three qubits and one truncated mode), so sparse
  storage or iterative solvers would be pointless complexity.

All constructors return immutable values that are safe to share between
threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpaceLayout",
    "Operator",
    "EigenDecomposition",
    "kron",
    "annihilation",
    "pauli",
    "identity",
    "embed",
    "hermitian_eig",
    "expect",
    "basis_vector",
    "partial_trace",
]

# Absolute floor used when checking Hermiticity of matrices built here.
HERMITIAN_ATOL = 1e-10


def _frozen_array(data, shape_check=None) -> np.ndarray:
    arr = np.array(data, dtype=np.complex128, order="C")
    if shape_check is not None and arr.shape != shape_check:
        raise ValueError(f"expected shape {shape_check}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpaceLayout:
    """Ordered subsystem dimensions of a tensor-product space."""

    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(f) for f in self.factors)
        if not factors:
            raise ValueError("layout needs at least one factor")
        if any(f < 2 for f in factors):
            raise ValueError(f"every factor dimension must be >= 2, got {factors}")
        object.__setattr__(self, "factors", factors)

    @property
    def total_dim(self) -> int:
        out = 1
        for f in self.factors:
            out *= f
        return out

    def basis_index(self, *indices: int) -> int:
        """Flat index of the bare product state with the given per-factor indices.

        Row-major: the last factor (Fock, by convention) is innermost.
        """
        if len(indices) != len(self.factors):
            raise ValueError(
                f"need {len(self.factors)} indices for layout {self.factors}, "
                f"got {len(indices)}"
            )
        flat = 0
        for idx, dim in zip(indices, self.factors):
            if not 0 <= idx < dim:
                raise ValueError(f"index {idx} out of range for factor of dim {dim}")
            flat = flat * dim + idx
        return flat

    def concat(self, other: "SpaceLayout") -> "SpaceLayout":
        return SpaceLayout(self.factors + other.factors)


@dataclass(frozen=True)
class Operator:
    """A dense square matrix tagged with the space layout it acts on."""

    layout: SpaceLayout
    data: np.ndarray

    def __post_init__(self):
        dim = self.layout.total_dim
        object.__setattr__(self, "data", _frozen_array(self.data, (dim, dim)))

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def dag(self) -> "Operator":
        return Operator(self.layout, self.data.conj().T)

    def is_hermitian(self, atol: float = HERMITIAN_ATOL) -> bool:
        return bool(np.max(np.abs(self.data - self.data.conj().T)) <= atol)

    def __matmul__(self, other):
        if isinstance(other, Operator):
            if other.layout != self.layout:
                raise ValueError("layout mismatch in operator product")
            return Operator(self.layout, self.data @ other.data)
        return self.data @ other

    def __add__(self, other):
        if isinstance(other, Operator):
            if other.layout != self.layout:
                raise ValueError("layout mismatch in operator sum")
            return Operator(self.layout, self.data + other.data)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Operator):
            if other.layout != self.layout:
                raise ValueError("layout mismatch in operator difference")
            return Operator(self.layout, self.data - other.data)
        return NotImplemented

    def __mul__(self, scalar):
        if np.isscalar(scalar):
            return Operator(self.layout, self.data * scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return Operator(self.layout, -self.data)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (real, ascending) and orthonormal column eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(
            self, "vectors", _frozen_array(self.vectors, (values.size, values.size))
        )

    @property
    def dim(self) -> int:
        return self.values.size

    def transition_frequencies(self) -> np.ndarray:
        """Frequencies of every level relative to the ground level."""
        return self.values - self.values[0]


def kron(a: Operator, b: Operator) -> Operator:
    """Kronecker product; the result layout is a's factors followed by b's."""
    return Operator(a.layout.concat(b.layout), np.kron(a.data, b.data))


def annihilation(n_max: int) -> Operator:
    """Bosonic annihilation operator on a Fock space truncated at ``n_max`` photons.

    The matrix is (n_max+1)-dimensional with entries sqrt(k) at (k-1, k).
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    dim = n_max + 1
    data = np.zeros((dim, dim), dtype=np.complex128)
    ks = np.arange(1, dim)
    data[ks - 1, ks] = np.sqrt(ks)
    return Operator(SpaceLayout((dim,)), data)


_PAULI = {
    # Qubit basis order (g, e); sigma_z|e> = +|e>.
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=np.complex128),
    "z": np.array([[-1, 0], [0, 1]], dtype=np.complex128),
    "plus": np.array([[0, 0], [1, 0]], dtype=np.complex128),  # raising: |g> -> |e>
    "minus": np.array([[0, 1], [0, 0]], dtype=np.complex128),  # lowering: |e> -> |g>
}


def pauli(axis: str) -> Operator:
    """Pauli/ladder operator on a single qubit, basis order (g, e)."""
    try:
        data = _PAULI[axis]
    except KeyError:
        raise ValueError(f"unknown axis {axis!r}; use x, y, z, plus or minus") from None
    return Operator(SpaceLayout((2,)), data)


def identity(layout: SpaceLayout | int) -> Operator:
    if isinstance(layout, int):
        layout = SpaceLayout((layout,))
    return Operator(layout, np.eye(layout.total_dim, dtype=np.complex128))


def embed(op: Operator, slot: int, layout: SpaceLayout) -> Operator:
    """Lift a single-factor operator into ``layout``, identity on every other slot."""
    factors = layout.factors
    if not 0 <= slot < len(factors):
        raise ValueError(f"slot {slot} out of range for layout {factors}")
    if op.dim != factors[slot]:
        raise ValueError(
            f"operator dim {op.dim} does not match layout factor "
            f"{factors[slot]} at slot {slot}"
        )
    left = np.eye(int(np.prod(factors[:slot], dtype=np.int64)), dtype=np.complex128)
    right = np.eye(int(np.prod(factors[slot + 1:], dtype=np.int64)), dtype=np.complex128)
    return Operator(layout, np.kron(np.kron(left, op.data), right))


def hermitian_eig(h: Operator | np.ndarray, atol: float = HERMITIAN_ATOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian operator with a fixed phase convention.

    Eigenvalues come out ascending.  Each eigenvector is rotated by a global
    phase so that its component of largest magnitude (first such index on
    ties) is real and positive; this pins dressed-state matrix elements
    across runs and platforms.  Degenerate eigenvalues keep the solver
    order, so mixing inside a degenerate subspace is arbitrary -- every
    physical observable is invariant under it.
    """
    mat = h.data if isinstance(h, Operator) else np.asarray(h, dtype=np.complex128)
    scale = max(1.0, float(np.max(np.abs(mat))))
    defect = float(np.max(np.abs(mat - mat.conj().T)))
    if defect > atol * scale:
        raise ValueError(f"matrix is not Hermitian: max |H - H^dag| = {defect:.3e}")
    values, vectors = np.linalg.eigh(mat)
    vectors = np.array(vectors, order="F")
    for j in range(values.size):
        col = vectors[:, j]
        pivot = int(np.argmax(np.abs(col)))
        piv = col[pivot]
        if piv != 0:
            vectors[:, j] = col * (piv.conjugate() / abs(piv))
    return EigenDecomposition(values, vectors)


def expect(op: Operator | np.ndarray, state: np.ndarray) -> complex:
    """Expectation value ``<psi|op|psi>`` or ``Tr(op rho)``.

    ``state`` is a pure-state vector (1d) or a density matrix (2d).
    """
    mat = op.data if isinstance(op, Operator) else np.asarray(op)
    state = np.asarray(state)
    if state.ndim == 1:
        if state.shape[0] != mat.shape[0]:
            raise ValueError("state dimension does not match operator")
        return complex(np.vdot(state, mat @ state))
    if state.ndim == 2:
        if state.shape != mat.shape:
            raise ValueError("density matrix shape does not match operator")
        # Tr(op @ rho) without forming the product.
        return complex(np.sum(mat.T * state))
    raise ValueError("state must be a vector or a square matrix")


def basis_vector(layout: SpaceLayout, *indices: int) -> np.ndarray:
    """Bare product basis state as a dense vector."""
    vec = np.zeros(layout.total_dim, dtype=np.complex128)
    vec[layout.basis_index(*indices)] = 1.0
    return vec


def partial_trace(rho: np.ndarray, layout: SpaceLayout, keep: int) -> np.ndarray:
    """Reduced density matrix of the factor at index ``keep``."""
    factors = layout.factors
    if not 0 <= keep < len(factors):
        raise ValueError(f"keep={keep} out of range for layout {factors}")
    n = len(factors)
    rho = np.asarray(rho).reshape(factors * 2)
    traced = list(range(n))
    traced.remove(keep)
    for ax in reversed(traced):
        rho = np.trace(rho, axis1=ax, axis2=ax + rho.ndim // 2)
    return rho
