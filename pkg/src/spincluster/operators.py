"""Dense spin operators on small clusters.

Conventions used throughout the package:

* A register of ``n`` spin-1/2 sites lives in a ``2**n`` dimensional space.
  Site 0 is the leftmost tensor factor; basis index ``b`` stores the state
  of site ``k`` in bit ``k`` counted from the most significant of ``n``
  bits.  Bit value 0 means "up" (+1/2 of ``S_z``), 1 means "down".
  Example (n = 3): ``|up,down,down>`` is basis index 3.
* hbar = 1.  All operators are dense complex ``numpy`` arrays.
* Eigenvector phase: the first component of largest magnitude is made real
  and positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, NumericalCheckError

HERMITICITY_ATOL = 1e-10
DEGENERACY_GTOL = 1e-9

_UP, _DOWN = "u", "d"


class VectorOperator(NamedTuple):
    """Cartesian triple of operators transforming as a vector."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def dot(self, other: "VectorOperator") -> np.ndarray:
        return self.x @ other.x + self.y @ other.y + self.z @ other.z

    def __add__(self, other):
        return VectorOperator(self.x + other.x, self.y + other.y, self.z + other.z)


@dataclass(frozen=True)
class SpinRegister:
    """A chain of ``n_sites`` spin-1/2 degrees of freedom."""

    n_sites: int

    def __post_init__(self):
        if not 2 <= self.n_sites <= 4:
            raise ConfigError(f"n_sites must be in 2..4, got {self.n_sites}")

    @property
    def dim(self) -> int:
        return 2 ** self.n_sites


def spin_matrices(s: float = 0.5) -> VectorOperator:
    """Single-particle spin matrices for spin ``s`` (basis ordered m = s..-s)."""
    dim = int(round(2 * s)) + 1
    m = s - np.arange(dim)
    raise_amp = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    sp = np.zeros((dim, dim), dtype=complex)
    sp[np.arange(dim - 1), np.arange(1, dim)] = raise_amp
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    sz = np.diag(m).astype(complex)
    return VectorOperator(sx, sy, sz)


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def embed(register: SpinRegister, site: int, op: np.ndarray) -> np.ndarray:
    """Lift a single-site operator to the full register by Kronecker products."""
    if not 0 <= site < register.n_sites:
        raise ConfigError(f"site {site} out of range for {register.n_sites} sites")
    out = np.ones((1, 1), dtype=complex)
    for k in range(register.n_sites):
        out = np.kron(out, op if k == site else identity(2))
    return out


def site_spin(register: SpinRegister, site: int) -> VectorOperator:
    """Spin vector (Sx, Sy, Sz) of one site embedded in the register."""
    single = spin_matrices(0.5)
    return VectorOperator(*(embed(register, site, c) for c in single))


def total_spin(register: SpinRegister) -> VectorOperator:
    """Sum of the site spin vectors."""
    parts = [site_spin(register, k) for k in range(register.n_sites)]
    tot = parts[0]
    for p in parts[1:]:
        tot = tot + p
    return tot


def casimir(register: SpinRegister) -> np.ndarray:
    """Total-spin Casimir S.S of the register."""
    s = total_spin(register)
    return s.dot(s)


def spin_dot(a: VectorOperator, b: VectorOperator) -> np.ndarray:
    """Scalar product a.b of two vector operators."""
    return a.dot(b)


def cross_component(a: VectorOperator, b: VectorOperator, axis: int) -> np.ndarray:
    """Component ``axis`` (0,1,2 for x,y,z) of the operator cross product a x b."""
    i, j = (axis + 1) % 3, (axis + 2) % 3
    return a[i] @ b[j] - a[j] @ b[i]


def cross(a: VectorOperator, b: VectorOperator) -> VectorOperator:
    return VectorOperator(*(cross_component(a, b, ax) for ax in range(3)))


def scalar_triple(a: VectorOperator, b: VectorOperator, c: VectorOperator) -> np.ndarray:
    """Scalar triple product a.(b x c)."""
    return a.dot(cross(b, c))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def basis_index(pattern: str) -> int:
    """Basis index of a product state given as a string of 'u'/'d' characters."""
    idx = 0
    for ch in pattern:
        if ch not in (_UP, _DOWN):
            raise ConfigError(f"pattern characters must be 'u' or 'd', got {ch!r}")
        idx = (idx << 1) | (ch == _DOWN)
    return idx


def product_state(register: SpinRegister, pattern: str) -> np.ndarray:
    """Unit vector of the product state described by ``pattern``."""
    if len(pattern) != register.n_sites:
        raise ConfigError(
            f"pattern length {len(pattern)} != register size {register.n_sites}"
        )
    vec = np.zeros(register.dim, dtype=complex)
    vec[basis_index(pattern)] = 1.0
    return vec


def superposition(register: SpinRegister, terms: dict, normalize: bool = True) -> np.ndarray:
    """Linear combination of product states, ``terms`` maps pattern -> coefficient."""
    vec = np.zeros(register.dim, dtype=complex)
    for pattern, coeff in terms.items():
        vec += coeff * product_state(register, pattern)
    if normalize:
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ConfigError("cannot normalize the zero vector")
        vec = vec / norm
    return vec


def fix_phase(vec: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first largest-magnitude entry is real positive."""
    idx = int(np.argmax(np.abs(vec)))
    pivot = vec[idx]
    if np.abs(pivot) == 0:
        return vec
    return vec * (pivot.conjugate() / np.abs(pivot))


@dataclass
class Spectrum:
    """Eigendecomposition of a Hermitian operator.

    ``eigenvalues`` ascend; ``eigenvectors[:, i]`` belongs to ``eigenvalues[i]``
    and carries the package phase convention.  ``groups`` lists index runs
    whose eigenvalues agree within the grouping tolerance.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    groups: list = field(default_factory=list)

    def multiplicities(self) -> list:
        return [(float(np.mean(self.eigenvalues[g])), len(g)) for g in self.groups]


def hermitian_eig(matrix: np.ndarray, gtol: float = DEGENERACY_GTOL) -> Spectrum:
    """Diagonalize a Hermitian matrix and group (near-)degenerate levels.

    Raises NumericalCheckError when the input fails Hermiticity by more than
    the module tolerance; the message reports the largest asymmetry.
    """
    asym = np.max(np.abs(matrix - matrix.conj().T))
    if asym > HERMITICITY_ATOL:
        raise NumericalCheckError(
            f"matrix is not Hermitian: max |M - M^dag| = {asym:.3e}"
        )
    vals, vecs = np.linalg.eigh((matrix + matrix.conj().T) / 2)
    vecs = np.column_stack([fix_phase(vecs[:, i]) for i in range(vecs.shape[1])])
    groups, start = [], 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > gtol:
            groups.append(list(range(start, i)))
            start = i
    return Spectrum(vals, vecs, groups)
