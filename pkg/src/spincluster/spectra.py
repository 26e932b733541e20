"""Closed-form level structure of the constrained cluster Hamiltonians.

The isosceles three-site cluster and the two-parameter four-site
family (equal opposite-edge couplings) both diagonalize in closed
form.  Every level is linear in the couplings, so ground-state
classification over coupling space reduces to comparing a handful of
linear functions; :func:`phase_map` sweeps that comparison over a
grid.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .operators import SpinRegister, hermitian_eig
from .symmetry import (
    constrained_couplings_parallelogram,
    constrained_couplings_triangle,
    heisenberg_hamiltonian,
)

CLOSED_FORM_ATOL = 1e-10
DEFAULT_TIE_RTOL = 1e-9

TRIANGLE_LABELS = ("alpha", "beta", "quartet")
PARALLELOGRAM_LABELS = (
    "quintet", "triplet1", "triplet2", "triplet3",
    "singlet_plus", "singlet_minus",
)


@dataclass(frozen=True)
class Level:
    label: str
    S: float
    energy: float
    multiplicity: int


@dataclass(frozen=True)
class LevelSet:
    levels: tuple

    def expanded(self) -> np.ndarray:
        """All eigenvalues with multiplicity, ascending."""
        out = []
        for lev in self.levels:
            out.extend([lev.energy] * lev.multiplicity)
        return np.sort(np.array(out))

    def weighted_sum(self) -> float:
        return float(sum(lev.energy * lev.multiplicity for lev in self.levels))

    def total_multiplicity(self) -> int:
        return sum(lev.multiplicity for lev in self.levels)

    def by_label(self) -> dict:
        return {lev.label: lev for lev in self.levels}


def triangle_levels(J12: float, J13: float) -> LevelSet:
    """Three levels of the isosceles three-site cluster."""
    return LevelSet((
        Level("alpha", 0.5, J13 / 4.0 - J12, 2),
        Level("beta", 0.5, -0.75 * J13, 2),
        Level("quartet", 1.5, J12 / 2.0 + J13 / 4.0, 4),
    ))


def parallelogram_levels(a12: float, a13: float) -> LevelSet:
    """Six levels of the equal-opposite-edge four-site family."""
    return LevelSet((
        Level("quintet", 2.0, a12 + 0.5 * a13, 5),
        Level("triplet1", 1.0, -0.5 * a13, 3),
        Level("triplet2", 1.0, a12 / 3.0 - 5.0 * a13 / 6.0, 3),
        Level("triplet3", 1.0, -4.0 * a12 / 3.0 + 5.0 * a13 / 6.0, 3),
        Level("singlet_plus", 0.0, -2.0 * a12 + 0.5 * a13, 1),
        Level("singlet_minus", 0.0, -1.5 * a13, 1),
    ))


def triangle_hamiltonian(register: SpinRegister, J12: float, J13: float):
    return heisenberg_hamiltonian(
        register, constrained_couplings_triangle(J12, J13))


def parallelogram_hamiltonian(register: SpinRegister, a12: float, a13: float):
    """Two-parameter family member with both opposite edges equal."""
    return heisenberg_hamiltonian(
        register, constrained_couplings_parallelogram(a12, a12, a13))


def closed_form_defect(register: SpinRegister, levelset: LevelSet,
                       hamiltonian: np.ndarray) -> float:
    """Max gap between sorted closed-form and numeric eigenvalues."""
    numeric = hermitian_eig(hamiltonian).eigenvalues
    closed = levelset.expanded()
    if closed.shape != numeric.shape:
        raise ConfigError(
            f"level multiplicities sum to {closed.size}, "
            f"Hilbert dimension is {numeric.size}"
        )
    return float(np.max(np.abs(closed - numeric)))


@dataclass(frozen=True)
class PhasePoint:
    a12: float
    a13: float
    ground_labels: tuple
    ground_S: object  # half-integer, or "degenerate-mixed" on mixed ties
    ground_energy: float


def classify_ground(a12: float, a13: float,
                    tie_tol: float = None) -> PhasePoint:
    """All levels within tie_tol of the minimum of the four-site family."""
    levelset = parallelogram_levels(a12, a13)
    energies = np.array([lev.energy for lev in levelset.levels])
    if tie_tol is None:
        tie_tol = DEFAULT_TIE_RTOL * max(1.0, float(np.max(np.abs(energies))))
    if tie_tol <= 0:
        raise ConfigError("tie tolerance must be positive")
    ground = float(np.min(energies))
    winners = [lev for lev in levelset.levels
               if lev.energy <= ground + tie_tol]
    spins = {lev.S for lev in winners}
    ground_S = winners[0].S if len(spins) == 1 else "degenerate-mixed"
    return PhasePoint(
        a12=a12, a13=a13,
        ground_labels=tuple(lev.label for lev in winners),
        ground_S=ground_S,
        ground_energy=ground,
    )


def _axis(bounds, n_grid: int) -> np.ndarray:
    lo, hi = float(bounds[0]), float(bounds[1])
    if not np.isfinite([lo, hi]).all() or hi < lo:
        raise ConfigError(f"invalid axis range ({lo}, {hi})")
    if n_grid < 1:
        raise ConfigError("grid must have at least one point per axis")
    if n_grid == 1:
        return np.array([lo])
    return np.linspace(lo, hi, n_grid)


def phase_map(a12_range, a13_range, n_grid: int) -> list:
    """Ground-state classification on a regular coupling grid."""
    points = []
    for a12 in _axis(a12_range, n_grid):
        for a13 in _axis(a13_range, n_grid):
            points.append(classify_ground(float(a12), float(a13)))
    return points


# The claimed full ordering of the six levels in the region a12 > 0,
# a13 < -2*a12 is mutually inconsistent (its last two links need
# a13 > 0), so it is reported link by link rather than asserted.
CLAIMED_ORDER_CHAIN = (
    "triplet3", "singlet_plus", "quintet",
    "singlet_minus", "triplet1", "triplet2",
)


def ordering_report(a12: float, a13: float) -> dict:
    levelset = parallelogram_levels(a12, a13)
    table = levelset.by_label()
    links = []
    for lo, hi in zip(CLAIMED_ORDER_CHAIN[:-1], CLAIMED_ORDER_CHAIN[1:]):
        links.append({
            "claim": f"{lo} < {hi}",
            "lhs": table[lo].energy,
            "rhs": table[hi].energy,
            "holds": bool(table[lo].energy < table[hi].energy),
        })
    actual = sorted(levelset.levels, key=lambda lev: lev.energy)
    return {
        "a12": a12,
        "a13": a13,
        "claimed_chain": list(CLAIMED_ORDER_CHAIN),
        "actual_order": [lev.label for lev in actual],
        "links": links,
        "chain_holds": all(link["holds"] for link in links),
    }
