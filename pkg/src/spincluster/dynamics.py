"""Dissipative magnetization dynamics of a driven three-level moment.

The model: a collective spin-1 degree of freedom in a swept field,
relaxing through one-phonon transitions with rate

    W(delta) = A * delta^3 / (1 - exp(-inv_temp * delta)),

where delta is the energy released into the bath.  The three level
populations reduce (via the trace constraint) to the pair
(n = rho_-- - rho_++, rho_00), which is integrated with fixed-step
RK4.  Two level schemes are supported:

* ``lzs_mode="off"``    - bare Zeeman ladder E_N = gamma*B(t)*N, output
  M_norm = n;
* ``lzs_mode="adiabatic"`` - instantaneous eigenlevels of the avoided
  crossing, E_N = N*sqrt((gamma*B)^2 + delta_gap^2), output
  M_norm = cos(beta)*n with cos(beta) = gamma*B/sqrt((gamma*B)^2+delta_gap^2).

The coefficient reduction of the master equation is exposed in two
modes: ``derived`` (re-derivation from the population equations, the
default and the integrator's ground truth) and ``paper_verbatim``
(one coefficient differs; kept for comparison).
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, NumericalCheckError
from .operators import VectorOperator, cross_component, hermitian_eig, spin_matrices

DETAILED_BALANCE_RTOL = 1e-12
POPULATION_WINDOW = 1e-6      # integrator abort threshold
TRAJECTORY_POP_TOL = 1e-7     # invariant claimed for accepted output
LEVEL_ZERO_COUNT_ATOL = 1e-9
INVARIANT_LEVEL_ATOL = 1e-9
_EXP_UNDERFLOW = -700.0

LEVELS = ("+", "0", "-")
_N_OF = {"+": 1.0, "0": 0.0, "-": -1.0}
LEVEL_PAIRS = tuple((a, b) for a in LEVELS for b in LEVELS if a != b)
COEFF_MODES = ("derived", "paper_verbatim")
LZS_MODES = ("off", "adiabatic")
FIELD_KINDS = ("sinusoid", "linear_ramp", "constant")


@dataclass(frozen=True)
class RateParams:
    A: float = 1.0
    inv_temp: float = 1.0
    gamma: float = 1.0
    delta_gap: float = 0.1

    def __post_init__(self):
        for name in ("A", "inv_temp", "gamma", "delta_gap"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value!r}")
        if self.A <= 0:
            raise ConfigError("phonon prefactor A must be positive")
        if self.inv_temp <= 0:
            raise ConfigError("inverse temperature must be positive")
        if self.delta_gap < 0:
            raise ConfigError("level gap must be nonnegative")


@dataclass(frozen=True)
class FieldProfile:
    kind: str = "sinusoid"
    amplitude: float = 10.0
    angular_rate: float = 1.0
    t_start: float = 0.0
    t_end: float = 2.0 * math.pi

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ConfigError(
                f"unknown field kind {self.kind!r}, expected one of {FIELD_KINDS}")
        for name in ("amplitude", "angular_rate", "t_start", "t_end"):
            if not np.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if not self.t_end > self.t_start:
            raise ConfigError("t_end must exceed t_start")

    def field(self, t: float) -> float:
        if self.kind == "sinusoid":
            return self.amplitude * math.sin(self.angular_rate * t)
        if self.kind == "linear_ramp":
            frac = (t - self.t_start) / (self.t_end - self.t_start)
            return self.amplitude * (2.0 * frac - 1.0)
        return self.amplitude


def transition_rate(A: float, inv_temp: float, delta: float) -> float:
    """One-phonon rate A*delta^3/(1-exp(-inv_temp*delta)); W(0)=0."""
    if A <= 0 or inv_temp <= 0:
        raise ConfigError("transition_rate needs A > 0 and inv_temp > 0")
    if delta == 0.0:
        return 0.0
    t = inv_temp * delta
    if t < _EXP_UNDERFLOW:
        return 0.0
    return -A * delta * delta * delta / math.expm1(-t)


def level_transition_rates(scale: float, params: RateParams) -> dict:
    """All six W_{NN'} for the ladder E_N = scale*N."""
    rates = {}
    for a, b in LEVEL_PAIRS:
        delta = scale * (_N_OF[a] - _N_OF[b])
        rates[(a, b)] = transition_rate(params.A, params.inv_temp, delta)
    return rates


class RateCoefficients(NamedTuple):
    C1: float
    C2: float
    C3: float
    C4: float
    E: float
    F: float


def rate_matrix_coefficients(W: dict, mode: str = "derived") -> RateCoefficients:
    """Reduce the three-population master equation to (x, rho00).

    x = rho_++ - rho_--; d/dt (x, rho00) = [[C1,C2],[C3,C4]]·(x, rho00)
    + (E, F).  mode="derived" is the reduction itself;
    mode="paper_verbatim" reproduces a printed variant whose C1 differs
    from the derivation by +W_{+0}.
    """
    if mode not in COEFF_MODES:
        raise ConfigError(f"unknown coefficient mode {mode!r}")
    try:
        w = {pair: float(W[pair]) for pair in LEVEL_PAIRS}
    except KeyError as missing:
        raise ConfigError(f"rate table missing pair {missing}") from None
    if min(w.values()) < 0:
        raise ConfigError("negative transition rate")
    wpo, wop = w[("+", "0")], w[("0", "+")]
    wmo, wom = w[("-", "0")], w[("0", "-")]
    wpm, wmp = w[("+", "-")], w[("-", "+")]
    c1 = -0.5 * (wpo + wmo) - wpm - wmp
    if mode == "paper_verbatim":
        c1 += wpo
    return RateCoefficients(
        C1=c1,
        C2=0.5 * (wpo - wmo) + wop - wom + wpm - wmp,
        C3=0.5 * (wpo - wmo),
        C4=-0.5 * (wpo + wmo + 2.0 * wop + 2.0 * wom),
        E=0.5 * (wmo - wpo) + wmp - wpm,
        F=0.5 * (wpo + wmo),
    )


def coefficient_mode_gaps(W: dict) -> dict:
    """Absolute per-coefficient gap between the two reduction modes."""
    derived = rate_matrix_coefficients(W, "derived")
    verbatim = rate_matrix_coefficients(W, "paper_verbatim")
    return {name: abs(got - want) for name, got, want
            in zip(RateCoefficients._fields, verbatim, derived)}


def _boltzmann(scale: float, inv_temp: float):
    """Populations (p_+, p_0, p_-) over E_N = scale*N."""
    z = np.array([-inv_temp * scale, 0.0, inv_temp * scale])
    z -= z.max()
    p = np.exp(z)
    return p / p.sum()


def equilibrium_populations(B: float, params: RateParams):
    """Boltzmann occupations of the bare ladder E_N = gamma*B*N."""
    p = _boltzmann(params.gamma * B, params.inv_temp)
    return float(p[0]), float(p[1]), float(p[2])


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    B: np.ndarray
    M_norm: np.ndarray
    rho00: np.ndarray
    n: np.ndarray

    def populations(self):
        """(rho_++, rho_00, rho_--) arrays reconstructed from (n, rho00)."""
        plus = 0.5 * (1.0 - self.rho00 - self.n)
        minus = 0.5 * (1.0 - self.rho00 + self.n)
        return plus, self.rho00, minus

    def population_defect(self) -> float:
        """Worst excursion of any population outside [0, 1]."""
        stacked = np.concatenate(self.populations())
        return float(max(np.max(stacked) - 1.0, -np.min(stacked), 0.0))

    def to_csv(self) -> str:
        lines = ["t,B,M_norm,rho00,n"]
        for row in zip(self.t, self.B, self.M_norm, self.rho00, self.n):
            lines.append(",".join(f"{value:.17g}" for value in row))
        return "\n".join(lines) + "\n"


def _initial_state(init, scale0: float, params: RateParams):
    if isinstance(init, str):
        if init == "equilibrium":
            p = _boltzmann(scale0, params.inv_temp)
            return float(p[2] - p[0]), float(p[1])
        if init == "polarized_up":
            return -1.0, 0.0
        raise ConfigError(
            f"unknown init {init!r}; use 'equilibrium', 'polarized_up', "
            "or an explicit (n0, rho00) pair")
    try:
        n0, rho00 = (float(v) for v in init)
    except (TypeError, ValueError):
        raise ConfigError(f"cannot interpret init {init!r}") from None
    pops = (0.5 * (1.0 - rho00 - n0), rho00, 0.5 * (1.0 - rho00 + n0))
    if min(pops) < -1e-9 or max(pops) > 1.0 + 1e-9:
        raise ConfigError(
            f"explicit init (n0={n0}, rho00={rho00}) implies populations "
            f"{pops} outside [0, 1]")
    return n0, rho00


def integrate_magnetization(params: RateParams, profile: FieldProfile,
                            init="equilibrium", n_steps: int = 2000,
                            lzs_mode: str = "off",
                            coeff_mode: str = "derived") -> Trajectory:
    """Fixed-step RK4 trajectory of (n, rho00) under the swept field."""
    if n_steps < 10:
        raise ConfigError("n_steps must be at least 10")
    if lzs_mode not in LZS_MODES:
        raise ConfigError(f"unknown lzs_mode {lzs_mode!r}")
    if coeff_mode not in COEFF_MODES:
        raise ConfigError(f"unknown coefficient mode {coeff_mode!r}")

    A, beta, gamma, gap = (params.A, params.inv_temp,
                           params.gamma, params.delta_gap)
    adiabatic = lzs_mode == "adiabatic"
    verbatim = coeff_mode == "paper_verbatim"
    field = profile.field
    expm1 = math.expm1
    hypot = math.hypot

    def rate(delta):
        if delta == 0.0:
            return 0.0
        t = beta * delta
        if t < _EXP_UNDERFLOW:
            return 0.0
        return -A * delta * delta * delta / expm1(-t)

    def deriv(t, n, rho00):
        b_now = field(t)
        s = hypot(gamma * b_now, gap) if adiabatic else gamma * b_now
        # W_{+0} = W_{0-} = rate(s); W_{0+} = W_{-0} = rate(-s)
        wa, wb = rate(s), rate(-s)
        wc, wd = rate(2.0 * s), rate(-2.0 * s)
        c1 = -0.5 * (wa + wb) - wc - wd
        if verbatim:
            c1 += wa
        c2 = 0.5 * (wb - wa) + wc - wd
        c3 = 0.5 * (wa - wb)
        c4 = -1.5 * (wa + wb)
        e = 0.5 * (wb - wa) + wd - wc
        f = 0.5 * (wa + wb)
        # n = -x, so the (x, rho00) system maps to:
        return c1 * n - c2 * rho00 - e, -c3 * n + c4 * rho00 + f

    h = (profile.t_end - profile.t_start) / n_steps
    t_nodes = profile.t_start + h * np.arange(n_steps + 1)
    b_nodes = np.array([field(t) for t in t_nodes])
    scale0 = hypot(gamma * b_nodes[0], gap) if adiabatic else gamma * b_nodes[0]
    n_now, rho_now = _initial_state(init, scale0, params)

    n_out = np.empty(n_steps + 1)
    rho_out = np.empty(n_steps + 1)
    lo, hi = -POPULATION_WINDOW, 1.0 + POPULATION_WINDOW
    for i in range(n_steps + 1):
        n_out[i] = n_now
        rho_out[i] = rho_now
        plus = 0.5 * (1.0 - rho_now - n_now)
        minus = 0.5 * (1.0 - rho_now + n_now)
        if not (lo <= plus <= hi and lo <= rho_now <= hi and lo <= minus <= hi):
            raise NumericalCheckError(
                f"populations left [0, 1] (window {POPULATION_WINDOW}) at "
                f"t = {t_nodes[i]:.6g}: ({plus:.3e}, {rho_now:.3e}, "
                f"{minus:.3e}); increase n_steps")
        if i == n_steps:
            break
        t = t_nodes[i]
        k1n, k1r = deriv(t, n_now, rho_now)
        k2n, k2r = deriv(t + 0.5 * h, n_now + 0.5 * h * k1n,
                         rho_now + 0.5 * h * k1r)
        k3n, k3r = deriv(t + 0.5 * h, n_now + 0.5 * h * k2n,
                         rho_now + 0.5 * h * k2r)
        k4n, k4r = deriv(t + h, n_now + h * k3n, rho_now + h * k3r)
        n_now += (h / 6.0) * (k1n + 2.0 * (k2n + k3n) + k4n)
        rho_now += (h / 6.0) * (k1r + 2.0 * (k2r + k3r) + k4r)

    if adiabatic:
        omega = np.hypot(gamma * b_nodes, gap)
        cos_beta = np.where(omega > 0.0, gamma * b_nodes / np.where(
            omega > 0.0, omega, 1.0), 0.0)
        m_norm = cos_beta * n_out
    else:
        m_norm = n_out.copy()
    return Trajectory(t=t_nodes, B=b_nodes, M_norm=m_norm,
                      rho00=rho_out, n=n_out)


def enclosed_area(traj: Trajectory, t_start: float = None,
                  t_end: float = None) -> float:
    """|closed-path integral of M dB| over the selected time window."""
    mask = np.ones(traj.t.size, dtype=bool)
    if t_start is not None:
        mask &= traj.t >= t_start - 1e-12
    if t_end is not None:
        mask &= traj.t <= t_end + 1e-12
    if mask.sum() < 2:
        raise ConfigError("window selects fewer than two samples")
    return float(abs(np.trapezoid(traj.M_norm[mask], traj.B[mask])))


def rho00_mode_report(params: RateParams, profile: FieldProfile,
                      init="equilibrium", n_steps: int = 4000) -> dict:
    """Numerical check of how much rho00 cares about the level mixing."""
    off = integrate_magnetization(params, profile, init, n_steps, "off")
    adi = integrate_magnetization(params, profile, init, n_steps, "adiabatic")
    gap = np.abs(off.rho00 - adi.rho00)
    return {
        "max_rho00_gap": float(gap.max()),
        "mean_rho00_gap": float(gap.mean()),
        "n_steps": n_steps,
        "delta_gap": params.delta_gap,
    }


# --- coupled two-moment model and its three-level reduction -----------

def lzs_three_level(B: float, delta_gap: float):
    """Avoided-crossing 3x3 block, its mixing angle, and eigenvalues.

    Returns (matrix, beta, eigenvalues-ascending).  beta satisfies
    cos(beta) = B/sqrt(B^2+delta_gap^2); it is undefined at B = delta_gap = 0.
    """
    if B == 0.0 and delta_gap == 0.0:
        raise ConfigError("mixing angle undefined at B = 0, delta_gap = 0")
    d = delta_gap / math.sqrt(2.0)
    matrix = np.array([
        [B, d, 0.0],
        [d, 0.0, d],
        [0.0, d, -B],
    ])
    beta = math.atan2(delta_gap, B)
    omega = math.hypot(B, delta_gap)
    return matrix, beta, np.array([-omega, 0.0, omega])


def lzs_eigenvectors(beta: float) -> np.ndarray:
    """Closed-form eigenvector columns, ordered like the ascending
    eigenvalues (-omega, 0, +omega) of :func:`lzs_three_level`."""
    c, s = math.cos(beta), math.sin(beta)
    r2 = math.sqrt(2.0)
    v_minus = np.array([0.5 * (1.0 - c), -s / r2, 0.5 * (1.0 + c)])
    v_zero = np.array([-s / r2, c, s / r2])
    v_plus = np.array([0.5 * (1.0 + c), s / r2, 0.5 * (1.0 - c)])
    return np.column_stack([v_minus, v_zero, v_plus])


def coupled_spin1_hamiltonian(B: float, delta_gap: float,
                              gamma: float = 1.0) -> np.ndarray:
    """Two exchange-locked moments: Zeeman term plus y-component of the
    antisymmetric coupling, on the 3x3 product space of two spin-1's."""
    single = spin_matrices(1.0)
    eye = np.eye(3)
    left = VectorOperator(*(np.kron(op, eye) for op in single))
    right = VectorOperator(*(np.kron(eye, op) for op in single))
    zeeman = gamma * B * (left.z + right.z)
    return zeeman + delta_gap * cross_component(left, right, 1)


def _nine_level_closed_forms(b: float, delta_gap: float, corrected: bool):
    """Sorted 9-level prediction; flag True if a squared level went
    negative (possible for the uncorrected radical)."""
    middle = 30.0 * b * b * (delta_gap * delta_gap if corrected else 1.0)
    radical = math.sqrt(9.0 * b ** 4 + middle + delta_gap ** 4)
    base = 5.0 * b * b + 3.0 * delta_gap * delta_gap
    ea_sq = 0.5 * (base + radical)
    eb_sq = 0.5 * (base - radical)
    imaginary = eb_sq < 0.0 or ea_sq < 0.0
    ea = math.sqrt(max(ea_sq, 0.0))
    eb = math.sqrt(max(eb_sq, 0.0))
    inv = math.hypot(b, delta_gap)
    levels = np.sort([0.0, 0.0, 0.0, inv, -inv, ea, -ea, eb, -eb])
    return levels, imaginary


@dataclass(frozen=True)
class LevelComparisonReport:
    b_grid: np.ndarray
    delta_gap: float
    gamma: float
    numeric: np.ndarray          # (n_grid, 9) sorted eigenvalues
    printed: np.ndarray          # (n_grid, 9) uncorrected closed forms
    corrected: np.ndarray        # (n_grid, 9) dimensionally repaired forms
    printed_max_dev: np.ndarray  # (9,) per-level worst gap vs numeric
    corrected_max_dev: np.ndarray
    printed_goes_imaginary: bool
    min_zero_count: int
    invariant_pair_max_dev: float


def coupled_levels_report(B_grid, delta_gap: float,
                          gamma: float = 1.0) -> LevelComparisonReport:
    """Exact 9x9 spectra against both readings of the closed forms.

    Asserts only the robust pieces - at least three zero eigenvalues
    and the +-sqrt((gamma*B)^2+delta_gap^2) pair - and reports the rest.
    """
    b_grid = np.asarray(B_grid, dtype=float).reshape(-1)
    if b_grid.size == 0:
        raise ConfigError("empty field grid")
    numeric = np.empty((b_grid.size, 9))
    printed = np.empty_like(numeric)
    corrected = np.empty_like(numeric)
    any_imag = False
    min_zeros = 9
    worst_invariant = 0.0
    for i, b_val in enumerate(b_grid):
        ham = coupled_spin1_hamiltonian(b_val, delta_gap, gamma)
        evals = hermitian_eig(ham).eigenvalues
        numeric[i] = evals
        b_eff = gamma * b_val
        printed[i], was_imag = _nine_level_closed_forms(b_eff, delta_gap, False)
        corrected[i], _ = _nine_level_closed_forms(b_eff, delta_gap, True)
        any_imag = any_imag or was_imag
        zeros = int(np.count_nonzero(np.abs(evals) <= LEVEL_ZERO_COUNT_ATOL))
        min_zeros = min(min_zeros, zeros)
        if zeros < 3:
            raise NumericalCheckError(
                f"only {zeros} zero eigenvalues at B = {b_val:.6g} "
                f"(delta_gap = {delta_gap})")
        omega = math.hypot(b_eff, delta_gap)
        for target in (omega, -omega):
            dev = float(np.min(np.abs(evals - target)))
            worst_invariant = max(worst_invariant, dev)
            if dev > INVARIANT_LEVEL_ATOL:
                raise NumericalCheckError(
                    f"level {target:.6g} missing from 9x9 spectrum at "
                    f"B = {b_val:.6g}: nearest is {dev:.3e} away")
    return LevelComparisonReport(
        b_grid=b_grid,
        delta_gap=float(delta_gap),
        gamma=float(gamma),
        numeric=numeric,
        printed=printed,
        corrected=corrected,
        printed_max_dev=np.max(np.abs(printed - numeric), axis=0),
        corrected_max_dev=np.max(np.abs(corrected - numeric), axis=0),
        printed_goes_imaginary=any_imag,
        min_zero_count=min_zeros,
        invariant_pair_max_dev=worst_invariant,
    )
