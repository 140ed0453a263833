"""
Direction-resolved arrival amplitudes and the 4 x 4 step matrix.

F_n(x, y) is the total amplitude of n-step non-backtracking walks from the origin that arrive at (x, y) moving in
direction F. One step multiplies by u, by alpha = e^{i pi/4} for a left turn, by its conjugate for a right turn,
and by 0 for a reversal. In momentum space the same step is the row-vector update psi_n = psi_{n-1} uM(eps, eta),
so the angular mean of Tr (uM)^n collects the signed closed walks through a base point.
"""
import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from kacward.utils.constants import DEFAULT_QUAD_TOL, IMAGINARY_RESIDUE_TOL, SINGULAR_DET_TOL
from kacward.utils.exceptions import ConsistencyError, QuadratureResolutionError, SingularityError
from kacward.utils.logging import logger
from kacward.utils.quadrature import QuadratureResult, QuadratureSpec, integrate_periodic, periodic_nodes

ALPHA = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))


class DirectionIndex(enum.IntEnum):
    """Direction of arrival: U moving up, D moving down, L moving rightward (from the left), R moving leftward."""
    U = 1
    D = 2
    L = 3
    R = 4

    @property
    def index(self) -> int:
        """Zero-based row/column of the step matrix."""
        return self.value - 1

    @property
    def displacement(self):
        return _DISPLACEMENTS[self.value - 1]


_DISPLACEMENTS = ((0, 1), (0, -1), (1, 0), (-1, 0))


def _turn_phase(a, b) -> complex:
    cross = a[0] * b[1] - a[1] * b[0]
    if cross == 1:
        return ALPHA
    if cross == -1:
        return ALPHA.conjugate()
    return 1.0 if a == b else 0.0


# TURN_PHASES[i, j]: phase for arriving in direction i and leaving in direction j
TURN_PHASES = np.array([[_turn_phase(a, b) for b in _DISPLACEMENTS] for a in _DISPLACEMENTS], dtype=complex)

_DX = np.array([d[0] for d in _DISPLACEMENTS], dtype=float)
_DY = np.array([d[1] for d in _DISPLACEMENTS], dtype=float)


def _as_direction(direction: Union[int, DirectionIndex]) -> DirectionIndex:
    try:
        return DirectionIndex(direction)
    except ValueError:
        raise ValueError(f"direction must be one of 1..4 (U, D, L, R), got {direction!r}")


@dataclass
class AmplitudeField:
    """
    The four arrival amplitudes after n steps, on the window |x|, |y| <= n.

    Parameters:
        n (int): Number of steps taken.
        u (float): Weight per step.
        seed (DirectionIndex): Direction in which the step-0 walker sits at the origin.
        values (np.ndarray): Complex array of shape (4, 2n + 1, 2n + 1); values[d, x + n, y + n] = F_n(x, y).
    """
    n: int
    u: float
    seed: DirectionIndex = DirectionIndex.U
    values: np.ndarray = field(default=None, repr=False)

    @property
    def window(self) -> int:
        return (self.values.shape[1] - 1) // 2

    def at(self, x: int, y: int, direction: Optional[Union[int, DirectionIndex]] = None) -> complex:
        """F_n(x, y) for one direction, or the sum over directions when direction is None."""
        w = self.window
        if abs(x) > w or abs(y) > w:
            return 0j
        if direction is None:
            return complex(self.values[:, x + w, y + w].sum())
        return complex(self.values[_as_direction(direction).index, x + w, y + w])


def initial_field(u: float, seed: Union[int, DirectionIndex] = DirectionIndex.U) -> AmplitudeField:
    """Step 0: a single walker at the origin arriving in the seed direction."""
    seed = _as_direction(seed)
    values = np.zeros((4, 1, 1), dtype=complex)
    values[seed.index, 0, 0] = 1.0
    return AmplitudeField(0, u, seed, values)


def step_recursion(current: AmplitudeField) -> AmplitudeField:
    """
    Advance every arrival amplitude by one step on the free plane.

    F_{n+1}(x, y) = u sum_i TURN_PHASES[i, F] G_n(x - dx_F, y - dy_F), the sum running over the arrival
    directions G of the previous step.
    """
    padded = np.pad(current.values, ((0, 0), (1, 1), (1, 1)))
    mixed = current.u * np.einsum('ij,ixy->jxy', TURN_PHASES, padded)
    stepped = np.empty_like(mixed)
    for j, (dx, dy) in enumerate(_DISPLACEMENTS):
        # the padded border of mixed is zero, so rolling never wraps real amplitude
        stepped[j] = np.roll(mixed[j], (dx, dy), axis=(0, 1))
    return AmplitudeField(current.n + 1, current.u, current.seed, stepped)


def field_at(n: int, u: float, seed: Union[int, DirectionIndex] = DirectionIndex.U) -> AmplitudeField:
    if n < 0:
        raise ValueError(f"step count must be nonnegative, got {n}")
    current = initial_field(u, seed)
    for _ in range(n):
        current = step_recursion(current)
    return current


def arrival_amplitude(n: int, x: int, y: int, direction: Optional[Union[int, DirectionIndex]] = None, *,
                      u: float) -> complex:
    """
    Amplitude of arriving at (x, y) after n steps, starting from the origin moving up.

    Parameters:
        n (int): Number of steps.
        x (int): Target column.
        y (int): Target row.
        direction: Arrival direction; None sums the four directions.
        u (float): Weight per step.

    Returns:
        complex: F_n(x, y), zero outside |x|, |y| <= n.
    """
    return field_at(n, u).at(x, y, direction)


def step_matrices(eps, eta, u: float) -> np.ndarray:
    """
    uM at every (eps, eta) of broadcastable arrays; the result has shape broadcast(eps, eta) + (4, 4).

    M_ij = TURN_PHASES[i, j] exp(-i (eps dx_j + eta dy_j)), so the U column carries v = e^{-i eta} and the L
    column carries conj(h) = e^{-i eps}.
    """
    eps, eta = np.broadcast_arrays(np.asarray(eps, dtype=float), np.asarray(eta, dtype=float))
    phases = np.exp(-1j * (eps[..., None] * _DX + eta[..., None] * _DY))
    return u * TURN_PHASES * phases[..., None, :]


def matrix_M(eps: float, eta: float, u: float) -> np.ndarray:
    """The 4 x 4 complex matrix uM at one point of the Brillouin square."""
    return step_matrices(eps, eta, u)


@dataclass(frozen=True)
class StepMatrix:
    """
    uM at one point (eps, eta) of the Brillouin square.

    Parameters:
        u (float): Weight per step.
        eps (float): Horizontal momentum.
        eta (float): Vertical momentum.
    """
    u: float
    eps: float
    eta: float

    @property
    def matrix(self) -> np.ndarray:
        return matrix_M(self.eps, self.eta, self.u)

    def power(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError(f"n must be non-negative, got {n}")
        return np.linalg.matrix_power(self.matrix, n)

    def trace_power(self, n: int) -> complex:
        return complex(np.trace(self.power(n)))

    def det(self) -> complex:
        """det(I - uM)."""
        return det_direct(self.eps, self.eta, self.u)


def _check_resolution(n: int, resolution: Optional[Union[int, QuadratureSpec]]) -> int:
    if isinstance(resolution, QuadratureSpec):
        resolution = resolution.resolution
    if resolution is None:
        resolution = max(n + 1, 8)
    if resolution < n + 1:
        raise QuadratureResolutionError(
            f"resolution {resolution} cannot integrate Tr (uM)^{n} exactly; need at least {n + 1} nodes per axis")
    return resolution


def _real_part(value: complex, what: str, scale: float = 1.0) -> float:
    if abs(value.imag) > IMAGINARY_RESIDUE_TOL * max(1.0, scale):
        raise ConsistencyError(f"{what} has imaginary residue {value.imag:.3e}")
    return float(value.real)


def _trace_means(n_max: int, u: float, resolution: int) -> List[float]:
    # angular means of Tr (uM)^n for n = 1..n_max from one grid of cumulative matrix powers
    nodes = periodic_nodes(resolution)
    step = step_matrices(nodes[:, None], nodes[None, :], u)
    power = np.broadcast_to(np.eye(4, dtype=complex), step.shape).copy()
    means = []
    for n in range(1, n_max + 1):
        power = power @ step
        traces = np.trace(power, axis1=-2, axis2=-1)
        scale = float(np.abs(traces).max())
        means.append(_real_part(complex(traces.mean()), f"mean of Tr (uM)^{n}", scale))
    return means


def trace_power_integral(n: int, u: float, resolution: Optional[Union[int, QuadratureSpec]] = None) -> float:
    """
    (1/(2pi)^2) times the double integral of Tr (uM)^n over [0, 2pi)^2.

    Tr (uM)^n is a trigonometric polynomial of degree n in each angle, so the equal-weight rule with n + 1 or
    more nodes per axis is exact up to roundoff.

    Parameters:
        n (int): Power of the step matrix.
        u (float): Weight per step.
        resolution: Nodes per axis (int or QuadratureSpec); defaults to max(n + 1, 8).

    Returns:
        float: the real angular mean; the imaginary residue is checked against 1e-12 and dropped.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    resolution = _check_resolution(n, resolution)
    if n == 0:
        return 4.0
    return _trace_means(n, u, resolution)[-1]


def closed_amplitude_sum(n: int, u: float, resolution: Optional[Union[int, QuadratureSpec]] = None) -> float:
    """Signed amplitude of closed length-n walks through a base point, inversions removed: -(1/2) mean Tr (uM)^n."""
    return -0.5 * trace_power_integral(n, u, resolution)


def trace_element_from_recursion(n: int, u: float, seed: Union[int, DirectionIndex]) -> float:
    """(M^n)_ii u^n averaged over angles, read from the real-space recursion seeded in direction i."""
    seed = _as_direction(seed)
    return _real_part(field_at(n, u, seed).at(0, 0, seed), f"diagonal element {seed.name} at n={n}")


def trace_from_recursion(n: int, u: float) -> float:
    """Sum over the four seeds of the seeded direction's amplitude at the origin after n steps."""
    return math.fsum(trace_element_from_recursion(n, u, seed) for seed in DirectionIndex)


def det_closed_form(eps, eta, u: float):
    """det(I - uM) = (u^2 + 1)^2 - 2u(1 - u^2)(cos eps + cos eta)."""
    return (u * u + 1.0)**2 - 2.0 * u * (1.0 - u * u) * (np.cos(eps) + np.cos(eta))


def det_direct(eps: float, eta: float, u: float) -> complex:
    """det(I - uM) from the assembled 4 x 4 matrix."""
    return complex(np.linalg.det(np.eye(4) - matrix_M(eps, eta, u)))


def det_from_coupling(eps, eta, K: float):
    """det(I - uM) at u = tanh K, written as cosh^{-4} K [cosh^2 2K - sinh 2K (cos eps + cos eta)]."""
    return (np.cosh(2.0 * K)**2 - np.sinh(2.0 * K) * (np.cos(eps) + np.cos(eta))) / np.cosh(K)**4


def log_det_integrand(eps, eta, u: float):
    """
    ln det(I - uM) at (eps, eta), vectorised.

    Raises:
        SingularityError: when the determinant is not positive (to within SINGULAR_DET_TOL), which happens only
            at the critical weight and the origin of the Brillouin square.
    """
    det = det_closed_form(eps, eta, u)
    if np.any(det <= SINGULAR_DET_TOL):
        raise SingularityError(f"det(I - uM) is not positive for u={u}; the critical node is on the grid")
    return np.log(det)


def log_det_mean(u: float, spec: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """Angular mean of ln det(I - uM) by the periodic trapezoidal rule with automatic refinement."""
    spec = spec or QuadratureSpec()
    return integrate_periodic(lambda eps, eta: log_det_integrand(eps, eta, u), spec)


@dataclass
class TraceSeriesReport:
    """Partial sums of -sum_n mean Tr (uM)^n / n against the quadrature of ln det(I - uM)."""
    u: float
    n_max: int
    log_det: float
    partial_sums: List[float]
    residuals: List[float]

    @property
    def final_residual(self) -> float:
        return self.residuals[-1] if self.residuals else abs(self.log_det)

    @property
    def monotone(self) -> bool:
        # only even orders contribute; compare consecutive even truncations
        even = self.residuals[1::2]
        return all(b <= a + 1e-15 for a, b in zip(even, even[1:]))

    def to_dict(self) -> dict:
        return {
            'u': self.u,
            'n_max': self.n_max,
            'log_det': self.log_det,
            'residuals': [{'n_max': n + 1, 'residual': r} for n, r in enumerate(self.residuals)],
            'final_residual': self.final_residual,
            'monotone': self.monotone,
        }


def trace_log_series_check(u: float, n_max: int, spec: Optional[QuadratureSpec] = None) -> TraceSeriesReport:
    """
    Compare sum_{n <= n_max} -mean Tr (uM)^n / n with the angular mean of ln det(I - uM).

    Parameters:
        u (float): Weight, restricted to |u| < 1/4 where uniform convergence of the series is guaranteed.
        n_max (int): Last order summed.
        spec (QuadratureSpec): Quadrature for the log-determinant side.

    Returns:
        TraceSeriesReport: residual after every order 1..n_max.
    """
    if abs(u) >= 0.25:
        raise ValueError(f"trace-log series check needs |u| < 1/4, got u={u}")
    if n_max < 1:
        raise ValueError(f"n_max must be positive, got {n_max}")
    log_det = log_det_mean(u, spec or QuadratureSpec(resolution=32, tol=DEFAULT_QUAD_TOL)).value
    means = _trace_means(n_max, u, n_max + 1)
    partial_sums, residuals, total = [], [], 0.0
    for n, mean in enumerate(means, start=1):
        total += -mean / n
        partial_sums.append(total)
        residuals.append(abs(log_det - total))
    logger.debug(f"trace-log series at u={u}: residual {residuals[-1]:.3e} after {n_max} orders")
    return TraceSeriesReport(u, n_max, log_det, partial_sums, residuals)
