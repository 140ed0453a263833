"""Equal-weight quadrature on the periodic square [0, 2pi)^2."""
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from kacward.utils.constants import DEFAULT_QUAD_RES, DEFAULT_QUAD_TOL, MAX_QUAD_RES
from kacward.utils.exceptions import QuadratureResolutionError
from kacward.utils.logging import logger

GridFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]

# rows evaluated per batch; bounds memory at large resolutions
_ROW_BATCH = 256


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Parameters of the periodic trapezoidal rule.

    Parameters:
        resolution (int): Nodes per axis on the first pass.
        offset (bool): Shift nodes by half a cell so that (0, 0) is never a node.
        tol (float): Target relative change between successive doublings.
        max_resolution (int): Largest resolution tried before giving up.
        richardson (bool): Extrapolate the last three refinements assuming an h^2 error term.
    """
    resolution: int = DEFAULT_QUAD_RES
    offset: bool = False
    tol: float = DEFAULT_QUAD_TOL
    max_resolution: int = MAX_QUAD_RES
    richardson: bool = False

    def __post_init__(self):
        if self.resolution < 1:
            raise QuadratureResolutionError(f"resolution must be positive, got {self.resolution}")
        if self.max_resolution < self.resolution:
            raise QuadratureResolutionError(
                f"max_resolution {self.max_resolution} is below resolution {self.resolution}")
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")


@dataclass
class QuadratureResult:
    value: float
    error: float
    resolution: int
    converged: bool
    method: str = 'trapezoid'
    history: List[float] = field(default_factory=list)


def periodic_nodes(resolution: int, offset: bool = False) -> np.ndarray:
    """Equally spaced nodes on [0, 2pi), optionally shifted by half a spacing."""
    if resolution < 1:
        raise QuadratureResolutionError(f"resolution must be positive, got {resolution}")
    shift = 0.5 if offset else 0.0
    return (np.arange(resolution) + shift) * (2.0 * np.pi / resolution)


def periodic_mean(func: GridFunction, resolution: int, offset: bool = False) -> complex:
    """
    Mean of func over the periodic square, i.e. (1/(2pi)^2) times its double integral.

    The rule is exact for trigonometric polynomials of degree below resolution in each variable. func receives
    broadcastable arrays (eps, eta) and must return values of the broadcast shape.
    """
    nodes = periodic_nodes(resolution, offset)
    total = 0.0
    for start in range(0, resolution, _ROW_BATCH):
        eps = nodes[start:start + _ROW_BATCH, None]
        values = func(eps, nodes[None, :])
        total = total + np.sum(values)
    return total / (resolution * resolution)


def richardson_h2(coarse: float, fine: float) -> float:
    """Eliminate an h^2 error term from two estimates at spacings h and h/2."""
    return (4.0 * fine - coarse) / 3.0


def integrate_periodic(func: GridFunction, spec: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """
    Mean of a real function over the periodic square with automatic refinement.

    The resolution is doubled until two successive estimates agree to spec.tol (relative to max(1, |value|)).
    With spec.richardson the sequence of estimates is extrapolated instead, which is what converges for the
    integrable logarithmic singularity at the critical coupling.

    Parameters:
        func: Vectorised integrand of (eps, eta).
        spec (QuadratureSpec): Quadrature parameters.

    Returns:
        QuadratureResult: value, error estimate, final resolution and convergence flag.
    """
    spec = spec or QuadratureSpec()
    resolution = spec.resolution
    history = [float(np.real(periodic_mean(func, resolution, spec.offset)))]
    extrapolated: List[float] = []

    while resolution * 2 <= spec.max_resolution:
        resolution *= 2
        history.append(float(np.real(periodic_mean(func, resolution, spec.offset))))
        if spec.richardson:
            extrapolated.append(richardson_h2(history[-2], history[-1]))
            if len(extrapolated) >= 2:
                error = abs(extrapolated[-1] - extrapolated[-2])
                if error <= spec.tol * max(1.0, abs(extrapolated[-1])):
                    return QuadratureResult(
                        extrapolated[-1], error, resolution, True, 'richardson', history)
        else:
            error = abs(history[-1] - history[-2])
            if error <= spec.tol * max(1.0, abs(history[-1])):
                return QuadratureResult(history[-1], error, resolution, True, 'trapezoid', history)

    if spec.richardson and len(extrapolated) >= 2:
        value, error = extrapolated[-1], abs(extrapolated[-1] - extrapolated[-2])
        method = 'richardson'
    elif len(history) >= 2:
        value, error = history[-1], abs(history[-1] - history[-2])
        method = 'trapezoid'
    else:
        value, error = history[-1], float('nan')
        method = 'trapezoid'
    logger.warning(
        f"Quadrature did not reach tol={spec.tol:g} by resolution {resolution}; "
        f"achieved residual {error:.3e}")
    return QuadratureResult(value, error, resolution, False, method, history)


def quad_spec(resolution: Optional[int] = None) -> Optional[QuadratureSpec]:
    """A QuadratureSpec starting at resolution, or None for the defaults."""
    if resolution is None:
        return None
    return QuadratureSpec(resolution=resolution, max_resolution=max(resolution, MAX_QUAD_RES))
