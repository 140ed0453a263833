"""
Thermodynamics of the infinite lattice in closed form.

All quantities are dimensionless: -beta f, U/J and C/k_B as functions of K = J/(k_B T). The internal energy and the
specific heat go through the complete elliptic integrals of modulus k1 = 2 sinh 2K / cosh^2 2K. Everything is
written with t = tanh 2K and sech 2K, so strong couplings never overflow, and the complement
sqrt(1 - k1^2) = |(t - sech 2K)(t + sech 2K)| is formed directly so that K close to K_c keeps full precision.
"""
import dataclasses
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import integrate, optimize

from kacward.core.transfer import det_closed_form, det_from_coupling, log_det_mean, trace_power_integral
from kacward.utils.constants import (
    AGM_MAX_ITER, AGM_TOL, CRITICAL_MODULUS_TOL, CRITICAL_NUDGE, CRITICAL_NUDGE_WINDOW, DEFAULT_SERIES_TERMS,
    NEAR_CRITICAL_WINDOW, SERIES_DOMAIN_TOL)
from kacward.utils.exceptions import ConsistencyError, DivergenceError, SingularityError
from kacward.utils.logging import logger
from kacward.utils.quadrature import QuadratureResult, QuadratureSpec, integrate_periodic

LN2 = math.log(2.0)
K_CRITICAL = 0.5 * math.asinh(1.0)  # ln(1 + sqrt 2) / 2


def _log_cosh(x: float) -> float:
    x = abs(x)
    return x + math.log1p(math.exp(-2.0 * x)) - LN2


def _hyperbolic_2K(K: float) -> Tuple[float, float, float]:
    # tanh 2K, sech 2K and ln cosh 2K without forming cosh 2K
    x = 2.0 * abs(K)
    sech = 2.0 * math.exp(-x) / (1.0 + math.exp(-2.0 * x))
    return math.tanh(2.0 * K), sech, _log_cosh(x)


@dataclass(frozen=True)
class CouplingPoint:
    """The coupling K with u = tanh K, k = tanh 2K / (2 cosh 2K) and k1 = 4k."""
    K: float
    u: float
    k: float
    k1: float

    @classmethod
    def from_K(cls, K: float) -> 'CouplingPoint':
        t, sech, _ = _hyperbolic_2K(K)
        k = 0.5 * t * sech
        return cls(K, math.tanh(K), k, 4.0 * k)


def coupling_identity_residuals(K: float, eps: float = 0.7, eta: float = 2.1) -> Dict[str, float]:
    """
    Residuals of the identities linking u = tanh K to the hyperbolic functions of 2K.

    The one-minus-u-squared and determinant identities are given both with cosh K (which holds) and with cosh 2K
    (which does not, except at K = 0); the determinant forms are compared at the angles (eps, eta).
    """
    u = math.tanh(K)
    s, c = math.sinh(2.0 * K), math.cosh(2.0 * K)
    det = float(det_closed_form(eps, eta, u))
    return {
        'u_half_sinh': u - 0.5 * s * (1.0 - u * u),
        'one_plus_u2_squared': (1.0 + u * u)**2 - c * c * (1.0 - u * u)**2,
        'one_minus_u2': (1.0 - u * u) - 1.0 / math.cosh(K)**2,
        'one_minus_u2_with_cosh_2K': (1.0 - u * u) - 1.0 / (c * c),
        'determinant': det - float(det_from_coupling(eps, eta, K)),
        'determinant_with_cosh_2K': det - (c * c - s * (math.cos(eps) + math.cos(eta))) / c**4,
    }


def _agm_elliptic(k: float, kp: float) -> Tuple[float, float, float]:
    # F = pi / (2 AGM(1, k')), E = F (1 - sum_n 2^(n-1) c_n^2) with c_0 = k, and E - k'^2 F = F (k^2 - sum)
    a, b, c = 1.0, kp, k
    total = 0.5 * c * c
    for n in range(1, AGM_MAX_ITER + 1):
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        total += 2.0**(n - 1) * c * c
        if abs(c) <= AGM_TOL * a:
            F = math.pi / (2.0 * a)
            return F, F * (1.0 - total), F * (k * k - total)
    raise ConsistencyError(f"AGM iteration did not converge in {AGM_MAX_ITER} steps for k={k}")


def _complement(k1: float) -> float:
    k1 = abs(k1)
    if k1 > 1.0:
        raise ValueError(f"elliptic modulus must satisfy |k| <= 1, got {k1}")
    return math.sqrt((1.0 - k1) * (1.0 + k1))


def elliptic_F(k1: float) -> float:
    """Complete elliptic integral of the first kind, int_0^{pi/2} (1 - k1^2 sin^2 t)^(-1/2) dt."""
    kp = _complement(k1)
    if kp == 0.0:
        raise DivergenceError("F(k) diverges logarithmically at k = 1")
    return _agm_elliptic(abs(k1), kp)[0]


def elliptic_E(k1: float) -> float:
    """Complete elliptic integral of the second kind, int_0^{pi/2} (1 - k1^2 sin^2 t)^(1/2) dt."""
    kp = _complement(k1)
    if kp == 0.0:
        return 1.0
    return _agm_elliptic(abs(k1), kp)[1]


def elliptic_F_asymptote_gap(k1: float) -> float:
    """F(k1) - ln(4 / sqrt(1 - k1^2)), which tends to 0 as k1 -> 1-."""
    return elliptic_F(k1) - math.log(4.0 / _complement(k1))


def _elliptic_at(K: float) -> Tuple[float, float, float, float, float]:
    # t = tanh 2K, sech 2K, q = 2 t^2 - 1, kp = sqrt(1 - k1^2) and k1 at K > 0
    t, sech, _ = _hyperbolic_2K(K)
    q = (t - sech) * (t + sech)
    return t, sech, q, abs(q), 2.0 * t * sech


def _near_critical(K: float) -> bool:
    return abs(abs(K) - K_CRITICAL) < NEAR_CRITICAL_WINDOW


def free_energy_grid(K: float, quad: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """
    -beta f = ln 2 + (1/2) mean over [0, 2pi)^2 of ln[cosh^2 2K - sinh 2K (cos eps + cos eta)].

    The bracket is factored as cosh^2 2K [1 - (k1/2)(cos eps + cos eta)], so only the second factor is
    integrated. Close to K_c the grid is shifted by half a cell, so (0, 0) is never a node, and refinements are
    Richardson-extrapolated.
    """
    if K == 0.0:
        return QuadratureResult(LN2, 0.0, 0, True, 'exact')
    quad = quad or QuadratureSpec()
    if _near_critical(K):
        quad = dataclasses.replace(quad, offset=True, richardson=True)
    _, _, _, _, k1 = _elliptic_at(abs(K))
    half = 0.5 * math.copysign(k1, K)

    def integrand(eps, eta):
        return np.log1p(-half * (np.cos(eps) + np.cos(eta)))

    result = integrate_periodic(integrand, quad)
    value = LN2 + _log_cosh(2.0 * K) + 0.5 * result.value
    return dataclasses.replace(result, value=value, error=0.5 * result.error)


def free_energy_line(K: float) -> QuadratureResult:
    """
    -beta f with the eta integral done in closed form.

    mean_eta ln(a - b cos eta) = ln[(a + sqrt(a^2 - b^2)) / 2], leaving one integral over eps in [0, pi] for
    scipy.integrate.quad. Both a and b are taken relative to cosh^2 2K, with b = k1 / 2.
    """
    if K == 0.0:
        return QuadratureResult(LN2, 0.0, 0, True, 'exact')
    _, _, _, _, k1 = _elliptic_at(abs(K))
    b = 0.5 * math.copysign(k1, K)

    def integrand(eps: float) -> float:
        a = 1.0 - b * math.cos(eps)
        return math.log(0.5 * (a + math.sqrt(max((a - b) * (a + b), 0.0))))

    value, error = integrate.quad(integrand, 0.0, math.pi, epsabs=1e-14, epsrel=1e-13, limit=200)
    return QuadratureResult(LN2 + _log_cosh(2.0 * K) + value / (2.0 * math.pi), error / (2.0 * math.pi), 0,
                            error < 1e-10, 'quad')


def free_energy_density(K: float, quad: Optional[QuadratureSpec] = None, method: str = 'grid') -> float:
    """
    Free energy per site of the infinite lattice, -f / (k_B T).

    Parameters:
        K (float): Dimensionless coupling.
        quad (QuadratureSpec): Grid parameters for method='grid'.
        method (str): 'grid' (periodic trapezoidal rule in both angles) or 'line' (one angle in closed form).

    Returns:
        float: -beta f.
    """
    if method == 'grid':
        result = free_energy_grid(K, quad)
    elif method == 'line':
        result = free_energy_line(K)
    else:
        raise ValueError(f"unknown free-energy method {method!r}; expected 'grid' or 'line'")
    if not result.converged:
        logger.warning(f"free energy at K={K} not converged; error estimate {result.error:.3e}")
    return result.value


def finite_size_log_z(N: int, K: float, quad: Optional[QuadratureSpec] = None) -> float:
    """
    ln Z / N^2 for the N x N lattice with the border contributions neglected.

    ln 2 + 2 (1 - 1/N) ln cosh K + (1/2) mean ln det(I - uM). This is an approximation whose error is of
    order 1/N; it tends to free_energy_density(K) as N grows.
    """
    if N < 1:
        raise ValueError(f"invalid size: N must be >= 1, got {N}")
    if K == 0.0:
        return LN2
    quad = quad or QuadratureSpec()
    if _near_critical(K):
        quad = dataclasses.replace(quad, offset=True, richardson=True)
    log_det = log_det_mean(math.tanh(K), quad)
    return LN2 + 2.0 * (1.0 - 1.0 / N) * _log_cosh(K) + 0.5 * log_det.value


def series_coefficient(n: int) -> int:
    """((2n)! / (n!)^2)^2 as an exact integer."""
    if n < 1:
        raise ValueError(f"series index must be positive, got {n}")
    return math.comb(2 * n, n)**2


def series_partial(K: float, n_max: int = DEFAULT_SERIES_TERMS) -> float:
    """
    -beta f = ln 2 + ln cosh 2K - sum_{n=1}^{n_max} ((2n)!/(n!)^2)^2 k^(2n) / (4n).

    Raises:
        DivergenceError: when 4|k| >= 1, i.e. at the critical coupling.
    """
    point = CouplingPoint.from_K(K)
    if 4.0 * abs(point.k) >= 1.0 - SERIES_DOMAIN_TOL:
        raise DivergenceError(f"k-series diverges for 4|k| >= 1 (K={K}, 4|k|={4 * abs(point.k):.15f})")
    total = LN2 + _log_cosh(2.0 * K)
    if point.k == 0.0:
        return total
    log_k2 = 2.0 * math.log(abs(point.k))
    terms = [math.exp(math.log(series_coefficient(n)) + n * log_k2) / (4 * n) for n in range(1, n_max + 1)]
    return total - math.fsum(terms)


def high_temperature_series(K: float, order: int) -> float:
    """ln 2 + 2 ln cosh K + (1/2) sum_{n <= order} -mean Tr (uM)^n / n, the bulk weak-coupling expansion."""
    u = math.tanh(K)
    total = LN2 + 2.0 * _log_cosh(K)
    terms = [-trace_power_integral(n, u) / n for n in range(1, order + 1)]
    return total + 0.5 * math.fsum(terms)


def critical_coupling() -> float:
    """
    The positive K_c with 2 sinh 2K_c = cosh^2 2K_c.

    That residual equals -(sinh 2K - 1)^2 and never changes sign, so the bisection runs on sinh 2K - 1, which has
    the same root.
    """
    root = optimize.bisect(lambda K: math.sinh(2.0 * K) - 1.0, 0.1, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps)
    if abs(root - K_CRITICAL) > 1e-14:
        raise ConsistencyError(f"bisection gave K_c={root!r}, closed form is {K_CRITICAL!r}")
    return root


def critical_report() -> Dict[str, float]:
    Kc = critical_coupling()
    point = CouplingPoint.from_K(Kc)
    s, c = math.sinh(2.0 * Kc), math.cosh(2.0 * Kc)
    return {
        'K_c': Kc,
        'closed_form': K_CRITICAL,
        'T_c_over_J': 1.0 / Kc,
        'sinh_2Kc': s,
        'tanh2_2Kc': math.tanh(2.0 * Kc)**2,
        'k1': point.k1,
        'u_c': point.u,
        'residual_2sinh_minus_cosh2': 2.0 * s - c * c,
        'U_over_J': internal_energy(Kc),
    }


def internal_energy(K: float) -> float:
    """
    U/J = -coth 2K [1 + (2 tanh^2 2K - 1) (2/pi) F(k1)].

    The factor 2 tanh^2 2K - 1 vanishes at K_c where F diverges; their product is taken as 0 there. For J < 0
    the energy is odd in K.
    """
    if K == 0.0:
        return 0.0
    if K < 0.0:
        return -internal_energy(-K)
    t, _, q, kp, k1 = _elliptic_at(K)
    if kp <= CRITICAL_MODULUS_TOL:
        bracket = 1.0
    else:
        F, _, _ = _agm_elliptic(k1, kp)
        bracket = 1.0 + q * (2.0 / math.pi) * F
    return -bracket / t


def internal_energy_integral(K: float, quad: Optional[QuadratureSpec] = None) -> float:
    """
    U/J = -coth 2K [1 + q I], with q = 2 tanh^2 2K - 1 and I the mean over [0, 2pi)^2 of
    1 / (1 - (k1/2)(cos eps + cos eta)).
    """
    if K == 0.0:
        return 0.0
    if K < 0.0:
        return -internal_energy_integral(-K, quad)
    t, _, q, kp, k1 = _elliptic_at(K)
    if kp <= CRITICAL_MODULUS_TOL:
        return -1.0 / t
    quad = quad or QuadratureSpec(resolution=64, offset=True, tol=1e-12)
    result = integrate_periodic(lambda eps, eta: 1.0 / (1.0 - 0.5 * k1 * (np.cos(eps) + np.cos(eta))), quad)
    return -(1.0 + q * result.value) / t


def specific_heat(K: float) -> float:
    """
    C/k_B = K^2 dg/dK with g = -U/J = coth 2K [1 + q (2/pi) F(k1)], q = 2 tanh^2 2K - 1.

    The derivative uses dF/dk = E/(k(1 - k^2)) - F/k and k1' = -4q / cosh 2K, which gives
    g' = -2 csch^2 2K [1 + q (2/pi) F] + coth 2K (2/pi) [q' F - 2 coth 2K (E - (1 - k1^2) F)]
    with q' = 8 sinh 2K / cosh^3 2K = 8 tanh 2K sech^2 2K.

    Raises:
        SingularityError: exactly at K_c, where C diverges logarithmically.
    """
    if K == 0.0:
        return 0.0
    if K < 0.0:
        return specific_heat(-K)
    t, sech, q, kp, k1 = _elliptic_at(K)
    if kp <= CRITICAL_MODULUS_TOL:
        raise SingularityError(f"specific heat diverges at the critical coupling K={K}")
    F, _, gap = _agm_elliptic(k1, kp)
    coth = 1.0 / t
    csch2 = (sech * coth)**2
    dq = 8.0 * t * sech * sech
    dg = -2.0 * csch2 * (1.0 + q * (2.0 / math.pi) * F) + coth * (2.0 / math.pi) * (dq * F - 2.0 * coth * gap)
    return K * K * dg


def specific_heat_as_printed(K: float) -> float:
    """(2 k1 / pi) (K coth 2K)^2 {2F - 2E + 2 (tanh^2 2K - 1) G} with G = pi/2 + (2 tanh^2 2K - 1) F."""
    if K == 0.0:
        return 0.0
    t, _, q, kp, k1 = _elliptic_at(abs(K))
    if kp <= CRITICAL_MODULUS_TOL:
        raise SingularityError(f"specific heat diverges at the critical coupling K={K}")
    F, E, _ = _agm_elliptic(k1, kp)
    G = 0.5 * math.pi + q * F
    return (2.0 * k1 / math.pi) * (K / t)**2 * (2.0 * F - 2.0 * E + 2.0 * (t * t - 1.0) * G)


def specific_heat_finite_difference(K: float, h: float = 1e-4) -> float:
    """C/k_B = -K^2 dU/dK from central differences of internal_energy, Richardson-extrapolated in h."""

    def central(step: float) -> float:
        return (internal_energy(K + step) - internal_energy(K - step)) / (2.0 * step)

    return -K * K * (4.0 * central(0.5 * h) - central(h)) / 3.0


def specific_heat_discrepancy(K: float) -> Dict[str, float]:
    """Closed-form and printed specific heat against the finite-difference oracle."""
    oracle = specific_heat_finite_difference(K)
    closed, printed = specific_heat(K), specific_heat_as_printed(K)
    return {
        'K': K,
        'finite_difference': oracle,
        'closed_form': closed,
        'as_printed': printed,
        'closed_form_error': abs(closed - oracle),
        'as_printed_error': abs(printed - oracle),
    }


@dataclass(frozen=True)
class ThermoPoint:
    K: float
    u: float
    k1: float
    minus_beta_f: float
    U_over_J: float
    C_over_kB: float
    nudged: bool = False

    def row(self) -> Tuple[float, ...]:
        return self.K, self.u, self.k1, self.minus_beta_f, self.U_over_J, self.C_over_kB

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def nudge_off_critical(K: float) -> Tuple[float, bool]:
    """
    Move K a further CRITICAL_NUDGE away from +-K_c when it lies within CRITICAL_NUDGE_WINDOW of it; K_c itself
    goes to K_c + CRITICAL_NUDGE.
    """
    offset = abs(K) - K_CRITICAL
    if abs(offset) >= CRITICAL_NUDGE_WINDOW:
        return K, False
    direction = 1.0 if offset >= 0.0 else -1.0
    nudged = math.copysign(abs(K) + direction * CRITICAL_NUDGE, K)
    logger.warning(f"K={K!r} is within {CRITICAL_NUDGE_WINDOW:g} of K_c; evaluating at K={nudged!r} instead")
    return nudged, True


def thermo_point(K: float, method: str = 'line', quad: Optional[QuadratureSpec] = None) -> ThermoPoint:
    """
    Free energy, internal energy and specific heat at one coupling.

    Parameters:
        K (float): Dimensionless coupling; points next to +-K_c are nudged off it.
        method (str): Free-energy route, see free_energy_density.
        quad (QuadratureSpec): Grid parameters for method='grid'.

    Returns:
        ThermoPoint: the row written to CSV output.
    """
    K, nudged = nudge_off_critical(K)
    point = CouplingPoint.from_K(K)
    return ThermoPoint(
        K=K,
        u=point.u,
        k1=point.k1,
        minus_beta_f=free_energy_density(K, quad, method),
        U_over_J=internal_energy(K),
        C_over_kB=specific_heat(K),
        nudged=nudged,
    )


def coupling_grid(kmin: float, kmax: float, steps: int) -> List[float]:
    """steps equally spaced couplings from kmin to kmax inclusive, in increasing order."""
    if steps < 1:
        raise ValueError(f"steps must be positive, got {steps}")
    if kmin > kmax:
        raise ValueError(f"kmin={kmin} exceeds kmax={kmax}")
    if steps == 1:
        return [float(kmin)]
    return [float(K) for K in np.linspace(kmin, kmax, steps)]


def thermo_sweep(kmin: float, kmax: float, steps: int, method: str = 'line',
                 quad: Optional[QuadratureSpec] = None) -> List[ThermoPoint]:
    """ThermoPoints on coupling_grid(kmin, kmax, steps)."""
    return [thermo_point(K, method, quad) for K in coupling_grid(kmin, kmax, steps)]
