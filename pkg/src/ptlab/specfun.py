"""
Complex gamma function in log space.

Lanczos approximation (g = 7, nine coefficients) for Re z >= 0.5 and the
reflection formula below it. Ratios of gamma functions are always formed
as differences of logarithms so that arguments growing like k/alpha never
overflow.
"""

import cmath
import logging
import math
from typing import Iterable, Optional, Tuple

from ptlab.errors import PoleError

logger = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-9

LANCZOS_G = 7.0
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)

# beyond this |Im(pi z)| sin(pi z) would overflow in cmath.sin
_LOGSIN_SWITCH = 30.0


def pole_index(z: complex, tolerance: float = POLE_TOLERANCE) -> Optional[int]:
    """Return n if z lies within tolerance of the pole -n, else None"""
    z = complex(z)
    n = round(-z.real)
    if n < 0:
        return None
    if abs(z + n) < tolerance:
        return int(n)
    return None


def _lanczos_lngamma(z: complex) -> complex:
    """log Gamma for Re z >= 0.5"""
    z = z - 1.0
    series = LANCZOS_COEFFICIENTS[0]
    for i, c in enumerate(LANCZOS_COEFFICIENTS[1:], start=1):
        series += c / (z + i)
    t = z + LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * cmath.log(t) - t + cmath.log(series)


def _log_sin_pi(z: complex) -> complex:
    """log sin(pi z), stable for large |Im z| (branch fixed up to 2 pi i)"""
    w = math.pi * z
    if abs(w.imag) <= _LOGSIN_SWITCH:
        return cmath.log(cmath.sin(w))
    if w.imag > 0:
        # sin w = (i/2) e^{-iw} (1 - e^{2iw})
        return -1j * w + complex(-math.log(2.0), 0.5 * math.pi) + cmath.log(1.0 - cmath.exp(2j * w))
    return 1j * w + complex(-math.log(2.0), -0.5 * math.pi) + cmath.log(1.0 - cmath.exp(-2j * w))


def lngamma(z: complex) -> complex:
    """
    Principal-branch log Gamma of a complex argument.

    Raises PoleError within POLE_TOLERANCE of a non-positive integer.
    """
    z = complex(z)
    n = pole_index(z)
    if n is not None:
        raise PoleError(z, n)
    if z.real >= 0.5:
        return _lanczos_lngamma(z)
    return _LOG_PI - _log_sin_pi(z) - _lanczos_lngamma(1.0 - z)


def gamma(z: complex) -> complex:
    return cmath.exp(lngamma(z))


def gamma_ratio(numerators: Iterable[complex], denominators: Iterable[complex]) -> Tuple[complex, bool]:
    """
    prod Gamma(numerators) / prod Gamma(denominators), evaluated in log space.

    Returns (value, pole_in_denominator). A denominator pole makes the ratio
    vanish and is flagged instead of raised; numerator poles raise PoleError.
    """
    log_value = 0j
    for z in numerators:
        log_value += lngamma(z)

    pole_in_denominator = False
    for z in denominators:
        if pole_index(z) is not None:
            pole_in_denominator = True
            continue
        log_value -= lngamma(z)

    if pole_in_denominator:
        logger.debug("gamma_ratio: denominator pole, returning 0")
        return 0j, True
    return cmath.exp(log_value), False
