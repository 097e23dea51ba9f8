"""Scalar special functions: log-gamma, digamma, Pochhammer, and 2F3.

Everything here works on plain Python floats and is pure, so all functions
are safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NonConvergenceError

EULER_GAMMA = 0.5772156649015328606

# Lanczos coefficients, g = 7, nine terms.  Good to ~1e-15 relative for
# the shifted argument range used below.
_LANCZOS_G = 7.0
_LANCZOS = (
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

_LOG_SQRT_2PI = 0.9189385332046727418


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for power-series summation."""

    rel_tol: float = 1e-14
    max_terms: int = 10000
    consecutive_small: int = 3

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")
        if self.consecutive_small < 1:
            raise DomainError(
                f"consecutive_small must be >= 1, got {self.consecutive_small}")


DEFAULT_SERIES_CONTROL = SeriesControl()

# A partial sum this much larger than the final value means the series
# cancelled severely and the result has lost ~10 digits.
_CANCELLATION_RATIO = 1e10


@dataclass(frozen=True)
class SeriesResult:
    """Value of a summed series plus diagnostics about how it converged."""

    value: float
    terms_used: int
    max_partial: float
    cancellation_degraded: bool


def ln_gamma(x: float) -> float:
    """log of the gamma function for x > 0.

    Lanczos approximation; arguments below 1/2 are lifted with
    Gamma(x) = Gamma(x+1)/x.
    """
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    shift = 0.0
    while x < 0.5:
        shift -= math.log(x)
        x += 1.0
    xm1 = x - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (xm1 + i)
    t = xm1 + _LANCZOS_G + 0.5
    return shift + _LOG_SQRT_2PI + (xm1 + 0.5) * math.log(t) - t + math.log(acc)


def recip_gamma(x: float) -> float:
    """1/Gamma(x) for any real x; exactly zero at the poles 0, -1, -2, ..."""
    if x > 0:
        return math.exp(-ln_gamma(x))
    if x == math.floor(x):
        return 0.0
    # reflection: 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi
    return math.exp(ln_gamma(1.0 - x)) * math.sin(math.pi * x) / math.pi


# Asymptotic tail sum_{k>=1} B_{2k}/(2k x^{2k}) written as Horner
# coefficients in 1/x^2; valid once x >= 10.
_DIGAMMA_TAIL = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def digamma(x: float) -> float:
    """psi(x) for x > 0 via upward recurrence into the asymptotic regime."""
    if not x > 0:
        raise DomainError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    for c in reversed(_DIGAMMA_TAIL):
        tail = inv2 * (c + tail)
    return acc + math.log(x) - 0.5 / x - tail


def pochhammer(a: float, k: int) -> float:
    """Rising factorial a (a+1) ... (a+k-1); empty product is 1."""
    if k < 0:
        raise DomainError(f"pochhammer requires k >= 0, got {k}")
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


def _is_nonpositive_integer(b: float) -> bool:
    return b <= 0 and b == math.floor(b)


def hyp2f3_series(a1: float, a2: float, b1: float, b2: float, b3: float,
                  z: float, ctrl: SeriesControl | None = None) -> SeriesResult:
    """Sum the defining series of 2F3 with Kahan accumulation.

    Stops once `ctrl.consecutive_small` successive terms fall below
    rel_tol times the running partial sum.  The result carries a
    cancellation flag when intermediate partial sums exceeded the final
    value by more than ten orders of magnitude; callers that need full
    accuracy at large |z| should treat flagged values as unreliable.
    """
    if ctrl is None:
        ctrl = DEFAULT_SERIES_CONTROL
    for name, b in (("b1", b1), ("b2", b2), ("b3", b3)):
        if _is_nonpositive_integer(b):
            raise DomainError(
                f"2F3 lower parameter {name}={b} is zero or a negative integer")

    total = 1.0  # k = 0 term
    comp = 0.0
    term = 1.0
    max_partial = 1.0
    streak = 0
    for k in range(ctrl.max_terms):
        term *= (a1 + k) * (a2 + k) / ((b1 + k) * (b2 + k) * (b3 + k)) \
            * z / (k + 1.0)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(total) > max_partial:
            max_partial = abs(total)
        if abs(term) < ctrl.rel_tol * max(abs(total), 1e-300):
            streak += 1
            if streak >= ctrl.consecutive_small:
                degraded = max_partial > _CANCELLATION_RATIO * max(abs(total), 1e-300)
                return SeriesResult(total, k + 1, max_partial, degraded)
        else:
            streak = 0
    raise NonConvergenceError(
        f"2F3 series did not converge within {ctrl.max_terms} terms "
        f"(partial={total!r}, last term={term!r})",
        partial=total, last_term=abs(term))


def hyp2f3(a1: float, a2: float, b1: float, b2: float, b3: float, z: float,
           ctrl: SeriesControl | None = None) -> float:
    """2F3(a1, a2; b1, b2, b3; z) by its defining series."""
    return hyp2f3_series(a1, a2, b1, b2, b3, z, ctrl).value
