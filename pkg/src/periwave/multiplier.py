"""Fourier multipliers of the nonlocal Laplacian, by several independent routes.

The multiplier m(nu) of the operator is radial and nonpositive, vanishes at
nu = 0, and reduces to -|nu|^2 at the critical kernel exponent beta = n + 2.
Four evaluation paths are provided:

* a hypergeometric series (default, with automatic fallback),
* direct quadrature of the defining kernel integral (beta < n + 2),
* quadrature of the second-order-corrected integral (beta < n + 4),
* a radial power series,

plus the large-frequency asymptotic formula.  Agreement between the paths is
the basis of the package's cross-validation tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import j0

from .errors import DomainError, NonConvergenceError
from .specfun import (
    EULER_GAMMA,
    SeriesControl,
    digamma,
    hyp2f3_series,
    ln_gamma,
    recip_gamma,
)


@dataclass(frozen=True)
class KernelParams:
    """Dimension, horizon radius, and kernel exponent of the operator."""

    n: int
    delta: float
    beta: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension n must be a positive integer, got {self.n}")
        if not self.delta > 0:
            raise DomainError(f"horizon delta must be positive, got {self.delta}")
        if not self.beta < self.n + 4:
            raise DomainError(
                f"kernel exponent beta={self.beta} not supported; require beta < n+4 = {self.n + 4}")


def scaling_constant(params: KernelParams) -> float:
    """Kernel normalization 2(n+2-beta)Gamma(n/2+1) / (pi^(n/2) delta^(n+2-beta)).

    Positive below the critical exponent beta = n+2, zero at it, negative above.
    """
    n, beta, delta = params.n, params.beta, params.delta
    gamma_half = math.exp(ln_gamma(n / 2.0 + 1.0))
    return 2.0 * (n + 2.0 - beta) * gamma_half / (math.pi ** (n / 2.0) * delta ** (n + 2.0 - beta))


# ---------------------------------------------------------------------------
# spherical weights
#
# _sphere_cos_defect(n, u) integrates cos(u * e . w) - 1 over the unit sphere
# S^{n-1} in w; the extended variant keeps the +u^2/2 Taylor correction.  Both
# equal 2 pi^{n/2} sum_{k>=kmin} (-u^2/4)^k / (k! Gamma(n/2+k)) with kmin = 1
# resp. 2, which is also the series used on the near-origin segment.

_SMALL_U = 0.5
_WEIGHT_TERMS = 18


def _weight_series(n: int, u: np.ndarray, kmin: int) -> np.ndarray:
    x = -0.25 * u * u
    term = np.power(x, kmin) / (math.factorial(kmin) * math.gamma(n / 2.0 + kmin))
    total = term.copy()
    for k in range(kmin, kmin + _WEIGHT_TERMS):
        term = term * x / ((k + 1.0) * (n / 2.0 + k))
        total += term
    return 2.0 * math.pi ** (n / 2.0) * total


def _sphere_cos_defect(n: int, u: np.ndarray, extended: bool) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if n == 1 and not extended:
        return -4.0 * np.sin(0.5 * u) ** 2  # 2(cos u - 1), cancellation-free
    out = np.empty_like(u)
    small = u < _SMALL_U
    out[small] = _weight_series(n, u[small], 2 if extended else 1)
    ub = u[~small]
    if n == 1:
        direct = ub * ub - 4.0 * np.sin(0.5 * ub) ** 2
    elif n == 2:
        direct = j0(ub) - 1.0
        if extended:
            direct = direct + 0.25 * ub * ub
        direct = 2.0 * math.pi * direct
    elif n == 3:
        direct = np.sin(ub) / ub - 1.0
        if extended:
            direct = direct + ub * ub / 6.0
        direct = 4.0 * math.pi * direct
    else:
        raise DomainError(f"quadrature paths support n in {{1, 2, 3}}, got n={n}")
    out[~small] = direct
    return out


# ---------------------------------------------------------------------------
# radial power series (also the exact near-origin quadrature segment)

_HEAD_CTRL = SeriesControl(rel_tol=1e-16, max_terms=400, consecutive_small=3)


def _radial_series_sum(n: int, beta: float, r: float, radius: float,
                       kmin: int, ctrl: SeriesControl) -> float:
    """sum_{k>=kmin} (-r^2/4)^k / (k! Gamma(n/2+k)) * radius^(n+2k-beta) / (n+2k-beta)."""
    x = -0.25 * r * r * radius * radius
    # carry p_k = (-r^2/4)^k radius^(n+2k-beta) / (k! Gamma(n/2+k))
    p = radius ** (n - beta) * x ** kmin / (math.factorial(kmin) * math.gamma(n / 2.0 + kmin))
    total = 0.0
    comp = 0.0
    streak = 0
    k = kmin
    for _ in range(ctrl.max_terms):
        term = p / (n + 2.0 * k - beta)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) < ctrl.rel_tol * max(abs(total), 1e-300):
            streak += 1
            if streak >= ctrl.consecutive_small:
                return total
        else:
            streak = 0
        p *= x / ((k + 1.0) * (n / 2.0 + k))
        k += 1
    raise NonConvergenceError(
        f"radial series did not converge within {ctrl.max_terms} terms "
        f"(partial={total!r})", partial=total, last_term=abs(p / (n + 2.0 * k - beta)))


# ---------------------------------------------------------------------------
# composite Gauss-Legendre on the oscillatory segment
#
# Chunk widths are capped by half an oscillation period pi/r and grow
# geometrically away from the near-origin cut, so both the trig phase and the
# algebraic steepness rho^(n-1-beta) stay resolved.  Refinement halves every
# chunk and compares; QUADPACK is not used because no weighted rule covers
# the Bessel-oscillatory n = 2 integrand.

_GL_NODES, _GL_WEIGHTS = leggauss(16)
_TAIL_ABS_TOL = 1e-13
_TAIL_REL_TOL = 1e-12
_MAX_REFINEMENTS = 10


def _chunk_edges(a: float, b: float, r: float) -> np.ndarray:
    cap = math.pi / max(r, 1.0)
    edges = [a]
    x = a
    while x < b:
        x = min(x + min(max(x, 1e-12), cap), b)
        edges.append(x)
    return np.asarray(edges)


def _composite_gl(f, edges: np.ndarray) -> float:
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    vals = f(x.ravel()).reshape(x.shape)
    return float(np.sum(half * (vals @ _GL_WEIGHTS)))


def _split_edges(edges: np.ndarray) -> np.ndarray:
    mids = 0.5 * (edges[:-1] + edges[1:])
    out = np.empty(edges.size + mids.size)
    out[0::2] = edges
    out[1::2] = mids
    return out


def _oscillatory_segment(f, a: float, b: float, r: float) -> float:
    edges = _chunk_edges(a, b, r)
    prev = _composite_gl(f, edges)
    for _ in range(_MAX_REFINEMENTS):
        edges = _split_edges(edges)
        cur = _composite_gl(f, edges)
        if abs(cur - prev) <= max(_TAIL_ABS_TOL, _TAIL_REL_TOL * abs(cur)):
            return cur
        prev = cur
    raise NonConvergenceError(
        f"radial quadrature on [{a}, {b}] stalled with error estimate "
        f"{abs(cur - prev):.3e}", partial=cur, last_term=abs(cur - prev))


def _radial_integral(n: int, beta: float, r: float, delta: float,
                     extended: bool) -> float:
    """integral_0^delta of the spherical weight at r*rho times rho^(n-1-beta)."""
    if n not in (1, 2, 3):
        raise DomainError(f"quadrature paths support n in {{1, 2, 3}}, got n={n}")
    kmin = 2 if extended else 1
    rho0 = min(delta, 1.0 / max(r, 1.0))
    head = 2.0 * math.pi ** (n / 2.0) * _radial_series_sum(
        n, beta, r, rho0, kmin, _HEAD_CTRL)
    if rho0 >= delta:
        return head

    def integrand(rho: np.ndarray) -> np.ndarray:
        return _sphere_cos_defect(n, r * rho, extended) * rho ** (n - 1.0 - beta)

    return head + _oscillatory_segment(integrand, rho0, delta, r)


# ---------------------------------------------------------------------------
# public evaluation paths


def multiplier_quadrature(params: KernelParams, r: float) -> float:
    """Multiplier from the defining kernel integral; requires beta < n + 2."""
    n, beta, delta = params.n, params.beta, params.delta
    if not beta < n + 2:
        raise DomainError(
            f"direct quadrature needs beta < n+2 = {n + 2}, got beta={beta}")
    if r < 0:
        raise DomainError(f"frequency magnitude must be nonnegative, got {r}")
    if r == 0:
        return 0.0
    return scaling_constant(params) * _radial_integral(n, beta, r, delta, extended=False)


def multiplier_extended_quadrature(params: KernelParams, r: float) -> float:
    """Multiplier from the second-order-corrected integral; valid for beta < n + 4."""
    n, beta, delta = params.n, params.beta, params.delta
    if r < 0:
        raise DomainError(f"frequency magnitude must be nonnegative, got {r}")
    if r == 0:
        return 0.0
    if beta == n + 2:
        return -(r * r)  # scaling constant vanishes, correction term drops out
    correction = scaling_constant(params) * _radial_integral(
        n, beta, r, delta, extended=True)
    return -(r * r) + correction


def multiplier_radial_series(params: KernelParams, r: float,
                             ctrl: SeriesControl | None = None) -> float:
    """Multiplier from its radial power series; beta = n + 2 is excluded."""
    n, beta, delta = params.n, params.beta, params.delta
    if beta == n + 2:
        raise DomainError(
            "radial series has a vanishing denominator at beta = n+2; "
            "use the hypergeometric path there")
    if r < 0:
        raise DomainError(f"frequency magnitude must be nonnegative, got {r}")
    if r == 0:
        return 0.0
    if ctrl is None:
        ctrl = SeriesControl()
    total = _radial_series_sum(n, beta, r, delta, 1, ctrl)
    return 2.0 * math.pi ** (n / 2.0) * scaling_constant(params) * total


def multiplier_asymptotic(params: KernelParams, r: float) -> float:
    """Leading large-frequency behaviour of the multiplier (r > 1)."""
    n, beta, delta = params.n, params.beta, params.delta
    if beta == n + 2:
        raise DomainError("no asymptotic branch exists at beta = n+2")
    if not r > 1:
        raise DomainError(f"asymptotic form is for r > 1, got r={r}")
    if beta == n:
        return -(2.0 * n / delta ** 2) * (
            2.0 * math.log(r) + math.log(delta ** 2 / 4.0)
            + EULER_GAMMA - digamma(n / 2.0))
    constant = -2.0 * n * (n + 2.0 - beta) / (delta ** 2 * (n - beta))
    coeff = 2.0 * (2.0 / delta) ** (n + 2.0 - beta) \
        * math.exp(ln_gamma((n + 4.0 - beta) / 2.0) + ln_gamma((n + 2.0) / 2.0)) \
        * recip_gamma(beta / 2.0) / (n - beta)
    return constant + coeff * r ** (beta - n)


def _hyp_path(params: KernelParams, r: float, ctrl: SeriesControl | None):
    n, beta, delta = params.n, params.beta, params.delta
    res = hyp2f3_series(
        1.0, (n + 2.0 - beta) / 2.0,
        2.0, (n + 2.0) / 2.0, (n + 4.0 - beta) / 2.0,
        -0.25 * (r * delta) ** 2, ctrl)
    return -(r * r) * res.value, res.cancellation_degraded


def _evaluate(params: KernelParams, r: float,
              ctrl: SeriesControl | None = None) -> tuple[float, str]:
    """Routed evaluation: hypergeometric first, quadrature when it degrades."""
    if r < 0:
        raise DomainError(f"frequency magnitude must be nonnegative, got {r}")
    if r == 0:
        return 0.0, "zero"
    n, beta = params.n, params.beta
    if beta == n + 2:
        return -(r * r), "laplacian"
    try:
        value, degraded = _hyp_path(params, r, ctrl)
        if not degraded:
            return value, "hyp2f3"
    except NonConvergenceError:
        pass
    if beta < n + 2:
        return multiplier_quadrature(params, r), "quadrature"
    return multiplier_extended_quadrature(params, r), "extended-quadrature"


def multiplier_hypergeometric(params: KernelParams, r: float,
                              ctrl: SeriesControl | None = None) -> float:
    """Multiplier -r^2 2F3(...; -r^2 delta^2/4), the default evaluation path.

    When the series flags catastrophic cancellation (large r*delta) the value
    is recomputed by the appropriate quadrature route instead of being
    returned with silently lost digits.
    """
    return _evaluate(params, r, ctrl)[0]


# ---------------------------------------------------------------------------
# tables over truncation boxes


@dataclass(frozen=True)
class MultiplierTable:
    """Multiplier values for every distinct squared frequency norm in a box.

    Keys are integer |k|^2 for k in [-K, K]^n; radiality makes that the
    complete information.  `paths` records which evaluation route produced
    each entry.
    """

    params: KernelParams
    box_radius: int
    values: dict[int, float]
    paths: dict[int, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.box_radius < 1:
            raise DomainError(f"box radius must be >= 1, got {self.box_radius}")
        if self.values.get(0) != 0.0:
            raise DomainError("multiplier table must contain the exact value 0.0 at |k|^2 = 0")
        for kk2, value in self.values.items():
            if kk2 < 0:
                raise DomainError(f"squared norm keys must be nonnegative, got {kk2}")
            if value > 0.0:
                raise DomainError(
                    f"multiplier table value {value} at |k|^2={kk2} is positive")

    def value(self, squared_norm: int) -> float:
        try:
            return self.values[squared_norm]
        except KeyError:
            raise DomainError(
                f"|k|^2={squared_norm} not tabulated (box radius {self.box_radius})") from None


def distinct_squared_norms(n: int, box_radius: int) -> list[int]:
    """Sorted distinct |k|^2 over the sup-norm box [-K, K]^n."""
    squares = np.arange(box_radius + 1, dtype=np.int64) ** 2
    sums = squares
    for _ in range(n - 1):
        sums = np.unique(sums[:, None] + squares[None, :])
    return [int(v) for v in np.unique(sums)]


def build_table(params: KernelParams, box_radius: int,
                ctrl: SeriesControl | None = None) -> MultiplierTable:
    """Evaluate the multiplier at every distinct squared norm in the box."""
    if box_radius < 1:
        raise DomainError(f"box radius must be >= 1, got {box_radius}")
    values: dict[int, float] = {}
    paths: dict[int, str] = {}
    for kk2 in distinct_squared_norms(params.n, box_radius):
        try:
            value, path = _evaluate(params, math.sqrt(kk2), ctrl)
        except NonConvergenceError as exc:
            raise NonConvergenceError(
                f"multiplier evaluation failed at |k|^2={kk2}: {exc}",
                partial=exc.partial, last_term=exc.last_term) from exc
        # round-off guard: analytic value is <= 0, clamp stray +eps
        values[kk2] = min(value, 0.0)
        paths[kk2] = path
    return MultiplierTable(params, box_radius, values, paths)


# ---------------------------------------------------------------------------
# monotonicity in the kernel exponent


@dataclass(frozen=True)
class MonotonicityScan:
    """Multiplier samples along a beta grid plus the strictness verdict."""

    betas: tuple[float, ...]
    values: tuple[float, ...]
    strictly_decreasing: bool
    all_negative: bool

    @property
    def verdict(self) -> bool:
        return self.strictly_decreasing and self.all_negative


def monotonicity_scan(n: int, delta: float, r: float,
                      beta_grid) -> MonotonicityScan:
    """Sample beta -> m(r) on a grid inside ((n+4)/2, n+4) and check decrease."""
    betas = [float(b) for b in beta_grid]
    if not betas:
        raise DomainError("beta grid is empty")
    if not r > 0:
        raise DomainError(f"monotonicity scan needs r > 0, got r={r}")
    lo, hi = (n + 4.0) / 2.0, n + 4.0
    for b in betas:
        if not lo < b < hi:
            raise DomainError(
                f"beta={b} outside the proven monotonicity interval ({lo}, {hi})")
    for prev, cur in zip(betas, betas[1:]):
        if not cur > prev:
            raise DomainError("beta grid must be strictly increasing")
    values = [_evaluate(KernelParams(n, delta, b), r)[0] for b in betas]
    decreasing = all(b < a for a, b in zip(values, values[1:]))
    negative = all(v < 0 for v in values)
    return MonotonicityScan(tuple(betas), tuple(values), decreasing, negative)
