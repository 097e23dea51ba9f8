"""Closed-form Fourier-space solutions of the nonlocal wave equation.

Each mode k evolves independently: u_hat_k'' = m_k u_hat_k (+ b_hat_k), with
m_k <= 0 taken from a multiplier table.  The solvers evaluate the closed
forms pointwise in t; there is no time-stepping error.  A fixed-step RK4
oracle integrates single modes numerically for cross-validation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import CorruptedTableError, DomainError, ShapeError
from .multiplier import MultiplierTable
from .torus import SpectralField, field_from_dict, field_to_dict, squared_norm_grid, zero_field

HOMOGENEOUS = "homogeneous"
FORCED = "forced"
COMBINED = "combined"
_KINDS = (HOMOGENEOUS, FORCED, COMBINED)

# Positive table entries beyond this scale are corruption, not round-off.
_POSITIVE_TOL = 1e-10


@dataclass(frozen=True)
class WaveProblem:
    """Multiplier table plus initial displacement f, velocity g, forcing b."""

    table: MultiplierTable
    f: SpectralField
    g: SpectralField
    b: SpectralField
    kind: str

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DomainError(f"unknown problem kind {self.kind!r}; expected one of {_KINDS}")
        dim = self.table.params.n
        K = self.table.box_radius
        for name, fld in (("f", self.f), ("g", self.g), ("b", self.b)):
            if fld.dim != dim or fld.box_radius != K:
                raise ShapeError(
                    f"field {name} has dim/box {fld.dim}/{fld.box_radius}, "
                    f"table expects {dim}/{K}")
        if self.kind == HOMOGENEOUS and np.any(self.b.data != 0):
            raise DomainError("homogeneous problems must have zero forcing")
        if self.kind == FORCED and (np.any(self.f.data != 0) or np.any(self.g.data != 0)):
            raise DomainError("forced problems must have zero initial data")


def homogeneous_problem(table: MultiplierTable, f: SpectralField,
                        g: SpectralField) -> WaveProblem:
    dim, K = table.params.n, table.box_radius
    return WaveProblem(table, f, g, zero_field(dim, K), HOMOGENEOUS)


def forced_problem(table: MultiplierTable, b: SpectralField) -> WaveProblem:
    dim, K = table.params.n, table.box_radius
    return WaveProblem(table, zero_field(dim, K), zero_field(dim, K), b, FORCED)


def combined_problem(table: MultiplierTable, f: SpectralField, g: SpectralField,
                     b: SpectralField) -> WaveProblem:
    return WaveProblem(table, f, g, b, COMBINED)


@dataclass(frozen=True)
class SolutionSnapshot:
    """The order-p time derivative of the solution at a fixed time."""

    t: float
    order: int
    field: SpectralField


def snapshot_to_json(snapshot: SolutionSnapshot) -> str:
    payload = field_to_dict(snapshot.field)
    payload["t"] = snapshot.t
    payload["order"] = snapshot.order
    return json.dumps(payload)


def snapshot_from_json(text: str) -> SolutionSnapshot:
    payload = json.loads(text)
    return SolutionSnapshot(float(payload["t"]), int(payload["order"]),
                            field_from_dict(payload))


# ---------------------------------------------------------------------------
# per-mode scalar kernels, vectorized over the coefficient box


def _omega_grid(table: MultiplierTable) -> np.ndarray:
    """sqrt(-m_k) over the box; raises on positive table values."""
    n, K = table.params.n, table.box_radius
    lut = np.full(n * K * K + 1, np.nan)
    for kk2, value in table.values.items():
        if value > _POSITIVE_TOL * (1.0 + kk2):
            raise CorruptedTableError(
                f"table value {value} at |k|^2={kk2} is positive")
        lut[kk2] = min(value, 0.0)
    m = lut[squared_norm_grid(n, K)]
    if np.any(np.isnan(m)):
        raise CorruptedTableError("table is missing entries for its own box")
    return np.sqrt(-m)


def _sin_over_omega(omega: np.ndarray, t: float) -> np.ndarray:
    """sin(omega t)/omega with the removable singularity filled by its series."""
    x = omega * t
    small = x < 1e-4
    safe = np.where(omega == 0.0, 1.0, omega)
    return np.where(small, t * (1.0 - x * x / 6.0), np.sin(x) / safe)


def _one_minus_cos_over_omega2(omega: np.ndarray, t: float) -> np.ndarray:
    """(1 - cos(omega t))/omega^2, series-protected near omega t = 0."""
    x = omega * t
    small = x < 1e-4
    safe = np.where(omega == 0.0, 1.0, omega)
    direct = 2.0 * np.sin(0.5 * x) ** 2 / safe ** 2
    return np.where(small, 0.5 * t * t * (1.0 - x * x / 12.0), direct)


def _trig_shift(x: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """cos(x + p pi/2) and sin(x + p pi/2), exactly, via the quarter-turn map."""
    c, s = np.cos(x), np.sin(x)
    quarter = p % 4
    if quarter == 0:
        return c, s
    if quarter == 1:
        return -s, c
    if quarter == 2:
        return -c, -s
    return s, -c


def _require_time(t: float):
    if not t >= 0:
        raise DomainError(f"time must be nonnegative, got {t}")


def _center(dim: int, K: int) -> tuple[int, ...]:
    return (K,) * dim


# ---------------------------------------------------------------------------
# homogeneous problem


def solve_homogeneous(problem: WaveProblem, t: float) -> SolutionSnapshot:
    """u_hat_k(t) = f_hat_k cos(w t) + g_hat_k sin(w t)/w, w = sqrt(-m_k)."""
    if problem.kind not in (HOMOGENEOUS, COMBINED):
        raise DomainError(f"solve_homogeneous expects a homogeneous or combined problem, got {problem.kind}")
    _require_time(t)
    f, g = problem.f, problem.g
    omega = _omega_grid(problem.table)
    data = f.data * np.cos(omega * t) + g.data * _sin_over_omega(omega, t)
    center = _center(f.dim, f.box_radius)
    data[center] = f.data[center] + g.data[center] * t
    out = SpectralField(f.dim, f.box_radius, data, f.real_flag and g.real_flag)
    return SolutionSnapshot(t, 0, out)


def derivative_homogeneous(problem: WaveProblem, t: float, p: int) -> SolutionSnapshot:
    """Order-p time derivative of the homogeneous solution, coefficientwise."""
    if p == 0:
        return solve_homogeneous(problem, t)
    if problem.kind not in (HOMOGENEOUS, COMBINED):
        raise DomainError(f"derivative_homogeneous expects a homogeneous or combined problem, got {problem.kind}")
    if p < 0:
        raise DomainError(f"derivative order must be nonnegative, got {p}")
    _require_time(t)
    f, g = problem.f, problem.g
    omega = _omega_grid(problem.table)
    cos_p, sin_p = _trig_shift(omega * t, p)
    data = f.data * omega ** p * cos_p + g.data * omega ** (p - 1) * sin_p
    center = _center(f.dim, f.box_radius)
    data[center] = g.data[center] if p == 1 else 0.0
    out = SpectralField(f.dim, f.box_radius, data, f.real_flag and g.real_flag)
    return SolutionSnapshot(t, p, out)


# ---------------------------------------------------------------------------
# forced problem (zero initial data)


def solve_forced(problem: WaveProblem, t: float) -> SolutionSnapshot:
    """u_hat_k(t) = (b_hat_k / m_k)(cos(w t) - 1); zero mode grows like t^2/2."""
    if problem.kind not in (FORCED, COMBINED):
        raise DomainError(f"solve_forced expects a forced or combined problem, got {problem.kind}")
    _require_time(t)
    b = problem.b
    omega = _omega_grid(problem.table)
    data = b.data * _one_minus_cos_over_omega2(omega, t)
    center = _center(b.dim, b.box_radius)
    data[center] = b.data[center] * t * t / 2.0
    out = SpectralField(b.dim, b.box_radius, data, b.real_flag)
    return SolutionSnapshot(t, 0, out)


def derivative_forced(problem: WaveProblem, t: float, p: int) -> SolutionSnapshot:
    """Order-p derivative of the forced solution, coefficientwise."""
    if p == 0:
        return solve_forced(problem, t)
    if problem.kind not in (FORCED, COMBINED):
        raise DomainError(f"derivative_forced expects a forced or combined problem, got {problem.kind}")
    if p < 0:
        raise DomainError(f"derivative order must be nonnegative, got {p}")
    _require_time(t)
    b = problem.b
    omega = _omega_grid(problem.table)
    if p == 1:
        data = b.data * _sin_over_omega(omega, t)
    else:
        cos_p, _ = _trig_shift(omega * t, p)
        data = -b.data * omega ** (p - 2) * cos_p
    center = _center(b.dim, b.box_radius)
    if p == 1:
        data[center] = b.data[center] * t
    elif p == 2:
        data[center] = b.data[center]
    else:
        data[center] = 0.0
    out = SpectralField(b.dim, b.box_radius, data, b.real_flag)
    return SolutionSnapshot(t, p, out)


# ---------------------------------------------------------------------------
# dispatch and superposition


def solve(problem: WaveProblem, t: float) -> SolutionSnapshot:
    if problem.kind == HOMOGENEOUS:
        return solve_homogeneous(problem, t)
    if problem.kind == FORCED:
        return solve_forced(problem, t)
    homo = solve_homogeneous(problem, t)
    forc = solve_forced(problem, t)
    return SolutionSnapshot(t, 0, homo.field + forc.field)


def derivative(problem: WaveProblem, t: float, p: int) -> SolutionSnapshot:
    if problem.kind == HOMOGENEOUS:
        return derivative_homogeneous(problem, t, p)
    if problem.kind == FORCED:
        return derivative_forced(problem, t, p)
    homo = derivative_homogeneous(problem, t, p)
    forc = derivative_forced(problem, t, p)
    return SolutionSnapshot(t, p, homo.field + forc.field)


def solve_classical(f: SpectralField | None, g: SpectralField | None,
                    b: SpectralField | None, t: float) -> SolutionSnapshot:
    """Classical wave solution: the nonlocal closed forms with m_k = -|k|^2."""
    _require_time(t)
    fields = [fld for fld in (f, g, b) if fld is not None]
    if not fields:
        raise DomainError("solve_classical needs at least one of f, g, b")
    dim, K = fields[0].dim, fields[0].box_radius
    f = f if f is not None else zero_field(dim, K)
    g = g if g is not None else zero_field(dim, K)
    b = b if b is not None else zero_field(dim, K)
    for fld in (g, b):
        if fld.dim != dim or fld.box_radius != K:
            raise ShapeError("classical solver fields must share dim and box radius")
    omega = np.sqrt(squared_norm_grid(dim, K).astype(float))
    data = f.data * np.cos(omega * t) + g.data * _sin_over_omega(omega, t) \
        + b.data * _one_minus_cos_over_omega2(omega, t)
    center = _center(dim, K)
    data[center] = f.data[center] + g.data[center] * t + b.data[center] * t * t / 2.0
    real = f.real_flag and g.real_flag and b.real_flag
    return SolutionSnapshot(t, 0, SpectralField(dim, K, data, real))


# ---------------------------------------------------------------------------
# numerical oracle and energy


def ode_mode_oracle(m: float, f0: complex, g0: complex, b0: complex,
                    t: float, dt: float) -> tuple[complex, complex]:
    """Fixed-step classic RK4 for u'' = m u + b0; returns (u(t), u'(t)).

    Independent of the closed forms: integrates the first-order system in
    (u, u') with global error O(dt^4).
    """
    if m > 0:
        raise DomainError(f"oracle requires m <= 0, got {m}")
    if not dt > 0:
        raise DomainError(f"step must be positive, got {dt}")
    _require_time(t)
    if t == 0:
        return complex(f0), complex(g0)
    if dt > t:
        raise DomainError(f"step dt={dt} exceeds integration time t={t}")
    steps = max(1, round(t / dt))
    h = t / steps
    u, v = complex(f0), complex(g0)
    for _ in range(steps):
        k1u = v
        k1v = m * u + b0
        k2u = v + 0.5 * h * k1v
        k2v = m * (u + 0.5 * h * k1u) + b0
        k3u = v + 0.5 * h * k2v
        k3v = m * (u + 0.5 * h * k2u) + b0
        k4u = v + h * k3v
        k4v = m * (u + h * k3u) + b0
        u = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return u, v


def energy(problem: WaveProblem, t: float) -> float:
    """Conserved functional sum_k |u_hat_k'(t)|^2 + (-m_k)|u_hat_k(t)|^2."""
    if problem.kind != HOMOGENEOUS:
        raise DomainError(f"energy is defined for homogeneous problems, got {problem.kind}")
    u = solve_homogeneous(problem, t).field.data
    v = derivative_homogeneous(problem, t, 1).field.data
    omega = _omega_grid(problem.table)
    return float(np.sum(np.abs(v) ** 2 + omega ** 2 * np.abs(u) ** 2))
