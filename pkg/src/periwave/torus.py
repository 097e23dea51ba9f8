"""Truncated periodic distributions represented by Fourier coefficients.

A field stores the coefficients u_hat_k for all multi-indices k in the
sup-norm box [-K, K]^n of Z^n.  The underlying torus is [0, 2pi]^n, so
frequencies are dimensionless integers.  Fields are immutable after
construction (the coefficient array is marked read-only).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientDataError, ShapeError

_HERMITIAN_TOL = 1e-12


class SpectralField:
    """Complex Fourier coefficients on [-K, K]^n, axis index i <-> k = i - K."""

    __slots__ = ("dim", "box_radius", "data", "real_flag")

    def __init__(self, dim: int, box_radius: int, data: np.ndarray | None = None,
                 real_flag: bool = False):
        if dim < 1 or int(dim) != dim:
            raise DomainError(f"dimension must be a positive integer, got {dim}")
        if box_radius < 1 or int(box_radius) != box_radius:
            raise DomainError(f"box radius must be a positive integer, got {box_radius}")
        shape = (2 * box_radius + 1,) * dim
        if data is None:
            data = np.zeros(shape, dtype=complex)
        else:
            data = np.array(data, dtype=complex)
            if data.shape != shape:
                raise ShapeError(
                    f"coefficient array has shape {data.shape}, expected {shape}")
        data.setflags(write=False)
        self.dim = int(dim)
        self.box_radius = int(box_radius)
        self.data = data
        self.real_flag = bool(real_flag)

    # -- access ------------------------------------------------------------

    def _index(self, k) -> tuple[int, ...]:
        k = (k,) if np.isscalar(k) else tuple(int(c) for c in k)
        if len(k) != self.dim:
            raise ShapeError(f"multi-index {k} has wrong length for dim {self.dim}")
        K = self.box_radius
        for c in k:
            if abs(c) > K:
                raise DomainError(f"multi-index {k} outside the box [-{K}, {K}]^{self.dim}")
        return tuple(c + K for c in k)

    def coeff(self, k) -> complex:
        return complex(self.data[self._index(k)])

    def with_coeff(self, k, value: complex) -> "SpectralField":
        """New field with one coefficient replaced."""
        out = np.array(self.data)
        out[self._index(k)] = value
        return SpectralField(self.dim, self.box_radius, out, self.real_flag)

    def items(self):
        """Yield (multi-index tuple, coefficient) over the whole box."""
        K = self.box_radius
        for idx in np.ndindex(self.data.shape):
            yield tuple(i - K for i in idx), complex(self.data[idx])

    def hermitian_defect(self) -> float:
        """max |u_hat(-k) - conj(u_hat(k))| over the box."""
        reversed_all = self.data[(slice(None, None, -1),) * self.dim]
        return float(np.max(np.abs(reversed_all - np.conj(self.data))))

    def is_hermitian(self, tol: float = _HERMITIAN_TOL) -> bool:
        return self.hermitian_defect() <= tol

    # -- arithmetic (used by the study harness) -----------------------------

    def _check_compatible(self, other: "SpectralField"):
        if self.dim != other.dim or self.box_radius != other.box_radius:
            raise ShapeError(
                f"incompatible fields: dim/box {self.dim}/{self.box_radius} vs "
                f"{other.dim}/{other.box_radius}")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.dim, self.box_radius, self.data + other.data,
                             self.real_flag and other.real_flag)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check_compatible(other)
        return SpectralField(self.dim, self.box_radius, self.data - other.data,
                             self.real_flag and other.real_flag)

    def scaled(self, factor: float) -> "SpectralField":
        return SpectralField(self.dim, self.box_radius, self.data * factor,
                             self.real_flag and float(np.imag(factor)) == 0.0)


def zero_field(dim: int, box_radius: int, real_flag: bool = True) -> SpectralField:
    return SpectralField(dim, box_radius, None, real_flag)


def squared_norm_grid(dim: int, box_radius: int) -> np.ndarray:
    """Integer |k|^2 over the coefficient box, same shape as field data."""
    ks = np.arange(-box_radius, box_radius + 1, dtype=np.int64) ** 2
    grid = ks
    for axis in range(1, dim):
        grid = grid[..., None] + ks
    return grid


def sobolev_norm(field: SpectralField, q: float) -> float:
    """(sum over k of (1+|k|^2)^q |u_hat_k|^2)^(1/2) over the stored box."""
    kk2 = squared_norm_grid(field.dim, field.box_radius)
    weights = (1.0 + kk2.astype(float)) ** q
    return float(math.sqrt(np.sum(weights * np.abs(field.data) ** 2)))


def from_samples(dim: int, samples) -> SpectralField:
    """Discrete Fourier coefficients of samples on the uniform odd grid.

    Sample j along each axis sits at x = 2 pi j / (2K+1); the transform is
    exact for trigonometric polynomials of degree <= K per axis.
    """
    samples = np.asarray(samples)
    if samples.ndim != dim:
        raise ShapeError(f"expected a {dim}-dimensional sample array, got ndim={samples.ndim}")
    sizes = set(samples.shape)
    if len(sizes) != 1:
        raise ShapeError(f"sample grid must be uniform per axis, got shape {samples.shape}")
    size = sizes.pop()
    if size % 2 == 0 or size < 3:
        raise ShapeError(f"sample grid must be odd with size >= 3 per axis, got {size}")
    box_radius = (size - 1) // 2
    real_input = bool(np.isrealobj(samples)) or bool(np.all(np.imag(samples) == 0))
    coeffs = np.fft.fftshift(np.fft.fftn(samples)) / size ** dim
    return SpectralField(dim, box_radius, coeffs, real_flag=real_input)


def sample_grid(dim: int, box_radius: int) -> list[np.ndarray]:
    """Per-axis sample coordinates matching from_samples."""
    size = 2 * box_radius + 1
    axis = 2.0 * math.pi * np.arange(size) / size
    return [axis] * dim


def evaluate(field: SpectralField, points) -> np.ndarray:
    """Synthesize sum_k u_hat_k exp(i k . x) at each point."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        if field.dim == 1:
            pts = pts[:, None]
        elif pts.shape[0] == field.dim:
            pts = pts[None, :]
        else:
            raise ShapeError(f"points of shape {pts.shape} do not match dim {field.dim}")
    if pts.ndim != 2 or pts.shape[1] != field.dim:
        raise ShapeError(f"points must have shape (P, {field.dim}), got {pts.shape}")
    ks = np.arange(-field.box_radius, field.box_radius + 1)
    phases = [np.exp(1j * np.outer(pts[:, d], ks)) for d in range(field.dim)]
    if field.dim == 1:
        return phases[0] @ field.data
    if field.dim == 2:
        return np.einsum("pa,pb,ab->p", phases[0], phases[1], field.data)
    if field.dim == 3:
        return np.einsum("pa,pb,pc,abc->p", phases[0], phases[1], phases[2], field.data)
    out = np.zeros(pts.shape[0], dtype=complex)
    for k, c in field.items():
        if c != 0:
            out += c * np.exp(1j * pts @ np.asarray(k, dtype=float))
    return out


@dataclass(frozen=True)
class DecayFit:
    """Least-squares power-law fit |u_hat_k| ~ amplitude * |k|^(-exponent)."""

    exponent: float
    amplitude: float
    shells: int


def decay_exponent_fit(field: SpectralField, shell_range) -> DecayFit:
    """Fit the coefficient decay exponent over integer-norm shells.

    The shell statistic is the maximum modulus over all k with the same
    |k|^2, matching the sup-type decay bound rather than a mean.
    """
    r_min, r_max = float(shell_range[0]), float(shell_range[1])
    if not 0 < r_min < r_max:
        raise DomainError(f"need 0 < r_min < r_max, got ({r_min}, {r_max})")
    kk2 = squared_norm_grid(field.dim, field.box_radius).ravel()
    mags = np.abs(field.data).ravel()
    maxima: dict[int, float] = {}
    lo, hi = r_min * r_min, r_max * r_max
    for s, m in zip(kk2, mags):
        if s == 0 or not lo <= s <= hi:
            continue
        s = int(s)
        if m > maxima.get(s, 0.0):
            maxima[s] = m
    shells = sorted((s, m) for s, m in maxima.items() if m > 0.0)
    if len(shells) < 3:
        raise InsufficientDataError(
            f"decay fit needs at least 3 nonempty shells in [{r_min}, {r_max}], "
            f"found {len(shells)}")
    log_r = np.array([0.5 * math.log(s) for s, _ in shells])
    log_m = np.array([math.log(m) for _, m in shells])
    slope, intercept = np.polyfit(log_r, log_m, 1)
    return DecayFit(exponent=float(-slope), amplitude=float(math.exp(intercept)),
                    shells=len(shells))


def _lexicographically_positive(k: tuple[int, ...]) -> bool:
    for c in k:
        if c != 0:
            return c > 0
    return False


def synthetic_field(dim: int, box_radius: int, decay: float, seed: int) -> SpectralField:
    """Deterministic Hermitian field with |u_hat_k| = |k|^(-decay), u_hat_0 = 1.

    Phases come from the seeded generator in a fixed traversal order, so the
    same seed always reproduces the same field.
    """
    rng = np.random.default_rng(seed)
    K = box_radius
    data = np.zeros((2 * K + 1,) * dim, dtype=complex)
    for idx in np.ndindex(data.shape):
        k = tuple(i - K for i in idx)
        if all(c == 0 for c in k):
            data[idx] = 1.0
        elif _lexicographically_positive(k):
            norm = math.sqrt(sum(c * c for c in k))
            value = norm ** (-decay) * np.exp(1j * rng.uniform(0.0, 2.0 * math.pi))
            data[idx] = value
            data[tuple(2 * K - i for i in idx)] = np.conj(value)
    return SpectralField(dim, box_radius, data, real_flag=True)


# ---------------------------------------------------------------------------
# JSON serialization: {dim, box_radius, real_flag, entries: [[k...], re, im]}
# with nonzero entries sorted lexicographically by multi-index.


def field_to_dict(field: SpectralField) -> dict:
    entries = []
    for k, c in field.items():
        if c != 0:
            entries.append([list(k), c.real, c.imag])
    entries.sort(key=lambda e: e[0])
    return {
        "dim": field.dim,
        "box_radius": field.box_radius,
        "real_flag": field.real_flag,
        "entries": entries,
    }


def field_from_dict(payload: dict) -> SpectralField:
    try:
        dim = int(payload["dim"])
        box_radius = int(payload["box_radius"])
        real_flag = bool(payload["real_flag"])
        entries = payload["entries"]
    except KeyError as exc:
        raise ShapeError(f"field payload missing key {exc}") from exc
    data = np.zeros((2 * box_radius + 1,) * dim, dtype=complex)
    for k, re, im in entries:
        idx = tuple(int(c) + box_radius for c in k)
        data[idx] = complex(re, im)
    return SpectralField(dim, box_radius, data, real_flag=real_flag)


def field_to_json(field: SpectralField) -> str:
    return json.dumps(field_to_dict(field))


def field_from_json(text: str) -> SpectralField:
    return field_from_dict(json.loads(text))
