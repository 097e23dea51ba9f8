"""Parameter studies that check the solver's limit and regularity behaviour.

Five studies are provided: convergence of the nonlocal solution to the
classical one as the horizon shrinks or as the kernel exponent approaches
its critical value, recovery of predicted coefficient-decay exponents,
large-frequency multiplier asymptotics, and temporal differentiability via
difference quotients.  Each study emits a deterministic tabular report with
a boolean verdict per checked property.

Conventions
-----------
* ``s1``, ``s2`` and ``sigma`` in a config are coefficient-decay exponents of
  the synthetic data (``|u_hat_k| = |k|^-s``).  A field with decay ``s``
  belongs to the Sobolev space of index ``q`` for every ``q < s - n/2``.
* Error norms for the convergence studies therefore use the predicted index
  formula evaluated at the decay level, shifted down by ``n/2`` plus a fixed
  stability margin of 1.0.  At the membership boundary the truncated norm is
  dominated by the largest retained frequencies and never stabilizes with
  the box size; one unit inside, it does.  Convergence in the weaker norm is
  implied by the limit statements being tested.
* When ``sigma`` is set the study runs the forced problem (zero initial
  data); otherwise the homogeneous one with data exponents (s1, s2).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import DomainError, UsageError
from .multiplier import (
    KernelParams,
    build_table,
    multiplier_asymptotic,
    multiplier_hypergeometric,
)
from .torus import SpectralField, decay_exponent_fit, sobolev_norm, synthetic_field
from .wave import (
    derivative,
    forced_problem,
    homogeneous_problem,
    solve,
    solve_classical,
)

DEFAULT_DELTA_GRID = (0.5, 0.25, 0.125, 0.0625)
DEFAULT_H_GRID = (1e-2, 1e-3, 1e-4)
DEFAULT_R_GRID = (10.0, 100.0, 1000.0, 10000.0)

_NORM_MARGIN = 1.0
_FLOOR_SCALE = 1e-12
_MIN_OBSERVED_ORDER = 0.9

_DEFAULT_TOL = {
    "converge-delta": 0.1,   # final error as a fraction of the first
    "converge-beta": 0.05,
    "regularity": 0.2,       # absolute mismatch of decay exponents
    "asymptotics": 0.01,     # |m/m_asym - 1| at the largest frequency
}


def default_beta_grid(n: int, epsilon: float) -> tuple[float, ...]:
    """Five-point geometric approach to the critical exponent from below."""
    target = n + 2.0
    return tuple(target - epsilon * frac for frac in (0.6, 0.3, 0.15, 0.075, 0.0375))


@dataclass(frozen=True)
class Sweep:
    param: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class StudyConfig:
    """Inputs shared by all studies; JSON key "K" maps to box_radius."""

    n: int = 1
    delta: float = 1.0
    beta: float = 0.0
    box_radius: int = 16
    t: float = 1.0
    s1: float = 3.0
    s2: float = 2.0
    sigma: float | None = None
    epsilon: float | None = None
    q: float = 0.0
    p: int = 1
    sweep: Sweep | None = None
    tol: float | None = None
    seed: int = 0
    format: str = "csv"
    out: str | None = None


_CONFIG_JSON_KEYS = {
    "n", "delta", "beta", "K", "t", "s1", "s2", "sigma", "epsilon",
    "sweep", "tol", "seed", "format", "out", "q", "p",
}


def config_from_dict(payload: dict) -> StudyConfig:
    """Build a config from the JSON schema; unknown keys are usage errors."""
    for key in payload:
        if key not in _CONFIG_JSON_KEYS:
            raise UsageError(f"unknown config key '{key}'")
    sweep = None
    if payload.get("sweep") is not None:
        raw = payload["sweep"]
        for key in raw:
            if key not in ("param", "values"):
                raise UsageError(f"unknown sweep key '{key}'")
        try:
            sweep = Sweep(str(raw["param"]), tuple(float(v) for v in raw["values"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"sweep must be {{param, values[]}}: {exc}") from exc
    fmt = str(payload.get("format", "csv"))
    if fmt not in ("csv", "json"):
        raise UsageError(f"format must be 'csv' or 'json', got '{fmt}'")
    try:
        return StudyConfig(
            n=int(payload.get("n", 1)),
            delta=float(payload.get("delta", 1.0)),
            beta=float(payload.get("beta", 0.0)),
            box_radius=int(payload.get("K", 16)),
            t=float(payload.get("t", 1.0)),
            s1=float(payload.get("s1", 3.0)),
            s2=float(payload.get("s2", 2.0)),
            sigma=None if payload.get("sigma") is None else float(payload["sigma"]),
            epsilon=None if payload.get("epsilon") is None else float(payload["epsilon"]),
            q=float(payload.get("q", 0.0)),
            p=int(payload.get("p", 1)),
            sweep=sweep,
            tol=None if payload.get("tol") is None else float(payload["tol"]),
            seed=int(payload.get("seed", 0)),
            format=fmt,
            out=None if payload.get("out") is None else str(payload["out"]),
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid config value: {exc}") from exc


def config_to_dict(cfg: StudyConfig) -> dict:
    return {
        "n": cfg.n, "delta": cfg.delta, "beta": cfg.beta, "K": cfg.box_radius,
        "t": cfg.t, "s1": cfg.s1, "s2": cfg.s2, "sigma": cfg.sigma,
        "epsilon": cfg.epsilon, "q": cfg.q, "p": cfg.p,
        "sweep": None if cfg.sweep is None else
            {"param": cfg.sweep.param, "values": list(cfg.sweep.values)},
        "tol": cfg.tol, "seed": cfg.seed, "format": cfg.format, "out": cfg.out,
    }


def canonical_config_json(cfg: StudyConfig) -> str:
    """Sorted compact JSON of the result-affecting config keys.

    The output destination is plumbing, not an input of the study, and is
    dropped so reruns are byte-identical wherever the report lands.
    """
    payload = config_to_dict(cfg)
    del payload["out"]
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class StudyRow:
    swept: float
    measured: float
    reference: float
    error: float


@dataclass(frozen=True)
class StudyReport:
    """Rows of (swept value, measured, reference, error) plus verdicts."""

    kind: str
    config: StudyConfig
    columns: tuple[str, str, str, str]
    rows: tuple[StudyRow, ...]
    verdicts: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_csv(self) -> str:
        lines = [f"# study={self.kind} config={canonical_config_json(self.config)}"]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(repr(float(v)) for v in
                                  (row.swept, row.measured, row.reference, row.error)))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "study": self.kind,
            "config": config_to_dict(self.config),
            "columns": list(self.columns),
            "rows": [[row.swept, row.measured, row.reference, row.error]
                     for row in self.rows],
            "verdicts": self.verdicts,
            "passed": self.passed,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def rendered(self) -> str:
        return self.to_json() if self.config.format == "json" else self.to_csv()


# ---------------------------------------------------------------------------
# shared machinery


def _study_data(cfg: StudyConfig):
    """Synthetic (f, g, b); forcing is used when sigma is configured."""
    if cfg.sigma is not None:
        b = synthetic_field(cfg.n, cfg.box_radius, cfg.sigma, cfg.seed)
        return None, None, b
    f = synthetic_field(cfg.n, cfg.box_radius, cfg.s1, cfg.seed)
    g = synthetic_field(cfg.n, cfg.box_radius, cfg.s2, cfg.seed + 1)
    return f, g, None


def _solve_nonlocal(table, f, g, b, t: float) -> SpectralField:
    if b is not None:
        return solve(forced_problem(table, b), t).field
    return solve(homogeneous_problem(table, f, g), t).field


def _delta_norm_index(cfg: StudyConfig) -> float:
    n, beta = cfg.n, cfg.beta
    if cfg.sigma is not None:
        s = cfg.sigma + (max(0.0, beta - n) if beta <= n + 2 else 2.0)
    else:
        if beta <= n + 2:
            s = min(cfg.s1, cfg.s2 + max(0.0, (beta - n) / 2.0))
        else:
            s = min(cfg.s1, cfg.s2 + 1.0)
    return s - n / 2.0 - _NORM_MARGIN


def _beta_norm_index(cfg: StudyConfig, epsilon: float) -> float:
    if cfg.sigma is not None:
        s = cfg.sigma + 2.0 - epsilon
    else:
        s = min(cfg.s1, cfg.s2 + (2.0 - epsilon) / 2.0)
    return s - cfg.n / 2.0 - _NORM_MARGIN


def _decreasing_with_floor(errors, floor: float) -> bool:
    return all(b < a or b <= floor for a, b in zip(errors, errors[1:]))


def _reduction_met(errors, rel_tol: float, floor: float) -> bool:
    return errors[-1] <= max(rel_tol * errors[0], floor)


# ---------------------------------------------------------------------------
# studies


def study_delta_convergence(cfg: StudyConfig) -> StudyReport:
    """Error to the classical solution along a shrinking-horizon grid."""
    sweep = cfg.sweep or Sweep("delta", DEFAULT_DELTA_GRID)
    if sweep.param != "delta":
        raise DomainError(f"converge-delta sweeps 'delta', got '{sweep.param}'")
    deltas = sweep.values
    if not deltas:
        raise DomainError("delta grid is empty")
    for d in deltas:
        if not d > 0:
            raise DomainError(f"delta grid value {d} is not positive")
    for a, b in zip(deltas, deltas[1:]):
        if not b < a:
            raise DomainError("delta grid must be strictly decreasing")

    f, g, b = _study_data(cfg)
    reference = solve_classical(f, g, b, cfg.t).field
    index = _delta_norm_index(cfg)
    ref_norm = sobolev_norm(reference, index)
    floor = _FLOOR_SCALE * (1.0 + ref_norm)

    errors = []
    rows = []
    for d in deltas:
        table = build_table(KernelParams(cfg.n, d, cfg.beta), cfg.box_radius)
        solution = _solve_nonlocal(table, f, g, b, cfg.t)
        err = sobolev_norm(solution - reference, index)
        errors.append(err)
        rows.append(StudyRow(d, sobolev_norm(solution, index), ref_norm, err))

    tol = cfg.tol if cfg.tol is not None else _DEFAULT_TOL["converge-delta"]
    verdicts = {
        "errors_decrease": _decreasing_with_floor(errors, floor),
        "final_error_reduced": _reduction_met(errors, tol, floor),
    }
    rows.sort(key=lambda row: row.swept)
    return StudyReport("converge-delta", cfg,
                       ("delta", "nonlocal_norm", "classical_norm", "error_norm"),
                       tuple(rows), verdicts)


def study_beta_convergence(cfg: StudyConfig) -> StudyReport:
    """Error to the classical solution as beta approaches n + 2."""
    if cfg.epsilon is None:
        raise DomainError("converge-beta requires 'epsilon' (the beta window half-width)")
    epsilon, n = cfg.epsilon, cfg.n
    if not 0.0 < epsilon < 2.0:
        raise DomainError(f"violated constraint: epsilon in (0, 2), got {epsilon}")
    if not epsilon < n / 2.0:
        raise DomainError(f"violated constraint: epsilon < n/2 = {n / 2.0}, got {epsilon}")

    sweep = cfg.sweep or Sweep("beta", default_beta_grid(n, epsilon))
    if sweep.param != "beta":
        raise DomainError(f"converge-beta sweeps 'beta', got '{sweep.param}'")
    target = n + 2.0
    lo, hi = target - epsilon, target + epsilon
    betas = sweep.values
    if not betas:
        raise DomainError("beta grid is empty")
    for value in betas:
        if not lo < value < hi:
            raise DomainError(
                f"violated constraint: beta grid value {value} outside the epsilon "
                f"window ({lo}, {hi})")

    f, g, b = _study_data(cfg)
    reference = solve_classical(f, g, b, cfg.t).field
    index = _beta_norm_index(cfg, epsilon)
    ref_norm = sobolev_norm(reference, index)
    floor = _FLOOR_SCALE * (1.0 + ref_norm)

    by_approach = sorted(betas, key=lambda value: abs(value - target), reverse=True)
    errors = []
    row_map = {}
    for value in by_approach:
        table = build_table(KernelParams(n, cfg.delta, value), cfg.box_radius)
        solution = _solve_nonlocal(table, f, g, b, cfg.t)
        err = sobolev_norm(solution - reference, index)
        errors.append(err)
        row_map[value] = StudyRow(value, sobolev_norm(solution, index), ref_norm, err)

    tol = cfg.tol if cfg.tol is not None else _DEFAULT_TOL["converge-beta"]
    verdicts = {
        "errors_decrease": _decreasing_with_floor(errors, floor),
        "final_error_reduced": _reduction_met(errors, tol, floor),
    }
    rows = tuple(row_map[value] for value in sorted(betas))
    return StudyReport("converge-beta", cfg,
                       ("beta", "nonlocal_norm", "classical_norm", "error_norm"),
                       rows, verdicts)


def study_regularity(cfg: StudyConfig) -> StudyReport:
    """Fit the solution's coefficient decay and compare with the prediction.

    Homogeneous prediction: min(s1, s2 + max(0, (beta-n)/2)); forced:
    sigma + max(0, beta - n); both at the decay-exponent level.
    """
    n, beta, K = cfg.n, cfg.beta, cfg.box_radius
    f, g, b = _study_data(cfg)
    table = build_table(KernelParams(n, cfg.delta, beta), K)
    solution = _solve_nonlocal(table, f, g, b, cfg.t)
    shell_lo = 4 if K >= 8 else 2
    fit = decay_exponent_fit(solution, (shell_lo, K))
    if cfg.sigma is not None:
        predicted = cfg.sigma + max(0.0, beta - n)
    else:
        predicted = min(cfg.s1, cfg.s2 + max(0.0, (beta - n) / 2.0))
    tol = cfg.tol if cfg.tol is not None else _DEFAULT_TOL["regularity"]
    mismatch = abs(fit.exponent - predicted)
    rows = (StudyRow(cfg.t, fit.exponent, predicted, mismatch),)
    verdicts = {"exponent_within_tol": mismatch <= tol}
    return StudyReport("regularity", cfg,
                       ("t", "fitted_decay", "predicted_decay", "abs_error"),
                       rows, verdicts)


def study_asymptotics(cfg: StudyConfig) -> StudyReport:
    """Ratio of the multiplier to its large-frequency form along an r grid."""
    n, beta = cfg.n, cfg.beta
    if beta == n + 2:
        raise DomainError("asymptotics study is undefined at beta = n+2")
    sweep = cfg.sweep or Sweep("r", DEFAULT_R_GRID)
    if sweep.param != "r":
        raise DomainError(f"asymptotics sweeps 'r', got '{sweep.param}'")
    rs = sweep.values
    if not rs:
        raise DomainError("r grid is empty")
    for value in rs:
        if not value > 1:
            raise DomainError(f"asymptotic comparison needs r > 1, got {value}")
    for a, b in zip(rs, rs[1:]):
        if not b > a:
            raise DomainError("r grid must be strictly increasing")

    params = KernelParams(n, cfg.delta, beta)
    rows = []
    errors = []
    for r in rs:
        measured = multiplier_hypergeometric(params, r)
        ref = multiplier_asymptotic(params, r)
        err = abs(measured / ref - 1.0) if ref != 0 else math.inf
        errors.append(err)
        rows.append(StudyRow(r, measured, ref, err))

    tol = cfg.tol if cfg.tol is not None else _DEFAULT_TOL["asymptotics"]
    verdicts = {
        "ratio_error_decreases": all(b < a for a, b in zip(errors, errors[1:])),
        "final_within_tol": errors[-1] < tol,
    }
    return StudyReport("asymptotics", cfg,
                       ("r", "multiplier", "asymptotic", "ratio_error"),
                       tuple(rows), verdicts)


def _check_temporal_admissible(cfg: StudyConfig):
    """Raise with the violated inequality named when (q, p) is out of range."""
    n, beta, q, p = cfg.n, cfg.beta, cfg.q, cfg.p
    if cfg.sigma is not None:
        sigma = cfg.sigma
        if beta < n:
            if not q <= sigma:
                raise DomainError(f"inadmissible (q, p): violated 'q <= sigma' ({q} > {sigma})")
        elif beta == n:
            if not q < sigma:
                raise DomainError(f"inadmissible (q, p): violated 'q < sigma' ({q} >= {sigma})")
        else:
            lhs = q - sigma + (p - 1) * (beta - n) / 2.0
            if lhs > 0:
                raise DomainError(
                    "inadmissible (q, p): violated "
                    f"'q - sigma + (p-1)(beta-n)/2 <= 0' (lhs={lhs})")
        return
    s1, s2 = cfg.s1, cfg.s2
    if beta < n:
        if not q <= min(s1, s2):
            raise DomainError(
                f"inadmissible (q, p): violated 'q <= min(s1, s2)' ({q} > {min(s1, s2)})")
    elif beta == n:
        if not q < min(s1, s2):
            raise DomainError(
                f"inadmissible (q, p): violated 'q < min(s1, s2)' ({q} >= {min(s1, s2)})")
    else:
        lhs1 = q - s1 + (p + 1) * (beta - n) / 2.0
        if lhs1 > 0:
            raise DomainError(
                f"inadmissible (q, p): violated 'q - s1 + (p+1)(beta-n)/2 <= 0' (lhs={lhs1})")
        lhs2 = q - s2 + p * (beta - n) / 2.0
        if lhs2 > 0:
            raise DomainError(
                f"inadmissible (q, p): violated 'q - s2 + p(beta-n)/2 <= 0' (lhs={lhs2})")


def study_temporal(cfg: StudyConfig) -> StudyReport:
    """Forward difference quotients of order p-1 against the order-p derivative."""
    if cfg.p < 1:
        raise DomainError(f"temporal study needs derivative order p >= 1, got {cfg.p}")
    _check_temporal_admissible(cfg)
    sweep = cfg.sweep or Sweep("h", DEFAULT_H_GRID)
    if sweep.param != "h":
        raise DomainError(f"temporal sweeps 'h', got '{sweep.param}'")
    hs = sweep.values
    if not hs:
        raise DomainError("h grid is empty")
    for value in hs:
        if not value > 0:
            raise DomainError(f"h grid value {value} is not positive")
    for a, b in zip(hs, hs[1:]):
        if not b < a:
            raise DomainError("h grid must be strictly decreasing")

    f, g, b = _study_data(cfg)
    table = build_table(KernelParams(cfg.n, cfg.delta, cfg.beta), cfg.box_radius)
    if b is not None:
        problem = forced_problem(table, b)
    else:
        problem = homogeneous_problem(table, f, g)
    target = derivative(problem, cfg.t, cfg.p).field
    base = derivative(problem, cfg.t, cfg.p - 1).field
    target_norm = sobolev_norm(target, cfg.q)

    rows = []
    errors = []
    for h in hs:
        ahead = derivative(problem, cfg.t + h, cfg.p - 1).field
        quotient = (ahead - base).scaled(1.0 / h)
        err = sobolev_norm(quotient - target, cfg.q)
        errors.append(err)
        rows.append(StudyRow(h, sobolev_norm(quotient, cfg.q), target_norm, err))

    orders = [math.log(e0 / e1) / math.log(h0 / h1) if e1 > 0 else math.inf
              for (h0, h1, e0, e1) in zip(hs, hs[1:], errors, errors[1:])]
    verdicts = {
        "quotient_errors_decrease": all(b < a for a, b in zip(errors, errors[1:])),
        "observed_order_at_least_one": all(o >= _MIN_OBSERVED_ORDER for o in orders),
    }
    rows.sort(key=lambda row: row.swept)
    return StudyReport("temporal", cfg,
                       ("h", "quotient_norm", "derivative_norm", "error_norm"),
                       tuple(rows), verdicts)


STUDIES = {
    "converge-delta": study_delta_convergence,
    "converge-beta": study_beta_convergence,
    "regularity": study_regularity,
    "asymptotics": study_asymptotics,
    "temporal": study_temporal,
}


def run_study(kind: str, cfg: StudyConfig) -> StudyReport:
    try:
        fn = STUDIES[kind]
    except KeyError:
        raise UsageError(f"unknown study kind '{kind}'") from None
    return fn(cfg)
