"""Physics-based atmospheric corrosion model: evaluation, calibration, risk classes.

The corrosion rate combines an Arrhenius temperature term with a power-law
humidity term:

    CR = C * RH^n * exp(-Ea / (R * T_K))      [um/year]

C and n are calibrated against observed rates; Ea and the gas constant are
fixed physical constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GAS_CONSTANT = 8.314          # J/(mol K), fixed
ACTIVATION_ENERGY = 50_000.0  # J/mol, fixed (not fitted)

# Calibration search box. C can be astronomically large because the
# Arrhenius factor is ~1e-9 at ambient temperature.
C_BOUNDS = (1e-3, 1e12)
N_BOUNDS = (0.01, 10.0 - 1e-9)  # kept strictly inside the 0 < n < 10 invariant

DEFAULT_INIT_C = 50.0
DEFAULT_INIT_N = 1.5


class CorrosionDomainError(ValueError):
    """Input outside the physical domain of the model."""


class DegenerateJacobianError(RuntimeError):
    """Calibration design is rank-deficient (e.g. all points identical)."""


@dataclass(frozen=True)
class ModelParams:
    C: float
    n: float
    Ea: float = ACTIVATION_ENERGY
    R_gas: float = GAS_CONSTANT

    def __post_init__(self):
        if not (self.C > 0 and math.isfinite(self.C)):
            raise CorrosionDomainError(f"C must be positive and finite, got {self.C}")
        if not (0 < self.n < 10):
            raise CorrosionDomainError(f"n must lie in (0, 10), got {self.n}")
        if not (self.Ea > 0 and math.isfinite(self.Ea)):
            raise CorrosionDomainError(f"Ea must be positive, got {self.Ea}")
        if self.R_gas != GAS_CONSTANT:
            raise CorrosionDomainError(f"R_gas is a constant {GAS_CONSTANT}, got {self.R_gas}")


@dataclass(frozen=True)
class CalibrationPoint:
    rh_frac: float
    temp_c: float
    observed_cr: float

    def __post_init__(self):
        if not (0.0 <= self.rh_frac <= 1.0):
            raise CorrosionDomainError(f"rh_frac must be in [0,1], got {self.rh_frac}")
        if self.temp_c + 273.15 <= 0:
            raise CorrosionDomainError(f"temperature below absolute zero: {self.temp_c} C")
        if not (self.observed_cr >= 0 and math.isfinite(self.observed_cr)):
            raise CorrosionDomainError(f"observed_cr must be >= 0, got {self.observed_cr}")


@dataclass(frozen=True)
class CalibrationResult:
    params: ModelParams
    residual_norm: float
    iterations: int
    converged: bool


def corrosion_rate(params: ModelParams, temp_c, rh_frac):
    """Corrosion rate in um/year. Accepts scalars or numpy arrays."""
    temp_c = np.asarray(temp_c, dtype=float)
    rh_frac = np.asarray(rh_frac, dtype=float)
    if not (np.all(np.isfinite(temp_c)) and np.all(np.isfinite(rh_frac))):
        raise CorrosionDomainError("non-finite temperature or humidity")
    if np.any(rh_frac < 0) or np.any(rh_frac > 1):
        raise CorrosionDomainError("rh_frac outside [0, 1]")
    if np.any(temp_c <= -273.15):
        raise CorrosionDomainError("temperature below absolute zero")
    t_kelvin = temp_c + 273.15
    rate = params.C * np.power(rh_frac, params.n) * np.exp(-params.Ea / (params.R_gas * t_kelvin))
    if rate.ndim == 0:
        return float(rate)
    return rate


def _residuals(log_c, n, rh, temp_c, observed):
    pred = np.exp(log_c) * np.power(rh, n) * np.exp(
        -ACTIVATION_ENERGY / (GAS_CONSTANT * (temp_c + 273.15)))
    return pred - observed


def _clip_theta(theta):
    lo = np.array([math.log(C_BOUNDS[0]), N_BOUNDS[0]])
    hi = np.array([math.log(C_BOUNDS[1]), N_BOUNDS[1]])
    return np.clip(theta, lo, hi)


def calibrate(points, init: ModelParams | None = None,
              max_iterations: int = 200, tolerance: float = 1e-10) -> CalibrationResult:
    """Fit (C, n) by damped Gauss-Newton least squares; Ea and R stay fixed.

    Internally fits (log C, n) to even out the conditioning disparity
    between the two parameters.  Steps are clipped to the search box.
    Non-convergence is reported via converged=False, not raised.
    """
    points = list(points)
    if len(points) < 2:
        raise CorrosionDomainError("calibration needs at least 2 points")
    if len({(p.temp_c, p.rh_frac) for p in points}) < 2:
        raise DegenerateJacobianError("all calibration points share the same (T, RH)")
    if init is None:
        init = ModelParams(C=DEFAULT_INIT_C, n=DEFAULT_INIT_N)

    rh = np.array([p.rh_frac for p in points])
    temp_c = np.array([p.temp_c for p in points])
    observed = np.array([p.observed_cr for p in points])

    theta = _clip_theta(np.array([math.log(init.C), init.n]))
    r = _residuals(theta[0], theta[1], rh, temp_c, observed)
    sse = float(r @ r)
    mu = 1e-3
    iterations = 0
    converged = False

    for iterations in range(1, max_iterations + 1):
        # Forward-difference Jacobian, relative step 1e-6
        jac = np.empty((len(points), 2))
        for j in range(2):
            step = 1e-6 * max(abs(theta[j]), 1.0)
            bumped = theta.copy()
            bumped[j] += step
            jac[:, j] = (_residuals(bumped[0], bumped[1], rh, temp_c, observed) - r) / step

        jtj = jac.T @ jac
        jtr = jac.T @ r
        sv = np.linalg.svd(jtj, compute_uv=False)
        if sv[0] == 0 or sv[-1] / sv[0] < 1e-14:
            raise DegenerateJacobianError("singular Jacobian in calibration")

        improved = False
        for _ in range(30):
            damped = jtj + mu * np.diag(np.diag(jtj).clip(min=1e-300))
            try:
                delta = np.linalg.solve(damped, -jtr)
            except np.linalg.LinAlgError:
                mu *= 4.0
                continue
            cand = _clip_theta(theta + delta)
            if np.array_equal(cand, theta):
                # Step fully clipped away; shrink it and retry.
                mu *= 4.0
                continue
            rc = _residuals(cand[0], cand[1], rh, temp_c, observed)
            sse_c = float(rc @ rc)
            if sse_c <= sse:
                step_rel = np.max(np.abs(cand - theta) / np.maximum(np.abs(theta), 1.0))
                theta, r, sse = cand, rc, sse_c
                mu = max(mu / 3.0, 1e-15)
                improved = True
                if step_rel < tolerance:
                    converged = True
                break
            mu *= 4.0
        if not improved:
            # Damping exhausted without improvement: at a (local) minimum.
            converged = True
        if converged:
            break

    params = ModelParams(C=math.exp(theta[0]), n=theta[1])
    return CalibrationResult(params=params, residual_norm=sse,
                             iterations=iterations, converged=converged)


# ISO 9223 first-year carbon-steel corrosivity bands (um/year upper bounds).
RISK_BANDS = (
    ("C1", 1.3),
    ("C2", 25.0),
    ("C3", 50.0),
    ("C4", 80.0),
    ("C5", 200.0),
)
EXTREME_CLASS = "CX"
RISK_CLASS_ORDER = ("C1", "C2", "C3", "C4", "C5", "CX")
DEFAULT_ALARM_THRESHOLD = 50.0  # C4 lower bound


@dataclass(frozen=True)
class RiskClass:
    label: str
    alarm: bool


def classify_risk(rate: float, alarm_threshold: float = DEFAULT_ALARM_THRESHOLD) -> RiskClass:
    """Map a corrosion rate to its corrosivity band; ties resolve downward."""
    if not (math.isfinite(rate) and rate >= 0):
        raise CorrosionDomainError(f"rate must be finite and >= 0, got {rate}")
    label = EXTREME_CLASS
    for name, upper in RISK_BANDS:
        if rate <= upper:
            label = name
            break
    return RiskClass(label=label, alarm=rate >= alarm_threshold)
