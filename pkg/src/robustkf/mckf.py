"""Correntropy-based robust Kalman update via fixed-point iteration.

The update treats the prior and the measurement as one stacked regression:
whitening the stack by the Cholesky factors of the prior covariance and the
measurement covariance gives residuals with identity covariance, and the
state estimate maximizes the mean Gaussian-kernel similarity of those
residuals instead of minimizing their squared sum.  Large whitened residuals
then receive exponentially small weight, which is what makes the update
robust to impulsive outliers.

Two algebraically equivalent forms of the resulting fixed-point map are
implemented:

* a weighted-least-squares form, ``x <- (W' C W)^-1 W' C D``
  (`fixed_point_map`, `fixed_point_direct`), and
* a gain form that reweights the prior and measurement covariances and
  applies a Kalman-style correction (`robust_gain`, `fixed_point_iterate`).

The gain form is what `mckf_step` runs; the direct form is kept as an
independent cross-check.  With all kernel weights equal to one, both
collapse to the ordinary Kalman update, and that limit is approached as the
bandwidth grows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (
    DimensionMismatch,
    Diverged,
    InvalidBandwidth,
    EmptyInput,
)
from .kf import kf_predict
from .model import GaussianBelief, StateSpaceModel
from .numerics import cholesky_lower, require_finite, solve_spd

#: Lower clamp on kernel weights before inverting the weight matrices.
#: The Gaussian kernel underflows to zero for huge residuals; the floor keeps
#: the reweighted covariances finite and corresponds to near-total distrust.
WEIGHT_FLOOR = 1e-12

#: Below this prior-iterate norm the stop rule falls back to the absolute step.
_STEP_NORM_GUARD = 1e-300


@dataclass(frozen=True)
class KernelConfig:
    """Kernel bandwidth and fixed-point stop rule.

    ``sigma`` is the Gaussian kernel bandwidth (same units as the whitened
    residuals), ``epsilon`` the relative-step stop threshold, and
    ``max_iterations`` a safety cap; hitting the cap is reported, not raised.
    ``step_norm`` selects the vector norm of the stop rule ("l2" or "l1").
    """

    sigma: float
    epsilon: float
    max_iterations: int = 100
    step_norm: str = "l2"

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidBandwidth(f"sigma must be > 0, got {self.sigma}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.step_norm not in ("l2", "l1"):
            raise ValueError("step_norm must be 'l2' or 'l1'")


@dataclass(frozen=True)
class AugmentedRegression:
    """Whitened stacked regression for one update step.

    ``D = W x + e`` where the first n rows whiten the prior pseudo-measurement
    and the last m rows whiten the actual measurement: ``W`` stacks
    ``B_p^-1`` over ``B_r^-1 H`` and ``D`` stacks ``B_p^-1 x_prior`` over
    ``B_r^-1 y``.  ``B_p`` and ``B_r`` are the lower Cholesky factors of the
    prior covariance and the measurement covariance.
    """

    D: np.ndarray
    W: np.ndarray
    B_p: np.ndarray
    B_r: np.ndarray
    prior_mean: np.ndarray
    y: np.ndarray
    H: np.ndarray

    @property
    def n(self) -> int:
        return self.B_p.shape[0]

    @property
    def m(self) -> int:
        return self.B_r.shape[0]

    @property
    def L(self) -> int:
        return self.n + self.m


@dataclass(frozen=True)
class WeightMatrices:
    """Diagonal kernel weights of the state block (cx) and measurement block (cy)."""

    cx: np.ndarray
    cy: np.ndarray


@dataclass(frozen=True)
class FixedPointReport:
    """Outcome of one fixed-point solve."""

    iterations: int
    converged: bool
    final_weights: WeightMatrices
    last_relative_step: float


def gaussian_kernel(e, sigma: float):
    """Gaussian kernel ``exp(-e^2 / (2 sigma^2))``, elementwise on arrays."""
    if not sigma > 0:
        raise InvalidBandwidth(f"sigma must be > 0, got {sigma}")
    e = np.asarray(e, dtype=float)
    out = np.exp(-(e * e) / (2.0 * sigma * sigma))
    return float(out) if out.ndim == 0 else out


def correntropy_estimate(errors: np.ndarray, sigma: float) -> float:
    """Sample correntropy of an error sequence: the mean kernel value.

    This is also the objective the fixed-point update maximizes, evaluated
    at whitened residuals.
    """
    errors = np.atleast_1d(np.asarray(errors, dtype=float))
    if errors.size == 0:
        raise EmptyInput("correntropy_estimate: empty error sequence")
    return float(np.mean(gaussian_kernel(errors, sigma)))


def build_regression(
    model: StateSpaceModel, prior: GaussianBelief, y: np.ndarray
) -> AugmentedRegression:
    """Whiten the stacked prior/measurement model for one step.

    Factorizes ``prior.cov = B_p B_p'`` and ``R = B_r B_r'`` and forms D and W
    by triangular solves (never explicit inverses).
    """
    y = require_finite(np.atleast_1d(y), "build_regression measurement")
    if y.size != model.m:
        raise DimensionMismatch(f"measurement has dim {y.size}, model expects {model.m}")
    if prior.dim != model.n:
        raise DimensionMismatch(
            f"belief dim {prior.dim} does not match model state dim {model.n}"
        )
    b_p = cholesky_lower(prior.cov)
    b_r = cholesky_lower(model.R)
    w_top = solve_triangular(b_p, np.eye(model.n), lower=True)
    w_bot = solve_triangular(b_r, model.H, lower=True)
    d_top = solve_triangular(b_p, prior.mean, lower=True)
    d_bot = solve_triangular(b_r, y, lower=True)
    return AugmentedRegression(
        D=np.concatenate([d_top, d_bot]),
        W=np.vstack([w_top, w_bot]),
        B_p=b_p,
        B_r=b_r,
        prior_mean=prior.mean.copy(),
        y=y,
        H=model.H.copy(),
    )


def compute_residuals(reg: AugmentedRegression, x: np.ndarray) -> np.ndarray:
    """Whitened residuals ``D - W x`` at a candidate state."""
    x = np.asarray(x, dtype=float)
    if x.shape != (reg.n,):
        raise DimensionMismatch(f"x has shape {x.shape}, expected ({reg.n},)")
    return reg.D - reg.W @ x


def weight_matrices(
    residuals: np.ndarray, sigma: float, n: int, m: int
) -> WeightMatrices:
    """Kernel weights of a residual stack, split into state/measurement blocks.

    Each weight is ``max(G_sigma(e_i), WEIGHT_FLOOR)``.
    """
    residuals = np.asarray(residuals, dtype=float)
    if residuals.shape != (n + m,):
        raise DimensionMismatch(
            f"residuals have shape {residuals.shape}, expected ({n + m},)"
        )
    g = np.maximum(gaussian_kernel(residuals, sigma), WEIGHT_FLOOR)
    return WeightMatrices(cx=g[:n], cy=g[n:])


def robust_gain(
    reg: AugmentedRegression, weights: WeightMatrices
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gain of the reweighted update, plus the reweighted covariances.

    The kernel weights inflate the prior and measurement covariances where
    residuals are large: ``P_w = B_p Cx^-1 B_p'`` and ``R_w = B_r Cy^-1 B_r'``.
    The gain is the Kalman gain of the inflated pair, solved as an SPD system.
    With all weights equal to one this is exactly the classic gain.

    Returns
    -------
    (gain, P_w, R_w)
    """
    p_w = (reg.B_p / weights.cx) @ reg.B_p.T
    r_w = (reg.B_r / weights.cy) @ reg.B_r.T
    s = reg.H @ p_w @ reg.H.T + r_w
    gain = solve_spd((s + s.T) / 2.0, reg.H @ p_w).T
    return gain, p_w, r_w


def fixed_point_map(reg: AugmentedRegression, x: np.ndarray, sigma: float) -> np.ndarray:
    """One application of the weighted-least-squares fixed-point map.

    Evaluates ``(W' C W)^-1 W' C D`` with ``C = diag`` of the kernel weights
    of the residuals at ``x``.  The fixed points of this map are the
    stationary points of the correntropy objective.
    """
    e = compute_residuals(reg, x)
    wts = weight_matrices(e, sigma, reg.n, reg.m)
    c = np.concatenate([wts.cx, wts.cy])
    gram = reg.W.T @ (c[:, None] * reg.W)
    rhs = reg.W.T @ (c * reg.D)
    return solve_spd((gram + gram.T) / 2.0, rhs)


def _relative_step(x_new: np.ndarray, x_old: np.ndarray, norm: str) -> float:
    ord_ = 1 if norm == "l1" else 2
    num = float(np.linalg.norm(x_new - x_old, ord_))
    den = float(np.linalg.norm(x_old, ord_))
    return num if den < _STEP_NORM_GUARD else num / den


def fixed_point_iterate(
    reg: AugmentedRegression, config: KernelConfig
) -> tuple[np.ndarray, np.ndarray, FixedPointReport]:
    """Solve the correntropy update in gain form.

    Starts from the prior mean.  Each iteration evaluates residuals at the
    previous iterate, reweights, recomputes the gain, and applies it to the
    (fixed) innovation.  Stops when the relative step drops to ``epsilon``
    or the iteration cap is hit; the cap is reported via ``converged=False``
    rather than raised, so sweeps over small bandwidths keep running.

    Returns
    -------
    (x, gain, FixedPointReport)
    """
    innovation = reg.y - reg.H @ reg.prior_mean
    x_prev = reg.prior_mean
    for t in range(1, config.max_iterations + 1):
        e = compute_residuals(reg, x_prev)
        wts = weight_matrices(e, config.sigma, reg.n, reg.m)
        gain, _, _ = robust_gain(reg, wts)
        x = reg.prior_mean + gain @ innovation
        if not np.all(np.isfinite(x)):
            raise Diverged(f"fixed-point iterate {t} is not finite")
        rel = _relative_step(x, x_prev, config.step_norm)
        if rel <= config.epsilon:
            return x, gain, FixedPointReport(t, True, wts, rel)
        x_prev = x
    return x, gain, FixedPointReport(config.max_iterations, False, wts, rel)


def fixed_point_direct(
    reg: AugmentedRegression,
    config: KernelConfig,
    start: np.ndarray | None = None,
) -> np.ndarray:
    """Solve the correntropy update in weighted-least-squares form.

    Same start point and stop rule as `fixed_point_iterate`; the two forms
    agree iterate by iterate and serve as cross-checks of each other.
    ``start`` overrides the initial iterate, which is useful for probing
    convergence from other points of the state space.
    """
    x_prev = reg.prior_mean if start is None else np.asarray(start, dtype=float)
    x = x_prev
    for _ in range(config.max_iterations):
        x = fixed_point_map(reg, x_prev, config.sigma)
        if not np.all(np.isfinite(x)):
            raise Diverged("fixed-point iterate is not finite")
        if _relative_step(x, x_prev, config.step_norm) <= config.epsilon:
            return x
        x_prev = x
    return x


def mckf_step(
    model: StateSpaceModel,
    posterior_prev: GaussianBelief,
    y: np.ndarray,
    config: KernelConfig,
) -> tuple[GaussianBelief, FixedPointReport]:
    """One full predict/update cycle of the robust filter.

    Predicts with the model dynamics, whitens the stacked regression, runs
    the fixed-point solve, and updates the covariance in Joseph form using
    the final gain together with the unmodified prior covariance and the
    nominal measurement covariance.
    """
    prior = kf_predict(model, posterior_prev)
    reg = build_regression(model, prior, y)
    x, gain, report = fixed_point_iterate(reg, config)
    ikh = np.eye(model.n) - gain @ model.H
    cov = ikh @ prior.cov @ ikh.T + gain @ model.R @ gain.T
    return GaussianBelief(x, (cov + cov.T) / 2.0), report
