"""Classic Kalman filter predict and update steps.

These are the baseline estimator and the prior-propagation stage reused by
the correntropy filter.  Both functions are pure; covariances are
symmetrized before constructing the returned belief.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch
from .model import GaussianBelief, StateSpaceModel
from .numerics import require_finite, solve_spd


def kf_predict(model: StateSpaceModel, posterior: GaussianBelief) -> GaussianBelief:
    """Propagate a posterior belief through the model dynamics.

    Returns the prior belief with mean ``F x`` and covariance
    ``F P F.T + Q``.
    """
    if posterior.dim != model.n:
        raise DimensionMismatch(
            f"belief dim {posterior.dim} does not match model state dim {model.n}"
        )
    mean = model.F @ posterior.mean
    cov = model.F @ posterior.cov @ model.F.T + model.Q
    return GaussianBelief(mean, (cov + cov.T) / 2.0)


def kf_update(
    model: StateSpaceModel, prior: GaussianBelief, y: np.ndarray
) -> tuple[GaussianBelief, np.ndarray]:
    """Condition a prior belief on one measurement.

    The gain solves ``(H P H.T + R) K.T = H P`` through an SPD factorization
    (no explicit inverse).  The covariance uses the Joseph form
    ``(I - K H) P (I - K H).T + K R K.T``, which stays PSD under perturbed
    gains.

    Returns
    -------
    (GaussianBelief, ndarray)
        The posterior belief and the n x m gain matrix.
    """
    y = require_finite(np.atleast_1d(y), "kf_update measurement")
    if y.size != model.m:
        raise DimensionMismatch(f"measurement has dim {y.size}, model expects {model.m}")
    if prior.dim != model.n:
        raise DimensionMismatch(
            f"belief dim {prior.dim} does not match model state dim {model.n}"
        )
    P = prior.cov
    innovation_cov = model.H @ P @ model.H.T + model.R
    innovation_cov = (innovation_cov + innovation_cov.T) / 2.0
    gain = solve_spd(innovation_cov, model.H @ P).T
    mean = prior.mean + gain @ (y - model.H @ prior.mean)
    ikh = np.eye(model.n) - gain @ model.H
    cov = ikh @ P @ ikh.T + gain @ model.R @ gain.T
    return GaussianBelief(mean, (cov + cov.T) / 2.0), gain
