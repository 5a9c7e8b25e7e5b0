"""Classical statistical detectors used for pre-ranking and as baselines.

``cem_detect`` implements the constrained-energy-minimization filter
w = R^-1 d / (d^T R^-1 d) with R the (non-centered) sample correlation
matrix over all pixels; the score of a pixel spectrum x is w^T x, so the
target signature itself always scores exactly 1.  ``ace_detect`` is the
adaptive cosine estimator: the squared cosine between x - mu and d - 0 in
background-whitened coordinates.

Both statistics are global: one filter / one covariance for the whole
cube.  The correlation (rather than centered covariance) form of CEM is
the classical convention.
"""

from __future__ import annotations

import numpy as np

from .cube import HsiCube, ScoreMap

RIDGE_EPSILON = 1e-6       # ridge loading eps * trace/m applied when ill-conditioned
_COND_LIMIT = 1e12


class SingularStatisticsError(np.linalg.LinAlgError):
    """Second-order statistics not invertible even after ridge loading."""


def _regularized(mat: np.ndarray) -> np.ndarray:
    """Return ``mat`` with ridge loading added if it is ill-conditioned."""
    if np.linalg.cond(mat) <= _COND_LIMIT:
        return mat
    m = mat.shape[0]
    loaded = mat + (RIDGE_EPSILON * np.trace(mat) / m) * np.eye(m)
    if not np.isfinite(np.linalg.cond(loaded)) or np.linalg.cond(loaded) > 1e15:
        raise SingularStatisticsError("statistics singular even after ridge loading")
    return loaded


def _check_signature(cube: HsiCube, d: np.ndarray) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    if d.shape != (cube.bands,):
        raise ValueError(
            f"signature length {d.shape} does not match cube bands {cube.bands}"
        )
    if np.linalg.norm(d) == 0.0:
        raise ValueError("target signature has zero norm")
    return d


def cem_detect(cube: HsiCube, d: np.ndarray) -> ScoreMap:
    """Constrained energy minimization; score(d) = 1 by construction."""
    d = _check_signature(cube, d)
    X = cube.pixels()                       # (N, bands)
    R = _regularized(X.T @ X / X.shape[0])
    rinv_d = np.linalg.solve(R, d)
    w = rinv_d / float(d @ rinv_d)
    scores = X @ w
    return ScoreMap(scores.reshape(cube.height, cube.width))


def ace_detect(cube: HsiCube, d: np.ndarray) -> ScoreMap:
    """Adaptive cosine estimator; scores lie in [0, 1].

    Pixels equal to the background mean get score 0 (the 0/0 limit is
    resolved as maximally background-like).
    """
    d = _check_signature(cube, d)
    X = cube.pixels()
    mu = X.mean(axis=0)
    Xc = X - mu
    sigma = _regularized(Xc.T @ Xc / X.shape[0])
    sinv_d = np.linalg.solve(sigma, d)
    sinv_xc = np.linalg.solve(sigma, Xc.T)      # (bands, N)
    num = (Xc @ sinv_d) ** 2
    den = float(d @ sinv_d) * np.einsum("ij,ji->i", Xc, sinv_xc)
    scores = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return ScoreMap(scores.reshape(cube.height, cube.width))


def select_training_sets(
    scores: ScoreMap,
    cube: HsiCube,
    n_target: int,
    bg_fraction: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Split pixels into dictionary training sets by pre-detection score.

    Returns (target_samples, background_samples) as (count, bands) arrays:
    the ``n_target`` highest-scoring pixels and the floor(bg_fraction * N)
    lowest-scoring ones.  A single (score, row-major index) ordering is used
    for both picks, so the sets are deterministic and always disjoint even
    when every score is tied.
    """
    if scores.height != cube.height or scores.width != cube.width:
        raise ValueError("score map shape does not match cube")
    if n_target < 1:
        raise ValueError("n_target must be >= 1")
    if not 0.0 < bg_fraction < 1.0:
        raise ValueError("bg_fraction must be in (0, 1)")
    N = cube.n_pixels
    n_bg = int(np.floor(bg_fraction * N))
    if n_target + n_bg > N:
        raise ValueError(
            f"requested {n_target} target + {n_bg} background samples from {N} pixels"
        )
    flat = scores.values.ravel()
    order = np.lexsort((np.arange(N), flat))    # ascending score, ties by index
    bg_idx = order[:n_bg]
    tgt_idx = order[-n_target:][::-1]           # highest score first
    X = cube.pixels()
    return X[tgt_idx], X[bg_idx]
