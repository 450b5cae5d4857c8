"""Empirical conditional linear expectation / covariance and the signal diagnostic.

All moments here use the population-style denominator n, so the algebraic
identities (stability, law of total expectation, the partial-covariance
decomposition) hold exactly on the fitting sample instead of up to an
(n-1)/n factor.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .data import ConditioningSet, SurvivalDataset
from .errors import ValidationError

_PINV_RTOL = 1e-10


@dataclass(frozen=True)
class CLEModel:
    target_mean: np.ndarray
    predictor_mean: np.ndarray
    coefficient_matrix: np.ndarray  # A, shape (dim(xi), dim(zeta))
    predictor_covariance: np.ndarray
    cross_covariance: np.ndarray  # Cov(zeta, xi), shape (dim(zeta), dim(xi))
    pseudo_inverse_used: bool = False


def _as_2d(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    return a


def _solve_gram(var_xi, rhs, allow_singular):
    """Solve var_xi @ A = rhs, falling back to the pseudo-inverse when singular."""
    try:
        cond = np.linalg.cond(var_xi)
        if cond < 1.0 / _PINV_RTOL:
            return np.linalg.solve(var_xi, rhs), False
    except np.linalg.LinAlgError:
        pass
    if not allow_singular:
        raise ValidationError("predictor covariance is singular")
    return np.linalg.pinv(var_xi, rcond=_PINV_RTOL) @ rhs, True


def fit_cle(zeta, xi, allow_singular=True) -> CLEModel:
    """Best affine predictor of zeta from xi via empirical-moment plug-in."""
    zeta = _as_2d(zeta)
    xi = _as_2d(xi)
    n = zeta.shape[0]
    if xi.shape[0] != n:
        raise ValidationError("zeta and xi must have the same number of rows")
    if n <= xi.shape[1]:
        raise ValidationError("need more samples than predictor dimensions")
    zc = zeta - zeta.mean(axis=0)
    xc = xi - xi.mean(axis=0)
    var_xi = xc.T @ xc / n
    cross = zc.T @ xc / n  # Cov(zeta, xi)
    if xi.shape[1] == 0:
        coef = np.zeros((0, zeta.shape[1]))
        used_pinv = False
    else:
        coef, used_pinv = _solve_gram(var_xi, cross.T, allow_singular)
    return CLEModel(
        target_mean=zeta.mean(axis=0),
        predictor_mean=xi.mean(axis=0),
        coefficient_matrix=coef,
        predictor_covariance=var_xi,
        cross_covariance=cross,
        pseudo_inverse_used=used_pinv,
    )


def cle_predict(model: CLEModel, xi) -> np.ndarray:
    """Affine evaluation: E[zeta] + A'(xi - E[xi]).

    A 1-d xi of length dim(xi) is a single predictor vector; a 2-d xi is a
    stack of rows. When dim(xi) == 1, a 1-d xi is treated as a stack.
    """
    xi = np.asarray(xi, dtype=float)
    dim = model.predictor_mean.shape[0]
    single = xi.ndim == 1 and xi.shape[0] == dim and dim != 1
    if xi.ndim == 1:
        xi2 = xi[None, :] if single else xi[:, None]
    else:
        xi2 = xi
    if xi2.shape[1] != dim:
        raise ValidationError(f"xi has dimension {xi2.shape[1]}, model expects {dim}")
    pred = model.target_mean + (xi2 - model.predictor_mean) @ model.coefficient_matrix
    return pred[0] if single else pred


def cond_linear_cov(zeta1, zeta2, xi=None, allow_singular=True) -> float:
    """Empirical partial covariance Cov(z1,z2) - Cov(z1,xi) Var(xi)^-1 Cov(xi,z2).

    With an empty (or None) conditioning block this is the plain covariance
    (denominator n).
    """
    z1 = np.asarray(zeta1, dtype=float).ravel()
    z2 = np.asarray(zeta2, dtype=float).ravel()
    n = z1.shape[0]
    if z2.shape[0] != n:
        raise ValidationError("zeta1 and zeta2 must have the same length")
    c1 = z1 - z1.mean()
    c2 = z2 - z2.mean()
    plain = float(c1 @ c2 / n)
    if xi is None:
        return plain
    xi = _as_2d(xi)
    if xi.shape[1] == 0:
        return plain
    if xi.shape[0] != n:
        raise ValidationError("xi must have the same number of rows as zeta1/zeta2")
    xc = xi - xi.mean(axis=0)
    var_xi = xc.T @ xc / n
    cov1 = xc.T @ c1 / n
    cov2 = xc.T @ c2 / n
    solved, _ = _solve_gram(var_xi, cov2, allow_singular)
    return plain - float(cov1 @ solved)


def signal_strength(dataset: SurvivalDataset, conditioning: ConditioningSet, j) -> float:
    """Partial covariance between Z_j and the event indicator given Z_C.

    Sample proxy for the conditional signal-strength quantity: the event
    indicator stands in for the (unobservable) event probability given Z.
    Diagnostic only.
    """
    conditioning.check_against(dataset)
    if j in set(conditioning.indices):
        raise ValidationError(f"covariate {j} is in the conditioning set")
    z_j = dataset.column(j)
    delta = dataset.status.astype(float)
    if conditioning.q == 0:
        return cond_linear_cov(z_j, delta)
    z_c = np.column_stack([dataset.column(k) for k in conditioning.indices])
    return cond_linear_cov(z_j, delta, z_c)


def signal_strengths_to_csv(dataset, conditioning, path):
    """Per-candidate signal strengths as CSV (index, name, signal_strength)."""
    candidates = conditioning.complement(dataset.p)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "name", "signal_strength"])
        for j in candidates:
            value = signal_strength(dataset, conditioning, j)
            writer.writerow([j, dataset.covariate_names[j - 1], repr(value)])
    return candidates
