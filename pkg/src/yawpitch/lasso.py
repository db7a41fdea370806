"""Lasso regression by cyclic coordinate descent.

Minimises ``(1/N) * ||s - b0 - X @ beta||^2 + lam * ||beta||_1`` with an
unpenalised intercept ``b0``. Note the ``1/N`` (not ``1/(2N)``) loss scaling:
the soft-threshold level is ``lam / 2``, so ``lam`` here equals twice the
``alpha`` of solvers that use the halved loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .covariates import CovariateSpec, covariate_vector
from .errors import InvalidArgumentError

DEFAULT_LAMBDA = 1e-6


@dataclass(frozen=True)
class FitOptions:
    lam: float = DEFAULT_LAMBDA
    max_sweeps: int = 10_000
    tolerance: float = 1e-10
    fit_intercept: bool = True
    standardize: bool = False

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0:
            raise InvalidArgumentError(f"lambda must be a finite non-negative number, got {self.lam!r}")
        if self.max_sweeps < 1:
            raise InvalidArgumentError("max_sweeps must be >= 1")
        if not self.tolerance >= 0:
            raise InvalidArgumentError("tolerance must be >= 0")


@dataclass(frozen=True)
class FitStats:
    iterations: int
    final_objective: float
    converged: bool
    history: tuple = field(default=(), repr=False, compare=False)


@dataclass(frozen=True)
class LassoModel:
    coefficients: np.ndarray
    intercept: float
    lam: float
    spec: CovariateSpec
    term_names: tuple
    fit_stats: FitStats = FitStats(0, 0.0, True)

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float).copy()
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)
        if coef.shape != (len(self.term_names),):
            raise InvalidArgumentError(
                f"{coef.size} coefficients for {len(self.term_names)} terms"
            )
        if self.spec is not None and tuple(self.term_names) != self.spec.term_names:
            raise InvalidArgumentError("term names do not match the covariate spec")
        if self.lam < 0:
            raise InvalidArgumentError("lambda must be non-negative")

    @property
    def coef_dict(self):
        return dict(zip(self.term_names, self.coefficients.tolist()))

    def predict_matrix(self, design):
        return self.intercept + np.asarray(design, dtype=float) @ self.coefficients


def soft_threshold(a, t):
    return np.sign(a) * max(abs(a) - t, 0.0)


def _check_inputs(design, targets):
    X = np.asarray(design, dtype=float)
    s = np.asarray(targets, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise InvalidArgumentError(f"design must be a non-empty 2-D matrix, got shape {X.shape}")
    if s.shape != (X.shape[0],):
        raise InvalidArgumentError(f"targets shape {s.shape} does not match design rows {X.shape[0]}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(s))):
        raise InvalidArgumentError("design and targets must be finite")
    return X, s


def objective(design, targets, coefficients, intercept, lam):
    X, s = _check_inputs(design, targets)
    r = s - intercept - X @ np.asarray(coefficients, dtype=float)
    return float(r @ r / len(s) + lam * np.abs(coefficients).sum())


def coordinate_descent(gram, corr, lam, max_sweeps, tolerance, target_ms=None):
    """Covariance-mode coordinate descent on the quadratic form.

    ``gram = X'X/N`` and ``corr = X's/N``; the loss is
    ``target_ms - 2 corr'b + b'gram b``. Returns ``(beta, sweeps, converged, history)``
    where ``history`` holds the objective after each sweep when ``target_ms``
    is given.
    """
    T = gram.shape[0]
    q = np.diag(gram).copy()
    active = (q > 0).tolist()
    scale = np.sqrt(np.where(active, q, 0.0))
    beta = np.zeros(T)
    # plain floats for small T, numpy rows once per-coordinate dots get long
    use_numpy = T > 16
    g = gram if use_numpy else gram.tolist()
    c = corr.tolist()
    b = np.zeros(T) if use_numpy else [0.0] * T
    q = q.tolist()
    scale = scale.tolist()
    half = lam / 2.0
    history = []
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        delta = 0.0
        for j in range(T):
            if not active[j]:
                continue
            gj = g[j]
            if use_numpy:
                rho = c[j] - float(gj @ b) + q[j] * b[j]
            else:
                rho = c[j] - sum(gj[k] * b[k] for k in range(T)) + q[j] * b[j]
            if rho > half:
                new = (rho - half) / q[j]
            elif rho < -half:
                new = (rho + half) / q[j]
            else:
                new = 0.0
            step = abs(new - b[j]) * scale[j]
            if step > delta:
                delta = step
            b[j] = new
        if target_ms is not None:
            beta = np.array(b, dtype=float)
            loss = target_ms - 2.0 * corr @ beta + beta @ gram @ beta
            history.append(max(loss, 0.0) + lam * np.abs(beta).sum())
        if delta <= tolerance:
            converged = True
            break
    return np.array(b, dtype=float), sweeps, converged, history


def polish_active_set(gram, corr, beta, lam, tolerance):
    """Finish a stalled coordinate descent with a feature-sign active-set search.

    Coordinate descent crawls on near-singular problems (more columns than
    samples, tiny ``lam``). Inside a fixed sign orthant the objective is a
    smooth quadratic, so the optimum on an active set ``A`` with signs
    ``theta`` solves ``gram[A, A] b_A = corr_A - lam/2 theta``. Null
    directions of ``gram[A, A]`` move the objective only through the linear
    l1 term, so the active set is shrunk along them first; sign flips are
    resolved by stepping to the first zero crossing; inactive coordinates
    that violate optimality are added one at a time.

    Returns the refined coefficients if they satisfy the optimality
    conditions to ``tolerance``, otherwise ``None``.
    """
    half = lam / 2.0
    b = beta.copy()
    theta = np.sign(b)
    for _ in range(20 * b.size + 20):
        active = np.flatnonzero(theta)
        if active.size:
            signs = theta[active]
            sub = gram[np.ix_(active, active)]
            _, sv, vt = np.linalg.svd(sub)
            if sv[-1] <= 1e-12 * max(sv[0], 1e-300):
                d = vt[-1]
                if signs @ d > 0 or (signs @ d == 0 and np.all(b[active] * d >= 0)):
                    d = -d
            else:
                target = np.linalg.solve(sub, corr[active] - half * signs)
                d = target - b[active]
            # walk towards the target (or along the null direction) and stop
            # at the first coefficient that would change sign
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(signs * d < 0, -b[active] / d, np.inf)
            k = int(np.argmin(ratios))
            if sv[-1] > 1e-12 * max(sv[0], 1e-300) and ratios[k] >= 1.0:
                b[active] = target
            elif np.isfinite(ratios[k]):
                b[active] += ratios[k] * d
                b[active[k]] = 0.0
                theta[active[k]] = 0.0
                continue
            else:
                return None
        grad = corr - gram @ b
        inactive = np.flatnonzero(theta == 0)
        if inactive.size == 0:
            break
        j = inactive[int(np.argmax(np.abs(grad[inactive])))]
        if abs(grad[j]) - half <= tolerance:
            break
        theta[j] = np.sign(grad[j])
    else:
        return None
    grad = corr - gram @ b
    support = np.flatnonzero(b)
    stationary = np.abs(grad[support] - half * np.sign(b[support])).max() if support.size else 0.0
    others = np.delete(np.abs(grad), support)
    outside = max(float(others.max()) - half, 0.0) if others.size else 0.0
    if max(stationary, outside) > tolerance:
        return None
    return b


def fit(design, targets, options: FitOptions = FitOptions(), spec: CovariateSpec = None,
        term_names=None, record_history=False) -> LassoModel:
    """Fit the Lasso model; the intercept is never penalised.

    Convergence is declared when, within one sweep, no coefficient moves its
    column's contribution by more than ``options.tolerance`` (coefficient
    change times the column's root-mean-square).
    """
    X, s = _check_inputs(design, targets)
    N, T = X.shape
    if spec is not None and spec.n_terms != T:
        raise InvalidArgumentError(f"design has {T} columns, spec implies {spec.n_terms}")
    if term_names is None:
        term_names = spec.term_names if spec is not None else tuple(f"x{j}" for j in range(T))
    if options.fit_intercept:
        x_mean = X.mean(axis=0)
        s_mean = float(s.mean())
    else:
        x_mean = np.zeros(T)
        s_mean = 0.0
    Xc = X - x_mean
    sc = s - s_mean
    col_scale = np.ones(T)
    if options.standardize:
        rms = np.sqrt((Xc ** 2).mean(axis=0))
        col_scale = np.where(rms > 0, rms, 1.0)
        Xc = Xc / col_scale
    gram = Xc.T @ Xc / N
    corr = Xc.T @ sc / N
    # columns that are constant up to rounding carry no signal
    diag = np.diag(gram).copy()
    tiny = diag <= 1e-14 * np.maximum(np.abs(X).max(axis=0) ** 2, 1e-300)
    gram[tiny, :] = 0.0
    gram[:, tiny] = 0.0
    beta, sweeps, converged, history = coordinate_descent(
        gram, corr, options.lam, options.max_sweeps, options.tolerance,
        target_ms=float(sc @ sc / N) if record_history else None,
    )
    if not converged:
        polished = polish_active_set(gram, corr, beta, options.lam, options.tolerance)
        if polished is not None:
            beta, converged = polished, True
    beta = beta / col_scale
    intercept = s_mean - float(x_mean @ beta)
    r = s - intercept - X @ beta
    final = float(r @ r / N + options.lam * np.abs(beta).sum())
    stats = FitStats(sweeps, final, converged, tuple(history))
    return LassoModel(beta, intercept, options.lam, spec, tuple(term_names), stats)


def predict(model: LassoModel, pose) -> float:
    vec = covariate_vector(pose, model.spec)
    return float(model.predict_matrix(np.array([vec.values]))[0])


def adjusted_r2(model: LassoModel, design, targets) -> float:
    X, s = _check_inputs(design, targets)
    N = len(s)
    T = len(model.coefficients)
    if N <= T + 1:
        raise InvalidArgumentError(f"adjusted R^2 needs N > T + 1 (N={N}, T={T})")
    resid = s - model.predict_matrix(X)
    centered = s - s.mean()
    sst = float(centered @ centered)
    if sst == 0.0:
        raise InvalidArgumentError("targets have zero variance")
    r2 = 1.0 - float(resid @ resid) / sst
    return 1.0 - (1.0 - r2) * (N - 1) / (N - T - 1)


def kkt_residual(model: LassoModel, design, targets) -> float:
    """Largest violation of the Lasso optimality conditions; 0 at an exact optimum."""
    X, s = _check_inputs(design, targets)
    beta = model.coefficients
    if X.shape[1] != beta.size:
        raise InvalidArgumentError(f"design has {X.shape[1]} columns, model has {beta.size}")
    N = len(s)
    r = s - X @ beta - model.intercept
    grad = 2.0 / N * (X.T @ r)
    lam = model.lam
    nonzero = beta != 0
    viol = np.where(
        nonzero,
        np.abs(grad - lam * np.sign(beta)),
        np.maximum(0.0, np.abs(grad) - lam),
    )
    return float(viol.max())


def lambda_max(design, targets, fit_intercept=True):
    """Smallest lambda for which every coefficient is zero."""
    X, s = _check_inputs(design, targets)
    if fit_intercept:
        X = X - X.mean(axis=0)
        s = s - s.mean()
    return float(np.max(np.abs(2.0 * (X.T @ s / len(s)))))
