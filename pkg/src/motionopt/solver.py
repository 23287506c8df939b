"""Levenberg-Marquardt over flattened motion vectors with finite-difference Jacobians."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .motion import MotionVector, flatten, unflatten
from .residual import ProblemError, ResidualProblem

logger = logging.getLogger(__name__)

MAX_LAMBDA_INCREASES = 50
LAMBDA_MAX = 1e12


class EvaluationError(ArithmeticError):
    """A residual evaluation produced non-finite values."""

    def __init__(self, message: str, coordinate: int | None = None):
        super().__init__(message)
        self.coordinate = coordinate


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 200
    grad_tol: float = 1e-10
    step_tol: float = 1e-12
    objective_tol: float = 1e-16
    lambda_init: float = 1e-3
    lambda_up: float = 10.0
    lambda_down: float = 0.25
    fd_step: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        for name in ("grad_tol", "step_tol", "objective_tol", "lambda_init", "fd_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")
        if not self.lambda_up > 1:
            raise ValueError("lambda_up must exceed 1")
        if not 0 < self.lambda_down < 1:
            raise ValueError("lambda_down must lie in (0, 1)")


@dataclass
class SolveReport:
    final_x: MotionVector
    final_objective: float
    initial_objective: float
    iterations: int
    converged: str  # "gradient" | "step" | "objective" | "max_iter"
    trace: list[float] = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.converged != "max_iter"


ResidualFn = Callable[[np.ndarray], np.ndarray]


def _residual_fn(problem: ResidualProblem) -> ResidualFn:
    return problem.residual_vector


def _probe(fun: ResidualFn, x: np.ndarray, k: int | None) -> np.ndarray:
    try:
        r = fun(x)
    except (ValueError, ArithmeticError) as exc:
        if isinstance(exc, ProblemError):
            raise
        raise EvaluationError(f"residual evaluation failed while probing coordinate {k}: {exc}", coordinate=k) from exc
    if not np.all(np.isfinite(r)):
        raise EvaluationError(f"non-finite residual while probing coordinate {k}", coordinate=k)
    return r


def _jacobian(fun: ResidualFn, x: np.ndarray, h: float, central: bool = True, f0: np.ndarray | None = None) -> np.ndarray:
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    if f0 is None:
        f0 = _probe(fun, x, None)
    jac = np.empty((f0.size, x.size))
    for k in range(x.size):
        xp = x.copy()
        xp[k] += h
        fp = _probe(fun, xp, k)
        if central:
            xm = x.copy()
            xm[k] -= h
            col = (fp - _probe(fun, xm, k)) / (2.0 * h)
        else:
            col = (fp - f0) / h
        if not np.all(np.isfinite(col)):
            raise EvaluationError(f"non-finite residual while probing coordinate {k}", coordinate=k)
        jac[:, k] = col
    return jac


def numeric_jacobian(problem: ResidualProblem, x: MotionVector, h: float = 1e-6, central: bool = True) -> np.ndarray:
    """``6m x 6n`` Jacobian of the weighted residual vector (translation rows
    scaled by ``sqrt(sigma)``)."""
    return _jacobian(_residual_fn(problem), flatten(x), h, central=central)


def _objective_flat(fun: ResidualFn, x: np.ndarray) -> float:
    r = fun(x)
    return 0.5 * float(r @ r)


def gradients(problem: ResidualProblem, x: MotionVector, h: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    """Objective gradient two ways: ``J^T z`` from the finite-difference
    Jacobian, and central differences of the scalar objective."""
    fun = _residual_fn(problem)
    xf = flatten(x)
    r = fun(xf)
    g_jac = _jacobian(fun, xf, h, f0=r).T @ r
    g_fd = np.empty_like(xf)
    for k in range(xf.size):
        xp = xf.copy()
        xp[k] += h
        xm = xf.copy()
        xm[k] -= h
        g_fd[k] = (_objective_flat(fun, xp) - _objective_flat(fun, xm)) / (2.0 * h)
    return g_jac, g_fd


def gradient_check(problem: ResidualProblem, x: MotionVector, h: float = 1e-6) -> float:
    """Max discrepancy between the two gradients of :func:`gradients`,
    relative to the larger gradient's infinity norm."""
    g_jac, g_fd = gradients(problem, x, h)
    scale = max(np.max(np.abs(g_jac)), np.max(np.abs(g_fd)), 1e-8)
    return float(np.max(np.abs(g_jac - g_fd)) / scale)


def levenberg_marquardt(
    problem: ResidualProblem,
    x0: MotionVector | None = None,
    opts: SolverOptions = SolverOptions(),
) -> SolveReport:
    """Minimize ``0.5 ||z(x)||^2`` from ``x0`` (all-zero motions by default).

    Steps solve ``(J^T J + lam I) d = -J^T z``; a step is accepted only if it
    lowers the objective, so the returned trace is strictly decreasing.
    """
    if x0 is None:
        x0 = MotionVector.zeros(problem.n)
    if len(x0) != problem.n:
        raise ProblemError(f"x0 has {len(x0)} components, problem expects {problem.n}")
    fun = _residual_fn(problem)
    x = flatten(x0)
    r = fun(x)
    with np.errstate(over="ignore"):
        f = 0.5 * float(r @ r)
    if not np.isfinite(f):
        raise ProblemError("objective is not finite at x0")
    f_init = f
    trace = [f]
    lam = opts.lambda_init
    eye = np.eye(x.size)
    converged = "max_iter"
    it = 0

    while True:
        if f <= opts.objective_tol:
            converged = "objective"
            break
        if it >= opts.max_iterations:
            break
        jac = _jacobian(fun, x, opts.fd_step, f0=r)
        g = jac.T @ r
        if np.max(np.abs(g)) <= opts.grad_tol:
            converged = "gradient"
            break
        jtj = jac.T @ jac
        it += 1
        accepted = False
        tiny_step = False
        for _ in range(MAX_LAMBDA_INCREASES + 1):
            try:
                step = np.linalg.solve(jtj + lam * eye, -g)
            except np.linalg.LinAlgError:
                step = None
            if step is not None and np.all(np.isfinite(step)):
                if np.max(np.abs(step)) <= opts.step_tol:
                    tiny_step = True
                    break
                x_new = x + step
                r_new = fun(x_new)
                f_new = 0.5 * float(r_new @ r_new)
                if np.isfinite(f_new) and f_new < f:
                    accepted = True
                    break
            if lam >= LAMBDA_MAX:
                break
            lam = min(lam * opts.lambda_up, LAMBDA_MAX)
        if tiny_step:
            converged = "step"
            break
        if not accepted:
            logger.debug("iteration %d: no decrease found up to lambda=%g", it, lam)
            break
        x, r, f = x_new, r_new, f_new
        trace.append(f)
        lam = max(lam * opts.lambda_down, 1e-15)
        logger.debug("iteration %d: objective=%.6e lambda=%.3e", it, f, lam)
        if np.max(np.abs(step)) <= opts.step_tol:
            converged = "step"
            break

    return SolveReport(unflatten(x, problem.n), f, f_init, it, converged, trace)
