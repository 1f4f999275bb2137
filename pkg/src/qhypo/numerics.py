"""
Dense complex linear algebra and ODE integration primitives.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Superoperators
use column-stacking everywhere, so that::

    vec(A @ X @ B) == kron(B.T, A) @ vec(X)

with ``vec(X) = X.reshape(-1, order="F")``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import EigenSolverError, IntegrationError, ValidationError

__all__ = [
    "OdeSettings",
    "as_matrix",
    "as_vector",
    "kron",
    "expm",
    "eig_general",
    "eig_hermitian",
    "integrate_adaptive",
    "vec",
    "unvec",
]


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array or raise ``ValidationError``."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.size == 0:
        raise ValidationError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return a


def as_vector(v, name: str = "vector") -> np.ndarray:
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1 or a.size == 0:
        raise ValidationError(f"{name} must be a non-empty 1-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains NaN or Inf entries")
    return a


def _square(m, name: str = "matrix") -> np.ndarray:
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {a.shape}")
    return a


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


def kron(a, b) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(as_matrix(a, "a"), as_matrix(b, "b"))


def expm(m) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a Padé kernel."""
    return scipy.linalg.expm(_square(m))


def eig_general(m) -> np.ndarray:
    """All eigenvalues (with multiplicity) of a general complex matrix.

    Uses the LAPACK Hessenberg/QR (Schur) route. Raises ``EigenSolverError``
    if the iteration does not converge.
    """
    a = _square(m)
    try:
        w = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue iteration did not converge: {exc}") from exc
    if not np.all(np.isfinite(w)):
        raise EigenSolverError("eigensolver returned non-finite eigenvalues")
    return w


def eig_hermitian(m, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Ascending real eigenvalues and orthonormal eigenvectors (as columns).

    The input must be Hermitian to within ``tol`` (scaled by ``max(1, |m|)``).
    """
    a = _square(m)
    scale = max(1.0, float(np.max(np.abs(a))))
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > tol * scale:
        raise ValidationError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    h = 0.5 * (a + a.conj().T)
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc
    return w, v


@dataclass(frozen=True)
class OdeSettings:
    """Tolerances and limits for :func:`integrate_adaptive`.

    ``initial_step=None`` lets the integrator pick a starting step from the
    local scale of the derivative.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    initial_step: Optional[float] = None
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not self.rel_tol > 0 or not self.abs_tol > 0:
            raise ValidationError("rel_tol and abs_tol must be positive")
        if self.max_steps < 1:
            raise ValidationError("max_steps must be >= 1")
        if self.initial_step is not None and not self.initial_step > 0:
            raise ValidationError("initial_step must be positive")


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_LOW = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B - _B_LOW

# PI controller exponents (Hairer & Wanner, order 5)
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5
_SAFETY = 0.9
_FAC_MIN, _FAC_MAX = 0.2, 5.0


def _error_norm(err, y, y_new, settings: OdeSettings) -> float:
    scale = settings.abs_tol + settings.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def _initial_step(f, t0, y0, f0, settings: OdeSettings) -> float:
    scale = settings.abs_tol + settings.rel_tol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = f(t0 + h0, y0 + h0 * f0)
    d2 = np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def integrate_adaptive(
    derivative: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t_grid: Sequence[float],
    settings: OdeSettings = OdeSettings(),
) -> list[np.ndarray]:
    """Integrate ``y' = derivative(t, y)`` and sample at every ``t_grid`` point.

    Embedded Dormand-Prince 5(4) pair with PI step-size control. Steps are
    clipped to land exactly on grid points, so no dense-output interpolation
    is involved. ``y0`` may have any shape; samples keep that shape.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValidationError("t_grid must be a non-empty 1-D sequence")
    if np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid must be strictly increasing")
    y = np.array(y0, dtype=complex)
    if not np.all(np.isfinite(y)):
        raise ValidationError("initial value contains NaN or Inf")

    def f(t, y):
        dy = np.asarray(derivative(t, y), dtype=complex)
        if not np.all(np.isfinite(dy)):
            raise IntegrationError(f"derivative returned NaN/Inf at t={t:.6g}")
        return dy

    t = float(t_grid[0])
    out = [y.copy()]
    if t_grid.size == 1:
        return out

    k0 = f(t, y)
    h = settings.initial_step or _initial_step(f, t, y, k0, settings)
    err_prev = 1.0
    n_steps = 0
    k = [None] * 7

    for t_target in t_grid[1:]:
        while t < t_target:
            if n_steps >= settings.max_steps:
                raise IntegrationError(f"max_steps={settings.max_steps} exceeded at t={t:.6g}")
            n_steps += 1
            remaining = t_target - t
            last = h >= remaining * (1 - 1e-12)
            h_try = remaining if last else h

            k[0] = k0
            for s in range(1, 7):
                acc = y.copy()
                for j, a in enumerate(_A[s]):
                    if a != 0.0:
                        acc += h_try * a * k[j]
                k[s] = f(t + _C[s] * h_try, acc)
            y_new = acc  # stage 7 argument is the 5th-order solution (FSAL)
            err = h_try * sum(e * kk for e, kk in zip(_E, k) if e != 0.0)
            err_norm = _error_norm(err, y, y_new, settings)

            if err_norm <= 1.0:
                t = t_target if last else t + h_try
                y = y_new
                k0 = k[6]
                fac = _SAFETY * max(err_norm, 1e-10) ** -_ALPHA * err_prev**_BETA
                err_prev = max(err_norm, 1e-4)
                h_next = h_try * min(_FAC_MAX, max(_FAC_MIN, fac))
                # a grid-shortened step says little about the next step size
                if not (last and h_try < h):
                    h = h_next
            else:
                h = h_try * max(_FAC_MIN, _SAFETY * err_norm**-_ALPHA)
                if h < 1e-14 * max(1.0, abs(t)):
                    raise IntegrationError(f"step size underflow at t={t:.6g}")
        out.append(y.copy())
    return out
