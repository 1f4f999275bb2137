"""
Superoperator form of the two-sided equation and its spectrum.

With column stacking, ``d vec(rho01)/dt = L vec(rho01)`` where::

    L = -i (I (x) H0 - H1^T (x) I)
        + sum_m [ conj(c1_m) (x) c0_m - 1/2 (I (x) c0_m^+ c0_m + (c1_m^+ c1_m)^T (x) I) ]

After a transient, ``|Tr rho01(t)|`` decays like ``exp(-rate * t)`` where
``rate`` is the smallest non-zero ``|Re lambda|`` over the spectrum of ``L``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._parallel import ordered_map
from .errors import ValidationError
from .model import HypothesisPair, two_level_pair, validate_pair
from .numerics import eig_general, expm, vec

__all__ = [
    "SpectrumResult",
    "RateScan",
    "vectorize_two_sided",
    "propagate_overlap",
    "convergence_rate",
    "detuning_pair",
    "scan_rate_over_rabi",
    "fit_decay_rate",
]

log = logging.getLogger(__name__)

ZERO_TOL = 1e-10


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    rate: float
    zero_modes: int
    max_real: float

    @property
    def dissipative(self) -> bool:
        return self.max_real <= ZERO_TOL


@dataclass
class RateScan:
    detuning: float
    omegas: np.ndarray
    rates: np.ndarray
    argmax_omega: float
    max_rate: float
    refinement_shift: float  # |refined argmax - best grid point|


def vectorize_two_sided(pair: HypothesisPair) -> np.ndarray:
    """The ``d^2 x d^2`` generator acting on column-stacked ``rho01``."""
    pair = validate_pair(pair)
    if not pair.is_time_independent:
        raise ValidationError("vectorized generator requires time-independent hypotheses")
    d = pair.dim
    eye = np.eye(d, dtype=complex)
    h0 = pair.hyp0.hamiltonian.static()
    h1 = pair.hyp1.hamiltonian.static()
    gen = -1j * (np.kron(eye, h0) - np.kron(h1.T, eye))
    for c0, c1 in zip(pair.hyp0.channels, pair.hyp1.channels):
        k0 = c0.conj().T @ c0
        k1 = c1.conj().T @ c1
        gen += np.kron(c1.conj(), c0) - 0.5 * (np.kron(eye, k0) + np.kron(k1.T, eye))
    return gen


def propagate_overlap(pair: HypothesisPair, t_grid: Sequence[float]) -> np.ndarray:
    """``Tr rho01(t)`` by exponentiating the vectorized generator at each time."""
    gen = vectorize_two_sided(pair)
    d = pair.dim
    v0 = vec(pair.initial_rho)
    trace_row = vec(np.eye(d))  # Tr X == vec(I) . vec(X)
    return np.array([trace_row @ (expm(gen * t) @ v0) for t in np.asarray(t_grid, dtype=float)])


def convergence_rate(pair: HypothesisPair, zero_tol: float = ZERO_TOL) -> SpectrumResult:
    """Slowest decay rate of the two-sided generator, ignoring stationary modes."""
    w = eig_general(vectorize_two_sided(pair))
    re = np.abs(w.real)
    decaying = re > zero_tol
    rate = float(re[decaying].min()) if decaying.any() else 0.0
    res = SpectrumResult(w, rate, int((~decaying).sum()), float(w.real.max()))
    if not res.dissipative:
        log.warning("generator has eigenvalue with Re = %.3e > 0 (not dissipative)", res.max_real)
    return res


def detuning_pair(omega: float, delta: float, kappa: float = 1.0) -> HypothesisPair:
    """Resonant drive vs the same drive detuned by ``delta``, shared decay, start in |g>."""
    return two_level_pair(omega, omega, 0.0, delta, kappa)


def _parabolic_peak(x: np.ndarray, y: np.ndarray, i: int) -> tuple[float, float]:
    if i == 0 or i == len(x) - 1:
        return float(x[i]), float(y[i])
    x0, x1, x2 = x[i - 1 : i + 2]
    y0, y1, y2 = y[i - 1 : i + 2]
    a, b, c = np.polyfit([x0, x1, x2], [y0, y1, y2], 2)
    if a >= 0:
        return float(x1), float(y1)
    xv = -b / (2 * a)
    return float(xv), float(np.polyval([a, b, c], xv))


def scan_rate_over_rabi(
    delta: float,
    omega_grid: Sequence[float],
    builder: Callable[[float, float], HypothesisPair] = detuning_pair,
) -> RateScan:
    """Convergence rate versus drive strength for telling ``delta`` apart from zero."""
    omegas = np.asarray(omega_grid, dtype=float)
    if omegas.ndim != 1 or omegas.size < 1:
        raise ValidationError("omega_grid must be a non-empty 1-D sequence")
    if np.any(omegas <= 0) or np.any(np.diff(omegas) <= 0):
        raise ValidationError("omega_grid must be positive and strictly increasing")
    rates = np.array(ordered_map(lambda om: convergence_rate(builder(om, delta)).rate, omegas))
    i = int(np.argmax(rates))
    xv, yv = _parabolic_peak(omegas, rates, i)
    return RateScan(float(delta), omegas, rates, xv, yv, abs(xv - omegas[i]))


def fit_decay_rate(times, overlaps, t_min: float) -> float:
    """Exponential rate from a straight-line fit of ``log|overlap|`` over ``t >= t_min``."""
    t = np.asarray(times, dtype=float)
    mag = np.abs(np.asarray(overlaps))
    sel = (t >= t_min) & (mag > 0)
    if sel.sum() < 2:
        raise ValidationError("need at least two non-zero samples after t_min")
    slope, _ = np.polyfit(t[sel], np.log(mag[sel]), 1)
    return float(-slope)
