"""
Fisher information for a continuous parameter from state overlaps.

For pure joint states ``psi(theta)`` the fidelity expands as
``|<psi(theta - h/2)|psi(theta + h/2)>|^2 = 1 - I(theta) h^2 / 4 + O(h^4)``,
so a single two-sided solve per step size gives ``I``. Two step sizes are
combined by Richardson extrapolation; their difference is reported as an
error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from .analytic import GaussianScenario, gaussian_overlap
from .errors import NumericalError, ValidationError
from .model import GROUND, Hypothesis, HypothesisPair
from .numerics import OdeSettings
from .spectral import propagate_overlap
from .twosided import solve_two_sided

__all__ = [
    "ParametrizedScenario",
    "GaussianFamily",
    "FisherResult",
    "overlap_function",
    "fisher_information",
    "fisher_mixed_stencil",
    "cramer_rao",
]

NEGATIVE_TOL = 1e-9
NOISE_FRACTION = 0.1


class OverlapFamily(Protocol):
    t: float

    def overlap(self, theta: float, theta_prime: float) -> complex: ...


def _same_hypothesis(a: Hypothesis, b: Hypothesis) -> bool:
    ha, hb = a.hamiltonian, b.hamiltonian
    if len(a.channels) != len(b.channels) or len(ha.drive_terms) != len(hb.drive_terms):
        return False
    if not np.array_equal(ha.constant_part, hb.constant_part):
        return False
    for (ca, oa), (cb, ob) in zip(ha.drive_terms, hb.drive_terms):
        if ca != cb or not np.array_equal(oa, ob):
            return False
    return all(np.array_equal(x, y) for x, y in zip(a.channels, b.channels))


@dataclass
class ParametrizedScenario:
    """A one-parameter family of hypotheses probed for a time ``t``.

    Time-independent families are propagated with the matrix exponential of
    the vectorized generator (round-off level accuracy, which the second
    difference needs); otherwise the adaptive integrator is used.
    """

    builder: Callable[[float], Hypothesis]
    t: float
    initial_state: np.ndarray = field(default_factory=lambda: GROUND.copy())
    settings: OdeSettings = field(default_factory=lambda: OdeSettings(rel_tol=1e-12, abs_tol=1e-15))

    def overlap(self, theta: float, theta_prime: float) -> complex:
        hyp0, hyp1 = self.builder(theta), self.builder(theta_prime)
        if _same_hypothesis(hyp0, hyp1) or self.t == 0:
            return 1.0 + 0.0j
        pair = HypothesisPair(hyp0, hyp1, self.initial_state)
        if pair.is_time_independent:
            return complex(propagate_overlap(pair, [self.t])[0])
        return complex(solve_two_sided(pair, [0.0, self.t], self.settings).overlaps[-1])


@dataclass
class GaussianFamily:
    """Displacement rate ``g`` of the probed Gaussian spin model as the parameter."""

    k: float
    t: float

    def overlap(self, theta: float, theta_prime: float) -> complex:
        return complex(gaussian_overlap(GaussianScenario(theta, theta_prime, self.k, self.t)))


@dataclass
class FisherResult:
    theta: float
    t: float
    fisher: float
    crb: float
    step_h: float
    richardson_error_estimate: float


def overlap_function(scn: OverlapFamily, theta: float, theta_prime: float) -> complex:
    """``Tr rho01(t)`` with hypothesis 0 at ``theta`` and hypothesis 1 at ``theta_prime``.

    This is ``<psi(theta')|psi(theta)>`` for the joint system-environment states.
    """
    return scn.overlap(theta, theta_prime)


def cramer_rao(fr: FisherResult) -> float:
    """Lower bound ``1/I`` on the variance of an unbiased estimator."""
    return math.inf if fr.fisher <= 0 else 1.0 / fr.fisher


def fisher_information(scn: OverlapFamily, theta: float, h: float = 1e-3) -> FisherResult:
    """``I(theta)`` from the fidelity second difference, Richardson-extrapolated.

    Raises ``NumericalError`` when the two step sizes disagree by more than 10%
    of the estimate (round-off or integrator noise dominates) or when the
    estimate is negative beyond ``1e-9``.
    """
    if not h > 0:
        raise ValidationError(f"step h must be positive, got {h}")

    def second_difference(step):
        f = overlap_function(scn, theta - step / 2, theta + step / 2)
        return 4.0 * (1.0 - abs(f) ** 2) / step**2

    i_h = second_difference(h)
    i_h2 = second_difference(h / 2)
    fisher = (4.0 * i_h2 - i_h) / 3.0
    err = abs(i_h - i_h2)
    if fisher < -NEGATIVE_TOL:
        raise NumericalError(f"negative Fisher information {fisher:.3e}")
    fisher = max(fisher, 0.0)
    if err > NOISE_FRACTION * fisher and err > 0:
        raise NumericalError(
            f"Fisher estimate {fisher:.6g} dominated by noise (step difference {err:.3g})"
        )
    fr = FisherResult(theta, scn.t, fisher, math.inf, h, err)
    fr.crb = cramer_rao(fr)
    return fr


def fisher_mixed_stencil(scn: OverlapFamily, theta: float, h: float = 1e-3) -> float:
    """``4 Re(<d psi|d psi> - <d psi|psi><psi|d psi>)`` by central differences.

    Debugging cross-check for :func:`fisher_information`; needs six overlaps.
    """
    # g(a, b) = <psi(a)|psi(b)>
    g = lambda a, b: np.conj(overlap_function(scn, a, b))
    mixed = (
        g(theta + h, theta + h) - g(theta + h, theta - h) - g(theta - h, theta + h) + g(theta - h, theta - h)
    ) / (4 * h * h)
    d_bra = (g(theta + h, theta) - g(theta - h, theta)) / (2 * h)
    d_ket = (g(theta, theta + h) - g(theta, theta - h)) / (2 * h)
    return float(4.0 * np.real(mixed - d_bra * d_ket))
