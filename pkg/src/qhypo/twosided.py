"""
Time-domain propagation of the two-sided master equation.

The off-diagonal block ``rho01`` of the ancilla-system density matrix evolves
with hypothesis-0 operators acting from the left and hypothesis-1 operators
from the right::

    d rho01/dt = -i (H0 rho01 - rho01 H1)
                 + sum_m [ c0_m rho01 c1_m^+ - 1/2 (c0_m^+ c0_m rho01 + rho01 c1_m^+ c1_m) ]

Its trace is the overlap of the joint system-environment states under the two
hypotheses. ``rho01`` is stored without the 1/2 prefactor of the block matrix,
so ``Tr rho01(0) = 1`` for a pure initial state. With identical hypotheses the
same equation is the ordinary Lindblad master equation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bounds import error_from_overlap
from .errors import ValidationError
from .model import Hypothesis, HypothesisPair, validate_density_matrix, validate_pair
from .numerics import OdeSettings, as_matrix, integrate_adaptive

__all__ = [
    "OverlapCurve",
    "DensityTrajectory",
    "two_sided_derivative",
    "two_sided_rhs",
    "solve_two_sided",
    "two_sided_trace",
    "solve_lindblad",
]

@dataclass
class OverlapCurve:
    times: np.ndarray
    overlaps: np.ndarray  # complex, Tr rho01(t)
    pe_min: np.ndarray


@dataclass
class DensityTrajectory:
    times: np.ndarray
    states: np.ndarray  # shape (n_times, d, d)


def _effective(hyp: Hypothesis, t: float, jump_sum: np.ndarray) -> np.ndarray:
    return hyp.hamiltonian(t) - 0.5j * jump_sum


def two_sided_rhs(pair: HypothesisPair) -> Callable[[float, np.ndarray], np.ndarray]:
    """Return ``f(t, rho01)`` for the two-sided equation of a validated pair.

    Uses the effective non-Hermitian Hamiltonians ``A_j = H_j - (i/2) sum c_j^+ c_j``,
    so that the right-hand side reads ``-i (A0 rho - rho A1^+) + sum c0 rho c1^+``.
    """
    h0, h1 = pair.hyp0, pair.hyp1
    c0 = np.array(h0.channels) if h0.channels else np.zeros((0, pair.dim, pair.dim), complex)
    c1 = np.array(h1.channels) if h1.channels else np.zeros((0, pair.dim, pair.dim), complex)
    jumps = [(a, b.conj().T) for a, b in zip(c0, c1) if np.any(a) or np.any(b)]
    k0 = np.einsum("mji,mjk->ik", c0.conj(), c0)
    k1 = np.einsum("mji,mjk->ik", c1.conj(), c1)

    if pair.is_time_independent:
        a0 = _effective(h0, 0.0, k0)
        a1_dag = _effective(h1, 0.0, k1).conj().T

        def rhs(t, rho):
            out = -1j * (a0 @ rho - rho @ a1_dag)
            for a, b_dag in jumps:
                out += a @ rho @ b_dag
            return out

    else:

        def rhs(t, rho):
            a0 = _effective(h0, t, k0)
            a1_dag = _effective(h1, t, k1).conj().T
            out = -1j * (a0 @ rho - rho @ a1_dag)
            for a, b_dag in jumps:
                out += a @ rho @ b_dag
            return out

    return rhs


def two_sided_derivative(pair: HypothesisPair, rho01, t: float = 0.0) -> np.ndarray:
    """Evaluate the two-sided generator on ``rho01`` at time ``t``."""
    pair = validate_pair(pair)
    rho = as_matrix(rho01, "rho01")
    if rho.shape != (pair.dim, pair.dim):
        raise ValidationError(f"dimension mismatch: rho01 {rho.shape} for a {pair.dim}-level pair")
    return two_sided_rhs(pair)(t, rho)


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValidationError("t_grid must be a non-empty 1-D sequence")
    return t


def two_sided_trace(
    hyp0: Hypothesis,
    hyp1: Hypothesis,
    rho_initial,
    t_grid: Sequence[float],
    settings: OdeSettings = OdeSettings(),
) -> np.ndarray:
    """``Tr rho01(t)`` starting from an arbitrary (possibly mixed) ``rho_initial``.

    No error-probability interpretation is attached to the result for mixed
    initial states.
    """
    rho0 = as_matrix(rho_initial, "rho_initial")
    d = rho0.shape[0]
    pair = validate_pair(HypothesisPair(hyp0, hyp1, np.eye(d, dtype=complex)[0]))
    if rho0.shape != (pair.dim, pair.dim):
        raise ValidationError("dimension mismatch between rho_initial and hypotheses")
    t = _check_grid(t_grid)
    states = integrate_adaptive(two_sided_rhs(pair), rho0, t, settings)
    return np.array([np.trace(s) for s in states])


def solve_two_sided(
    pair: HypothesisPair,
    t_grid: Sequence[float],
    settings: OdeSettings = OdeSettings(),
) -> OverlapCurve:
    """Propagate ``rho01`` from ``|psi(0)><psi(0)|`` and return the overlap curve.

    ``t_grid`` must start at 0. The minimal error probability at each time is
    ``1/2 (1 - sqrt(1 - |Tr rho01|^2))``.
    """
    pair = validate_pair(pair)
    t = _check_grid(t_grid)
    if t[0] != 0.0:
        raise ValidationError("t_grid must start at 0")
    states = integrate_adaptive(two_sided_rhs(pair), pair.initial_rho, t, settings)
    overlaps = np.array([np.trace(s) for s in states])
    pe = np.array([error_from_overlap(a) for a in overlaps])
    return OverlapCurve(t, overlaps, pe)


def solve_lindblad(
    hyp: Hypothesis,
    initial,
    t_grid: Sequence[float],
    settings: OdeSettings = OdeSettings(),
) -> DensityTrajectory:
    """Evolve a density matrix under a single hypothesis' Lindblad equation."""
    rho0 = validate_density_matrix(initial, "initial")
    hyp.validate()
    if rho0.shape != (hyp.dim, hyp.dim):
        raise ValidationError("dimension mismatch between initial state and hypothesis")
    t = _check_grid(t_grid)
    pair = HypothesisPair(hyp, hyp, np.eye(hyp.dim, dtype=complex)[0])
    states = integrate_adaptive(two_sided_rhs(pair), rho0, t, settings)
    return DensityTrajectory(t, np.array(states))
