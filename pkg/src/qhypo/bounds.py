"""
Error probabilities for telling two hypotheses apart.

``error_from_overlap``
    minimal error for two pure states with overlap ``alpha`` (any measurement).
``helstrom_error``
    minimal error for two density matrices (measurement on the system only).
``no_jump_evolution`` / ``counting_error_curves``
    photon-counting strategies for the driven two-level atom, where hypothesis
    0 has no drive so a single detected photon rules it out.
``fig2_bundle``
    all four curves on a common time grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .model import GROUND, HypothesisPair, TwoLevelParams, build_two_level, validate_density_matrix
from .numerics import OdeSettings, eig_hermitian, integrate_adaptive

__all__ = [
    "error_from_overlap",
    "helstrom_error",
    "NoJumpState",
    "no_jump_evolution",
    "counting_error_curves",
    "Fig2Bundle",
    "fig2_bundle",
    "no_jump_zeros",
]

OVERLAP_CLAMP_TOL = 1e-9


def error_from_overlap(alpha: complex) -> float:
    """``1/2 (1 - sqrt(1 - |alpha|^2))`` for equal priors.

    ``|alpha|`` up to ``1 + 1e-9`` is treated as 1 (roundoff from propagation).
    """
    a2 = abs(alpha) ** 2
    if a2 > (1.0 + OVERLAP_CLAMP_TOL) ** 2:
        raise ValidationError(f"|overlap| = {abs(alpha):.12g} exceeds 1")
    return 0.5 * (1.0 - math.sqrt(max(0.0, 1.0 - min(a2, 1.0))))


def helstrom_error(rho0, rho1, tol: float = 1e-10) -> float:
    """Minimal error probability for discriminating ``rho0`` from ``rho1``.

    Half plus the sum of the negative eigenvalues of ``(rho1 - rho0)/2``, which
    equals ``1/2 (1 - ||rho1 - rho0||_1 / 2)``.
    """
    r0 = validate_density_matrix(rho0, "rho0", tol)
    r1 = validate_density_matrix(rho1, "rho1", tol)
    if r0.shape != r1.shape:
        raise ValidationError(f"dimension mismatch: {r0.shape} vs {r1.shape}")
    diff = 0.5 * (r1 - r0)
    gam, _ = eig_hermitian(0.5 * (diff + diff.conj().T))
    return float(0.5 + gam[gam <= 0].sum())


@dataclass
class NoJumpState:
    """Un-normalized no-jump wavefunction ``a(t)|g> + b(t)|e>``."""

    times: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def p_no_jump(self) -> np.ndarray:
        return np.abs(self.a) ** 2 + np.abs(self.b) ** 2


def no_jump_evolution(
    omega: float,
    kappa: float,
    t_grid: Sequence[float],
    settings: OdeSettings = OdeSettings(),
) -> NoJumpState:
    """Integrate ``i psi' = H_NH psi`` from ``|g>``.

    ``H_NH = (omega/2)(|e><g| + |g><e|) - (i kappa/2)|e><e|``.
    """
    if kappa < 0:
        raise ValidationError("kappa must be non-negative")
    h_nh = np.array([[0.0, omega / 2], [omega / 2, -0.5j * kappa]], dtype=complex)
    gen = -1j * h_nh
    psi = integrate_adaptive(lambda t, y: gen @ y, GROUND, t_grid, settings)
    psi = np.array(psi)
    return NoJumpState(np.asarray(t_grid, dtype=float), psi[:, 0], psi[:, 1])


def counting_error_curves(
    omega1: float,
    kappa: float,
    t_grid: Sequence[float],
    settings: OdeSettings = OdeSettings(),
    no_jump: NoJumpState | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Errors for photon counting alone, and counting plus a final atomic readout.

    Only meaningful for the undriven-vs-driven scenario (``omega0 = 0``) with a
    shared decay channel. Returns ``(1/2 (|a|^2 + |b|^2), 1/2 |a|^2)``.
    """
    nj = no_jump if no_jump is not None else no_jump_evolution(omega1, kappa, t_grid, settings)
    return 0.5 * nj.p_no_jump, 0.5 * np.abs(nj.a) ** 2


@dataclass
class Fig2Bundle:
    times: np.ndarray
    pe_min: np.ndarray
    pe_counting: np.ndarray
    pe_counting_atom: np.ndarray
    pe_helstrom: np.ndarray

    def ordering_violation(self) -> float:
        """Largest amount by which the expected curve ordering is broken (<= 0 if none)."""
        gaps = [
            -self.pe_min,
            self.pe_min - self.pe_counting_atom,
            self.pe_counting_atom - self.pe_counting,
            self.pe_counting - 0.5,
            self.pe_min - self.pe_helstrom,
        ]
        return float(max(g.max() for g in gaps))


def fig2_bundle(
    omega1: float,
    kappa: float,
    t_grid: Sequence[float],
    settings: OdeSettings = OdeSettings(),
    omega0: float = 0.0,
) -> Fig2Bundle:
    """Minimal, counting, counting+atom and atom-only error curves for ``omega0 = 0``."""
    from .twosided import solve_lindblad, solve_two_sided

    if omega0 != 0.0:
        raise ValidationError("counting curves are defined only for omega0 = 0")
    t = np.asarray(t_grid, dtype=float)
    hyp0 = build_two_level(TwoLevelParams(omega0, 0.0, kappa))
    hyp1 = build_two_level(TwoLevelParams(omega1, 0.0, kappa))

    curve = solve_two_sided(HypothesisPair(hyp0, hyp1, GROUND), t, settings)
    pe_counting, pe_counting_atom = counting_error_curves(omega1, kappa, t, settings)

    rho_g = np.outer(GROUND, GROUND.conj())
    traj0 = solve_lindblad(hyp0, rho_g, t, settings)
    traj1 = solve_lindblad(hyp1, rho_g, t, settings)
    pe_helstrom = np.array([helstrom_error(r0, r1) for r0, r1 in zip(traj0.states, traj1.states)])
    return Fig2Bundle(t, curve.pe_min, pe_counting, pe_counting_atom, pe_helstrom)


def no_jump_zeros(
    omega: float,
    kappa: float,
    t_max: float,
    n_bracket: int = 2001,
    settings: OdeSettings = OdeSettings(),
) -> np.ndarray:
    """Times in ``(0, t_max]`` where the ground amplitude ``a(t)`` vanishes.

    For real drive ``a(t)`` stays real, so zeros are bracketed by sign changes
    on a uniform grid and polished with Brent's method.
    """
    from scipy.optimize import brentq

    t = np.linspace(0.0, t_max, n_bracket)
    a = no_jump_evolution(omega, kappa, t, settings).a.real

    def a_at(s):
        return no_jump_evolution(omega, kappa, [0.0, s], settings).a[-1].real

    idx = np.nonzero(np.sign(a[1:]) * np.sign(a[:-1]) < 0)[0]
    return np.array([brentq(a_at, t[i], t[i + 1], xtol=1e-13) for i in idx])
