"""
Hypotheses, channels and scenario presets.

Units: hbar = 1 and rates in units of the decay rate kappa; times are kappa*t.
A Lindblad channel is just a square complex array ``c`` with the rate absorbed
into it (``c = sqrt(kappa) * L``).

The two-level preset uses the basis order ``(|g>, |e>)`` and the Hamiltonian

    H = (Omega/2) (|e><g| + |g><e|) + delta |e><e|
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence, Union

import numpy as np

from .errors import ValidationError
from .numerics import as_matrix, as_vector

__all__ = [
    "Constant",
    "PiecewiseConstant",
    "Sinusoid",
    "TimeDependentHamiltonian",
    "Hypothesis",
    "HypothesisPair",
    "TwoLevelParams",
    "build_two_level",
    "two_level_pair",
    "validate_pair",
    "validate_density_matrix",
    "GROUND",
    "EXCITED",
]

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12
DENSITY_TOL = 1e-10

GROUND = np.array([1.0, 0.0], dtype=complex)
EXCITED = np.array([0.0, 1.0], dtype=complex)


# -- drive coefficients -------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, t: float) -> float:
        return self.value

    is_constant = True


@dataclass(frozen=True)
class PiecewiseConstant:
    """``values[i]`` on ``[breakpoints[i-1], breakpoints[i])``; ``len(values) == len(breakpoints) + 1``."""

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.breakpoints) + 1:
            raise ValidationError("PiecewiseConstant needs len(values) == len(breakpoints) + 1")
        if any(b2 <= b1 for b1, b2 in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValidationError("breakpoints must be strictly increasing")

    def __call__(self, t: float) -> float:
        return self.values[int(np.searchsorted(self.breakpoints, t, side="right"))]

    is_constant = False


@dataclass(frozen=True)
class Sinusoid:
    """``offset + amplitude * cos(frequency * t + phase)``."""

    amplitude: float
    frequency: float
    phase: float = 0.0
    offset: float = 0.0

    def __call__(self, t: float) -> float:
        return self.offset + self.amplitude * math.cos(self.frequency * t + self.phase)

    is_constant = False


Coefficient = Union[Constant, PiecewiseConstant, Sinusoid]


# -- Hamiltonians and hypotheses ---------------------------------------------


def _check_hermitian(h: np.ndarray, name: str) -> None:
    dev = float(np.max(np.abs(h - h.conj().T)))
    if dev > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(h)))):
        raise ValidationError(f"{name} is not Hermitian (max deviation {dev:.3e})")


@dataclass(frozen=True)
class TimeDependentHamiltonian:
    """``H(t) = constant_part + sum_j f_j(t) H_j``."""

    constant_part: np.ndarray
    drive_terms: tuple[tuple[Coefficient, np.ndarray], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constant_part", as_matrix(self.constant_part, "Hamiltonian"))
        terms = tuple((coef, as_matrix(op, "drive operator")) for coef, op in self.drive_terms)
        object.__setattr__(self, "drive_terms", terms)

    @property
    def dim(self) -> int:
        return self.constant_part.shape[0]

    @property
    def is_time_independent(self) -> bool:
        return all(coef.is_constant for coef, _ in self.drive_terms)

    def __call__(self, t: float) -> np.ndarray:
        h = self.constant_part.copy()
        for coef, op in self.drive_terms:
            h += coef(t) * op
        return h

    def static(self) -> np.ndarray:
        """The Hamiltonian matrix, for time-independent Hamiltonians only."""
        if not self.is_time_independent:
            raise ValidationError("Hamiltonian has time-dependent drive terms")
        return self(0.0)

    def validate(self) -> None:
        d = self.dim
        ops = [self.constant_part] + [op for _, op in self.drive_terms]
        for op in ops:
            if op.shape != (d, d):
                raise ValidationError(
                    f"dimension mismatch: Hamiltonian terms have shapes {[o.shape for o in ops]}"
                )
            _check_hermitian(op, "Hamiltonian")


@dataclass(frozen=True)
class Hypothesis:
    """One candidate dynamics: a Hamiltonian and a list of jump operators."""

    label: str
    hamiltonian: TimeDependentHamiltonian
    channels: tuple[np.ndarray, ...] = ()

    def __post_init__(self):
        if not isinstance(self.hamiltonian, TimeDependentHamiltonian):
            object.__setattr__(self, "hamiltonian", TimeDependentHamiltonian(self.hamiltonian))
        object.__setattr__(
            self, "channels", tuple(as_matrix(c, "channel operator") for c in self.channels)
        )

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    @property
    def is_time_independent(self) -> bool:
        return self.hamiltonian.is_time_independent

    def validate(self) -> None:
        self.hamiltonian.validate()
        for c in self.channels:
            if c.shape != (self.dim, self.dim):
                raise ValidationError(
                    f"dimension mismatch: channel of shape {c.shape} for a {self.dim}-level system"
                )


@dataclass(frozen=True)
class HypothesisPair:
    """Two hypotheses and the shared pure initial system state."""

    hyp0: Hypothesis
    hyp1: Hypothesis
    initial_state: np.ndarray = field(default_factory=lambda: GROUND.copy())

    def __post_init__(self):
        object.__setattr__(self, "initial_state", as_vector(self.initial_state, "initial_state"))

    @property
    def dim(self) -> int:
        return self.hyp0.dim

    @property
    def is_time_independent(self) -> bool:
        return self.hyp0.is_time_independent and self.hyp1.is_time_independent

    @property
    def initial_rho(self) -> np.ndarray:
        psi = self.initial_state
        return np.outer(psi, psi.conj())


def validate_pair(pair: HypothesisPair) -> HypothesisPair:
    """Check a pair's invariants and pad the shorter channel list with zeros.

    Returns ``pair`` itself when nothing needs padding.
    """
    pair.hyp0.validate()
    pair.hyp1.validate()
    d = pair.hyp0.dim
    if pair.hyp1.dim != d or pair.initial_state.shape != (d,):
        raise ValidationError(
            f"dimension mismatch: hyp0 {d}, hyp1 {pair.hyp1.dim}, "
            f"initial_state {pair.initial_state.shape[0]}"
        )
    norm = float(np.linalg.norm(pair.initial_state))
    if abs(norm - 1.0) > NORM_TOL:
        raise ValidationError(f"initial_state is unnormalized (norm {norm:.12g})")

    n0, n1 = len(pair.hyp0.channels), len(pair.hyp1.channels)
    if n0 == n1:
        return pair
    zero = np.zeros((d, d), dtype=complex)
    pad = lambda h, n: replace(h, channels=h.channels + (zero,) * (n - len(h.channels)))
    n = max(n0, n1)
    return replace(pair, hyp0=pad(pair.hyp0, n), hyp1=pad(pair.hyp1, n))


def validate_density_matrix(rho, name: str = "rho", tol: float = DENSITY_TOL) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity to ``tol``."""
    r = as_matrix(rho, name)
    if r.shape[0] != r.shape[1]:
        raise ValidationError(f"{name} must be square")
    if np.max(np.abs(r - r.conj().T)) > tol:
        raise ValidationError(f"{name} is not Hermitian")
    if abs(np.trace(r) - 1.0) > tol:
        raise ValidationError(f"{name} does not have unit trace (trace {np.trace(r).real:.12g})")
    if np.linalg.eigvalsh(0.5 * (r + r.conj().T))[0] < -tol:
        raise ValidationError(f"{name} is not positive semidefinite")
    return r



# -- two-level preset ---------------------------------------------------------


@dataclass(frozen=True)
class TwoLevelParams:
    rabi: float = 0.0
    detuning: float = 0.0
    kappa: float = 1.0


def build_two_level(p: TwoLevelParams, label: str | None = None) -> Hypothesis:
    """Resonantly (or detuned) driven two-level atom with spontaneous decay."""
    if p.kappa < 0:
        raise ValidationError(f"decay rate must be non-negative, got kappa={p.kappa}")
    h = np.array([[0.0, p.rabi / 2], [p.rabi / 2, p.detuning]], dtype=complex)
    c = math.sqrt(p.kappa) * np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    if label is None:
        label = f"rabi={p.rabi:g}, detuning={p.detuning:g}, kappa={p.kappa:g}"
    return Hypothesis(label, TimeDependentHamiltonian(h), (c,))


def two_level_pair(
    rabi0: float,
    rabi1: float,
    detuning0: float = 0.0,
    detuning1: float = 0.0,
    kappa: float = 1.0,
    initial_state: Sequence[complex] = GROUND,
) -> HypothesisPair:
    """Two-level hypotheses sharing the decay channel, started in ``initial_state``."""
    return HypothesisPair(
        build_two_level(TwoLevelParams(rabi0, detuning0, kappa)),
        build_two_level(TwoLevelParams(rabi1, detuning1, kappa)),
        np.asarray(initial_state, dtype=complex),
    )
