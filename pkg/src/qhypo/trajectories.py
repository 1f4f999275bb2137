"""
Monte Carlo wavefunction estimate of the two-sided overlap.

The system is augmented with an ancilla qubit whose basis state selects the
hypothesis: the Hamiltonian is ``diag(H0, H1)`` and each jump operator is
``diag(c0_m, c1_m)``. Starting from ``(|0> + |1>)/sqrt(2) (x) |psi(0)>``, the
ensemble average of ``2 <sigma_A^+>`` equals ``Tr rho01``.

Unraveling is first order with a fixed step ``dt``: at each step channel ``m``
fires with probability ``dt <c_m^+ c_m>``; otherwise the state is propagated
with ``exp(-i H_eff dt)`` and renormalized.

Random numbers: trajectory ``i`` draws from its own Philox stream keyed by
``SeedSequence(seed, spawn_key=(i,))``, one uniform per step. Any trajectory
can therefore be replayed in isolation, and results do not depend on how
trajectories are batched or threaded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._parallel import ordered_map
from .errors import ValidationError
from .model import HypothesisPair, validate_pair
from .numerics import expm

__all__ = ["AugmentedModel", "EnsembleConfig", "EnsembleEstimate", "build_augmented", "run_ensemble"]

STABILITY_LIMIT = 0.05
BATCH_SIZE = 512  # fixed so that results never depend on the thread count


@dataclass(frozen=True)
class AugmentedModel:
    dim: int
    hamiltonian: object  # callable t -> (2d, 2d) array
    channels: tuple[np.ndarray, ...]
    sigma_plus: np.ndarray
    initial_state: np.ndarray
    time_independent: bool

    def hamiltonian_at(self, t: float) -> np.ndarray:
        return self.hamiltonian(t)

    @property
    def max_jump_rate(self) -> float:
        """Upper bound on the total jump rate: sum of the largest eigenvalues of ``c^+ c``."""
        return float(sum(np.linalg.eigvalsh(c.conj().T @ c)[-1] for c in self.channels))


@dataclass(frozen=True)
class EnsembleConfig:
    n_traj: int
    seed: int = 0
    dt: float = 1e-3

    def __post_init__(self):
        if self.n_traj < 1:
            raise ValidationError("n_traj must be >= 1")
        if not self.dt > 0:
            raise ValidationError("dt must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be an unsigned 64-bit integer")


@dataclass
class EnsembleEstimate:
    times: np.ndarray
    mean_overlap: np.ndarray
    std_err: np.ndarray
    n_traj: int


def _block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = a.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = a
    out[d:, d:] = b
    return out


def build_augmented(pair: HypothesisPair) -> AugmentedModel:
    """Ancilla-controlled Hamiltonian and jump operators for a hypothesis pair."""
    pair = validate_pair(pair)
    d = pair.dim
    h0, h1 = pair.hyp0.hamiltonian, pair.hyp1.hamiltonian
    channels = tuple(_block_diag(c0, c1) for c0, c1 in zip(pair.hyp0.channels, pair.hyp1.channels))
    sigma_plus = np.kron(np.array([[0, 0], [1, 0]], dtype=complex), np.eye(d))
    psi0 = np.kron(np.array([1, 1], dtype=complex) / np.sqrt(2), pair.initial_state)
    return AugmentedModel(
        2 * d,
        lambda t: _block_diag(h0(t), h1(t)),
        channels,
        sigma_plus,
        psi0,
        pair.is_time_independent,
    )


def _uniform_grid_steps(t_grid: np.ndarray, dt: float) -> tuple[np.ndarray, int]:
    if t_grid.ndim != 1 or t_grid.size < 1 or t_grid[0] != 0.0:
        raise ValidationError("t_grid must be a 1-D grid starting at 0")
    if t_grid.size == 1:
        return np.array([0]), 0
    spacing = np.diff(t_grid)
    if np.max(np.abs(spacing - spacing[0])) > 1e-9 * spacing[0]:
        raise ValidationError("t_grid must be uniform")
    ratio = spacing[0] / dt
    per = int(round(ratio))
    if per < 1 or abs(ratio - per) > 1e-6 * ratio:
        raise ValidationError(f"grid spacing {spacing[0]:g} is not a multiple of dt={dt:g}")
    marks = np.arange(t_grid.size) * per
    return marks, int(marks[-1])


def _run_batch(model: AugmentedModel, uniforms: np.ndarray, marks: np.ndarray, dt: float) -> np.ndarray:
    """Propagate one batch; returns ``2<sigma_A^+>`` with shape (batch, n_marks)."""
    n_batch, n_steps = uniforms.shape
    d2 = model.dim
    cs = np.array(model.channels) if model.channels else np.zeros((0, d2, d2), complex)
    jump_sum = sum((c.conj().T @ c for c in cs), np.zeros((d2, d2), complex))

    def no_jump_propagator(t):
        return expm(-1j * (model.hamiltonian_at(t) - 0.5j * jump_sum) * dt)

    u_static = no_jump_propagator(0.0) if model.time_independent else None

    psi = np.tile(model.initial_state, (n_batch, 1))
    out = np.empty((n_batch, len(marks)), dtype=complex)
    sp = model.sigma_plus

    def record(j):
        norm2 = np.einsum("bi,bi->b", psi.conj(), psi).real
        out[:, j] = 2 * np.einsum("bi,ij,bj->b", psi.conj(), sp, psi) / norm2

    record(0)
    j = 1
    for step in range(n_steps):
        if len(cs):
            # jump probabilities per channel from the state at the start of the step
            cpsi = np.einsum("mij,bj->mbi", cs, psi)
            p = dt * np.einsum("mbi,mbi->bm", cpsi.conj(), cpsi).real
            cum = np.cumsum(p, axis=1)
            u = uniforms[:, step]
            jumped = u < cum[:, -1]
        else:
            jumped = np.zeros(n_batch, dtype=bool)

        u_nh = u_static if u_static is not None else no_jump_propagator((step + 0.5) * dt)
        new = psi @ u_nh.T
        if jumped.any():
            idx = np.nonzero(jumped)[0]
            chan = np.argmax(u[idx, None] < cum[idx], axis=1)
            new[idx] = cpsi[chan, idx]
        psi = new / np.linalg.norm(new, axis=1)[:, None]

        while j < len(marks) and marks[j] == step + 1:
            record(j)
            j += 1
    return out


def run_ensemble(
    model: AugmentedModel,
    t_grid: Sequence[float],
    cfg: EnsembleConfig,
) -> EnsembleEstimate:
    """Average ``2<sigma_A^+>`` over ``cfg.n_traj`` quantum-jump trajectories.

    ``t_grid`` must be uniform, start at 0, and have a spacing that is a
    multiple of ``cfg.dt``. The step must satisfy ``dt * max_rate < 0.05``.
    """
    t = np.asarray(t_grid, dtype=float)
    stiffness = cfg.dt * model.max_jump_rate
    if stiffness >= STABILITY_LIMIT:
        raise ValidationError(
            f"dt={cfg.dt:g} too large: dt * max jump rate = {stiffness:.3g} >= {STABILITY_LIMIT}"
        )
    marks, n_steps = _uniform_grid_steps(t, cfg.dt)

    def batch(start):
        stop = min(start + BATCH_SIZE, cfg.n_traj)
        uniforms = np.empty((stop - start, n_steps))
        for row, i in enumerate(range(start, stop)):
            seq = np.random.SeedSequence(cfg.seed, spawn_key=(i,))
            uniforms[row] = np.random.Generator(np.random.Philox(seq)).random(n_steps)
        return _run_batch(model, uniforms, marks, cfg.dt)

    samples = np.concatenate(ordered_map(batch, range(0, cfg.n_traj, BATCH_SIZE)), axis=0)
    mean = samples.mean(axis=0)
    if cfg.n_traj > 1:
        var = samples.real.var(axis=0, ddof=1) + samples.imag.var(axis=0, ddof=1)
        std_err = np.sqrt(var / cfg.n_traj)
    else:
        std_err = np.zeros(len(t))
    return EnsembleEstimate(t, mean, std_err, cfg.n_traj)
