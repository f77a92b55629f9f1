"""Per-trap environments and the quantum-to-classical transition of the dual form.

Each trap (A value) drags along an environment state; trap 1 ends in chi1,
trap 2 in chi2. Only the overlap <chi1|chi2> = gamma e^{i phi_env} matters,
but the reduction is done as an explicit partial trace over a
two-dimensional environment per particle so the factor is computed, not
assumed.

In the A-labeled (spin) form every term has trap 1 in slot 1 and trap 2 in
slot 2, so the environment factors out. In the B-labeled (momentum) form
the two terms carry |chi1 chi2> and |chi2 chi1>, whose overlap is
|<chi1|chi2>|^2: the term coherence shrinks by gamma^2 and the phase of the
overlap cancels.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .bell import (
    PAULIS,
    BellSettings,
    ChshOptimum,
    ChshResult,
    chsh_combination,
    optimize_from_correlations,
)
from .dual import LabeledBipartiteState, relabel_by_A, relabel_by_B
from .errors import InvalidState
from .fock import TwoParticleState

Dual = Literal["A", "B"]


@dataclass(frozen=True)
class EnvironmentOverlap:
    gamma: float
    phi_env: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise InvalidState(f"gamma must lie in [0, 1], got {self.gamma}")

    @classmethod
    def from_time(cls, t: float, tau: float, phi_env: float = 0.0) -> "EnvironmentOverlap":
        """gamma(t) = exp(-t / tau)."""
        return cls(math.exp(-t / tau), phi_env)

    @property
    def overlap(self) -> complex:
        return self.gamma * complex(math.cos(self.phi_env), math.sin(self.phi_env))

    def environment_vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """chi1, chi2 in C^2 with <chi1|chi2> = overlap."""
        chi1 = np.array([1.0, 0.0], dtype=np.complex128)
        chi2 = np.array([self.overlap, math.sqrt(max(0.0, 1.0 - self.gamma**2))], dtype=np.complex128)
        return chi1, chi2


@dataclass(frozen=True, eq=False)
class ReducedDensityMatrix:
    """4x4 state of the two labeled slots, same basis as LabeledBipartiteState.to_vector."""

    matrix: np.ndarray
    label_variable: str
    entangled_variable: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (4, 4):
            raise InvalidState("density matrix must be 4x4")
        if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
            raise InvalidState("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > 1e-12:
            raise InvalidState(f"trace {np.trace(m)} != 1")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise InvalidState("density matrix is not positive semidefinite")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def coherence(self) -> complex:
        """<term 1| rho |term 2>."""
        return complex(self.matrix[1, 2])

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    @classmethod
    def pure(cls, lb: LabeledBipartiteState) -> "ReducedDensityMatrix":
        psi = lb.to_vector()
        return cls(np.outer(psi, psi.conj()), lb.label_variable, lb.entangled_variable)


def _trap_per_slot(lb: LabeledBipartiteState) -> tuple[tuple[int, int], tuple[int, int]]:
    """Trap (A value) occupied by slot 1 and slot 2, for term 1 and term 2."""
    if lb.label_variable == "A":
        return (1, 2), (1, 2)
    return (1, 2), (2, 1)


def attach_environment(lb: LabeledBipartiteState, env: EnvironmentOverlap) -> np.ndarray:
    """Joint system-environment vector, shape (4, 4): system index x env(slot1, slot2)."""
    chi = dict(zip((1, 2), env.environment_vectors()))
    joint = np.zeros((4, 4), dtype=np.complex128)
    for sys_index, coef, (t1, t2) in zip((1, 2), lb.coefficients, _trap_per_slot(lb)):
        joint[sys_index] += coef * np.kron(chi[t1], chi[t2])
    return joint


def dephase_dual_form(s: TwoParticleState, env: EnvironmentOverlap, dual: Dual) -> ReducedDensityMatrix:
    if dual == "A":
        lb = relabel_by_A(s)
    elif dual == "B":
        lb = relabel_by_B(s)
    else:
        raise InvalidState(f"dual must be 'A' or 'B', got {dual!r}")
    joint = attach_environment(lb, env)
    rho = joint @ joint.conj().T  # trace over the environment index
    rho = (rho + rho.conj().T) / 2
    return ReducedDensityMatrix(rho, lb.label_variable, lb.entangled_variable)


def _dm_correlator(rho: np.ndarray, op_a: np.ndarray, op_b: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ np.kron(op_a, op_b))))


def chsh_from_dm(rho: ReducedDensityMatrix, settings: BellSettings) -> ChshResult:
    corr = tuple(
        _dm_correlator(rho.matrix, sa.operator(), sb.operator()) for sa, sb in settings.pairs()
    )
    return ChshResult(corr, chsh_combination(corr), settings)


def correlation_matrix_dm(rho: ReducedDensityMatrix) -> np.ndarray:
    return np.array([[_dm_correlator(rho.matrix, si, sj) for sj in PAULIS] for si in PAULIS])


def chsh_optimal_dm(rho: ReducedDensityMatrix) -> ChshOptimum:
    return optimize_from_correlations(
        correlation_matrix_dm(rho), lambda st: chsh_from_dm(rho, st).bell_expectation
    )


SettingsMode = Literal["fixed-canonical", "optimal"]


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    s_spin: float
    s_momentum: float
    settings_mode: str


def _s_value(rho: ReducedDensityMatrix, mode: SettingsMode) -> float:
    if mode == "optimal":
        return chsh_optimal_dm(rho).value
    return chsh_from_dm(rho, BellSettings.canonical()).bell_expectation


def sweep_transition(
    s: TwoParticleState,
    gammas: Iterable[float],
    settings_mode: SettingsMode = "optimal",
    phi_env: float = 0.0,
) -> list[SweepRow]:
    """Rows (gamma, S of the spin form, S of the momentum form).

    ``optimal`` reports max |S| over all settings; ``fixed-canonical`` reports
    the signed S at the canonical in-plane settings.
    """
    if settings_mode not in ("fixed-canonical", "optimal"):
        raise InvalidState(f"unknown settings mode {settings_mode!r}")
    rows = []
    for g in gammas:
        env = EnvironmentOverlap(float(g), phi_env)
        s_spin = _s_value(dephase_dual_form(s, env, "A"), settings_mode)
        s_mom = _s_value(dephase_dual_form(s, env, "B"), settings_mode)
        rows.append(SweepRow(float(g), s_spin, s_mom, settings_mode))
    return rows


SWEEP_FIELDS = ("gamma", "s_spin", "s_momentum", "settings_mode")


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_FIELDS)
    for r in rows:
        w.writerow([repr(r.gamma), repr(r.s_spin), repr(r.s_momentum), r.settings_mode])
    return buf.getvalue()


def sweep_to_json_obj(rows: Sequence[SweepRow]) -> list[dict]:
    return [{k: getattr(r, k) for k in SWEEP_FIELDS} for r in rows]
