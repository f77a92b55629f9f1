"""Pseudo-spin observables, CHSH correlators and the optimal CHSH value.

Each party's dichotomic variable is a qubit with |0> = value 1 and
|1> = value 2 of the entangled variable. For momentum (value 1 = -k,
value 2 = k) the operators below are exactly

    sigma_x = |-k><k| + |k><-k|
    sigma_y = i(|-k><k| - |k><-k|)
    sigma_z = |k><k| - |-k><-k|

CHSH convention: S = E(a,b) + E(a,b') + E(a',b) - E(a',b'), never folded
through an absolute value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .dual import LabeledBipartiteState, relabel_by_A, relabel_by_B
from .errors import OracleDisagreement, SettingsNotInPlane
from .fock import TwoParticleState

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[-1, 0], [0, 1]], dtype=np.complex128)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

TSIRELSON = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class PseudoSpinSetting:
    """Measurement direction n = (sin t cos p, sin t sin p, cos t) for n . sigma."""

    theta: float
    phi: float = 0.0

    @classmethod
    def from_degrees(cls, theta: float, phi: float = 0.0) -> "PseudoSpinSetting":
        return cls(math.radians(theta), math.radians(phi))

    @classmethod
    def from_vector(cls, n: Sequence[float]) -> "PseudoSpinSetting":
        x, y, z = np.asarray(n, dtype=float) / np.linalg.norm(n)
        return cls(math.acos(max(-1.0, min(1.0, z))), math.atan2(y, x))

    @property
    def direction(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def operator(self) -> np.ndarray:
        nx, ny, nz = self.direction
        return nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z

    def projector(self, outcome: int) -> np.ndarray:
        """Projector onto the +1 or -1 eigenspace of n . sigma."""
        return (np.eye(2) + outcome * self.operator()) / 2

    def in_plane(self, atol: float = 1e-12) -> bool:
        return abs(self.theta - math.pi / 2) <= atol

    def rotated(self, dphi: float) -> "PseudoSpinSetting":
        return PseudoSpinSetting(self.theta, self.phi + dphi)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "phi": self.phi,
            "theta_deg": math.degrees(self.theta),
            "phi_deg": math.degrees(self.phi),
        }


PAIR_NAMES = ("ab", "ab'", "a'b", "a'b'")
CHSH_SIGNS = (1, 1, 1, -1)


@dataclass(frozen=True)
class BellSettings:
    a: PseudoSpinSetting
    a_prime: PseudoSpinSetting
    b: PseudoSpinSetting
    b_prime: PseudoSpinSetting

    @classmethod
    def canonical(cls) -> "BellSettings":
        """All in the x-y plane: phi_a = 0, phi_a' = pi/2, phi_b = pi/4, phi_b' = -pi/4."""
        h = math.pi / 2
        return cls(
            PseudoSpinSetting(h, 0.0),
            PseudoSpinSetting(h, math.pi / 2),
            PseudoSpinSetting(h, math.pi / 4),
            PseudoSpinSetting(h, -math.pi / 4),
        )

    @classmethod
    def from_degrees(cls, angles: Sequence[float]) -> "BellSettings":
        """Eight angles in degrees: theta, phi for a, a', b, b' in turn."""
        if len(angles) != 8:
            raise ValueError("need 8 angles (theta, phi) x (a, a', b, b')")
        it = iter(angles)
        return cls(*(PseudoSpinSetting.from_degrees(t, p) for t, p in zip(it, it)))

    def pairs(self) -> tuple[tuple[PseudoSpinSetting, PseudoSpinSetting], ...]:
        return (
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        )

    def all_in_plane(self) -> bool:
        return all(s.in_plane() for s in (self.a, self.a_prime, self.b, self.b_prime))

    def rotated(self, dphi_alice: float, dphi_bob: float) -> "BellSettings":
        return BellSettings(
            self.a.rotated(dphi_alice),
            self.a_prime.rotated(dphi_alice),
            self.b.rotated(dphi_bob),
            self.b_prime.rotated(dphi_bob),
        )

    def to_dict(self) -> dict:
        return {
            "a": self.a.to_dict(),
            "a_prime": self.a_prime.to_dict(),
            "b": self.b.to_dict(),
            "b_prime": self.b_prime.to_dict(),
        }


@dataclass(frozen=True)
class ChshResult:
    correlators: tuple[float, float, float, float]
    bell_expectation: float
    settings: BellSettings

    def to_dict(self) -> dict:
        return {
            "correlators": dict(zip(PAIR_NAMES, self.correlators)),
            "S": self.bell_expectation,
            "settings": self.settings.to_dict(),
        }


def chsh_combination(correlators: Sequence[float]) -> float:
    return float(sum(s * e for s, e in zip(CHSH_SIGNS, correlators)))


def _as_vector(state: LabeledBipartiteState | np.ndarray) -> np.ndarray:
    if isinstance(state, LabeledBipartiteState):
        return state.to_vector()
    return np.asarray(state, dtype=np.complex128)


def correlator(
    state: LabeledBipartiteState | np.ndarray, sa: PseudoSpinSetting, sb: PseudoSpinSetting
) -> float:
    """<(n_a . sigma) x (n_b . sigma)> on the two-qubit form of ``state``."""
    psi = _as_vector(state)
    op = np.kron(sa.operator(), sb.operator())
    return float(np.real(np.vdot(psi, op @ psi)))


def bell_expectation(state: LabeledBipartiteState | np.ndarray, settings: BellSettings) -> ChshResult:
    corr = tuple(correlator(state, sa, sb) for sa, sb in settings.pairs())
    return ChshResult(corr, chsh_combination(corr), settings)


def correlation_matrix(state: LabeledBipartiteState | np.ndarray) -> np.ndarray:
    """T[i, j] = <sigma_i x sigma_j>."""
    psi = _as_vector(state)
    return np.array(
        [[np.real(np.vdot(psi, np.kron(si, sj) @ psi)) for sj in PAULIS] for si in PAULIS]
    )


# --- optimal CHSH -------------------------------------------------------------


def max_chsh_from_correlations(T: np.ndarray) -> float:
    """2 sqrt(s1^2 + s2^2) for the two largest singular values of T."""
    s = np.linalg.svd(np.asarray(T, dtype=float), compute_uv=False)
    return 2.0 * math.sqrt(s[0] ** 2 + s[1] ** 2)


def _frame(theta, phi, psi):
    """Unit u(theta, phi) and a unit w orthogonal to it at angle psi."""
    st, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    u = np.stack([st * cp, st * sp, ct], axis=-1)
    e1 = np.stack([ct * cp, ct * sp, -st], axis=-1)
    e2 = np.stack([-sp, cp, np.zeros_like(phi)], axis=-1)
    w = np.cos(psi)[..., None] * e1 + np.sin(psi)[..., None] * e2
    return u, w


def _alice_objective(G: np.ndarray, theta, phi, psi):
    # Bob's two settings and Alice's opening angle are maximized in closed form
    # (Cauchy-Schwarz), leaving S^2 / 4 = |T^t u|^2 + |T^t w|^2 over frames (u, w).
    u, w = _frame(theta, phi, psi)
    return np.einsum("...i,ij,...j->...", u, G, u) + np.einsum("...i,ij,...j->...", w, G, w)


def _settings_from_frame(T: np.ndarray, theta: float, phi: float, psi: float) -> BellSettings:
    u, w = _frame(np.asarray(theta), np.asarray(phi), np.asarray(psi))
    tu, tw = np.linalg.norm(T.T @ u), np.linalg.norm(T.T @ w)
    half = math.atan2(tw, tu) if tu + tw > 0 else 0.0
    a = math.cos(half) * u + math.sin(half) * w
    a_prime = math.cos(half) * u - math.sin(half) * w

    def unit_or(v, fallback):
        n = np.linalg.norm(v)
        return v / n if n > 1e-15 else fallback

    b = unit_or(T.T @ (a + a_prime), u)
    b_prime = unit_or(T.T @ (a - a_prime), w)
    return BellSettings(*(PseudoSpinSetting.from_vector(v) for v in (a, a_prime, b, b_prime)))


def grid_search_chsh(T: np.ndarray, step_deg: float = 1.0, refine: bool = True) -> tuple[float, BellSettings]:
    """Maximize S over all settings by a direct search; independent of the SVD route.

    Alice's frame is scanned on a ``step_deg`` grid (u over a hemisphere, w
    over a half turn), the best cell is polished with Nelder-Mead, and the
    explicit settings are rebuilt from the optimal frame. Ties resolve to the
    first grid cell in (theta, phi, psi) order.
    """
    T = np.asarray(T, dtype=float)
    G = T @ T.T
    step = math.radians(step_deg)
    thetas = np.arange(0.0, math.pi / 2 + step / 2, step)
    phis = np.arange(0.0, 2 * math.pi - step / 2, step)
    psis = np.arange(0.0, math.pi - step / 2, step)
    TH, PH = np.meshgrid(thetas, phis, indexing="ij")
    u, e1 = _frame(TH, PH, np.zeros_like(TH))
    _, e2 = _frame(TH, PH, np.full_like(TH, math.pi / 2))

    def quad(x, y):
        return np.einsum("...i,ij,...j->...", x, G, y)

    # |T^t w|^2 for w = cos(psi) e1 + sin(psi) e2, written in double angles
    g11, g22, g12 = quad(e1, e1), quad(e2, e2), quad(e1, e2)
    base = quad(u, u) + (g11 + g22) / 2
    vals = ((g11 - g22) / 2)[..., None] * np.cos(2 * psis)
    vals += g12[..., None] * np.sin(2 * psis)
    vals += base[..., None]
    i, j, k = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best = (float(vals[i, j, k]), float(thetas[i]), float(phis[j]), float(psis[k]))

    f, th, ph, ps = best
    if refine:
        res = minimize(
            lambda x: -_alice_objective(G, x[0], x[1], x[2]),
            x0=np.array([th, ph, ps]),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 20000},
        )
        if -res.fun >= f:
            f = float(-res.fun)
            th, ph, ps = (float(v) for v in res.x)
    settings = _settings_from_frame(T, th, ph, ps)
    return 2.0 * math.sqrt(max(f, 0.0)), settings


@dataclass(frozen=True)
class ChshOptimum:
    """max |S| from the singular-value criterion and from the grid search."""

    value: float
    grid_value: float
    settings: BellSettings

    def __iter__(self):
        # unpacks as (max |S|, settings)
        return iter((self.value, self.settings))

    def to_dict(self) -> dict:
        return {
            "max_abs_S": self.value,
            "grid_search_S": self.grid_value,
            "settings": self.settings.to_dict(),
        }


def optimize_from_correlations(T: np.ndarray, evaluate, tol: float = 1e-6) -> ChshOptimum:
    """Shared driver: ``evaluate(settings)`` returns S computed on the actual state."""
    analytic = max_chsh_from_correlations(T)
    _, settings = grid_search_chsh(T)
    grid_value = abs(evaluate(settings))
    if abs(grid_value - analytic) > tol:
        raise OracleDisagreement(
            f"singular-value criterion {analytic!r} vs grid search {grid_value!r}",
            analytic=analytic,
            grid=grid_value,
        )
    return ChshOptimum(analytic, grid_value, settings)


def chsh_optimal(state: LabeledBipartiteState | np.ndarray) -> ChshOptimum:
    return optimize_from_correlations(
        correlation_matrix(state), lambda st: bell_expectation(state, st).bell_expectation
    )


@dataclass(frozen=True)
class SignDifferenceReport:
    s_a: float
    s_b: float
    ratio_sign: int
    a_form: ChshResult
    b_form: ChshResult

    def __iter__(self):
        return iter((self.s_a, self.s_b, self.ratio_sign))

    def to_dict(self) -> dict:
        return {
            "S_A": self.s_a,
            "S_B": self.s_b,
            "ratio_sign": self.ratio_sign,
            "a_form": self.a_form.to_dict(),
            "b_form": self.b_form.to_dict(),
        }


def sign_difference_report(s: TwoParticleState, settings: BellSettings | None = None) -> SignDifferenceReport:
    """Bell operator on both labeled forms with the same settings.

    In the x-y plane every correlator only sees the term coherence c1 c2*, so
    the fermionic sign on c2 negates each correlator of the B-form. Out of the
    plane that relation fails, hence the guard.
    """
    settings = settings or BellSettings.canonical()
    if not settings.all_in_plane():
        raise SettingsNotInPlane("all four settings must have theta = pi/2")
    ra = bell_expectation(relabel_by_A(s), settings)
    rb = bell_expectation(relabel_by_B(s), settings)
    prod = ra.bell_expectation * rb.bell_expectation
    ratio = 0 if abs(prod) < 1e-24 else int(math.copysign(1, prod))
    return SignDifferenceReport(ra.bell_expectation, rb.bell_expectation, ratio, ra, rb)
