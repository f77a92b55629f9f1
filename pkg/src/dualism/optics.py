"""The two-photon dual-entanglement protocol.

A polarization-entangled pair flies along -k/+k. Polarizing beam splitters
send V one way along y and H the other, so the receiving parties end up
holding the momentum-entangled B-labeled form of the same state. Each
party measures its momentum pseudo-spin with a tunable beam splitter and two
detectors; coincidences are sampled from the Born rule with a seeded
generator.

Random streams: ``numpy.random.SeedSequence(seed).spawn(4)`` gives one
child per settings pair in the order (a,b), (a,b'), (a',b), (a',b'); each
child seeds a PCG64 generator. Per pair, ``shots`` uniforms decide the joint
outcome, then (only when efficiency < 1) a ``(shots, 2)`` block of uniforms
decides which detectors fired.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .bell import (
    CHSH_SIGNS,
    PAIR_NAMES,
    BellSettings,
    PseudoSpinSetting,
    chsh_combination,
)
from .dual import LabeledBipartiteState, relabel_by_B
from .errors import InsufficientShots, InvalidState, NotEprForm
from .fock import ATOL, TwoParticleState

OUTCOMES = ("++", "+-", "-+", "--")
_OUTCOME_SIGNS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class RoutingConvention:
    """Where the PBS sends V photons; Charlie sits at +y, Diana at -y."""

    v_direction: Literal["+y", "-y"] = "+y"

    def __post_init__(self):
        if self.v_direction not in ("+y", "-y"):
            raise InvalidState(f"v_direction must be '+y' or '-y', got {self.v_direction!r}")

    @property
    def h_direction(self) -> str:
        return "-y" if self.v_direction == "+y" else "+y"

    @property
    def charlie_receives(self) -> str:
        return "V" if self.v_direction == "+y" else "H"

    @classmethod
    def caption(cls) -> "RoutingConvention":
        """V deflected to +y, towards Charlie; the default."""
        return cls("+y")

    @classmethod
    def main_text(cls) -> "RoutingConvention":
        """H reaches Charlie, V reaches Diana."""
        return cls("-y")

    @classmethod
    def parse(cls, name: str) -> "RoutingConvention":
        if name == "caption":
            return cls.caption()
        if name in ("main-text", "main_text"):
            return cls.main_text()
        raise InvalidState(f"unknown routing convention {name!r}")


def same_party_probability(s: TwoParticleState) -> float:
    """Probability that both particles share a polarization, i.e. reach one party."""
    return float(
        sum(abs(a) ** 2 for (m1, m2), a in zip(s.basis, s.amplitudes) if m1.b_index == m2.b_index)
    )


def route_through_pbs(
    s: TwoParticleState, conv: RoutingConvention | None = None
) -> LabeledBipartiteState:
    """Polarization-labeled form with slots tagged by the receiving party."""
    conv = conv or RoutingConvention.caption()
    pol = s.spec.eigenlabels_B
    if set(pol) != {"H", "V"}:
        raise InvalidState(f"B variable must be polarization {{H, V}}, got {pol!r}")
    lb = relabel_by_B(s)
    if same_party_probability(s) > ATOL:
        raise NotEprForm("both photons could reach the same party")
    party = {conv.charlie_receives: "Charlie"}
    party[next(p for p in pol if p != conv.charlie_receives)] = "Diana"
    return LabeledBipartiteState(
        lb.label_variable,
        lb.entangled_variable,
        lb.c1,
        lb.c2,
        lb.statistics,
        lb.spec,
        (party[pol[0]], party[pol[1]]),
    )


@dataclass(frozen=True)
class BeamSplitterElement:
    reflectivity: float
    phase: float
    # exact half-angle when built from a setting; sqrt(1 - R) loses digits near R = 1
    mixing_angle: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not 0.0 <= self.reflectivity <= 1.0:
            raise InvalidState(f"reflectivity {self.reflectivity} outside [0, 1]")
        if self.mixing_angle is None:
            angle = math.atan2(math.sqrt(1.0 - self.reflectivity), math.sqrt(self.reflectivity))
            object.__setattr__(self, "mixing_angle", angle)

    def matrix(self) -> np.ndarray:
        """Transfer matrix U with U^dag sigma_z U = n . sigma."""
        r, t = math.cos(self.mixing_angle), math.sin(self.mixing_angle)
        e = np.exp(1j * self.phase)
        return np.array([[r, -t * e], [t * np.conj(e), r]], dtype=np.complex128)


def setting_to_beamsplitter(s: PseudoSpinSetting) -> BeamSplitterElement:
    """Reflectivity cos^2(theta/2) and phase phi, with theta folded into [0, pi]."""
    theta, phi = math.fmod(s.theta, 2 * math.pi), s.phi
    if theta < 0:
        theta += 2 * math.pi
    if theta > math.pi:
        theta, phi = 2 * math.pi - theta, phi + math.pi
    return BeamSplitterElement(math.cos(theta / 2) ** 2, phi, theta / 2)


def joint_probabilities(
    state: LabeledBipartiteState | np.ndarray, sa: PseudoSpinSetting, sb: PseudoSpinSetting
) -> np.ndarray:
    """p(++), p(+-), p(-+), p(--) via the two beam splitters and detector readout.

    Detector "+" is the output port with sigma_z = +1 (qubit index 1).
    """
    psi = state.to_vector() if isinstance(state, LabeledBipartiteState) else np.asarray(state)
    ua = setting_to_beamsplitter(sa).matrix()
    ub = setting_to_beamsplitter(sb).matrix()
    out = np.kron(ua, ub) @ psi
    p = np.abs(out) ** 2
    # qubit index 1 is "+", index 0 is "-": reorder |11>,|10>,|01>,|00>
    probs = np.array([p[3], p[2], p[1], p[0]])
    return np.clip(probs, 0.0, None)


def _draw(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cum = np.cumsum(probs)
    cum = cum / cum[-1]
    idx = np.searchsorted(cum, u, side="right")
    # u can land past a rounded-down final boundary; fold onto the last live cell
    last = int(np.flatnonzero(probs > 0)[-1])
    return np.minimum(idx, last)


@dataclass(frozen=True)
class PairCounts:
    name: str
    setting_a: PseudoSpinSetting
    setting_b: PseudoSpinSetting
    counts: tuple[int, int, int, int]
    no_click: int = 0

    @property
    def detected(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class CoincidenceRecord:
    pairs: tuple[PairCounts, ...]
    shots: int
    seed: int
    efficiency: float = 1.0

    def __post_init__(self):
        for pc in self.pairs:
            if pc.detected + pc.no_click != self.shots:
                raise InvalidState(f"counts for {pc.name} do not sum to shots")

    def counts(self, name: str) -> dict[str, int]:
        pc = next(p for p in self.pairs if p.name == name)
        return dict(zip(OUTCOMES, pc.counts))

    def to_rows(self) -> list[dict]:
        rows = []
        for pc in self.pairs:
            for outcome, n in zip(OUTCOMES, pc.counts):
                rows.append(
                    {"settings_pair": pc.name, "outcome": outcome, "count": n,
                     "shots": self.shots, "seed": self.seed}
                )
            if self.efficiency < 1.0:
                rows.append(
                    {"settings_pair": pc.name, "outcome": "none", "count": pc.no_click,
                     "shots": self.shots, "seed": self.seed}
                )
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(
            buf, fieldnames=["settings_pair", "outcome", "count", "shots", "seed"], lineterminator="\n"
        )
        w.writeheader()
        w.writerows(self.to_rows())
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "shots": self.shots,
            "seed": self.seed,
            "efficiency": self.efficiency,
            "pairs": [
                {
                    "settings_pair": pc.name,
                    "setting_a": pc.setting_a.to_dict(),
                    "setting_b": pc.setting_b.to_dict(),
                    "counts": dict(zip(OUTCOMES, pc.counts)),
                    "no_click": pc.no_click,
                }
                for pc in self.pairs
            ],
        }


def sample_coincidences(
    state: LabeledBipartiteState | np.ndarray,
    settings: BellSettings,
    shots: int,
    seed: int,
    efficiency: float = 1.0,
) -> CoincidenceRecord:
    if shots < 1:
        raise InsufficientShots("shots must be >= 1")
    if not 0.0 <= efficiency <= 1.0:
        raise InvalidState("efficiency must lie in [0, 1]")
    children = np.random.SeedSequence(seed).spawn(4)
    pairs = []
    for name, (sa, sb), child in zip(PAIR_NAMES, settings.pairs(), children):
        rng = np.random.Generator(np.random.PCG64(child))
        idx = _draw(joint_probabilities(state, sa, sb), rng.random(shots))
        no_click = 0
        if efficiency < 1.0:
            both = (rng.random((shots, 2)) < efficiency).all(axis=1)
            no_click = int(shots - both.sum())
            idx = idx[both]
        counts = tuple(int(c) for c in np.bincount(idx, minlength=4))
        pairs.append(PairCounts(name, sa, sb, counts, no_click))
    return CoincidenceRecord(tuple(pairs), shots, seed, efficiency)


def correlator_estimate(pc: PairCounts) -> tuple[float, float]:
    """(E_hat, standard error) from one settings pair's counts."""
    n = pc.detected
    if n < 2:
        raise InsufficientShots(f"{pc.name}: {n} detected coincidences, need >= 2")
    agree = sum(c * sa * sb for c, (sa, sb) in zip(pc.counts, _OUTCOME_SIGNS))
    e = agree / n
    return e, math.sqrt(max(1.0 - e * e, 0.0) / n)


def estimate_chsh(rec: CoincidenceRecord) -> tuple[float, float]:
    """S_hat and its standard error from propagated per-correlator variances."""
    names = [pc.name for pc in rec.pairs]
    if sorted(names) != sorted(PAIR_NAMES):
        raise InsufficientShots(f"need all four settings pairs, got {names}")
    by_name = {pc.name: pc for pc in rec.pairs}
    est = [correlator_estimate(by_name[n]) for n in PAIR_NAMES]
    s_hat = chsh_combination([e for e, _ in est])
    stderr = math.sqrt(sum((sign * se) ** 2 for sign, (_, se) in zip(CHSH_SIGNS, est)))
    return s_hat, stderr
