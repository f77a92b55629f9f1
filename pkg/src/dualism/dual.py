"""Rewriting an EPR-form two-particle state in either of its two labeled forms.

Labeling by the A variable gives ``c1 |B1>_{A1}|B2>_{A2} + c2 |B2>_{A1}|B1>_{A2}``
(entangled in B). Labeling by B gives ``c1 |A1>_{B1}|A2>_{B2} + c2 |A2>_{B1}|A1>_{B2}``
(entangled in A), where putting the B1-labeled operator first costs the
exchange sign on the second term.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping

import numpy as np

from .errors import InvalidState, NotEprForm, SpeciesSuperpositionForbidden, ZeroState
from .fock import (
    ATOL,
    EPR_TERM_1,
    EPR_TERM_2,
    MODE_INDEX,
    MODES,
    Mode,
    Statistics,
    TwoParticleState,
    VariableSpec,
    apply_pair_normal_ordered,
)

Variable = Literal["A", "B"]


@dataclass(frozen=True)
class LabeledBipartiteState:
    """Two-term bipartite state: one variable labels the slots, the other is entangled.

    Term 1 puts entangled value 1 in slot 1 and value 2 in slot 2; term 2
    swaps them. ``slot_tags`` optionally names what occupies each slot
    (receiving parties after routing, or particle species).
    """

    label_variable: Variable
    entangled_variable: Variable
    c1: complex
    c2: complex
    statistics: Statistics | None = None
    spec: VariableSpec = field(default_factory=VariableSpec)
    slot_tags: tuple[str, str] | None = None

    def __post_init__(self):
        if self.label_variable not in ("A", "B") or self.entangled_variable not in ("A", "B"):
            raise InvalidState("variables must be 'A' or 'B'")
        if self.label_variable == self.entangled_variable:
            raise InvalidState("label and entangled variable must differ")
        c1, c2 = complex(self.c1), complex(self.c2)
        norm = np.hypot(abs(c1), abs(c2))
        if norm == 0:
            raise ZeroState("both terms vanish")
        object.__setattr__(self, "c1", c1 / norm)
        object.__setattr__(self, "c2", c2 / norm)
        if self.statistics is not None:
            object.__setattr__(self, "statistics", Statistics.parse(self.statistics))
        if self.slot_tags is not None:
            object.__setattr__(self, "slot_tags", tuple(self.slot_tags))

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([self.c1, self.c2], dtype=np.complex128)

    def to_vector(self) -> np.ndarray:
        """Two-qubit vector: term 1 -> |01>, term 2 -> |10>.

        Qubit k is slot k; qubit value 0/1 is entangled-variable value 1/2.
        """
        psi = np.zeros(4, dtype=np.complex128)
        psi[1] = self.c1
        psi[2] = self.c2
        return psi

    def concurrence(self) -> float:
        return 2.0 * abs(self.c1 * self.c2)

    def term_labels(self) -> tuple[str, str]:
        spec = self.spec
        if self.label_variable == "A":
            lab, ent = spec.eigenlabels_A, spec.eigenlabels_B
        else:
            lab, ent = spec.eigenlabels_B, spec.eigenlabels_A
        t1 = f"|{ent[0]}>_{lab[0]}|{ent[1]}>_{lab[1]}"
        t2 = f"|{ent[1]}>_{lab[0]}|{ent[0]}>_{lab[1]}"
        return t1, t2

    def to_dict(self) -> dict:
        out = {
            "label_variable": self.label_variable,
            "entangled_variable": self.entangled_variable,
            "c1": {"re": self.c1.real, "im": self.c1.imag},
            "c2": {"re": self.c2.real, "im": self.c2.imag},
        }
        if self.statistics is not None:
            out["statistics"] = self.statistics.value
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "LabeledBipartiteState":
        return cls(
            d["label_variable"],
            d["entangled_variable"],
            complex(d["c1"]["re"], d["c1"]["im"]),
            complex(d["c2"]["re"], d["c2"]["im"]),
            d.get("statistics"),
        )


def _epr_coefficients(s: TwoParticleState) -> tuple[complex, complex]:
    stray = [c for c in s.support() if c not in (EPR_TERM_1, EPR_TERM_2)]
    if stray:
        raise NotEprForm(
            "state has support outside the two EPR configurations",
            configurations=[[m.as_list() for m in c] for c in stray],
        )
    return s.amplitude(*EPR_TERM_1), s.amplitude(*EPR_TERM_2)


def relabel_by_A(s: TwoParticleState) -> LabeledBipartiteState:
    """A-labeled form, entangled in B. Operators are already A-ordered: no sign."""
    alpha, beta = _epr_coefficients(s)
    return LabeledBipartiteState("A", "B", alpha, beta, s.statistics, s.spec)


def _b_ordered_sign(m1: Mode, m2: Mode, stats: Statistics) -> int:
    # Order by (b_index, a_index) by sorting the transposed modes.
    _, sign = apply_pair_normal_ordered(m1.transposed(), m2.transposed(), stats)
    return sign


def relabel_by_B(s: TwoParticleState) -> LabeledBipartiteState:
    """B-labeled form, entangled in A; the second term carries the exchange sign."""
    alpha, beta = _epr_coefficients(s)
    # EPR terms as written are A-ordered; the sign is the cost of B-ordering them.
    c1 = _b_ordered_sign(*EPR_TERM_1, s.statistics) * alpha
    c2 = _b_ordered_sign(*EPR_TERM_2, s.statistics) * beta
    return LabeledBipartiteState("B", "A", c1, c2, s.statistics, s.spec)


def to_second_quantized(lb: LabeledBipartiteState) -> TwoParticleState:
    """Inverse of the relabelings: rebuild the Fock-space state."""
    if lb.statistics is None:
        raise InvalidState("reconstruction needs the particle statistics")
    stats = lb.statistics
    if lb.label_variable == "A":
        return TwoParticleState.from_creation_terms(
            stats, [(lb.c1, *EPR_TERM_1), (lb.c2, *EPR_TERM_2)], lb.spec
        )
    # B-labeled terms written with the B1-labeled operator first.
    # term 1: c†_{A1,B1} c†_{A2,B2}; term 2: c†_{A2,B1} c†_{A1,B2}
    return TwoParticleState.from_creation_terms(
        stats,
        [(lb.c1, Mode(1, 1), Mode(2, 2)), (lb.c2, Mode(2, 1), Mode(1, 2))],
        lb.spec,
    )


def round_trip(s: TwoParticleState, via: Variable) -> TwoParticleState:
    if via == "A":
        return to_second_quantized(relabel_by_A(s))
    if via == "B":
        return to_second_quantized(relabel_by_B(s))
    raise InvalidState(f"via must be 'A' or 'B', got {via!r}")


# --- non-identical particles --------------------------------------------------


@dataclass(frozen=True, eq=False)
class TwoSpeciesState:
    """Amplitudes ``amplitudes[i, j]`` on c-species in MODES[i], d-species in MODES[j]."""

    amplitudes: np.ndarray
    spec: VariableSpec = field(default_factory=VariableSpec)
    species: tuple[str, str] = ("C", "D")

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (4, 4):
            raise InvalidState("two-species amplitudes must be 4x4")
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ZeroState("all amplitudes are zero")
        amps = amps / norm
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def support(self, tol: float = ATOL) -> list[tuple[Mode, Mode, complex]]:
        out = []
        for i, j in zip(*np.nonzero(np.abs(self.amplitudes) > tol)):
            out.append((MODES[i], MODES[j], complex(self.amplitudes[i, j])))
        return out


def nip_epr_state(alpha: complex, beta: complex, spec: VariableSpec | None = None) -> TwoSpeciesState:
    """(alpha c†_{A1,B1} d†_{A2,B2} + beta c†_{A1,B2} d†_{A2,B1})|0>."""
    amps = np.zeros((4, 4), dtype=np.complex128)
    amps[MODE_INDEX[Mode(1, 1)], MODE_INDEX[Mode(2, 2)]] = alpha
    amps[MODE_INDEX[Mode(1, 2)], MODE_INDEX[Mode(2, 1)]] = beta
    return TwoSpeciesState(amps, spec or VariableSpec())


def _relabel_nip(s: TwoSpeciesState, by: Variable) -> LabeledBipartiteState:
    entangled: Variable = "B" if by == "A" else "A"
    key = (lambda m: m.a_index) if by == "A" else (lambda m: m.b_index)
    value = (lambda m: m.b_index) if by == "A" else (lambda m: m.a_index)
    c_tag, d_tag = s.species

    slot_species: list[set[str]] = [set(), set()]
    coeffs = [0j, 0j]
    for mc, md, amp in s.support():
        if key(mc) == key(md):
            raise NotEprForm(f"both particles share {by}-value {key(mc)}")
        by_slot = {key(mc): (c_tag, mc), key(md): (d_tag, md)}
        slot_species[0].add(by_slot[1][0])
        slot_species[1].add(by_slot[2][0])
        ent = (value(by_slot[1][1]), value(by_slot[2][1]))
        if ent == (1, 2):
            coeffs[0] += amp
        elif ent == (2, 1):
            coeffs[1] += amp
        else:
            raise NotEprForm(f"both particles share {entangled}-value {ent[0]}")

    for k, tags in enumerate(slot_species):
        if len(tags) > 1:
            label = (s.spec.eigenlabels_A if by == "A" else s.spec.eigenlabels_B)[k]
            raise SpeciesSuperpositionForbidden(
                f"slot {label} would hold a superposition of species {sorted(tags)}",
                slot=label,
                species=sorted(tags),
                reason="distinct species attributes cannot be superposed in one tensor slot",
            )
    tags = (next(iter(slot_species[0])), next(iter(slot_species[1])))
    return LabeledBipartiteState(by, entangled, coeffs[0], coeffs[1], None, s.spec, tags)


def relabel_nip_by_A(s: TwoSpeciesState) -> LabeledBipartiteState:
    """A-labeled form of a two-species state; always possible for EPR-form input."""
    return _relabel_nip(s, "A")


def attempt_relabel_by_B_nip(s: TwoSpeciesState) -> LabeledBipartiteState:
    """B-labeled form of a two-species state.

    Raises SpeciesSuperpositionForbidden whenever both EPR terms are present,
    because the B1 slot is then occupied by different species in the two terms.
    Only the product edge cases succeed.
    """
    return _relabel_nip(s, "B")
