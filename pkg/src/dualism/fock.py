"""Two-particle states of identical bosons or fermions over four modes.

A mode is a simultaneous eigenstate |A_i, B_j> of two commuting dichotomic
variables. States live only in the two-particle sector (the vacuum is
implicit) and are stored densely over a fixed canonical basis of unordered
mode pairs, ordered lexicographically by (a_index, b_index).
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ExclusionViolation, InvalidState, StatisticsMismatch, ZeroState

ATOL = 1e-12


class Statistics(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"

    @property
    def sign(self) -> int:
        """Exchange sign picked up when two creation operators are swapped."""
        return 1 if self is Statistics.BOSON else -1

    @classmethod
    def parse(cls, value: "Statistics | str") -> "Statistics":
        if isinstance(value, Statistics):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidState(f"unknown statistics {value!r}") from None


@dataclass(frozen=True)
class VariableSpec:
    """Names of the two commuting variables and their two eigenvalues each."""

    name_A: str = "A"
    name_B: str = "B"
    eigenlabels_A: tuple[str, str] = ("A1", "A2")
    eigenlabels_B: tuple[str, str] = ("B1", "B2")

    def __post_init__(self):
        object.__setattr__(self, "eigenlabels_A", tuple(self.eigenlabels_A))
        object.__setattr__(self, "eigenlabels_B", tuple(self.eigenlabels_B))
        if self.name_A == self.name_B:
            raise InvalidState("variable names must differ")
        for labels in (self.eigenlabels_A, self.eigenlabels_B):
            if len(labels) != 2 or labels[0] == labels[1]:
                raise InvalidState(f"need two distinct eigenlabels, got {labels!r}")

    def to_dict(self) -> dict:
        return {
            "name_A": self.name_A,
            "name_B": self.name_B,
            "eigenlabels_A": list(self.eigenlabels_A),
            "eigenlabels_B": list(self.eigenlabels_B),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "VariableSpec":
        return cls(
            d["name_A"], d["name_B"], tuple(d["eigenlabels_A"]), tuple(d["eigenlabels_B"])
        )


def photonic_spec() -> VariableSpec:
    """Momentum labels the photons, polarization is entangled."""
    return VariableSpec("momentum", "polarization", ("-k", "k"), ("H", "V"))


@dataclass(frozen=True, order=True)
class Mode:
    a_index: int
    b_index: int

    def __post_init__(self):
        if self.a_index not in (1, 2) or self.b_index not in (1, 2):
            raise InvalidState(f"mode indices must be 1 or 2, got {self}")

    def transposed(self) -> "Mode":
        return Mode(self.b_index, self.a_index)

    def as_list(self) -> list[int]:
        return [self.a_index, self.b_index]

    def __repr__(self):
        return f"Mode({self.a_index},{self.b_index})"


MODES: tuple[Mode, ...] = tuple(Mode(a, b) for a in (1, 2) for b in (1, 2))
MODE_INDEX = {m: i for i, m in enumerate(MODES)}

Configuration = tuple[Mode, Mode]


def canonical_basis(stats: Statistics) -> tuple[Configuration, ...]:
    """Nondecreasing mode pairs; repeated modes only for bosons."""
    if stats is Statistics.BOSON:
        pairs = itertools.combinations_with_replacement(MODES, 2)
    else:
        pairs = itertools.combinations(MODES, 2)
    return tuple(pairs)


_BASIS = {s: canonical_basis(s) for s in Statistics}
_BASIS_INDEX = {s: {c: i for i, c in enumerate(_BASIS[s])} for s in Statistics}

EPR_TERM_1: Configuration = (Mode(1, 1), Mode(2, 2))
EPR_TERM_2: Configuration = (Mode(1, 2), Mode(2, 1))


def apply_pair_normal_ordered(
    mode1: Mode, mode2: Mode, stats: Statistics
) -> tuple[Configuration, int]:
    """Bring ``c†_{mode1} c†_{mode2}`` into canonical order.

    Returns the ordered pair and the sign picked up by the reordering:
    -1 only when a fermionic pair had to be swapped.
    """
    stats = Statistics.parse(stats)
    if stats is Statistics.FERMION and mode1 == mode2:
        raise ExclusionViolation(f"two fermions in {mode1!r}", mode=mode1.as_list())
    if mode2 < mode1:
        return (mode2, mode1), stats.sign
    return (mode1, mode2), 1


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class TwoParticleState:
    """Normalized two-particle state over the canonical basis of ``statistics``.

    ``amplitudes[k]`` is the amplitude of the normalized occupation state
    ``canonical_basis(statistics)[k]``. For a doubly occupied bosonic mode this
    is |2_m>, not the unnormalized ``c†_m c†_m |0>``.
    """

    statistics: Statistics
    amplitudes: np.ndarray
    spec: VariableSpec = field(default_factory=VariableSpec)

    def __post_init__(self):
        stats = Statistics.parse(self.statistics)
        object.__setattr__(self, "statistics", stats)
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if amps.shape != (len(_BASIS[stats]),):
            raise InvalidState(
                f"{stats.value} state needs {len(_BASIS[stats])} amplitudes, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ZeroState("all amplitudes are zero")
        object.__setattr__(self, "amplitudes", _readonly(amps / norm))

    @property
    def basis(self) -> tuple[Configuration, ...]:
        return _BASIS[self.statistics]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def amplitude(self, mode1: Mode, mode2: Mode) -> complex:
        """Coefficient of ``c†_{mode1} c†_{mode2}|0>`` direction, sign included.

        For a repeated bosonic mode this returns the coefficient of |2_m>.
        """
        if self.statistics is Statistics.FERMION and mode1 == mode2:
            return 0j
        config, sign = apply_pair_normal_ordered(mode1, mode2, self.statistics)
        return sign * complex(self.amplitudes[_BASIS_INDEX[self.statistics][config]])

    def support(self, tol: float = ATOL) -> list[Configuration]:
        return [c for c, a in zip(self.basis, self.amplitudes) if abs(a) > tol]

    @classmethod
    def from_mapping(
        cls,
        stats: Statistics | str,
        amplitudes: Mapping[Configuration, complex],
        spec: VariableSpec | None = None,
    ) -> "TwoParticleState":
        """Build from ``{(mode, mode): amplitude}`` with pairs already canonical."""
        stats = Statistics.parse(stats)
        index = _BASIS_INDEX[stats]
        vec = np.zeros(len(index), dtype=np.complex128)
        for config, amp in amplitudes.items():
            config = tuple(config)
            if config not in index:
                if stats is Statistics.FERMION and config[0] == config[1]:
                    raise ExclusionViolation(f"two fermions in {config[0]!r}")
                raise InvalidState(f"{config!r} is not a canonical configuration")
            vec[index[config]] += amp
        return cls(stats, vec, spec or VariableSpec())

    @classmethod
    def from_creation_terms(
        cls,
        stats: Statistics | str,
        terms: Iterable[tuple[complex, Mode, Mode]],
        spec: VariableSpec | None = None,
    ) -> "TwoParticleState":
        """Build ``sum_k coef_k c†_{m_k} c†_{m'_k} |0>`` in any operator order."""
        stats = Statistics.parse(stats)
        index = _BASIS_INDEX[stats]
        vec = np.zeros(len(index), dtype=np.complex128)
        for coef, m1, m2 in terms:
            config, sign = apply_pair_normal_ordered(m1, m2, stats)
            # (c†_m)^2 |0> = sqrt(2) |2_m>
            weight = math.sqrt(2.0) if m1 == m2 else 1.0
            vec[index[config]] += sign * weight * coef
        return cls(stats, vec, spec or VariableSpec())

    def to_dict(self) -> dict:
        return {
            "statistics": self.statistics.value,
            "variable_spec": self.spec.to_dict(),
            "amplitudes": [
                {
                    "modes": [m1.as_list(), m2.as_list()],
                    "re": float(a.real),
                    "im": float(a.imag),
                }
                for (m1, m2), a in zip(self.basis, self.amplitudes)
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TwoParticleState":
        stats = Statistics.parse(d["statistics"])
        spec = VariableSpec.from_dict(d["variable_spec"]) if "variable_spec" in d else None
        mapping: dict[Configuration, complex] = {}
        for entry in d["amplitudes"]:
            m1, m2 = (Mode(*m) for m in entry["modes"])
            mapping[(m1, m2)] = complex(entry["re"], entry.get("im", 0.0))
        return cls.from_mapping(stats, mapping, spec)

    def __repr__(self):
        terms = ", ".join(
            f"{m1!r}{m2!r}: {complex(a):.6g}" for (m1, m2), a in zip(self.basis, self.amplitudes)
            if abs(a) > ATOL
        )
        return f"TwoParticleState({self.statistics.value}, {{{terms}}})"


def build_epr_state(
    alpha: complex,
    beta: complex,
    stats: Statistics | str = Statistics.BOSON,
    spec: VariableSpec | None = None,
) -> TwoParticleState:
    """(alpha c†_{A1,B1} c†_{A2,B2} + beta c†_{A1,B2} c†_{A2,B1})|0>, normalized."""
    if abs(alpha) ** 2 + abs(beta) ** 2 == 0:
        raise ZeroState("alpha and beta are both zero")
    return TwoParticleState.from_mapping(
        stats, {EPR_TERM_1: complex(alpha), EPR_TERM_2: complex(beta)}, spec
    )


def inner_product(s1: TwoParticleState, s2: TwoParticleState) -> complex:
    """<s1|s2>, conjugate-linear in ``s1``."""
    if s1.statistics is not s2.statistics:
        raise StatisticsMismatch(
            f"{s1.statistics.value} vs {s2.statistics.value}"
        )
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def fidelity(s1: TwoParticleState, s2: TwoParticleState) -> float:
    return abs(inner_product(s1, s2))


# --- first quantization -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FirstQuantizedState:
    """Amplitudes over ordered pairs (pseudo-particle 1 mode, pseudo-particle 2 mode).

    Index ``4 * i + j`` holds |MODES[i]>_1 |MODES[j]>_2.
    """

    statistics: Statistics
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "statistics", Statistics.parse(self.statistics))
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if amps.shape != (16,):
            raise InvalidState("first-quantized vector must have 16 entries")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    def swapped(self) -> np.ndarray:
        """Amplitudes after exchanging the two pseudo-labels."""
        return self.amplitudes.reshape(4, 4).T.ravel()

    def swap_eigenvalue(self, atol: float = ATOL) -> int | None:
        swapped = self.swapped()
        for ev in (1, -1):
            if np.allclose(swapped, ev * self.amplitudes, atol=atol, rtol=0):
                return ev
        return None

    def amplitude(self, m1: Mode, m2: Mode) -> complex:
        return complex(self.amplitudes[4 * MODE_INDEX[m1] + MODE_INDEX[m2]])

    @classmethod
    def project(cls, vec: Sequence[complex], stats: Statistics | str) -> "FirstQuantizedState":
        """(Anti)symmetrize an arbitrary ordered-pair vector and normalize it."""
        stats = Statistics.parse(stats)
        v = np.asarray(vec, dtype=np.complex128).reshape(4, 4)
        v = (v + stats.sign * v.T) / 2
        norm = np.linalg.norm(v)
        if norm < ATOL:
            raise ZeroState("projection onto the exchange sector vanishes")
        return cls(stats, (v / norm).ravel())


def to_first_quantized(s: TwoParticleState) -> FirstQuantizedState:
    """Map each canonical configuration to its (anti)symmetrized ordered-pair form."""
    vec = np.zeros(16, dtype=np.complex128)
    r = 1 / math.sqrt(2.0)
    sign = s.statistics.sign
    for (m1, m2), amp in zip(s.basis, s.amplitudes):
        i, j = MODE_INDEX[m1], MODE_INDEX[m2]
        if i == j:
            vec[4 * i + i] += amp
        else:
            vec[4 * i + j] += r * amp
            vec[4 * j + i] += sign * r * amp
    return FirstQuantizedState(s.statistics, vec)


def first_quantized_inner(f1: FirstQuantizedState, f2: FirstQuantizedState) -> complex:
    return complex(np.vdot(f1.amplitudes, f2.amplitudes))
