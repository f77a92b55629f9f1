import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualism.bell import TSIRELSON, BellSettings, bell_expectation, chsh_optimal
from dualism.decoherence import (
    EnvironmentOverlap,
    ReducedDensityMatrix,
    chsh_from_dm,
    chsh_optimal_dm,
    correlation_matrix_dm,
    dephase_dual_form,
    sweep_to_csv,
    sweep_to_json_obj,
    sweep_transition,
)
from dualism.dual import LabeledBipartiteState, relabel_by_A, relabel_by_B
from dualism.errors import InvalidState, NotEprForm
from dualism.fock import Mode, TwoParticleState, build_epr_state

from conftest import R2, nonzero_complexes, random_complex, statistics

gammas = st.floats(0, 1)


def oracle_dm(c1, c2, gamma, phi, form, rng):
    """Partial trace with environments embedded in C^3 at a random orientation."""
    q, _ = np.linalg.qr(random_complex(rng, (3, 3)))
    chi = {1: q[:, 0], 2: gamma * np.exp(1j * phi) * q[:, 0] + math.sqrt(1 - gamma**2) * q[:, 1]}
    assert np.vdot(chi[1], chi[2]) == pytest.approx(gamma * np.exp(1j * phi))
    # psi[sys1, sys2, env1, env2]
    psi = np.zeros((2, 2, 3, 3), dtype=complex)
    traps = {"A": ((1, 2), (1, 2)), "B": ((1, 2), (2, 1))}[form]
    psi[0, 1] += c1 * np.einsum("i,j->ij", chi[traps[0][0]], chi[traps[0][1]])
    psi[1, 0] += c2 * np.einsum("i,j->ij", chi[traps[1][0]], chi[traps[1][1]])
    return np.einsum("abij,cdij->abcd", psi, psi.conj()).reshape(4, 4)


def test_environment_vectors():
    env = EnvironmentOverlap(0.3, 1.1)
    chi1, chi2 = env.environment_vectors()
    assert np.vdot(chi1, chi2) == pytest.approx(0.3 * np.exp(1.1j), abs=1e-15)
    assert np.linalg.norm(chi2) == pytest.approx(1)
    with pytest.raises(InvalidState):
        EnvironmentOverlap(1.2)
    assert EnvironmentOverlap.from_time(2.0, 4.0).gamma == pytest.approx(math.exp(-0.5))


class TestDephase:
    @pytest.mark.parametrize("form", ["A", "B"])
    @pytest.mark.parametrize("stats", ["boson", "fermion"])
    def test_gamma_one_is_pure(self, form, stats):
        s = build_epr_state(0.6, 0.8j, stats)
        lb = relabel_by_A(s) if form == "A" else relabel_by_B(s)
        rho = dephase_dual_form(s, EnvironmentOverlap(1.0), form)
        assert np.allclose(rho.matrix, ReducedDensityMatrix.pure(lb).matrix, atol=1e-12)
        assert rho.purity() == pytest.approx(1)

    def test_gamma_zero_classical_mixture(self):
        rho = dephase_dual_form(build_epr_state(R2, R2), EnvironmentOverlap(0.0), "B")
        expected = np.zeros((4, 4))
        expected[1, 1] = expected[2, 2] = 0.5
        assert np.allclose(rho.matrix, expected, atol=1e-15)

    def test_gamma_half(self, rng):
        alpha, beta = 0.6, 0.8
        s = build_epr_state(alpha, beta)
        rho = dephase_dual_form(s, EnvironmentOverlap(0.5), "B")
        assert abs(rho.coherence) == pytest.approx(0.25 * alpha * beta, abs=1e-15)
        assert np.allclose(rho.matrix, oracle_dm(alpha, beta, 0.5, 0.0, "B", rng), atol=1e-12)

    def test_matches_independent_embedding(self, rng):
        for _ in range(50):
            alpha, beta = random_complex(rng, 2)
            stats = ["boson", "fermion"][rng.integers(2)]
            gamma, phi = rng.uniform(), rng.uniform(-math.pi, math.pi)
            s = build_epr_state(alpha, beta, stats)
            for form, lb in (("A", relabel_by_A(s)), ("B", relabel_by_B(s))):
                rho = dephase_dual_form(s, EnvironmentOverlap(gamma, phi), form)
                assert np.allclose(rho.matrix, oracle_dm(lb.c1, lb.c2, gamma, phi, form, rng), atol=1e-12)

    @given(nonzero_complexes, nonzero_complexes, statistics, gammas, st.floats(-math.pi, math.pi))
    def test_spin_form_immune(self, alpha, beta, stats, gamma, phi):
        s = build_epr_state(alpha, beta, stats)
        rho = dephase_dual_form(s, EnvironmentOverlap(gamma, phi), "A")
        assert np.allclose(rho.matrix, ReducedDensityMatrix.pure(relabel_by_A(s)).matrix, atol=1e-12)

    @given(nonzero_complexes, nonzero_complexes, statistics, gammas, st.floats(-math.pi, math.pi))
    def test_quadratic_suppression(self, alpha, beta, stats, gamma, phi):
        s = build_epr_state(alpha, beta, stats)
        pure = ReducedDensityMatrix.pure(relabel_by_B(s))
        rho = dephase_dual_form(s, EnvironmentOverlap(gamma, phi), "B")
        assert abs(rho.coherence) == pytest.approx(gamma**2 * abs(pure.coherence), abs=1e-12)
        # the overlap phase cancels between |chi1 chi2> and |chi2 chi1>
        assert rho.coherence == pytest.approx(gamma**2 * pure.coherence, abs=1e-12)
        assert np.allclose(np.diag(rho.matrix), np.diag(pure.matrix), atol=1e-12)

    def test_not_epr(self):
        s = TwoParticleState.from_mapping("boson", {(Mode(1, 1), Mode(1, 2)): 1})
        with pytest.raises(NotEprForm):
            dephase_dual_form(s, EnvironmentOverlap(0.5), "B")

    def test_bad_form(self):
        with pytest.raises(InvalidState):
            dephase_dual_form(build_epr_state(1, 1), EnvironmentOverlap(0.5), "C")

    def test_density_matrix_validation(self):
        with pytest.raises(InvalidState):
            ReducedDensityMatrix(np.eye(4), "A", "B")
        with pytest.raises(InvalidState):
            ReducedDensityMatrix(np.diag([1.5, -0.5, 0, 0]), "A", "B")
        bad = np.zeros((4, 4), dtype=complex)
        bad[0, 0] = 1
        bad[0, 1] = 1j
        with pytest.raises(InvalidState):
            ReducedDensityMatrix(bad, "A", "B")


class TestChshFromDm:
    def test_pure_bell(self):
        rho = ReducedDensityMatrix.pure(LabeledBipartiteState("B", "A", R2, R2))
        assert chsh_from_dm(rho, BellSettings.canonical()).bell_expectation == pytest.approx(TSIRELSON, abs=1e-12)

    def test_classical_mixture(self):
        rho = dephase_dual_form(build_epr_state(R2, R2), EnvironmentOverlap(0.0), "B")
        assert np.allclose(correlation_matrix_dm(rho), np.diag([0, 0, -1]), atol=1e-15)
        assert chsh_optimal_dm(rho).value == pytest.approx(2, abs=1e-9)

    @pytest.mark.parametrize("gamma", [0.0, 0.3, 0.5, 0.8, 1.0])
    def test_optimal_closed_form(self, gamma):
        rho = dephase_dual_form(build_epr_state(R2, R2, "fermion"), EnvironmentOverlap(gamma), "B")
        opt = chsh_optimal_dm(rho)
        assert opt.value == pytest.approx(2 * math.sqrt(1 + gamma**4), abs=1e-12)
        assert opt.grid_value == pytest.approx(opt.value, abs=1e-6)

    def test_rank_one_consistency(self, rng):
        for _ in range(20):
            lb = LabeledBipartiteState("A", "B", *random_complex(rng, 2))
            for st_ in (chsh_optimal(lb).settings, BellSettings.canonical()):
                a = chsh_from_dm(ReducedDensityMatrix.pure(lb), st_)
                b = bell_expectation(lb, st_)
                assert a.correlators == pytest.approx(b.correlators, abs=1e-12)
                assert a.bell_expectation == pytest.approx(b.bell_expectation, abs=1e-12)


class TestSweep:
    def test_no_decoherence(self):
        (row,) = sweep_transition(build_epr_state(R2, R2), [1.0], "optimal")
        assert row.s_spin == pytest.approx(TSIRELSON, abs=1e-9)
        assert row.s_momentum == pytest.approx(TSIRELSON, abs=1e-9)

    def test_full_decoherence(self):
        (row,) = sweep_transition(build_epr_state(R2, R2), [0.0], "optimal")
        assert (row.s_spin, row.s_momentum) == (pytest.approx(TSIRELSON, abs=1e-9), pytest.approx(2, abs=1e-9))

    @pytest.mark.parametrize("stats,sign", [("boson", 1), ("fermion", -1)])
    def test_fixed_canonical(self, stats, sign):
        gs = [0, 0.25, 0.5, 0.75, 1]
        rows = sweep_transition(build_epr_state(R2, R2, stats), gs, "fixed-canonical")
        for g, row in zip(gs, rows):
            # in the x-y plane only the term coherence contributes, scaled by gamma^2
            assert row.s_momentum == pytest.approx(sign * TSIRELSON * g**2, abs=1e-12)
            assert row.s_spin == pytest.approx(TSIRELSON, abs=1e-12)

    @settings(max_examples=15)
    @given(nonzero_complexes, nonzero_complexes, statistics)
    def test_monotone_and_spin_constant(self, alpha, beta, stats):
        gs = np.linspace(0, 1, 6)
        rows = sweep_transition(build_epr_state(alpha, beta, stats), gs, "optimal")
        spins = [r.s_spin for r in rows]
        assert max(spins) - min(spins) < 1e-12
        mom = [r.s_momentum for r in rows]
        assert all(b >= a - 1e-12 for a, b in zip(mom, mom[1:]))

    def test_output_formats(self):
        rows = sweep_transition(build_epr_state(R2, R2), [0.0, 1.0], "optimal")
        csv_text = sweep_to_csv(rows)
        assert csv_text.splitlines()[0] == "gamma,s_spin,s_momentum,settings_mode"
        assert len(csv_text.splitlines()) == 3
        obj = json.loads(json.dumps(sweep_to_json_obj(rows)))
        assert obj[1]["s_momentum"] == pytest.approx(TSIRELSON)

    def test_bad_mode(self):
        with pytest.raises(InvalidState):
            sweep_transition(build_epr_state(1, 1), [0.5], "whatever")
