import numpy as np
import pytest
from scipy.integrate import solve_ivp

from knapanneal.adiabatic import (AnnealProblem, EVOLVE_MAX_QUBITS, GAP_MAX_QUBITS,
                                  apply_hamiltonian, dense_hamiltonian, evolve,
                                  gap_scan, initial_state, success_curve, suggest_dt,
                                  write_gap_csv, write_success_csv)
from knapanneal.errors import SizeLimitError, StepSizeError, ValidationError
from knapanneal.knapsack import GeneratorParams, KnapsackInstance, generate_random
from knapanneal.qubo import PenaltyConstants, encode, penalty_regimes

TWO_ITEM = KnapsackInstance(id="two", weights=(1, 2), values=(3, 1), capacity=2)
TWO_PROBLEM = AnnealProblem.from_qubo(encode(TWO_ITEM, PenaltyConstants(A=10, B=1)))


def random_problem(seed, n_items=2, capacity=4):
    inst = generate_random(GeneratorParams(
        n_items=n_items, weight_range=(1, capacity), value_range=(1, 9),
        capacity_rule=capacity, seed=seed))
    return AnnealProblem.from_qubo(encode(inst, penalty_regimes(inst, 1)[0]))


class TestAnnealProblem:
    def test_diagonal_matches_qubo_energies(self):
        from knapanneal.qubo import energy, index_to_vector
        q = encode(TWO_ITEM, PenaltyConstants(A=10, B=1))
        prob = AnnealProblem.from_qubo(q)
        for idx in range(prob.dimension):
            assert prob.energies[idx] == energy(q, index_to_vector(idx, 4))

    def test_from_diagonal(self):
        prob = AnnealProblem.from_diagonal([0, 1])
        assert prob.n_qubits == 1
        with pytest.raises(ValidationError):
            AnnealProblem.from_diagonal([0, 1, 2])

    def test_ground_indices(self):
        prob = AnnealProblem.from_diagonal([3, 0, 0, 7])
        assert prob.ground_indices().tolist() == [1, 2]


class TestApplyHamiltonian:
    def test_final_hamiltonian_is_diagonal(self):
        psi = np.zeros(16, dtype=complex)
        psi[5] = 1.0
        out = apply_hamiltonian(TWO_PROBLEM, 1.0, psi)
        expected = np.zeros(16, dtype=complex)
        expected[5] = TWO_PROBLEM.energies[5]
        assert np.allclose(out, expected)

    def test_driver_on_single_qubit(self):
        prob = AnnealProblem.from_diagonal([0, 1])
        out = apply_hamiltonian(prob, 0.0, np.array([1.0, 0.0]))
        assert np.allclose(out, [0.0, -1.0])

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_dense_matrix(self, seed):
        prob = random_problem(seed)
        rng = np.random.default_rng(seed)
        psi = rng.standard_normal(prob.dimension) + 1j * rng.standard_normal(prob.dimension)
        for s in (0.0, 0.25, 0.7, 1.0):
            dense = dense_hamiltonian(prob, s) @ psi
            assert np.allclose(apply_hamiltonian(prob, s, psi), dense, atol=1e-10)

    def test_hermiticity(self):
        prob = random_problem(1)
        rng = np.random.default_rng(0)
        dim = prob.dimension
        for _ in range(5):
            phi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            lhs = np.vdot(phi, apply_hamiltonian(prob, 0.4, psi))
            rhs = np.conj(np.vdot(psi, apply_hamiltonian(prob, 0.4, phi)))
            assert abs(lhs - rhs) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            apply_hamiltonian(TWO_PROBLEM, 0.5, np.zeros(8))

    def test_s_range(self):
        with pytest.raises(ValidationError):
            apply_hamiltonian(TWO_PROBLEM, 1.5, np.zeros(16))


class TestGapScan:
    def test_single_qubit_analytic_case(self):
        # H_f = diag(0, 1): gap(s) = sqrt(s^2 + 4(1-s)^2), minimized at s=0.8
        prob = AnnealProblem.from_diagonal([0, 1])
        profile = gap_scan(prob, 201)
        assert abs(profile.min_gap - np.sqrt(0.8)) < 1e-6
        assert abs(profile.argmin - 0.8) < 1e-6
        assert profile.gaps[0] == pytest.approx(2.0, abs=1e-12)
        assert profile.gaps[-1] == pytest.approx(1.0, abs=1e-12)
        expected = np.sqrt(profile.grid**2 + 4 * (1 - profile.grid) ** 2)
        assert np.allclose(profile.gaps, expected, atol=1e-8)

    def test_driver_gap_is_two(self):
        for seed in range(2):
            prob = random_problem(seed)
            profile = gap_scan(prob, 5)
            assert profile.gaps[0] == 2.0

    @pytest.mark.parametrize("seed", range(2))
    def test_matches_dense_diagonalization(self, seed):
        prob = random_problem(seed, n_items=2, capacity=6)  # dim 256: Lanczos path
        profile = gap_scan(prob, 11)
        for s, g in zip(profile.grid, profile.gaps):
            vals = np.linalg.eigvalsh(dense_hamiltonian(prob, float(s)))
            expected = max(float(vals[1] - vals[0]), 0.0)
            if expected < 1e-8:
                expected = 0.0
            assert abs(g - expected) < 1e-8

    def test_degenerate_final_ground_reports_zero(self):
        prob = AnnealProblem.from_diagonal([0, 0, 4, 7])
        profile = gap_scan(prob, 3)
        assert profile.gaps[-1] == 0.0
        assert profile.min_gap == 0.0

    def test_grid_properties(self):
        profile = gap_scan(TWO_PROBLEM, 11)
        assert profile.grid[0] == 0.0 and profile.grid[-1] == 1.0
        assert np.all(np.diff(profile.grid) > 0)
        assert np.all(profile.gaps >= 0)
        assert profile.min_gap == profile.gaps.min()

    def test_deterministic(self):
        a = gap_scan(TWO_PROBLEM, 21)
        b = gap_scan(TWO_PROBLEM, 21)
        assert np.array_equal(a.gaps, b.gaps)

    def test_size_guard(self):
        diag = np.zeros(1 << (GAP_MAX_QUBITS + 1), dtype=np.int64)
        prob = AnnealProblem.from_diagonal(diag)
        with pytest.raises(SizeLimitError):
            gap_scan(prob, 3)


class TestEvolve:
    def test_initial_state_overlap_is_degeneracy_fraction(self):
        # measuring at T -> 0 returns the uniform superposition
        prob = AnnealProblem.from_diagonal([0, 0, 4, 7])
        psi = initial_state(prob.n_qubits)
        overlap = float((np.abs(psi[prob.ground_indices()]) ** 2).sum())
        assert overlap == pytest.approx(2 / 4)

    def test_adiabatic_limit_on_worked_example(self):
        res = evolve(TWO_PROBLEM, 200.0)
        assert res.success_probability >= 0.99
        assert res.norm_drift <= 1e-6

    def test_short_anneal_fails(self):
        res = evolve(TWO_PROBLEM, 0.1)
        assert res.success_probability < 0.5

    def test_single_qubit_matches_independent_integrator(self):
        prob = AnnealProblem.from_diagonal([0, 1])
        t_final = 5.0
        res = evolve(prob, t_final, dt=0.002)

        def rhs(t, y):
            h = dense_hamiltonian(prob, t / t_final)
            return -1j * (h @ y)

        oracle = solve_ivp(rhs, (0.0, t_final), initial_state(1), method="DOP853",
                           rtol=1e-12, atol=1e-12)
        assert np.allclose(res.final_state, oracle.y[:, -1], atol=1e-6)

    def test_energy_expectation_within_spectrum_bounds(self):
        prob = random_problem(2)
        res = evolve(prob, 3.0)
        for s in (0.0, 0.5, 1.0):
            vals = np.linalg.eigvalsh(dense_hamiltonian(prob, s))
            psi = res.final_state
            expect = np.real(np.vdot(psi, apply_hamiltonian(prob, s, psi)))
            norm = np.real(np.vdot(psi, psi))
            assert vals[0] - 1e-9 <= expect / norm <= vals[-1] + 1e-9

    def test_oversized_dt_aborts(self):
        with pytest.raises(StepSizeError):
            evolve(TWO_PROBLEM, 10.0, dt=0.5)

    def test_invalid_args(self):
        with pytest.raises(ValidationError):
            evolve(TWO_PROBLEM, 0.0)
        with pytest.raises(ValidationError):
            evolve(TWO_PROBLEM, 1.0, dt=2.0)

    def test_size_guard(self):
        diag = np.zeros(1 << (EVOLVE_MAX_QUBITS + 1), dtype=np.int64)
        prob = AnnealProblem.from_diagonal(diag)
        with pytest.raises(SizeLimitError):
            evolve(prob, 1.0)

    def test_suggest_dt_scales_down_with_penalty(self):
        small = suggest_dt(TWO_PROBLEM, 10.0)
        stiff = AnnealProblem.from_qubo(encode(TWO_ITEM, PenaltyConstants(A=1000, B=1)))
        assert suggest_dt(stiff, 10.0) < small


class TestSuccessCurve:
    def test_trend_on_worked_example(self):
        curve = success_curve(TWO_PROBLEM, [0.1, 1.0, 10.0])
        times = [r.anneal_time for r in curve]
        assert times == [0.1, 1.0, 10.0]
        assert curve[-1].success_probability > curve[0].success_probability

    def test_single_element(self):
        curve = success_curve(TWO_PROBLEM, [2.0])
        assert len(curve) == 1
        single = evolve(TWO_PROBLEM, 2.0)
        assert curve[0].success_probability == single.success_probability


class TestCsvExport:
    def test_gap_csv(self, tmp_path):
        profile = gap_scan(AnnealProblem.from_diagonal([0, 1]), 5)
        path = tmp_path / "gap.csv"
        write_gap_csv(profile, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "s,gap"
        assert len(lines) == 1 + 5 + 1
        assert lines[-1].startswith("# min_gap=")

    def test_success_csv(self, tmp_path):
        curve = success_curve(TWO_PROBLEM, [0.5, 1.0])
        path = tmp_path / "succ.csv"
        write_success_csv(curve, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "T,success_probability,norm_drift"
        assert len(lines) == 3
