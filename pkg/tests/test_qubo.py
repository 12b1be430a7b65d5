import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knapanneal.errors import InfeasibleEncodingWarning, SizeLimitError, ValidationError
from knapanneal.knapsack import (GeneratorParams, KnapsackInstance, generate_random,
                                 solve_dp)
from knapanneal.qubo import (PenaltyConstants, all_vectors, build_vectors, decode,
                             encode, energies, energy, enumerate_energies,
                             evaluate_hamiltonian_direct, index_to_vector, load_qubo,
                             parse_qubo, penalty_regimes, save_qubo, serialize_qubo,
                             vector_to_index)

TWO_ITEM = KnapsackInstance(id="two", weights=(1, 2), values=(3, 1), capacity=2)
PEN = PenaltyConstants(A=10, B=1)


def tiny_instance(seed, n_items=3, capacity=5):
    return generate_random(GeneratorParams(
        n_items=n_items, weight_range=(1, capacity), value_range=(1, 9),
        capacity_rule=capacity, seed=seed))


class TestBuildVectors:
    def test_worked_example(self):
        wvec, lam, vvec = build_vectors(TWO_ITEM)
        assert wvec.tolist() == [-1, -2, 1, 2]
        assert lam.tolist() == [0, 0, 1, 1]
        assert vvec.tolist() == [-3, -1, 0, 0]

    def test_smallest_shape(self):
        inst = KnapsackInstance(id="s", weights=(1,), values=(5,), capacity=1)
        wvec, lam, vvec = build_vectors(inst)
        assert wvec.tolist() == [-1, 1]
        assert lam.tolist() == [0, 1]
        assert vvec.tolist() == [-5, 0]

    @given(st.integers(0, 2**32))
    @settings(max_examples=25, deadline=None)
    def test_slack_indicator_sums_to_capacity(self, seed):
        inst = tiny_instance(seed)
        _, lam, _ = build_vectors(inst)
        assert int(lam.sum()) == inst.capacity


class TestDirectEvaluation:
    def test_valid_configuration(self):
        assert evaluate_hamiltonian_direct(TWO_ITEM, PEN, [1, 0, 1, 0]) == -3

    def test_all_zeros_pays_slack_penalty(self):
        assert evaluate_hamiltonian_direct(TWO_ITEM, PEN, [0, 0, 0, 0]) == 10

    def test_mismatched_slack(self):
        assert evaluate_hamiltonian_direct(TWO_ITEM, PEN, [1, 0, 0, 1]) == 7

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            evaluate_hamiltonian_direct(TWO_ITEM, PEN, [1, 0, 1])


class TestEncode:
    def test_worked_example_energies(self):
        q = encode(TWO_ITEM, PEN)
        assert energy(q, [1, 0, 1, 0]) == -3
        assert energy(q, [0, 0, 0, 0]) == 10 == q.offset

    def test_dimension_and_ordering(self):
        q = encode(TWO_ITEM, PEN)
        assert q.dimension == 4 == q.n_items + q.capacity
        # item block first: its linear terms carry the value coefficients
        assert q.linear[:2].tolist() == [-3, -1]

    def test_exhaustive_equivalence_worked_example(self):
        q = encode(TWO_ITEM, PEN)
        for z in all_vectors(4):
            assert energy(q, z) == evaluate_hamiltonian_direct(TWO_ITEM, PEN, z)

    @pytest.mark.parametrize("seed", range(8))
    def test_exhaustive_equivalence_random(self, seed):
        inst = tiny_instance(seed)
        pen = penalty_regimes(inst, 1)[seed % 3]
        q = encode(inst, pen)
        vectors = all_vectors(inst.n_variables)
        direct = np.array([evaluate_hamiltonian_direct(inst, pen, z) for z in vectors])
        assert np.array_equal(energies(q, vectors), direct)
        assert np.array_equal(enumerate_energies(q), direct)

    def test_penalty_invariant_enforced(self):
        with pytest.raises(ValidationError):
            encode(TWO_ITEM, PenaltyConstants(A=3, B=1))  # A <= B*max(v) = 3
        encode(TWO_ITEM, PenaltyConstants(A=4, B=1))

    def test_infeasible_instance_warns(self):
        inst = KnapsackInstance(id="big", weights=(5, 6), values=(2, 3), capacity=4)
        with pytest.warns(InfeasibleEncodingWarning):
            q = encode(inst, PenaltyConstants(A=10, B=1))
        # encoding is still well-defined; every configuration pays a penalty
        assert int(enumerate_energies(q).min()) > -3 * 1

    def test_oversized_penalties_rejected(self):
        with pytest.raises(ValidationError):
            encode(TWO_ITEM, PenaltyConstants(A=2**61, B=1))

    def test_quadratic_is_symmetric_with_explicit_diagonal(self):
        q = encode(TWO_ITEM, PEN)
        assert np.array_equal(q.quadratic, q.quadratic.T)
        assert q.quadratic[0, 0] == PEN.A * 1  # A * w_1^2
        assert q.quadratic.flags.writeable is False


class TestEnergy:
    def test_all_zeros_is_offset(self):
        q = encode(TWO_ITEM, PEN)
        assert energy(q, np.zeros(4, dtype=int)) == q.offset

    def test_dimension_mismatch(self):
        q = encode(TWO_ITEM, PEN)
        with pytest.raises(ValidationError):
            energy(q, [0, 1])

    def test_batch_matches_scalar(self):
        q = encode(tiny_instance(4), PenaltyConstants(A=50, B=2))
        vectors = all_vectors(q.dimension)
        batch = energies(q, vectors)
        for k in (0, 1, 17, len(vectors) - 1):
            assert batch[k] == energy(q, vectors[k])

    def test_pure_function(self):
        q = encode(TWO_ITEM, PEN)
        z = [1, 1, 0, 1]
        assert energy(q, z) == energy(q, z)


class TestDecode:
    def test_valid_configuration(self):
        q = encode(TWO_ITEM, PEN)
        d = decode(q, [1, 0, 1, 0])
        assert d.knapsack.total_value == 3
        assert d.knapsack.total_weight == 1
        assert d.slack_valid and d.weight_consistent
        assert d.declared_weight == 1
        assert d.energy == -3

    def test_double_slack_invalid(self):
        q = encode(TWO_ITEM, PEN)
        d = decode(q, [1, 0, 1, 1])
        assert not d.slack_valid
        assert d.declared_weight == 0

    def test_all_zeros(self):
        q = encode(TWO_ITEM, PEN)
        d = decode(q, [0, 0, 0, 0])
        assert not d.slack_valid
        assert d.knapsack.total_value == 0
        assert d.knapsack.feasible

    def test_uses_item_bits_only(self):
        q = encode(TWO_ITEM, PEN)
        d = decode(q, [0, 1, 0, 1])
        assert d.knapsack.selection == (0, 1)
        assert d.declared_weight == 2
        assert d.weight_consistent


class TestPenaltyRegimes:
    def test_standard_magnitudes(self):
        inst = KnapsackInstance(id="r", weights=(5,), values=(60,), capacity=5)
        assert [p.A for p in penalty_regimes(inst, 1)] == [62, 120, 6000]
        assert [p.A for p in penalty_regimes(inst, 100)] == [6002, 12000, 600000]

    def test_all_satisfy_invariant(self):
        inst = tiny_instance(2)
        for b in (1, 7, 100):
            for pen in penalty_regimes(inst, b):
                assert 0 < pen.B * max(inst.values) < pen.A

    def test_invalid_b(self):
        with pytest.raises(ValidationError):
            penalty_regimes(TWO_ITEM, 0)


class TestGroundStates:
    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("regime", range(3))
    def test_argmin_decodes_to_dp_optimum(self, seed, regime):
        inst = tiny_instance(seed)
        opt = solve_dp(inst)
        assert opt.total_weight >= 1
        q = encode(inst, penalty_regimes(inst, 1)[regime])
        all_e = enumerate_energies(q)
        ground = int(all_e.min())
        for idx in np.flatnonzero(all_e == ground):
            d = decode(q, index_to_vector(int(idx), q.dimension))
            assert d.slack_valid and d.weight_consistent and d.knapsack.feasible
            assert d.knapsack.total_value == opt.total_value

    @pytest.mark.parametrize("seed", range(4))
    def test_penalty_separation(self, seed):
        # no constraint-violating vector reaches the encoded optimum's energy
        inst = tiny_instance(seed)
        q = encode(inst, penalty_regimes(inst, 1)[0])
        all_e = enumerate_energies(q)
        ground = int(all_e.min())
        for idx in range(all_e.shape[0]):
            d = decode(q, index_to_vector(idx, q.dimension))
            invalid = (not d.slack_valid or not d.weight_consistent
                       or not d.knapsack.feasible)
            if invalid:
                assert all_e[idx] > ground


class TestIndexing:
    def test_round_trip(self):
        for n in (1, 3, 6):
            for idx in range(1 << n):
                assert vector_to_index(index_to_vector(idx, n)) == idx

    def test_lexicographic_order(self):
        vectors = all_vectors(3)
        as_tuples = [tuple(v) for v in vectors]
        assert as_tuples == sorted(as_tuples)

    def test_all_vectors_guard(self):
        with pytest.raises(SizeLimitError):
            all_vectors(21)


class TestQuboFiles:
    def test_round_trip_energies(self, tmp_path):
        q = encode(TWO_ITEM, PEN)
        path = tmp_path / "two.qubo"
        save_qubo(q, path)
        q2 = load_qubo(path)
        vectors = all_vectors(4)
        assert np.array_equal(energies(q, vectors), energies(q2, vectors))
        assert q2.penalties == q.penalties
        assert q2.instance == q.instance

    def test_reserialization_idempotent(self):
        q = encode(tiny_instance(1), PenaltyConstants(A=40, B=1))
        text = serialize_qubo(q)
        assert serialize_qubo(parse_qubo(text)) == text

    def test_malformed_rejected(self):
        with pytest.raises(ValidationError):
            parse_qubo("qubo 4\n")
        q = encode(TWO_ITEM, PEN)
        bad = serialize_qubo(q).replace("offset 10", "offset x")
        with pytest.raises(ValidationError):
            parse_qubo(bad)
