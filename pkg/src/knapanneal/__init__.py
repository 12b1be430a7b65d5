"""Knapsack-to-QUBO optimization toolkit.

Encodes 0/1 knapsack problems as penalty-based QUBO Hamiltonians with a
unary slack register, solves them exactly and by simulated annealing,
simulates small-scale adiabatic evolution (spectral gaps and success
probabilities), and evaluates answers by normalized Hamming distance.
"""

from .adiabatic import (AnnealProblem, EvolutionResult, GapProfile, evolve, gap_scan,
                        success_curve)
from .analysis import (ComparisonReport, DegeneracyStats, compare_solutions,
                       correct_vector, degeneracy_stats, hamming, penalty_sweep,
                       reads_sweep, size_sweep)
from .errors import (GapScanError, InfeasibleEncodingWarning, KnapannealError,
                     NumericalError, SizeLimitError, StepSizeError, ValidationError)
from .knapsack import (GeneratorParams, KnapsackInstance, KnapsackSolution,
                       brute_force_knapsack, catalog_instances, generate_random,
                       load_instance, save_instance, solve_branch_bound, solve_dp)
from .qubo import (DecodedSample, PenaltyConstants, QuboProblem, build_vectors, decode,
                   encode, energy, evaluate_hamiltonian_direct, load_qubo,
                   penalty_regimes, save_qubo)
from .samplers import (AnnealSchedule, SampleRecord, SampleSet, brute_force_qubo,
                       load_sampleset, random_sampler, save_sampleset,
                       simulated_anneal)

__version__ = "0.1.0"

__all__ = [
    "AnnealProblem", "AnnealSchedule", "ComparisonReport", "DecodedSample",
    "DegeneracyStats", "EvolutionResult", "GapProfile", "GapScanError",
    "GeneratorParams", "InfeasibleEncodingWarning", "KnapannealError",
    "KnapsackInstance", "KnapsackSolution", "NumericalError", "PenaltyConstants",
    "QuboProblem", "SampleRecord", "SampleSet", "SizeLimitError", "StepSizeError",
    "ValidationError", "brute_force_knapsack", "brute_force_qubo", "build_vectors",
    "catalog_instances", "compare_solutions", "correct_vector", "decode",
    "degeneracy_stats", "encode", "energy", "evaluate_hamiltonian_direct", "evolve",
    "gap_scan", "generate_random", "hamming", "load_instance", "load_qubo",
    "load_sampleset", "penalty_regimes", "penalty_sweep", "random_sampler",
    "reads_sweep", "save_instance", "save_qubo", "save_sampleset",
    "simulated_anneal", "size_sweep", "solve_branch_bound", "solve_dp",
    "success_curve",
]
