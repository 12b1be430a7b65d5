"""Solution-quality evaluation: Hamming distances, degeneracy, and sweeps.

The evaluation protocol compares three vectors per problem: the correct
ground state c, a quantum-surrogate sampler's answer q, and a simulated
annealing answer s, each the minimum-energy read of a multi-read run. Their
pairwise normalized Hamming distances are averaged over independent trials.
Since no quantum hardware is involved here, the quantum surrogate defaults
to an independently seeded simulated annealing run; the comparison machinery
is sampler-agnostic.

Every sweep is deterministic end-to-end given its seed: trial t derives the
substream seed child_seed(seed, t) and hands the same trial seed to both
samplers (identical samplers therefore produce identical answers; distinct
surrogate streams are created by salting inside the sampler factories).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError
from .knapsack import KnapsackInstance, solve_dp
from .qubo import PenaltyConstants, QuboProblem, decode, encode, penalty_regimes
from .rng import child_seed
from .samplers import (AnnealSchedule, SampleSet, brute_force_qubo, random_sampler,
                       simulated_anneal)

# A sampler bound to its problem: (num_reads, seed) -> SampleSet.
SamplerFn = Callable[[int, int], SampleSet]

# Substream salts separating the quantum-surrogate and annealing streams.
SALT_SURROGATE = 1
SALT_ANNEAL = 2

ENUMERABLE_MAX = 26
DEFAULT_READS_LIST = (100, 500, 1000, 5000)


@dataclass(frozen=True)
class ComparisonReport:
    """Mean pairwise distances between correct, surrogate, and SA answers."""

    instance_id: str
    d_cq: float
    d_cs: float
    d_sq: float
    trials: int
    reads_per_trial: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        for name in ("d_cq", "d_cs", "d_sq"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {val}")


@dataclass(frozen=True)
class DegeneracyStats:
    num_reads: int
    unique_solutions: int
    min_energy_multiplicity: int


@dataclass(frozen=True)
class PenaltySweepRow:
    A: int
    B: int
    d_cq: float
    d_cs: float
    d_sq: float
    best_energy: int


@dataclass(frozen=True)
class ReadsSweepRow:
    reads: int
    best_energy: int
    hit_ground: bool
    d_cq: float


@dataclass(frozen=True)
class SizeSweepRow:
    instance_id: str
    binary_variables: int
    d_cq: float
    d_cs: float
    d_sq: float


def hamming(a, b) -> float:
    """Fraction of coordinates on which two binary vectors differ."""
    av, bv = np.asarray(a), np.asarray(b)
    if av.shape != bv.shape or av.ndim != 1:
        raise ValidationError(
            f"vectors must share one dimension, got shapes {av.shape} and {bv.shape}"
        )
    return float(np.abs(av.astype(np.int64) - bv.astype(np.int64)).sum() / av.shape[0])


def correct_vector(qubo: QuboProblem) -> np.ndarray:
    """The reference answer c for a given encoding.

    For enumerable sizes (n <= 26) this is the exhaustive QUBO ground state
    (lexicographically smallest under degeneracy). Beyond that it is the
    exact DP optimum lifted to the full vector with its unique consistent
    slack bit set.
    """
    n = qubo.dimension
    if n <= ENUMERABLE_MAX:
        _, states = brute_force_qubo(qubo)
        return np.array(states[0], dtype=np.int64)
    sol = solve_dp(qubo.instance)
    z = np.zeros(n, dtype=np.int64)
    z[:qubo.n_items] = sol.selection
    if sol.total_weight >= 1:
        z[qubo.n_items + sol.total_weight - 1] = 1
    return z


# ---------------------------------------------------------------------------
# bound sampler factories
# ---------------------------------------------------------------------------

def sa_sampler(qubo: QuboProblem, schedule: AnnealSchedule | None = None,
               salt: int | None = None) -> SamplerFn:
    """Simulated annealing bound to `qubo`.

    With a salt, the callable re-keys each incoming seed into the salted
    substream, giving an independent stream from an unsalted (or differently
    salted) sampler driven by the same trial seeds.
    """
    def run(num_reads: int, seed: int) -> SampleSet:
        eff = seed if salt is None else child_seed(seed, salt)
        return simulated_anneal(qubo, schedule, num_reads, eff)
    return run


def uniform_sampler(qubo: QuboProblem, salt: int | None = None) -> SamplerFn:
    """Uniform-random baseline bound to `qubo`."""
    def run(num_reads: int, seed: int) -> SampleSet:
        eff = seed if salt is None else child_seed(seed, salt)
        return random_sampler(qubo, num_reads, eff)
    return run


# ---------------------------------------------------------------------------
# comparison protocol
# ---------------------------------------------------------------------------

def _run_trials(correct, sampler_q: SamplerFn, sampler_s: SamplerFn, trials: int,
                reads_per_trial: int, seed: int) -> tuple[float, float, float, int]:
    """Mean distances plus the best energy either sampler reached."""
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    c = np.asarray(correct)
    d_cq = d_cs = d_sq = 0.0
    best_energy = None
    for t in range(trials):
        trial_seed = child_seed(seed, t)
        q_set = sampler_q(reads_per_trial, trial_seed)
        s_set = sampler_s(reads_per_trial, trial_seed)
        q = np.array(q_set.best.z)
        s = np.array(s_set.best.z)
        d_cq += hamming(c, q)
        d_cs += hamming(c, s)
        d_sq += hamming(s, q)
        e = min(q_set.best.energy, s_set.best.energy)
        best_energy = e if best_energy is None else min(best_energy, e)
    return d_cq / trials, d_cs / trials, d_sq / trials, int(best_energy)


def compare_solutions(instance: KnapsackInstance, correct, sampler_q: SamplerFn,
                      sampler_s: SamplerFn, trials: int = 10,
                      reads_per_trial: int = 100, seed: int = 0) -> ComparisonReport:
    """Mean Hamming distances over `trials` best-of-`reads_per_trial` runs.

    Each trial hands the same derived seed to both samplers and takes each
    sampler's minimum-energy read (lexicographic tie-break) as its answer.
    """
    d_cq, d_cs, d_sq, _ = _run_trials(correct, sampler_q, sampler_s, trials,
                                      reads_per_trial, seed)
    return ComparisonReport(
        instance_id=instance.id,
        d_cq=d_cq,
        d_cs=d_cs,
        d_sq=d_sq,
        trials=trials,
        reads_per_trial=reads_per_trial,
    )


def degeneracy_stats(samples: SampleSet) -> DegeneracyStats:
    """Distinct-solution and minimum-energy multiplicity counts for one run."""
    if not samples.records:
        raise ValidationError("sample set is empty")
    best = samples.best.energy
    return DegeneracyStats(
        num_reads=samples.num_reads,
        unique_solutions=len(samples.records),
        min_energy_multiplicity=sum(1 for r in samples.records if r.energy == best),
    )


# ---------------------------------------------------------------------------
# experiment sweeps
# ---------------------------------------------------------------------------

def _default_penalties(instance: KnapsackInstance) -> PenaltyConstants:
    # middle regime at B=1 unless the caller says otherwise
    return penalty_regimes(instance, 1)[1]


def penalty_sweep(instance: KnapsackInstance, B_list=(1, 10, 100), trials: int = 10,
                  reads: int = 100, seed: int = 0,
                  schedule: AnnealSchedule | None = None) -> list[PenaltySweepRow]:
    """Compare answers across the full cross product of B values and regimes.

    Rows are ordered by B ascending then A ascending. best_energy is the
    minimum energy sampled by either sampler in that row's runs.
    """
    rows = []
    for b in sorted(int(x) for x in B_list):
        settings = sorted(penalty_regimes(instance, b), key=lambda p: p.A)
        for pen in settings:
            qubo = encode(instance, pen)
            c = correct_vector(qubo)
            q_fn = sa_sampler(qubo, schedule, salt=SALT_SURROGATE)
            s_fn = sa_sampler(qubo, schedule, salt=SALT_ANNEAL)
            d_cq, d_cs, d_sq, best = _run_trials(c, q_fn, s_fn, trials, reads,
                                                 child_seed(seed, pen.B, pen.A))
            rows.append(PenaltySweepRow(A=pen.A, B=pen.B, d_cq=d_cq, d_cs=d_cs,
                                        d_sq=d_sq, best_energy=best))
    return rows


def reads_sweep(instance: KnapsackInstance, reads_list=DEFAULT_READS_LIST,
                trials: int = 3, seed: int = 0,
                penalties: PenaltyConstants | None = None,
                schedule: AnnealSchedule | None = None) -> list[ReadsSweepRow]:
    """Best sampled energy and distance-to-correct per read count.

    Trial seeds do not depend on the read count and per-read substreams are
    prefix-stable, so the reads in a 500-read run contain those of the
    100-read run: best_energy is non-increasing along a growing reads_list.
    hit_ground compares against the exhaustive ground energy, so the
    encoding must be enumerable (n <= 26).
    """
    pen = penalties or _default_penalties(instance)
    qubo = encode(instance, pen)
    if qubo.dimension > ENUMERABLE_MAX:
        raise ValidationError(
            f"reads_sweep needs an enumerable encoding (n <= {ENUMERABLE_MAX}), "
            f"got n = {qubo.dimension}"
        )
    ground, _ = brute_force_qubo(qubo)
    c = correct_vector(qubo)
    q_fn = sa_sampler(qubo, schedule, salt=SALT_SURROGATE)
    rows = []
    for reads in reads_list:
        best = None
        dist = 0.0
        for t in range(trials):
            samples = q_fn(int(reads), child_seed(seed, t))
            e = samples.best.energy
            best = e if best is None else min(best, e)
            dist += hamming(c, np.array(samples.best.z))
        rows.append(ReadsSweepRow(reads=int(reads), best_energy=int(best),
                                  hit_ground=best == ground, d_cq=dist / trials))
    return rows


def size_sweep(instances, trials: int = 10, reads: int = 100, seed: int = 0,
               penalties_for=None,
               schedule: AnnealSchedule | None = None) -> list[SizeSweepRow]:
    """One comparison row per instance, ordered by encoded size.

    penalties_for maps an instance to its PenaltyConstants (default: middle
    regime at B=1).
    """
    pen_for = penalties_for or _default_penalties
    ordered = sorted(instances, key=lambda inst: inst.n_variables)
    rows = []
    for idx, inst in enumerate(ordered):
        qubo = encode(inst, pen_for(inst))
        c = correct_vector(qubo)
        q_fn = sa_sampler(qubo, schedule, salt=SALT_SURROGATE)
        s_fn = sa_sampler(qubo, schedule, salt=SALT_ANNEAL)
        report = compare_solutions(inst, c, q_fn, s_fn, trials, reads,
                                   child_seed(seed, idx))
        rows.append(SizeSweepRow(instance_id=inst.id,
                                 binary_variables=inst.n_variables,
                                 d_cq=report.d_cq, d_cs=report.d_cs,
                                 d_sq=report.d_sq))
    return rows


# ---------------------------------------------------------------------------
# CSV tables and run manifests
# ---------------------------------------------------------------------------

PENALTY_CSV_HEADER = "A,B,d_cq,d_cs,d_sq,best_energy"
READS_CSV_HEADER = "reads,best_energy,hit_ground,d_cq"
SIZE_CSV_HEADER = "instance_id,binary_variables,d_cq,d_cs,d_sq"


def write_penalty_csv(rows: list[PenaltySweepRow], path) -> None:
    lines = [PENALTY_CSV_HEADER]
    lines.extend(f"{r.A},{r.B},{r.d_cq!r},{r.d_cs!r},{r.d_sq!r},{r.best_energy}"
                 for r in rows)
    _write_lines(lines, path)


def write_reads_csv(rows: list[ReadsSweepRow], path) -> None:
    lines = [READS_CSV_HEADER]
    lines.extend(f"{r.reads},{r.best_energy},{str(r.hit_ground).lower()},{r.d_cq!r}"
                 for r in rows)
    _write_lines(lines, path)


def write_size_csv(rows: list[SizeSweepRow], path) -> None:
    lines = [SIZE_CSV_HEADER]
    lines.extend(
        f"{r.instance_id},{r.binary_variables},{r.d_cq!r},{r.d_cs!r},{r.d_sq!r}"
        for r in rows
    )
    _write_lines(lines, path)


def _write_lines(lines: list[str], path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_manifest(path, command: str, seed: int, parameters: dict,
                   outputs: list[str]) -> None:
    """Machine-readable record sufficient to re-run a sweep bit-identically.

    Contains the command, seed, full resolved parameters, produced files,
    and the versions of everything numerical. Deliberately carries no
    timestamps so identical runs produce identical manifests.
    """
    import numba
    import scipy

    manifest = {
        "tool": "knapanneal",
        "command": command,
        "seed": int(seed),
        "parameters": parameters,
        "outputs": sorted(outputs),
        "versions": {
            "knapanneal": _package_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "numba": numba.__version__,
        },
    }
    with open(path, "w", encoding="ascii", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _package_version() -> str:
    from importlib.metadata import PackageNotFoundError, version
    try:
        return version("knapanneal")
    except PackageNotFoundError:
        return "unknown"


def report_as_dict(report) -> dict:
    """Dataclass rows as plain dictionaries (JSON-friendly)."""
    return asdict(report)
