"""Probabilistic and exhaustive QUBO solvers.

simulated_anneal runs independent Metropolis reads over a geometric or
linear inverse-temperature ramp; brute_force_qubo enumerates every binary
vector; random_sampler is the uncorrelated baseline. All samplers are pure
functions of (problem, parameters, seed): read i draws from substream (i,)
of the seed (see rng), so results are bit-identical across runs and
independent of read execution order, and read sets are prefix-stable under
growing num_reads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ValidationError
from .qubo import QuboProblem, energies, enumerate_energies, index_to_vector
from .rng import generator

# Reads are annealed in blocks to bound the pre-generated uniform buffer
# (block * sweeps * n float64 values live at once).
_READ_BLOCK = 128

DEFAULT_SWEEPS = 1000
DEFAULT_BETA_INITIAL = 0.01
DEFAULT_BETA_FINAL = 10.0


@dataclass(frozen=True)
class AnnealSchedule:
    """Inverse-temperature ramp for simulated annealing.

    beta is interpolated over `sweeps` points from beta_initial to
    beta_final, linearly or geometrically. Equal endpoints give a
    single-temperature Metropolis chain.
    """

    sweeps: int = DEFAULT_SWEEPS
    beta_initial: float = DEFAULT_BETA_INITIAL
    beta_final: float = DEFAULT_BETA_FINAL
    interpolation: str = "geometric"

    def __post_init__(self):
        if self.sweeps < 1:
            raise ValidationError("sweeps must be >= 1")
        if not self.beta_initial > 0:
            raise ValidationError("beta_initial must be positive")
        if self.beta_final < self.beta_initial:
            raise ValidationError("beta_final must be >= beta_initial")
        if self.interpolation not in ("linear", "geometric"):
            raise ValidationError("interpolation must be 'linear' or 'geometric'")

    def betas(self) -> np.ndarray:
        if self.interpolation == "linear":
            return np.linspace(self.beta_initial, self.beta_final, self.sweeps)
        return np.geomspace(self.beta_initial, self.beta_final, self.sweeps)


@dataclass(frozen=True)
class SampleRecord:
    z: tuple[int, ...]
    energy: int
    count: int


@dataclass(frozen=True)
class SampleSet:
    """Multiset of measured binary vectors from one multi-read run.

    Records are distinct vectors sorted by (energy, vector) ascending, so
    records[0] is the minimum-energy read with lexicographic tie-break, and
    counts sum to num_reads.
    """

    records: tuple[SampleRecord, ...]
    num_reads: int
    sampler_id: str
    seed: int

    def __post_init__(self):
        if self.num_reads < 1:
            raise ValidationError("num_reads must be >= 1")
        if sum(r.count for r in self.records) != self.num_reads:
            raise ValidationError("record counts must sum to num_reads")

    @property
    def best(self) -> SampleRecord:
        return self.records[0]


def _assemble(vectors: np.ndarray, energy_values: np.ndarray, sampler_id: str,
              seed: int) -> SampleSet:
    counts: dict[tuple[int, ...], int] = {}
    energy_of: dict[tuple[int, ...], int] = {}
    for row, e in zip(vectors, energy_values):
        key = tuple(int(x) for x in row)
        counts[key] = counts.get(key, 0) + 1
        energy_of[key] = int(e)
    records = tuple(
        SampleRecord(z=key, energy=energy_of[key], count=counts[key])
        for key in sorted(counts, key=lambda k: (energy_of[k], k))
    )
    return SampleSet(records=records, num_reads=len(vectors), sampler_id=sampler_id,
                     seed=int(seed))


@njit(cache=True)
def _anneal_block(z, q, lin, betas, uniforms, track_best, best_z, best_e):  # pragma: no cover
    reads, n = z.shape
    sweeps = betas.shape[0]
    for r in range(reads):
        zr = z[r]
        rowsum = np.zeros(n, np.int64)
        for j in range(n):
            acc = np.int64(0)
            for k in range(n):
                acc += q[j, k] * zr[k]
            rowsum[j] = acc
        cur = np.int64(0)
        if track_best:
            for j in range(n):
                cur += zr[j] * (rowsum[j] + lin[j])
            best_e[r] = cur
            for j in range(n):
                best_z[r, j] = zr[j]
        for t in range(sweeps):
            beta = betas[t]
            base = t * n
            for j in range(n):
                s = np.int64(1 - 2 * zr[j])
                d_e = q[j, j] + s * (2 * rowsum[j] + lin[j])
                if d_e <= 0 or uniforms[r, base + j] < np.exp(-beta * d_e):
                    zr[j] = 1 - zr[j]
                    for k in range(n):
                        rowsum[k] += s * q[k, j]
                    if track_best:
                        cur += d_e
                        if cur < best_e[r]:
                            best_e[r] = cur
                            for k in range(n):
                                best_z[r, k] = zr[k]


def simulated_anneal(qubo: QuboProblem, schedule: AnnealSchedule | None = None,
                     num_reads: int = 100, seed: int = 0,
                     record: str = "final") -> SampleSet:
    """Metropolis annealing: independent reads, sequential single-bit flips.

    Each read starts from a uniform-random vector drawn from its own
    substream, then performs `sweeps` full sweeps proposing flips in index
    order; a flip with energy change dE is accepted when dE <= 0, otherwise
    with probability exp(-beta*dE). One uniform variate is associated with
    every proposal position, so serial and blocked execution are
    bit-identical. dE comes from maintained row sums (O(n) per accepted
    flip); stored energies are re-evaluated from scratch on the final
    vectors.

    record="final" stores each read's final state (hardware-style read
    semantics); record="best" stores the best state seen during the read.
    """
    if schedule is None:
        schedule = AnnealSchedule()
    if record not in ("final", "best"):
        raise ValidationError("record must be 'final' or 'best'")
    if num_reads < 1:
        raise ValidationError("num_reads must be >= 1")
    n = qubo.dimension
    betas = schedule.betas()
    track_best = record == "best"
    out_blocks = []
    for start in range(0, num_reads, _READ_BLOCK):
        block = min(_READ_BLOCK, num_reads - start)
        z = np.empty((block, n), dtype=np.int64)
        uniforms = np.empty((block, schedule.sweeps * n), dtype=np.float64)
        for i in range(block):
            rng = generator(seed, start + i)
            z[i] = rng.integers(0, 2, size=n)
            uniforms[i] = rng.random(schedule.sweeps * n)
        best_z = np.zeros((block, n), dtype=np.int64)
        best_e = np.zeros(block, dtype=np.int64)
        _anneal_block(z, qubo.quadratic, qubo.linear, betas, uniforms,
                      track_best, best_z, best_e)
        out_blocks.append(best_z if track_best else z)
    vectors = np.concatenate(out_blocks, axis=0)
    return _assemble(vectors, energies(qubo, vectors), sampler_id=f"sa-{record}",
                     seed=seed)


def random_sampler(qubo: QuboProblem, num_reads: int = 100, seed: int = 0) -> SampleSet:
    """Uniform-random vectors with energies: the uncorrelated baseline."""
    if num_reads < 1:
        raise ValidationError("num_reads must be >= 1")
    n = qubo.dimension
    vectors = np.empty((num_reads, n), dtype=np.int64)
    for i in range(num_reads):
        vectors[i] = generator(seed, i).integers(0, 2, size=n)
    return _assemble(vectors, energies(qubo, vectors), sampler_id="random", seed=seed)


def brute_force_qubo(qubo: QuboProblem) -> tuple[int, list[tuple[int, ...]]]:
    """Exact minimum energy and the complete list of minimizers.

    Minimizers come back in ascending lexicographic order. Guarded by the
    enumeration limit (n <= 26).
    """
    all_energies = enumerate_energies(qubo)
    ground = int(all_energies.min())
    idxs = np.flatnonzero(all_energies == ground)
    n = qubo.dimension
    states = [tuple(int(b) for b in index_to_vector(int(i), n)) for i in idxs]
    return ground, states


# ---------------------------------------------------------------------------
# sample-set text export
# ---------------------------------------------------------------------------
#
#     sampleset <num_records>
#     sampler_id <token>
#     seed <int>
#     num_reads <int>
#     <z as 0/1 string> <energy> <count>     (one line per record)

def serialize_sampleset(samples: SampleSet) -> str:
    lines = [
        f"sampleset {len(samples.records)}",
        f"sampler_id {samples.sampler_id}",
        f"seed {samples.seed}",
        f"num_reads {samples.num_reads}",
    ]
    lines.extend(
        f"{''.join(str(b) for b in r.z)} {r.energy} {r.count}" for r in samples.records
    )
    return "\n".join(lines) + "\n"


def parse_sampleset(text: str) -> SampleSet:
    lines = text.splitlines()
    try:
        n_records = int(lines[0].split(" ")[1])
        sampler_id = lines[1].split(" ")[1]
        seed = int(lines[2].split(" ")[1])
        num_reads = int(lines[3].split(" ")[1])
        records = []
        for ln in lines[4:4 + n_records]:
            bits, e, c = ln.split(" ")
            records.append(SampleRecord(z=tuple(int(b) for b in bits), energy=int(e),
                                        count=int(c)))
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"malformed sampleset file: {exc}") from exc
    return SampleSet(records=tuple(records), num_reads=num_reads,
                     sampler_id=sampler_id, seed=seed)


def save_sampleset(samples: SampleSet, path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(serialize_sampleset(samples))


def load_sampleset(path) -> SampleSet:
    with open(path, "r", encoding="ascii") as fh:
        return parse_sampleset(fh.read())
