"""Small-scale simulation of adiabatic evolution for encoded problems.

The interpolated Hamiltonian is H(s) = (1-s)*H_i + s*H_f with s = t/T, where
H_i = -sum_k sigma_x^(k) is the transverse-field driver (ground state:
uniform superposition) and H_f is diagonal in the computational basis with
entries equal to the QUBO energies. Basis index k encodes the binary vector
with variable 0 as its most significant bit, matching the enumeration order
used elsewhere.

The module offers a spectral-gap scan over s (the minimum gap governs how
slowly one must anneal: required time grows like 1/gap^2) and direct
integration of i dpsi/dt = H(t/T) psi to measure the probability of ending
in the ground-state manifold of H_f. Integration is fixed-step RK4 without
renormalization, so the reported norm drift is an honest accuracy gauge.

The driver carries no 1/2 factor; that convention only rescales the time
axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import GapScanError, SizeLimitError, StepSizeError, ValidationError
from .qubo import QuboProblem, enumerate_energies

GAP_MAX_QUBITS = 20
EVOLVE_MAX_QUBITS = 16
DENSE_MAX_QUBITS = 12

# Gaps below this are reported as an exact degeneracy.
DEGENERACY_TOL = 1e-8

# Iterative eigensolver settings: absolute-ish tolerance and restart cap.
_EIGSH_TOL = 1e-11
_EIGSH_MAXITER = 20000

# evolve aborts when the norm has drifted this far; the quality contract for
# accepted runs is far tighter (1e-6) and is reported, not enforced.
_DRIFT_ABORT = 1e-3


@dataclass(frozen=True, eq=False)
class AnnealProblem:
    """A diagonal final Hamiltonian plus the fixed transverse-field driver.

    `energies` holds the 2^n diagonal entries (int64) of H_f in basis-index
    order. When built from a QUBO these are exactly the QUBO energies; the
    from_diagonal constructor admits arbitrary diagonals for analytic test
    cases below the minimum encodable knapsack dimension.
    """

    n_qubits: int
    energies: np.ndarray
    qubo: QuboProblem | None = None

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=np.int64)
        if e.shape != (1 << self.n_qubits,):
            raise ValidationError(
                f"diagonal must have 2^{self.n_qubits} entries, got shape {e.shape}"
            )
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)

    @classmethod
    def from_qubo(cls, qubo: QuboProblem) -> "AnnealProblem":
        n = qubo.dimension
        if n > GAP_MAX_QUBITS:
            raise SizeLimitError(
                f"simulation is limited to n <= {GAP_MAX_QUBITS} qubits (got {n})"
            )
        return cls(n_qubits=n, energies=enumerate_energies(qubo), qubo=qubo)

    @classmethod
    def from_diagonal(cls, diagonal) -> "AnnealProblem":
        e = np.asarray(diagonal)
        n = int(e.shape[0]).bit_length() - 1
        if e.shape[0] != 1 << n:
            raise ValidationError("diagonal length must be a power of two")
        return cls(n_qubits=n, energies=e.astype(np.int64))

    @property
    def dimension(self) -> int:
        return 1 << self.n_qubits

    def ground_indices(self) -> np.ndarray:
        """Basis indices of the exact ground-state manifold of H_f."""
        return np.flatnonzero(self.energies == self.energies.min())


@dataclass(frozen=True)
class GapProfile:
    """Spectral gap E_1(s) - E_0(s) over a schedule grid."""

    grid: np.ndarray
    gaps: np.ndarray
    min_gap: float
    argmin: float


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    anneal_time: float
    final_state: np.ndarray
    success_probability: float
    norm_drift: float


# ---------------------------------------------------------------------------
# Hamiltonian application
# ---------------------------------------------------------------------------

def apply_hamiltonian(problem: AnnealProblem, s: float, psi: np.ndarray) -> np.ndarray:
    """((1-s)*H_i + s*H_f) psi, matrix-free.

    H_f acts as elementwise scaling by the diagonal; each driver term
    -sigma_x^(k) acts as the negated bit-flip permutation on qubit k,
    realized by flipping one axis of the state viewed as a [2]*n array.
    """
    if not 0.0 <= s <= 1.0:
        raise ValidationError(f"s must lie in [0, 1], got {s}")
    psi = np.asarray(psi)
    dim = problem.dimension
    if psi.shape != (dim,):
        raise ValidationError(f"state must have dimension {dim}, got shape {psi.shape}")
    n = problem.n_qubits
    view = psi.reshape((2,) * n)
    hop = np.zeros_like(psi)
    for axis in range(n):
        hop += np.flip(view, axis=axis).reshape(dim)
    return s * (problem.energies * psi) - (1.0 - s) * hop


def dense_hamiltonian(problem: AnnealProblem, s: float) -> np.ndarray:
    """Explicit dense H(s), built independently of apply_hamiltonian.

    Verification oracle: constructs the driver from Kronecker products of
    2x2 Pauli blocks instead of bit flips. Guarded at small n.
    """
    n = problem.n_qubits
    if n > DENSE_MAX_QUBITS:
        raise SizeLimitError(f"dense construction is limited to n <= {DENSE_MAX_QUBITS}")
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    eye = np.eye(2)
    dim = problem.dimension
    driver = np.zeros((dim, dim))
    for k in range(n):
        term = np.ones((1, 1))
        for pos in range(n):
            term = np.kron(term, sx if pos == k else eye)
        driver -= term
    return (1.0 - s) * driver + s * np.diag(problem.energies.astype(np.float64))


# ---------------------------------------------------------------------------
# spectral gap scan
# ---------------------------------------------------------------------------

def _two_lowest(problem: AnnealProblem, s: float, rng: np.random.Generator) -> tuple[float, float]:
    dim = problem.dimension
    if s == 0.0:
        # driver spectrum is exactly {-n, -n+2, ..., n}
        return -float(problem.n_qubits), -float(problem.n_qubits) + 2.0
    if s == 1.0:
        # H(1) is diagonal: read the spectrum off the stored energies, which
        # also reports exact ground degeneracy (Lanczos cannot)
        two = np.partition(problem.energies, 1)[:2]
        return float(two[0]), float(two[1])
    if dim <= 16:
        basis = np.eye(dim)
        dense = np.column_stack([apply_hamiltonian(problem, s, basis[:, k])
                                 for k in range(dim)])
        vals = np.linalg.eigvalsh(dense)
        return float(vals[0]), float(vals[1])
    op = LinearOperator((dim, dim), matvec=lambda v: apply_hamiltonian(problem, s, v),
                        dtype=np.float64)
    v0 = rng.standard_normal(dim)
    try:
        vals = eigsh(op, k=2, which="SA", v0=v0, tol=_EIGSH_TOL,
                     maxiter=_EIGSH_MAXITER, return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        raise GapScanError(
            f"eigensolver did not converge within {_EIGSH_MAXITER} iterations "
            f"at s={s}"
        ) from exc
    vals = np.sort(vals)
    return float(vals[0]), float(vals[1])


def gap_scan(problem: AnnealProblem, grid_points: int = 101) -> GapProfile:
    """Gap between the two lowest eigenvalues on a uniform grid over [0, 1].

    Interior points use a Lanczos solver over the matrix-free apply with
    deterministic start vectors; the s=0 and s=1 endpoints use the exactly
    known driver and diagonal spectra (the diagonal endpoint is where ground
    degeneracy lives, which an iterative solver would miss). Gaps below the
    degeneracy tolerance are reported as exactly 0.
    """
    if problem.n_qubits > GAP_MAX_QUBITS:
        raise SizeLimitError(
            f"gap scan is limited to n <= {GAP_MAX_QUBITS} qubits (got {problem.n_qubits})"
        )
    if grid_points < 2:
        raise ValidationError("grid must have at least 2 points")
    # fixed-entropy stream makes repeated scans bit-identical
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(0x6A70)))
    grid = np.linspace(0.0, 1.0, grid_points)
    gaps = np.empty(grid_points)
    for i, s in enumerate(grid):
        e0, e1 = _two_lowest(problem, float(s), rng)
        gap = max(e1 - e0, 0.0)
        gaps[i] = 0.0 if gap < DEGENERACY_TOL else gap
    k = int(np.argmin(gaps))
    return GapProfile(grid=grid, gaps=gaps, min_gap=float(gaps[k]), argmin=float(grid[k]))


# ---------------------------------------------------------------------------
# time evolution
# ---------------------------------------------------------------------------

def initial_state(n_qubits: int) -> np.ndarray:
    """Uniform superposition: the driver's ground state."""
    dim = 1 << n_qubits
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)


@njit(cache=True)
def _deriv(out, psi, e_diag, s, n, dim):  # pragma: no cover
    c = 1.0 - s
    for k in range(dim):
        hop = 0.0 + 0.0j
        for b in range(n):
            hop += psi[k ^ (1 << b)]
        out[k] = -1j * (s * e_diag[k] * psi[k] - c * hop)


@njit(cache=True)
def _rk4_evolve(psi, e_diag, n, total_time, steps, abort_drift):  # pragma: no cover
    dim = psi.shape[0]
    h = total_time / steps
    k1 = np.empty(dim, np.complex128)
    k2 = np.empty(dim, np.complex128)
    k3 = np.empty(dim, np.complex128)
    k4 = np.empty(dim, np.complex128)
    tmp = np.empty(dim, np.complex128)
    max_drift = 0.0
    for m in range(steps):
        t = h * m
        _deriv(k1, psi, e_diag, t / total_time, n, dim)
        for k in range(dim):
            tmp[k] = psi[k] + 0.5 * h * k1[k]
        _deriv(k2, tmp, e_diag, (t + 0.5 * h) / total_time, n, dim)
        for k in range(dim):
            tmp[k] = psi[k] + 0.5 * h * k2[k]
        _deriv(k3, tmp, e_diag, (t + 0.5 * h) / total_time, n, dim)
        for k in range(dim):
            tmp[k] = psi[k] + h * k3[k]
        _deriv(k4, tmp, e_diag, (t + h) / total_time, n, dim)
        norm_sq = 0.0
        for k in range(dim):
            psi[k] = psi[k] + (h / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k])
            norm_sq += psi[k].real ** 2 + psi[k].imag ** 2
        drift = abs(1.0 - norm_sq)
        if drift > max_drift:
            max_drift = drift
        if drift > abort_drift:
            return max_drift, False
    return max_drift, True


def suggest_dt(problem: AnnealProblem, total_time: float,
               target_drift: float = 1e-7) -> float:
    """Step size keeping the estimated RK4 norm drift below target_drift.

    Per step the RK4 norm error for an eigenvalue of magnitude E is about
    (E*dt)^6/72, so total drift ~ T*E^6*dt^5/72 with E bounded by
    max(n, max|H_f diagonal|).
    """
    scale = max(float(problem.n_qubits), float(np.abs(problem.energies).max()))
    if scale == 0.0:
        return total_time / 16
    dt = (72.0 * target_drift / (max(total_time, 1e-12) * scale**6)) ** 0.2
    dt = min(dt, 0.5 / scale, total_time)
    return max(dt, total_time / 50_000_000)


def evolve(problem: AnnealProblem, total_time: float, dt: float | None = None) -> EvolutionResult:
    """Integrate the interpolated dynamics from the uniform superposition.

    Fixed-step RK4 on i dpsi/dt = H(t/T) psi, t from 0 to T. The state is
    never renormalized; norm_drift reports the worst |1 - ||psi||^2| seen,
    and the run aborts with StepSizeError if it exceeds 1e-3.
    success_probability sums |amplitude|^2 over the exact ground-state
    manifold of H_f.
    """
    n = problem.n_qubits
    if n > EVOLVE_MAX_QUBITS:
        raise SizeLimitError(
            f"time evolution is limited to n <= {EVOLVE_MAX_QUBITS} qubits (got {n})"
        )
    if not total_time > 0:
        raise ValidationError("anneal time T must be positive")
    if dt is None:
        dt = suggest_dt(problem, total_time)
    if not 0 < dt <= total_time:
        raise ValidationError("dt must satisfy 0 < dt <= T")
    steps = max(1, int(np.ceil(total_time / dt - 1e-12)))
    psi = initial_state(n)
    e_diag = problem.energies.astype(np.float64)
    max_drift, ok = _rk4_evolve(psi, e_diag, n, float(total_time), steps, _DRIFT_ABORT)
    if not ok:
        raise StepSizeError(
            f"norm drift exceeded {_DRIFT_ABORT} during evolution (T={total_time}, "
            f"dt={total_time / steps:.3g}); reduce dt"
        )
    ground = problem.ground_indices()
    success = float((np.abs(psi[ground]) ** 2).sum())
    return EvolutionResult(anneal_time=float(total_time), final_state=psi,
                           success_probability=success, norm_drift=float(max_drift))


def success_curve(problem: AnnealProblem, anneal_times, dt: float | None = None
                  ) -> list[EvolutionResult]:
    """evolve at each anneal time; input order is preserved.

    Each result pairs its anneal_time with the success probability (and the
    norm drift the CSV export reports).
    """
    return [evolve(problem, float(t_total), dt) for t_total in anneal_times]


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

def write_gap_csv(profile: GapProfile, path) -> None:
    """(s, gap) rows plus a trailing minimum-gap summary comment line."""
    lines = ["s,gap"]
    lines.extend(f"{float(s)!r},{float(g)!r}" for s, g in zip(profile.grid, profile.gaps))
    lines.append(f"# min_gap={profile.min_gap!r} at s={profile.argmin!r}")
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_success_csv(curve: list[EvolutionResult], path) -> None:
    lines = ["T,success_probability,norm_drift"]
    lines.extend(
        f"{res.anneal_time!r},{res.success_probability!r},{res.norm_drift!r}"
        for res in curve
    )
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
