"""Penalty encoding of knapsack problems as QUBO, with exact energy evaluation.

The encoding appends a unary slack register y_1..y_W to the N item bits: the
combined variable vector is z = (x_1,...,x_N, y_1,...,y_W), and y_j = 1
declares that the knapsack carries total weight j. The Hamiltonian is

    H(z) = A*(1 - sum_j y_j)^2 + A*(sum_j j*y_j - sum_i w_i*x_i)^2
           - B * sum_i v_i*x_i

where the first penalty term forces exactly one slack bit, the second forces
the declared weight to match the selected items, and the value term rewards
high-value selections. With 0 < B*max(v_i) < A, any constraint violation
costs more than any value gain, so minimizers of H are exactly the optimal
feasible fillings (with their consistent slack bit).

Writing Wvec = (-w_1..-w_N, 1..W), lam = (0^N, 1^W), Vvec = (-v_1..-v_N, 0^W)
and expanding the squares gives the quadratic form actually stored here:

    H(z) = z^T [A*(Wvec Wvec^T + lam lam^T)] z + (-2A*lam + B*Vvec)^T z + A

The constant offset A is kept so that QUBO energies equal the penalty
Hamiltonian exactly, constants included; the quadratic matrix keeps its
explicit diagonal (binary z makes diagonal terms foldable into the linear
part, which the text export does).

All coefficients and energies are exact 64-bit integers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleEncodingWarning, SizeLimitError, ValidationError
from .knapsack import KnapsackInstance, KnapsackSolution

# Exhaustive QUBO enumeration guard (2^26 states).
ENUMERATION_MAX_VARIABLES = 26

# Keep |energy| below 2^62 so int64 arithmetic can never wrap.
_ENERGY_MAGNITUDE_LIMIT = 2**62


@dataclass(frozen=True)
class PenaltyConstants:
    """Constraint weight A and value weight B, both positive integers.

    The instance-dependent requirement 0 < B*max(v_i) < A is checked at
    encode time.
    """

    A: int
    B: int

    def __post_init__(self):
        object.__setattr__(self, "A", int(self.A))
        object.__setattr__(self, "B", int(self.B))
        if self.A < 1 or self.B < 1:
            raise ValidationError("penalty constants A and B must be positive integers")


@dataclass(frozen=True, eq=False)
class QuboProblem:
    """An integer QUBO z^T Q z + b^T z + c with knapsack decoding metadata.

    Q is symmetric with an explicit diagonal; arrays are frozen read-only.
    Variable ordering is (x_1..x_N, y_1..y_W), so dimension = N + W. The
    source instance rides along so binary vectors can be decoded back to
    knapsack answers.
    """

    quadratic: np.ndarray
    linear: np.ndarray
    offset: int
    n_items: int
    capacity: int
    penalties: PenaltyConstants
    instance: KnapsackInstance

    def __post_init__(self):
        q = np.asarray(self.quadratic, dtype=np.int64)
        b = np.asarray(self.linear, dtype=np.int64)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValidationError("quadratic matrix must be square")
        n = q.shape[0]
        if b.shape != (n,):
            raise ValidationError("linear vector length must match the quadratic matrix")
        if n != self.n_items + self.capacity:
            raise ValidationError(
                f"dimension {n} must equal n_items + capacity = "
                f"{self.n_items + self.capacity}"
            )
        if (self.instance.n_items, self.instance.capacity) != (self.n_items, self.capacity):
            raise ValidationError("decoding metadata does not match the source instance")
        if not np.array_equal(q, q.T):
            raise ValidationError("quadratic matrix must be symmetric")
        q.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "quadratic", q)
        object.__setattr__(self, "linear", b)
        object.__setattr__(self, "offset", int(self.offset))

    @property
    def dimension(self) -> int:
        return self.quadratic.shape[0]


@dataclass(frozen=True)
class DecodedSample:
    """A binary vector read back as a knapsack answer plus validity flags.

    slack_valid: exactly one slack bit is set. declared_weight: the index j
    of that bit (0 when slack_valid is false). weight_consistent: the item
    weight equals the declared weight.
    """

    knapsack: KnapsackSolution
    declared_weight: int
    slack_valid: bool
    weight_consistent: bool
    energy: int


# ---------------------------------------------------------------------------
# construction and evaluation
# ---------------------------------------------------------------------------

def build_vectors(instance: KnapsackInstance) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three (N+W)-vectors the quadratic form is assembled from.

    Wvec = (-w_1,...,-w_N, 1, 2,..., W); lam has N zeros then W ones;
    Vvec = (-v_1,...,-v_N, 0,...,0).
    """
    n, cap = instance.n_items, instance.capacity
    wvec = np.concatenate([
        -np.asarray(instance.weights, dtype=np.int64),
        np.arange(1, cap + 1, dtype=np.int64),
    ])
    lam = np.concatenate([np.zeros(n, dtype=np.int64), np.ones(cap, dtype=np.int64)])
    vvec = np.concatenate([
        -np.asarray(instance.values, dtype=np.int64),
        np.zeros(cap, dtype=np.int64),
    ])
    return wvec, lam, vvec


def evaluate_hamiltonian_direct(instance: KnapsackInstance, penalties: PenaltyConstants,
                                z) -> int:
    """Literal term-by-term evaluation of the penalty Hamiltonian.

    This is the reference implementation the quadratic form is verified
    against; it never touches QuboProblem.
    """
    z = _check_vector(z, instance.n_variables)
    n, cap = instance.n_items, instance.capacity
    x, y = z[:n], z[n:]
    slack_count = int(y.sum())
    declared = int(sum((j + 1) * int(y[j]) for j in range(cap)))
    item_weight = int(sum(w * int(xi) for w, xi in zip(instance.weights, x)))
    item_value = int(sum(v * int(xi) for v, xi in zip(instance.values, x)))
    a, b = penalties.A, penalties.B
    return a * (1 - slack_count) ** 2 + a * (declared - item_weight) ** 2 - b * item_value


def encode(instance: KnapsackInstance, penalties: PenaltyConstants) -> QuboProblem:
    """Build the QUBO form of the penalty Hamiltonian for this instance.

    Requires 0 < B*max(v_i) < A. If no single item fits the capacity the
    encoding has no zero-penalty configuration; an InfeasibleEncodingWarning
    is issued and the (still well-defined) encoding is returned.
    """
    a, b = penalties.A, penalties.B
    max_value = max(instance.values)
    if not b * max_value < a:
        raise ValidationError(
            f"penalty constants must satisfy 0 < B*max(value) < A "
            f"(got B*max(value) = {b * max_value} >= A = {a})"
        )
    _check_energy_budget(instance, penalties)
    if min(instance.weights) > instance.capacity:
        warnings.warn(
            f"instance {instance.id!r}: no single item fits the capacity, so the "
            f"encoding has no zero-penalty configuration and its ground state "
            f"violates a constraint",
            InfeasibleEncodingWarning,
            stacklevel=2,
        )
    wvec, lam, vvec = build_vectors(instance)
    quadratic = a * (np.outer(wvec, wvec) + np.outer(lam, lam))
    linear = -2 * a * lam + b * vvec
    return QuboProblem(
        quadratic=quadratic,
        linear=linear,
        offset=a,
        n_items=instance.n_items,
        capacity=instance.capacity,
        penalties=penalties,
        instance=instance,
    )


def _check_energy_budget(instance: KnapsackInstance, penalties: PenaltyConstants) -> None:
    cap = instance.capacity
    total_weight = sum(instance.weights)
    total_value = sum(instance.values)
    bound = (penalties.A * (1 + cap) ** 2
             + penalties.A * (cap * (cap + 1) // 2 + total_weight) ** 2
             + penalties.B * total_value)
    if bound >= _ENERGY_MAGNITUDE_LIMIT:
        raise ValidationError(
            "penalty constants are too large for exact 64-bit energies on this instance"
        )


def energy(qubo: QuboProblem, z) -> int:
    """z^T Q z + b^T z + c, exact integer arithmetic."""
    z = _check_vector(z, qubo.dimension)
    zi = z.astype(np.int64)
    return int(zi @ qubo.quadratic @ zi + qubo.linear @ zi + qubo.offset)


def energies(qubo: QuboProblem, vectors: np.ndarray) -> np.ndarray:
    """Energies of a (m, n) 0/1 matrix of row vectors, exact int64."""
    zm = np.asarray(vectors, dtype=np.int64)
    if zm.ndim != 2 or zm.shape[1] != qubo.dimension:
        raise ValidationError(
            f"expected an (m, {qubo.dimension}) matrix, got shape {zm.shape}"
        )
    qz = zm @ qubo.quadratic
    return np.einsum("ij,ij->i", qz, zm) + zm @ qubo.linear + qubo.offset


def decode(qubo: QuboProblem, z) -> DecodedSample:
    """Split z into item and slack bits and report validity diagnostics.

    The knapsack sub-solution uses only the first N coordinates.
    declared_weight is the slack register's claim j (0 when the register is
    invalid); weight_consistent compares the item weight against that claim.
    """
    z = _check_vector(z, qubo.dimension)
    n = qubo.n_items
    x, y = z[:n], z[n:]
    set_bits = np.flatnonzero(y)
    slack_valid = bool(set_bits.size == 1)
    declared = int(set_bits[0]) + 1 if slack_valid else 0
    sol = KnapsackSolution.from_selection(qubo.instance, x)
    return DecodedSample(
        knapsack=sol,
        declared_weight=declared,
        slack_valid=slack_valid,
        weight_consistent=sol.total_weight == declared,
        energy=energy(qubo, z),
    )


def penalty_regimes(instance: KnapsackInstance, B: int = 1) -> list[PenaltyConstants]:
    """The three standard constraint-weight regimes for a given B.

    A barely above B*max(v): A = B*max(v)+2; double: A = 2*B*max(v); and far
    above: A = 100*B*max(v). Each satisfies the encoding requirement.
    """
    if int(B) < 1:
        raise ValidationError("B must be >= 1")
    b = int(B)
    m = max(instance.values)
    return [
        PenaltyConstants(A=b * m + 2, B=b),
        PenaltyConstants(A=2 * b * m, B=b),
        PenaltyConstants(A=100 * b * m, B=b),
    ]


def _check_vector(z, n: int) -> np.ndarray:
    arr = np.asarray(z)
    if arr.shape != (n,):
        raise ValidationError(f"expected a binary vector of dimension {n}, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ValidationError("vector entries must be 0 or 1")
    return arr.astype(np.int64)


# ---------------------------------------------------------------------------
# exhaustive enumeration helpers
# ---------------------------------------------------------------------------

def index_to_vector(index: int, n: int) -> np.ndarray:
    """Basis index -> binary vector; variable 0 is the most significant bit,
    so ascending index order is ascending lexicographic order."""
    return (index >> (n - 1 - np.arange(n))) & 1


def vector_to_index(z) -> int:
    z = np.asarray(z)
    n = z.shape[0]
    return int((z.astype(np.int64) << (n - 1 - np.arange(n))).sum())


def all_vectors(n: int) -> np.ndarray:
    """(2^n, n) matrix of every binary vector, in lexicographic row order."""
    if n > 20:
        raise SizeLimitError(f"all_vectors is limited to n <= 20 (got {n})")
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> (n - 1 - np.arange(n))) & 1).astype(np.int8)


def enumerate_energies(qubo: QuboProblem) -> np.ndarray:
    """Energies of all 2^n vectors, indexed per index_to_vector, exact int64.

    Fills the table incrementally: turning variable j on atop a subset S
    adds Q_jj + b_j + 2*sum_{k in S} Q_jk. Guarded at n <= 26.
    """
    n = qubo.dimension
    if n > ENUMERATION_MAX_VARIABLES:
        raise SizeLimitError(
            f"exhaustive enumeration is limited to n <= {ENUMERATION_MAX_VARIABLES} (got {n})"
        )
    q, lin = qubo.quadratic, qubo.linear
    out = np.empty(1 << n, dtype=np.int64)
    out[0] = qubo.offset
    for bit in range(n):
        j = n - 1 - bit  # variable joining at this block
        span = 1 << bit
        # sum_{k in S} Q_jk over all subsets S of the variables already placed
        row_sums = np.zeros(span, dtype=np.int64)
        for prev_bit in range(bit):
            k = n - 1 - prev_bit
            sub = 1 << prev_bit
            row_sums[sub:2 * sub] = row_sums[:sub] + q[j, k]
        out[span:2 * span] = out[:span] + (q[j, j] + lin[j]) + 2 * row_sums
    return out


# ---------------------------------------------------------------------------
# canonical QUBO text export
# ---------------------------------------------------------------------------
#
#     qubo <dimension>
#     offset <int>
#     id <token>
#     capacity <int>
#     items <N>
#     <weight> <value>               (N lines; the decoding metadata)
#     penalty_a <int>
#     penalty_b <int>
#     linear <count>
#     <index> <coefficient>          (diagonal folded in; nonzero only)
#     quadratic <count>
#     <i> <j> <coefficient>          (i < j, upper triangle, nonzero only)
#
# Because z_i^2 = z_i for binary variables, the exported linear coefficient
# of index i is b_i + Q_ii and the pair coefficient of (i, j) is 2*Q_ij; the
# exported polynomial evaluates identically to the stored quadratic form.
# External QUBO tools can consume the dimension/offset/linear/quadratic
# sections and ignore the decoding metadata.

def serialize_qubo(qubo: QuboProblem) -> str:
    n = qubo.dimension
    folded = qubo.linear + np.diag(qubo.quadratic)
    lin_entries = [(i, int(folded[i])) for i in range(n) if folded[i] != 0]
    quad_entries = [
        (i, j, 2 * int(qubo.quadratic[i, j]))
        for i in range(n) for j in range(i + 1, n)
        if qubo.quadratic[i, j] != 0
    ]
    inst = qubo.instance
    lines = [
        f"qubo {n}",
        f"offset {qubo.offset}",
        f"id {inst.id}",
        f"capacity {qubo.capacity}",
        f"items {qubo.n_items}",
    ]
    lines.extend(f"{w} {v}" for w, v in zip(inst.weights, inst.values))
    lines.extend([
        f"penalty_a {qubo.penalties.A}",
        f"penalty_b {qubo.penalties.B}",
        f"linear {len(lin_entries)}",
    ])
    lines.extend(f"{i} {c}" for i, c in lin_entries)
    lines.append(f"quadratic {len(quad_entries)}")
    lines.extend(f"{i} {j} {c}" for i, j, c in quad_entries)
    return "\n".join(lines) + "\n"


def parse_qubo(text: str) -> QuboProblem:
    lines = text.splitlines()

    def _kv(pos: int, key: str) -> str:
        parts = lines[pos].split(" ")
        if len(parts) != 2 or parts[0] != key:
            raise ValidationError(f"expected '{key} <value>' line, got {lines[pos]!r}")
        return parts[1]

    try:
        n = int(_kv(0, "qubo"))
        offset = int(_kv(1, "offset"))
        ident = _kv(2, "id")
        capacity = int(_kv(3, "capacity"))
        n_items = int(_kv(4, "items"))
        weights, values = [], []
        pos = 5
        for _ in range(n_items):
            w, v = (int(t) for t in lines[pos].split(" "))
            weights.append(w)
            values.append(v)
            pos += 1
        pen_a = int(_kv(pos, "penalty_a"))
        pen_b = int(_kv(pos + 1, "penalty_b"))
        lin_count = int(_kv(pos + 2, "linear"))
        pos += 3
        linear = np.zeros(n, dtype=np.int64)
        quadratic = np.zeros((n, n), dtype=np.int64)
        for _ in range(lin_count):
            i, c = (int(t) for t in lines[pos].split(" "))
            linear[i] = c
            pos += 1
        quad_count = int(_kv(pos, "quadratic"))
        pos += 1
        for _ in range(quad_count):
            i, j, c = (int(t) for t in lines[pos].split(" "))
            if not i < j:
                raise ValidationError(f"quadratic entries must have i < j, got {i} {j}")
            if c % 2 != 0:
                raise ValidationError(
                    "pair coefficients must be even to be representable as an "
                    "integer symmetric matrix"
                )
            quadratic[i, j] = quadratic[j, i] = c // 2
            pos += 1
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed qubo file: {exc}") from exc
    instance = KnapsackInstance(id=ident, weights=tuple(weights), values=tuple(values),
                                capacity=capacity)
    return QuboProblem(
        quadratic=quadratic,
        linear=linear,
        offset=offset,
        n_items=n_items,
        capacity=capacity,
        penalties=PenaltyConstants(A=pen_a, B=pen_b),
        instance=instance,
    )


def save_qubo(qubo: QuboProblem, path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(serialize_qubo(qubo))


def load_qubo(path) -> QuboProblem:
    with open(path, "r", encoding="ascii") as fh:
        return parse_qubo(fh.read())
