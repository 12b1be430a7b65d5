"""0/1 knapsack instances, exact solvers, and deterministic instance generation.

An instance is N items with positive integer weights and values plus an
integer capacity W. All solvers maximize total value subject to the weight
limit and share one tie-break rule: among equal-value optima they return the
lexicographically smallest selection vector (prefer leaving an item out).
That makes cross-solver equality exactly testable.

All arithmetic is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import SizeLimitError, ValidationError
from .rng import generator

# Total binary-variable budget N + W for the unary slack encoding; instances
# beyond it cannot be represented on the 64-variable target this package
# models.
DEFAULT_VARIABLE_CAP = 64

# Subset enumeration guard for the exhaustive solver.
BRUTE_FORCE_MAX_ITEMS = 25

# Magnitude guard keeping every derived quantity (penalty-scaled energies
# included) comfortably inside signed 64-bit range.
MAX_ITEM_MAGNITUDE = 10**6

# Default generation ranges: weights 5..20, values 20..60.
DEFAULT_WEIGHT_RANGE = (5, 20)
DEFAULT_VALUE_RANGE = (20, 60)

CATALOG_SHAPES = (("A", 4, 11), ("B", 4, 20), ("C", 5, 26), ("D", 7, 50))


@dataclass(frozen=True)
class KnapsackInstance:
    """One 0/1 knapsack problem.

    `variable_cap` is the configurable hard cap on N + W (default 64). It is
    metadata, excluded from equality and serialization.
    """

    id: str
    weights: tuple[int, ...]
    values: tuple[int, ...]
    capacity: int
    variable_cap: int = field(default=DEFAULT_VARIABLE_CAP, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        object.__setattr__(self, "capacity", int(self.capacity))
        if not self.id or any(c.isspace() for c in self.id):
            raise ValidationError("instance id must be a nonempty token without whitespace")
        n = len(self.weights)
        if n < 1:
            raise ValidationError("instance must contain at least one item")
        if len(self.values) != n:
            raise ValidationError(
                f"weights and values must have identical length ({n} != {len(self.values)})"
            )
        if any(w < 1 for w in self.weights):
            raise ValidationError("every weight must be >= 1")
        if any(v < 1 for v in self.values):
            raise ValidationError("every value must be >= 1")
        if self.capacity < 1:
            raise ValidationError("capacity must be >= 1")
        if n + self.capacity > self.variable_cap:
            raise ValidationError(
                f"N + W = {n + self.capacity} exceeds the variable cap {self.variable_cap}"
            )
        if max(self.weights) > MAX_ITEM_MAGNITUDE or max(self.values) > MAX_ITEM_MAGNITUDE:
            raise ValidationError(f"weights and values must not exceed {MAX_ITEM_MAGNITUDE}")

    @property
    def n_items(self) -> int:
        return len(self.weights)

    @property
    def n_variables(self) -> int:
        """Binary variables needed by the unary slack encoding: N + W."""
        return self.n_items + self.capacity


@dataclass(frozen=True)
class KnapsackSolution:
    """A selection vector with its recomputable totals and feasibility flag."""

    selection: tuple[int, ...]
    total_weight: int
    total_value: int
    feasible: bool

    @classmethod
    def from_selection(cls, instance: KnapsackInstance, selection) -> "KnapsackSolution":
        sel = tuple(int(x) for x in selection)
        if len(sel) != instance.n_items:
            raise ValidationError(
                f"selection has length {len(sel)}, expected {instance.n_items}"
            )
        if any(x not in (0, 1) for x in sel):
            raise ValidationError("selection entries must be 0 or 1")
        tw = sum(w * x for w, x in zip(instance.weights, sel))
        tv = sum(v * x for v, x in zip(instance.values, sel))
        return cls(selection=sel, total_weight=tw, total_value=tv,
                   feasible=tw <= instance.capacity)


@dataclass(frozen=True)
class GeneratorParams:
    """Parameters for uniform random instance generation.

    capacity_rule is either an explicit capacity or "auto", which picks the
    largest W with N + W <= variable_cap.
    """

    n_items: int
    weight_range: tuple[int, int] = DEFAULT_WEIGHT_RANGE
    value_range: tuple[int, int] = DEFAULT_VALUE_RANGE
    capacity_rule: int | str = "auto"
    seed: int = 0
    variable_cap: int = DEFAULT_VARIABLE_CAP

    def __post_init__(self):
        if self.n_items < 1:
            raise ValidationError("n_items must be >= 1")
        for name, (lo, hi) in (("weight_range", self.weight_range),
                               ("value_range", self.value_range)):
            if lo < 1:
                raise ValidationError(f"{name} lower bound must be >= 1")
            if hi < lo:
                raise ValidationError(f"{name} is empty ({lo} > {hi})")
        if isinstance(self.capacity_rule, str) and self.capacity_rule != "auto":
            raise ValidationError("capacity_rule must be an integer or 'auto'")
        if not isinstance(self.capacity_rule, str) and int(self.capacity_rule) < 1:
            raise ValidationError("explicit capacity must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must fit in 64 unsigned bits")


# ---------------------------------------------------------------------------
# exact solvers
# ---------------------------------------------------------------------------

def solve_dp(instance: KnapsackInstance) -> KnapsackSolution:
    """Exact solve by the O(N*W) table over capacities 0..W.

    Builds suffix-optimal values and reconstructs greedily, preferring to
    leave each item out whenever the remaining items can still reach the
    optimum; that yields the lexicographically smallest optimal selection.
    """
    w, v, cap = instance.weights, instance.values, instance.capacity
    n = instance.n_items
    # suf[i][c] = best value using items i..n-1 under capacity c
    suf = [[0] * (cap + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, nxt = suf[i], suf[i + 1]
        wi, vi = w[i], v[i]
        for c in range(cap + 1):
            best = nxt[c]
            if wi <= c:
                cand = vi + nxt[c - wi]
                if cand > best:
                    best = cand
            row[c] = best
    need, c = suf[0][cap], cap
    selection = []
    for i in range(n):
        if suf[i + 1][c] >= need:
            selection.append(0)
        else:
            selection.append(1)
            c -= w[i]
            need -= v[i]
    return KnapsackSolution.from_selection(instance, selection)


def _bb_max_value(weights: list[int], values: list[int], capacity: int) -> int:
    """Best achievable value via depth-first branch and bound.

    Items are explored in value-density order, include-branch first; nodes
    are pruned when the fractional-relaxation upper bound (floored, exact
    integer arithmetic) cannot beat the incumbent.
    """
    n = len(weights)
    # exact density comparison; a float sort could mis-order near-ties and
    # invalidate the bound
    order = sorted(range(n), key=lambda i: (Fraction(-values[i], weights[i]), i))
    ws = [weights[i] for i in order]
    vs = [values[i] for i in order]
    best = 0

    def bound(i: int, cap_left: int, val: int) -> int:
        # integer floor of the fractional-relaxation bound
        b = val
        while i < n and ws[i] <= cap_left:
            b += vs[i]
            cap_left -= ws[i]
            i += 1
        if i < n:
            b += (cap_left * vs[i]) // ws[i]
        return b

    # iterative DFS: (index, cap_left, value), include-branch pushed last so
    # it is expanded first
    stack = [(0, capacity, 0)]
    while stack:
        i, cap_left, val = stack.pop()
        if val > best:
            best = val
        if i == n or bound(i, cap_left, val) <= best:
            continue
        stack.append((i + 1, cap_left, val))
        if ws[i] <= cap_left:
            stack.append((i + 1, cap_left - ws[i], val + vs[i]))
    return best


def solve_branch_bound(instance: KnapsackInstance) -> KnapsackSolution:
    """Exact solve by branch and bound with the fractional upper bound.

    Same contract as solve_dp: identical optimal value and the
    lexicographically smallest optimal selection. The selection is fixed one
    item at a time, keeping an item out exactly when the branch-and-bound
    optimum of the remaining suffix still reaches the target value.
    """
    w, v = list(instance.weights), list(instance.values)
    n = instance.n_items
    opt = _bb_max_value(w, v, instance.capacity)
    selection = []
    cap_left, need = instance.capacity, opt
    for i in range(n):
        if need == 0:
            selection.extend([0] * (n - i))
            break
        rest = _bb_max_value(w[i + 1:], v[i + 1:], cap_left) if i + 1 < n else 0
        if rest >= need:
            selection.append(0)
        else:
            selection.append(1)
            cap_left -= w[i]
            need -= v[i]
    return KnapsackSolution.from_selection(instance, selection)


def _subset_totals(quantities: tuple[int, ...]) -> np.ndarray:
    """Totals of quantity over every item subset, indexed so that the integer
    mask order equals lexicographic order of the selection vector (item 0 is
    the most significant bit)."""
    n = len(quantities)
    totals = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        item = n - 1 - b
        span = 1 << b
        totals[span:2 * span] = totals[:span] + quantities[item]
    return totals


def brute_force_knapsack(instance: KnapsackInstance) -> KnapsackSolution:
    """Exhaustive solve over all 2^N subsets (guarded at N <= 25).

    The independent oracle for the other solvers; shares their tie-break.
    """
    n = instance.n_items
    if n > BRUTE_FORCE_MAX_ITEMS:
        raise SizeLimitError(
            f"exhaustive enumeration is limited to N <= {BRUTE_FORCE_MAX_ITEMS} (got {n})"
        )
    tw = _subset_totals(instance.weights)
    tv = _subset_totals(instance.values)
    feasible = tw <= instance.capacity
    best = int(tv[feasible].max())
    # first mask attaining the optimum = lexicographically smallest selection
    mask = int(np.flatnonzero(feasible & (tv == best))[0])
    selection = [(mask >> (n - 1 - i)) & 1 for i in range(n)]
    return KnapsackSolution.from_selection(instance, selection)


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------

def generate_random(params: GeneratorParams) -> KnapsackInstance:
    """Draw an instance uniformly from the configured integer intervals.

    Deterministic for a fixed seed. Guarantees min(weights) <= W (so at least
    one item fits) by redrawing the whole weight vector when the draw leaves
    no item fitting; ranges that make this impossible are rejected.
    """
    n = params.n_items
    if isinstance(params.capacity_rule, str):
        capacity = params.variable_cap - n
        if capacity < 1:
            raise ValidationError(
                f"auto capacity is {capacity} for n_items={n}; cannot satisfy N + W <= "
                f"{params.variable_cap}"
            )
    else:
        capacity = int(params.capacity_rule)
        if n + capacity > params.variable_cap:
            raise ValidationError(
                f"N + W = {n + capacity} exceeds the variable cap {params.variable_cap}"
            )
    wlo, whi = params.weight_range
    vlo, vhi = params.value_range
    if wlo > capacity:
        raise ValidationError(
            f"no item can ever fit: weight lower bound {wlo} exceeds capacity {capacity}"
        )
    rng = generator(params.seed)
    weights = rng.integers(wlo, whi + 1, size=n)
    for _ in range(1000):
        if weights.min() <= capacity:
            break
        weights = rng.integers(wlo, whi + 1, size=n)
    else:
        raise ValidationError("could not draw a weight vector with at least one fitting item")
    values = rng.integers(vlo, vhi + 1, size=n)
    return KnapsackInstance(
        id=f"rnd-n{n}-s{params.seed}",
        weights=tuple(int(x) for x in weights),
        values=tuple(int(x) for x in values),
        capacity=capacity,
        variable_cap=params.variable_cap,
    )


def catalog_instances(seed: int) -> list[KnapsackInstance]:
    """Four benchmark instances with shapes (N, W) = (4,11), (4,20), (5,26), (7,50).

    The shapes give binary-variable counts {15, 24, 31, 57}. Weights and
    values are seeded stand-ins drawn from the standard generation ranges,
    clipped so every instance admits a nonempty optimal solution.
    """
    out = []
    for k, (name, n, cap) in enumerate(CATALOG_SHAPES):
        rng = generator(seed, k)
        wlo, whi = DEFAULT_WEIGHT_RANGE
        whi = min(whi, cap)  # every item fits on its own
        vlo, vhi = DEFAULT_VALUE_RANGE
        weights = tuple(int(x) for x in rng.integers(wlo, whi + 1, size=n))
        values = tuple(int(x) for x in rng.integers(vlo, vhi + 1, size=n))
        out.append(KnapsackInstance(id=name, weights=weights, values=values, capacity=cap))
    return out


# ---------------------------------------------------------------------------
# canonical instance files
# ---------------------------------------------------------------------------
#
# One instance per file:
#
#     id <token>
#     capacity <int>
#     items <N>
#     <weight_1> <value_1>
#     ...
#     <weight_N> <value_N>
#
# Single spaces, "\n" line endings, no trailing whitespace: serialization is
# canonical, so files round-trip byte-identically.

def serialize_instance(instance: KnapsackInstance) -> str:
    lines = [
        f"id {instance.id}",
        f"capacity {instance.capacity}",
        f"items {instance.n_items}",
    ]
    lines.extend(f"{w} {v}" for w, v in zip(instance.weights, instance.values))
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> KnapsackInstance:
    lines = [ln for ln in text.splitlines()]
    if len(lines) < 4:
        raise ValidationError("instance file must have id, capacity, items and item lines")

    def _field(line: str, key: str) -> str:
        parts = line.split(" ")
        if len(parts) != 2 or parts[0] != key:
            raise ValidationError(f"expected '{key} <value>' line, got {line!r}")
        return parts[1]

    ident = _field(lines[0], "id")
    try:
        capacity = int(_field(lines[1], "capacity"))
        n = int(_field(lines[2], "items"))
    except ValueError as exc:
        raise ValidationError(f"malformed integer in instance header: {exc}") from exc
    body = lines[3:]
    if len(body) != n:
        raise ValidationError(f"expected {n} item lines, found {len(body)}")
    weights, values = [], []
    for ln in body:
        parts = ln.split(" ")
        if len(parts) != 2:
            raise ValidationError(f"item line must be '<weight> <value>', got {ln!r}")
        try:
            weights.append(int(parts[0]))
            values.append(int(parts[1]))
        except ValueError as exc:
            raise ValidationError(f"malformed item line {ln!r}") from exc
    return KnapsackInstance(id=ident, weights=tuple(weights), values=tuple(values),
                            capacity=capacity)


def save_instance(instance: KnapsackInstance, path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(serialize_instance(instance))


def load_instance(path) -> KnapsackInstance:
    with open(path, "r", encoding="ascii") as fh:
        return parse_instance(fh.read())
