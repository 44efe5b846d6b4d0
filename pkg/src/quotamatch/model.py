"""Problem and solution data types shared by all solvers.

An instance pairs a population of agents, partitioned into types, with a
pool of items, partitioned into blocks.  Each (type, block) pair carries an
integer cap on how many agents of that type may receive items of that
block.  Agents and items are stored contiguously per group so that group
membership is a range lookup.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

import numpy as np


class QuotamatchError(Exception):
    """Base class for errors raised by this package."""


class InputError(QuotamatchError):
    """Malformed or out-of-range input data."""


class PreconditionError(QuotamatchError):
    """A solver was invoked on an instance outside its supported class."""


class BudgetExceededError(QuotamatchError):
    """An enumeration or time budget ran out before completion."""


class DegenerateInputError(QuotamatchError):
    """The requested quantity is undefined for this input (e.g. zero welfare)."""


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class QuotaProfile:
    """Fractional per-(type, block) quotas from which integer caps are derived.

    Under the ``floor`` rule the cap is the floor of quota times block size;
    under the ``exact`` rule the product must already be integral.
    """

    alphas: np.ndarray  # (k, l), each in (0, 1]
    rounding: str = "floor"

    def __post_init__(self) -> None:
        alphas = _as_readonly(np.asarray(self.alphas, dtype=float))
        if alphas.ndim != 2:
            raise InputError("quota matrix must be 2-dimensional")
        if np.any(alphas <= 0) or np.any(alphas > 1):
            raise InputError("quotas must lie in (0, 1]")
        if self.rounding not in ("floor", "exact"):
            raise InputError(f"unknown rounding rule {self.rounding!r}")
        object.__setattr__(self, "alphas", alphas)

    def capacities_for(self, block_sizes: Sequence[int]) -> np.ndarray:
        sizes = np.asarray(block_sizes, dtype=float)
        if sizes.shape != (self.alphas.shape[1],):
            raise InputError("block count does not match quota matrix width")
        product = self.alphas * sizes[None, :]
        if self.rounding == "exact":
            rounded = np.rint(product)
            if np.any(np.abs(product - rounded) > 1e-9):
                raise InputError("exact rounding requires integral quota * block size")
            return rounded.astype(np.int64)
        # small epsilon counters float noise in products like 0.29 * 100
        return np.floor(product + 1e-9).astype(np.int64)


@dataclass(frozen=True, eq=False)
class Instance:
    """An assignment problem with type-block caps.

    ``utilities`` is dense row-major (agents x items); ``capacities`` is the
    integer cap matrix, clamped to block sizes at construction (the clamp is
    recorded in ``cap_clamped``).
    """

    type_sizes: tuple[int, ...]
    block_sizes: tuple[int, ...]
    utilities: np.ndarray
    capacities: np.ndarray
    quotas: Optional[QuotaProfile] = None
    type_names: Optional[tuple[str, ...]] = None
    block_names: Optional[tuple[str, ...]] = None
    metadata: dict = field(default_factory=dict)
    cap_clamped: bool = field(default=False, init=False)
    cap_exceeds_type: bool = field(default=False, init=False)

    def __post_init__(self) -> None:
        type_sizes = tuple(int(s) for s in self.type_sizes)
        block_sizes = tuple(int(s) for s in self.block_sizes)
        if any(s < 0 for s in type_sizes) or any(s < 0 for s in block_sizes):
            raise InputError("group sizes must be nonnegative")
        n, m = sum(type_sizes), sum(block_sizes)
        k, l = len(type_sizes), len(block_sizes)
        utilities = np.asarray(self.utilities, dtype=float)
        if utilities.shape != (n, m):
            raise InputError(f"utility matrix must be {n}x{m}, got {utilities.shape}")
        if not np.all(np.isfinite(utilities)) or np.any(utilities < 0):
            raise InputError("utilities must be nonnegative and finite")
        caps = np.asarray(self.capacities, dtype=np.int64)
        if caps.shape != (k, l):
            raise InputError(f"capacity matrix must be {k}x{l}, got {caps.shape}")
        if np.any(caps < 0):
            raise InputError("capacities must be nonnegative")
        sizes = np.asarray(block_sizes, dtype=np.int64)
        clamped = np.minimum(caps, sizes[None, :])
        object.__setattr__(self, "cap_clamped", bool(np.any(clamped < caps)))
        tsz = np.asarray(type_sizes, dtype=np.int64)
        object.__setattr__(self, "cap_exceeds_type", bool(np.any(clamped > tsz[:, None])))
        object.__setattr__(self, "type_sizes", type_sizes)
        object.__setattr__(self, "block_sizes", block_sizes)
        object.__setattr__(self, "utilities", _as_readonly(utilities))
        object.__setattr__(self, "capacities", _as_readonly(clamped))
        if self.type_names is not None:
            object.__setattr__(self, "type_names", tuple(self.type_names))
        if self.block_names is not None:
            object.__setattr__(self, "block_names", tuple(self.block_names))
        object.__setattr__(self, "_type_of", _as_readonly(np.repeat(np.arange(k), type_sizes)))
        object.__setattr__(self, "_block_of", _as_readonly(np.repeat(np.arange(l), block_sizes)))

    @property
    def n(self) -> int:
        return sum(self.type_sizes)

    @property
    def m(self) -> int:
        return sum(self.block_sizes)

    @property
    def k(self) -> int:
        return len(self.type_sizes)

    @property
    def l(self) -> int:
        return len(self.block_sizes)

    @property
    def type_of(self) -> np.ndarray:
        """Agent index -> type index."""
        return self._type_of  # type: ignore[attr-defined]

    @property
    def block_of(self) -> np.ndarray:
        """Item index -> block index."""
        return self._block_of  # type: ignore[attr-defined]

    def type_range(self, p: int) -> range:
        start = sum(self.type_sizes[:p])
        return range(start, start + self.type_sizes[p])

    def block_range(self, q: int) -> range:
        start = sum(self.block_sizes[:q])
        return range(start, start + self.block_sizes[q])

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(repr(self.type_sizes).encode())
        h.update(repr(self.block_sizes).encode())
        h.update(self.capacities.tobytes())
        h.update(self.utilities.tobytes())
        return h.hexdigest()


@dataclass(frozen=True)
class Assignment:
    """A set of (agent, item) pairs, stored sorted.

    Duplicate agents or items are representable so that feasibility checking
    can report them; assignments produced by solvers are always matchings.
    """

    pairs: tuple[tuple[int, int], ...]

    def __init__(self, pairs: Iterable[tuple[int, int]]):
        canon = tuple(sorted((int(i), int(j)) for i, j in pairs))
        object.__setattr__(self, "pairs", canon)

    def __len__(self) -> int:
        return len(self.pairs)

    def content_hash(self) -> str:
        payload = ",".join(f"{i}:{j}" for i, j in self.pairs)
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass(frozen=True)
class Violation:
    family: str  # "agent" | "item" | "capacity"
    indices: tuple[int, ...]

    def describe(self) -> str:
        if self.family == "agent":
            return f"agent {self.indices[0]} assigned more than one item"
        if self.family == "item":
            return f"item {self.indices[0]} assigned to more than one agent"
        p, q = self.indices
        return f"type-block cap exceeded at (type {p}, block {q})"


@dataclass(frozen=True)
class FeasibilityResult:
    ok: bool
    violation: Optional[Violation] = None


def _check_indices(inst: Instance, asg: Assignment) -> None:
    for i, j in asg.pairs:
        if not (0 <= i < inst.n) or not (0 <= j < inst.m):
            raise InputError(f"pair ({i}, {j}) out of range for {inst.n}x{inst.m} instance")


def check_feasible(inst: Instance, asg: Assignment) -> FeasibilityResult:
    """Check matching and cap constraints; report the first violation.

    Scan order is fixed: agent multiplicities, item multiplicities, then
    (type, block) caps in lexicographic order.
    """
    _check_indices(inst, asg)
    agent_count = np.zeros(inst.n, dtype=np.int64)
    item_count = np.zeros(inst.m, dtype=np.int64)
    tb_count = np.zeros((inst.k, inst.l), dtype=np.int64)
    for i, j in asg.pairs:
        agent_count[i] += 1
        item_count[j] += 1
        tb_count[inst.type_of[i], inst.block_of[j]] += 1
    bad = np.flatnonzero(agent_count > 1)
    if bad.size:
        return FeasibilityResult(False, Violation("agent", (int(bad[0]),)))
    bad = np.flatnonzero(item_count > 1)
    if bad.size:
        return FeasibilityResult(False, Violation("item", (int(bad[0]),)))
    over = np.argwhere(tb_count > inst.capacities)
    if over.size:
        p, q = over[0]
        return FeasibilityResult(False, Violation("capacity", (int(p), int(q))))
    return FeasibilityResult(True)


def per_type_welfare(inst: Instance, asg: Assignment) -> np.ndarray:
    """Welfare earned by each type, summed in (agent, item) pair order."""
    _check_indices(inst, asg)
    out = np.zeros(inst.k, dtype=float)
    for i, j in asg.pairs:  # pairs are sorted, so addition order is fixed
        out[inst.type_of[i]] += inst.utilities[i, j]
    return out


def welfare(inst: Instance, asg: Assignment) -> float:
    """Total utility of the assignment.

    Defined as the sum of the per-type partial sums (in type order) so that
    it is bit-identical to ``per_type_welfare(...).sum()``.
    """
    parts = per_type_welfare(inst, asg)
    total = 0.0
    for p in range(inst.k):
        total += float(parts[p])
    return total


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def instance_to_json(inst: Instance) -> dict[str, Any]:
    tn = inst.type_names or tuple(f"type{p}" for p in range(inst.k))
    bn = inst.block_names or tuple(f"block{q}" for q in range(inst.l))
    doc: dict[str, Any] = {
        "types": [{"name": name, "size": size} for name, size in zip(tn, inst.type_sizes)],
        "blocks": [{"name": name, "size": size} for name, size in zip(bn, inst.block_sizes)],
        "capacities": {"lambda": inst.capacities.tolist()},
        "utilities": [float(v) for v in inst.utilities.reshape(-1)],
    }
    if inst.quotas is not None:
        doc["capacities"] = {
            "alpha": inst.quotas.alphas.tolist(),
            "rounding": inst.quotas.rounding,
        }
    if inst.metadata:
        doc["metadata"] = inst.metadata
    return doc


def instance_from_json(doc: dict[str, Any]) -> Instance:
    try:
        types = doc["types"]
        blocks = doc["blocks"]
        caps_spec = doc["capacities"]
        utilities = doc["utilities"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"instance document missing field: {exc}") from exc
    type_sizes = tuple(int(t["size"]) for t in types)
    block_sizes = tuple(int(b["size"]) for b in blocks)
    n, m = sum(type_sizes), sum(block_sizes)
    if isinstance(utilities, dict) and "sparse" in utilities:
        dense = np.zeros((n, m), dtype=float)
        for row in utilities["sparse"]:
            i, j, v = row
            if not (0 <= int(i) < n and 0 <= int(j) < m):
                raise InputError(f"sparse utility entry out of range: {row}")
            dense[int(i), int(j)] = float(v)
    else:
        flat = np.asarray(utilities, dtype=float)
        if flat.size != n * m:
            raise InputError(f"expected {n * m} utilities, got {flat.size}")
        dense = flat.reshape(n, m)
    quotas = None
    if "alpha" in caps_spec:
        quotas = QuotaProfile(np.asarray(caps_spec["alpha"], dtype=float),
                              caps_spec.get("rounding", "floor"))
        caps = quotas.capacities_for(block_sizes)
    elif "lambda" in caps_spec:
        caps = np.asarray(caps_spec["lambda"], dtype=np.int64)
    else:
        raise InputError("capacities must provide either 'lambda' or 'alpha'")
    return Instance(
        type_sizes=type_sizes,
        block_sizes=block_sizes,
        utilities=dense,
        capacities=caps,
        quotas=quotas,
        type_names=tuple(str(t["name"]) for t in types),
        block_names=tuple(str(b["name"]) for b in blocks),
        metadata=doc.get("metadata", {}),
    )


def load_instance(path: str) -> Instance:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read instance file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"instance file is not valid JSON: {exc}") from exc
    return instance_from_json(doc)


def save_instance(inst: Instance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_json(inst), fh)
        fh.write("\n")


def assignment_to_json(asg: Assignment) -> list[list[int]]:
    return [[i, j] for i, j in asg.pairs]


def assignment_from_json(doc: Any) -> Assignment:
    try:
        return Assignment((int(i), int(j)) for i, j in doc)
    except (TypeError, ValueError) as exc:
        raise InputError(f"assignment document must be a list of [agent, item] pairs: {exc}") from exc


def encode_extended(value: float) -> Any:
    """Render +inf as the string "inf" for JSON output."""
    if value is None:
        return None
    if math.isinf(value):
        return "inf"
    return value
