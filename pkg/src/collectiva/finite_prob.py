"""Finite probability spaces with explicit event algebras.

Events are bitmasks over a fixed atom ordering, so unions/intersections/
complements are single integer operations and algebra membership is a set
lookup.  Weights are assigned to *events of the algebra*, not to atoms:
an atom whose singleton is missing from the algebra has no probability at
all, and asking for one raises ``NotMeasurableError`` rather than
returning 0.

Arithmetic is dual-mode: build everything from ``fractions.Fraction`` (or
ints) and all identities are checked exactly; use floats and comparisons
fall back to an absolute tolerance of 1e-12.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import CapacityError, InputError, NotMeasurableError, NullConditioningError

FLOAT_TOL = 1e-12
ALGEBRA_CAP = 1 << 20

Value = Fraction | int | float


def is_exact(*values) -> bool:
    """True when no float is involved, i.e. comparisons may demand equality."""
    return not any(isinstance(v, float) for v in values)


def values_equal(a, b, exact: bool | None = None) -> bool:
    if exact is None:
        exact = is_exact(a, b)
    if exact:
        return a == b
    return abs(a - b) <= FLOAT_TOL


@dataclass(frozen=True)
class SampleSpace:
    atoms: tuple

    def __post_init__(self):
        if len(self.atoms) == 0:
            raise InputError("sample space needs at least one atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise InputError("atom identifiers must be pairwise distinct")
        object.__setattr__(self, "atoms", tuple(self.atoms))

    @property
    def size(self) -> int:
        return len(self.atoms)

    def index(self, atom) -> int:
        try:
            return self.atoms.index(atom)
        except ValueError:
            raise InputError(f"unknown atom {atom!r}") from None

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1


@dataclass(frozen=True)
class Event:
    """A subset of a SampleSpace, stored as a bitmask over the atom order."""

    space: SampleSpace
    mask: int

    def __post_init__(self):
        if not 0 <= self.mask <= self.space.full_mask:
            raise InputError("event mask outside the sample space")

    @classmethod
    def from_atoms(cls, space: SampleSpace, members: Iterable) -> "Event":
        mask = 0
        for atom in members:
            mask |= 1 << space.index(atom)
        return cls(space, mask)

    def atoms(self) -> tuple:
        return tuple(a for i, a in enumerate(self.space.atoms) if self.mask >> i & 1)

    def __contains__(self, atom) -> bool:
        return bool(self.mask >> self.space.index(atom) & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def _check_same_space(self, other: "Event"):
        if self.space is not other.space and self.space != other.space:
            raise InputError("events live on different sample spaces")

    def union(self, other: "Event") -> "Event":
        self._check_same_space(other)
        return Event(self.space, self.mask | other.mask)

    def intersection(self, other: "Event") -> "Event":
        self._check_same_space(other)
        return Event(self.space, self.mask & other.mask)

    def complement(self) -> "Event":
        return Event(self.space, self.mask ^ self.space.full_mask)

    def isdisjoint(self, other: "Event") -> bool:
        return (self.mask & other.mask) == 0

    __or__ = union
    __and__ = intersection
    __invert__ = complement


@dataclass(frozen=True)
class EventAlgebra:
    space: SampleSpace
    masks: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        masks = frozenset(self.masks)
        object.__setattr__(self, "masks", masks)
        if 0 not in masks or self.space.full_mask not in masks:
            raise InputError("algebra must contain the empty event and the full space")

    def __contains__(self, event: Event) -> bool:
        return event.mask in self.masks

    def __len__(self) -> int:
        return len(self.masks)

    def events(self) -> list[Event]:
        return [Event(self.space, m) for m in sorted(self.masks)]

    def is_closed(self) -> bool:
        """Exhaustive closure check: complements and pairwise unions/intersections."""
        ms = self.masks
        full = self.space.full_mask
        if any(m ^ full not in ms for m in ms):
            return False
        for a in ms:
            for b in ms:
                if (a | b) not in ms or (a & b) not in ms:
                    return False
        return True

    def blocks(self) -> list[int]:
        """Minimal nonempty events (the partition the algebra is built from)."""
        out = []
        seen = 0
        for i in range(self.space.size):
            if seen >> i & 1:
                continue
            blk = self.space.full_mask
            bit = 1 << i
            for m in self.masks:
                if m & bit:
                    blk &= m
            out.append(blk)
            seen |= blk
        return out


def _union_sums(blocks: Sequence[int], weight: Mapping[int, Value], exact: bool) -> dict:
    """Weight of every disjoint union of blocks, one addition per union
    (doubling over the block lattice instead of re-summing per event)."""
    acc = {0: Fraction(0) if exact else 0.0}
    for blk in blocks:
        wb = weight[blk]
        for m, v in list(acc.items()):
            acc[m | blk] = v + wb
    return acc


def build_algebra(space: SampleSpace, generators: Sequence[Event]) -> EventAlgebra:
    """Smallest set algebra containing the generators (and the trivial events).

    Atoms sharing the same membership signature across all generators can
    never be separated, so the algebra is exactly the set of unions of
    signature blocks.  Capped at 2^20 events.
    """
    for g in generators:
        if g.space != space:
            raise InputError("generator references an unknown atom / foreign space")
    sig_to_mask: dict[tuple, int] = {}
    for i in range(space.size):
        sig = tuple(g.mask >> i & 1 for g in generators)
        sig_to_mask[sig] = sig_to_mask.get(sig, 0) | (1 << i)
    blocks = list(sig_to_mask.values())
    if 1 << len(blocks) > ALGEBRA_CAP:
        raise CapacityError(
            f"algebra would have 2^{len(blocks)} events (cap {ALGEBRA_CAP})"
        )
    masks = set()
    for combo in range(1 << len(blocks)):
        m = 0
        for j, blk in enumerate(blocks):
            if combo >> j & 1:
                m |= blk
        masks.add(m)
    return EventAlgebra(space, frozenset(masks))


@dataclass(frozen=True)
class FiniteProbabilitySpace:
    """(sample space, event algebra, normalized additive weight) triple."""

    algebra: EventAlgebra
    weight: Mapping[int, Value]  # event mask -> value

    def __post_init__(self):
        w = dict(self.weight)
        object.__setattr__(self, "weight", w)
        alg = self.algebra
        if set(w) != alg.masks:
            raise InputError("weight map must cover exactly the algebra's events")
        exact = is_exact(*w.values())
        one = Fraction(1) if exact else 1.0
        if not values_equal(w[alg.space.full_mask], one, exact):
            raise InputError("weight of the full space must be 1")
        if not values_equal(w[0], 0 * one, exact):
            raise InputError("weight of the empty event must be 0")
        for m, v in w.items():
            if v < 0 or v > 1:
                if exact or not (-FLOAT_TOL <= v <= 1 + FLOAT_TOL):
                    raise InputError(f"weight {v} outside [0,1]")
        # additivity: every event must weigh the sum of its minimal blocks
        for blk_sum, m in self._block_sums():
            if not values_equal(blk_sum, w[m], exact):
                raise InputError(
                    f"additivity violated on event mask {m:b}: "
                    f"{w[m]} != sum of blocks {blk_sum}"
                )

    def _block_sums(self):
        acc = _union_sums(self.algebra.blocks(), self.weight, self.exact)
        for m in self.algebra.masks:
            if m in acc:
                yield acc[m], m
            else:  # mask is not a disjoint union of blocks; sum what meets it
                yield sum(self.weight[b] for b in self.algebra.blocks() if b & m) or 0, m

    @property
    def space(self) -> SampleSpace:
        return self.algebra.space

    @property
    def exact(self) -> bool:
        return is_exact(*self.weight.values())

    @classmethod
    def from_block_weights(
        cls, algebra: EventAlgebra, block_weight: Mapping[int, Value]
    ) -> "FiniteProbabilitySpace":
        """Fill the whole algebra from weights on its minimal blocks."""
        blocks = algebra.blocks()
        if set(block_weight) != set(blocks):
            raise InputError("need a weight for each minimal block exactly")
        acc = _union_sums(blocks, block_weight, is_exact(*block_weight.values()))
        w = {m: acc[m] for m in algebra.masks if m in acc}
        for m in algebra.masks:  # masks that are not unions of blocks
            if m not in w:
                parts = [block_weight[b] for b in blocks if b & m]
                w[m] = sum(parts) if parts else acc[0]
        return cls(algebra, w)

    @classmethod
    def from_atom_weights(
        cls, space: SampleSpace, atom_weight: Mapping
    ) -> "FiniteProbabilitySpace":
        """Power-set space with per-atom weights (every event measurable)."""
        if set(atom_weight) != set(space.atoms):
            raise InputError("need a weight for every atom")
        alg = build_algebra(space, [Event(space, 1 << i) for i in range(space.size)])
        return cls.from_block_weights(
            alg, {1 << i: atom_weight[a] for i, a in enumerate(space.atoms)}
        )

    @classmethod
    def uniform(cls, space: SampleSpace) -> "FiniteProbabilitySpace":
        p = Fraction(1, space.size)
        return cls.from_atom_weights(space, {a: p for a in space.atoms})


@dataclass(frozen=True)
class RandomVariable:
    """Total map atom -> value over a SampleSpace."""

    space: SampleSpace
    values: Mapping

    def __post_init__(self):
        vals = dict(self.values)
        object.__setattr__(self, "values", vals)
        if set(vals) != set(self.space.atoms):
            raise InputError("variable must assign a value to every atom")

    def __call__(self, atom):
        return self.values[atom]

    def range(self) -> list:
        return sorted(set(self.values.values()))

    def preimage(self, value) -> Event:
        return Event.from_atoms(
            self.space, (a for a in self.space.atoms if self.values[a] == value)
        )


@dataclass(frozen=True)
class Partition:
    """Pairwise-disjoint positive-probability events covering the space."""

    blocks: tuple[Event, ...]

    def validate(self, ps: FiniteProbabilitySpace):
        union = 0
        for i, b in enumerate(self.blocks):
            if b not in ps.algebra:
                raise NotMeasurableError(f"partition block {i} not measurable")
            if union & b.mask:
                raise InputError(f"partition blocks overlap at block {i}")
            union |= b.mask
            if not probability(ps, b) > 0:
                raise InputError(f"partition block {i} has zero probability")
        if union != ps.space.full_mask:
            raise InputError("partition does not cover the sample space")


def probability(ps: FiniteProbabilitySpace, event: Event) -> Value:
    if event.space != ps.space:
        raise InputError("event belongs to a different sample space")
    if event not in ps.algebra:
        raise NotMeasurableError(
            f"event not measurable: {set(event.atoms())!r} is outside the algebra"
        )
    return ps.weight[event.mask]


def is_measurable(ps: FiniteProbabilitySpace, a: RandomVariable) -> bool:
    if a.space != ps.space:
        raise InputError("variable defined on a different sample space")
    return all(a.preimage(v) in ps.algebra for v in a.range())


def distribution(ps: FiniteProbabilitySpace, a: RandomVariable) -> dict:
    """pmf of a measurable variable: value -> probability of its preimage."""
    if not is_measurable(ps, a):
        raise NotMeasurableError("variable is not measurable in this algebra")
    return {v: probability(ps, a.preimage(v)) for v in a.range()}


def expectation(ps: FiniteProbabilitySpace, a: RandomVariable) -> Value:
    pmf = distribution(ps, a)
    return sum(v * p for v, p in pmf.items())


def conditional(ps: FiniteProbabilitySpace, b: Event, c: Event) -> Value:
    """P(B | C) by the Bayes quotient; both events must be measurable."""
    pc = probability(ps, c)
    if not pc > 0:
        raise NullConditioningError("conditioning on null event")
    return probability(ps, b & c) / pc


def conditional_space(ps: FiniteProbabilitySpace, c: Event) -> FiniteProbabilitySpace:
    """The measure B -> P(B|C) on the same algebra (itself a valid space)."""
    pc = probability(ps, c)
    if not pc > 0:
        raise NullConditioningError("conditioning on null event")
    w = {m: ps.weight[m & c.mask] / pc for m in ps.algebra.masks}
    return FiniteProbabilitySpace(ps.algebra, w)


def independent(ps: FiniteProbabilitySpace, a: Event, b: Event) -> bool:
    pab = probability(ps, a & b)
    return values_equal(pab, probability(ps, a) * probability(ps, b), ps.exact)


def total_probability(
    ps: FiniteProbabilitySpace, partition: Partition, b: Event
) -> tuple[Value, list[tuple[Value, Value]]]:
    """Sum of P(A_k) * P(B|A_k); returned with the per-block factor pairs.

    Asserts agreement with the direct probability of B (exact in rational
    mode), which is the point of the identity.
    """
    partition.validate(ps)
    terms = []
    total = None
    for blk in partition.blocks:
        pk = probability(ps, blk)
        cond = conditional(ps, b, blk)
        terms.append((pk, cond))
        total = pk * cond if total is None else total + pk * cond
    direct = probability(ps, b)
    if not values_equal(total, direct, ps.exact):
        raise AssertionError(f"total-probability identity failed: {total} != {direct}")
    return total, terms


def partition_from_rv(ps: FiniteProbabilitySpace, a: RandomVariable) -> Partition:
    """Partition into the variable's preimages (each must have mass > 0)."""
    pmf = distribution(ps, a)
    for v, p in pmf.items():
        if not p > 0:
            raise InputError(f"value {v!r} has probability 0; not a valid partition")
    return Partition(tuple(a.preimage(v) for v in a.range()))


# --- JSON round-trip -------------------------------------------------------

def _value_to_json(v: Value):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return v


def _value_from_json(v) -> Value:
    if isinstance(v, str):
        num, _, den = v.partition("/")
        return Fraction(int(num), int(den or "1"))
    return v


def space_to_document(
    ps: FiniteProbabilitySpace, variables: Mapping[str, RandomVariable] | None = None
) -> dict:
    atoms = list(ps.space.atoms)
    masks = sorted(ps.algebra.masks)
    events = [[i for i in range(len(atoms)) if m >> i & 1] for m in masks]
    weights = {str(j): _value_to_json(ps.weight[m]) for j, m in enumerate(masks)}
    doc = {"atoms": atoms, "events": events, "weights": weights, "variables": {}}
    for name, var in (variables or {}).items():
        doc["variables"][name] = {str(a): var.values[a] for a in atoms}
    return doc


def space_from_document(doc: dict) -> tuple[FiniteProbabilitySpace, dict]:
    try:
        space = SampleSpace(tuple(doc["atoms"]))
        masks = frozenset(
            sum(1 << i for i in idxs) for idxs in doc["events"]
        )
        algebra = EventAlgebra(space, masks)
        sorted_masks = sorted(masks)
        weight = {
            sorted_masks[int(j)]: _value_from_json(v)
            for j, v in doc["weights"].items()
        }
        ps = FiniteProbabilitySpace(algebra, weight)
        variables = {}
        by_str = {str(a): a for a in space.atoms}
        for name, vals in doc.get("variables", {}).items():
            variables[name] = RandomVariable(
                space, {by_str[k]: v for k, v in vals.items()}
            )
        return ps, variables
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed probability-space document: {exc}") from exc


def load_space(path) -> tuple[FiniteProbabilitySpace, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return space_from_document(json.load(fh))
