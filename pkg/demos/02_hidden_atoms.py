"""Coarse event algebras: two outcomes the algebra cannot tell apart are
invisible to every measurable question."""

from fractions import Fraction

from collectiva.errors import NotMeasurableError
from collectiva.finite_prob import (
    Event,
    FiniteProbabilitySpace,
    RandomVariable,
    SampleSpace,
    build_algebra,
    is_measurable,
    probability,
)

# four outcomes, but the observer can only resolve {w1, w2} as one lump
space = SampleSpace(("w1", "w2", "w3", "w4"))
generators = [
    Event.from_atoms(space, ("w1", "w2")),
    Event.from_atoms(space, ("w3",)),
]
algebra = build_algebra(space, generators)
print("algebra size:", len(algebra), "of", 2 ** space.size, "possible events")

blocks = sorted(algebra.blocks())
ps = FiniteProbabilitySpace.from_block_weights(
    algebra, dict(zip(blocks, (Fraction(1, 2), Fraction(1, 3), Fraction(1, 6))))
)

lump = Event.from_atoms(space, ("w1", "w2"))
print("P({w1, w2}) =", probability(ps, lump))

try:
    probability(ps, Event.from_atoms(space, ("w1",)))
except NotMeasurableError as exc:
    print("P({w1}) ->", exc)

# a variable is measurable here exactly when it gives w1 and w2 one value
glued = RandomVariable(space, {"w1": 10, "w2": 10, "w3": 20, "w4": 30})
split = RandomVariable(space, {"w1": 10, "w2": 11, "w3": 20, "w4": 30})
print("variable gluing w1=w2 measurable?  ", is_measurable(ps, glued))
print("variable splitting w1,w2 measurable?", is_measurable(ps, split))
