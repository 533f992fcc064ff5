"""Exact finite probability: events, conditioning, and the total-probability
decomposition, all in rational arithmetic."""

from fractions import Fraction

from collectiva.finite_prob import (
    Event,
    FiniteProbabilitySpace,
    Partition,
    RandomVariable,
    SampleSpace,
    conditional,
    distribution,
    expectation,
    independent,
    partition_from_rv,
    probability,
    total_probability,
)

# a loaded six-sided die, weights summing to 1 exactly
space = SampleSpace((1, 2, 3, 4, 5, 6))
weights = {
    1: Fraction(1, 4), 2: Fraction(1, 8), 3: Fraction(1, 8),
    4: Fraction(1, 8), 5: Fraction(1, 8), 6: Fraction(1, 4),
}
die = FiniteProbabilitySpace.from_atom_weights(space, weights)

even = Event.from_atoms(space, (2, 4, 6))
big = Event.from_atoms(space, (4, 5, 6))
print("P(even)            =", probability(die, even))
print("P(big)             =", probability(die, big))
print("P(even and big)    =", probability(die, even & big))
print("P(even | big)      =", conditional(die, even, big))
print("even, big independent?", independent(die, even, big))

# a random variable and its exact distribution / expectation
face_mod3 = RandomVariable(space, {a: a % 3 for a in space.atoms})
print("law of (face mod 3):", distribution(die, face_mod3))
print("E[face mod 3]      =", expectation(die, face_mod3))

# decompose P(even) over the preimages of the variable; the identity is
# checked exactly inside the call
parts: Partition = partition_from_rv(die, face_mod3)
value, terms = total_probability(die, parts, even)
print("total-probability decomposition of P(even):")
for (pk, cond_k), blk in zip(terms, parts.blocks):
    print(f"  P({blk.atoms()}) = {pk},  P(even | block) = {cond_k}")
print("reassembled value  =", value)
