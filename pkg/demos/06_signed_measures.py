"""Signed weight systems: negative event masses, the complement excess they
force, and the 1/N decay of the distribution-of-means error."""

from fractions import Fraction

from collectiva.signed_prob import (
    BUNDLED_SPACES,
    BUNDLED_VARIABLES,
    POLY_TEST_FUNCTIONS,
    complement_excess,
    conditional_signed,
    expectation_signed,
    jordan,
    mean_law_table,
    validate,
)

space = BUNDLED_SPACES["three-atom"]
diag = validate(space)
print("three-atom space:", dict(space.weight))
print("total =", diag.total, " negative atoms:", diag.negative_atoms,
      " total variation =", diag.total_variation)

jd = jordan(space)
print("jordan split: positive", jd.positive, " negative", jd.negative)

pa, pc = complement_excess(space, ["w1"])
print(f"\nP({{w1}}) = {pa}  forces  P(complement) = {pc}  (> 1)")

print("P({w2} | {w1, w2}) =",
      conditional_signed(space, ["w2"], ["w1", "w2"]), " (beyond [0, 1])")

var = BUNDLED_VARIABLES["three-atom"]
mean = expectation_signed(space, var)
print("\nvariable", var, "has mean", mean)

# distribution of the average of N independent copies: the expectation of
# f(average) walks to f(mean) at speed 1/N
f = dict(POLY_TEST_FUNCTIONS)["x^2"]
schedule = [1, 4, 16, 64, 256]
laws = mean_law_table(space, var, schedule)
print("\nN      E[f(mean_N)]            gap to f(mean) = (21/16)/N")
for n in schedule:
    ef = laws[n].expect(f)
    print(f"{n:<6} {str(ef):<22} {abs(ef - f(mean))}")
    assert laws[n].total() == 1  # every law still sums to exactly 1
