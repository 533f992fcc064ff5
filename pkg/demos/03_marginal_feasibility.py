"""When do three pairwise correlations of +-1 observables admit one joint
distribution?  Exact feasibility decisions, facets, and witnesses."""

from fractions import Fraction

from collectiva.marginals import (
    CorrelationTriple,
    boole_bell_value,
    check_no_signaling,
    correlation_facets,
    joint_exists,
    marginalize,
    triple_to_family,
)

print("facets of the 3-observable correlation body:")
for coeffs, bound in sorted(correlation_facets(3), key=repr):
    print("  ", tuple(str(c) for c in coeffs), "<=", bound)

# a feasible point: independent observables
ok = CorrelationTriple(Fraction(0), Fraction(0), Fraction(0))
verdict = joint_exists(triple_to_family(ok))
print("\n(0, 0, 0) feasible:", verdict.feasible, "via", verdict.method)
w = verdict.witness
print("witness mass on", len(w.mass), "sign assignments, e.g.",
      dict(list(w.mass.items())[:2]))

# an infeasible corner: perfectly aligned pairs with one anti-aligned pair
bad = CorrelationTriple(Fraction(1), Fraction(1), Fraction(-1))
value, satisfied, coeffs = boole_bell_value(bad)
print("\n(1, 1, -1): max facet functional =", value,
      "(bound 1, satisfied:", str(satisfied) + ")")
verdict = joint_exists(triple_to_family(bad))
print("(1, 1, -1) feasible:", verdict.feasible, "- violated:", verdict.violated)

# marginal families can also fail earlier, at the shared-margins stage
family = triple_to_family(ok)
ns_ok, violations = check_no_signaling(family)
print("\nshared single-observable margins consistent:", ns_ok)
p12 = family.pmfs[0]
print("margin of", p12.observables[0], "from the first pair pmf:",
      marginalize(p12, (p12.observables[0],)).mass)
