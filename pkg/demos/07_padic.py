"""The 2-adic metric on frequency paths: a realizable run of counts whose
relative frequency stays in [0, 1] yet converges 2-adically to -1."""

from fractions import Fraction

from collectiva.padic import (
    PAdicContext,
    compare_convergence,
    detect_padic_stabilization,
    frequency_path_realizer,
    padic_distance,
    padic_expand,
    padic_valuation,
    realized_trace,
)

ctx = PAdicContext(2)
print("v2(12)   =", padic_valuation(12, ctx))
print("v2(3/8)  =", padic_valuation(Fraction(3, 8), ctx))
print("d2(1, 3) =", padic_distance(1, 3, ctx))

minus_one = padic_expand(-1, PAdicContext(2, 16))
print("\n-1 in base 2 (16 digits):", "".join(map(str, minus_one.digits)),
      "  (all ones)")
third = padic_expand(Fraction(1, 3), PAdicContext(2, 16))
print("1/3 in base 2 (16 digits):", "".join(map(str, third.digits)))

# counts c_k = 2^k - 1 out of N_k = 2^k + 1 trials are realizable...
checkpoints = [(2**k + 1, 2**k - 1) for k in range(1, 21)]
x = frequency_path_realizer(checkpoints)
trace = realized_trace(x, [n for n, _ in checkpoints])
print("\nrealized frequencies nu_k = (2^k - 1)/(2^k + 1):")
for k in (1, 2, 3, 20):
    nu = trace[k - 1]
    print(f"  k = {k:>2}: nu = {nu}  |nu - (-1)|_2 = {padic_distance(nu, -1, ctx)}")

# ...and the whole path is flagged 2-adically stabilized toward -1
report = detect_padic_stabilization(trace, ctx)
print("\n2-adic detector: stabilized =", report.padic.stabilized,
      " oscillation =", report.padic.oscillation)
print("limit digits:", "".join(map(str, report.padic.limit.digits)),
      " value mod 2^20:", report.padic.limit.evaluate())

# geometric partial sums split the two metrics the other way around
sums = [2 ** (k + 1) - 1 for k in range(40)]
print("\npartial sums 1, 3, 7, 15, ... :",
      compare_convergence(sums, ctx).verdict)
consts = [Fraction(5, 7)] * 30
print("constant sequence          :", compare_convergence(consts, ctx).verdict)
