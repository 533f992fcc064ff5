"""Command-line interface.

Every command reads its inputs, runs one analysis, and emits a single
schema-validated JSON report (stdout or --out).  Exit codes: 0 success,
2 malformed input, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import collectives, complexity, marginals, padic, signed_prob
from .collectives import TrialSequence
from .errors import CapacityError, ConstructionError, InputError
from .padic import PAdicExpansion
from .report import make_report, write_report
from .seqio import read_rationals, read_sequence

DEFAULT_RULES = "identity,primes,after:10"


# --- small shared helpers ------------------------------------------------------

def _frac(text) -> Fraction:
    """Exact rational from a CLI string ("0.01", "1/100", "1e-3")."""
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse {text!r} as a number: {exc}") from exc


def _parse_rules(spec: str, seed: int) -> list[collectives.PlaceSelectionRule]:
    parts = [s for s in (p.strip() for p in spec.split(",")) if s]
    if not parts:
        raise InputError("empty rule list")
    return [collectives.rule_from_spec(p, default_seed=seed) for p in parts]


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _config(args: argparse.Namespace) -> dict:
    """Echo of the run configuration.  --out is excluded so that identical
    analyses written to different paths produce identical reports."""
    skip = {"handler", "command", "out"}
    return {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in skip and v is not None
    }


def _check_seed(seed: int) -> int:
    if not 0 <= seed < 2**64:
        raise InputError(f"seed {seed} outside the unsigned 64-bit range")
    return seed


def _rule_rows(reports) -> list[dict]:
    return [
        {
            "rule": r.rule,
            "selected": r.selected,
            "frequencies": r.frequencies,
            "max_deviation": r.max_deviation,
            "status": r.status,
        }
        for r in reports
    ]


def _overall(reports) -> str:
    if any(r.status == "fail" for r in reports):
        return "fail"
    if any(r.status == "inconclusive" for r in reports):
        return "inconclusive"
    return "pass"


def _stabilization_dict(verdict: collectives.StabilizationVerdict) -> dict:
    return {
        "stabilized": verdict.stabilized,
        "window": verdict.window,
        "epsilon": verdict.epsilon,
        "criterion": verdict.criterion,
        "per_label": {
            str(lab): {
                "stabilized": s.stabilized,
                "limit": s.limit,
                "oscillation": s.oscillation,
            }
            for lab, s in verdict.per_label.items()
        },
    }


# --- command handlers ----------------------------------------------------------

def cmd_stabilize(args) -> tuple[dict, list[str]]:
    x = read_sequence(args.input, args.format)
    eps = _frac(args.eps)
    cps = collectives.log_checkpoints(len(x))
    trace = collectives.frequencies(x, cps)
    verdict = collectives.detect_stabilization(trace, window=args.window, epsilon=eps)
    payload = {
        "length": len(x),
        "alphabet": [str(lab) for lab in x.alphabet.labels],
        "checkpoints": list(cps),
        "trace": {str(lab): list(vals) for lab, vals in trace.values.items()},
        "stabilization": _stabilization_dict(verdict),
    }
    return payload, []


def cmd_select(args) -> tuple[dict, list[str]]:
    x = read_sequence(args.input, args.format)
    family = _parse_rules(args.rules, _check_seed(args.seed))
    eps = _frac(args.eps)
    base = collectives.frequencies(x, [len(x)]).final()
    reports = collectives.randomness_check(x, family, epsilon=eps, min_length=1)
    payload = {
        "length": len(x),
        "epsilon": eps,
        "base_frequencies": {str(k): v for k, v in base.items()},
        "rules": _rule_rows(reports),
    }
    return payload, []


def cmd_mix(args) -> tuple[dict, list[str]]:
    x = read_sequence(args.input, args.format)
    eps = _frac(args.eps)
    members = [s.strip() for s in args.labels.split(",") if s.strip()]
    cps = collectives.log_checkpoints(len(x))
    mixed = collectives.mix(x, members)
    mixed_trace = collectives.frequencies(mixed, cps)
    base_trace = collectives.frequencies(x, cps)
    member_sum = [
        sum((base_trace.values[lab][k] for lab in members), Fraction(0))
        for k in range(len(cps))
    ]
    additive = all(
        mixed_trace.values["1"][k] == member_sum[k] for k in range(len(cps))
    )
    fp = collectives.frequency_probability(
        x, members, window=args.window, epsilon=eps, checkpoints=cps
    )
    payload = {
        "length": len(x),
        "members": members,
        "checkpoints": list(cps),
        "mixed_frequency": list(mixed_trace.values["1"]),
        "member_frequency_sum": member_sum,
        "additivity_exact": bool(additive),
        "frequency_probability": {"value": fp.value, "verdict": fp.verdict},
        "stabilization": _stabilization_dict(fp.stabilization),
    }
    return payload, []


def cmd_randomness(args) -> tuple[dict, list[str]]:
    x = read_sequence(args.input, args.format)
    family = _parse_rules(args.rules, _check_seed(args.seed))
    eps = _frac(args.eps)
    reports = collectives.randomness_check(
        x, family, epsilon=eps, min_length=args.min_count
    )
    payload = {
        "length": len(x),
        "epsilon": eps,
        "min_count": args.min_count,
        "rules": _rule_rows(reports),
        "overall": _overall(reports),
    }
    return payload, []


def cmd_complexity(args) -> tuple[dict, list[str]]:
    x = read_sequence(args.input, args.format)
    bits = complexity.as_bits(x)
    est = complexity.estimate_K(bits)
    cond = complexity.estimate_K_conditional(bits, bits.size)
    curve = complexity.complexity_rate_curve(bits)
    dips = complexity.martin_lof_dip_scan(bits)
    payload = {
        "n_bits": int(bits.size),
        "codec": est.codec,
        "estimate": {"k_hat": est.k_hat, "rate": est.rate},
        "conditional": {"k_hat": cond.k_hat, "rate": cond.rate},
        "curve": [
            {"n_bits": e.n_bits, "k_hat": e.k_hat, "rate": e.rate} for e in curve
        ],
        "dips": [int(n) for n in dips],
        "dip_threshold": "n - log2(n)",
    }
    return payload, [est.note]


def cmd_battery(args) -> tuple[dict, list[str]]:
    x = read_sequence(args.input, args.format)
    bits = complexity.as_bits(x)
    results = complexity.run_battery(bits, significance=args.significance)
    payload = {
        "n_bits": int(bits.size),
        "significance": args.significance,
        "results": [
            {
                "name": r.name,
                "statistic": None if r.skipped else r.statistic,
                "p_value": r.p_value,
                "passed": r.passed,
                "skipped": r.skipped,
                "note": r.note,
            }
            for r in results
        ],
        "passed": complexity.battery_passed(results),
    }
    warn = [f"{r.name}: skipped ({r.note})" for r in results if r.skipped]
    return payload, warn


def _family_from_input(args) -> tuple[marginals.MarginalFamily, marginals.CorrelationTriple | None]:
    if args.format == "csv" or args.input.endswith(".csv"):
        import csv

        with open(args.input, "r", encoding="utf-8", newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and any(s.strip() for s in row)]
        return marginals.family_from_csv_rows(rows), None
    doc = _load_json(args.input)
    if not isinstance(doc, dict):
        raise InputError("marginal document must be a JSON object")
    if "pmfs" in doc:
        return marginals.family_from_document(doc), None
    if {"e12", "e23", "e13"} <= set(doc):
        def val(v):
            return marginals._parse_value(v) if isinstance(v, str) else v

        triple = marginals.CorrelationTriple(
            val(doc["e12"]), val(doc["e23"]), val(doc["e13"]),
            tuple(val(m) for m in doc.get("means", (0, 0, 0))),
        )
        return marginals.triple_to_family(triple), triple
    raise InputError(
        "marginal document needs either a 'pmfs' list or correlations e12/e23/e13"
    )


def _feasibility_dict(verdict: marginals.FeasibilityVerdict) -> dict:
    out = {
        "feasible": verdict.feasible,
        "method": verdict.method,
        "violated_facet": None,
        "witness": None,
    }
    if verdict.violated is not None:
        name, value = verdict.violated
        out["violated_facet"] = {"facet": name, "value": value}
    if verdict.witness is not None:
        out["witness"] = {
            "observables": list(verdict.witness.observables),
            "mass": verdict.witness.mass,
        }
    return out


def cmd_marginal(args) -> tuple[dict, list[str]]:
    family, triple = _family_from_input(args)
    payload: dict = {"observables": list(family.observables())}
    if triple is not None:
        value, satisfied, coeffs = marginals.boole_bell_value(triple)
        payload["correlations"] = {
            "e12": triple.e12, "e23": triple.e23, "e13": triple.e13,
            "means": list(triple.means),
        }
        payload["facet_check"] = {
            "max_functional": value,
            "bound": 1,
            "satisfied": satisfied,
            "tight_coefficients": list(coeffs),
        }
    ns_ok, ns_viol = marginals.check_no_signaling(family)
    payload["no_signaling"] = {
        "consistent": ns_ok,
        "violations": [list(v) for v in ns_viol],
    }
    payload["feasibility"] = _feasibility_dict(marginals.joint_exists(family))
    return payload, []


def cmd_consistency(args) -> tuple[dict, list[str]]:
    family, _ = _family_from_input(args)
    ns_ok, ns_viol = marginals.check_no_signaling(family)
    ko_ok, ko_viol = marginals.kolmogorov_consistency(family)
    payload = {
        "observables": list(family.observables()),
        "no_signaling": {
            "consistent": ns_ok,
            "violations": [list(v) for v in ns_viol],
        },
        "projective": {
            "consistent": ko_ok,
            "violations": [list(v) for v in ko_viol],
        },
        "consistent": bool(ns_ok and ko_ok),
    }
    return payload, []


def _metric_dict(v) -> dict | None:
    if v is None:
        return None
    out = {
        "metric": v.metric,
        "stabilized": v.stabilized,
        "oscillation": v.oscillation,
        "window": v.window,
        "epsilon": v.epsilon,
    }
    if isinstance(v.limit, PAdicExpansion):
        out["limit"] = {
            "p": v.limit.p,
            "valuation": v.limit.valuation,
            "digits": list(v.limit.digits),
            "value": v.limit.evaluate(),
        }
    else:
        out["limit"] = v.limit
    return out


def cmd_padic(args) -> tuple[dict, list[str]]:
    ctx = padic.PAdicContext(args.prime, args.precision)
    eps_real = _frac(args.eps)
    eps_padic = _frac(args.padic_eps)
    if args.format == "csv":
        vals = read_rationals(args.input)
        source = "csv"
    else:
        x = read_sequence(args.input, args.format)
        label = args.label if args.label is not None else str(x.alphabet.labels[0])
        cps = collectives.log_checkpoints(len(x))
        vals = padic.realized_trace(x, cps, label=label)
        source = f"frequency path of label {label!r}"
    rep = padic.compare_convergence(
        vals, ctx, window=args.window, eps_real=eps_real, eps_padic=eps_padic
    )
    payload = {
        "prime": ctx.p,
        "precision": ctx.precision,
        "source": source,
        "count": len(vals),
        "final_value": vals[-1],
        "real": _metric_dict(rep.real),
        "padic": _metric_dict(rep.padic),
        "verdict": rep.verdict,
    }
    return payload, []


def _negativity_scan(space: signed_prob.SignedProbabilitySpace):
    """Exhaustive subset scan: most negative event and the count of negative
    events.  Exponential, so only run for small spaces."""
    atoms = list(space.atoms)
    k = len(atoms)
    weights = [space.weight[a] for a in atoms]
    zero = Fraction(0) if space.exact else 0.0
    sums = [zero] * (1 << k)
    for mask in range(1, 1 << k):
        low = (mask & -mask).bit_length() - 1
        sums[mask] = sums[mask & (mask - 1)] + weights[low]
    best_mask = min(range(1 << k), key=lambda m: sums[m])
    negative = sum(1 for s in sums if s < 0)
    argmin = [atoms[i] for i in range(k) if best_mask >> i & 1]
    return sums[best_mask], argmin, negative


def cmd_signed(args) -> tuple[dict, list[str]]:
    if os.path.exists(args.input):
        space, var = signed_prob.load_space(args.input)
    elif args.input in signed_prob.BUNDLED_SPACES:
        space = signed_prob.BUNDLED_SPACES[args.input]
        var = signed_prob.BUNDLED_VARIABLES.get(args.input)
    else:
        raise InputError(
            f"{args.input!r} is neither a file nor a bundled space "
            f"(bundled: {', '.join(sorted(signed_prob.BUNDLED_SPACES))})"
        )
    diag = signed_prob.validate(space)
    jd = signed_prob.jordan(space)
    payload: dict = {
        "atoms": len(space.atoms),
        "total": diag.total,
        "negative_atoms": [str(a) for a in diag.negative_atoms],
        "total_variation": diag.total_variation,
        "jordan": {
            "positive": {str(a): w for a, w in jd.positive.items()},
            "negative": {str(a): w for a, w in jd.negative.items()},
        },
    }
    warnings: list[str] = []
    if len(space.atoms) <= 16:
        worst, argmin, negative_count = _negativity_scan(space)
        comp = [a for a in space.atoms if a not in set(argmin)]
        pa, pc = signed_prob.complement_excess(space, argmin)
        payload["negativity"] = {
            "min_event_prob": worst,
            "argmin_event": [str(a) for a in argmin],
            "complement_prob": pc,
            "negative_event_count": negative_count,
            "complement_size": len(comp),
        }
    else:
        warnings.append("negativity scan skipped: more than 16 atoms")
    if var is not None:
        m = signed_prob.expectation_signed(space, var)
        schedule = []
        n = 1
        while n <= args.n:
            schedule.append(n)
            n *= 2
        sq = dict(signed_prob.POLY_TEST_FUNCTIONS)["x^2"]
        rows = signed_prob.weak_lln_check(space, var, sq, schedule)
        payload["weak_law"] = {
            "variable_mean": m,
            "f": "x^2",
            "f_of_mean": sq(m),
            "rows": [
                {"n": n, "expectation": ef, "gap": gap} for n, ef, gap in rows
            ],
        }
    else:
        warnings.append("no variable supplied: weak-law table omitted")
    return payload, warnings


def cmd_ville(args) -> tuple[dict, list[str]]:
    family = _parse_rules(args.rules, _check_seed(args.seed))
    eps = _frac(args.eps)
    try:
        x = collectives.ville_generator(
            family, args.n, epsilon=eps, min_count=args.min_count
        )
    except ConstructionError as exc:
        payload = {
            "constructed": False,
            "verdict": "construction-failed",
            "n": args.n,
            "epsilon": eps,
            "detail": str(exc),
        }
        return payload, ["construction failed; no sequence emitted"]
    ones = np.cumsum(x.data)
    margins = 2 * ones - np.arange(1, len(x) + 1)
    reports = collectives.randomness_check(x, family, epsilon=eps, min_length=1)
    payload = {
        "constructed": True,
        "n": len(x),
        "epsilon": eps,
        "ones": int(ones[-1]),
        "never_below_half": bool(margins.min() >= 0),
        "min_twice_ones_minus_n": int(margins.min()),
        "final_mean": Fraction(int(ones[-1]), len(x)),
        "unit_interval_value": collectives.seq_to_unit_interval(x),
        "rules": _rule_rows(reports),
    }
    warnings = []
    if len(x) <= 4096:
        payload["sequence"] = "".join(x.labels())
    else:
        warnings.append(
            "sequence omitted from the report (> 4096 trials); rerun with the "
            "same configuration to regenerate it deterministically"
        )
    return payload, warnings


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("raw", "ascii", "csv"), default="ascii",
        help="input encoding: raw bit-packed bytes, ascii labels, or csv",
    )
    common.add_argument("--seed", type=int, default=0, metavar="U64",
                        help="seed for any randomized rule (default 0)")
    common.add_argument("--window", type=int, default=None, metavar="N",
                        help="stabilization window (default: data-dependent)")
    common.add_argument("--eps", default="0.01", metavar="X",
                        help="tolerance, decimal or rational (default 0.01)")
    common.add_argument("--prime", type=int, default=2, metavar="P",
                        help="prime for the p-adic metric (default 2)")
    common.add_argument("--rules", default=DEFAULT_RULES, metavar="NAME[:PARAM],...",
                        help=f"selection-rule family (default {DEFAULT_RULES})")
    common.add_argument("--out", default=None, metavar="PATH",
                        help="write the JSON report here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="collectiva",
        description="Frequency stabilization, marginal feasibility, compression-"
                    "based complexity, signed measures, and p-adic metrics "
                    "over finite data.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, handler, help_text, needs_input=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if needs_input:
            p.add_argument("input", help="input file path")
        p.set_defaults(handler=handler)
        return p

    add("stabilize", cmd_stabilize,
        "frequency trace and stabilization verdict of a label sequence")
    add("select", cmd_select,
        "per-rule selected-subsequence frequencies against the base rates")
    p_mix = add("mix", cmd_mix,
                "indicator sequence of a label subset; exact additivity check")
    p_mix.add_argument("--labels", required=True, metavar="A,B,...",
                       help="comma-separated member labels of the mixture")
    p_rand = add("randomness", cmd_randomness,
                 "frequency invariance under a family of selection rules")
    p_rand.add_argument("--min-count", type=int, default=10**3, metavar="N",
                        help="selections below this are inconclusive (default 1000)")
    add("complexity", cmd_complexity,
        "compression-based description-length estimates and dip scan")
    p_bat = add("battery", cmd_battery,
                "statistical test battery on a binary word")
    p_bat.add_argument("--significance", type=float, default=0.01, metavar="A",
                       help="per-test significance level (default 0.01)")
    add("marginal", cmd_marginal,
        "joint-distribution feasibility of a marginal family or correlations")
    add("consistency", cmd_consistency,
        "no-signaling and projective-consistency checks on a family")
    p_padic = add("padic", cmd_padic,
                  "real vs p-adic stabilization of a rational sequence")
    p_padic.add_argument("--label", default=None, metavar="L",
                         help="label whose frequency path is analyzed "
                              "(default: first alphabet label)")
    p_padic.add_argument("--padic-eps", default=f"1/{2**20}", metavar="X",
                         help="p-adic stabilization tolerance (default 1/2^20)")
    p_padic.add_argument("--precision", type=int, default=64, metavar="D",
                         help="expansion digits to carry (default 64)")
    p_signed = add("signed", cmd_signed,
                   "diagnostics and weak-law table of a signed weight system")
    p_signed.add_argument("--n", type=int, default=256, metavar="N",
                          help="largest sample size in the weak-law table "
                               "(default 256)")
    p_ville = add("ville", cmd_ville,
                  "construct a rule-balanced binary sequence whose running "
                  "mean never drops below 1/2", needs_input=False)
    p_ville.add_argument("--n", type=int, default=10**4, metavar="N",
                         help="number of trials to construct (default 10000)")
    p_ville.add_argument("--min-count", type=int, default=None, metavar="N",
                         help="rule-balance check threshold (default: derived "
                              "from eps)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, warnings = args.handler(args)
        report = make_report(args.command, _config(args), payload, warnings)
        write_report(report, args.out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity limit: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
