"""Frequency analysis of trial sequences.

A TrialSequence is an immutable run of labels; FrequencyTrace carries its
exact rational relative frequencies at chosen checkpoints.  Place-selection
rules are *causal by construction*: a rule's decider is handed only the
strict prefix x_1..x_{n-1}, so a rule that peeks at the current or later
trials cannot even be expressed through this interface.  The one deliberate
exception, kamke_adversary, lives outside the rule type and returns raw
positions precisely to demonstrate why such selections must be excluded.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConstructionError, InputError

DEFAULT_EPSILON = Fraction(1, 100)


@dataclass(frozen=True)
class LabelAlphabet:
    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 2:
            raise InputError("alphabet needs at least two labels")
        if len(set(labels)) != len(labels):
            raise InputError("alphabet labels must be distinct")

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"label {label!r} not in alphabet {self.labels!r}") from None


BINARY = LabelAlphabet(("0", "1"))


class TrialSequence:
    """Immutable sequence of labels, stored as an index array."""

    __slots__ = ("alphabet", "data")

    def __init__(self, alphabet: LabelAlphabet, data: np.ndarray):
        data = np.ascontiguousarray(data, dtype=np.int64)
        if data.ndim != 1:
            raise InputError("trial data must be one-dimensional")
        if data.size and (data.min() < 0 or data.max() >= alphabet.size):
            raise InputError("trial index outside the alphabet")
        data.setflags(write=False)
        self.alphabet = alphabet
        self.data = data

    @classmethod
    def from_labels(cls, alphabet: LabelAlphabet, labels: Iterable) -> "TrialSequence":
        idx = [alphabet.index(x) for x in labels]
        return cls(alphabet, np.array(idx, dtype=np.int64))

    @classmethod
    def from_bits(cls, bits: np.ndarray) -> "TrialSequence":
        return cls(BINARY, np.asarray(bits, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.data.size)

    def label_at(self, i: int):
        return self.alphabet.labels[int(self.data[i])]

    def labels(self) -> list:
        return [self.alphabet.labels[j] for j in self.data]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TrialSequence)
            and self.alphabet == other.alphabet
            and np.array_equal(self.data, other.data)
        )


@dataclass(frozen=True)
class FrequencyTrace:
    """Exact relative frequencies nu_N(label) at the given checkpoints."""

    alphabet: LabelAlphabet
    checkpoints: tuple[int, ...]
    values: dict  # label -> tuple[Fraction, ...]

    def nu(self, label, k: int) -> Fraction:
        return self.values[label][k]

    def final(self) -> dict:
        return {lab: vals[-1] for lab, vals in self.values.items()}


def frequencies(x: TrialSequence, checkpoints: Sequence[int]) -> FrequencyTrace:
    """Exact rational frequency of every label at each checkpoint."""
    cps = tuple(int(c) for c in checkpoints)
    if not cps:
        raise InputError("need at least one checkpoint")
    if any(c < 1 for c in cps):
        raise InputError("checkpoints must be >= 1")
    if max(cps) > len(x):
        raise InputError(f"checkpoint {max(cps)} beyond data length {len(x)}")
    idx = np.array(cps, dtype=np.int64) - 1
    values = {}
    for j, lab in enumerate(x.alphabet.labels):
        cum = np.cumsum(x.data == j)
        values[lab] = tuple(Fraction(int(cum[i]), int(i) + 1) for i in idx)
    return FrequencyTrace(x.alphabet, cps, values)


def log_checkpoints(n: int, ratio: float = 1.25, dense_tail: int = 32) -> tuple[int, ...]:
    """Geometric checkpoint grid up to n, densified near the end so the
    stabilization window always holds several points."""
    if n < 1:
        raise InputError("empty sequence")
    pts = {1, n}
    c = 1.0
    while c < n:
        pts.add(int(c))
        c *= ratio
    w = max(1, n // 10)
    step = max(1, w // dense_tail)
    pts.update(range(max(1, n - w), n + 1, step))
    return tuple(sorted(pts))


@dataclass(frozen=True)
class LabelStability:
    stabilized: bool
    limit: Fraction | None
    oscillation: Fraction


@dataclass(frozen=True)
class StabilizationVerdict:
    window: int
    epsilon: Fraction
    per_label: dict
    criterion: str = "final-window oscillation <= epsilon (finite-sample convention)"

    @property
    def stabilized(self) -> bool:
        return all(v.stabilized for v in self.per_label.values())

    def limits(self) -> dict:
        return {lab: v.limit for lab, v in self.per_label.items() if v.stabilized}


def detect_stabilization(
    trace: FrequencyTrace,
    window: int | None = None,
    epsilon=DEFAULT_EPSILON,
) -> StabilizationVerdict:
    """Per-label verdict: oscillation of nu over the final window <= epsilon.

    The estimated limit is the mean of the window values (exact rational).
    This finite-sample criterion is a convention, echoed in the verdict.
    """
    n_max = max(trace.checkpoints)
    if window is None:
        window = max(10**3, n_max // 10)
    lo = n_max - window
    sel = [k for k, c in enumerate(trace.checkpoints) if c >= lo]
    if len(sel) < 2:
        raise InputError("need at least two checkpoints inside the final window")
    per = {}
    for lab, vals in trace.values.items():
        w = [vals[k] for k in sel]
        osc = max(w) - min(w)
        ok = osc <= epsilon
        limit = sum(w, Fraction(0)) / len(w) if ok else None
        per[lab] = LabelStability(bool(ok), limit, osc)
    return StabilizationVerdict(window, Fraction(epsilon) if not isinstance(epsilon, float) else epsilon, per)


# --- place selection ---------------------------------------------------------

@dataclass(frozen=True)
class PlaceSelectionRule:
    """Causal retain/reject rule.

    make_decider(alphabet) returns decide(n, prefix) -> bool, where prefix is
    the index array of x_1..x_{n-1} only.  vector_decider, when present, is a
    whole-sequence shortcut that must produce identical decisions; built-in
    shortcuts derive every decision from strictly earlier positions.
    """

    name: str
    make_decider: Callable[[LabelAlphabet], Callable[[int, np.ndarray], bool]]
    vector_decider: Callable[[LabelAlphabet, np.ndarray], np.ndarray] | None = None
    params: tuple = ()

    def describe(self) -> str:
        if self.params:
            return f"{self.name}:{','.join(str(p) for p in self.params)}"
        return self.name


def identity_rule() -> PlaceSelectionRule:
    return PlaceSelectionRule(
        "identity",
        lambda alphabet: (lambda n, prefix: True),
        vector_decider=lambda alphabet, data: np.ones(len(data), dtype=bool),
    )


def evens_rule() -> PlaceSelectionRule:
    return PlaceSelectionRule(
        "evens",
        lambda alphabet: (lambda n, prefix: n % 2 == 0),
        vector_decider=lambda alphabet, data: (np.arange(1, len(data) + 1) % 2) == 0,
    )


def odds_rule() -> PlaceSelectionRule:
    return PlaceSelectionRule(
        "odds",
        lambda alphabet: (lambda n, prefix: n % 2 == 1),
        vector_decider=lambda alphabet, data: (np.arange(1, len(data) + 1) % 2) == 1,
    )


def _sieve(limit: int) -> np.ndarray:
    s = np.ones(limit + 1, dtype=bool)
    s[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if s[p]:
            s[p * p :: p] = False
    return s


def primes_rule() -> PlaceSelectionRule:
    def make(alphabet):
        state = {"sieve": _sieve(4096)}

        def decide(n, prefix):
            sv = state["sieve"]
            if n >= sv.size:
                state["sieve"] = sv = _sieve(max(2 * n, sv.size * 2))
            return bool(sv[n])

        return decide

    return PlaceSelectionRule(
        "primes",
        make,
        vector_decider=lambda alphabet, data: _sieve(max(len(data), 2))[1 : len(data) + 1],
    )


def after_pattern_rule(pattern) -> PlaceSelectionRule:
    """Retain position n iff the preceding len(pattern) trials spell pattern."""
    pat = tuple(pattern)
    if not pat:
        raise InputError("pattern must be nonempty")

    def make(alphabet):
        pidx = np.array([alphabet.index(c) for c in pat], dtype=np.int64)
        k = len(pidx)

        def decide(n, prefix):
            return n - 1 >= k and bool(np.array_equal(prefix[n - 1 - k : n - 1], pidx))

        return decide

    def vector(alphabet, data):
        pidx = [alphabet.index(c) for c in pat]
        k = len(pidx)
        mask = np.zeros(len(data), dtype=bool)
        if len(data) > k:
            hit = np.ones(len(data) - k, dtype=bool)
            for j, pv in enumerate(pidx):
                hit &= data[j : len(data) - k + j] == pv
            mask[k:] = hit
        return mask

    return PlaceSelectionRule(
        "after", make, vector_decider=vector, params=("".join(str(c) for c in pat),)
    )


def aux_coin_rule(seed: int, p: float = 0.5) -> PlaceSelectionRule:
    """Auxiliary randomized selection driven by a seeded generator; the
    decision stream depends on the seed only, never on the trials."""

    def make(alphabet):
        rng = np.random.default_rng(seed)
        return lambda n, prefix: bool(rng.random() < p)

    def vector(alphabet, data):
        rng = np.random.default_rng(seed)
        return rng.random(len(data)) < p

    return PlaceSelectionRule("coin", make, vector_decider=vector, params=(seed,))


RULE_CATALOGUE = {
    "identity": (identity_rule, 0),
    "evens": (evens_rule, 0),
    "odds": (odds_rule, 0),
    "primes": (primes_rule, 0),
    "after": (after_pattern_rule, 1),
    "coin": (aux_coin_rule, 1),
}


def rule_from_spec(spec: str, default_seed: int | None = None) -> PlaceSelectionRule:
    """Parse "name" or "name:param" against the built-in catalogue.

    A bare "coin" falls back to default_seed so that all randomness in a run
    flows from a single configured seed.
    """
    name, _, param = spec.strip().partition(":")
    entry = RULE_CATALOGUE.get(name)
    if entry is None:
        raise InputError(
            f"unknown rule {name!r}; catalogue: {', '.join(sorted(RULE_CATALOGUE))}"
        )
    factory, nargs = entry
    if nargs == 0:
        if param:
            raise InputError(f"rule {name!r} takes no parameter")
        return factory()
    if not param:
        if name == "coin" and default_seed is not None:
            return factory(default_seed)
        raise InputError(f"rule {name!r} needs a parameter, e.g. {name}:10")
    if name == "coin":
        return factory(int(param))
    return factory(param)


def default_family() -> list[PlaceSelectionRule]:
    return [identity_rule(), primes_rule(), after_pattern_rule("10")]


def apply_selection(
    rule: PlaceSelectionRule, x: TrialSequence, use_vector: bool = True
) -> TrialSequence:
    """Subsequence of retained trials, in order.

    The decider sees (n, x_1..x_{n-1}); the element being decided on is
    never exposed, so lookahead is unrepresentable.
    """
    data = x.data
    if use_vector and rule.vector_decider is not None:
        mask = np.asarray(rule.vector_decider(x.alphabet, data), dtype=bool)
        if mask.shape != data.shape:
            raise InputError(f"rule {rule.name}: bad vector decision shape")
        return TrialSequence(x.alphabet, data[mask])
    decide = rule.make_decider(x.alphabet)
    keep = [i for i in range(len(data)) if decide(i + 1, data[:i])]
    return TrialSequence(x.alphabet, data[keep])


@dataclass(frozen=True)
class RuleReport:
    rule: str
    selected: int
    frequencies: dict | None
    max_deviation: Fraction | None
    status: str  # "pass" | "fail" | "inconclusive"


def randomness_check(
    x: TrialSequence,
    family: Sequence[PlaceSelectionRule],
    epsilon=DEFAULT_EPSILON,
    min_length: int = 10**3,
) -> list[RuleReport]:
    """Frequency invariance of x under each rule of the family.

    A rule passes when every label frequency of the selected subsequence is
    within epsilon of the full-sequence frequency; subsequences shorter than
    min_length are inconclusive rather than failed.
    """
    base = frequencies(x, [len(x)]).final()
    out = []
    for rule in family:
        sub = apply_selection(rule, x)
        if len(sub) < min_length:
            out.append(RuleReport(rule.describe(), len(sub), None, None, "inconclusive"))
            continue
        fr = frequencies(sub, [len(sub)]).final()
        dev = max(abs(fr[lab] - base[lab]) for lab in x.alphabet.labels)
        out.append(
            RuleReport(
                rule.describe(), len(sub), fr, dev,
                "pass" if dev <= epsilon else "fail",
            )
        )
    return out


def mix(x: TrialSequence, members: Iterable) -> TrialSequence:
    """Binary indicator sequence of membership in a label subset.

    Position j holds "1" iff x_j is in the subset, so the count of ones at
    any N equals the sum of the member labels' counts -- additivity of
    frequency probability holds exactly at every finite N.  Empty and full
    subsets are allowed and produce the degenerate all-0/all-1 sequences.
    """
    idxs = {x.alphabet.index(lab) for lab in members}
    bits = np.isin(x.data, list(idxs)).astype(np.int64) if idxs else np.zeros(len(x), dtype=np.int64)
    return TrialSequence(BINARY, bits)


@dataclass(frozen=True)
class FrequencyProbability:
    value: Fraction | None
    verdict: str  # "stabilized" | "no frequency probability"
    stabilization: StabilizationVerdict


def frequency_probability(
    x: TrialSequence,
    members: Iterable,
    window: int | None = None,
    epsilon=DEFAULT_EPSILON,
    checkpoints: Sequence[int] | None = None,
) -> FrequencyProbability:
    """Stabilized limit of the mixed sequence's frequency of "1", when the
    stabilization criterion accepts it; otherwise an explicit non-verdict."""
    mixed = mix(x, members)
    cps = tuple(checkpoints) if checkpoints is not None else log_checkpoints(len(mixed))
    trace = frequencies(mixed, cps)
    verdict = detect_stabilization(trace, window=window, epsilon=epsilon)
    lab = verdict.per_label["1"]
    if lab.stabilized:
        return FrequencyProbability(lab.limit, "stabilized", verdict)
    return FrequencyProbability(None, "no frequency probability", verdict)


def kamke_adversary(x: TrialSequence, target) -> np.ndarray:
    """1-based positions of every occurrence of the target label.

    This selection *reads the trial it selects*, which is exactly what the
    causal rule interface forbids; it exists to show that without causality,
    every sequence owns a subsequence of frequency 1.  Returns an empty
    array when the label never occurs.
    """
    j = x.alphabet.index(target)
    return np.flatnonzero(x.data == j) + 1


def ville_generator(
    family: Sequence[PlaceSelectionRule],
    n_trials: int,
    epsilon=DEFAULT_EPSILON,
    min_count: int | None = None,
    backtrack_budget: int = 32,
) -> TrialSequence:
    """A binary sequence whose running mean never drops below 1/2 while every
    family rule's selected subsequence stays epsilon-balanced.

    Greedy construction: at each position the admissible bit minimizing the
    worst selected-rule count imbalance (dead-band 2) is chosen, ties steered
    toward a small positive ones-surplus so the mean floor stays slack.  The
    result is scanned, never assumed; a scan failure triggers bounded
    backtracking (budget of reverted choices), and exhaustion raises
    ConstructionError rather than returning an invalid sequence.
    """
    if n_trials < 1:
        raise InputError("n_trials must be >= 1")
    eps = Fraction(epsilon) if not isinstance(epsilon, float) else epsilon
    if min_count is None:
        min_count = max(30, int(np.ceil(2 / float(eps))))

    overrides: dict[int, int] = {}
    budget = backtrack_budget

    while True:
        bits, free_alternatives, counts = _ville_attempt(family, n_trials, overrides)
        failure = _ville_scan(bits, counts, eps, min_count)
        if failure is None:
            return TrialSequence(BINARY, np.array(bits, dtype=np.int64))
        if budget > 0 and free_alternatives:
            pos = free_alternatives.pop()
            overrides = {p: b for p, b in overrides.items() if p < pos}
            overrides[pos] = 1 - bits[pos]
            budget -= 1
        else:
            raise ConstructionError(
                f"construction failed within the backtracking budget: {failure}"
            )


def _ville_attempt(family, n_trials, overrides):
    deciders = [rule.make_decider(BINARY) for rule in family]
    bits: list[int] = []
    arr = np.empty(n_trials, dtype=np.int64)
    ones = 0
    counts = [[0, 0] for _ in family]  # selected, ones among selected
    free_alternatives: list[int] = []
    for n in range(1, n_trials + 1):
        prefix = arr[: n - 1]
        names = [i for i, d in enumerate(deciders) if d(n, prefix)]
        if 2 * ones < n:  # floor binds: only b=1 keeps the mean >= 1/2
            b = 1
        elif (n - 1) in overrides:
            b = overrides[n - 1]
        else:
            def cost(bb):
                worst = 0.0
                for i in names:
                    k, o = counts[i]
                    worst = max(worst, abs((o + bb) - (k + 1) / 2) - 2.0)
                return max(worst, 0.0)

            b = min((0, 1), key=lambda bb: (cost(bb), abs(ones + bb - n / 2 - 1.5), bb))
            free_alternatives.append(n - 1)
        bits.append(b)
        arr[n - 1] = b
        ones += b
        for i in names:
            counts[i][0] += 1
            counts[i][1] += b
    return bits, free_alternatives, counts


def _ville_scan(bits, counts, eps, min_count):
    ones = 0
    for n, b in enumerate(bits, start=1):
        ones += b
        if 2 * ones < n:
            return f"running mean below 1/2 at position {n}"
    for i, (k, o) in enumerate(counts):
        if k >= min_count and abs(Fraction(o, k) - Fraction(1, 2)) > eps:
            return f"rule #{i} deviation {o}/{k} exceeds epsilon"
    return None


def seq_to_unit_interval(x: TrialSequence) -> float:
    """Binary expansion value sum x_j 2^-j of the first 64 trials."""
    if x.alphabet.size != 2:
        raise InputError("sequence must be binary")
    r = 0.0
    for j, b in enumerate(x.data[:64], start=1):
        if b:
            r += 2.0 ** -j
    return r
