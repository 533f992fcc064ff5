"""Signed finite probability spaces: diagnostics, Jordan split, Bayes
quotients beyond [0,1], exact convolution of mean laws, and the
weak-but-not-strong convergence behaviour."""

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from collectiva.errors import CapacityError, InputError, NullConditioningError
from collectiva.signed_prob import (
    BUNDLED_SPACES,
    BUNDLED_VARIABLES,
    POLY_TEST_FUNCTIONS,
    SignedProbabilitySpace,
    complement_excess,
    conditional_signed,
    expectation_signed,
    independent_signed,
    jordan,
    law_of,
    load_space,
    mean_law_table,
    product_space,
    space_from_document,
    sum_distribution,
    validate,
    weak_lln_check,
)

from _oracles import TWO_POINT, binomial_mean_mass, mean_square_expectation

THREE = BUNDLED_SPACES["three-atom"]
TWO = BUNDLED_SPACES["two-point"]
SIXTEEN = BUNDLED_SPACES["sixteen-atom"]


def fair_coin() -> SignedProbabilitySpace:
    return SignedProbabilitySpace(("h", "t"), {"h": Fraction(1, 2), "t": Fraction(1, 2)})


def signed_spaces(draw_weights):
    """Hypothesis helper: a normalized signed space over 2..5 atoms."""
    k = len(draw_weights) + 1
    atoms = tuple(f"u{i}" for i in range(k))
    w = {f"u{i}": Fraction(v, 8) for i, v in enumerate(draw_weights)}
    w[f"u{k - 1}"] = 1 - sum(w.values())
    return SignedProbabilitySpace(atoms, w)


# --- validation and diagnostics -------------------------------------------------------

def test_three_atom_diagnostics():
    d = validate(THREE)
    assert d.total == 1
    assert d.negative_atoms == ("w1",)
    assert d.total_variation == 2


def test_ordinary_space_has_no_negative_atoms():
    d = validate(fair_coin())
    assert d.negative_atoms == ()
    assert d.total_variation == 1


def test_sixteen_atom_diagnostics():
    d = validate(SIXTEEN)
    assert len(d.negative_atoms) == 8
    assert d.total_variation == 5


def test_unnormalized_space_is_rejected():
    bad = SignedProbabilitySpace(("a", "b"), {"a": Fraction(1, 2), "b": Fraction(3, 5)})
    with pytest.raises(InputError, match="sum to"):
        validate(bad)


def test_space_construction_errors():
    with pytest.raises(InputError, match="at least one atom"):
        SignedProbabilitySpace((), {})
    with pytest.raises(InputError, match="distinct"):
        SignedProbabilitySpace(("a", "a"), {"a": 1})
    with pytest.raises(InputError, match="cover"):
        SignedProbabilitySpace(("a", "b"), {"a": Fraction(1)})
    with pytest.raises(InputError, match="unknown atom"):
        THREE.prob({"w9"})


def test_every_bundled_space_validates():
    for name, space in BUNDLED_SPACES.items():
        d = validate(space)
        assert d.total == 1, name


# --- Jordan decomposition --------------------------------------------------------------

@pytest.mark.parametrize("space", list(BUNDLED_SPACES.values()) + [fair_coin()])
def test_jordan_reconstruction_is_exact(space):
    jd = jordan(space)
    assert set(jd.positive) & set(jd.negative) == set()
    for atom in space.atoms:
        w = jd.positive.get(atom, Fraction(0)) - jd.negative.get(atom, Fraction(0))
        assert w == space.weight[atom]
    assert all(v > 0 for v in jd.positive.values())
    assert all(v > 0 for v in jd.negative.values())


# --- complement law ---------------------------------------------------------------------

def test_negative_event_forces_excess_complement():
    assert complement_excess(THREE, {"w1"}) == (Fraction(-1, 2), Fraction(3, 2))


def test_whole_space_complement():
    assert complement_excess(THREE, set(THREE.atoms)) == (Fraction(1), Fraction(0))


@pytest.mark.parametrize("name", ["three-atom", "two-point", "sixteen-atom"])
def test_negative_support_event_exceeds_one_on_complement(name):
    space = BUNDLED_SPACES[name]
    neg_support = set(jordan(space).negative)
    assert neg_support
    pa, pc = complement_excess(space, neg_support)
    assert pa < 0 and pc > 1
    assert pa + pc == 1


def test_complement_law_exhaustive_on_small_spaces():
    for space in (THREE, TWO, fair_coin()):
        atoms = list(space.atoms)
        for mask in range(2 ** len(atoms)):
            subset = {a for i, a in enumerate(atoms) if mask >> i & 1}
            pa, pc = complement_excess(space, subset)
            assert pa + pc == 1


# --- conditioning ------------------------------------------------------------------------

def test_conditioning_on_everything_is_the_plain_probability():
    assert conditional_signed(THREE, {"w2"}, set(THREE.atoms)) == THREE.prob({"w2"})


def test_bayes_quotient_can_exceed_one():
    assert conditional_signed(THREE, {"w2"}, {"w1", "w2"}) == 3


def test_conditional_of_disjoint_event_is_zero():
    assert conditional_signed(THREE, {"w3"}, {"w1", "w2"}) == 0


def test_conditionals_sum_to_one_over_a_partition_of_the_condition():
    c = {"w1", "w2"}
    parts = [{"w1"}, {"w2"}]
    assert sum(conditional_signed(THREE, b, c) for b in parts) == 1


def test_conditioning_on_negative_mass_is_allowed():
    assert conditional_signed(THREE, {"w1"}, {"w1"}) == 1


def test_conditioning_on_zero_mass_is_an_error():
    space = SignedProbabilitySpace(
        ("a", "b", "c"), {"a": Fraction(-1, 2), "b": Fraction(1, 2), "c": Fraction(1)}
    )
    with pytest.raises(NullConditioningError, match="signed mass 0"):
        conditional_signed(space, {"a"}, {"a", "b"})


# --- expectation --------------------------------------------------------------------------

def test_constant_variable_has_its_value_as_mean():
    a = {atom: Fraction(7, 2) for atom in THREE.atoms}
    assert expectation_signed(THREE, a) == Fraction(7, 2)


def test_three_atom_expectation_example():
    assert expectation_signed(THREE, BUNDLED_VARIABLES["three-atom"]) == Fraction(9, 4)


def test_indicator_expectation_is_the_probability():
    for subset in ({"w1"}, {"w2", "w3"}, set()):
        ind = {atom: 1 if atom in subset else 0 for atom in THREE.atoms}
        assert expectation_signed(THREE, ind) == THREE.prob(subset)


def test_expectation_is_linear():
    a = BUNDLED_VARIABLES["three-atom"]
    b = {"w1": 5, "w2": -2, "w3": 7}
    combo = {atom: 3 * a[atom] + 2 * b[atom] for atom in THREE.atoms}
    assert expectation_signed(THREE, combo) == 3 * expectation_signed(
        THREE, a
    ) + 2 * expectation_signed(THREE, b)


def test_expectation_requires_total_variable():
    with pytest.raises(InputError, match="every atom"):
        expectation_signed(THREE, {"w1": 1})


# --- independence and products --------------------------------------------------------------

def test_whole_space_is_independent_of_everything():
    for b in ({"w1"}, {"w2", "w3"}, set()):
        assert independent_signed(THREE, set(THREE.atoms), b)


def test_cylinders_of_a_product_are_independent():
    prod = product_space(THREE, TWO)
    assert validate(prod).total == 1
    cyl_a = {(x, y) for (x, y) in prod.atoms if x == "w2"}
    cyl_b = {(x, y) for (x, y) in prod.atoms if y == "a1"}
    assert independent_signed(prod, cyl_a, cyl_b)
    assert prod.prob(cyl_a & cyl_b) == THREE.prob({"w2"}) * TWO.prob({"a1"})


def test_generic_pair_is_dependent():
    assert not independent_signed(THREE, {"w1"}, {"w2"})


# --- laws and convolution --------------------------------------------------------------------

def test_law_of_groups_preimages():
    law = law_of(SIXTEEN, BUNDLED_VARIABLES["sixteen-atom"])
    assert law == {2: Fraction(3, 2), 3: Fraction(-1), 4: Fraction(3, 2), 5: Fraction(-1)}
    assert sum(law.values()) == 1


def test_mean_law_at_n_equal_one_is_the_law_itself():
    dist = sum_distribution(TWO, BUNDLED_VARIABLES["two-point"], 1)
    assert dist.mass == TWO_POINT
    assert dist.total() == 1


def test_fair_coin_mean_law_at_two():
    space = fair_coin()
    a = {"h": 1, "t": -1}
    dist = sum_distribution(space, a, 2)
    assert dist.mass == {
        Fraction(-1): Fraction(1, 4),
        Fraction(0): Fraction(1, 2),
        Fraction(1): Fraction(1, 4),
    }


def test_signed_two_point_mean_law_at_two():
    dist = sum_distribution(TWO, BUNDLED_VARIABLES["two-point"], 2)
    assert dist.mass == {
        Fraction(0): Fraction(1, 4),
        Fraction(1, 2): Fraction(-3, 2),
        Fraction(1): Fraction(9, 4),
    }
    assert dist.total() == 1


@pytest.mark.parametrize("n", [1, 2, 3, 8])
def test_two_point_mean_law_matches_the_binomial_oracle(n):
    dist = sum_distribution(TWO, BUNDLED_VARIABLES["two-point"], n)
    assert dist.mass == binomial_mean_mass(n)


def test_total_signed_mass_is_one_at_every_n():
    for name in BUNDLED_SPACES:
        space, var = BUNDLED_SPACES[name], BUNDLED_VARIABLES[name]
        for n in (1, 2, 4, 16, 64):
            assert sum_distribution(space, var, n).total() == 1


def test_convolution_capacity_cap(monkeypatch):
    monkeypatch.setenv("COLLECTIVA_MAX_MEM", "2048")  # cap: 16 support points
    atoms = tuple(f"g{i}" for i in range(17))
    space = SignedProbabilitySpace(atoms, {a: Fraction(1, 17) for a in atoms})
    var = {a: 2**i for i, a in enumerate(atoms)}
    with pytest.raises(CapacityError, match="support exceeded"):
        sum_distribution(space, var, 2)


def test_convolution_env_validation(monkeypatch):
    monkeypatch.setenv("COLLECTIVA_MAX_MEM", "plenty")
    with pytest.raises(InputError, match="COLLECTIVA_MAX_MEM"):
        sum_distribution(TWO, BUNDLED_VARIABLES["two-point"], 2)


def test_convolution_needs_positive_n():
    with pytest.raises(InputError):
        sum_distribution(TWO, BUNDLED_VARIABLES["two-point"], 0)


# --- weak convergence, strong failure ---------------------------------------------------------

def test_linear_test_function_is_exact_at_every_n():
    rows = weak_lln_check(fair_coin(), {"h": 1, "t": -1}, lambda x: x, [1, 2, 4, 8])
    assert all(err == 0 for _, _, err in rows)


def test_square_error_decays_like_one_over_n():
    rows = weak_lln_check(
        TWO, BUNDLED_VARIABLES["two-point"], lambda x: x * x, [1, 2, 4, 64, 256]
    )
    for n, ef, err in rows:
        assert ef == mean_square_expectation(n)
        assert err == Fraction(3, 4) / n
    assert rows[-1][2] == Fraction(3, 4, ) / 256


def test_weak_error_is_nonincreasing_for_all_shipped_polynomials():
    schedule = [1, 2, 4, 8, 16, 32, 64, 128, 256]
    quartic = ("x^4 (not shipped)", lambda x: (x * x) * (x * x))
    for name in BUNDLED_SPACES:
        space, var = BUNDLED_SPACES[name], BUNDLED_VARIABLES[name]
        laws = mean_law_table(space, var, schedule)
        m = expectation_signed(space, var)
        for fname, f in list(POLY_TEST_FUNCTIONS) + [quartic]:
            errs = [abs(laws[n].expect(f) - f(m)) for n in schedule]
            assert all(b <= a for a, b in zip(errs, errs[1:])), (name, fname)
            if (fname, f) == quartic:
                # the quartic decays too (<= 1/64 here) but on this law
                # family it cannot promise the shipped functions' 1% mark
                assert errs[-1] <= Fraction(1, 64) * errs[0], (name, fname)
            else:
                assert errs[-1] <= Fraction(1, 100) * errs[0] or errs[0] == 0, (
                    name,
                    fname,
                )


def test_quartic_misses_the_one_percent_margin_on_the_two_point_law():
    rows = weak_lln_check(
        TWO, BUNDLED_VARIABLES["two-point"], lambda x: (x * x) * (x * x), [1, 256]
    )
    assert rows[1][2] > Fraction(1, 100) * rows[0][2]


def test_strong_law_fails_for_the_signed_mean():
    """The signed mean m lies outside the attainable range of the empirical
    mean, so the mass near m stays 0 — no almost-everywhere convergence."""
    m = expectation_signed(TWO, BUNDLED_VARIABLES["two-point"])
    assert m == Fraction(3, 2)
    for n in (1, 4, 16, 32):
        dist = sum_distribution(TWO, BUNDLED_VARIABLES["two-point"], n)
        near = sum(mass for v, mass in dist.mass.items() if abs(v - m) <= Fraction(1, 4))
        assert near == 0


# --- documents ---------------------------------------------------------------------------------

def test_space_document_round_trip(tmp_path):
    doc = {
        "weights": {"w1": "-1/2", "w2": "3/4", "w3": "3/4"},
        "variable": {"w1": 0, "w2": 1, "w3": 2},
    }
    path = tmp_path / "space.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    space, var = load_space(path)
    assert space.weight == THREE.weight
    assert var == BUNDLED_VARIABLES["three-atom"]
    assert space.exact


def test_space_document_accepts_plain_numbers():
    space, var = space_from_document({"weights": {"a": 0.25, "b": 0.75}})
    assert var is None
    assert space.prob({"b"}) == 0.75


def test_malformed_space_documents():
    with pytest.raises(InputError, match="malformed"):
        space_from_document({})
    with pytest.raises(InputError, match="malformed"):
        space_from_document({"weights": {"a": "1/0"}})
    with pytest.raises(InputError, match="malformed"):
        space_from_document(
            {"weights": {"a": "1/2", "b": "1/2"}, "variable": {"a": 1}}
        )
