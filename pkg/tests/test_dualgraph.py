from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from tbound.dualgraph import (
    ContractionStep,
    InputError,
    ampleness_screen,
    blow_down_at,
    build_configuration,
    check_component_pairings,
    contract,
    contract_to_minimal,
    contraction_outcomes,
    exceptional_divisors,
    id_key,
    is_realizable,
    order_sensitivity,
    pairing,
    validate_config,
)
from tbound.search import ScanLimits, build_optimal_config, random_blowup_generator, round_trip_problems

from conftest import FIXTURE_FILES
from tbound.configfile import load_config


def test_id_order_is_natural():
    assert sorted(["T10.1", "T2.1", "F1", "T2.10", "T2.2"], key=id_key) == ["F1", "T2.1", "T2.2", "T2.10", "T10.1"]


def test_blow_down_minus_two_neighbour():
    c = build_configuration(0, [], [("A", -2), ("E", -1)], [("A", "E", 1)])
    s, step = blow_down_at(c, "E")
    a = s.curves["A"]
    assert (a.self_int, a.k_degree, a.node_count) == (-1, -1, 0)
    assert step.neighbors == (("A", 1),)


def test_blow_down_tangent_neighbour():
    c = build_configuration(0, [], [("A", -5), ("E", -1)], [("A", "E", 2)])
    a = blow_down_at(c, "E")[0].curves["A"]
    assert (a.self_int, a.k_degree, a.node_count) == (-1, 1, 1)
    assert not a.is_contractible


def test_blow_down_joins_neighbours(fixture_config):
    c = fixture_config("c1_example")
    s, _ = blow_down_at(c, "F3")
    assert c.weight("T1.3", "T1.5") == 0 and s.weight("T1.3", "T1.5") == 1


def test_blow_down_rejects_non_minus_one():
    c = build_configuration(0, [[4]])
    with pytest.raises(InputError):
        blow_down_at(c, "T1.1")


def test_contract_trivial_cases():
    c = build_configuration(0, [[4]])
    s, m, log = contract_to_minimal(c)
    assert m == 0 and log == () and s.curves == c.curves
    c = build_configuration(0, [], [("E", -1)])
    s, m, _ = contract_to_minimal(c)
    assert m == 1 and not s.curves


def test_optimal_example_m():
    assert contract_to_minimal(build_optimal_config(1, 2))[1] == 9


def test_tower_divisors():
    c = build_configuration(0, [], [("B1", -2), ("B2", -1)], [("B1", "B2", 1)])
    _s, _m, log = contract_to_minimal(c)
    e1, e2 = exceptional_divisors(log)
    assert e1.coefficients == {"B1": 1, "B2": 1} and e2.coefficients == {"B2": 1}
    assert pairing(c, e1.coefficients, e1.coefficients) == -1
    assert pairing(c, e1.coefficients, e2.coefficients) == 0


def test_single_divisor():
    c = build_configuration(0, [], [("E", -1)])
    (e,) = exceptional_divisors(contract_to_minimal(c)[2])
    assert e.coefficients == {"E": 1} and pairing(c, e.coefficients, e.coefficients) == -1


def test_t21_divisor_is_reduced(fixture_config):
    r = contract(fixture_config("t21_t21_example"))
    for e in r.divisors:
        assert set(e.coefficients.values()) == {1}


def test_validation_errors():
    with pytest.raises(InputError):
        build_configuration(0, [[2, 2]])
    with pytest.raises(InputError):
        build_configuration(0, [[4]], [("E", -1)], [("E", "T1.1", 0)])
    with pytest.raises(InputError):
        build_configuration(0, [[4]], [("E", -1)], [("E", "T3.1", 1)])
    c = build_configuration(0, [[4, 2, 6, 2, 2]])
    assert validate_config(c).ok and c.chain_data[0].n == 10


def test_screen_examples():
    c = build_configuration(0, [[2, 5, 3], [2, 5, 3]], [("F", -1)], [("F", "T1.3", 1), ("F", "T2.3", 1)])
    rep = ampleness_screen(c)
    assert rep.passed and rep.values["F"] == -1 + F(6, 5)
    for chain in ([2, 5], [2, 2, 6]):
        c = build_configuration(0, [chain], [("F", -1)], [("F", "T1.1", 1), ("F", f"T1.{len(chain)}", 1)])
        assert not ampleness_screen(c).passed
    c = build_configuration(0, [[4]], [("G", -2)])
    assert not ampleness_screen(c).passed


def test_invariants_c1(fixture_config):
    inv = contract(fixture_config("c1_example")).invariants
    assert (inv.lam, inv.kw2_blowdown, inv.ks2) == (0, 1, 0)


def test_invariants_without_blowups():
    c = build_configuration(3, [[2, 5, 3], [4]])
    inv = contract(c).invariants
    assert inv.m == 0
    assert inv.delta_k == (2 + 1) + (0 + 1)
    assert inv.lam == (2 + 2) + (0 + 2)


@pytest.mark.parametrize("path", FIXTURE_FILES, ids=lambda p: p.stem)
def test_fixture_engine_identities(path):
    c = load_config(path)
    r = contract(c)
    assert not check_component_pairings(c, r.divisors)
    assert is_realizable(c, r.log)
    assert order_sensitivity(c) == []


def test_order_dependence_is_reported():
    # F meets T1.2 and T1.4 of [2,2,2,7]; two (-1)-curves appear and meet
    c = build_configuration(0, [[2, 2, 2, 7]], [("F1", -1)], [("F1", "T1.2", 1), ("F1", "T1.4", 1)])
    assert len(contraction_outcomes(c)) > 1
    assert order_sensitivity(c)


def test_realizability_rule():
    c = build_configuration(0, [], [("A", -1), ("B", -1), ("C", -1), ("E", -1)])
    three_later = [ContractionStep("E", (("A", 1), ("B", 1), ("C", 1))), ContractionStep("A", ()),
                   ContractionStep("B", ()), ContractionStep("C", ())]
    assert not is_realizable(c, three_later)
    tangent_later = [ContractionStep("E", (("A", 2),)), ContractionStep("A", ())]
    assert not is_realizable(c, tangent_later)
    two_later = [ContractionStep("E", (("A", 1), ("B", 1))), ContractionStep("A", ()), ContractionStep("B", ())]
    assert is_realizable(c, two_later)


def test_generator_trivial_cases():
    h = next(random_blowup_generator(ScanLimits(max_blowups=0, seed=3), 1))
    assert h.m == 0 and h.config.curves == h.seed.curves


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip(seed):
    for h in random_blowup_generator(ScanLimits(max_blowups=6, seed=seed, max_chain_len=5), 3):
        assert round_trip_problems(h) == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_divisor_identities_on_histories(seed):
    for h in random_blowup_generator(ScanLimits(max_blowups=8, seed=seed, max_chain_len=5), 2):
        r = contract(h.config)
        assert not check_component_pairings(h.config, r.divisors)
        assert r.invariants.kw2_blowdown == r.invariants.kw2_pairing
        assert is_realizable(h.config, r.log)
