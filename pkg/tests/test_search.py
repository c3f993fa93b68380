from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tbound.dualgraph import EngineDefect, ampleness_screen, build_configuration, contract
from tbound.search import (
    MAX_OPTIMAL, ScanLimits, build_optimal_config, build_optimal_example, classification_scan,
    optimal_chain, optimal_closed_forms, random_blowup_generator, round_trip_problems, starc_scan,
    two_chain_scan,
)
from tbound.tchain import is_t_chain


def test_optimal_n1_l2():
    ex = build_optimal_example(1, 2)
    r = ex.report
    assert (r.m, r.R - r.D, r.Z, r.lam, r.kw2 - r.ks2) == (9, 13, 7, 6, 6)
    assert r.ok and r.check("r-d bound").tight


def test_optimal_first_chain_n1_l1():
    data = is_t_chain(optimal_chain(1, 1))
    assert (data.length, data.n, data.d) == (7, 31, 1)
    assert optimal_closed_forms(1, 1)["chains"][0]["index"] == 31


def test_optimal_lambda_n2_l2():
    assert build_optimal_example(2, 2).report.lam == 7


@pytest.mark.parametrize("n, l", [(n, l) for n in range(1, 4) for l in range(1, 4)])
def test_optimal_grid(n, l):
    ex = build_optimal_example(n, l)
    assert ex.report.ok
    # only the a-values of the chains disagree with the stated closed form
    assert len(ex.mismatches) == l


def test_optimal_ratio_increasing_in_n():
    for l in (1, 2, 3):
        ratios = [build_optimal_example(n, l).ratio for n in range(1, 6)]
        assert ratios == sorted(ratios) and len(set(ratios)) == len(ratios)
        assert ratios[0] == Fraction(4 + l + 7, 4 * (1 + l + 3))


def test_optimal_range():
    with pytest.raises(ValueError):
        build_optimal_config(0, 2)
    with pytest.raises(ValueError):
        build_optimal_config(1, MAX_OPTIMAL + 1)


def test_screen_rejects_two_ends_of_short_chain():
    c = build_configuration(0, [[2, 5]], [("F1", -1)], [("F1", "T1.1", 1), ("F1", "T1.2", 1)])
    assert not ampleness_screen(c).passed


@pytest.fixture(scope="module")
def small_scan():
    return classification_scan(ScanLimits(max_curves=8), verify_engine=True)


def test_small_scan_clean(small_scan):
    assert small_scan.ok and small_scan.findings == []
    assert small_scan.counts["survivors"] > 0
    assert small_scan.counts.get("order-dependent m with a K-nonnegative image", 0) == 0
    assert sum(v for k, v in small_scan.histogram.items() if not k.startswith("outside")) > 0


def test_scan_json_deterministic(small_scan):
    again = classification_scan(ScanLimits(max_curves=8), verify_engine=True)
    assert again.to_json() == small_scan.to_json()
    assert "runtime" not in small_scan.to_json()


def test_chain_filter():
    rep = classification_scan(ScanLimits(max_curves=8), chain_filter=lambda chains: len(chains) == 1)
    assert rep.ok
    assert not any(k.startswith("T.") for k, v in rep.histogram.items() if v)


def test_starc_small():
    rep = starc_scan(ScanLimits(max_chain_len=4, max_chains=3))
    assert rep.ok and rep.counts["two-chain scan agrees"] == 1
    assert rep.counts["2 chains"] == len(two_chain_scan(4))


def test_limits_validation():
    with pytest.raises(ValueError):
        ScanLimits(max_curves=0)
    with pytest.raises(ValueError):
        ScanLimits(max_abs_self_int=1)
    with pytest.raises(ValueError):
        ScanLimits(max_blowups=-1)


def test_generator_deterministic():
    a = [(h.m, h.steps) for h in random_blowup_generator(ScanLimits(seed=3), 30)]
    b = [(h.m, h.steps) for h in random_blowup_generator(ScanLimits(seed=3), 30)]
    assert a == b


def test_generator_zero_blowups():
    for h in random_blowup_generator(ScanLimits(max_blowups=0), 10):
        assert h.m == 0 and h.config == h.seed
        assert contract(h.config).invariants.m == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_generator_round_trip(seed):
    (h,) = random_blowup_generator(ScanLimits(seed=seed), 1)
    assert round_trip_problems(h) == []
    assert len(h.config.curves) == len(h.seed.curves) + h.m and h.m <= 10
