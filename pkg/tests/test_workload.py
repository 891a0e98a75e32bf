import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcesim.substrate import build_custom, build_fat_tree
from vcesim.workload import (
    EmpiricalCostTable,
    PeakBenefit,
    RandomBenefit,
    ReqSizeBenefit,
    VceSizeBenefit,
    WaveBenefit,
    build_empirical_cost_table,
    generate_sequence,
    generation_domain,
    read_sequence_csv,
    round_half_up,
    write_sequence_csv,
)


def test_request_intervals_default_caps():
    seq = generate_sequence(3, 2000, RandomBenefit())
    assert {r.n_vms for r in seq} <= set(range(3, 15))
    assert {r.bandwidth for r in seq} <= set(range(4, 13))
    assert {r.compute for r in seq} <= set(range(4, 21))
    assert all(r.benefit >= 1 for r in seq)
    assert [r.index for r in seq] == list(range(1, 2001))


def test_sequence_replay_is_identical():
    a = generate_sequence(11, 300, RandomBenefit())
    b = generate_sequence(11, 300, RandomBenefit())
    assert a == b
    c = generate_sequence(12, 300, RandomBenefit())
    assert a != c


def test_minimum_size_request_is_3_4_4():
    lo_n, lo_b, lo_c = zip(
        *[(r.n_vms, r.bandwidth, r.compute) for r in generate_sequence(5, 5000, RandomBenefit())]
    )
    assert (min(lo_n), min(lo_b), min(lo_c)) == (3, 4, 4)


def test_round_half_up():
    assert round_half_up(2.5) == 3
    assert round_half_up(2.49) == 2
    assert round_half_up(4.0) == 4


def test_random_benefit_bounds_and_mean():
    rng = np.random.default_rng(9)
    pattern = RandomBenefit()
    draws = [pattern.benefit(i, 3, 4, 4, rng) for i in range(100_000)]
    assert min(draws) >= 1 and max(draws) <= 1000
    # mean of U{1..1000} is 500.5, sigma of the sample mean ~0.913
    assert abs(np.mean(draws) - 500.5) < 3 * 0.913
    constant = RandomBenefit(5, 5)
    assert constant.benefit(1, 3, 4, 4, rng) == 5


def test_random_benefit_validation():
    with pytest.raises(ValueError):
        RandomBenefit(0, 10)
    with pytest.raises(ValueError):
        RandomBenefit(10, 9)


def test_reqsize_values():
    p = ReqSizeBenefit()
    assert p.benefit(1, 3, 4, 4, None) == 24
    assert p.benefit(1, 14, 12, 20, None) == 448
    assert p.benefit(1, 5, 2, 3, None) == 25


def test_reqsize_ratio_bound():
    seq = generate_sequence(2, 4000, ReqSizeBenefit())
    benefits = [r.benefit for r in seq]
    assert min(benefits) >= 24 and max(benefits) <= 448
    assert max(benefits) / min(benefits) <= 19


def test_wave_shape():
    p = WaveBenefit()
    values = [p.benefit(i, 3, 4, 4, None) for i in range(1, 10_001)]
    assert min(values) >= 100 and max(values) <= 700
    assert p.benefit(16, 3, 4, 4, None) == 700
    assert round_half_up(300 * math.sin(0.0) + 400) == 400


def test_wave_validation():
    with pytest.raises(ValueError):
        WaveBenefit(amplitude=400.0, offset=400.0)


def test_peak_pattern():
    p = PeakBenefit(period=100, peak_value=1000, base_value=1)
    assert p.benefit(1, 3, 4, 4, None) == 1000
    assert p.benefit(101, 3, 4, 4, None) == 1000
    assert all(p.benefit(i, 3, 4, 4, None) == 1 for i in range(2, 101))
    every = PeakBenefit(period=1, peak_value=7, base_value=2)
    assert all(every.benefit(i, 3, 4, 4, None) == 7 for i in range(1, 20))


def test_sequence_csv_roundtrip(tmp_path):
    seq = generate_sequence(4, 50, ReqSizeBenefit())
    path = tmp_path / "seq.csv"
    write_sequence_csv(path, seq)
    assert read_sequence_csv(path) == seq


def test_cost_table_lookup_and_fallback():
    table = EmpiricalCostTable({(3, 4, 4): 10.0, (5, 6, 7): 20.0}, {(3, 4, 4): 2, (5, 6, 7): 1})
    assert table.lookup(3, 4, 4) == 10.0
    # (4, 4, 4) is L1-distance 1 from (3,4,4) and 5 from (5,6,7)
    assert table.lookup(4, 4, 4) == 10.0
    with pytest.raises(KeyError):
        table.lookup(4, 4, 4, fallback=False)
    # equidistant: ties break to the smaller triple
    tie = EmpiricalCostTable({(3, 4, 4): 1.0, (5, 4, 4): 2.0}, {})
    assert tie.lookup(4, 4, 4) == 1.0


def test_cost_table_csv_roundtrip(tmp_path):
    table = EmpiricalCostTable({(3, 4, 4): 10.5, (5, 6, 7): 0.0}, {(3, 4, 4): 2, (5, 6, 7): 3})
    path = tmp_path / "table.csv"
    table.to_csv(path)
    back = EmpiricalCostTable.from_csv(path)
    assert back.phi == table.phi
    assert back.samples == table.samples


@pytest.fixture(scope="module")
def desk_table():
    graph = build_fat_tree(4)
    return build_empirical_cost_table(7, 2, 120, graph), graph


def test_build_cost_table_deterministic(desk_table, tmp_path):
    table, graph = desk_table
    again = build_empirical_cost_table(7, 2, 120, graph)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    table.to_csv(a)
    again.to_csv(b)
    assert a.read_bytes() == b.read_bytes()


def test_collocated_request_contributes_zero_phi():
    # one server: whatever fits is fully collocated, so every phi sample is 0
    # and requests without a valid embedding are skipped entirely
    graph = build_custom([("server", 20), ("switch", 0)], [(0, 1, 20)])
    table = build_empirical_cost_table(3, 1, 200, graph)
    assert table.phi
    assert all(v == 0.0 for v in table.phi.values())
    assert all(n * c <= 20 for (n, _, c) in table.phi)


def test_vcesize_scaling_bounds(desk_table):
    table, graph = desk_table
    pattern = VceSizeBenefit.from_table(table, graph)
    values = {
        (n, b, c): pattern.benefit(1, n, b, c, None)
        for n, b, c in generation_domain(20, 20)
    }
    assert min(values.values()) == 1
    assert max(values.values()) == 1000
    # raw value strictly increases in n_vms wherever phi does not decrease
    for (n, b, c), _ in values.items():
        if (n + 1, b, c) in values:
            phi_here = table.lookup(n, b, c)
            phi_next = table.lookup(n + 1, b, c)
            if phi_next >= phi_here:
                raw_here = VceSizeBenefit.raw_value(n, b, c, table, pattern.v_tot, pattern.e_tot)
                raw_next = VceSizeBenefit.raw_value(
                    n + 1, b, c, table, pattern.v_tot, pattern.e_tot
                )
                assert raw_next > raw_here


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10_000), st.integers(1, 50))
def test_peak_period_property(i, period):
    p = PeakBenefit(period=period, peak_value=100, base_value=3)
    expected = 100 if i % period == 1 % period else 3
    assert p.benefit(i, 3, 4, 4, None) == expected
