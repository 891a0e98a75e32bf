import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vcesim.algorithms import (
    Decision,
    PrimalDualState,
    check_step_ratio,
    covce_cost,
    covce_process,
    covceload_process,
    gvop_process,
    greedy_process,
    run_sequence,
    write_decision_csv,
)
from vcesim.substrate import build_custom
from vcesim.workload import PeakBenefit, RandomBenefit, VCRequest, generate_sequence


def req(n, b, c, benefit, index=1):
    return VCRequest(index, n, b, c, benefit)


@pytest.fixture()
def star():
    """One server (cap 20) behind one switch, edge cap 20."""
    return build_custom([("server", 20), ("switch", 0)], [(0, 1, 20)])


# ---------------------------------------------------------------------------
# covce_cost boundaries
# ---------------------------------------------------------------------------


def test_covce_cost_zero_load_is_exactly_zero():
    assert covce_cost(0, 20, 1.0, 20, 84) == 0.0
    assert covce_cost(0, 7, 123.0, 5, 11) == 0.0


def test_covce_cost_full_load_equals_alpha():
    rng = np.random.default_rng(5)
    for _ in range(200):
        cap = int(rng.integers(1, 1000))
        alpha = float(rng.uniform(1, 10_000))
        c_res = int(rng.integers(1, 500))
        size_g = int(rng.integers(2, 5000))
        value = float(covce_cost(cap, cap, alpha, c_res, size_g))
        assert math.isclose(value, alpha, rel_tol=1e-9)


def test_covce_cost_double_load_alpha_one():
    # closed form: ((1+q)^2 - 1)/q = q + 2 for load = 2*cap at alpha 1
    for size_g, c_res in [(10, 3), (84, 20), (7, 1)]:
        q = size_g * c_res
        value = float(covce_cost(2 * 20, 20, 1.0, c_res, size_g))
        assert math.isclose(value, q + 2, rel_tol=1e-12)


@settings(max_examples=80, deadline=None)
@given(
    st.integers(0, 40),
    st.integers(1, 40),
    st.floats(1.0, 1e4),
    st.integers(1, 100),
    st.integers(2, 1000),
)
def test_covce_cost_monotone_in_load_and_alpha(load, cap, alpha, c_res, size_g):
    here = float(covce_cost(load, cap, alpha, c_res, size_g))
    assert here >= 0.0
    assert float(covce_cost(load + 1, cap, alpha, c_res, size_g)) >= here
    assert float(covce_cost(load, cap, alpha + 1.0, c_res, size_g)) >= here


# ---------------------------------------------------------------------------
# COVCE
# ---------------------------------------------------------------------------


def test_covce_first_request_accepted_with_zero_cost(star):
    state = PrimalDualState(star)
    record = covce_process(state, star, req(5, 4, 4, benefit=7))
    assert record.decision is Decision.ACCEPTED
    assert record.embedding.cost == 0.0
    assert record.z == 7.0
    assert state.alpha == 7.0
    assert state.cum_profit == 7
    assert record.d_dual == 7


def test_covce_full_resource_forces_rejection(star):
    state = PrimalDualState(star)
    first = covce_process(state, star, req(5, 4, 4, benefit=10))
    assert first.decision is Decision.ACCEPTED
    assert state.node_load[0] == 20  # server full
    assert float(state.x_node[0]) == pytest.approx(10.0, rel=1e-9)  # x == alpha
    second = covce_process(state, star, req(1, 4, 4, benefit=9, index=2))
    assert second.decision is Decision.REJECTED
    assert second.embedding.cost >= 9
    assert second.d_primal == 0.0 and second.d_dual == 0


def test_covce_alpha_monotone_and_recompute_consistency(ft4, ft4_sequence):
    result = run_sequence("covce", ft4, ft4_sequence[:150])
    state = result.state
    servers = ft4.server_ids
    expected_nodes = covce_cost(
        state.node_load[servers], ft4.node_caps[servers], state.alpha, ft4.c_v, ft4.size_g
    )
    expected_edges = covce_cost(
        state.edge_load, ft4.edge_caps, state.alpha, ft4.c_e, ft4.size_g
    )
    assert np.array_equal(state.x_node[servers], expected_nodes)
    assert np.array_equal(state.x_edge, expected_edges)
    assert state.alpha == max(r.benefit for r in ft4_sequence[:150])


def test_covce_run_monotonicity(ft4, ft4_sequence):
    state = PrimalDualState(ft4)
    last_alpha, last_p = state.alpha, state.primal_cost
    last_x_edge = state.x_edge.copy()
    last_x_node = state.x_node.copy()
    last_profit = 0
    for request in ft4_sequence[:120]:
        covce_process(state, ft4, request)
        assert state.alpha >= last_alpha
        assert state.primal_cost >= last_p - 1e-12
        assert np.all(state.x_edge >= last_x_edge)
        assert np.all(state.x_node >= last_x_node)
        assert state.cum_profit >= last_profit
        last_alpha, last_p = state.alpha, state.primal_cost
        last_x_edge = state.x_edge.copy()
        last_x_node = state.x_node.copy()
        last_profit = state.cum_profit


def test_covce_step_ratio_checks(ft4, ft4_sequence):
    result = run_sequence("covce", ft4, ft4_sequence[:200])
    for record in result.records:
        assert check_step_ratio(record, ft4)


def test_covce_first_acceptance_primal_delta_at_least_benefit(star):
    state = PrimalDualState(star)
    record = covce_process(state, star, req(5, 4, 4, benefit=7))
    # z alone contributes the full benefit, cap * delta-x adds on top
    assert record.d_primal >= record.benefit
    assert record.d_primal == pytest.approx(
        7.0 + 20 * float(state.x_node[0]) + 20 * float(state.x_edge[0]), rel=1e-12
    )


def test_covce_max_load_stays_below_twice_cap(ft4, ft4_sequence):
    result = run_sequence("covce", ft4, ft4_sequence)
    state = result.state
    servers = ft4.server_ids
    assert np.all(state.node_load[servers] <= 2 * ft4.node_caps[servers])
    assert np.all(state.edge_load <= 2 * ft4.edge_caps)
    # the proof is strict: a touched resource had load < cap beforehand
    assert result.series.violation[-1] <= 2.0


def test_covce_fixed_alpha_mode(star):
    state = PrimalDualState(star, fixed_alpha=50.0)
    record = covce_process(state, star, req(5, 4, 4, benefit=80))
    assert state.alpha == 50.0  # update branch disabled
    assert state.fixed_alpha == 50.0
    result = run_sequence(
        "covce", star, [req(5, 4, 4, benefit=80)], fixed_alpha=50.0
    )
    assert result.fixed_alpha_exceeded
    calm = run_sequence("covce", star, [req(5, 4, 4, benefit=20)], fixed_alpha=50.0)
    assert not calm.fixed_alpha_exceeded
    assert record.decision is Decision.ACCEPTED


def test_covce_invalid_when_nothing_fits(star):
    state = PrimalDualState(star)
    record = covce_process(state, star, req(14, 4, 20, benefit=100))
    assert record.decision is Decision.INVALID
    assert record.d_primal == 0.0 and record.d_dual == 0


# ---------------------------------------------------------------------------
# GVOP
# ---------------------------------------------------------------------------


def test_gvop_first_accept_full_edge_sets_inverse_load():
    # switch first so the logical switch lands there and every path crosses
    # the lone edge: load = cap, so x(e) = 0*2 + (1/w_E)(2-1) = 1/20
    graph = build_custom([("switch", 0), ("server", 20)], [(0, 1, 20)])
    state = PrimalDualState(graph)
    record = gvop_process(state, graph, req(5, 4, 4, benefit=9))
    assert record.decision is Decision.ACCEPTED
    assert record.embedding.ls_node == 0
    assert record.embedding.edge_load == {0: 20}
    assert float(state.x_edge[0]) == pytest.approx(1 / 20)
    assert float(state.x_node[1]) == pytest.approx(1 / 20)
    assert state.max_accepted_w == 40  # 20 edge units + 20 compute units


def test_gvop_rejects_when_cost_reaches_benefit():
    graph = build_custom([("switch", 0), ("server", 20)], [(0, 1, 20)])
    state = PrimalDualState(graph)
    gvop_process(state, graph, req(5, 4, 4, benefit=9))
    # cheapest repeat collocates on the server: 20 compute units at x = 1/20,
    # cost 1.0, and the strict accept test turns the tie into a rejection
    record = gvop_process(state, graph, req(5, 4, 4, benefit=1, index=2))
    assert record.decision is Decision.REJECTED
    assert record.embedding.cost == pytest.approx(1.0)
    assert record.embedding.ls_node == 1


def test_gvop_violation_within_run_bound(ft4, ft4_sequence):
    result = run_sequence("gvop", ft4, ft4_sequence)
    state = result.state
    assert state.max_accepted_w > 0
    bound = math.log2(1 + 3 * state.max_accepted_w * state.max_benefit_seen)
    assert result.series.violation.max() <= bound


# ---------------------------------------------------------------------------
# greedy and COVCEload
# ---------------------------------------------------------------------------


def test_greedy_accepts_any_feasible_and_never_rejects(ft4, ft4_sequence):
    result = run_sequence("greedy", ft4, ft4_sequence[:200])
    decisions = {r.decision for r in result.records}
    assert Decision.REJECTED not in decisions
    assert Decision.ACCEPTED in decisions
    state = result.state
    assert np.all(state.node_load <= ft4.node_caps)
    assert np.all(state.edge_load <= ft4.edge_caps)
    assert np.all(result.series.violation == 1.0)


def test_greedy_accepts_feasible_request_on_empty_substrate(ft4):
    state = PrimalDualState(ft4)
    record = greedy_process(state, ft4, req(3, 4, 4, benefit=1))
    assert record.decision is Decision.ACCEPTED


def test_greedy_exhaustion_is_permanent(ft4):
    probe = req(3, 4, 4, benefit=1)
    requests = []
    base = generate_sequence(17, 300, RandomBenefit())
    for i, r in enumerate(base):
        if i % 10 == 5:
            requests.append(VCRequest(len(requests) + 1, 3, 4, 4, 1))
        else:
            requests.append(
                VCRequest(len(requests) + 1, r.n_vms, r.bandwidth, r.compute, r.benefit)
            )
    result = run_sequence("greedy", ft4, requests)
    first_invalid_probe = next(
        (
            i
            for i, (r, rec) in enumerate(zip(requests, result.records))
            if (r.n_vms, r.bandwidth, r.compute) == (3, 4, 4)
            and rec.decision is Decision.INVALID
        ),
        None,
    )
    assert first_invalid_probe is not None
    later = result.records[first_invalid_probe + 1 :]
    assert all(rec.decision is not Decision.ACCEPTED for rec in later)
    assert probe.benefit == 1  # probes cannot be rejected on benefit grounds


def test_covceload_never_violates(ft4, ft4_sequence):
    result = run_sequence("covceload", ft4, ft4_sequence[:250])
    state = result.state
    assert np.all(state.node_load <= ft4.node_caps)
    assert np.all(state.edge_load <= ft4.edge_caps)
    assert np.all(result.series.violation == 1.0)


def test_covceload_first_request_decision_matches_greedy(ft4):
    # fresh state means zero costs, so the accept test cannot reject
    for seed in (1, 2, 3):
        request = generate_sequence(seed, 1, RandomBenefit())[0]
        a = greedy_process(PrimalDualState(ft4), ft4, request)
        b = covceload_process(PrimalDualState(ft4), ft4, request)
        assert a.decision == b.decision
    small = req(3, 4, 4, benefit=5)
    a = greedy_process(PrimalDualState(ft4), ft4, small)
    b = covceload_process(PrimalDualState(ft4), ft4, small)
    assert a.decision == b.decision == Decision.ACCEPTED


def test_covceload_accepts_fewer_base_requests_than_greedy_on_peaks(ft4):
    sequence = generate_sequence(9, 300, PeakBenefit(period=100, peak_value=1000))
    greedy_result = run_sequence("greedy", ft4, sequence)
    load_result = run_sequence("covceload", ft4, sequence)
    greedy_base = sum(
        1
        for r in greedy_result.records
        if r.decision is Decision.ACCEPTED and r.benefit == 1
    )
    load_base = sum(
        1
        for r in load_result.records
        if r.decision is Decision.ACCEPTED and r.benefit == 1
    )
    assert load_base < greedy_base


# ---------------------------------------------------------------------------
# shared machinery
# ---------------------------------------------------------------------------


def test_runs_are_deterministic(ft4, ft4_sequence):
    for algorithm in ("greedy", "covce", "covceload", "gvop"):
        a = run_sequence(algorithm, ft4, ft4_sequence[:80])
        b = run_sequence(algorithm, ft4, ft4_sequence[:80])
        assert [r.decision for r in a.records] == [r.decision for r in b.records]
        assert a.state.cum_profit == b.state.cum_profit
        assert np.array_equal(a.series.violation, b.series.violation)


def test_primal_feasibility_at_run_end(ft4, ft4_sequence):
    for algorithm in ("covce", "covceload", "gvop"):
        result = run_sequence(algorithm, ft4, ft4_sequence[:200])
        state = result.state
        for index, (request, emb) in state.oracle_returned.items():
            lhs = state.z[index]
            for e, load in emb.edge_load.items():
                lhs += load * float(state.x_edge[e])
            for v, cnt in emb.vm_count.items():
                lhs += cnt * request.compute * float(state.x_node[v])
            assert lhs >= request.benefit * (1 - 1e-9)


def test_unknown_algorithm_rejected(ft4, ft4_sequence):
    with pytest.raises(ValueError):
        run_sequence("simulated-annealing", ft4, ft4_sequence[:1])


def test_check_step_ratio_requires_alpha(ft4, ft4_sequence):
    result = run_sequence("gvop", ft4, ft4_sequence[:5])
    with pytest.raises(ValueError):
        check_step_ratio(result.records[0], ft4)


def test_decision_csv(tmp_path, ft4, ft4_sequence):
    result = run_sequence("covce", ft4, ft4_sequence[:30])
    path = tmp_path / "decisions.csv"
    write_decision_csv(path, result.records)
    lines = path.read_text().splitlines()
    assert lines[0] == (
        "index,algorithm,decision,benefit,embedding_cost,z,alpha,edges_touched,nodes_touched"
    )
    assert len(lines) == 31
    assert lines[1].startswith("1,covce,")
