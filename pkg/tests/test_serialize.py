"""Round trips and formatting rules for every serialized document type."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from timdof import demand_graph, linear_sim, schemes, serialize, topology
from timdof.errors import InvalidInputError

F = Fraction


class TestFractionText:
    @pytest.mark.parametrize("value,text", [
        (F(1, 2), "1/2"), (F(4), "4/1"), (F(0), "0/1"), (F(-3, 7), "-3/7")])
    def test_always_renders_p_over_q(self, value, text):
        assert serialize.fraction_str(value) == text
        assert serialize.parse_fraction(text) == value

    def test_integers_accepted_on_parse(self):
        assert serialize.parse_fraction("5") == F(5)

    def test_garbage_rejected(self):
        with pytest.raises(InvalidInputError):
            serialize.parse_fraction("three halves")

    @settings(max_examples=50, deadline=None)
    @given(st.fractions(max_denominator=1000))
    def test_round_trip(self, q):
        assert serialize.parse_fraction(serialize.fraction_str(q)) == q


class TestTopologyDocs:
    def test_generated_round_trip(self):
        t = topology.make_locally_connected(6, 2, topology.CYCLIC)
        doc = serialize.topology_to_dict(t)
        assert doc["schema"] == serialize.TOPOLOGY_SCHEMA
        assert "explicit_edges" not in doc
        assert serialize.topology_from_dict(doc) == t

    def test_explicit_round_trip_keeps_edges(self):
        t = topology.explicit_topology(3, [(1, 1), (2, 2), (3, 3), (1, 3)])
        doc = serialize.topology_to_dict(t)
        assert doc["explicit_edges"] == [[1, 1], [1, 3], [2, 2], [3, 3]]
        assert serialize.topology_from_dict(doc) == t

    def test_wrong_schema_rejected(self):
        with pytest.raises(InvalidInputError):
            serialize.topology_from_dict({"schema": "timdof/schedule/v1", "K": 2})


class TestSchemeArtifacts:
    def test_assignment_round_trip_including_unbounded(self):
        a = linear_sim.full_cooperation_assignment(3)
        doc = serialize.assignment_to_dict(a)
        assert doc["budget"] == "unbounded"
        assert serialize.assignment_from_dict(doc) == a
        b = schemes.singleton_assignment([2, 1, 3])
        assert serialize.assignment_from_dict(serialize.assignment_to_dict(b)) == b

    def test_schedule_round_trip_preserves_exact_fractions(self):
        sched = schemes.TdmaSchedule(K=4, entries=(
            (schemes.ServedSet.from_map({1: 1, 3: 3}), F(2, 3)),
            (schemes.ServedSet.from_map({2: 2}), F(1, 3)),
        ))
        doc = serialize.schedule_to_dict(sched)
        assert doc["entries"][0]["fraction"] == "2/3"
        assert serialize.schedule_from_dict(doc) == sched

    def test_dof_result_round_trip_with_and_without_trials(self):
        plain = schemes.DofResult(sum_dof=F(3, 2), K=4, method=schemes.METHOD_LP_BOUND)
        assert serialize.dof_result_from_dict(serialize.dof_result_to_dict(plain)) == plain
        simmed = schemes.DofResult(
            sum_dof=F(2), K=4, method=schemes.METHOD_LINEAR_SIM, trials=3,
            trial_totals=(4, 4, 4), disagreement_rate=F(0), unstable=False)
        assert serialize.dof_result_from_dict(serialize.dof_result_to_dict(simmed)) == simmed

    def test_dof_bound_round_trip_keeps_certificate(self):
        t = topology.make_locally_connected(4, 2, topology.CYCLIC)
        a = schemes.singleton_assignment([1, 2, 3, 4])
        bound = demand_graph.dof_upper_bound_lp(demand_graph.build_demand_graph(t, a))
        doc = serialize.dof_bound_to_dict(bound)
        assert doc["value"] == "4/3"
        got = serialize.dof_bound_from_dict(doc)
        assert got == bound
        assert demand_graph.verify_certificate(got, 4)


class TestSimulationArtifacts:
    def test_scheme_round_trip(self):
        t = topology.make_locally_connected(4, 1, topology.CYCLIC)
        s = linear_sim.random_scheme(
            t, linear_sim.full_cooperation_assignment(4), 2, 0.8, seed=5)
        got = serialize.scheme_from_dict(serialize.scheme_to_dict(s))
        assert got.n == s.n and got.symbol_counts == s.symbol_counts
        assert set(got.precoders) == set(s.precoders)
        for k in s.precoders:
            assert np.allclose(got.precoders[k], s.precoders[k])

    def test_realization_round_trip_is_exact(self):
        t = topology.make_locally_connected(3, 1, topology.TRUNCATED)
        c = linear_sim.sample_channel(t, 2, linear_sim.CONSTANT, seed=8)
        got = serialize.realization_from_dict(serialize.realization_to_dict(c))
        assert got.coherence == c.coherence
        assert np.array_equal(got.h, c.h)

    def test_report_round_trip(self):
        t = topology.make_locally_connected(4, 1, topology.CYCLIC)
        s = linear_sim.random_scheme(
            t, linear_sim.full_cooperation_assignment(4), 2, 1.0, seed=2)
        c = linear_sim.sample_channel(t, 2, seed=3)
        rep = linear_sim.lemma1_check(s, c, (2, 4))
        assert serialize.report_from_dict(serialize.report_to_dict(rep)) == rep


class TestDumps:
    def test_sorted_keys_and_trailing_newline(self):
        text = serialize.dumps({"b": 1, "a": 2})
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')

    def test_loads_inverts_dumps(self):
        doc = serialize.topology_to_dict(topology.make_locally_connected(3, 1, topology.CYCLIC))
        assert serialize.loads(serialize.dumps(doc)) == doc
