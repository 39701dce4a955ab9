import itertools

import pytest

import brute
from kolmonet.bits import encode_pair
from kolmonet.complexity import ComplexityOracle
from kolmonet.networks import Metrics, TransmissionPair, cut_bound
from kolmonet.search import (
    ParetoPoint,
    SearchBudget,
    consistent_pair_witness,
    enumerate_feasible,
    exact_f_min,
    info_distance_witness,
    pareto_frontier,
    validate_witness,
)

O = ComplexityOracle()


def _point(p, q, **vals):
    base = dict(achieved_epsilon=0, cp=0, cq=0, cpq=0, total_disclosure=0, private_disclosure=0)
    base.update(vals)
    return ParetoPoint(TransmissionPair(p, q), Metrics(**base))


def test_literal_pair_always_found():
    pts = list(enumerate_feasible("e", {"x": "0", "y": "0", "z": "0"}, 6, O))
    assert any(pt.pair == TransmissionPair("10", "10") for pt in pts)


def test_zero_epsilon_gives_nothing():
    assert list(enumerate_feasible("e", {"x": "0", "y": "0", "z": "0"}, 0, O)) == []


def test_stream_order_is_length_lex():
    pts = list(enumerate_feasible("c", {"x": "01", "y": "1"}, 5, O, SearchBudget(4)))
    keys = [pt.key() for pt in pts]
    assert keys == sorted(keys)


def test_pair_cap_marks_partial():
    stream = enumerate_feasible("c", {"x": "01", "y": "1"}, 5, O, SearchBudget(4, max_pairs=3))
    assert len(list(stream)) == 3 and stream.partial
    full = enumerate_feasible("c", {"x": "01", "y": "1"}, 5, O, SearchBudget(4))
    list(full)
    assert not full.partial


def test_budget_validation():
    with pytest.raises(ValueError):
        SearchBudget(-1)


@pytest.mark.parametrize("x,y", [("00", "01"), ("1", ""), ("11", "11")])
def test_stream_matches_brute_force_on_c(x, y):
    s = {"x": x, "y": y}
    got = {(pt.pair.p, pt.pair.q) for pt in enumerate_feasible("c", s, 5, O, SearchBudget(6))}
    assert got == brute.feasible_pairs("c", s, 5, 6)


def test_frontier_trivial_cases():
    single = _point("0", "1", cp=3)
    assert pareto_frontier([single]).points == [single]
    a = _point("0", "", cp=1, cq=5)
    b = _point("1", "", cp=5, cq=1)
    front = pareto_frontier([a, b], ("cp", "cq"))
    assert front.points == [a, b] and not front.simultaneous


def test_frontier_ties_keep_lex_least():
    a = _point("11", "", cp=1)
    b = _point("0", "1", cp=1)
    front = pareto_frontier([a, b], ("cp",))
    assert front.points == [b] and front.simultaneous and front.simultaneous_point is b


def test_frontier_rejects_unknown_objective():
    with pytest.raises(ValueError):
        pareto_frontier([_point("", "")], ("speed",))


def test_frontier_matches_dominance_recount_on_e():
    s = {"x": "1", "y": "01", "z": "0"}
    pts = list(enumerate_feasible("e", s, 5, O, SearchBudget(5)))
    objectives = ("cp", "cq", "cpq", "private_disclosure")
    vec = lambda pt: tuple(getattr(pt.metrics, o) for o in objectives)
    front = pareto_frontier(pts, objectives)
    assert {vec(pt) for pt in front.points} == brute.dominance_frontier(map(vec, pts))
    for kept in front.points:
        same = [pt for pt in pts if vec(pt) == vec(kept)]
        assert kept.key() == min(pt.key() for pt in same)


def test_info_distance_on_equal_strings():
    rep = info_distance_witness(O, "0110", "0110")
    assert rep.found and rep.pair == TransmissionPair("01", "01")
    assert rep.slack["Cpq"] == O.C(encode_pair("01", "01"))
    assert validate_witness(O, rep, "0110", "0110")


def test_info_distance_literals_within_budget():
    for x, y in itertools.product(["00", "01", "10", "11"], repeat=2):
        rep = info_distance_witness(O, x, y, SearchBudget(3))
        assert rep.found and validate_witness(O, rep, x, y)


def test_absent_witness_is_reported():
    rep = info_distance_witness(O, "0", "1", SearchBudget(0))
    assert not rep.found and "length <= 0" in rep.note


def test_consistent_pair_on_equal_strings():
    rep = consistent_pair_witness(O, "01", "01", "1")
    p, q = rep.pair.p, rep.pair.q
    assert p.startswith(q) or q.startswith(p)


def test_consistent_pair_when_z_is_x():
    rep = consistent_pair_witness(O, "0110", "1", "0110", slack=6)
    assert O.C("0110", "0110") == 2
    assert rep.found and len(rep.pair.p) <= 2 + 6
    assert validate_witness(O, rep, "0110", "1", "0110", slack=6)


def test_consistent_pair_revalidates_on_two_bit_instances():
    for x, y, z in itertools.product(["00", "01", "10", "11"], repeat=3):
        rep = consistent_pair_witness(O, x, y, z, SearchBudget(4))
        assert rep.found and validate_witness(O, rep, x, y, z)


def test_f_min_on_repeated_strings():
    rep = exact_f_min(O, "01", "01", "1", "1")
    assert rep.slack["f"] <= O.C(encode_pair("01", "01"))


def test_f_min_against_cut_bound():
    c_model = 8
    for x, y, w, z in itertools.product(["", "0", "11"], repeat=4):
        s = {"w": w, "x": x, "y": y, "z": z}
        rep = exact_f_min(O, x, y, z, w, SearchBudget(4))
        assert rep.found and validate_witness(O, rep, x, y, z, w)
        assert rep.slack["f"] >= O.C(y, x) - c_model
        assert rep.slack["f"] >= cut_bound("a", (2,), s, 0, O, c_model).value


def test_f_min_unrelated_random_string():
    y = "101101"
    rep = exact_f_min(O, "0", y, "", "", SearchBudget(8))
    assert rep.slack["f"] >= len(y) - 8
