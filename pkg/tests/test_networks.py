import itertools

import pytest
import sympy

from kolmonet.bits import encode_pair, strings_upto
from kolmonet.complexity import ComplexityOracle, c_model_default
from kolmonet.networks import (
    NOT_A_PROFILE_FUNCTION,
    TOPOLOGIES,
    Claim,
    TransmissionPair,
    all_cuts,
    bound_harness,
    cut_bound,
    cut_exclusions,
    feasibility,
    get_network,
    group_disclosure,
    metrics,
    minimal_value_formulas,
    parse_instance_text,
    quantity_values,
    read_instance,
)
from kolmonet.search import SearchBudget

O = ComplexityOracle()


def test_topology_table():
    assert set(TOPOLOGIES) == set("abcdef")
    assert get_network("b").channels == ("p",)
    assert get_network("c").private == ()
    assert get_network("a").private == ("w", "x")
    with pytest.raises(ValueError):
        get_network("g")


def test_literal_programs_are_feasible_for_short_strings():
    for y, z in itertools.product(["", "0", "11"], repeat=2):
        s = {"x": "01", "y": y, "z": z}
        f = feasibility("e", s, TransmissionPair("1" + y, "1" + z), 5, O)
        assert f.feasible, (s, f.values)
    # a 3-bit y makes C(p|x,y,z) = |p| + 1 = 5, which is not < 5
    assert not feasibility("e", {"x": "", "y": "010", "z": ""}, TransmissionPair("1010", "1"), 5, O).feasible


def test_identity_programs_on_equal_strings():
    assert feasibility("c", {"x": "0110", "y": "0110"}, TransmissionPair("01", "01"), 5, O).feasible


@pytest.mark.parametrize("tag", list("abcdef"))
def test_zero_epsilon_is_infeasible(tag):
    net = get_network(tag)
    s = {v: "" for v in net.variables}
    assert not feasibility(net, s, TransmissionPair("", ""), 0, O).feasible


def test_conditions_are_strict():
    s = {"x": "", "y": "0"}
    f = feasibility("b", s, TransmissionPair("10"), 10, O)
    assert not feasibility("b", s, TransmissionPair("10"), f.achieved_epsilon, O).feasible
    assert feasibility("b", s, TransmissionPair("10"), f.achieved_epsilon + 1, O).feasible


def test_private_disclosure_zero_on_c():
    for x, y in itertools.product(strings_upto(2), repeat=2):
        for p in ["", "01", "1" + y]:
            assert metrics("c", {"x": x, "y": y}, TransmissionPair(p, "1" + x), O).private_disclosure == 0


def test_empty_labels():
    m = metrics("c", {"x": "0", "y": "1"}, TransmissionPair("", ""), O)
    assert m.cpq == O.C(encode_pair("", "")) == 2
    assert m.cp == m.cq == 1


def test_joint_program_leaks_nothing_private_on_e():
    # measured over all strings of length <= 2: the disclosure is exactly 0
    for x, y, z in itertools.product(strings_upto(2), repeat=3):
        p = O.witness(encode_pair(y, z), x)
        assert metrics("e", {"x": x, "y": y, "z": z}, TransmissionPair(p, p), O).private_disclosure == 0


def test_single_channel_topology_ignores_q():
    m1 = metrics("b", {"x": "0", "y": "11"}, TransmissionPair("111", ""), O)
    m2 = metrics("b", {"x": "0", "y": "11"}, TransmissionPair("111", "0000"), O)
    assert m1 == m2 and m1.cpq == O.C("111")


def test_group_disclosure():
    s = {"x": "01", "y": "01", "z": "1"}
    pair = TransmissionPair("01", "110")
    assert group_disclosure("e", s, pair, ["x"], O) == metrics("e", s, pair, O).private_disclosure
    with pytest.raises(ValueError):
        group_disclosure("e", s, pair, ["w"], O)


def test_cut_bound_single_node():
    s = {"w": "", "x": "0", "y": "1101", "z": ""}
    cb = cut_bound("a", (2,), s, 3, O, c_model=4)
    assert cb.raw == O.C("1101", "0")
    assert cb.value == O.C("1101", "0") - 3 - 4


def test_cut_bound_two_nodes_on_f():
    s = {"x": "1", "y": "010", "z": "11"}
    cb = cut_bound("f", (2, 3), s, 2, O, c_model=5)
    assert cb.raw == O.C(encode_pair("010", "11"), "1")
    assert cb.value == cb.raw - 2 * 2 - 5


def test_cut_bound_with_exclusion_choices_on_c():
    s = {"x": "0110", "y": "1"}
    cb = cut_bound("c", (2, 3), s, 1, O, c_model=0)
    both = encode_pair("0110", "1")
    assert cb.choices["C(x,y|x)"] == O.C(both, "0110")
    assert cb.choices["C(x,y|y)"] == O.C(both, "1")
    assert cb.raw == max(cb.choices.values())
    assert cb.value == cb.raw - 2


def test_exclusions_need_decodable_inputs():
    net = get_network("f")
    # y may be dropped: node 2 rebuilds it from x
    dropped = {d for _, _, d in cut_exclusions(net, (2, 3))}
    assert dropped == {(), ("y",)}
    assert all_cuts("f") == [(2,), (3,), (2, 3)]
    assert all_cuts("b") == [(2,)]


def test_default_model_constant():
    assert c_model_default(4) == 12
    cb = cut_bound("b", (2,), {"x": "0", "y": "0110"}, 1, O)
    assert cb.slack == 1 + c_model_default(4)


def test_formulas_on_numbers():
    assert minimal_value_formulas("c", {"C(y|x)": 7, "C(x|y)": 5})["minCpq"] == 7
    f = minimal_value_formulas("f", {"C(y|x)": 1, "C(z|y)": 3, "C(y,z|x)": 4})
    assert f["minPrivate"] == 0 and f["minCpq"] == 4
    a = minimal_value_formulas("a", {"C(y|x)": 1, "C(z|w)": 2})
    assert a["minCpq"] is NOT_A_PROFILE_FUNCTION and a["minPrivate"] is NOT_A_PROFILE_FUNCTION
    with pytest.raises(ValueError):
        minimal_value_formulas("d", {"C(z|x)": 1})


def test_formulas_on_symbols():
    a, b = sympy.symbols("a b", nonnegative=True)
    out = minimal_value_formulas("c", {"C(y|x)": a, "C(x|y)": b})
    assert out["minCpq"] == sympy.Max(a, b)


def test_quantity_values_feed_formulas():
    s = {"x": "0", "y": "01", "z": "1"}
    vals = quantity_values("d", s, O)
    assert vals["I(x:z|y)"] == O.info("0", "1", "01")
    assert set(minimal_value_formulas("d", vals)) == {"minCp", "minCq", "minCpq", "minPrivate"}


def test_instance_files(tmp_path):
    path = tmp_path / "i.txt"
    path.write_text("# instance\nx=01\ny=-\n", encoding="utf-8")
    assert read_instance(path) == {"x": "01", "y": ""}
    assert parse_instance_text("x=1; y=-") == {"x": "1", "y": ""}
    path.write_text("x 01\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_instance(path)


def _instances_a():
    for x, y in itertools.product(strings_upto(2), repeat=2):
        yield {"w": "", "x": x, "y": y, "z": "0"}


def test_harness_lower_bound_has_no_violations():
    eps = 5
    claim = Claim("minCp >= C(y|x)", lambda s, o: o.C(s["y"], s["x"]) - eps - c_model_default(3), "cp", "lower")
    rep = bound_harness(claim, "a", _instances_a(), eps, O, SearchBudget(6))
    assert rep.violations == 0 and rep.instances == 49 and rep.instances_without_pairs == 0


def test_harness_upper_bound_is_attained():
    claim = Claim("minCp <= C(y|x)", lambda s, o: o.C(s["y"], s["x"]), "cp", "upper")
    rep = bound_harness(claim, "a", _instances_a(), 5, O, SearchBudget(6))
    # measured: the least C(p) equals C(y|x) on every instance
    assert rep.violations == 0 and rep.worst_margin == 0


def test_harness_vacuous_claim():
    claim = Claim("0 <= Cp", lambda s, o: 0, "cp", "lower")
    assert bound_harness(claim, "a", _instances_a(), 5, O, SearchBudget(4)).violations == 0
