import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kolmonet.bits import (
    PairFormatError,
    decode_pair,
    encode_pair,
    encode_tuple,
    lex_next,
    parse_bits,
    render_bits,
    strings_upto,
    try_decode_pair,
)
from kolmonet.complexity import (
    ABOVE_BUDGET,
    ComplexityOracle,
    DescriptionSystem,
    RecursionCapExceeded,
    TableConflict,
    derived_quantities,
    exhaustive_complexity,
    is_above,
    profile,
    run,
    shortest_program,
)

bits = st.text(alphabet="01", max_size=8)


def test_pair_code_examples():
    assert encode_pair("0", "111") == "010111"
    assert encode_pair("", "") == "1"
    assert decode_pair("001011") == ("01", "1")


def test_malformed_pairs():
    for s in ["", "0", "00", "001", "0001"]:
        assert try_decode_pair(s) is None
        with pytest.raises(PairFormatError):
            decode_pair(s)


@given(bits, bits)
def test_pair_round_trip(x, y):
    assert decode_pair(encode_pair(x, y)) == (x, y)


def test_tuples_nest_to_the_right():
    assert encode_tuple("0", "1", "") == encode_pair("0", encode_pair("1", ""))
    assert encode_tuple() == ""
    assert encode_tuple("01") == "01"


def test_text_form():
    assert parse_bits("-") == "" and render_bits("") == "-"
    assert parse_bits(" 0110 ") == "0110"
    with pytest.raises(ValueError):
        parse_bits("012")


def test_lex_next():
    assert lex_next("0011") == "0100"
    assert lex_next("111") is None
    assert list(strings_upto(2)) == ["", "0", "1", "00", "01", "10", "11"]


def test_machine_examples():
    sys_ = DescriptionSystem()
    assert run(sys_, "10110", "00") == "0110"
    assert run(sys_, "01", "11") == "11"
    assert run(sys_, "0010", "010111") == "0"
    assert run(sys_, "0011", "010111") == "111"
    assert run(sys_, "011", "11") is None
    assert run(sys_, "0010", "000") is None


def test_apply_runs_the_left_component():
    # [LIT.10, anything] -> "10"
    assert run(DescriptionSystem(), "0001", encode_pair("110", "0")) == "10"


def test_recursion_cap():
    cond = "0"
    for _ in range(4):
        cond = encode_pair("0001", cond)
    shallow = DescriptionSystem(recursion_cap=2)
    with pytest.raises(RecursionCapExceeded):
        run(shallow, "0001", cond)


def test_complexity_examples():
    o = ComplexityOracle()
    assert o.C("0101") == 5
    assert o.C("", "") == 1
    sys_ = DescriptionSystem().extend("", "00", "110")
    assert ComplexityOracle(sys_).C("110", "00") == 4
    assert exhaustive_complexity(sys_, "110", "00", 4) == 4


def test_budget_cutoff():
    o = ComplexityOracle()
    assert is_above(o.C("0101", "", budget=4))
    assert o.C("0101", "", budget=5) == 5
    assert str(ABOVE_BUDGET) == "ABOVE_BUDGET"


def test_witness_is_a_real_program():
    o = ComplexityOracle()
    for u in strings_upto(3):
        for v in strings_upto(3):
            prog = o.witness(u, v)
            assert run(o.system, prog, v) == u
            assert len(prog) == o.C(u, v)


def _table():
    return (DescriptionSystem()
            .extend("", "00", "110")
            .extend("1", "0", "0001")
            .extend("0", "", "10")
            .extend("", encode_pair("1", "0"), "0110"))


@pytest.mark.parametrize("system", [DescriptionSystem(), _table()], ids=["empty", "table"])
def test_oracle_matches_brute_force(system):
    for u in strings_upto(3):
        for v in list(strings_upto(3)) + [encode_pair("1", "0")]:
            assert len(shortest_program(system, u, v)) == exhaustive_complexity(system, u, v, len(u) + 1)


def test_table_extension_rules():
    base = DescriptionSystem()
    ext = base.extend("01", "1", "111000")
    assert ComplexityOracle(ext).C("111000", "1") <= len("01") + 4
    assert ext.extend("01", "1", "111000") is ext
    with pytest.raises(TableConflict):
        ext.extend("01", "1", "0")
    assert base.table == {}


@settings(max_examples=60)
@given(st.lists(st.tuples(st.text("01", max_size=3), st.text("01", max_size=3), st.text("01", max_size=6)),
                max_size=5))
def test_extension_never_raises_complexity(entries):
    system = DescriptionSystem()
    before = ComplexityOracle(system)
    for r, cond, out in entries:
        try:
            system = system.extend(r, cond, out)
        except TableConflict:
            continue
    after = ComplexityOracle(system)
    for u in strings_upto(3):
        for v in ["", "0", "00", "1"]:
            assert after.C(u, v) <= before.C(u, v)


def test_table_file_round_trip(tmp_path):
    system = _table()
    path = tmp_path / "t.tsv"
    system.dump(path)
    assert DescriptionSystem.load(path).table == system.table


def test_self_information():
    o = ComplexityOracle()
    for x in ["01", "110", "0000"]:
        assert o.info(x, x) == o.C(x) - 2


def test_empty_profile():
    prof = profile(ComplexityOracle(), ["", ""])
    assert prof["x"] == prof["y"] == 1
    # the joint string [-, -] is "1", which needs the two-bit LIT program "11"
    assert prof["x,y"] == 2 == exhaustive_complexity(DescriptionSystem(), encode_pair("", ""), "", 3)
    assert len(profile(ComplexityOracle(), ["0", "1", "", "11"]).values) == 15


def test_joint_information_never_exceeds_zero_on_small_universe():
    # measured: max J(x:y) over |x|,|y| <= 4 on the empty table is 0
    o = ComplexityOracle()
    strings = list(strings_upto(4))
    assert max(o.joint_info(x, y) for x in strings for y in strings) == 0


def test_derived_quantities_keys():
    dq = derived_quantities(ComplexityOracle(), ["0", "1", "01"])
    assert "I(x:y|z)" in dq.info and "J(y:z)" in dq.info
    assert dq.profile["x,y"] == dq.profile[("y", "x")]


def _chain_slack(length):
    o = ComplexityOracle()
    strings = list(strings_upto(length))
    return max(abs(o.C((x, y)) - o.C(x) - o.C(y, x)) for x in strings for y in strings)


def test_chain_rule_slack_grows_with_length():
    # frozen measurements: the additive term is not a constant
    assert [_chain_slack(n) for n in (1, 2, 3, 4)] == [1, 3, 5, 7]
