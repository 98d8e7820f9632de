from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

import oracles
from symgeo.geography import (
    BLOW_UP, CP2_SUM, K3_SUM, NEG_INF, EnvelopeFn, HalfPlane, Move, Piece, Witness, concavity_check,
    domain_from_moves, known_tables, sample_points, sequence_bounded, sequence_probe, to_csv,
    upper_envelope,
)

witness_sets = st.lists(st.tuples(st.integers(-40, 40), st.integers(-20, 20)), min_size=1, max_size=8)
rationals = st.fractions(min_value=-10, max_value=10, max_denominator=12)


@given(witness_sets, rationals)
def test_envelope_matches_brute_force(ws, b):
    env = upper_envelope([Witness(c, s) for c, s in ws])
    assert env.evaluate(b) == oracles.brute_envelope(ws, b)
    assert concavity_check(env)


@given(witness_sets, rationals, rationals)
def test_restricted_envelope(ws, lo, width):
    hi = lo + abs(width)
    env = upper_envelope([Witness(c, s) for c, s in ws], lo, hi)
    assert concavity_check(env)
    for b in sample_points(lo, hi, 5):
        assert env.evaluate(b) == oracles.brute_envelope(ws, b)
    assert env.evaluate(hi + 1) == NEG_INF
    for x in env.breakpoints:
        assert lo < x < hi


@given(witness_sets, st.tuples(st.integers(-40, 40), st.integers(-20, 20)), rationals)
def test_adding_witnesses_never_raises_the_envelope(ws, extra, b):
    a = upper_envelope([Witness(c, s) for c, s in ws])
    z = upper_envelope([Witness(c, s) for c, s in ws + [extra]])
    assert z.evaluate(b) <= a.evaluate(b)


def test_breakpoint_exact():
    env = upper_envelope([Witness(3, 1, "CP2"), Witness(12, -8, "E1")])
    assert env.breakpoints == (F(1),)
    assert env.evaluate(1) == 4
    assert [pc.label for pc in env.pieces] == ["CP2", "E1"]
    assert all(pc.status == "upper_envelope" for pc in env.pieces)


def test_duplicate_and_parallel_lines():
    env = upper_envelope([Witness(1, 1), Witness(1, 1), Witness(0, 1)])
    assert len(env.pieces) == 1 and env.pieces[0].p == 0
    with pytest.raises(ValueError):
        upper_envelope([])
    with pytest.raises(ValueError):
        upper_envelope([Witness(0, 0)], 1, 0)


def test_concavity_check_rejects_convex():
    f = EnvelopeFn(F(-1), F(1), (
        Piece(F(-1), F(0), F(0), F(-1)),
        Piece(F(0), F(1), F(0), F(1))))
    assert not concavity_check(f)


def test_known_tables():
    st_ = known_tables("symplectic_trivial")
    assert st_.status_at(F(-2)) == "unknown"
    assert st_.status_at(-1) == "exact"
    assert st_.evaluate(0) == 3
    assert st_.evaluate(2) == NEG_INF
    z6 = known_tables("smooth_Z6")
    assert z6.evaluate(0) == 6 and z6.status_at(0) == "exact"
    assert z6.status_at(F(1, 2)) == "upper_bound"
    with pytest.raises(ValueError):
        known_tables("nope")


def test_moves_to_half_planes():
    D = domain_from_moves([BLOW_UP, CP2_SUM])
    assert D.check_cone()
    assert D.contains(1, 0) and D.contains(1, 1) and not D.contains(1, 2)
    assert str(D.constraints[0]) == "a >= b"
    assert str(D.constraints[1]) == "a >= -b"
    k3 = domain_from_moves([K3_SUM]).constraints[0]
    assert k3.b_bound(1) == ("<=", F(3, 2))
    assert domain_from_moves([Move("x", 1, 0, repeatable=False)]).constraints == ()
    assert HalfPlane(F(0), F(1)).b_bound(5) == (">=", 0)


def test_sequence_predicates():
    assert sequence_bounded("stipsicz_nonclosed", 1, 2) is False
    assert sequence_bounded("stipsicz_nonclosed", -1, -2) is True
    assert sequence_bounded("stipsicz_ray", 3, -10) is True
    assert sequence_bounded("stipsicz_ray", 1, -4) is False
    assert sequence_probe("stipsicz_ray", 1, -4, kmax=100) is False
    with pytest.raises(ValueError):
        sequence_bounded("other", 0, 0)


def test_csv_format():
    text = to_csv(known_tables("minimal_trivial"), sample_points(-1, F(3, 2), 11))
    lines = text.splitlines()
    assert lines[0] == "# format_version=1"
    assert lines[1] == "b,value,label,status"
    assert "1,4,CP2,exact" in lines
    assert len(lines) == 13
