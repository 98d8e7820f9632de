import math

import pytest
from hypothesis import given, strategies as st

import oracles
from symgeo.bounds import (
    CHI, CHI_SIGMA, BoundReport, Contribution, GroupFamily, UnrecognizedFamily, chi_sigma_lower,
    corvague_upper, family_report, free_abelian_chi_lower, gompf_upper, hopf_lower, layered_report,
    parse_family, recognize, symplectic_chi_lower, thm1_upper, witness_checks,
)
from symgeo.presentation import parse_presentation


def test_closed_forms():
    assert hopf_lower(2, 1) == -1
    assert thm1_upper(2, 1) == (48, -32)
    assert gompf_upper(0, 0) == (12, -8)
    assert gompf_upper(1, 1, spin=True) == (96, -64)
    assert corvague_upper(6, 12, 2, 1) == 42
    with pytest.raises(ValueError):
        corvague_upper(3, 12, 2, 1)
    assert corvague_upper(3, 4, 2, 1, hypothetical=True) == 15


def test_free_abelian_scan():
    for n in range(0, 40):
        v = free_abelian_chi_lower(n)
        assert v == oracles.free_abelian_lower_table(n)
        h = hopf_lower(n, math.comb(n, 2))
        if n not in (0, 1, 3, 5):
            assert v - h == (0 if n % 8 in (1, 4) else 1)
    assert free_abelian_chi_lower(9) == 20


@given(st.integers(0, 30))
def test_parity_lower_bounds(b1):
    # chi + sigma = 2 - 2 b1 + 2 b+ with b+ >= 1 and 1 - b1 + b+ even
    bp = min(b for b in range(1, 4) if (1 - b1 + b) % 2 == 0)
    assert chi_sigma_lower(b1) == 2 - 2 * b1 + 2 * bp
    assert symplectic_chi_lower(b1) == 2 - 2 * b1 + bp


@pytest.mark.parametrize("text,lo,hi", [
    ("<x,y | [x,y]>", 0, 0),
    ("<a | a^5>", 3, 10),
    ("<x | >", 2, 12),
])
def test_layered_examples(text, lo, hi):
    R = layered_report(parse_presentation(text))
    assert (R.lower, R.upper) == (lo, hi)


def test_layered_chi_sigma_of_free_cyclic():
    R = layered_report(parse_presentation("<x|>"), CHI_SIGMA)
    assert R.exact and R.lower == 4


def test_z6_chi_sigma_congruence():
    R = family_report(parse_family("zn:6"), CHI_SIGMA)
    assert (R.lower, R.upper) == (0, 4)
    assert R.congruence == (4, 0)
    assert family_report(parse_family("zn:6")).exact


def test_unrecognized_presentation_caveat():
    R = layered_report(parse_presentation("<a,b | a^2 b^3 a b>"))
    assert any("unknown" in c for c in R.caveats)
    assert R.upper == 12 * 4


def test_recognize():
    assert recognize(parse_presentation("<a,b,c,d | [a,b][c,d]>")) == GroupFamily("SurfaceGroup", 2)
    assert recognize(parse_presentation("<a,b,c | [a,b],[a,c],[b,c]>")) == GroupFamily("FreeAbelian", 3)
    assert recognize(parse_presentation("<a,b | >")) == GroupFamily("Free", 2)
    assert recognize(parse_presentation("<a | a^4>")) == GroupFamily("Cyclic", 4)


def test_parse_family():
    assert parse_family("cyclic:0") == GroupFamily("FreeAbelian", 1)
    assert parse_family("cyclic:1") == GroupFamily("Trivial")
    assert str(parse_family("free:1")) == "Z"
    assert parse_family("gpf:2,inf").abelian().rank == 1
    for bad in ("cyclic:x", "blah:3", "gpf:", "zn:-1"):
        with pytest.raises(UnrecognizedFamily):
            parse_family(bad)


@pytest.mark.parametrize("spec", ["trivial", "free:1", "free:3", "cyclic:2", "cyclic:5",
                                  "zn:1", "zn:3", "zn:4", "zn:7", "surface:2", "gpf:2,3",
                                  "gpf:2,0,0", "gpf:0,0,0"])
@pytest.mark.parametrize("target", [CHI, CHI_SIGMA])
def test_family_reports_consistent(spec, target):
    R = family_report(parse_family(spec), target)
    assert R.lower is None or R.upper is None or R.lower <= R.upper
    for d in witness_checks(R):
        assert d["ok"], d
    for c in R.contributions:
        if c.witness is not None:
            w = c.witness
            assert c.value == (w.chi if target == CHI else w.chi + w.sigma)
            assert w.pi1.abelianization() == parse_family(spec).abelian()
    assert R.to_dict()["format_version"] == 1
    assert R.to_text()


def test_bmy_is_flagged_conjectural():
    R = family_report(parse_family("zn:7"), CHI, assume_bmy=True)
    bmy = [c for c in R.contributions if c.name == "bmy"]
    assert bmy and bmy[0].conjectural


def test_inconsistent_report_raises():
    with pytest.raises(AssertionError):
        BoundReport(CHI, "G", (Contribution("a", "lower", 5, "x"), Contribution("b", "upper", 4, "y")))
