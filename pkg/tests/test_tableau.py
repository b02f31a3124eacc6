import numpy as np
import pytest

from sspint import methods
from sspint.tableau import (
    ButcherTableau,
    ShuOsherForm,
    abscissas_nondecreasing,
    butcher_to_canonical_shu_osher,
    order_residuals,
    parse_coefficient,
    shu_osher_to_butcher,
)


def classic_33_so():
    return ShuOsherForm.from_entries(
        3,
        {(1, 0): 1, (2, 0): "3/4", (2, 1): "1/4", (3, 0): "1/3", (3, 2): "2/3"},
        {(1, 0): 1, (2, 1): "1/4", (3, 2): "2/3"},
    )


def test_parse_coefficient():
    assert parse_coefficient("1/3") == pytest.approx(1.0 / 3.0, abs=0)
    assert parse_coefficient("0.25") == 0.25
    assert parse_coefficient(2) == 2.0
    # exact rational parsing: 1/3 as a Fraction rounds once, not twice
    assert parse_coefficient("2/6") == parse_coefficient("1/3")


def test_tableau_rejects_nonexplicit_A():
    A = np.array([[0.0, 0.5], [0.5, 0.0]])
    with pytest.raises(ValueError):
        ButcherTableau.from_arrays(A, [0.5, 0.5])


def test_tableau_rejects_bad_weights():
    A = np.array([[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(ValueError):
        ButcherTableau.from_arrays(A, [0.5, 0.6])


def test_tableau_rejects_inconsistent_c():
    A = np.array([[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(ValueError):
        ButcherTableau.from_arrays(A, [0.5, 0.5], c=[0.0, 0.5])


def test_tableau_c_defaults_to_row_sums():
    A = [[0, 0], [1, 0]]
    t = ButcherTableau.from_arrays(A, ["1/2", "1/2"])
    assert np.allclose(t.c, [0.0, 1.0])
    assert t.stages == 2


def test_tableau_json_round_trip(tmp_path):
    t = methods.get("eSSPRK+(5,4)").tableau
    path = tmp_path / "t.json"
    t.dump_json(path)
    t2 = ButcherTableau.load_json(path)
    assert np.array_equal(t.A, t2.A)
    assert np.array_equal(t.b, t2.b)
    assert np.array_equal(t.c, t2.c)
    assert t2.name == t.name and t2.order == t.order


def test_shu_osher_row_sums_enforced():
    with pytest.raises(ValueError):
        ShuOsherForm.from_entries(2, {(1, 0): 0.9, (2, 1): 1.0}, {(1, 0): 0.5})


def test_shu_osher_admissibility():
    so = classic_33_so()
    assert so.is_ssp_admissible()
    bad = ShuOsherForm.from_entries(
        2, {(1, 0): 1.0, (2, 0): 1.5, (2, 1): -0.5}, {(1, 0): 1.0, (2, 1): 0.5}
    )
    assert not bad.is_ssp_admissible()


def test_shu_osher_to_butcher_classic_33():
    t = shu_osher_to_butcher(classic_33_so())
    assert np.allclose(t.A, [[0, 0, 0], [1, 0, 0], [0.25, 0.25, 0]], atol=1e-15)
    assert np.allclose(t.b, [1 / 6, 1 / 6, 2 / 3], atol=1e-15)
    assert np.allclose(t.c, [0.0, 1.0, 0.5], atol=1e-15)


def test_canonical_round_trip_at_radius():
    for name, r in (("eSSPRK(3,3)", 1.0), ("eSSPRK+(4,3)", 20.0 / 11.0),
                    ("eSSPRK+(5,4)", 1.3465)):
        t = methods.get(name).tableau
        so = butcher_to_canonical_shu_osher(t, r)
        t2 = shu_osher_to_butcher(so)
        assert np.allclose(t.A, t2.A, atol=1e-10)
        assert np.allclose(t.b, t2.b, atol=1e-10)


def test_canonical_round_trip_r_zero():
    t = methods.get("eSSPRK(3,3)").tableau
    so = butcher_to_canonical_shu_osher(t, 0.0)
    t2 = shu_osher_to_butcher(so)
    assert np.allclose(t.A, t2.A, atol=1e-14)
    assert np.allclose(t.b, t2.b, atol=1e-14)


def test_canonical_at_one_recovers_classic_33_coefficients():
    t = methods.get("eSSPRK(3,3)").tableau
    so = butcher_to_canonical_shu_osher(t, 1.0)
    ref = classic_33_so()
    assert np.allclose(so.alpha, ref.alpha, atol=1e-13)
    assert np.allclose(so.beta, ref.beta, atol=1e-13)


def test_order_residuals_classic():
    rep = order_residuals(methods.get("eSSPRK(3,3)").tableau)
    assert rep.achieved_order == 3
    assert abs(rep.residuals["b.e"]) <= 1e-14
    assert abs(rep.residuals["bAc"]) <= 1e-14
    rep2 = order_residuals(methods.get("eSSPRK(2,2)").tableau)
    assert rep2.achieved_order == 2


def test_abscissas_nondecreasing_flag():
    assert not abscissas_nondecreasing(methods.get("eSSPRK(3,3)").tableau)
    assert abscissas_nondecreasing(methods.get("eSSPRK+(3,3)").tableau)
