import math
from fractions import Fraction as Fr

import pytest

from cesaro import weights as wm
from cesaro.embedding import (FORMULAS, OutOfRegimeWarning, Parameters, ReducedProblem,
                              TrivialRegimeError, check_admissibility, classify_regime,
                              copson_to_cesaro, embedding_constant, functional_A, reduce_embedding)
from cesaro.errors import UnsupportedRegimeError
from cesaro.problems import REGIME_PARAMS, fixture

ONE = wm.constant(1.0)


@pytest.mark.parametrize("params,tag", [
    ((Fr(1, 2), 1, Fr(1, 2)), "T1a"),
    ((Fr(1, 2), Fr(3, 4), Fr(1, 2)), "T1b"),
    ((2, 3, 1), "Trivial_p_gt_1"),
    ((Fr(1, 2), Fr(1, 2), Fr(1, 2)), "Unsupported_q_le_p"),
    ((Fr(1, 2), Fr(1, 4), 2), "Unsupported_q_le_p"),
    ((1, 1, 2), "Unsupported_q_le_p"),
    ((1, 2, 1), "T2"),
])
def test_classify_examples(params, tag):
    assert classify_regime(Parameters(*params)).tag == tag


def test_regime_params_land_in_their_regime():
    for tag, prm in REGIME_PARAMS.items():
        reg = classify_regime(Parameters(*prm))
        assert reg.tag == tag and reg.formulas == FORMULAS[tag]


def test_float_parameters_use_tolerance():
    assert classify_regime(Parameters(0.5, 1.0 + 1e-14, 0.5)).tag == "T1a"
    assert classify_regime(Parameters(0.5, 0.5 + 1e-14, 0.5)).tag == "Unsupported_q_le_p"


def test_reduce_examples():
    pr = reduce_embedding(2, 1, 1, 1, ONE, ONE, ONE, ONE)
    assert (pr.params.p, pr.params.q, pr.params.theta) == (Fr(1, 2), Fr(1, 2), Fr(1, 2))
    for w in (pr.u, pr.v, pr.w):
        assert w(3.0) == pytest.approx(1.0)
    pr = reduce_embedding(1, 2, Fr(1, 2), 1, ONE, ONE, ONE, ONE)
    assert (pr.params.p, pr.params.q, pr.params.theta) == (Fr(1, 2), Fr(1), Fr(2))


def test_reduce_weights():
    u1, v1 = wm.analytic(1, 1), wm.analytic(2, 0, 0, -1)
    u2, v2 = wm.analytic(3, 0, -1), wm.analytic(1, Fr(1, 2))
    pr = reduce_embedding(1, 2, 3, 4, u1, v1, u2, v2)
    t = 1.7
    assert pr.u(t) == pytest.approx(u2(t) ** 4)
    assert pr.v(t) == pytest.approx(v1(t) ** -3 * v2(t) ** 3)
    assert pr.w(t) == pytest.approx(u1(t) ** 2)


def test_reduce_identical_spaces():
    u1 = wm.analytic(1, 0, -2)
    pr = reduce_embedding(1, 1, 1, 1, u1, ONE, u1, ONE)
    assert (pr.params.p, pr.params.q, pr.params.theta) == (1, 1, 1)
    assert pr.v(2.0) == pytest.approx(1.0)
    assert pr.u(2.0) == pytest.approx(u1(2.0)) and pr.w(2.0) == pytest.approx(u1(2.0))


def test_copson_transform():
    ut, vt = copson_to_cesaro(2, 3, wm.analytic(1, Fr(-1, 3)), ONE)
    seg = ut.segments[0]
    assert (seg.alpha, seg.beta, seg.gamma) == (Fr(1, 3) - 1, 0, 0)
    assert vt(4.0) == pytest.approx(4.0 ** Fr(-2, 3))
    back, _ = copson_to_cesaro(2, 3, ut, vt)
    assert back.segments[0].alpha == Fr(-1, 3)


def test_admissibility_examples():
    P = Parameters(Fr(1, 2), 2, Fr(3, 2))
    good = ReducedProblem(P, wm.analytic(1, 0, 0, -1), ONE, wm.analytic(0.5, 0, Fr(-3, 2)))
    assert check_admissibility(good).passed
    bad = good.with_weights(w=wm.analytic(1, -1))
    adm = check_admissibility(bad)
    assert not adm.passed
    assert any("int_t^inf w" in h.name for h in adm.failures)
    P4 = Parameters(1, 3, 2)
    zero_v = ReducedProblem(P4, wm.analytic(1, 0, 0, -1), wm.zero(), wm.analytic(1, 0, -2))
    names = [h.name for h in check_admissibility(zero_v).failures]
    assert any("v^{th/(th-1)}" in n for n in names)


def test_a1_fixture():
    rep = embedding_constant(fixture("T1a"))
    assert rep.applicable
    assert rep.components[1] == pytest.approx(0.25, rel=1e-6)
    assert rep.combined == pytest.approx(0.25, rel=1e-6)


def test_a3_fixture():
    rep = embedding_constant(fixture("T2"))
    assert rep.components == pytest.approx({3: 1.0}, rel=1e-6)


@pytest.mark.parametrize("tag", list(FORMULAS))
def test_zero_u_gives_zero(tag):
    pr = fixture(tag).with_weights(u=wm.zero())
    rep = embedding_constant(pr)
    assert rep.combined == 0.0


@pytest.mark.parametrize("tag", list(FORMULAS))
def test_fixtures_finite_and_positive(tag):
    rep = embedding_constant(fixture(tag))
    assert rep.applicable
    assert 0 < rep.combined < math.inf


def test_refusals():
    with pytest.raises(TrivialRegimeError, match="triviality"):
        embedding_constant(ReducedProblem(Parameters(2, 3, 1), ONE, ONE, ONE))
    with pytest.raises(UnsupportedRegimeError):
        embedding_constant(ReducedProblem(Parameters(Fr(1, 2), Fr(1, 4), 2), ONE, ONE, ONE))


def test_out_of_regime_warning():
    with pytest.warns(OutOfRegimeWarning):
        functional_A(8, fixture("T3a"))


def test_degenerate_exponent():
    with pytest.raises(UnsupportedRegimeError):
        functional_A(3, fixture("T1a"))


def test_a7_variant_flag():
    pr = fixture("T3b")
    a = embedding_constant(pr)
    b = embedding_constant(pr, proof_variant=True)
    assert b.diagnostics["proof_variant_A7"] and not a.diagnostics["proof_variant_A7"]
    assert a.components[4] == b.components[4] and a.components[6] == b.components[6]
    assert a.components[7] != b.components[7]


def test_lazy_report_is_consistent():
    pr = fixture("T3b")
    assert embedding_constant(pr, lazy=True).combined == embedding_constant(pr).combined
