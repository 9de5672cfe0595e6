import math

import pytest

from cesaro import weights as wm
from cesaro.errors import UnsupportedRegimeError
from cesaro.hardy import (HardyParams, hardy_constant, hardy_sup_constant, iterated_copson_constant,
                          iterated_sup_copson_constant, reverse_hardy_constant)
from cesaro.oracle import reference_lower_bound

E = math.e
EXP = wm.analytic(1, 0, 0, 1)
EXPM = wm.analytic(1, 0, 0, -1)
CHI = wm.indicator(0, 1)


def test_h1_fixture():
    c = hardy_constant(HardyParams(2, 2), EXP, CHI)
    assert c.case == "H1"
    assert c.value == pytest.approx(math.exp(-0.5), rel=1e-6)


def test_h2_fixture():
    c = hardy_constant(HardyParams(2, 1), EXP, CHI)
    assert c.case == "H2"
    assert c.value == pytest.approx(math.sqrt(2 - 4 / E), rel=1e-6)


def test_h3_fixtures():
    assert hardy_sup_constant(2, EXP, EXPM).value == pytest.approx(1.0, rel=1e-6)
    assert hardy_sup_constant(2, EXP, wm.constant(1.0)).value == pytest.approx(1.0, rel=1e-6)


def test_r_fixtures():
    r1 = reverse_hardy_constant(0.5, 0.5, EXPM, EXPM)
    assert r1.case == "R1" and r1.value == pytest.approx(0.5, rel=1e-6)
    r2 = reverse_hardy_constant(1, 0.5, wm.analytic(1, 0, 0, -2), EXPM)
    assert r2.case == "R2" and r2.value == pytest.approx(1.0, rel=1e-6)


def test_i1_fixture():
    c = iterated_copson_constant(HardyParams(2, 2, 2), EXPM, EXP, CHI)
    assert c.case == "I1"
    assert c.value == pytest.approx((1 - 1 / E) / 2, rel=1e-6)


def test_i6_fixture():
    # sup over t of ((1 - e^{-2 min(t,1)})/2)^{1/2} e^{-t/2}: the stationary point
    # e^{-2t} = 1/3 lies inside (0,1), giving 3^{-3/4}
    c = iterated_sup_copson_constant(2, 2, EXPM, EXP, CHI)
    assert c.case == "I6"
    assert c.value == pytest.approx(3 ** -0.75, rel=1e-6)


@pytest.mark.parametrize("call", [
    lambda: hardy_constant(HardyParams(2, 2), EXP, wm.zero()),
    lambda: hardy_sup_constant(2, EXP, wm.zero()),
    lambda: reverse_hardy_constant(0.5, 0.5, wm.zero(), EXPM),
    lambda: iterated_copson_constant(HardyParams(2, 2, 2), wm.zero(), EXP, CHI),
    lambda: iterated_sup_copson_constant(2, 2, wm.zero(), EXP, CHI),
    lambda: iterated_sup_copson_constant(2, 2, EXPM, EXP, wm.zero()),
])
def test_zero_weights(call):
    assert call().value == 0.0


def test_guards():
    with pytest.raises(UnsupportedRegimeError):
        hardy_constant(HardyParams(1, 2), EXP, CHI)
    with pytest.raises(UnsupportedRegimeError):
        hardy_sup_constant(0.5, EXP, CHI)
    with pytest.raises(UnsupportedRegimeError):
        reverse_hardy_constant(2, 1, EXPM, EXPM)
    with pytest.raises(ValueError):
        HardyParams(0, 1)


@pytest.mark.parametrize("lam", [1e-2, 10.0])
def test_hardy_scaling(lam):
    base = hardy_constant(HardyParams(2, 1), EXP, CHI).value
    assert hardy_constant(HardyParams(2, 1), EXP.scale(lam), CHI).value == pytest.approx(base * lam ** -0.5, rel=1e-6)
    assert hardy_constant(HardyParams(2, 1), EXP, CHI.scale(lam)).value == pytest.approx(base * lam, rel=1e-6)


@pytest.mark.parametrize("lam", [1e-2, 10.0])
def test_reverse_scaling(lam):
    base = reverse_hardy_constant(0.5, 0.5, EXPM, EXPM).value
    assert reverse_hardy_constant(0.5, 0.5, EXPM.scale(lam), EXPM).value == pytest.approx(base * lam ** 2, rel=1e-6)
    assert reverse_hardy_constant(0.5, 0.5, EXPM, EXPM.scale(lam)).value == pytest.approx(base * lam ** -2, rel=1e-6)


def test_i2_i3_against_step_oracle():
    c = iterated_copson_constant(HardyParams(2, 1, 2), EXPM, EXP, CHI)
    assert c.case == "I2+I3"
    L = reference_lower_bound("I", 2, 1, EXP, CHI, u=EXPM, m=2).value
    assert c.value / 4 <= L <= 4 * c.value


@pytest.mark.parametrize("kind,args,theory", [
    ("H", (2, 2, EXP, CHI), lambda: hardy_constant(HardyParams(2, 2), EXP, CHI).value),
    ("H", (2, 1, EXP, CHI), lambda: hardy_constant(HardyParams(2, 1), EXP, CHI).value),
    ("Hsup", (2, 2, EXP, EXPM), lambda: hardy_sup_constant(2, EXP, EXPM).value),
    ("R", (0.5, 0.5, EXPM, EXPM), lambda: reverse_hardy_constant(0.5, 0.5, EXPM, EXPM).value),
    ("Isup", (2, 1, EXP, CHI), lambda: iterated_sup_copson_constant(2, 1, EXPM, EXP, CHI).value),
])
def test_reference_oracle_equivalence(kind, args, theory):
    L = reference_lower_bound(kind, *args, u=EXPM if kind == "Isup" else None).value
    T = theory()
    assert T / 32 <= L <= 32 * T
