import cmath
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from wgopuc.errors import SmallDivisor
from wgopuc.identities import saalschutz_sides
from wgopuc.qseries import (
    PrecisionContext,
    QMonomial,
    UnitPhase,
    decimal_string,
    phi_2_1_terminating,
    phi_3_2_terminating,
    q_pochhammer,
    q_power,
    qmono,
)


class TestPrecisionContext:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"precision_bits": 32},
            {"tol_rel": 0.0},
            {"tol_rel": 1.0},
            {"tol_div": 0.0},
            {"tol_div": 2.0},
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            PrecisionContext(**kwargs)

    def test_private_context_precision(self):
        lo, hi = PrecisionContext(128), PrecisionContext(512)
        assert lo.mp.prec == 128 and hi.mp.prec == 512
        assert (hi.mp.mpf(1) / 3).real != (lo.mp.mpf(1) / 3)

    def test_doubled(self, ctx):
        assert ctx.doubled().precision_bits == 2 * ctx.precision_bits

    def test_decimal_roundtrip(self, ctx):
        x = ctx.mp.pi / 7
        assert ctx.real(decimal_string(x, ctx)) == x


class TestUnitPhase:
    def test_parse_forms(self):
        assert UnitPhase.parse("golden") == UnitPhase.golden()
        assert UnitPhase.parse("2/7") == UnitPhase.rational(2, 7)
        assert UnitPhase.parse("0.123").source == "0.123"

    def test_rejects_non_coprime(self):
        with pytest.raises(ValueError):
            UnitPhase.rational(2, 4)

    @pytest.mark.parametrize("chi", ["0", "1", "1.5", "-0.2"])
    def test_rejects_out_of_range(self, chi):
        with pytest.raises(ValueError):
            UnitPhase.irrational(chi)

    def test_golden_value(self, ctx, golden):
        assert abs(golden.chi(ctx) - (ctx.mp.sqrt(5) - 1) / 2) == 0

    def test_rational_root_of_unity(self, ctx):
        phase = UnitPhase.rational(2, 7)
        assert abs(q_power(phase, 7, ctx) - 1) == 0
        for n in range(1, 7):
            assert abs(q_power(phase, n, ctx) - 1) > 0.1


class TestQPower:
    def test_quarter_turn(self, ctx):
        assert q_power(UnitPhase.rational(1, 4), 2, ctx) == -1

    @pytest.mark.parametrize("phase", [UnitPhase.golden(), UnitPhase.rational(3, 11)])
    def test_zero_power(self, ctx, phase):
        assert q_power(phase, 0, ctx) == 1

    def test_against_naive_product(self, ctx):
        phase = UnitPhase.irrational("0.3819660112")
        q = cmath.exp(2j * math.pi * 0.3819660112)
        naive = q * q * q * q * q
        value = q_power(phase, 5, ctx)
        assert abs(complex(value) - naive) < 1e-13
        assert abs(abs(value) - 1) < ctx.tol_rel

    @pytest.mark.parametrize("n", [1, 7, 123, 4181, 10_000])
    def test_inverse(self, ctx, golden, n):
        assert abs(q_power(golden, n, ctx) * q_power(golden, -n, ctx) - 1) < ctx.tol_rel

    def test_angle_reduction_uniform_in_n(self, ctx, golden):
        # q^n via reduced angle agrees with q^(n-1) * q to roundoff even for large n
        n = 10**6
        lhs = q_power(golden, n, ctx)
        rhs = q_power(golden, n - 1, ctx) * q_power(golden, 1, ctx)
        assert abs(lhs - rhs) < 1e-70

    def test_rational_period(self, ctx):
        phase = UnitPhase.rational(1, 5)
        for n in range(-6, 6):
            assert q_power(phase, n, ctx) == q_power(phase, n + 5, ctx)


class TestPochhammer:
    def test_empty(self, ctx, golden):
        assert q_pochhammer(ctx.mp.mpc("0.3", "0.9"), 0, golden, ctx) == 1

    def test_three_factors_at_i(self, ctx):
        phase = UnitPhase.rational(1, 4)
        q = q_power(phase, 1, ctx)
        direct = (1 - q) * (1 - q**2) * (1 - q**3)
        assert direct == 4
        assert q_pochhammer(q, 3, phase, ctx) == 4
        assert q_pochhammer(qmono(1, 1), 3, phase, ctx) == 4

    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_negative_index_reciprocal(self, ctx, golden, n):
        a = ctx.mp.mpc("0.4", "-1.1")
        shifted = a * q_power(golden, -n, ctx)
        assert abs(q_pochhammer(a, -n, golden, ctx) * q_pochhammer(shifted, n, golden, ctx) - 1) < ctx.tol_rel

    def test_small_divisor_guard(self, ctx):
        phase = UnitPhase.rational(1, 4)
        # (q^2; q)_{-2} = 1/((1 - q^0)(1 - q)) hits an exact zero factor
        with pytest.raises(SmallDivisor):
            q_pochhammer(qmono(1, 2), -2, phase, ctx)

    def test_positive_index_allows_zero(self, ctx, golden):
        assert q_pochhammer(qmono(1, -2), 3, golden, ctx) == 0

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(-8, 8),
        m=st.integers(-8, 8),
        radius=st.one_of(st.floats(0.2, 0.8), st.floats(1.3, 3.0)),
        turn=st.floats(0, 1),
        exp=st.integers(-5, 5),
    )
    def test_split_property(self, n, m, radius, turn, exp):
        ctx = PrecisionContext()
        phase = UnitPhase.golden()
        coef = ctx.real(radius) * ctx.mp.expjpi(2 * ctx.real(turn))
        a = QMonomial(coef, exp)
        whole = q_pochhammer(a, n + m, phase, ctx)
        split = q_pochhammer(a, n, phase, ctx) * q_pochhammer(QMonomial(coef, exp + n), m, phase, ctx)
        assert abs(whole - split) <= ctx.tol_rel * max(1, abs(whole))


class TestTerminatingSeries:
    def test_phi21_degree_zero(self, ctx, golden):
        z = ctx.mp.mpc("0.1", "2")
        assert phi_2_1_terminating(0, ctx.mp.mpc(3), ctx.mp.mpc("0.2"), z, golden, ctx) == 1

    def test_phi21_two_terms(self, ctx, golden):
        mp = ctx.mp
        q = q_power(golden, 1, ctx)
        b, c, z = mp.mpc("0.3", "0.2"), mp.mpc("-0.5", "0.1"), mp.mpc("1.7", "-0.4")
        expected = 1 + (1 - 1 / q) * (1 - b) / ((1 - q) * (1 - c)) * z
        assert abs(phi_2_1_terminating(1, b, c, z, golden, ctx) - expected) < ctx.tol_rel

    def test_phi21_against_toeplitz(self, ctx, golden):
        from wgopuc.measure import WrappedGeometricMeasure, moment_closed
        from wgopuc.opuc import mu_closed, phi_via_toeplitz

        p = ctx.real("0.5")
        m = WrappedGeometricMeasure("0.5", golden)
        Phi3, _ = phi_via_toeplitz(3, lambda j: moment_closed(m, j, ctx), ctx)
        z0 = q_power(golden, 2, ctx)
        oracle = Phi3(z0) / mu_closed(3, p, golden, ctx)
        value = phi_2_1_terminating(3, qmono(p, 1), qmono(p, -2), q_power(golden, 1, ctx) * z0, golden, ctx)
        assert abs(value - oracle) < 1e-60

    def test_phi32_degree_zero(self, ctx, golden):
        mp = ctx.mp
        assert phi_3_2_terminating(0, mp.mpc(2), mp.mpc(3), mp.mpc(4), mp.mpc(5), mp.mpc(6), golden, ctx) == 1

    def test_saalschutz_instance(self, ctx, golden):
        # c/b = q^-1, so (c/b;q)_4 vanishes: both sides are zero and only the absolute defect is meaningful
        p = ctx.real("0.5")
        q = q_power(golden, 1, ctx)
        lhs, rhs = saalschutz_sides(4, p * q, p / q**2, p / q**3, golden, ctx)
        assert abs(rhs) < 1e-70
        assert abs(lhs - rhs) < ctx.tol_rel

    def test_saalschutz_generic_instance(self, ctx, golden):
        mp = ctx.mp
        p = ctx.real("0.5")
        q = q_power(golden, 1, ctx)
        lhs, rhs = saalschutz_sides(5, p * q, p / q**2, mp.mpc("0.3", "0.2"), golden, ctx)
        assert abs(rhs) > 1e-3
        assert abs(lhs - rhs) / abs(rhs) < ctx.tol_rel

    def test_terminating_guard(self, ctx):
        phase = UnitPhase.rational(1, 3)
        # (q;q)_s hits 1 - q^3 = 0 when n >= 3
        with pytest.raises(SmallDivisor):
            phi_2_1_terminating(3, ctx.mp.mpc("0.5"), ctx.mp.mpc("0.25"), ctx.mp.mpc(1), phase, ctx)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_saalschutz_randomized(seed):
    from wgopuc.identities import random_saalschutz_instance

    ctx = PrecisionContext()
    n, a, b, c = random_saalschutz_instance(random.Random(seed), 12, ctx)
    lhs, rhs = saalschutz_sides(n, a, b, c, UnitPhase.golden(), ctx)
    assert abs(lhs - rhs) <= ctx.tol_rel * max(abs(lhs), abs(rhs))


def _defects(ctx):
    golden = UnitPhase.golden()
    mp = ctx.mp
    a = QMonomial(mp.mpc("0.37", "0.81"), 2)
    inv = abs(q_power(golden, 4181, ctx) * q_power(golden, -4181, ctx) - 1)
    whole = q_pochhammer(a, 3, golden, ctx)
    split = q_pochhammer(a, 7, golden, ctx) * q_pochhammer(QMonomial(a.coef, a.exp + 7), -4, golden, ctx)
    p = ctx.real("0.5")
    q = q_power(golden, 1, ctx)
    lhs, rhs = saalschutz_sides(6, p * q, p / q**2, p / q**3, golden, ctx)
    return inv, abs(whole - split), abs(lhs - rhs)


def test_precision_scaling():
    lo = _defects(PrecisionContext(128))
    hi = _defects(PrecisionContext(256))
    for d_lo, d_hi in zip(lo, hi):
        assert d_hi <= d_lo / 10 or d_hi < 2.0**-240
