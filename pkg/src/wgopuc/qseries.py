"""Extended-precision q-series kernel for |q| = 1.

All complex values are ``mpc`` numbers owned by the ``mpmath`` context of a
:class:`PrecisionContext`; no value ever passes through a machine double.

Parameters of q-Pochhammer symbols and basic hypergeometric sums may be given
either as plain numbers or as :class:`QMonomial` objects ``coef * q**exp``.
The latter keep products such as ``q**-n * q**j`` exact: the combined
exponent is reduced mod 1 before exponentiation, so ``1 - q**0`` is an exact
zero instead of a rounding residue.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence, Union

import mpmath

from .errors import SmallDivisor

__all__ = [
    "PrecisionContext",
    "UnitPhase",
    "QMonomial",
    "qmono",
    "q_power",
    "q_factor",
    "q_pochhammer",
    "terminating_phi_terms",
    "terminating_phi",
    "phi_2_1_terminating",
    "phi_3_2_terminating",
    "decimal_string",
]

DEFAULT_PRECISION_BITS = 256
DEFAULT_TOL_REL = 2.0**-100
DEFAULT_TOL_DIV = 2.0**-40


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision and tolerance policy.

    Every number produced by this package is created through :attr:`mp`, a
    private ``mpmath.MPContext`` set to ``precision_bits``; contexts of
    different precision therefore never interfere.
    """

    precision_bits: int = DEFAULT_PRECISION_BITS
    tol_rel: float = DEFAULT_TOL_REL
    tol_div: float = DEFAULT_TOL_DIV
    mp: mpmath.ctx_mp.MPContext = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.precision_bits) != self.precision_bits or self.precision_bits < 64:
            raise ValueError(f"precision_bits must be an integer >= 64, got {self.precision_bits}")
        if not 0 < self.tol_rel < 1:
            raise ValueError(f"tol_rel must lie in (0, 1), got {self.tol_rel}")
        if not 0 < self.tol_div < 1:
            raise ValueError(f"tol_div must lie in (0, 1), got {self.tol_div}")
        ctx = mpmath.MPContext()
        ctx.prec = int(self.precision_bits)
        object.__setattr__(self, "mp", ctx)

    def with_precision(self, bits: int) -> "PrecisionContext":
        return PrecisionContext(bits, self.tol_rel, self.tol_div)

    def doubled(self) -> "PrecisionContext":
        return self.with_precision(2 * self.precision_bits)

    @property
    def eps(self):
        return self.mp.mpf(2) ** (1 - self.precision_bits)

    @property
    def digits(self) -> int:
        """Significant decimal digits needed to round-trip a value."""
        return int(math.ceil(self.precision_bits * math.log10(2))) + 1

    def real(self, x):
        """Convert int/float/str/Fraction/mpf to an ``mpf`` at this precision."""
        if isinstance(x, Fraction):
            return self.mp.mpf(x.numerator) / x.denominator
        if isinstance(x, str):
            text = x.strip()
            if "/" in text:
                return self.real(Fraction(text))
            return self.mp.mpf(text)
        return self.mp.mpf(x)

    def complex(self, x):
        if isinstance(x, QMonomial):
            raise TypeError("resolve QMonomial values with a phase first")
        if isinstance(x, (Fraction, str)):
            return self.mp.mpc(self.real(x))
        return self.mp.mpc(x)


GOLDEN = "golden"


@dataclass(frozen=True)
class UnitPhase:
    """The point ``q = exp(2*pi*i*chi)`` on the unit circle.

    ``chi`` is either an exact rational ``M/N`` (root of unity, ``N`` distinct
    powers) or a real given by a decimal string or the named constant
    ``"golden"``; the real kind is re-evaluated at whatever precision is
    requested so no accuracy is lost to a stored binary value.
    """

    kind: str
    M: int = 0
    N: int = 1
    source: str = ""

    def __post_init__(self):
        if self.kind == "rational":
            if self.N < 1:
                raise ValueError("N must be a positive integer")
            if math.gcd(self.M, self.N) != 1:
                raise ValueError(f"M={self.M} and N={self.N} are not coprime")
        elif self.kind == "irrational":
            if self.source != GOLDEN:
                chi = mpmath.mpf(self.source)
                if not 0 < chi < 1:
                    raise ValueError(f"chi must lie in (0, 1), got {self.source}")
        else:
            raise ValueError(f"unknown phase kind {self.kind!r}")

    @classmethod
    def rational(cls, M: int, N: int) -> "UnitPhase":
        return cls("rational", M=int(M), N=int(N))

    @classmethod
    def irrational(cls, chi: str) -> "UnitPhase":
        return cls("irrational", source=str(chi).strip())

    @classmethod
    def golden(cls) -> "UnitPhase":
        return cls("irrational", source=GOLDEN)

    @classmethod
    def parse(cls, text: str) -> "UnitPhase":
        """Accept ``"golden"``, ``"M/N"`` or a decimal string."""
        text = str(text).strip()
        if text.lower() == GOLDEN:
            return cls.golden()
        if "/" in text:
            m, n = text.split("/", 1)
            return cls.rational(int(m), int(n))
        return cls.irrational(text)

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    @property
    def period(self):
        """Number of distinct powers of ``q`` (``None`` when unbounded)."""
        return self.N if self.is_rational else None

    def label(self) -> str:
        return f"{self.M}/{self.N}" if self.is_rational else self.source

    def chi(self, ctx: PrecisionContext, extra_bits: int = 0):
        """``chi`` as an ``mpf``, computed with ``extra_bits`` of headroom."""
        mp = ctx.mp
        with mp.workprec(ctx.precision_bits + extra_bits):
            if self.is_rational:
                return mp.mpf(self.M) / self.N
            if self.source == GOLDEN:
                return (mp.sqrt(5) - 1) / 2
            return mp.mpf(self.source)

    def q(self, ctx: PrecisionContext):
        return q_power(self, 1, ctx)


class QMonomial(NamedTuple):
    """The number ``coef * q**exp``; ``coef`` may be any number."""

    coef: object
    exp: int


def qmono(coef=1, exp: int = 0) -> QMonomial:
    return QMonomial(coef, int(exp))


Param = Union[QMonomial, object]

_QUARTER_TURNS = {0: (1, 0), 1: (0, 1), 2: (-1, 0), 3: (0, -1)}


@lru_cache(maxsize=1 << 16)
def q_power(phase: UnitPhase, n: int, ctx: PrecisionContext):
    """``q**n`` with ``n*chi`` reduced mod 1 before exponentiation."""
    mp = ctx.mp
    n = int(n)
    if phase.is_rational:
        frac = Fraction((n * phase.M) % phase.N, phase.N)
        if (4 * frac).denominator == 1:
            re, im = _QUARTER_TURNS[int(4 * frac)]
            return mp.mpc(re, im)
        return mp.expjpi(2 * ctx.real(frac))
    if n == 0:
        return mp.mpc(1)
    with mp.workprec(ctx.precision_bits + n.bit_length() + 16):
        turns = mp.frac(n * phase.chi(ctx, n.bit_length() + 16))
    return mp.expjpi(2 * turns)


def _shifted(a: Param, j: int, phase: UnitPhase, ctx: PrecisionContext):
    """The value ``a * q**j``."""
    if isinstance(a, QMonomial):
        base = q_power(phase, a.exp + j, ctx)
        return base if a.coef == 1 else ctx.complex(a.coef) * base
    return ctx.complex(a) * q_power(phase, j, ctx)


def q_factor(a: Param, j: int, phase: UnitPhase, ctx: PrecisionContext):
    """The single Pochhammer factor ``1 - a*q**j``."""
    return 1 - _shifted(a, j, phase, ctx)


def _guarded(value, ctx: PrecisionContext, where: str):
    if abs(value) < ctx.tol_div:
        raise SmallDivisor(
            f"small divisor |{where}| = {mpmath.nstr(abs(value), 5)} < tol_div",
            magnitude=abs(value),
            where=where,
        )
    return value


def q_pochhammer(a: Param, n: int, phase: UnitPhase, ctx: PrecisionContext):
    """``(a;q)_n`` for integer ``n`` of either sign.

    ``(a;q)_n = 1/(a q^n; q)_{-n}`` for negative ``n``; each factor of that
    denominator is checked against ``ctx.tol_div``.
    """
    mp = ctx.mp
    n = int(n)
    result = mp.mpc(1)
    if n >= 0:
        for j in range(n):
            result *= q_factor(a, j, phase, ctx)
        return result
    for j in range(n, 0):
        result *= _guarded(q_factor(a, j, phase, ctx), ctx, f"1 - a*q^{j}")
    return 1 / result


def terminating_phi_terms(
    n: int,
    numer: Sequence[Param],
    denom: Sequence[Param],
    z: Param,
    phase: UnitPhase,
    ctx: PrecisionContext,
):
    """Terms ``s = 0..n`` of ``r+1 phi r (q^-n, *numer; *denom; q, z)``.

    Terms are generated by the ratio recurrence; the implicit ``(q;q)_s`` and
    every ``denom`` factor are guarded against small divisors.
    """
    mp = ctx.mp
    if n < 0:
        raise ValueError("terminating series needs n >= 0")
    top = qmono(1, -n)
    zval = _shifted(z, 0, phase, ctx) if isinstance(z, QMonomial) else ctx.complex(z)
    term = mp.mpc(1)
    terms = [term]
    for s in range(n):
        num = q_factor(top, s, phase, ctx)
        for a in numer:
            num *= q_factor(a, s, phase, ctx)
        den = _guarded(q_factor(qmono(1, 1), s, phase, ctx), ctx, f"1 - q^{s + 1}")
        for b in denom:
            den *= _guarded(q_factor(b, s, phase, ctx), ctx, f"1 - b*q^{s}")
        term = term * num / den * zval
        terms.append(term)
    return terms


def terminating_phi(n, numer, denom, z, phase, ctx):
    return ctx.mp.fsum(terminating_phi_terms(n, numer, denom, z, phase, ctx))


def phi_2_1_terminating(n: int, b: Param, c: Param, z: Param, phase: UnitPhase, ctx: PrecisionContext):
    """``2phi1(q^-n, b; c; q, z)``, summed over ``s = 0..n``."""
    return terminating_phi(n, [b], [c], z, phase, ctx)


def phi_3_2_terminating(n: int, a2: Param, a3: Param, b1: Param, b2: Param, z: Param,
                        phase: UnitPhase, ctx: PrecisionContext):
    """``3phi2(q^-n, a2, a3; b1, b2; q, z)``, summed over ``s = 0..n``."""
    return terminating_phi(n, [a2, a3], [b1, b2], z, phase, ctx)


def decimal_string(x, ctx: PrecisionContext) -> str:
    """Scientific-notation decimal with ``ctx.digits`` significant digits."""
    x = ctx.real(x)
    return ctx.mp.nstr(x, ctx.digits, strip_zeros=False, min_fixed=0, max_fixed=0)
