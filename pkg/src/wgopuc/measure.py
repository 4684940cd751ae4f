"""Wrapped geometric distribution on the unit circle and its k-weighted variant."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import SmallDivisor
from .qseries import PrecisionContext, UnitPhase, q_factor, q_pochhammer, q_power, qmono

__all__ = [
    "WrappedGeometricMeasure",
    "MeasureAtom",
    "atoms",
    "moment_closed",
    "moment_bruteforce",
    "truncation_for",
    "weight_bound",
]


@dataclass(frozen=True)
class WrappedGeometricMeasure:
    """Point masses at ``z_s = exp(i*phi) * q**s``, ``s = 0, 1, ...``.

    With ``k = 1`` the mass at ``z_s`` is ``(1 - p) p**s`` (a probability
    measure). With ``k > 1`` the weight is ``p**s (q**k; q)_s / (q; q)_s``,
    complex in general and left unnormalized.

    ``p`` and ``rotation_phi`` are kept in their given form (str, Fraction,
    int or float) and converted at the precision of each call.
    """

    p: object
    phase: UnitPhase
    rotation_phi: object = 0
    k: int = 1

    def __post_init__(self):
        p = Fraction(str(self.p)) if not isinstance(self.p, Fraction) else self.p
        if not 0 < p < 1:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        phi = Fraction(str(self.rotation_phi))
        if not 0 <= phi < Fraction(2 * math.pi):
            raise ValueError(f"rotation_phi must lie in [0, 2*pi), got {self.rotation_phi}")

    @property
    def is_positive(self) -> bool:
        return self.k == 1

    def p_value(self, ctx: PrecisionContext):
        return ctx.real(self.p)

    def phi_value(self, ctx: PrecisionContext):
        return ctx.real(self.rotation_phi)

    def rotation_factor(self, n: int, ctx: PrecisionContext):
        """``exp(i*n*phi)``."""
        phi = self.phi_value(ctx)
        if phi == 0:
            return ctx.mp.mpc(1)
        return ctx.mp.expj(n * phi)


@dataclass(frozen=True)
class MeasureAtom:
    s: int
    theta: object
    z: object
    mass: object


def _weight_ratio(m: WrappedGeometricMeasure, s: int, ctx: PrecisionContext):
    """``w_{s+1} / w_s`` for the k-weighted sequence."""
    p = m.p_value(ctx)
    return p * q_factor(qmono(1, m.k), s, m.phase, ctx) / q_factor(qmono(1, 1), s, m.phase, ctx)


def _weights(m: WrappedGeometricMeasure, S: int, ctx: PrecisionContext):
    mp = ctx.mp
    p = m.p_value(ctx)
    if m.k == 1:
        w = 1 - p
        out = []
        for _ in range(S):
            out.append(mp.mpc(w))
            w *= p
        return out
    w = mp.mpc(1)
    out = []
    for s in range(S):
        out.append(w)
        w *= _weight_ratio(m, s, ctx)
    return out


def atoms(m: WrappedGeometricMeasure, S: int, ctx: PrecisionContext) -> list[MeasureAtom]:
    """The first ``S`` atoms; angles reduced to ``[0, 2*pi)``.

    For ``k = 1`` the omitted mass is exactly ``p**S``.
    """
    if S < 1:
        raise ValueError("S must be >= 1")
    mp = ctx.mp
    phi = m.phi_value(ctx)
    out = []
    for s, w in enumerate(_weights(m, S, ctx)):
        if m.phase.is_rational:
            turns = mp.mpf((s * m.phase.M) % m.phase.N) / m.phase.N
        else:
            with mp.workprec(ctx.precision_bits + s.bit_length() + 16):
                turns = mp.frac(s * m.phase.chi(ctx, s.bit_length() + 16))
        theta = mp.fmod(2 * mp.pi * turns + phi, 2 * mp.pi)
        z = q_power(m.phase, s, ctx) * m.rotation_factor(1, ctx)
        mass = mp.re(w) if m.k == 1 else w
        out.append(MeasureAtom(s, +theta, z, mass))
    return out


def weight_bound(m: WrappedGeometricMeasure, ctx: PrecisionContext):
    """Constant ``C`` with ``|w_s| <= C p**s`` for all ``s``.

    ``|(q^k;q)_s / (q;q)_s| = |(q^{s+1};q)_{k-1} / (q;q)_{k-1}| <= 2^{k-1} / |(q;q)_{k-1}|``.
    """
    if m.k == 1:
        return 1 - m.p_value(ctx)
    denom = abs(q_pochhammer(qmono(1, 1), m.k - 1, m.phase, ctx))
    if denom < ctx.tol_div:
        raise SmallDivisor("(q;q)_{k-1} below tol_div", magnitude=denom)
    return ctx.mp.mpf(2) ** (m.k - 1) / denom


def truncation_for(m: WrappedGeometricMeasure, abs_tol, ctx: PrecisionContext, scale=1) -> int:
    """Smallest ``S`` whose tail ``sum_{s>=S} |w_s| * scale`` is below ``abs_tol``.

    ``scale`` bounds the modulus of whatever multiplies the weights (1 for
    moments, ``max |f|`` on the circle when integrating a polynomial ``f``).
    """
    mp = ctx.mp
    p = m.p_value(ctx)
    const = weight_bound(m, ctx) * mp.mpf(scale) / (1 - p)
    target = ctx.real(abs_tol) / const
    if target >= 1:
        return 1
    return max(1, int(mp.ceil(mp.log(target) / mp.log(p))))


def moment_closed(m: WrappedGeometricMeasure, n: int, ctx: PrecisionContext):
    """Trigonometric moment ``sigma_n`` in closed form.

    ``k = 1``: ``(1 - p) / (1 - p q^n)``; ``k > 1``: ``1 / (p q^n; q)_k``.
    A rotation multiplies the result by ``exp(i*n*phi)``.
    """
    p = m.p_value(ctx)
    if m.k == 1:
        den = q_factor(qmono(p, n), 0, m.phase, ctx)
        value = (1 - p) / _check(den, ctx, f"1 - p*q^{n}")
    else:
        den = ctx.mp.mpc(1)
        for j in range(m.k):
            den *= _check(q_factor(qmono(p, n), j, m.phase, ctx), ctx, f"1 - p*q^{n + j}")
        value = 1 / den
    return value * m.rotation_factor(n, ctx)


def _check(value, ctx, where):
    if abs(value) < ctx.tol_div:
        raise SmallDivisor(f"small divisor in moment: |{where}| < tol_div", magnitude=abs(value), where=where)
    return value


def moment_bruteforce(m: WrappedGeometricMeasure, n: int, S: int, ctx: PrecisionContext):
    """Partial sum ``sum_{s<S} z_s**n w_s`` (cross-check oracle)."""
    mp = ctx.mp
    total = []
    for s, w in enumerate(_weights(m, S, ctx)):
        total.append(q_power(m.phase, s * n, ctx) * w)
    return mp.fsum(total) * m.rotation_factor(n, ctx)
