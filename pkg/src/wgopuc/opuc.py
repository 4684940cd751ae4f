"""Monic polynomials orthogonal on the unit circle for the wrapped geometric law.

Three independent constructions are provided and are expected to agree:

* :func:`phi_via_recurrence` runs the Szegő recurrence
  ``Phi_{n+1}(z) = z Phi_n(z) - conj(a_n) Phi_n^*(z)``;
* :func:`phi_via_hypergeometric` expands the terminating ``2phi1`` formula;
* :func:`phi_via_toeplitz` evaluates the bordered Toeplitz determinant of the
  trigonometric moments.

Conjugation convention: ``a_n`` itself is stored, with
``a_n = -conj(Phi_{n+1}(0))``, so ``a_0 = conj(sigma_1)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence, Union

from .errors import NotMonic, SingularToeplitz, SmallDivisor
from .qseries import (
    PrecisionContext,
    QMonomial,
    UnitPhase,
    q_pochhammer,
    q_power,
    qmono,
    terminating_phi,
    terminating_phi_terms,
)

__all__ = [
    "Polynomial",
    "MonicPolynomial",
    "VerblunskySource",
    "VerblunskySequence",
    "PastroParams",
    "mu_closed",
    "mu_first_form",
    "verblunsky_closed",
    "verblunsky_sequence",
    "verblunsky_from_polynomials",
    "phi_via_recurrence",
    "phi_sequence_recurrence",
    "phi_star",
    "phi_via_hypergeometric",
    "pastro_polynomial",
    "phi_via_toeplitz",
    "toeplitz_delta",
    "h_product",
    "h_closed",
    "rotate",
    "phi_32_form",
    "max_coefficient_disagreement",
    "PolynomialFamily",
]


class Polynomial:
    """Complex polynomial with coefficients ordered by ascending power."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        if len(coeffs) == 0:
            raise ValueError("a polynomial needs at least one coefficient")
        self.coeffs = tuple(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, j):
        return self.coeffs[j]

    def __repr__(self):
        return f"{type(self).__name__}(degree={self.degree})"


class MonicPolynomial(Polynomial):
    """Polynomial whose top coefficient is exactly 1."""

    __slots__ = ()

    def __init__(self, coeffs: Sequence):
        super().__init__(coeffs)
        if self.coeffs[-1] != 1:
            raise NotMonic(f"leading coefficient {self.coeffs[-1]} is not exactly 1")

    def to_dict(self, ctx: PrecisionContext, params: dict) -> dict:
        from .qseries import decimal_string

        return {
            "degree": self.degree,
            "coeffs": [[decimal_string(c.real, ctx), decimal_string(c.imag, ctx)] for c in self.coeffs],
            "params": params,
            "precision_bits": ctx.precision_bits,
        }


def _monic_from(coeffs, ctx: PrecisionContext, what: str) -> MonicPolynomial:
    lead = coeffs[-1]
    n = len(coeffs) - 1
    if abs(lead - 1) > ctx.tol_rel * (n + 1):
        raise NotMonic(f"{what}: |lead - 1| = {ctx.mp.nstr(abs(lead - 1), 5)} exceeds tolerance")
    return MonicPolynomial(list(coeffs[:-1]) + [ctx.mp.mpc(1)])


class VerblunskySource(enum.Enum):
    CLOSED_FORM = "closed_form"
    FROM_RECURRENCE = "from_recurrence"


@dataclass(frozen=True)
class VerblunskySequence:
    """``a_0 .. a_{len-1}``; index ``-1`` yields the boundary value ``-1``."""

    values: tuple
    source: VerblunskySource = VerblunskySource.CLOSED_FORM

    def __getitem__(self, n: int):
        if n == -1:
            return -1
        if n < 0:
            raise IndexError(n)
        return self.values[n]

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class PastroParams:
    """Moment parameters: ``sigma_n`` proportional to ``(a;q)_n / (b;q)_n``."""

    a: object
    b: object

    @classmethod
    def wrapped_geometric(cls, p) -> "PastroParams":
        return cls(p, qmono(p, 1))

    @classmethod
    def k_weighted(cls, p, k: int) -> "PastroParams":
        return cls(p, qmono(p, k))


Param = Union[QMonomial, object]


def _as_mono(x: Param, ctx: PrecisionContext) -> QMonomial:
    if isinstance(x, QMonomial):
        return QMonomial(ctx.complex(x.coef), x.exp)
    return QMonomial(ctx.complex(x), 0)


def _value(x: QMonomial, phase: UnitPhase, ctx: PrecisionContext):
    return x.coef * q_power(phase, x.exp, ctx)


def _check_hyper_degree(n: int, phase: UnitPhase):
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    if phase.is_rational and n >= phase.N:
        raise ValueError(f"degree {n} exceeds N-1 = {phase.N - 1} for a root-of-unity phase")


def mu_closed(n: int, p, phase: UnitPhase, ctx: PrecisionContext):
    """``p^n (1/p;q)_n / (pq;q)_n``, the value ``Phi_n(0)``."""
    p = ctx.real(p)
    num = q_pochhammer(1 / p, n, phase, ctx)
    den = q_pochhammer(qmono(p, 1), n, phase, ctx)
    _guard(den, ctx, "(pq;q)_n")
    return p**n * num / den


def mu_first_form(n: int, p, phase: UnitPhase, ctx: PrecisionContext):
    """``q^-n (q;q)_n (pq^{1-n};q)_n / ((q^-n;q)_n (pq;q)_n)``."""
    p = ctx.real(p)
    num = q_pochhammer(qmono(1, 1), n, phase, ctx) * q_pochhammer(qmono(p, 1 - n), n, phase, ctx)
    den = q_pochhammer(qmono(1, -n), n, phase, ctx) * q_pochhammer(qmono(p, 1), n, phase, ctx)
    _guard(den, ctx, "(q^-n;q)_n (pq;q)_n")
    return q_power(phase, -n, ctx) * num / den


def _guard(value, ctx, where):
    if abs(value) < ctx.tol_div:
        raise SmallDivisor(f"|{where}| below tol_div", magnitude=abs(value), where=where)
    return value


def verblunsky_closed(n: int, p, phase: UnitPhase, ctx: PrecisionContext):
    """``a_{n-1}`` in closed form: ``-conj(mu_n)``; ``n = 0`` gives ``a_{-1} = -1``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return ctx.mp.mpc(-1)
    return -ctx.mp.conj(mu_closed(n, p, phase, ctx))


def verblunsky_sequence(count: int, p, phase: UnitPhase, ctx: PrecisionContext) -> VerblunskySequence:
    """``a_0 .. a_{count-1}`` via ``mu_n = mu_{n-1} (p - q^{n-1}) / (1 - p q^n)``."""
    mp = ctx.mp
    p = ctx.real(p)
    mu = mp.mpc(1)
    values = []
    for n in range(1, count + 1):
        den = _guard(1 - p * q_power(phase, n, ctx), ctx, f"1 - p q^{n}")
        mu = mu * (p - q_power(phase, n - 1, ctx)) / den
        values.append(-mp.conj(mu))
    return VerblunskySequence(tuple(values), VerblunskySource.CLOSED_FORM)


def verblunsky_from_polynomials(polys: Sequence[Polynomial], ctx: PrecisionContext) -> VerblunskySequence:
    """``a_n = -conj(Phi_{n+1}(0))`` read off polynomials of degree 1, 2, ..."""
    vals = tuple(-ctx.mp.conj(P.coeffs[0]) for P in polys if P.degree >= 1)
    return VerblunskySequence(vals, VerblunskySource.FROM_RECURRENCE)


def phi_star(phi: Polynomial) -> Polynomial:
    """Reversed, conjugated coefficients: ``z^n conj(Phi)(1/z)`` at formal degree n."""
    return Polynomial([c.conjugate() for c in reversed(phi.coeffs)])


def _szego_step(coeffs, a_n):
    """Coefficients of ``z Phi - conj(a_n) Phi^*``."""
    n = len(coeffs) - 1
    abar = a_n.conjugate()
    out = []
    for j in range(n + 2):
        left = coeffs[j - 1] if j >= 1 else 0
        right = coeffs[n - j].conjugate() if j <= n else 0
        out.append(left - abar * right)
    return out


def phi_sequence_recurrence(n: int, verblunsky, ctx: PrecisionContext) -> list[MonicPolynomial]:
    """``[Phi_0, ..., Phi_n]`` by the Szegő recurrence."""
    mp = ctx.mp
    coeffs = [mp.mpc(1)]
    out = [MonicPolynomial(coeffs)]
    for j in range(n):
        a = mp.mpc(verblunsky[j])
        if abs(a) >= 1:
            raise ValueError(f"|a_{j}| = {mp.nstr(abs(a), 8)} is not < 1")
        coeffs = _szego_step(coeffs, a)
        coeffs[-1] = mp.mpc(1)
        out.append(MonicPolynomial(coeffs))
    return out


def phi_via_recurrence(n: int, verblunsky, ctx: PrecisionContext) -> MonicPolynomial:
    return phi_sequence_recurrence(n, verblunsky, ctx)[-1]


def pastro_polynomial(n: int, params: PastroParams, phase: UnitPhase, ctx: PrecisionContext) -> MonicPolynomial:
    """``mu_n 2phi1(q^-n, b; a q^{1-n}; q, qz)`` expanded into monomials.

    ``mu_n = a^n (1/a;q)_n / (b;q)_n``; the leading coefficient is checked
    against 1 before it is pinned.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    a = _as_mono(params.a, ctx)
    b = _as_mono(params.b, ctx)
    a_inv = QMonomial(1 / a.coef, -a.exp)
    den = _guard(q_pochhammer(b, n, phase, ctx), ctx, "(b;q)_n")
    mu = _value(a, phase, ctx) ** n * q_pochhammer(a_inv, n, phase, ctx) / den
    lower = QMonomial(a.coef, a.exp + 1 - n)
    terms = terminating_phi_terms(n, [b], [lower], qmono(1, 1), phase, ctx)
    return _monic_from([mu * t for t in terms], ctx, f"pastro polynomial of degree {n}")


def phi_via_hypergeometric(n: int, p, phase: UnitPhase, ctx: PrecisionContext) -> MonicPolynomial:
    """``Phi_n`` from the explicit ``2phi1`` formula with ``a = p, b = pq``."""
    _check_hyper_degree(n, phase)
    return pastro_polynomial(n, PastroParams.wrapped_geometric(ctx.real(p)), phase, ctx)


MomentSource = Union[Callable[[int], object], Sequence]


def _moment_getter(moments: MomentSource, n: int):
    if callable(moments):
        return moments
    if len(moments) != 2 * n + 1:
        raise ValueError(f"need sigma_-{n}..sigma_{n} ({2 * n + 1} values), got {len(moments)}")
    return lambda j: moments[j + n]


def _singular_threshold(n: int, ctx: PrecisionContext):
    # Hadamard-type bound for moments of modulus <= 1, times a loss margin.
    mp = ctx.mp
    return mp.mpf(n) ** (mp.mpf(n) / 2) * mp.mpf(2) ** (-(3 * ctx.precision_bits) // 4)


def toeplitz_delta(n: int, moments: MomentSource, ctx: PrecisionContext):
    """``Delta_n = det(sigma_{j-i})_{i,j<n}``; ``Delta_0 = 1``."""
    mp = ctx.mp
    if n == 0:
        return mp.mpc(1)
    sigma = moments if callable(moments) else _moment_getter(moments, (len(moments) - 1) // 2)
    return mp.det(mp.matrix([[sigma(j - i) for j in range(n)] for i in range(n)]))


def phi_via_toeplitz(n: int, moments: MomentSource, ctx: PrecisionContext):
    """``Phi_n`` as bordered Toeplitz determinant over ``Delta_n``.

    Expands along the bottom row ``(1, z, ..., z^n)``; returns
    ``(MonicPolynomial, Delta_n)``.
    """
    mp = ctx.mp
    if n == 0:
        return MonicPolynomial([mp.mpc(1)]), mp.mpc(1)
    sigma = _moment_getter(moments, n)
    rows = [[mp.mpc(sigma(j - i)) for j in range(n + 1)] for i in range(n)]
    delta = mp.det(mp.matrix([r[:n] for r in rows]))
    if abs(delta) < _singular_threshold(n, ctx):
        raise SingularToeplitz(f"|Delta_{n}| = {mp.nstr(abs(delta), 5)} is numerically zero")
    coeffs = []
    for k in range(n):
        minor = mp.matrix([r[:k] + r[k + 1:] for r in rows])
        sign = -1 if (n + k) % 2 else 1
        coeffs.append(sign * mp.det(minor) / delta)
    coeffs.append(mp.mpc(1))
    return MonicPolynomial(coeffs), delta


def h_product(n: int, verblunsky, ctx: PrecisionContext):
    """``prod_{j<n} (1 - |a_j|^2)``."""
    mp = ctx.mp
    h = mp.mpf(1)
    for j in range(n):
        h *= 1 - abs(mp.mpc(verblunsky[j])) ** 2
    return h


def h_closed(n: int, p, phase: UnitPhase, ctx: PrecisionContext):
    """``|(q;q)_n|^2 / |(pq;q)_n|^2 p^n``."""
    p = ctx.real(p)
    num = abs(q_pochhammer(qmono(1, 1), n, phase, ctx)) ** 2
    den = abs(_guard(q_pochhammer(qmono(p, 1), n, phase, ctx), ctx, "(pq;q)_n")) ** 2
    return num / den * p**n


def rotate(phi_n: Polynomial, varphi, ctx: PrecisionContext) -> MonicPolynomial:
    """Monic OPUC for the measure turned by ``+varphi``.

    Returns ``exp(i n varphi) Phi_n(exp(-i varphi) z)``, whose moments are
    ``exp(i n varphi) sigma_n``; coefficient ``j`` gains ``exp(i (n-j) varphi)``.
    """
    mp = ctx.mp
    varphi = ctx.real(varphi)
    n = phi_n.degree
    coeffs = [c * mp.expj((n - j) * varphi) for j, c in enumerate(phi_n.coeffs)]
    coeffs[-1] = mp.mpc(1)
    return MonicPolynomial(coeffs)


def phi_32_form(n: int, z: Param, p, phase: UnitPhase, ctx: PrecisionContext):
    """``Phi_n(z) = p^n (q;q)_n/(pq;q)_n z^n 3phi2(q^-n, 1/p, 1/z; q, 0; q)``.

    Pass ``z = qmono(1, s)`` for the spectral points ``q^s`` to keep ``1/z``
    exact.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    p = ctx.real(p)
    zm = _as_mono(z, ctx)
    if zm.coef == 0:
        raise ValueError("z must be nonzero")
    z_inv = QMonomial(1 / zm.coef, -zm.exp)
    den = _guard(q_pochhammer(qmono(p, 1), n, phase, ctx), ctx, "(pq;q)_n")
    prefactor = p**n * q_pochhammer(qmono(1, 1), n, phase, ctx) / den
    series = terminating_phi(n, [1 / p, z_inv], [qmono(1, 1), 0], qmono(1, 1), phase, ctx)
    return prefactor * _value(zm, phase, ctx) ** n * series


def max_coefficient_disagreement(polys: Sequence[Polynomial], ctx: PrecisionContext):
    """Largest coefficientwise ``|c - c'| / max(1, |c|)`` over all pairs."""
    mp = ctx.mp
    worst = mp.mpf(0)
    for i in range(len(polys)):
        for k in range(i + 1, len(polys)):
            for c1, c2 in zip(polys[i].coeffs, polys[k].coeffs, strict=True):
                worst = max(worst, abs(c1 - c2) / max(1, abs(c1)))
    return worst


class PolynomialFamily:
    """Degree-indexed cache of ``Phi_n`` built along one construction path.

    ``path`` is ``"hyper"`` (explicit formula, the default) or
    ``"recurrence"`` (Szegő recurrence from closed-form Verblunsky values).
    """

    PATHS = ("hyper", "recurrence")

    def __init__(self, p, phase: UnitPhase, ctx: PrecisionContext, path: str = "hyper"):
        if path not in self.PATHS:
            raise ValueError(f"unknown path {path!r}; expected one of {self.PATHS}")
        self.p = p
        self.phase = phase
        self.ctx = ctx
        self.path = path
        self._cache: dict[int, MonicPolynomial] = {}

    def __call__(self, n: int) -> MonicPolynomial:
        if n in self._cache:
            return self._cache[n]
        if self.path == "hyper":
            self._cache[n] = phi_via_hypergeometric(n, self.p, self.phase, self.ctx)
        else:
            top = max(self._cache, default=-1)
            if top < n:
                va = verblunsky_sequence(n, self.p, self.phase, self.ctx)
                for k, P in enumerate(phi_sequence_recurrence(n, va, self.ctx)):
                    self._cache.setdefault(k, P)
        return self._cache[n]
