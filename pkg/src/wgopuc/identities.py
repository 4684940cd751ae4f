"""Residual checks for the closed-form identities of the wrapped geometric OPUC.

Each check returns an :class:`IdentityReport`; ``passed`` is always exactly
``residual <= tolerance`` and nothing is dropped silently. Polynomials come
from a :class:`~wgopuc.opuc.PolynomialFamily` (the explicit formula by
default; pass ``path="recurrence"`` to re-verify along the Szegő path).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import NumericalGuardError, SmallDivisor
from .measure import WrappedGeometricMeasure, truncation_for
from .opuc import (
    Polynomial,
    PolynomialFamily,
    h_closed,
    mu_closed,
    phi_via_hypergeometric,
    toeplitz_delta,
)
from .qseries import (
    PrecisionContext,
    QMonomial,
    UnitPhase,
    decimal_string,
    phi_3_2_terminating,
    q_factor,
    q_pochhammer,
    q_power,
    qmono,
)

__all__ = [
    "IdentityKind",
    "IdentityReport",
    "RICoefficients",
    "DualityWeights",
    "relative_defect",
    "ri_coefficients",
    "duality_weights",
    "duality_A",
    "duality_B",
    "qdiff_coupling",
    "inj_bruteforce_row",
    "check_inj_bruteforce",
    "inj_closed",
    "duality_residual",
    "ri_recurrence_residual",
    "qdifference_residual",
    "mass_sum_terms",
    "mass_sum_partial",
    "mass_sum_run",
    "finite_ngon_h",
    "ngon_orthogonality",
    "saalschutz_sides",
    "check_saalschutz",
    "run_suite",
    "SUITES",
]


class IdentityKind(enum.Enum):
    ORTHOGONALITY = "Orthogonality"
    INJ_CLOSED = "InjClosed"
    DUALITY = "Duality"
    RI_RECURRENCE = "RIRecurrence"
    QDIFFERENCE = "QDifference"
    MASS_SUM = "MassSum"
    NGON_ORTHOGONALITY = "NgonOrthogonality"
    SAALSCHUTZ_SPOT = "SaalschutzSpot"


_KIND_ORDER = {kind: i for i, kind in enumerate(IdentityKind)}


@dataclass
class IdentityReport:
    identity: IdentityKind
    indices: tuple
    residual: object
    tolerance: object
    passed: bool = field(init=False)
    truncation_S: Optional[int] = None
    inconclusive: bool = False
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.residual <= self.tolerance)

    @property
    def status(self) -> str:
        if self.passed:
            return "pass"
        return "inconclusive" if self.inconclusive else "fail"

    def sort_key(self):
        return (_KIND_ORDER[self.identity], self.indices)

    def to_dict(self, ctx: PrecisionContext) -> dict:
        return {
            "identity": self.identity.value,
            "indices": list(self.indices),
            "residual": decimal_string(self.residual, ctx),
            "tolerance": decimal_string(self.tolerance, ctx),
            "passed": self.passed,
            "status": self.status,
            "truncation_S": self.truncation_S,
            "details": {k: _render(v, ctx) for k, v in sorted(self.details.items())},
        }


def _render(value, ctx):
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    return decimal_string(value, ctx)


def relative_defect(lhs, rhs):
    """``|lhs - rhs|`` divided by the larger magnitude when that exceeds 1."""
    return abs(lhs - rhs) / max(1, abs(lhs), abs(rhs))


def _default_tol(ctx: PrecisionContext, scale=100):
    return ctx.mp.mpf(ctx.tol_rel) * scale


def _family(p, phase, ctx, family):
    return family if family is not None else PolynomialFamily(p, phase, ctx)


# --- recurrence coefficients and duality weights -----------------------------------


@dataclass(frozen=True)
class RICoefficients:
    g: tuple
    d: tuple


@dataclass(frozen=True)
class DualityWeights:
    A: tuple
    B: tuple


def _ri_g(n, p, phase, ctx):
    return (q_power(phase, n, ctx) - p) / q_factor(qmono(p, n + 1), 0, phase, ctx)


def _ri_d(n, p, phase, ctx):
    one_minus_qn = q_factor(qmono(1, n), 0, phase, ctx)
    den = q_factor(qmono(p, n), 0, phase, ctx) * q_factor(qmono(p, n + 1), 0, phase, ctx)
    return -p * one_minus_qn**2 / den


def ri_coefficients(count: int, p, phase: UnitPhase, ctx: PrecisionContext) -> RICoefficients:
    """``g_n = (q^n - p)/(1 - p q^{n+1})``, ``d_n = -p (1-q^n)^2 / ((1-pq^n)(1-pq^{n+1}))``."""
    p = ctx.real(p)
    return RICoefficients(
        tuple(_ri_g(n, p, phase, ctx) for n in range(count)),
        tuple(_ri_d(n, p, phase, ctx) for n in range(count)),
    )


def duality_A(n: int, p, phase: UnitPhase, ctx: PrecisionContext):
    """``A_n = (pq;q)_n / (q;q)_n * p^-n``."""
    p = ctx.real(p)
    den = q_pochhammer(qmono(1, 1), n, phase, ctx)
    if abs(den) < ctx.tol_div:
        raise SmallDivisor(f"(q;q)_{n} below tol_div", magnitude=abs(den))
    return q_pochhammer(qmono(p, 1), n, phase, ctx) / den / p**n


def duality_B(s: int, p, phase: UnitPhase, ctx: PrecisionContext):
    """``B_s = A_{s-1}/A_s = p (1-q^s) / (1 - p q^s)``."""
    p = ctx.real(p)
    return p * q_factor(qmono(1, s), 0, phase, ctx) / q_factor(qmono(p, s), 0, phase, ctx)


def duality_weights(count: int, p, phase: UnitPhase, ctx: PrecisionContext) -> DualityWeights:
    return DualityWeights(
        tuple(duality_A(n, p, phase, ctx) for n in range(count)),
        tuple(duality_B(s, p, phase, ctx) for s in range(count)),
    )


def qdiff_coupling(s: int, p, phase: UnitPhase, ctx: PrecisionContext):
    """``d_s / B_s`` with the common ``(1-q^s)`` cancelled: ``-(1-q^s)/(1-pq^{s+1})``.

    Well defined at ``s = 0`` where it vanishes.
    """
    p = ctx.real(p)
    return -q_factor(qmono(1, s), 0, phase, ctx) / q_factor(qmono(p, s + 1), 0, phase, ctx)


# --- orthogonality -------------------------------------------------------------------


def _coefficient_l1(poly: Polynomial):
    return sum(abs(c) for c in poly.coeffs)


def _inj_truncation(poly, n, p, phase, ctx, truncation_tol):
    """``S`` with ``p^S <= tol`` and tail of ``I_nj`` below ``tol * h_n``."""
    m = WrappedGeometricMeasure(p, phase)
    h = h_closed(n, p, phase, ctx)
    S_plain = truncation_for(m, truncation_tol, ctx, scale=1 / (1 - ctx.real(p)))
    S_rel = truncation_for(m, ctx.real(truncation_tol) * h, ctx, scale=_coefficient_l1(poly))
    S = max(S_plain, S_rel)
    tail = ctx.real(p) ** S * _coefficient_l1(poly)
    return S, tail, h


def inj_bruteforce_row(n: int, S: int, p, phase: UnitPhase, ctx: PrecisionContext, poly=None):
    """``I_nj = (1-p) sum_{s<S} Phi_n(q^s) q^{-sj} p^s`` for ``j = 0..n``."""
    mp = ctx.mp
    pr = ctx.real(p)
    poly = poly if poly is not None else phi_via_hypergeometric(n, p, phase, ctx)
    sums = [[] for _ in range(n + 1)]
    w = 1 - pr
    for s in range(S):
        val = poly(q_power(phase, s, ctx)) * w
        for j in range(n + 1):
            sums[j].append(val * q_power(phase, -s * j, ctx))
        w *= pr
    return [mp.fsum(col) for col in sums]


def _inj_report(n, j, value, h, tail, S, ctx, tol):
    if j < n:
        residual = abs(value) / h
    else:
        residual = abs(value - h) / h
    tolerance = tol if tol is not None else _default_tol(ctx, 100 * (n + 1)) + tail / h
    return IdentityReport(
        IdentityKind.ORTHOGONALITY,
        (n, j),
        residual,
        tolerance,
        truncation_S=S,
        details={"tail_bound_rel": tail / h, "I_re": value.real, "I_im": value.imag},
    )


def check_inj_bruteforce(n: int, j: int, p, phase: UnitPhase, ctx: PrecisionContext, S: Optional[int] = None,
                         truncation_tol=1e-30, tol=None, family=None) -> IdentityReport:
    """Brute-force ``I_nj`` over the truncated atoms; ``|I_nj|/h_n`` or ``|I_nn - h_n|/h_n``."""
    if not 0 <= j <= n:
        raise ValueError("need 0 <= j <= n")
    poly = _family(p, phase, ctx, family)(n)
    S_auto, tail, h = _inj_truncation(poly, n, p, phase, ctx, truncation_tol)
    if S is None:
        S = S_auto
    else:
        tail = ctx.real(p) ** S * _coefficient_l1(poly)
    value = inj_bruteforce_row(n, S, p, phase, ctx, poly)[j]
    return _inj_report(n, j, value, h, tail, S, ctx, tol)


def check_inj_row(n: int, p, phase: UnitPhase, ctx: PrecisionContext, truncation_tol=1e-30, tol=None,
                  family=None) -> list[IdentityReport]:
    """All ``j = 0..n`` of :func:`check_inj_bruteforce`, sharing one truncated sum."""
    poly = _family(p, phase, ctx, family)(n)
    S, tail, h = _inj_truncation(poly, n, p, phase, ctx, truncation_tol)
    row = inj_bruteforce_row(n, S, p, phase, ctx, poly)
    return [_inj_report(n, j, row[j], h, tail, S, ctx, tol) for j in range(n + 1)]


def inj_closed(n: int, j: int, p, phase: UnitPhase, ctx: PrecisionContext):
    """Closed form of ``I_nj`` after summing over atoms and applying q-Saalschütz.

    The factor ``(q^{j+1-n};q)_n`` contains ``1 - q^0`` for ``0 <= j < n``,
    which is an exact zero here.
    """
    pr = ctx.real(p)
    pref = (1 - pr) * mu_closed(n, p, phase, ctx) / q_factor(qmono(pr, -j), 0, phase, ctx)
    num = q_pochhammer(qmono(1, -n), n, phase, ctx) * q_pochhammer(qmono(1, j + 1 - n), n, phase, ctx)
    den = q_pochhammer(qmono(pr, 1 - n), n, phase, ctx) * q_pochhammer(qmono(1 / pr, j - n), n, phase, ctx)
    if abs(den) < ctx.tol_div:
        raise SmallDivisor("I_nj closed-form denominator below tol_div", magnitude=abs(den))
    return pref * num / den


# --- duality, R_I recurrence, q-difference -----------------------------------------


def duality_residual(n: int, s: int, p, phase: UnitPhase, ctx: PrecisionContext, tol=None,
                     family=None) -> IdentityReport:
    """``A_s Phi_s(q^n)`` against ``A_n Phi_n(q^s)``."""
    fam = _family(p, phase, ctx, family)
    lhs = duality_A(s, p, phase, ctx) * fam(s)(q_power(phase, n, ctx))
    rhs = duality_A(n, p, phase, ctx) * fam(n)(q_power(phase, s, ctx))
    tolerance = tol if tol is not None else _default_tol(ctx)
    return IdentityReport(IdentityKind.DUALITY, (n, s), relative_defect(lhs, rhs), tolerance)


def _point(z, phase, ctx):
    if isinstance(z, QMonomial):
        return ctx.complex(z.coef) * q_power(phase, z.exp, ctx)
    return ctx.complex(z)


def ri_recurrence_residual(n: int, z, p, phase: UnitPhase, ctx: PrecisionContext, tol=None,
                           family=None, label=None) -> IdentityReport:
    """``Phi_{n+1}(z) + g_n Phi_n(z)`` against ``z (Phi_n(z) + d_n Phi_{n-1}(z))``."""
    fam = _family(p, phase, ctx, family)
    pr = ctx.real(p)
    zv = _point(z, phase, ctx)
    g = _ri_g(n, pr, phase, ctx)
    d = _ri_d(n, pr, phase, ctx)
    lhs = fam(n + 1)(zv) + g * fam(n)(zv)
    prev = fam(n - 1)(zv) if n >= 1 else 0
    rhs = zv * (fam(n)(zv) + d * prev)
    tolerance = tol if tol is not None else _default_tol(ctx)
    details = {"z": label if label is not None else str(z)}
    return IdentityReport(IdentityKind.RI_RECURRENCE, (n,), relative_defect(lhs, rhs), tolerance, details=details)


def qdifference_residual(n: int, s: int, p, phase: UnitPhase, ctx: PrecisionContext, tol=None,
                         family=None) -> IdentityReport:
    """``B_{s+1} Phi_n(q^{s+1}) + g_s Phi_n(q^s)`` against ``q^n (Phi_n(q^s) + (d_s/B_s) Phi_n(q^{s-1}))``.

    ``d_s/B_s`` comes from :func:`qdiff_coupling`, so ``s = 0`` is regular.
    """
    if s < 0 or n < 0:
        raise ValueError("need n, s >= 0")
    P = _family(p, phase, ctx, family)(n)
    pr = ctx.real(p)
    at = lambda k: P(q_power(phase, k, ctx))  # noqa: E731
    lhs = duality_B(s + 1, pr, phase, ctx) * at(s + 1) + _ri_g(s, pr, phase, ctx) * at(s)
    rhs = q_power(phase, n, ctx) * (at(s) + qdiff_coupling(s, pr, phase, ctx) * at(s - 1))
    tolerance = tol if tol is not None else _default_tol(ctx)
    return IdentityReport(IdentityKind.QDIFFERENCE, (n, s), relative_defect(lhs, rhs), tolerance)


# --- mass-sum identity ---------------------------------------------------------------


def _mass_term_stream(s, p, phase, ctx, fam):
    mp = ctx.mp
    pr = ctx.real(p)
    zs = q_power(phase, s, ctx)
    Ps = fam(s)
    As2 = abs(duality_A(s, p, phase, ctx)) ** 2
    h = mp.mpf(1)
    n = 0
    while True:
        if n > 0:
            h *= pr * abs(q_factor(qmono(1, n), 0, phase, ctx)) ** 2 / abs(q_factor(qmono(pr, n), 0, phase, ctx)) ** 2
        yield abs(fam(n)(zs)) ** 2 / h, As2 * abs(Ps(q_power(phase, n, ctx))) ** 2 * pr**n
        n += 1


def mass_sum_terms(s: int, count: int, p, phase: UnitPhase, ctx: PrecisionContext, family=None):
    """Terms ``n < count`` of the mass sum, computed two ways.

    Returns ``(direct, dual)`` with ``direct[n] = |Phi_n(q^s)|^2 / h_n`` and
    ``dual[n] = |A_s|^2 |Phi_s(q^n)|^2 p^n`` (the duality-transformed term).
    """
    stream = _mass_term_stream(s, p, phase, ctx, _family(p, phase, ctx, family))
    pairs = [next(stream) for _ in range(count)]
    return [a for a, _ in pairs], [b for _, b in pairs]


def _mass_target(s, p, ctx):
    pr = ctx.real(p)
    return pr ** (-s) / (1 - pr)


def _mass_report(s, direct, dual, target, gap_tol, ctx):
    mp = ctx.mp
    slack = target * mp.mpf(ctx.tol_rel)
    partials = []
    acc = mp.mpf(0)
    for t in direct:
        acc += t
        partials.append(acc)
    monotone = all(b >= a for a, b in zip(partials, partials[1:]))
    bounded = all(x <= target + slack for x in partials)
    termwise = max(relative_defect(a, b) for a, b in zip(direct, dual))
    gap = (target - partials[-1]) / target
    structural_ok = monotone and bounded and termwise <= _default_tol(ctx, 100 * len(direct))
    residual = abs(gap) if structural_ok else mp.inf
    report = IdentityReport(
        IdentityKind.MASS_SUM,
        (s,),
        residual,
        mp.mpf(gap_tol),
        truncation_S=len(direct),
        details={
            "partial": partials[-1],
            "target": target,
            "monotone": monotone,
            "bounded": bounded,
            "termwise_dual_defect": termwise,
        },
    )
    report.inconclusive = structural_ok and not report.passed
    return partials[-1], report


def mass_sum_partial(s: int, N_terms: int, p, phase: UnitPhase, ctx: PrecisionContext, gap_tol=0.01,
                     family=None):
    """Partial sum over ``n < N_terms``; returns ``(partial, target, report)``."""
    if N_terms < 1:
        raise ValueError("N_terms must be >= 1")
    direct, dual = mass_sum_terms(s, N_terms, p, phase, ctx, family)
    target = _mass_target(s, p, ctx)
    partial, report = _mass_report(s, direct, dual, target, gap_tol, ctx)
    return partial, target, report


def mass_sum_run(s: int, p, phase: UnitPhase, ctx: PrecisionContext, gap_tol=0.01, budget: int = 500,
                 family=None) -> IdentityReport:
    """Add terms until the relative gap drops below ``gap_tol`` or the budget runs out.

    A budget exhausted while the partial sums are still monotone and bounded
    gives an inconclusive report, never a pass.
    """
    target = _mass_target(s, p, ctx)
    stream = _mass_term_stream(s, p, phase, ctx, _family(p, phase, ctx, family))
    direct, dual = [], []
    acc = ctx.mp.mpf(0)
    while len(direct) < budget:
        a, b = next(stream)
        direct.append(a)
        dual.append(b)
        acc += a
        if (target - acc) / target < gap_tol:
            break
    _, report = _mass_report(s, direct, dual, target, gap_tol, ctx)
    return report


# --- finite N-gon case ---------------------------------------------------------------


def _ngon_weights(N, p, ctx):
    pr = ctx.real(p)
    return [(1 - pr**N) * pr**s for s in range(N)]


def finite_ngon_h(N: int, M: int, p, n: int, ctx: PrecisionContext):
    """``h_n`` of the finite measure with weights ``(1-p^N) p^s`` at ``q^s``, ``s < N``.

    Computed independently as ``Delta_{n+1} / Delta_n`` from that measure's
    moments.
    """
    phase = UnitPhase.rational(M, N)
    weights = _ngon_weights(N, p, ctx)

    def sigma(j):
        return ctx.mp.fsum(w * q_power(phase, s * j, ctx) for s, w in enumerate(weights))

    cache = {}

    def cached(j):
        if j not in cache:
            cache[j] = sigma(j)
        return cache[j]

    return (toeplitz_delta(n + 1, cached, ctx) / toeplitz_delta(n, cached, ctx)).real


def ngon_orthogonality(N: int, M: int, p, n: int, m: int, ctx: PrecisionContext, tol=None,
                       family=None, calibration=None) -> IdentityReport:
    """Finite sum ``sum_{s<N} Phi_n(q^s) conj(Phi_m)(q^-s) (1-p^N) p^s`` at ``q = exp(2 pi i M/N)``.

    Off-diagonal entries are scaled by ``sqrt(h_n h_m)`` of the finite measure;
    diagonal entries are compared against that calibrated ``h_n``.
    """
    if math.gcd(M, N) != 1:
        raise ValueError(f"M={M}, N={N} are not coprime")
    if not (0 <= n < N and 0 <= m < N):
        raise ValueError("need 0 <= n, m <= N-1")
    phase = UnitPhase.rational(M, N)
    fam = family if family is not None else PolynomialFamily(p, phase, ctx)
    Pn, Pm = fam(n), fam(m)
    Pm_bar = Polynomial([c.conjugate() for c in Pm.coeffs])
    weights = _ngon_weights(N, p, ctx)
    total = ctx.mp.fsum(
        Pn(q_power(phase, s, ctx)) * Pm_bar(q_power(phase, -s, ctx)) * w for s, w in enumerate(weights)
    )
    cal = calibration if calibration is not None else {}
    for k in {n, m}:
        if k not in cal:
            cal[k] = finite_ngon_h(N, M, p, k, ctx)
    if n == m:
        residual = abs(total - cal[n]) / cal[n]
    else:
        residual = abs(total) / ctx.mp.sqrt(cal[n] * cal[m])
    tolerance = tol if tol is not None else _default_tol(ctx, 10)
    details = {"sum_re": total.real, "sum_im": total.imag}
    if n == m:
        details["calibrated_h"] = cal[n]
        details["ratio_to_infinite_h"] = total.real / h_closed(n, p, phase, ctx)
    return IdentityReport(IdentityKind.NGON_ORTHOGONALITY, (N, M, n, m), residual, tolerance, details=details)


# --- q-Saalschütz ----------------------------------------------------------------------


def saalschutz_sides(n: int, a, b, c, phase: UnitPhase, ctx: PrecisionContext):
    """Both sides of ``3phi2(q^-n, a, b; c, ab q^{1-n}/c; q, q) = (c/a)_n (c/b)_n / ((c)_n (c/ab)_n)``."""
    a, b, c = (ctx.complex(x) for x in (a, b, c))
    lhs = phi_3_2_terminating(n, a, b, c, qmono(a * b / c, 1 - n), qmono(1, 1), phase, ctx)
    num = q_pochhammer(c / a, n, phase, ctx) * q_pochhammer(c / b, n, phase, ctx)
    den = q_pochhammer(c, n, phase, ctx) * q_pochhammer(c / (a * b), n, phase, ctx)
    if abs(den) < ctx.tol_div:
        raise SmallDivisor("q-Saalschutz right-hand denominator below tol_div", magnitude=abs(den))
    return lhs, num / den


def check_saalschutz(n: int, a, b, c, phase: UnitPhase, ctx: PrecisionContext, tol=None, label=()) -> IdentityReport:
    lhs, rhs = saalschutz_sides(n, a, b, c, phase, ctx)
    rel = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    tolerance = tol if tol is not None else _default_tol(ctx)
    return IdentityReport(IdentityKind.SAALSCHUTZ_SPOT, (n,) + tuple(label), rel, tolerance)


def random_saalschutz_instance(rng, n_max: int, ctx: PrecisionContext):
    """A random ``(n, a, b, c)`` with parameters well away from the unit circle's small divisors."""
    mp = ctx.mp

    def draw():
        r = rng.uniform(0.2, 0.8) if rng.random() < 0.5 else rng.uniform(1.3, 3.0)
        return r * mp.expjpi(2 * mp.mpf(rng.random()))

    n = rng.randint(0, n_max)
    return n, draw(), draw(), draw()


# --- suite runner ----------------------------------------------------------------------

SUITES = ("orthogonality", "duality", "recurrence", "qdiff", "masssum", "ngon", "saalschutz")


def _guarded_check(reports, kind, indices, fn):
    try:
        result = fn()
    except NumericalGuardError as exc:
        rep = IdentityReport(kind, indices, float("inf"), 0.0, details={"error": f"{type(exc).__name__}: {exc}"})
        reports.append(rep)
        return
    if isinstance(result, list):
        reports.extend(result)
    else:
        reports.append(result)


def run_suite(p, phase: UnitPhase, ctx: PrecisionContext, suites: Sequence[str] = ("all",), n_max: int = 10,
              truncation_tol=1e-30, path: str = "hyper", mass_s: Sequence[int] = (0, 1, 2),
              mass_budget: int = 500, gap_tol=0.01, saalschutz_count: int = 100, saalschutz_n_max: int = 12,
              seed: int = 0) -> list[IdentityReport]:
    """Run the selected identity checks and return reports in deterministic order.

    ``"all"`` runs every suite; the ``ngon`` suite needs a root-of-unity phase
    and is skipped by ``"all"`` otherwise.
    """
    import random

    selected = list(SUITES) if "all" in suites else list(suites)
    for name in selected:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}")
    if "ngon" in selected and not phase.is_rational:
        if "all" in suites:
            selected.remove("ngon")
        else:
            raise ValueError("the ngon suite needs a rational chi = M/N")
    if phase.is_rational:
        n_max = min(n_max, phase.N - 2)
        saalschutz_n_max = min(saalschutz_n_max, phase.N - 1)
    fam = PolynomialFamily(p, phase, ctx, path)
    K = IdentityKind
    reports: list[IdentityReport] = []

    if "orthogonality" in selected:
        for n in range(n_max + 1):
            _guarded_check(reports, K.ORTHOGONALITY, (n,),
                           lambda: check_inj_row(n, p, phase, ctx, truncation_tol, family=fam))
            _guarded_check(reports, K.INJ_CLOSED, (n,), lambda: _inj_closed_report(n, p, phase, ctx))
    if "duality" in selected:
        for n in range(n_max + 1):
            for s in range(n_max + 1):
                _guarded_check(reports, K.DUALITY, (n, s), lambda: duality_residual(n, s, p, phase, ctx, family=fam))
    if "recurrence" in selected:
        points = [(qmono(1, k), f"q^{k}") for k in range(6)] + [(2, "2"), (ctx.mp.mpc("0.5", "0.1"), "0.5+0.1i")]
        for n in range(n_max):
            for z, label in points:
                _guarded_check(reports, K.RI_RECURRENCE, (n,),
                               lambda: ri_recurrence_residual(n, z, p, phase, ctx, family=fam, label=label))
    if "qdiff" in selected:
        for n in range(n_max + 1):
            for s in range(n_max + 1):
                _guarded_check(reports, K.QDIFFERENCE, (n, s),
                               lambda: qdifference_residual(n, s, p, phase, ctx, family=fam))
    if "masssum" in selected and phase.is_rational:
        if "all" not in suites:
            raise ValueError("the masssum suite needs an irrational chi")
        selected.remove("masssum")
    if "masssum" in selected:
        for s in mass_s:
            _guarded_check(reports, K.MASS_SUM, (s,),
                           lambda: mass_sum_run(s, p, phase, ctx, gap_tol, mass_budget, family=fam))
    if "ngon" in selected:
        N, M = phase.N, phase.M
        cal: dict = {}
        for n in range(N):
            for m in range(N):
                _guarded_check(reports, K.NGON_ORTHOGONALITY, (N, M, n, m),
                               lambda: ngon_orthogonality(N, M, p, n, m, ctx, family=fam, calibration=cal))
    if "saalschutz" in selected:
        rng = random.Random(seed)
        for i in range(saalschutz_count):
            n, a, b, c = random_saalschutz_instance(rng, saalschutz_n_max, ctx)
            _guarded_check(reports, K.SAALSCHUTZ_SPOT, (n, i),
                           lambda: check_saalschutz(n, a, b, c, phase, ctx, label=(i,)))
    reports.sort(key=IdentityReport.sort_key)
    return reports


def _inj_closed_report(n, p, phase, ctx):
    """``I_nj`` closed form: exact zeros below the diagonal, ``h_n`` on it."""
    h = h_closed(n, p, phase, ctx)
    out = []
    for j in range(n + 1):
        value = inj_closed(n, j, p, phase, ctx)
        residual = abs(value) / h if j < n else abs(value - h) / h
        out.append(IdentityReport(IdentityKind.INJ_CLOSED, (n, j), residual, _default_tol(ctx)))
    return out
