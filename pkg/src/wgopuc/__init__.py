"""Orthogonal polynomials on the unit circle for the wrapped geometric distribution."""

from .errors import NotMonic, NumericalGuardError, SingularToeplitz, SmallDivisor
from .measure import MeasureAtom, WrappedGeometricMeasure, atoms, moment_bruteforce, moment_closed
from .opuc import (
    MonicPolynomial,
    PastroParams,
    Polynomial,
    PolynomialFamily,
    VerblunskySequence,
    h_closed,
    h_product,
    pastro_polynomial,
    phi_32_form,
    phi_star,
    phi_via_hypergeometric,
    phi_via_recurrence,
    phi_via_toeplitz,
    rotate,
    verblunsky_closed,
    verblunsky_sequence,
)
from .qseries import PrecisionContext, QMonomial, UnitPhase, q_pochhammer, q_power, qmono

__version__ = "0.1.0"

__all__ = [
    "NotMonic",
    "NumericalGuardError",
    "SingularToeplitz",
    "SmallDivisor",
    "MeasureAtom",
    "WrappedGeometricMeasure",
    "atoms",
    "moment_bruteforce",
    "moment_closed",
    "MonicPolynomial",
    "PastroParams",
    "Polynomial",
    "PolynomialFamily",
    "VerblunskySequence",
    "h_closed",
    "h_product",
    "pastro_polynomial",
    "phi_32_form",
    "phi_star",
    "phi_via_hypergeometric",
    "phi_via_recurrence",
    "phi_via_toeplitz",
    "rotate",
    "verblunsky_closed",
    "verblunsky_sequence",
    "PrecisionContext",
    "QMonomial",
    "UnitPhase",
    "q_pochhammer",
    "q_power",
    "qmono",
]
