"""Conversions between the two coefficient classes.

Only polynomial values convert: an exponential polynomial with no exp/trig
part maps to an exact rational polynomial (float coefficients are
reconstructed as small rationals and verified), and a rational function
with constant denominator maps back to floats.
"""

from __future__ import annotations

from fractions import Fraction

import sympy as sp

from .errors import ClassMismatch
from .exppoly import ExpPoly, KIND_ONE
from .rational import RationalFunction, chart_symbols


def exppoly_to_rational(p: ExpPoly) -> RationalFunction:
    if not p.is_polynomial():
        raise ClassMismatch(
            "exponential/trig terms cannot be converted to a rational function"
        )
    syms = chart_symbols(p.chart)
    expr = sp.Integer(0)
    for (k, _, _, _), c in p.terms.items():
        fr = Fraction(c).limit_denominator(10 ** 12)
        if abs(float(fr) - c) > 1e-12 * max(1.0, abs(c)):
            raise ClassMismatch(f"coefficient {c} is not recognizably rational")
        mono = sp.Rational(fr.numerator, fr.denominator)
        for i, ki in enumerate(k):
            if ki:
                mono *= syms[i] ** ki
        expr += mono
    return RationalFunction(p.chart, expr)


def rational_to_exppoly(r: RationalFunction) -> ExpPoly:
    num, den = sp.fraction(r.expr)
    if den.free_symbols:
        raise ClassMismatch("non-constant denominator cannot become an ExpPoly")
    syms = chart_symbols(r.chart)
    poly = sp.Poly(num / den, *syms)
    n = len(syms)
    terms = {}
    for monom, coeff in poly.terms():
        key = (tuple(monom), (0.0,) * n, (0.0,) * n, KIND_ONE)
        terms[key] = float(coeff)
    return ExpPoly(r.chart, terms)
