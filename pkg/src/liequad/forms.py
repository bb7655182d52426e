"""Exterior calculus over a chart: differential forms, vector fields,
point maps, structure-equation residuals and the quadrature (potential)
operator.

Coefficients are either exponential polynomials or exact rational
functions; the two classes never mix inside one form.  Antisymmetry is
structural: coefficients are indexed by strictly increasing index tuples.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .convert import exppoly_to_rational, rational_to_exppoly
from .errors import (
    BasepointOnPole,
    ClassMismatch,
    MismatchedVarSet,
    NotClosed,
    PoleAtPoint,
)
from .exppoly import ExpPoly, ZERO_TOL
from .rational import LogExtendedScalar, RationalFunction
from .varset import VarSet

Index = tuple[int, ...]


def _coerce_number(scls, chart: VarSet, value):
    if scls is ExpPoly:
        return ExpPoly.constant(chart, float(value))
    return RationalFunction.constant(chart, value)


def _scale_factor(scls, value):
    """Number form usable on the right of scalar *."""
    if scls is ExpPoly:
        return float(value)
    return Fraction(value) if not isinstance(value, Fraction) else value


class DiffForm:
    __slots__ = ("chart", "degree", "coeffs", "scls")

    def __init__(self, chart: VarSet, degree: int, coeffs: Mapping[Index, object], scls=None):
        if degree < 0 or degree > len(chart):
            raise ValueError(f"degree {degree} out of range for chart of dim {len(chart)}")
        clean: dict[Index, object] = {}
        for idx, c in coeffs.items():
            idx = tuple(idx)
            if len(idx) != degree or any(a >= b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index tuple {idx} must be strictly increasing of length {degree}")
            if scls is None:
                scls = type(c)
            if c.is_zero():
                continue
            clean[idx] = c
        if scls is None:
            raise ValueError("scalar class undetermined; pass scls for empty forms")
        self.chart = chart
        self.degree = degree
        self.coeffs = clean
        self.scls = scls

    # ------------------------------------------------------------------
    @classmethod
    def zero(cls, chart: VarSet, degree: int, scls=ExpPoly):
        return cls(chart, degree, {}, scls)

    @classmethod
    def function(cls, f):
        """Degree-0 form wrapping a scalar."""
        return cls(f.chart, 0, {(): f}, type(f))

    @classmethod
    def d_coordinate(cls, chart: VarSet, name: str, scls=ExpPoly):
        i = chart.index(name)
        return cls(chart, 1, {(i,): scls.one(chart)}, scls)

    def coefficient(self, idx: Index):
        idx = tuple(idx)
        c = self.coeffs.get(idx)
        if c is None:
            return self.scls.zero(self.chart)
        return c

    # ------------------------------------------------------------------
    def _check(self, other: "DiffForm"):
        if self.chart != other.chart:
            raise MismatchedVarSet(f"{self.chart.names} vs {other.chart.names}")
        if self.scls is not other.scls:
            raise ClassMismatch(f"{self.scls.__name__} vs {other.scls.__name__}")

    def __add__(self, other: "DiffForm"):
        self._check(other)
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        acc = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            acc[idx] = acc[idx] + c if idx in acc else c
        return DiffForm(self.chart, self.degree, acc, self.scls)

    def __neg__(self):
        return DiffForm(self.chart, self.degree, {i: -c for i, c in self.coeffs.items()}, self.scls)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Multiply by a scalar or a plain number."""
        if isinstance(other, (int, float, Fraction)):
            if other == 0:
                return DiffForm.zero(self.chart, self.degree, self.scls)
            f = _scale_factor(self.scls, other)
            return DiffForm(
                self.chart, self.degree, {i: c * f for i, c in self.coeffs.items()}, self.scls
            )
        return DiffForm(
            self.chart, self.degree, {i: c * other for i, c in self.coeffs.items()}, self.scls
        )

    __rmul__ = __mul__

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        return all(c.is_zero(tol) for c in self.coeffs.values())

    def max_abs_coeff(self) -> float:
        worst = 0.0
        for c in self.coeffs.values():
            if isinstance(c, ExpPoly):
                worst = max(worst, c.max_abs_coeff())
            elif not c.is_zero():
                worst = max(worst, 1.0)
        return worst

    def isclose(self, other: "DiffForm", tol: float = ZERO_TOL) -> bool:
        return (self - other).is_zero(tol)

    # ------------------------------------------------------------------
    def wedge(self, other: "DiffForm") -> "DiffForm":
        self._check(other)
        p, q = self.degree, other.degree
        if p + q > len(self.chart):
            return DiffForm.zero(self.chart, min(p + q, len(self.chart)), self.scls)
        acc: dict[Index, object] = {}
        for I, a in self.coeffs.items():
            si = set(I)
            for J, b in other.coeffs.items():
                if si & set(J):
                    continue
                merged, sign = _merge_sorted(I, J)
                c = a * b if sign > 0 else -(a * b)
                acc[merged] = acc[merged] + c if merged in acc else c
        return DiffForm(self.chart, p + q, acc, self.scls)

    def exterior_d(self) -> "DiffForm":
        chart = self.chart
        if self.degree >= len(chart):
            # a top-degree form has vanishing differential
            return DiffForm.zero(chart, self.degree, self.scls)
        acc: dict[Index, object] = {}
        for I, a in self.coeffs.items():
            for v, name in enumerate(chart.names):
                if v in I:
                    continue
                da = a.diff(name)
                if da.is_zero():
                    continue
                merged, sign = _merge_sorted((v,), I)
                c = da if sign > 0 else -da
                acc[merged] = acc[merged] + c if merged in acc else c
        return DiffForm(chart, self.degree + 1, acc, self.scls)

    def interior(self, X: "VectorField") -> "DiffForm":
        if self.chart != X.chart:
            raise MismatchedVarSet("vector field over a different chart")
        if self.degree == 0:
            raise ValueError("interior product needs degree >= 1")
        acc: dict[Index, object] = {}
        for I, a in self.coeffs.items():
            for t, i in enumerate(I):
                comp = X.components[i]
                if comp.is_zero():
                    continue
                rest = I[:t] + I[t + 1:]
                c = a * comp
                if t % 2:
                    c = -c
                acc[rest] = acc[rest] + c if rest in acc else c
        return DiffForm(self.chart, self.degree - 1, acc, self.scls)

    # ------------------------------------------------------------------
    def coeff_matrix_at(self, point: Mapping[str, float]) -> np.ndarray:
        """Degree-1 form coefficients as a numeric row vector."""
        if self.degree != 1:
            raise ValueError("only for 1-forms")
        out = np.zeros(len(self.chart))
        for (i,), c in self.coeffs.items():
            out[i] = c.evaluate(point)
        return out

    def eval_on_vectors(self, point: Mapping[str, float], vectors: Sequence[np.ndarray]) -> float:
        """alpha(point; v_1..v_p) with tangent vectors given numerically."""
        if len(vectors) != self.degree:
            raise ValueError("wrong number of tangent vectors")
        total = 0.0
        if self.degree == 0:
            c = self.coeffs.get(())
            return c.evaluate(point) if c is not None else 0.0
        for I, a in self.coeffs.items():
            sub = np.array([[v[i] for i in I] for v in vectors])
            total += a.evaluate(point) * float(np.linalg.det(sub))
        return total

    def __repr__(self):
        if not self.coeffs:
            return "DiffForm(0)"
        parts = []
        for I, c in sorted(self.coeffs.items()):
            basis = "^".join(f"d{self.chart.names[i]}" for i in I) or "1"
            parts.append(f"({c!r}) {basis}")
        return "DiffForm(" + " + ".join(parts) + ")"


def _merge_sorted(I: Index, J: Index) -> tuple[Index, int]:
    """Merge two disjoint increasing tuples, tracking the permutation sign."""
    out = []
    sign = 1
    i = j = 0
    while i < len(I) and j < len(J):
        if I[i] < J[j]:
            out.append(I[i])
            i += 1
        else:
            out.append(J[j])
            # J[j] moves past the remaining len(I) - i entries of I
            if (len(I) - i) % 2:
                sign = -sign
            j += 1
    out.extend(I[i:])
    out.extend(J[j:])
    return tuple(out), sign


class VectorField:
    __slots__ = ("chart", "components", "scls")

    def __init__(self, chart: VarSet, components: Sequence[object], scls=None):
        components = list(components)
        if len(components) != len(chart):
            raise ValueError("one component per coordinate required")
        if scls is None:
            scls = type(components[0])
        self.chart = chart
        self.components = components
        self.scls = scls

    @classmethod
    def coordinate(cls, chart: VarSet, name: str, scls=ExpPoly):
        comps = [scls.zero(chart) for _ in chart.names]
        comps[chart.index(name)] = scls.one(chart)
        return cls(chart, comps, scls)

    def __add__(self, other: "VectorField"):
        if self.chart != other.chart:
            raise MismatchedVarSet("chart mismatch")
        return VectorField(
            self.chart,
            [a + b for a, b in zip(self.components, other.components)],
            self.scls,
        )

    def __neg__(self):
        return VectorField(self.chart, [-a for a in self.components], self.scls)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float, Fraction)):
            other = _scale_factor(self.scls, other)
        return VectorField(self.chart, [c * other for c in self.components], self.scls)

    __rmul__ = __mul__

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        return all(c.is_zero(tol) for c in self.components)

    def at(self, point: Mapping[str, float]) -> np.ndarray:
        return np.array([c.evaluate(point) for c in self.components])

    def __repr__(self):
        parts = [
            f"({c!r}) d/d{n}"
            for c, n in zip(self.components, self.chart.names)
            if not c.is_zero()
        ]
        return "VectorField(" + (" + ".join(parts) or "0") + ")"


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    if X.chart != Y.chart:
        raise MismatchedVarSet("chart mismatch")
    chart = X.chart
    comps = []
    for k in range(len(chart)):
        acc = X.scls.zero(chart)
        for j, name in enumerate(chart.names):
            xj = X.components[j]
            yj = Y.components[j]
            if not xj.is_zero():
                acc = acc + xj * Y.components[k].diff(name)
            if not yj.is_zero():
                acc = acc - yj * X.components[k].diff(name)
        comps.append(acc)
    return VectorField(chart, comps, X.scls)


def pairing(alpha: DiffForm, X: VectorField):
    """<alpha, X> for a 1-form; a scalar."""
    if alpha.degree != 1:
        raise ValueError("pairing needs a 1-form")
    if alpha.chart != X.chart:
        raise MismatchedVarSet("chart mismatch")
    acc = alpha.scls.zero(alpha.chart)
    for (i,), c in alpha.coeffs.items():
        acc = acc + c * X.components[i]
    return acc


@dataclass
class PointMap:
    """Smooth map between charts, one scalar component per target coordinate."""

    source: VarSet
    target: VarSet
    components: list

    def __post_init__(self):
        if len(self.components) != len(self.target):
            raise ValueError("one component per target coordinate required")
        for c in self.components:
            if c.chart != self.source:
                raise MismatchedVarSet("components must live over the source chart")

    def __call__(self, point: Mapping[str, float]) -> dict[str, float]:
        return {
            name: comp.evaluate(point)
            for name, comp in zip(self.target.names, self.components)
        }

    def jacobian_at(self, point: Mapping[str, float]) -> np.ndarray:
        J = np.zeros((len(self.target), len(self.source)))
        for i, comp in enumerate(self.components):
            for j, name in enumerate(self.source.names):
                J[i, j] = comp.diff(name).evaluate(point)
        return J

    @classmethod
    def identity(cls, chart: VarSet, scls=ExpPoly):
        return cls(chart, chart, [scls.coordinate(chart, n) for n in chart.names])


def _compose_scalar(c, phi: PointMap):
    """c over phi.target composed with phi, converting classes as needed."""
    target_scls = type(phi.components[0])
    if isinstance(c, target_scls):
        pass
    elif isinstance(c, ExpPoly):
        c = exppoly_to_rational(c)
    elif isinstance(c, RationalFunction):
        c = rational_to_exppoly(c)
    else:
        raise ClassMismatch(f"cannot compose {type(c).__name__} along this map")
    bindings = {
        name: comp for name, comp in zip(phi.target.names, phi.components)
    }
    if isinstance(c, ExpPoly):
        return c.substitute(bindings)
    return c.compose(bindings)


def pullback(phi: PointMap, alpha: DiffForm) -> DiffForm:
    """phi^* alpha, exact via the chain rule.

    Raises NonAffineExponentSubstitution when an exponential-polynomial
    coefficient composition leaves the class; callers then fall back to
    numeric sampling.
    """
    if alpha.chart != phi.target:
        raise MismatchedVarSet("form must live over the target chart")
    scls = type(phi.components[0])
    if alpha.degree == 0:
        c = alpha.coeffs.get(())
        if c is None:
            return DiffForm.zero(phi.source, 0, scls)
        return DiffForm.function(_compose_scalar(c, phi))
    # differentials of the components
    dphi = []
    for comp in phi.components:
        coeffs = {}
        for j, name in enumerate(phi.source.names):
            d = comp.diff(name)
            if not d.is_zero():
                coeffs[(j,)] = d
        dphi.append(DiffForm(phi.source, 1, coeffs, scls))
    result = DiffForm.zero(phi.source, alpha.degree, scls)
    for I, a in alpha.coeffs.items():
        piece = DiffForm.function(_compose_scalar(a, phi))
        for i in I:
            piece = piece.wedge(dphi[i])
        result = result + piece
    return result


def structure_residual(omegas: Sequence[DiffForm], sc) -> list[DiffForm]:
    """d omega^i + (1/2) C^i_{jk} omega^j wedge omega^k for each i."""
    n = sc.dim
    if len(omegas) != n:
        raise ValueError(f"expected {n} forms, got {len(omegas)}")
    out = []
    for i in range(n):
        res = omegas[i].exterior_d()
        for j in range(n):
            for k in range(j + 1, n):
                c = sc.C[i][j][k]
                if c != 0:
                    res = res + omegas[j].wedge(omegas[k]) * c
        out.append(res)
    return out


def potential(
    omega: DiffForm,
    basepoint: Mapping[str, object] | None = None,
    tol: float = ZERO_TOL,
):
    """Scalar f with df = omega for a closed 1-form, by peeling the chart
    variables in order; f vanishes at the basepoint when that value is
    representable in the class.
    """
    if omega.degree != 1:
        raise ValueError("potential needs a 1-form")
    d = omega.exterior_d()
    if not d.is_zero(tol):
        raise NotClosed(f"d(omega) has coefficient of size {d.max_abs_coeff():.3e}")
    chart = omega.chart
    scls = omega.scls
    if basepoint is None:
        basepoint = {n: 0 for n in chart.names}
    else:
        basepoint = dict(basepoint)
        for n in chart.names:
            basepoint.setdefault(n, 0)

    remaining = omega
    total = None
    for vi, name in enumerate(chart.names):
        coeff = remaining.coeffs.get((vi,))
        if coeff is None or coeff.is_zero(tol):
            continue
        if isinstance(coeff, ExpPoly):
            g = coeff.antideriv(name, basepoint=None)
        else:
            g = coeff.antideriv(name, basepoint=None)
        total = g if total is None else total + g
        dg_coeffs = {}
        for j, nm in enumerate(chart.names):
            dgj = g.diff(nm)
            if not dgj.is_zero():
                dg_coeffs[(j,)] = dgj
        remaining = remaining - DiffForm(chart, 1, dg_coeffs, scls)
    if total is None:
        total = scls.zero(chart)
    if not remaining.is_zero(tol):
        raise NotClosed(
            "variable peeling left a nonzero residual; the form is not exact "
            "over this chart"
        )
    # normalize at the basepoint
    if isinstance(total, ExpPoly):
        const = total.substitute_partial({n: float(basepoint[n]) for n in chart.names})
        total = total - const
    elif isinstance(total, RationalFunction):
        try:
            const = total.substitute_partial(basepoint)
        except PoleAtPoint as exc:
            raise BasepointOnPole(str(exc)) from exc
        total = total - const
    elif isinstance(total, LogExtendedScalar):
        try:
            const = total.rational_part.substitute_partial(basepoint)
        except PoleAtPoint as exc:
            raise BasepointOnPole(str(exc)) from exc
        total = LogExtendedScalar(chart, total.rational_part - const, total.log_terms)
    return total


def line_integral(
    omega: DiffForm,
    start: Mapping[str, float],
    end: Mapping[str, float],
    rel_tol: float = 1e-8,
) -> float:
    """Numeric integral of a 1-form along the straight segment start->end;
    the independent oracle for :func:`potential`."""
    from scipy.integrate import quad

    chart = omega.chart
    p = np.array([float(start[n]) for n in chart.names])
    q = np.array([float(end[n]) for n in chart.names])
    direction = q - p

    def integrand(s: float) -> float:
        pt = p + s * direction
        point = dict(zip(chart.names, pt))
        total = 0.0
        for (i,), c in omega.coeffs.items():
            total += c.evaluate(point) * direction[i]
        return total

    value, _ = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=rel_tol, limit=200)
    return value


@dataclass
class Domain:
    """Chart with excluded hypersurfaces (zero sets to avoid when sampling)."""

    chart: VarSet
    excluded: tuple = ()

    def sample(self, rng: random.Random, box: float = 2.0, margin: float = 0.05, max_tries: int = 200) -> dict[str, float]:
        for _ in range(max_tries):
            pt = {n: rng.uniform(-box, box) for n in self.chart.names}
            ok = True
            for p in self.excluded:
                try:
                    if abs(p.evaluate(pt)) < margin:
                        ok = False
                        break
                except PoleAtPoint:
                    ok = False
                    break
            if ok:
                return pt
        raise RuntimeError("could not sample a point off the excluded sets")
