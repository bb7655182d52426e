"""The codimension-one reduction pipeline.

Given n one-forms satisfying the structure equations of a solvable Lie
algebra in a chain-adapted basis, one reduction step integrates the last
form of the current block to a function f and applies the matrix
exponential of f times the restricted adjoint; the block shrinks by one
and the structure equations restrict to the ideal.  Running all n steps
turns the forms into exact differentials df^1..df^n; the functions double
as the coordinates of the map onto the synthesized group.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import NonElementaryInClass, ResidualNonzero
from .exppoly import ZERO_TOL
from .forms import DiffForm, PointMap, potential, pullback, structure_residual
from .liealg import AdaptedChain
from .matexp import sym_exp
from .rational import LogExtendedScalar, RationalFunction
from .report import Report
from .varset import VarSet


@dataclass
class ReductionStep:
    level: int  # s: ideal depth, block size n - s
    f: object  # quadrature function f^{n-s}
    factor: list | None  # (n-s) x (n-s) scalar matrix e^{f [ad_s]}, None when ad_s = 0


@dataclass
class ReductionTrace:
    chain: AdaptedChain
    chart: VarSet
    basepoint: dict
    steps: list[ReductionStep] = field(default_factory=list)
    functions: list = field(default_factory=list)  # f^1..f^n (f^i at index i-1)
    residual_forms: list = field(default_factory=list)  # nonempty on early stop

    @property
    def complete(self) -> bool:
        return len(self.steps) == self.chain.n


def _factor_matrix(chain: AdaptedChain, s: int, f):
    """e^{f [ad_s(e_{n-s})]} as a scalar matrix over f's chart, or None
    when the restriction vanishes."""
    ad = chain.ad_matrix(s)
    if all(x == 0 for row in ad for x in row):
        return None
    return _compose_factor(sym_exp(ad, "_t"), f)


def _compose_factor(E, f):
    if isinstance(f, LogExtendedScalar):
        if f.is_pure_rational:
            f = f.as_rational()
        else:
            return _log_factor(E, f)
    return E.compose(f)


def _log_factor(E, f: LogExtendedScalar):
    """exp of (sum c_i log p_i) times the adjoint: rational exactly when
    every eigenvalue times every log coefficient is an integer, turning
    e^{lambda f} into a product of integer powers p_i^{lambda c_i}.
    The classical integrating-factor situation."""
    chart = f.chart
    if not f.rational_part.is_zero():
        raise NonElementaryInClass(
            "quadrature produced a log term with a nonzero rational part and "
            "the next adjoint matrix is nonzero; the exponential factor "
            "leaves the supported class"
        )

    def _as_fraction(x: float) -> Fraction:
        fr = Fraction(x).limit_denominator(10 ** 9)
        if abs(float(fr) - x) > 1e-9 * max(1.0, abs(x)):
            raise NonElementaryInClass(
                f"matrix exponential coefficient {x} is not recognizably rational"
            )
        return fr

    out = []
    for row in E.entries:
        new_row = []
        for entry in row:
            acc = RationalFunction.zero(chart)
            for (k, a, b, kind), c in entry.terms.items():
                if k[0] != 0 or any(v != 0.0 for v in b):
                    raise NonElementaryInClass(
                        "polynomial or trigonometric dependence on the "
                        "quadrature function leaves the supported class"
                    )
                lam = _as_fraction(a[0])
                piece = RationalFunction.constant(chart, _as_fraction(c))
                for coeff, arg in f.log_terms:
                    power = lam * coeff
                    if power.denominator != 1:
                        raise NonElementaryInClass(
                            f"factor needs the non-integer power {power} of a "
                            "log argument; outside the rational class"
                        )
                    if power != 0:
                        base = RationalFunction(chart, arg)
                        piece = piece * base ** int(power)
                acc = acc + piece
            new_row.append(acc)
        out.append(new_row)
    return out


def _apply_factor(factor, omegas: Sequence[DiffForm]) -> list[DiffForm]:
    m = len(omegas)
    out = []
    for i in range(m):
        acc = None
        for j in range(m):
            c = factor[i][j]
            if c.is_zero():
                continue
            piece = omegas[j] * c
            acc = piece if acc is None else acc + piece
        out.append(acc if acc is not None else omegas[i] * 0)
    return out


def _residual_ok(omegas, sc, tol):
    res = structure_residual(omegas, sc)
    worst = max((r.max_abs_coeff() for r in res), default=0.0)
    return worst <= tol, worst


def reduce_step(
    omegas: Sequence[DiffForm],
    chain: AdaptedChain,
    s: int,
    basepoint: Mapping[str, object] | None = None,
    tol: float = ZERO_TOL,
    check_residual: bool = True,
):
    """One reduction at ideal depth s: returns (f, omega-hat list).

    The input block has n - s forms satisfying the structure equations of
    k_s; the output block satisfies those of k_{s+1} x R and its last form
    is df.
    """
    m = chain.n - s
    if len(omegas) != m:
        raise ValueError(f"expected {m} forms at level {s}, got {len(omegas)}")
    if check_residual:
        ok, worst = _residual_ok(omegas, chain.base.restricted(m), tol)
        if not ok:
            raise ResidualNonzero(
                f"input forms fail the level-{s} structure equations "
                f"(residual {worst:.3e})"
            )
    f = potential(omegas[m - 1], basepoint, tol=tol)
    factor = _factor_matrix(chain, s, f)
    hat = list(omegas) if factor is None else _apply_factor(factor, omegas)
    if check_residual and m >= 2:
        ok, worst = _residual_ok(hat[: m - 1], chain.base.restricted(m - 1), tol)
        if not ok:
            raise ResidualNonzero(
                f"reduced forms fail the level-{s + 1} structure equations "
                f"(residual {worst:.3e})"
            )
    return f, hat


def reduce_full(
    omegas: Sequence[DiffForm],
    chain: AdaptedChain,
    basepoint: Mapping[str, object] | None = None,
    stop_after: int | None = None,
    tol: float = ZERO_TOL,
    check_residual: bool = True,
) -> ReductionTrace:
    """Run the reduction to exact differentials (or stop after r steps).

    Produces functions f^1..f^n with f^i(basepoint) = 0 whose differentials
    are the fully transformed input forms.
    """
    n = chain.n
    if len(omegas) != n:
        raise ValueError(f"expected {n} forms, got {len(omegas)}")
    chart = omegas[0].chart
    if basepoint is None:
        basepoint = {nm: 0 for nm in chart.names}
    else:
        basepoint = dict(basepoint)
        for nm in chart.names:
            basepoint.setdefault(nm, 0)
    r = n if stop_after is None else min(stop_after, n)
    trace = ReductionTrace(chain, chart, basepoint)
    trace.functions = [None] * n
    current = list(omegas)
    for s in range(r):
        m = n - s
        f, hat = reduce_step(current, chain, s, basepoint, tol, check_residual)
        trace.steps.append(ReductionStep(s, f, _factor_matrix(chain, s, f)))
        trace.functions[m - 1] = f
        current = hat[: m - 1]
    trace.residual_forms = current if r < n else []
    return trace


def reassemble(trace: ReductionTrace, tol: float = ZERO_TOL) -> list[DiffForm]:
    """Invert the reduction: apply the inverse factors to (df^1..df^n).
    Equal to the original input forms when the trace is complete."""
    if not trace.complete:
        raise ValueError("reassembly needs a complete trace")
    chain = trace.chain
    n = chain.n
    chart = trace.chart
    scls = type(trace.functions[0]) if not isinstance(trace.functions[0], LogExtendedScalar) else RationalFunction
    forms = []
    for f in trace.functions:
        coeffs = {}
        for j, nm in enumerate(chart.names):
            d = f.diff(nm)
            if not d.is_zero():
                coeffs[(j,)] = d
        forms.append(DiffForm(chart, 1, coeffs, scls))
    for step in reversed(trace.steps):
        s = step.level
        m = n - s
        ad = chain.ad_matrix(s)
        if all(x == 0 for row in ad for x in row):
            continue
        neg_ad = [[-x for x in row] for row in ad]
        inv_factor = _compose_factor(sym_exp(neg_ad, "_t"), step.f)
        block = _apply_factor(inv_factor, forms[:m])
        forms = block + forms[m:]
    return forms


def rho_map(trace: ReductionTrace, target: VarSet | None = None) -> PointMap:
    """The map onto the group chart assembled from the quadrature functions."""
    if not trace.complete:
        raise ValueError("rho needs a complete trace")
    n = trace.chain.n
    if target is None:
        target = VarSet(tuple(f"x{i}" for i in range(1, n + 1)))
    comps = []
    for f in trace.functions:
        if isinstance(f, LogExtendedScalar):
            f = f.as_rational()  # raises when log terms are present
        comps.append(f)
    return PointMap(trace.chart, target, comps)


def verify_rho(
    trace: ReductionTrace,
    taus: Sequence[DiffForm],
    omegas: Sequence[DiffForm],
    samples: int = 100,
    seed: int = 0,
    tol: float = 1e-8,
    domain=None,
    mode: str = "auto",
) -> Report:
    """Check rho^* tau^i = omega^i, symbolically when the composition stays
    in class, otherwise numerically on random tangent vectors."""
    from .errors import ClassMismatch, NonAffineExponentSubstitution

    report = Report()
    target = taus[0].chart
    rho = rho_map(trace, target)
    if mode in ("auto", "symbolic"):
        try:
            for i, (tau, omega) in enumerate(zip(taus, omegas)):
                diff = pullback(rho, tau) - omega
                if omega.scls is RationalFunction:
                    ok = diff.is_zero()
                    worst = 0.0 if ok else 1.0
                else:
                    worst = diff.max_abs_coeff()
                    ok = worst <= max(tol, ZERO_TOL)
                report.add(f"rho^* tau^{i + 1} = omega^{i + 1}", ok, "symbolic", worst)
            return report
        except (ClassMismatch, NonAffineExponentSubstitution) as exc:
            if mode == "symbolic":
                report.add("rho^* tau^i = omega^i", False, "symbolic", None, str(exc))
                return report
            report = Report()
    rng = random.Random(seed)
    chart = trace.chart
    nsrc = len(chart)
    worst = [0.0] * len(taus)
    for _ in range(samples):
        if domain is not None:
            pt = domain.sample(rng)
        else:
            pt = {nm: rng.uniform(-1.5, 1.5) for nm in chart.names}
        J = rho.jacobian_at(pt)
        img = rho(pt)
        vec = np.array([rng.uniform(-1, 1) for _ in range(nsrc)])
        push = J @ vec
        for i, (tau, omega) in enumerate(zip(taus, omegas)):
            lhs = sum(
                c.evaluate(img) * push[idx[0]] for idx, c in tau.coeffs.items()
            )
            rhs = sum(
                c.evaluate(pt) * vec[idx[0]] for idx, c in omega.coeffs.items()
            )
            worst[i] = max(worst[i], abs(lhs - rhs))
    for i, w in enumerate(worst):
        report.add(f"rho^* tau^{i + 1} = omega^{i + 1}", w <= tol, "numeric", w)
    return report
