"""Exponential polynomials: the coefficient ring of the coframe pipeline.

An :class:`ExpPoly` is a finite sum of terms

    c * x1^k1 ... xn^kn * exp(a1*x1 + ... + an*xn) * {1 | cos(b.x) | sin(b.x)}

with float coefficient c, nonnegative integer exponents k and real rate
vectors a, b.  Products of trigonometric factors are rewritten to sums
(product-to-sum identities), so the class is a genuine commutative ring
with a unique canonical form and decidable zero testing up to the
coefficient tolerance.

Rates are plain floats and are only ever copied or added, never
recomputed from scratch, so structurally equal keys compare exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import MismatchedVarSet, NonAffineExponentSubstitution
from .varset import VarSet

# Coefficients at or below this magnitude are treated as zero.
ZERO_TOL = 1e-10

KIND_ONE = 0
KIND_COS = 1
KIND_SIN = 2

_KIND_NAME = {KIND_ONE: "one", KIND_COS: "cos", KIND_SIN: "sin"}

# key = (k: tuple[int], a: tuple[float], b: tuple[float], kind: int)
Key = tuple[tuple[int, ...], tuple[float, ...], tuple[float, ...], int]


def _canon_trig(b: tuple[float, ...], kind: int, coeff: float):
    """Normalize the trig part of a term key: zero b means kind one
    (sin drops), otherwise flip b so its first nonzero entry is positive."""
    if kind == KIND_ONE:
        return tuple(0.0 for _ in b), KIND_ONE, coeff
    if all(v == 0.0 for v in b):
        if kind == KIND_SIN:
            return tuple(0.0 for _ in b), KIND_ONE, 0.0
        return tuple(0.0 for _ in b), KIND_ONE, coeff
    first = next(v for v in b if v != 0.0)
    if first < 0.0:
        b = tuple(-v for v in b)
        if kind == KIND_SIN:
            coeff = -coeff
    # normalize -0.0 to 0.0 so keys hash consistently
    b = tuple(v + 0.0 for v in b)
    return b, kind, coeff


class ExpPoly:
    __slots__ = ("chart", "terms")

    def __init__(self, chart: VarSet, terms: Mapping[Key, float] | None = None, *, tol: float = ZERO_TOL):
        acc: dict[Key, float] = {}
        if terms:
            for (k, a, b, kind), c in terms.items():
                b2, kind2, c2 = _canon_trig(tuple(b), kind, float(c))
                key = (tuple(k), tuple(v + 0.0 for v in a), b2, kind2)
                acc[key] = acc.get(key, 0.0) + c2
        self.chart = chart
        self.terms = {k: c for k, c in acc.items() if abs(c) > tol}

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, chart: VarSet) -> "ExpPoly":
        return cls(chart)

    @classmethod
    def constant(cls, chart: VarSet, value: float) -> "ExpPoly":
        n = len(chart)
        zk = (0,) * n
        zr = (0.0,) * n
        return cls(chart, {(zk, zr, zr, KIND_ONE): float(value)})

    @classmethod
    def one(cls, chart: VarSet) -> "ExpPoly":
        return cls.constant(chart, 1.0)

    @classmethod
    def coordinate(cls, chart: VarSet, name: str) -> "ExpPoly":
        n = len(chart)
        k = [0] * n
        k[chart.index(name)] = 1
        zr = (0.0,) * n
        return cls(chart, {(tuple(k), zr, zr, KIND_ONE): 1.0})

    @classmethod
    def term(
        cls,
        chart: VarSet,
        coeff: float,
        powers: Mapping[str, int] | None = None,
        exp_rates: Mapping[str, float] | None = None,
        trig_rates: Mapping[str, float] | None = None,
        kind: int = KIND_ONE,
    ) -> "ExpPoly":
        """Single-term constructor, convenient in tests and goldens."""
        n = len(chart)
        k = [0] * n
        a = [0.0] * n
        b = [0.0] * n
        for name, p in (powers or {}).items():
            if p < 0:
                raise ValueError("monomial exponents must be nonnegative")
            k[chart.index(name)] = int(p)
        for name, r in (exp_rates or {}).items():
            a[chart.index(name)] = float(r)
        for name, r in (trig_rates or {}).items():
            b[chart.index(name)] = float(r)
        if trig_rates and kind == KIND_ONE:
            raise ValueError("trig rates given but kind is 'one'")
        return cls(chart, {(tuple(k), tuple(a), tuple(b), kind): float(coeff)})

    # ------------------------------------------------------------------
    # ring structure

    def _check_chart(self, other: "ExpPoly"):
        if self.chart != other.chart:
            raise MismatchedVarSet(f"{self.chart.names} vs {other.chart.names}")

    def __add__(self, other):
        if isinstance(other, (int, float, Fraction)):
            other = ExpPoly.constant(self.chart, float(other))
        if not isinstance(other, ExpPoly):
            return NotImplemented
        self._check_chart(other)
        acc = dict(self.terms)
        for key, c in other.terms.items():
            acc[key] = acc.get(key, 0.0) + c
        return ExpPoly(self.chart, acc)

    __radd__ = __add__

    def __neg__(self):
        return ExpPoly(self.chart, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, ExpPoly) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, Fraction)):
            f = float(other)
            return ExpPoly(self.chart, {k: c * f for k, c in self.terms.items()})
        if not isinstance(other, ExpPoly):
            return NotImplemented
        self._check_chart(other)
        acc: dict[Key, float] = {}

        def put(key, c):
            b2, kind2, c2 = _canon_trig(key[2], key[3], c)
            key = (key[0], key[1], b2, kind2)
            acc[key] = acc.get(key, 0.0) + c2

        for (k1, a1, b1, t1), c1 in self.terms.items():
            for (k2, a2, b2, t2), c2 in other.terms.items():
                k = tuple(x + y for x, y in zip(k1, k2))
                a = tuple(x + y for x, y in zip(a1, a2))
                c = c1 * c2
                if t1 == KIND_ONE:
                    put((k, a, b2, t2), c)
                elif t2 == KIND_ONE:
                    put((k, a, b1, t1), c)
                else:
                    bsum = tuple(x + y for x, y in zip(b1, b2))
                    bdif = tuple(x - y for x, y in zip(b1, b2))
                    if t1 == KIND_COS and t2 == KIND_COS:
                        # cos u cos v = (cos(u-v) + cos(u+v)) / 2
                        put((k, a, bdif, KIND_COS), 0.5 * c)
                        put((k, a, bsum, KIND_COS), 0.5 * c)
                    elif t1 == KIND_SIN and t2 == KIND_SIN:
                        # sin u sin v = (cos(u-v) - cos(u+v)) / 2
                        put((k, a, bdif, KIND_COS), 0.5 * c)
                        put((k, a, bsum, KIND_COS), -0.5 * c)
                    elif t1 == KIND_SIN and t2 == KIND_COS:
                        # sin u cos v = (sin(u+v) + sin(u-v)) / 2
                        put((k, a, bsum, KIND_SIN), 0.5 * c)
                        put((k, a, bdif, KIND_SIN), 0.5 * c)
                    else:
                        # cos u sin v = (sin(u+v) - sin(u-v)) / 2
                        put((k, a, bsum, KIND_SIN), 0.5 * c)
                        put((k, a, bdif, KIND_SIN), -0.5 * c)
        return ExpPoly(self.chart, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not in the class")
        result = ExpPoly.one(self.chart)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # ------------------------------------------------------------------
    # predicates

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def is_constant(self) -> bool:
        n = len(self.chart)
        triv = ((0,) * n, (0.0,) * n, (0.0,) * n, KIND_ONE)
        return all(k == triv for k in self.terms)

    def constant_value(self) -> float:
        if not self.is_constant():
            raise ValueError("not a constant")
        return next(iter(self.terms.values()), 0.0)

    def is_polynomial(self) -> bool:
        """No exponential or trigonometric part in any term."""
        return all(
            all(v == 0.0 for v in a) and kind == KIND_ONE
            for (_, a, _, kind) in self.terms
        )

    def is_affine(self) -> bool:
        """Polynomial of total degree <= 1 (legal in exp/trig positions)."""
        return self.is_polynomial() and all(sum(k) <= 1 for (k, _, _, _) in self.terms)

    def depends_on(self, name: str) -> bool:
        i = self.chart.index(name)
        return any(
            k[i] != 0 or a[i] != 0.0 or b[i] != 0.0 for (k, a, b, _) in self.terms
        )

    def variables_in_rates(self) -> set[str]:
        """Names appearing inside an exp or trig rate of some term."""
        out = set()
        for (_, a, b, _) in self.terms:
            for i, name in enumerate(self.chart.names):
                if a[i] != 0.0 or b[i] != 0.0:
                    out.add(name)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, ExpPoly)
            and self.chart == other.chart
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.chart, tuple(sorted(self.terms.items()))))

    def isclose(self, other: "ExpPoly", tol: float = ZERO_TOL) -> bool:
        return (self - other).is_zero(tol)

    # ------------------------------------------------------------------
    # calculus

    def diff(self, name: str) -> "ExpPoly":
        i = self.chart.index(name)
        acc: dict[Key, float] = {}

        def put(key, c):
            b2, kind2, c2 = _canon_trig(key[2], key[3], c)
            key = (key[0], key[1], b2, kind2)
            acc[key] = acc.get(key, 0.0) + c2

        for (k, a, b, kind), c in self.terms.items():
            if k[i] > 0:
                k2 = list(k)
                k2[i] -= 1
                put((tuple(k2), a, b, kind), c * k[i])
            if a[i] != 0.0:
                put((k, a, b, kind), c * a[i])
            if b[i] != 0.0:
                if kind == KIND_COS:
                    put((k, a, b, KIND_SIN), -c * b[i])
                elif kind == KIND_SIN:
                    put((k, a, b, KIND_COS), c * b[i])
        return ExpPoly(self.chart, acc)

    def antideriv(self, name: str, basepoint: float | None = 0.0) -> "ExpPoly":
        """Antiderivative in one variable, exact inside the class.

        The result vanishes at ``name = basepoint`` (pass ``None`` to skip
        the normalization).
        """
        i = self.chart.index(name)
        acc: dict[Key, float] = {}

        def put(key, c):
            b2, kind2, c2 = _canon_trig(key[2], key[3], c)
            key = (key[0], key[1], b2, kind2)
            acc[key] = acc.get(key, 0.0) + c2

        for (k, a, b, kind), c in self.terms.items():
            kv, av, bv = k[i], a[i], b[i]
            if av == 0.0 and bv == 0.0:
                # the exp/trig part does not involve the variable
                k2 = list(k)
                k2[i] += 1
                put((tuple(k2), a, b, kind), c / (kv + 1))
            elif bv == 0.0:
                # real rate: integrate v^kv e^{av v} by parts, closed form
                p = [0.0] * (kv + 1)
                p[kv] = c / av
                for j in range(kv - 1, -1, -1):
                    p[j] = -(j + 1) * p[j + 1] / av
                for j, pj in enumerate(p):
                    if pj == 0.0:
                        continue
                    k2 = list(k)
                    k2[i] = j
                    put((tuple(k2), a, b, kind), pj)
            else:
                # complexify the v-dependence: z = av + i bv
                z = complex(av, bv)
                p = [0j] * (kv + 1)
                p[kv] = c / z
                for j in range(kv - 1, -1, -1):
                    p[j] = -(j + 1) * p[j + 1] / z
                for j, pj in enumerate(p):
                    if pj == 0j:
                        continue
                    k2 = tuple(
                        (k[t] if t != i else j) for t in range(len(k))
                    )
                    if kind == KIND_COS:
                        # Re[p e^{(a+ib).x}]
                        put((k2, a, b, KIND_COS), pj.real)
                        put((k2, a, b, KIND_SIN), -pj.imag)
                    else:
                        # Im[p e^{(a+ib).x}]
                        put((k2, a, b, KIND_COS), pj.imag)
                        put((k2, a, b, KIND_SIN), pj.real)
        result = ExpPoly(self.chart, acc)
        if basepoint is not None:
            at_base = result.substitute_partial({name: float(basepoint)})
            result = result - at_base
        return result

    # ------------------------------------------------------------------
    # evaluation and substitution

    def evaluate(self, point: Mapping[str, float]) -> float:
        vals = [float(point[name]) for name in self.chart.names]
        total = 0.0
        for (k, a, b, kind), c in self.terms.items():
            v = c
            for i, ki in enumerate(k):
                if ki:
                    v *= vals[i] ** ki
            e = sum(ai * vals[i] for i, ai in enumerate(a) if ai != 0.0)
            if e:
                v *= math.exp(e)
            if kind != KIND_ONE:
                th = sum(bi * vals[i] for i, bi in enumerate(b) if bi != 0.0)
                v *= math.cos(th) if kind == KIND_COS else math.sin(th)
            total += v
        return total

    def substitute_partial(self, values: Mapping[str, float]) -> "ExpPoly":
        """Bind some variables to numeric constants; stays in the class."""
        bindings = {
            name: ExpPoly.constant(self.chart, v) for name, v in values.items()
        }
        for name in self.chart.names:
            if name not in bindings:
                bindings[name] = ExpPoly.coordinate(self.chart, name)
        return self.substitute(bindings)

    def substitute(self, bindings: Mapping[str, "ExpPoly"]) -> "ExpPoly":
        """Exact composition.  Variables appearing inside exp/trig rates must
        be bound to affine expressions; polynomial positions take arbitrary
        exponential polynomials.  Unbound variables must exist in the target
        chart and are bound to themselves."""
        if bindings:
            target = next(iter(bindings.values())).chart
        else:
            target = self.chart
        full: dict[str, ExpPoly] = {}
        for name in self.chart.names:
            if name in bindings:
                bound = bindings[name]
                if bound.chart != target:
                    raise MismatchedVarSet("bindings must share one target chart")
                full[name] = bound
            else:
                if name not in target:
                    raise MismatchedVarSet(
                        f"unbound variable {name!r} missing from target chart"
                    )
                full[name] = ExpPoly.coordinate(target, name)

        rate_vars = self.variables_in_rates()
        affine: dict[str, tuple[float, dict[int, float]]] = {}
        for name in rate_vars:
            val = full[name]
            if not val.is_affine():
                raise NonAffineExponentSubstitution(
                    f"variable {name!r} occurs in an exp/trig rate but is bound "
                    "to a non-affine expression"
                )
            const = 0.0
            lin: dict[int, float] = {}
            for (k, _, _, _), c in val.terms.items():
                deg = sum(k)
                if deg == 0:
                    const += c
                else:
                    j = next(t for t, kt in enumerate(k) if kt)
                    lin[j] = lin.get(j, 0.0) + c
            affine[name] = (const, lin)

        nt = len(target)
        result = ExpPoly.zero(target)
        for (k, a, b, kind), c in self.terms.items():
            # exp part
            a_new = [0.0] * nt
            exp_const = 0.0
            for i, ai in enumerate(a):
                if ai == 0.0:
                    continue
                const, lin = affine[self.chart.names[i]]
                exp_const += ai * const
                for j, lj in lin.items():
                    a_new[j] += ai * lj
            # trig part
            b_new = [0.0] * nt
            phase = 0.0
            for i, bi in enumerate(b):
                if bi == 0.0:
                    continue
                const, lin = affine[self.chart.names[i]]
                phase += bi * const
                for j, lj in lin.items():
                    b_new[j] += bi * lj
            coeff = c * (math.exp(exp_const) if exp_const else 1.0)
            zk = (0,) * nt
            if kind == KIND_ONE:
                piece = ExpPoly(
                    target, {(zk, tuple(a_new), (0.0,) * nt, KIND_ONE): coeff}
                )
            else:
                cth, sth = math.cos(phase), math.sin(phase)
                terms: dict[Key, float] = {}
                if kind == KIND_COS:
                    # cos(phase + L) = cos(phase) cos L - sin(phase) sin L
                    terms[(zk, tuple(a_new), tuple(b_new), KIND_COS)] = coeff * cth
                    terms[(zk, tuple(a_new), tuple(b_new), KIND_SIN)] = -coeff * sth
                else:
                    terms[(zk, tuple(a_new), tuple(b_new), KIND_COS)] = coeff * sth
                    terms[(zk, tuple(a_new), tuple(b_new), KIND_SIN)] = coeff * cth
                piece = ExpPoly(target, terms)
            for i, ki in enumerate(k):
                if ki:
                    piece = piece * (full[self.chart.names[i]] ** ki)
            result = result + piece
        return result

    def extend_chart(self, target: VarSet) -> "ExpPoly":
        """Reinterpret over a larger chart containing every variable."""
        return self.substitute(
            {name: ExpPoly.coordinate(target, name) for name in self.chart.names}
        )

    # ------------------------------------------------------------------
    # serialization

    def sorted_terms(self) -> list[tuple[Key, float]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (k, a, b, kind), c in self.sorted_terms():
            factors = [repr(c)]
            for i, ki in enumerate(k):
                if ki == 1:
                    factors.append(self.chart.names[i])
                elif ki > 1:
                    factors.append(f"{self.chart.names[i]}^{ki}")
            if any(v != 0.0 for v in a):
                factors.append(f"exp({_lin_text(self.chart, a)})")
            if kind == KIND_COS:
                factors.append(f"cos({_lin_text(self.chart, b)})")
            elif kind == KIND_SIN:
                factors.append(f"sin({_lin_text(self.chart, b)})")
            parts.append("*".join(factors))
        return " + ".join(parts)

    @classmethod
    def parse(cls, chart: VarSet, text: str) -> "ExpPoly":
        text = text.strip()
        if text == "0":
            return cls.zero(chart)
        n = len(chart)
        acc: dict[Key, float] = {}
        for term_text in _split_top(text, " + "):
            coeff = 1.0
            k = [0] * n
            a = [0.0] * n
            b = [0.0] * n
            kind = KIND_ONE
            for factor in _split_top(term_text, "*"):
                factor = factor.strip()
                if factor.startswith(("exp(", "cos(", "sin(")):
                    inner = factor[4:-1]
                    rates = _parse_lin(chart, inner)
                    if factor.startswith("exp"):
                        a = [x + y for x, y in zip(a, rates)]
                    else:
                        b = [x + y for x, y in zip(b, rates)]
                        kind = KIND_COS if factor.startswith("cos") else KIND_SIN
                elif "^" in factor:
                    name, p = factor.split("^")
                    k[chart.index(name.strip())] += int(p)
                elif factor in chart:
                    k[chart.index(factor)] += 1
                else:
                    coeff *= float(factor)
            key = (tuple(k), tuple(a), tuple(b), kind)
            acc[key] = acc.get(key, 0.0) + coeff
        return cls(chart, acc)

    def __repr__(self):
        return f"ExpPoly({self.to_text()})"


def _lin_text(chart: VarSet, rates: Iterable[float]) -> str:
    out = ""
    for i, r in enumerate(rates):
        if r == 0.0:
            continue
        if not out:
            out = f"{r!r}*{chart.names[i]}"
        elif r < 0:
            out += f" - {-r!r}*{chart.names[i]}"
        else:
            out += f" + {r!r}*{chart.names[i]}"
    return out


def _parse_lin(chart: VarSet, text: str) -> list[float]:
    rates = [0.0] * len(chart)
    text = text.replace(" - ", " + -")
    for piece in text.split(" + "):
        r, name = piece.split("*")
        rates[chart.index(name.strip())] += float(r)
    return rates


def _split_top(text: str, sep: str) -> list[str]:
    """Split on a separator at paren depth zero."""
    parts = []
    depth = 0
    cur = ""
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and text.startswith(sep, i):
            parts.append(cur)
            cur = ""
            i += len(sep)
            continue
        cur += ch
        i += 1
    parts.append(cur)
    return parts
