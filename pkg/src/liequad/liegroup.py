"""Constructive group synthesis on R^n for a solvable chain.

From the restricted adjoint matrices of a chain-adapted basis this module
builds the left-invariant coframe and frame (products of one-variable
matrix exponentials applied to coordinate differentials), the adjoint
representation as a product of exponentials, and the global multiplication
map: the product-group forms are reduced to exact differentials whose
functions, normalized at the origin, are the components of the group law.
A second, independent derivation of the multiplication map (through forms
that pull back along (x, y) -> y * x^{-1}) serves as a cross-check oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import NonConvergence, ResidualNonzero
from .exppoly import ExpPoly, ZERO_TOL
from .forms import DiffForm, PointMap, VectorField, lie_bracket, pairing, pullback, structure_residual
from .liealg import AdaptedChain
from .matexp import sym_exp
from .reduction import ReductionTrace, _apply_factor, reduce_full
from .report import Report
from .varset import VarSet, coordinate_chart, doubled_chart


@dataclass
class SolvGroup:
    chain: AdaptedChain
    chart: VarSet
    tau: list[DiffForm]
    frame: list[VectorField]

    @property
    def n(self) -> int:
        return self.chain.n

    def origin(self) -> dict[str, float]:
        return {nm: 0.0 for nm in self.chart.names}

    def frame_matrix_at(self, point: Mapping[str, float]) -> np.ndarray:
        """Columns are the frame fields evaluated at the point."""
        return np.column_stack([X.at(point) for X in self.frame])


@dataclass
class GroupLaw:
    group: SolvGroup
    mu: PointMap
    ad: list  # Ad(x) as an ExpPoly matrix over the group chart
    omega: list  # the product-group forms mu pulls the coframe back to
    trace: ReductionTrace

    def multiply(self, a: Sequence[float], b: Sequence[float]) -> np.ndarray:
        point = _pair_point(self.group.chart, a, b)
        z = self.mu(point)
        return np.array([z[nm] for nm in self.group.chart.names])


# ----------------------------------------------------------------------
# coframe / frame

def _is_zero_matrix(M) -> bool:
    return all(x == 0 for row in M for x in row)


def _block_apply(factor, items, m):
    """Apply an m x m scalar matrix to the first m items (forms or fields)."""
    head = _apply_factor(factor, items[:m])
    return head + list(items[m:])


def _exp_factor(ad_matrix, chart: VarSet, var: str, negate: bool):
    A = [[-x for x in row] for row in ad_matrix] if negate else ad_matrix
    return sym_exp(A, "_t").compose(ExpPoly.coordinate(chart, var))


def coframe(chain: AdaptedChain, chart: VarSet | None = None) -> list[DiffForm]:
    """Left-invariant coframe: nested inverse exponential factors applied to
    the coordinate differentials."""
    n = chain.n
    chart = chart or coordinate_chart(n)
    vec: list[DiffForm] = [DiffForm.d_coordinate(chart, nm, ExpPoly) for nm in chart.names]
    for s in range(n - 2, -1, -1):
        m = n - s
        ad = chain.ad_matrix(s)
        if _is_zero_matrix(ad):
            continue
        E = _exp_factor(ad, chart, chart.names[m - 1], negate=True)
        vec = _block_apply(E, vec, m)
    return vec


def frame(chain: AdaptedChain, chart: VarSet | None = None) -> list[VectorField]:
    """Dual frame: transposed exponential factors applied to the coordinate
    vector fields."""
    n = chain.n
    chart = chart or coordinate_chart(n)
    fields = [VectorField.coordinate(chart, nm, ExpPoly) for nm in chart.names]
    for s in range(n - 2, -1, -1):
        m = n - s
        ad = chain.ad_matrix(s)
        if _is_zero_matrix(ad):
            continue
        adT = [[ad[j][i] for j in range(m)] for i in range(m)]
        E = _exp_factor(adT, chart, chart.names[m - 1], negate=False)
        fields = _block_apply(E, fields, m)
    return fields


def build_group(chain: AdaptedChain) -> SolvGroup:
    chart = coordinate_chart(chain.n)
    return SolvGroup(chain, chart, coframe(chain, chart), frame(chain, chart))


# ----------------------------------------------------------------------
# adjoint representation

def _scalar_identity(chart: VarSet, n: int):
    return [
        [ExpPoly.one(chart) if i == j else ExpPoly.zero(chart) for j in range(n)]
        for i in range(n)
    ]


def _scalar_mat_mul(A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = None
            for k in range(n):
                if A[i][k].is_zero() or B[k][j].is_zero():
                    continue
                piece = A[i][k] * B[k][j]
                acc = piece if acc is None else acc + piece
            row.append(acc if acc is not None else A[i][0] * 0)
        out.append(row)
    return out


def ad_product(
    chain: AdaptedChain,
    chart: VarSet,
    var_names: Sequence[str],
    negate: bool = False,
    reverse: bool = False,
):
    """Product of exp(±v_j [ad(e_j)]) over the full adjoint matrices, in
    ascending j (or descending when reverse)."""
    n = chain.n
    M = _scalar_identity(chart, n)
    order = range(n - 1, -1, -1) if reverse else range(n)
    for j in order:
        A = chain.base.ad_matrix(j)
        if _is_zero_matrix(A):
            continue
        E = _exp_factor(A, chart, var_names[j], negate=negate)
        M = _scalar_mat_mul(M, E)
    return M


def ad_rep(chain: AdaptedChain, chart: VarSet | None = None):
    """Ad(x) = e^{x^1 [ad e_1]} ... e^{x^n [ad e_n]} over the group chart."""
    chart = chart or coordinate_chart(chain.n)
    return ad_product(chain, chart, list(chart.names), negate=False, reverse=False)


# ----------------------------------------------------------------------
# multiplication map

def _pi_pullback(tau: Sequence[DiffForm], double: VarSet, offset: int) -> list[DiffForm]:
    """Projection pullbacks: reinterpret the coframe over the doubled chart,
    binding x_i to the first (offset 0) or second (offset n) copy."""
    n = len(tau)
    src = tau[0].chart
    bind = {
        nm: ExpPoly.coordinate(double, double.names[offset + i])
        for i, nm in enumerate(src.names)
    }
    out = []
    for t in tau:
        coeffs = {}
        for (k,), c in t.coeffs.items():
            coeffs[(offset + k,)] = c.substitute(bind)
        out.append(DiffForm(double, 1, coeffs, ExpPoly))
    return out


def product_group_forms(chain: AdaptedChain, group: SolvGroup | None = None):
    """The forms Ad(y^{-1}) pi_1^* tau + pi_2^* tau on G x G whose reduction
    yields the multiplication map."""
    group = group or build_group(chain)
    n = chain.n
    D = doubled_chart(n)
    y_names = list(D.names[n:])
    pi1 = _pi_pullback(group.tau, D, 0)
    pi2 = _pi_pullback(group.tau, D, n)
    ad_y_inv = ad_product(chain, D, y_names, negate=True, reverse=True)
    omegas = []
    for i in range(n):
        acc = pi2[i]
        for j in range(n):
            c = ad_y_inv[i][j]
            if c.is_zero():
                continue
            acc = acc + pi1[j] * c
        omegas.append(acc)
    return group, D, omegas


def multiplication(
    chain: AdaptedChain,
    tol: float = ZERO_TOL,
    group: SolvGroup | None = None,
) -> GroupLaw:
    """Group law with identity at the origin, by n quadratures on G x G."""
    group, D, omegas = product_group_forms(chain, group)
    res = structure_residual(omegas, chain.base)
    worst = max((r.max_abs_coeff() for r in res), default=0.0)
    if worst > tol:
        raise ResidualNonzero(
            f"product-group forms fail the structure equations (residual {worst:.3e})"
        )
    trace = reduce_full(omegas, chain, basepoint=None, tol=tol)
    mu = PointMap(D, group.chart, trace.functions)
    ad = ad_rep(chain, group.chart)
    return GroupLaw(group, mu, ad, omegas, trace)


def _pair_point(chart: VarSet, a: Sequence[float], b: Sequence[float]) -> dict[str, float]:
    n = len(chart)
    point = {}
    for i, nm in enumerate(chart.names):
        point[f"x{i + 1}"] = float(a[i])
        point[f"y{i + 1}"] = float(b[i])
    return point


def inverse_at(
    law: GroupLaw,
    x: Sequence[float],
    tol: float = 1e-10,
    max_iter: int = 60,
) -> np.ndarray:
    """Solve mu(x, y) = 0 for y by Newton iteration; the Jacobian of left
    translation comes from the frame via left invariance."""
    group = law.group
    n = group.n
    x = np.asarray(x, dtype=float)
    y = -x.copy()
    for _ in range(max_iter):
        z = law.multiply(x, y)
        if float(np.abs(z).max()) <= tol:
            return y
        My = group.frame_matrix_at(dict(zip(group.chart.names, y)))
        Mz = group.frame_matrix_at(dict(zip(group.chart.names, z)))
        J = Mz @ np.linalg.inv(My)
        y = y - np.linalg.solve(J, z)
    raise NonConvergence(
        f"Newton iteration for the inverse did not reach {tol:.1e} in {max_iter} steps"
    )


# ----------------------------------------------------------------------
# verification

def group_invariants_report(
    group: SolvGroup,
    samples: int = 50,
    seed: int = 0,
    tol_symbolic: float = ZERO_TOL,
    tol_numeric: float = 1e-9,
) -> Report:
    """Structure equations of the coframe (symbolic), bracket relations of
    the frame (numeric), duality pairing (symbolic) and pointwise
    independence (numeric)."""
    report = Report()
    sc = group.chain.base
    n = group.n
    res = structure_residual(group.tau, sc)
    worst = max((r.max_abs_coeff() for r in res), default=0.0)
    report.add("d tau^i + 1/2 C^i_jk tau^j ^ tau^k = 0", worst <= tol_symbolic, "symbolic", worst)

    worst_pair = 0.0
    for i in range(n):
        for j in range(n):
            p = pairing(group.tau[i], group.frame[j])
            target = 1.0 if i == j else 0.0
            worst_pair = max(worst_pair, (p - ExpPoly.constant(group.chart, target)).max_abs_coeff())
    report.add("<tau^i, X_j> = delta^i_j", worst_pair <= tol_symbolic, "symbolic", worst_pair)

    rng = random.Random(seed)
    points = [
        {nm: rng.uniform(-1.5, 1.5) for nm in group.chart.names} for _ in range(samples)
    ]
    worst_br = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            lhs = lie_bracket(group.frame[i], group.frame[j])
            rhs = None
            for k in range(n):
                c = sc.C[k][i][j]
                if c != 0:
                    piece = group.frame[k] * float(c)
                    rhs = piece if rhs is None else rhs + piece
            diff = lhs if rhs is None else lhs - rhs
            for pt in points:
                worst_br = max(worst_br, float(np.abs(diff.at(pt)).max()))
    report.add("[X_i, X_j] = C^k_ij X_k", worst_br <= tol_numeric, "numeric", worst_br)

    worst_det = 1.0
    for pt in points:
        M = np.array([[c.evaluate(pt) for c in [t.coefficient((k,)) for k in range(n)]] for t in group.tau])
        worst_det = min(worst_det, abs(float(np.linalg.det(M))))
    report.add("coframe pointwise independent", worst_det > 1e-12, "numeric", worst_det)
    return report


def verify_group(
    law: GroupLaw,
    samples: int = 100,
    seed: int = 0,
    tol: float = 1e-8,
    mode: str = "auto",
) -> Report:
    """Group axioms and compatibility checks at seeded random points."""
    group = law.group
    n = group.n
    rng = random.Random(seed)
    report = Report()

    def rand_pt():
        return np.array([rng.uniform(-1.2, 1.2) for _ in range(n)])

    worst_assoc = 0.0
    worst_ident = 0.0
    worst_ad = 0.0
    worst_left = 0.0
    zero = np.zeros(n)
    for _ in range(samples):
        a, b, c = rand_pt(), rand_pt(), rand_pt()
        lhs = law.multiply(a, law.multiply(b, c))
        rhs = law.multiply(law.multiply(a, b), c)
        scale = max(1.0, float(np.abs(rhs).max()))
        worst_assoc = max(worst_assoc, float(np.abs(lhs - rhs).max()) / scale)

        worst_ident = max(
            worst_ident,
            float(np.abs(law.multiply(zero, a) - a).max()),
            float(np.abs(law.multiply(a, zero) - a).max()),
        )

        pa = dict(zip(group.chart.names, a))
        pb = dict(zip(group.chart.names, b))
        pz = dict(zip(group.chart.names, law.multiply(a, b)))
        Ad_a = np.array([[e.evaluate(pa) for e in row] for row in law.ad])
        Ad_b = np.array([[e.evaluate(pb) for e in row] for row in law.ad])
        Ad_z = np.array([[e.evaluate(pz) for e in row] for row in law.ad])
        scale = max(1.0, float(np.abs(Ad_z).max()))
        worst_ad = max(worst_ad, float(np.abs(Ad_z - Ad_a @ Ad_b).max()) / scale)

        # left invariance: dL_a|_b X_i(b) = X_i(a*b)
        point = _pair_point(group.chart, a, b)
        J = np.zeros((n, n))
        for i, comp in enumerate(law.mu.components):
            for j in range(n):
                J[i, j] = comp.diff(f"y{j + 1}").evaluate(point)
        Mb = group.frame_matrix_at(pb)
        Mab = group.frame_matrix_at(pz)
        scale = max(1.0, float(np.abs(Mab).max()))
        worst_left = max(worst_left, float(np.abs(J @ Mb - Mab).max()) / scale)

    report.add("associativity mu(a, mu(b,c)) = mu(mu(a,b), c)", worst_assoc <= tol, "numeric", worst_assoc)
    report.add("identity mu(0,a) = a = mu(a,0)", worst_ident <= tol, "numeric", worst_ident)
    report.add("Ad(mu(a,b)) = Ad(a) Ad(b)", worst_ad <= tol, "numeric", worst_ad)
    report.add("left invariance dL_a X_i = X_i o L_a", worst_left <= tol, "numeric", worst_left)

    # pullback mu^* tau = omega, symbolic when the composition stays in class
    from .errors import ClassMismatch, NonAffineExponentSubstitution

    symbolic_done = False
    if mode in ("auto", "symbolic"):
        try:
            worst_pb = 0.0
            for i in range(n):
                diff = pullback(law.mu, group.tau[i]) - law.omega[i]
                worst_pb = max(worst_pb, diff.max_abs_coeff())
            report.add("mu^* tau^i = omega^i", worst_pb <= max(tol, ZERO_TOL), "symbolic", worst_pb)
            symbolic_done = True
        except (ClassMismatch, NonAffineExponentSubstitution) as exc:
            if mode == "symbolic":
                report.add("mu^* tau^i = omega^i", False, "symbolic", None, str(exc))
                symbolic_done = True
    if not symbolic_done:
        worst_pb = 0.0
        D = law.mu.source
        for _ in range(samples):
            pt = {nm: rng.uniform(-1.2, 1.2) for nm in D.names}
            vec = np.array([rng.uniform(-1, 1) for _ in range(2 * n)])
            J = law.mu.jacobian_at(pt)
            img = law.mu(pt)
            push = J @ vec
            for i in range(n):
                lhs = sum(c.evaluate(img) * push[idx[0]] for idx, c in group.tau[i].coeffs.items())
                rhs = sum(c.evaluate(pt) * vec[idx[0]] for idx, c in law.omega[i].coeffs.items())
                worst_pb = max(worst_pb, abs(lhs - rhs))
        report.add("mu^* tau^i = omega^i", worst_pb <= tol, "numeric", worst_pb)
    return report


def preadjoint_forms(chain: AdaptedChain, group: SolvGroup | None = None):
    """theta~ = e^{x^1 ad(e_1)} ... e^{x^n ad(e_n)} (pi_2^* tau - pi_1^* tau)
    on the doubled chart; reducing these yields (x, y) -> mu(y, x^{-1})."""
    group = group or build_group(chain)
    n = group.n
    D = doubled_chart(n)
    x_names = list(D.names[:n])
    pi1 = _pi_pullback(group.tau, D, 0)
    pi2 = _pi_pullback(group.tau, D, n)
    M = ad_product(chain, D, x_names, negate=False, reverse=False)
    theta = [pi2[i] - pi1[i] for i in range(n)]
    return D, _apply_factor(M, theta)


def preadjoint_oracle(
    chain: AdaptedChain,
    law: GroupLaw | None = None,
    samples: int = 100,
    seed: int = 0,
    tol: float = 1e-8,
) -> Report:
    """Independent derivation of the multiplication map.

    Builds theta~ = e^{x^1 ad(e_1)} ... e^{x^n ad(e_n)} (pi_2^* tau - pi_1^* tau),
    checks its structure equations, reduces it to a map rho and verifies
    rho(x, y) = mu(y, x^{-1}) at seeded sample points.
    """
    law = law or multiplication(chain)
    group = law.group
    n = group.n
    D, theta_t = preadjoint_forms(chain, group)

    report = Report()
    res = structure_residual(theta_t, chain.base)
    worst = max((r.max_abs_coeff() for r in res), default=0.0)
    report.add("d theta~^i + 1/2 C^i_jk theta~^j ^ theta~^k = 0", worst <= ZERO_TOL, "symbolic", worst)
    if worst > ZERO_TOL:
        return report

    trace = reduce_full(theta_t, chain, basepoint=None)
    rng = random.Random(seed)
    worst_cmp = 0.0
    for _ in range(samples):
        x = np.array([rng.uniform(-1.0, 1.0) for _ in range(n)])
        y = np.array([rng.uniform(-1.0, 1.0) for _ in range(n)])
        point = _pair_point(group.chart, x, y)
        rho_val = np.array([f.evaluate(point) for f in trace.functions])
        x_inv = inverse_at(law, x)
        mu_val = law.multiply(y, x_inv)
        scale = max(1.0, float(np.abs(mu_val).max()))
        worst_cmp = max(worst_cmp, float(np.abs(rho_val - mu_val).max()) / scale)
    report.add("rho(x,y) = mu(y, x^{-1})", worst_cmp <= tol, "numeric", worst_cmp)
    return report
