"""Structure-constant linear algebra over exact rationals.

Everything in this module is exact Fraction arithmetic: antisymmetry and
Jacobi validation, derived series, solvability, codimension-one ideal
chains adapted to the derived series, and basis changes with the tensor
transformation law.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NotSolvable, SingularMatrix

Vector = tuple[Fraction, ...]
Matrix = list[list[Fraction]]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {x!r}")


# ----------------------------------------------------------------------
# small exact linear algebra

def mat_identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, m, p = len(A), len(B), len(B[0])
    return [
        [sum((A[i][k] * B[k][j] for k in range(m)), Fraction(0)) for j in range(p)]
        for i in range(n)
    ]


def mat_vec(A: Matrix, v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((A[i][k] * v[k] for k in range(len(v))), Fraction(0)) for i in range(len(A))]


def mat_inverse(A: Matrix) -> Matrix:
    n = len(A)
    aug = [[Fraction(A[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise SingularMatrix("matrix is not invertible")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def rref(rows: Iterable[Sequence[Fraction]]) -> list[Vector]:
    """Reduced row echelon form; returns the nonzero rows."""
    rows = [list(map(Fraction, r)) for r in rows]
    if not rows:
        return []
    ncols = len(rows[0])
    out: list[list[Fraction]] = []
    lead = 0
    rows = [r[:] for r in rows]
    for col in range(ncols):
        pivot = next((i for i in range(lead, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[lead], rows[pivot] = rows[pivot], rows[lead]
        pv = rows[lead][col]
        rows[lead] = [x / pv for x in rows[lead]]
        for i in range(len(rows)):
            if i != lead and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[lead])]
        lead += 1
        if lead == len(rows):
            break
    return [tuple(r) for r in rows[:lead]]


def in_span(basis_rref: Sequence[Vector], vec: Sequence[Fraction]) -> bool:
    v = list(map(Fraction, vec))
    for row in basis_rref:
        piv = next((j for j, x in enumerate(row) if x != 0), None)
        if piv is not None and v[piv] != 0:
            f = v[piv]
            v = [x - f * y for x, y in zip(v, row)]
    return all(x == 0 for x in v)


# ----------------------------------------------------------------------
# structure constants

@dataclass(frozen=True)
class StructureConstants:
    """C[i][j][k] = coefficient of e_i in [e_j, e_k]."""

    dim: int
    C: tuple[tuple[Vector, ...], ...]

    @classmethod
    def from_brackets(cls, dim: int, brackets: dict[tuple[int, int], dict[int, object]]):
        """brackets[(j, k)][i] = C^i_{jk}, 1-based indices, j < k."""
        C = [[[Fraction(0) for _ in range(dim)] for _ in range(dim)] for _ in range(dim)]
        for (j, k), comps in brackets.items():
            if not (1 <= j <= dim and 1 <= k <= dim and j != k):
                raise ValueError(f"bad bracket indices ({j},{k})")
            for i, c in comps.items():
                c = _frac(c)
                C[i - 1][j - 1][k - 1] += c
                C[i - 1][k - 1][j - 1] -= c
        return cls(dim, tuple(tuple(tuple(row) for row in plane) for plane in C))

    @classmethod
    def abelian(cls, dim: int):
        return cls.from_brackets(dim, {})

    def bracket(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> list[Fraction]:
        n = self.dim
        out = [Fraction(0)] * n
        for j in range(n):
            uj = u[j]
            if uj == 0:
                continue
            for k in range(n):
                vk = v[k]
                if vk == 0:
                    continue
                for i in range(n):
                    c = self.C[i][j][k]
                    if c != 0:
                        out[i] += c * uj * vk
        return out

    def ad_matrix(self, j: int) -> Matrix:
        """Full n x n matrix of ad(e_j): entry [i][k] = C^i_{jk} (0-based j)."""
        n = self.dim
        return [[Fraction(self.C[i][j][k]) for k in range(n)] for i in range(n)]

    def restricted(self, m: int) -> "StructureConstants":
        """Constants of the subalgebra spanned by the first m basis vectors."""
        C = tuple(
            tuple(tuple(self.C[i][j][k] for k in range(m)) for j in range(m))
            for i in range(m)
        )
        return StructureConstants(m, C)


@dataclass(frozen=True)
class ValidationReport:
    antisymmetry_violations: tuple = ()
    jacobi_violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.antisymmetry_violations and not self.jacobi_violations

    def summary(self) -> str:
        if self.ok:
            return "valid: antisymmetry and Jacobi hold"
        return (
            f"{len(self.antisymmetry_violations)} antisymmetry and "
            f"{len(self.jacobi_violations)} Jacobi violations"
        )


def validate(sc: StructureConstants) -> ValidationReport:
    n = sc.dim
    C = sc.C
    anti = []
    for i in range(n):
        for j in range(n):
            for k in range(j, n):
                if C[i][j][k] != -C[i][k][j]:
                    anti.append((i + 1, j + 1, k + 1, C[i][j][k] + C[i][k][j]))
    jac = []
    for j in range(n):
        for k in range(j + 1, n):
            for l in range(k + 1, n):
                for i in range(n):
                    total = Fraction(0)
                    for m in range(n):
                        total += (
                            C[m][j][k] * C[i][m][l]
                            + C[m][k][l] * C[i][m][j]
                            + C[m][l][j] * C[i][m][k]
                        )
                    if total != 0:
                        jac.append((j + 1, k + 1, l + 1, i + 1, total))
    return ValidationReport(tuple(anti), tuple(jac))


# ----------------------------------------------------------------------
# derived series and solvability

def _subspace_brackets(sc: StructureConstants, basis: Sequence[Vector]) -> list[Vector]:
    out = []
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            out.append(tuple(sc.bracket(basis[a], basis[b])))
    return out


def derived_series(sc: StructureConstants) -> list[list[Vector]]:
    """g >= [g,g] >= ... as reduced row-echelon bases; the terminal (stable)
    term is included."""
    n = sc.dim
    current = rref(mat_identity(n))
    series = [current]
    while True:
        nxt = rref(_subspace_brackets(sc, current))
        if len(nxt) == len(current):
            break
        series.append(nxt)
        current = nxt
        if not nxt:
            break
    return series


def is_solvable(sc: StructureConstants) -> bool:
    return not derived_series(sc)[-1]


# ----------------------------------------------------------------------
# basis change

@dataclass(frozen=True)
class BasisChange:
    """Change matrix P with f_j = P^i_j e_i: old-basis vectors expressed in
    the new basis.  Forms transform as omega^i = P^i_j omega~^j."""

    P: tuple[Vector, ...]

    @property
    def n(self):
        return len(self.P)

    def matrix(self) -> Matrix:
        return [list(row) for row in self.P]

    def inverse_matrix(self) -> Matrix:
        return mat_inverse(self.matrix())

    @classmethod
    def identity(cls, n: int):
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))


def change_basis(sc: StructureConstants, change: BasisChange) -> StructureConstants:
    """Constants in the new basis e given constants in the old basis f,
    where f_j = P^i_j e_i."""
    n = sc.dim
    P = change.matrix()
    Pinv = mat_inverse(P)
    C = sc.C
    out = [[[Fraction(0) for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for c in range(n):
        for a in range(n):
            for b in range(n):
                ct = C[c][a][b]
                if ct == 0:
                    continue
                for i in range(n):
                    pai = Pinv[a][i]
                    if pai == 0:
                        continue
                    for j in range(n):
                        pbj = Pinv[b][j]
                        if pbj == 0:
                            continue
                        for k in range(n):
                            pkc = P[k][c]
                            if pkc != 0:
                                out[k][i][j] += pkc * ct * pai * pbj
    return StructureConstants(n, tuple(tuple(tuple(r) for r in pl) for pl in out))


def transform_forms(change: BasisChange, omegas: Sequence) -> list:
    """omega^i = P^i_j omega~^j for any objects supporting + and number *."""
    P = change.matrix()
    n = len(P)
    out = []
    for i in range(n):
        acc = None
        for j in range(n):
            if P[i][j] == 0:
                continue
            piece = omegas[j] * P[i][j]
            acc = piece if acc is None else acc + piece
        if acc is None:
            acc = omegas[0] * 0
        out.append(acc)
    return out


# ----------------------------------------------------------------------
# adapted chains

@dataclass(frozen=True)
class AdaptedChain:
    """Structure constants in a basis adapted to a full chain of
    codimension-one ideals k_s = span{e_1..e_{n-s}}, with the restricted
    adjoint matrices [ad_s(e_{n-s})]."""

    base: StructureConstants
    ad_restricted: tuple[tuple[Vector, ...], ...] = field(repr=False)

    @property
    def n(self):
        return self.base.dim

    def ad_matrix(self, s: int) -> Matrix:
        """(n-s) x (n-s) matrix of ad(e_{n-s}) restricted to k_s."""
        return [list(row) for row in self.ad_restricted[s]]

    def verify_ideals(self):
        """Raise if some k_s is not an ideal in k_{s-1}."""
        n = self.n
        C = self.base.C
        for s in range(1, n + 1):
            m = n - s  # dim k_s
            for u in range(m + 1):
                for v in range(m):
                    for i in range(m, n):
                        if C[i][u][v] != 0:
                            raise NotSolvable(
                                f"k_{s} is not an ideal in k_{s-1}: "
                                f"[e_{u+1}, e_{v+1}] has e_{i+1} component {C[i][u][v]}"
                            )


def _restricted_ad(sc: StructureConstants, s: int) -> tuple[Vector, ...]:
    n = sc.dim
    m = n - s
    j = m - 1  # index of e_{n-s}
    return tuple(
        tuple(Fraction(sc.C[i][j][k]) for k in range(m)) for i in range(m)
    )


def adapted_chain(sc: StructureConstants) -> tuple[BasisChange, AdaptedChain]:
    """Basis adapted to the derived series, refined to a full flag.

    Deterministic: complements are taken in echelon order of the input
    basis.  Raises NotSolvable when the derived series does not reach zero.
    """
    if not is_solvable(sc):
        raise NotSolvable("derived series does not terminate at 0")
    n = sc.dim
    series = derived_series(sc)
    flag: list[Vector] = []
    flag_rref: list[Vector] = []
    for sub in reversed(series):
        for vec in sub:
            if not in_span(flag_rref, vec):
                flag.append(vec)
                flag_rref = rref(flag)
    if len(flag) != n:
        raise NotSolvable("flag construction failed to reach full dimension")
    # columns of A are the adapted vectors in input coordinates
    A = [[flag[j][i] for j in range(n)] for i in range(n)]
    P = mat_inverse(A)
    change = BasisChange(tuple(tuple(row) for row in P))
    adapted = change_basis(sc, change)
    chain = AdaptedChain(
        adapted, tuple(_restricted_ad(adapted, s) for s in range(n))
    )
    chain.verify_ideals()
    return change, chain


def chain_from_adapted(sc: StructureConstants) -> AdaptedChain:
    """Chain for constants already given in an adapted basis."""
    chain = AdaptedChain(sc, tuple(_restricted_ad(sc, s) for s in range(sc.dim)))
    chain.verify_ideals()
    return chain
