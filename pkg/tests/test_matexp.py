"""Symbolic matrix exponential: Putzer over a clustered spectrum."""

import random
from fractions import Fraction

import numpy as np
import pytest
import scipy.linalg

from liequad import EigenvalueClusterAmbiguity, ExpPoly, VarSet, exp_identities_check, sym_exp
from liequad.catalog import five_dim_two_parameter
from liequad.liealg import adapted_chain
from liequad.matexp import derivative_residual

F = Fraction
T = VarSet.of("t")


def test_zero_matrix_gives_identity():
    E = sym_exp([[F(0)] * 3 for _ in range(3)], "t")
    for i in range(3):
        for j in range(3):
            expected = ExpPoly.one(T) if i == j else ExpPoly.zero(T)
            assert E.entries[i][j] == expected
    rep = exp_identities_check(E)
    assert rep.passed


def test_nilpotent_jordan_block_truncates():
    A = [[F(0), F(1), F(0)], [F(0), F(0), F(1)], [F(0), F(0), F(0)]]
    E = sym_exp(A, "t")
    t = ExpPoly.coordinate(T, "t")
    assert E.entries[0][1].isclose(t, 1e-12)
    assert E.entries[0][2].isclose(t * t * 0.5, 1e-12)
    assert E.entries[1][2].isclose(t, 1e-12)
    assert E.entries[0][0] == ExpPoly.one(T)
    assert E.entries[1][0].is_zero()
    for row in E.entries:
        for e in row:
            assert e.is_polynomial()


def test_five_dim_adjoint_block():
    _, chain = adapted_chain(five_dim_two_parameter(F(1), F(2)))
    E = sym_exp(chain.ad_matrix(0), "t")
    exp_neg = ExpPoly.term(T, 1.0, exp_rates={"t": -1.0})
    cos = ExpPoly.term(T, 1.0, trig_rates={"t": 1.0}, kind=1)
    sin = ExpPoly.term(T, 1.0, trig_rates={"t": 1.0}, kind=2)
    assert E.entries[0][0].isclose(exp_neg, 1e-12)
    assert E.entries[1][1].isclose(cos, 1e-12)
    assert E.entries[1][2].isclose(-1.0 * sin, 1e-12)
    assert E.entries[2][1].isclose(sin, 1e-12)
    assert E.entries[3][3] == ExpPoly.one(T)
    assert E.entries[4][4] == ExpPoly.one(T)
    assert E.entries[0][1].is_zero()


def test_repeated_eigenvalue_polynomial_factor():
    A = [[F(2), F(1)], [F(0), F(2)]]
    E = sym_exp(A, "t")
    expected = ExpPoly.term(T, 1.0, powers={"t": 1}, exp_rates={"t": 2.0})
    assert E.entries[0][1].isclose(expected, 1e-10)
    assert derivative_residual(E) < 1e-10


def test_determinant_identity_matches_trace():
    _, chain = adapted_chain(five_dim_two_parameter(F(1), F(2)))
    neg = [[-x for x in row] for row in chain.ad_matrix(1)]
    E = sym_exp(neg, "t")  # the coframe factor orientation
    rng = random.Random(0)
    for _ in range(20):
        t = rng.uniform(-2, 2)
        det = float(np.linalg.det(E.at(t)))
        assert abs(det - np.exp(4.0 * t)) <= 1e-9 * max(1.0, np.exp(4.0 * t))


def test_identities_and_oracle_on_random_rational_matrices():
    rng = random.Random(42)
    for case in range(6):
        n = rng.choice([2, 3, 4])
        A = [[F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        E = sym_exp(A, "t")
        assert derivative_residual(E) < 1e-8, f"case {case}"
        assert E.at(0.0) == pytest.approx(np.eye(n), abs=1e-10)
        rep = exp_identities_check(E, samples=20, seed=case)
        assert rep.passed, f"case {case}:\n{rep}"
        An = np.array([[float(x) for x in row] for row in A])
        for _ in range(20):
            t = rng.uniform(-3, 3)
            ref = scipy.linalg.expm(t * An)
            scale = max(1.0, float(np.abs(ref).max()))
            assert float(np.abs(E.at(t) - ref).max()) / scale <= 1e-8


def test_irrational_spectrum_unsnapped_still_correct():
    A = [[F(0), F(1)], [F(2), F(0)]]  # eigenvalues +- sqrt(2)
    E = sym_exp(A, "t")
    An = np.array([[0.0, 1.0], [2.0, 0.0]])
    for t in (0.5, -1.2, 2.0):
        assert np.abs(E.at(t) - scipy.linalg.expm(t * An)).max() < 1e-9


def test_rational_snap_hits_exact_rates():
    A = [[F(-665857, 470832), F(0)], [F(0), F(1, 3)]]
    E = sym_exp(A, "t")
    ((k, a, b, kind),) = list(E.entries[0][0].terms)
    assert a[0] == float(F(-665857, 470832))
    ((k2, a2, b2, kind2),) = list(E.entries[1][1].terms)
    assert a2[0] == float(F(1, 3))


def test_cluster_ambiguity_detection():
    A = [[F(0), F(0), F(0)],
         [F(0), F(1, 20000000), F(0)],
         [F(0), F(0), F(3, 25000000)]]
    with pytest.raises(EigenvalueClusterAmbiguity):
        sym_exp(A, "t", cluster_tol=1e-7)
    E = sym_exp(A, "t", cluster_tol=1e-9)  # resolvable at a finer tolerance
    assert E.at(0.0) == pytest.approx(np.eye(3))


def test_compose_polynomial_entries_with_rational_scalar():
    from liequad import RationalFunction

    V = VarSet.of("u", "w")
    A = [[F(0), F(-1)], [F(0), F(0)]]
    E = sym_exp(A, "t")
    f = RationalFunction.parse(V, "1/u - u^3/w")
    M = E.compose(f)
    assert M[0][0] == RationalFunction.one(V)
    assert M[0][1] == -1 * f
    assert M[1][1] == RationalFunction.one(V)


def test_compose_exponential_entries_with_rational_scalar_raises():
    from liequad import NonAffineExponentSubstitution, RationalFunction

    V = VarSet.of("u")
    E = sym_exp([[F(1)]], "t")
    with pytest.raises(NonAffineExponentSubstitution):
        E.compose(RationalFunction.parse(V, "1/u"))
