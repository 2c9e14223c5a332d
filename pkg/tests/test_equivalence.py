"""Witness verification and the numeric witness search."""

import random
from fractions import Fraction

import pytest

import liebialg.ratlinalg as rl
from liebialg.core import StructureConstants, cocommutator
from liebialg.equivalence import (
    WitnessMatrix,
    search_witness,
    verify_automorphism,
    verify_bialgebra_equivalence,
    verify_isomorphism,
)
from liebialg.errors import InputError

A41 = StructureConstants.from_brackets(4, {(2, 4): [(1, 1)], (3, 4): [(1, 2)]})
IIR = StructureConstants.from_brackets(4, {(2, 3): [(1, 1)]})
# the worked-example dual solution at beta = gamma = 1 equals (II+R).i
SOLUTION = StructureConstants.from_brackets(4, {(1, 2): [(1, 3), (1, 4)]})


def test_identity_isomorphism():
    assert verify_isomorphism(WitnessMatrix(rl.identity(4), "C"), IIR, IIR)


def test_worked_isomorphism_witness(reg):
    fx = reg.fixtures["iso_a41_dual"]
    c = WitnessMatrix([[x.eval_exact() for x in row] for row in fx.matrices["C"]], "C")
    src = reg.instantiate(fx.refs["src"])
    dst = reg.instantiate(fx.refs["dst"])
    assert verify_isomorphism(c, src, dst)
    cinv = WitnessMatrix(rl.inverse(c.m), "C")
    assert verify_isomorphism(cinv, dst, src)


def test_isomorphism_scaling_counterexample():
    # rescaling the last dual generator alone is not a self-isomorphism of
    # [X1,X2] = X4; it identifies the doubled-constant presentation instead
    src = StructureConstants.from_brackets(4, {(1, 2): [(1, 4)]})
    doubled = StructureConstants.from_brackets(4, {(1, 2): [(2, 4)]})
    c = WitnessMatrix.from_rows(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2]], "C"
    )
    assert not verify_isomorphism(c, src, src)
    assert verify_isomorphism(c, doubled, src)


def test_singular_witness_rejected():
    c = WitnessMatrix(rl.zeros(4, 4), "C")
    with pytest.raises(InputError):
        verify_isomorphism(c, IIR, IIR)


def test_identity_automorphism_any_algebra(reg):
    ident = WitnessMatrix(rl.identity(4), "A")
    for name in ("A_4_1", "A_4_7", "VII0+R"):
        assert verify_automorphism(ident, reg.instantiate(name))


def test_worked_automorphism_family_member(reg):
    fx = reg.fixtures["auto_a41"]
    a = WitnessMatrix([[x.eval_exact() for x in row] for row in fx.matrices["A"]], "A")
    assert verify_automorphism(a, A41)
    ident = WitnessMatrix(
        [[x.eval_exact() for x in row] for row in fx.matrices["A_identity"]], "A"
    )
    assert verify_automorphism(ident, A41)


def test_scaling_x1_alone_is_not_an_automorphism():
    a = WitnessMatrix.from_rows(
        [[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], "A"
    )
    assert not verify_automorphism(a, A41)


def _a41_automorphism(rng):
    a22 = Fraction(rng.randint(1, 3))
    a44 = Fraction(rng.choice([1, 2]))
    a32 = Fraction(rng.randint(-2, 2))
    a31 = Fraction(rng.randint(-2, 2))
    a41 = Fraction(rng.randint(-2, 2))
    a42 = Fraction(rng.randint(-2, 2))
    a43 = Fraction(rng.randint(-2, 2))
    return [
        [a22 * a44, Fraction(0), Fraction(0), Fraction(0)],
        [a32 * a44, a22, Fraction(0), Fraction(0)],
        [a31, a32, a22 / a44, Fraction(0)],
        [a41, a42, a43, a44],
    ]


def test_automorphisms_closed_under_product_and_inverse():
    rng = random.Random(13)
    for _ in range(20):
        a = _a41_automorphism(rng)
        b = _a41_automorphism(rng)
        assert verify_automorphism(WitnessMatrix(a, "A"), A41)
        assert verify_automorphism(WitnessMatrix(b, "A"), A41)
        assert verify_automorphism(WitnessMatrix(rl.mat_mul(a, b), "A"), A41)
        assert verify_automorphism(WitnessMatrix(rl.inverse(a), "A"), A41)


def test_identity_bialgebra_equivalence():
    t = WitnessMatrix(rl.identity(4), "B")
    assert verify_bialgebra_equivalence(t, A41, SOLUTION, SOLUTION)


def test_worked_scaling_equivalence(reg):
    fx = reg.fixtures["equiv_a41_q"]
    t = WitnessMatrix([[x.eval_exact() for x in row] for row in fx.matrices["T"]], "B")
    qalt = fx.vals["qalt"].eval_exact()
    fd_q = StructureConstants.from_brackets(4, {(1, 2): [(qalt, 3), (qalt, 4)]})
    assert verify_bialgebra_equivalence(t, A41, fd_q, SOLUTION)


def test_equivalence_relates_cocommutators():
    # T maps fd1 to fd2, so the cocommutator tensors match after the change
    # of dual basis: T^i_k T^j_l d1[m][k][l] = d2[n][i][j] T^n_m.
    fx_t = [
        [Fraction(1, 2), 0, 0, 0],
        [0, Fraction(1, 2), 0, 0],
        [0, 0, Fraction(1, 2), Fraction(-1, 2)],
        [0, 0, 0, Fraction(1)],
    ]
    fd1 = StructureConstants.from_brackets(4, {(1, 2): [(2, 3), (2, 4)]})
    fd2 = SOLUTION
    t = WitnessMatrix([[Fraction(x) for x in row] for row in fx_t], "B")
    assert verify_bialgebra_equivalence(t, A41, fd1, fd2)
    d1 = cocommutator(fd1)
    d2 = cocommutator(fd2)
    for i in range(4):
        for j in range(4):
            for m in range(4):
                lhs = sum(
                    t.m[i][k] * t.m[j][l] * d1.d[m][k][l]
                    for k in range(4)
                    for l in range(4)
                )
                rhs = sum(d2.d[n][i][j] * t.m[n][m] for n in range(4))
                assert lhs == rhs


def test_search_abelian_automorphism_returns_identity():
    res = search_witness("auto", StructureConstants(4), tries=5, seed=0)
    assert res.found
    assert res.witness.m == rl.identity(4)


def test_search_finds_isomorphism_both_ways():
    res = search_witness("iso", SOLUTION, IIR, tries=150, seed=2)
    assert res.found
    assert verify_isomorphism(res.witness, SOLUTION, IIR)
    res2 = search_witness("iso", IIR, SOLUTION, tries=150, seed=0)
    assert res2.found
    assert verify_isomorphism(res2.witness, IIR, SOLUTION)


def test_search_finds_scaling_equivalence():
    fd_q2 = StructureConstants.from_brackets(4, {(1, 2): [(2, 3), (2, 4)]})
    res = search_witness("equiv", A41, fd_q2, SOLUTION, tries=150, seed=3)
    assert res.found
    assert verify_bialgebra_equivalence(res.witness, A41, fd_q2, SOLUTION)


@pytest.mark.slow
def test_search_refutes_distinct_classes():
    fd_ii = StructureConstants.from_brackets(4, {(1, 2): [(1, 4)]})
    fd_iv = StructureConstants.from_brackets(4, {(1, 3): [(1, 4)]})
    res = search_witness("equiv", A41, fd_ii, fd_iv, tries=500, seed=4)
    assert not res.found
    assert res.tries == 500
