"""Exact-core checks: Jacobi identities, doubles, cocommutators, two-forms."""

import random
from fractions import Fraction

import pytest

from liebialg.core import (
    StructureConstants,
    TwoFormLA,
    build_double,
    ce_differential,
    closed_two_forms,
    cocommutator,
    cocommutator_to_dual,
    find_symplectic,
    jacobi_check,
    mixed_jacobi_check,
    pairing_ad_invariant,
)
from liebialg.errors import InputError

A41 = StructureConstants.from_brackets(4, {(2, 4): [(1, 1)], (3, 4): [(1, 2)]})
A47 = StructureConstants.from_brackets(
    4, {(1, 4): [(2, 1)], (2, 3): [(1, 1)], (2, 4): [(1, 2)], (3, 4): [(1, 2), (1, 3)]}
)
A47I = StructureConstants.from_brackets(
    4,
    {
        (1, 2): [(Fraction(1, 2), 2), (Fraction(-1, 2), 3)],
        (1, 3): [(Fraction(1, 2), 3)],
        (1, 4): [(1, 4)],
        (2, 3): [(2, 4)],
    },
)
ABELIAN = StructureConstants(4)


def test_jacobi_abelian_passes():
    assert jacobi_check(ABELIAN).passed


def test_jacobi_a41_passes():
    assert jacobi_check(A41).passed


def test_jacobi_failure_locates_residual():
    bad = StructureConstants.from_brackets(4, {(1, 2): [(1, 1)], (2, 3): [(1, 2)]})
    rep = jacobi_check(bad)
    assert not rep.passed
    assert any(key[:3] == (1, 2, 3) for key in rep.residual)


def test_jacobi_residual_antisymmetric_in_first_pair():
    bad = StructureConstants.from_brackets(
        4, {(1, 2): [(1, 1)], (2, 3): [(1, 2)], (1, 4): [(2, 3)]}
    )
    rep = jacobi_check(bad)
    for (i, j, m, n), v in rep.residual.items():
        assert rep.residual.get((j, i, m, n), Fraction(0)) == -v


def test_jacobi_rejects_nonantisymmetric_input():
    sc = StructureConstants(4)
    sc.f[0][1][0] = Fraction(1)
    with pytest.raises(InputError):
        jacobi_check(sc)


def test_mixed_jacobi_trivial_dual():
    assert mixed_jacobi_check(A41, ABELIAN).passed


def test_mixed_jacobi_worked_pair():
    fd = StructureConstants.from_brackets(4, {(1, 2): [(1, 3), (1, 4)]})
    assert mixed_jacobi_check(A41, fd).passed


def test_mixed_jacobi_failure_residual_location():
    fd = StructureConstants.from_brackets(4, {(3, 4): [(1, 1)]})
    rep = mixed_jacobi_check(A41, fd)
    assert not rep.passed
    assert rep.residual[(3, 4, 2, 4)] == 1


def test_mixed_jacobi_dimension_mismatch():
    with pytest.raises(InputError):
        mixed_jacobi_check(A41, StructureConstants(8))


def test_build_double_abelian():
    dbl = build_double(ABELIAN, ABELIAN)
    assert dbl.sc.is_abelian()
    assert jacobi_check(dbl.sc).passed


def test_build_double_a47_passes_jacobi():
    dbl = build_double(A47, A47I)
    assert jacobi_check(dbl.sc).passed
    assert pairing_ad_invariant(dbl)


def test_build_double_fails_for_incompatible_pair():
    fd = StructureConstants.from_brackets(4, {(3, 4): [(1, 1)]})
    assert not mixed_jacobi_check(A41, fd).passed
    assert not jacobi_check(build_double(A41, fd).sc).passed


def test_double_jacobi_iff_parts_pass_random_perturbations():
    rng = random.Random(7)
    base_pairs = [(A41, StructureConstants.from_brackets(4, {(1, 2): [(1, 3), (1, 4)]})),
                  (A47, A47I)]
    checked = 0
    for _ in range(100):
        f0, fd0 = base_pairs[rng.randrange(len(base_pairs))]
        f = StructureConstants(4, [[row[:] for row in p] for p in f0.f])
        fd = StructureConstants(4, [[row[:] for row in p] for p in fd0.f])
        target = f if rng.random() < 0.5 else fd
        i, j = rng.randrange(4), rng.randrange(4)
        if i == j:
            continue
        k = rng.randrange(4)
        delta = Fraction(rng.randint(-2, 2))
        target.f[i][j][k] += delta
        target.f[j][i][k] -= delta
        target._nonzero = None
        parts_ok = (
            jacobi_check(f).passed
            and jacobi_check(fd).passed
            and mixed_jacobi_check(f, fd).passed
        )
        dbl_ok = jacobi_check(build_double(f, fd).sc).passed
        assert parts_ok == dbl_ok
        checked += 1
    assert checked > 60


def test_cocommutator_components_and_roundtrip():
    fd = StructureConstants.from_brackets(
        4,
        {
            (1, 2): [(2, 1)],
            (1, 4): [(1, 3)],
            (2, 3): [(-1, 3)],
            (2, 4): [(1, 4)],
        },
    )
    t = cocommutator(fd)
    assert t.is_antisymmetric()
    # delta(X_4) component on X_1 (x) X_4 equals ft^14_4
    assert t.d[3][0][3] == fd.f[0][3][3]
    assert cocommutator_to_dual(t) == fd


def test_cocommutator_zero():
    t = cocommutator(ABELIAN)
    assert all(not x for p in t.d for row in p for x in row)


def test_ce_differential_abelian_always_closed():
    w = TwoFormLA.from_pairs(4, {(1, 2): 1, (3, 4): Fraction(5, 7)})
    dw = ce_differential(w, ABELIAN)
    assert all(not x for p in dw for row in p for x in row)


def test_ce_differential_closed_witness_a41():
    w = TwoFormLA.from_pairs(4, {(1, 4): 1, (2, 3): 1})
    dw = ce_differential(w, A41)
    assert all(not x for p in dw for row in p for x in row)


def test_ce_differential_nonclosed_value():
    w = TwoFormLA.from_pairs(4, {(1, 2): 1})
    dw = ce_differential(w, A41)
    assert dw[0][2][3] == 1


def test_ce_differential_matches_bruteforce_antisymmetrization():
    rng = random.Random(3)
    for _ in range(20):
        pairs = {}
        for (i, j) in ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)):
            pairs[(i, j)] = Fraction(rng.randint(-3, 3))
        w = TwoFormLA.from_pairs(4, pairs)
        dw = ce_differential(w, A47)
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    v = dw[i][j][k]
                    assert dw[j][i][k] == -v
                    assert dw[i][k][j] == -v


def test_ce_differential_linear_in_form():
    w1 = TwoFormLA.from_pairs(4, {(1, 2): 1, (2, 4): 3})
    w2 = TwoFormLA.from_pairs(4, {(1, 3): 2, (3, 4): -1})
    wsum = TwoFormLA.from_pairs(
        4, {(1, 2): 1, (2, 4): 3, (1, 3): 2, (3, 4): -1}
    )
    d1 = ce_differential(w1, A47)
    d2 = ce_differential(w2, A47)
    ds = ce_differential(wsum, A47)
    for i in range(4):
        for j in range(4):
            for k in range(4):
                assert ds[i][j][k] == d1[i][j][k] + d2[i][j][k]


def test_find_symplectic_abelian():
    rep = find_symplectic(ABELIAN)
    assert rep.found
    assert len(rep.closed_basis) == 6
    assert rep.witness.det() != 0


def test_find_symplectic_a41_witness():
    rep = find_symplectic(A41)
    assert rep.found
    candidate = TwoFormLA.from_pairs(4, {(1, 4): 1, (2, 3): 1})
    dw = ce_differential(candidate, A41)
    assert all(not x for p in dw for row in p for x in row)
    assert candidate.det() == 1


def test_closed_two_forms_are_closed():
    for form in closed_two_forms(A47):
        dw = ce_differential(form, A47)
        assert all(not x for p in dw for row in p for x in row)


def test_adjoint_set_definitions():
    from liebialg.core import AdjointSet

    fd = StructureConstants.from_brackets(4, {(1, 2): [(1, 3), (1, 4)]})
    adj = AdjointSet.build(A47, fd)
    for i in range(4):
        for j in range(4):
            for k in range(4):
                assert adj.X[i][j][k] == -A47.f[i][j][k]
                assert adj.Xt[i][j][k] == -fd.f[i][j][k]
    for k in range(4):
        for i in range(4):
            for j in range(4):
                assert adj.Y[k][i][j] == -adj.Y[k][j][i]
                assert adj.Y[k][i][j] == -A47.f[i][j][k]
