"""Closed-function engine: canonical arithmetic, calculus, matrix exponentials."""

import random
from fractions import Fraction

import pytest

from liebialg.closedfun import (
    CRat,
    ClosedFunction,
    cf_const,
    cf_coord,
    cf_cos,
    cf_cosh,
    cf_exp,
    cf_matexp,
    cf_sin,
    cf_sinh,
    cfm_eq,
    cfm_identity,
    cfm_inverse_unitdet,
    cfm_mul,
)
from liebialg.core import StructureConstants
from liebialg.errors import NonUnitDeterminant, UnsupportedSpectrum


def _random_cf(rng, depth=3):
    atoms = [
        cf_const(Fraction(rng.randint(-3, 3), rng.randint(1, 3))),
        cf_coord(rng.randint(1, 4)),
        cf_exp({rng.randint(1, 4): Fraction(rng.randint(-2, 2))}),
        cf_cos({rng.randint(1, 4): Fraction(rng.randint(1, 2))}),
        cf_sin({rng.randint(1, 4): Fraction(rng.randint(1, 2))}),
        cf_sinh({rng.randint(1, 4): Fraction(rng.randint(1, 2), 2)}),
    ]
    f = atoms[rng.randrange(len(atoms))]
    for _ in range(depth):
        g = atoms[rng.randrange(len(atoms))]
        f = f * g if rng.random() < 0.5 else f + g
    return f


def test_add_cancels_to_empty():
    assert (cf_const(1) + cf_const(-1)).is_zero()


def test_exp_rates_add_under_multiplication():
    half = cf_exp({4: Fraction(1, 2)})
    assert half * half == cf_exp({4: 1})


def test_pythagorean_identity():
    s, c = cf_sin({4: 1}), cf_cos({4: 1})
    assert s * s + c * c == cf_const(1)


def test_cosh_sinh_identity():
    s, c = cf_sinh({2: 1}), cf_cosh({2: 1})
    assert c * c - s * s == cf_const(1)


def test_canonical_roundtrips_200_random():
    rng = random.Random(0)
    for _ in range(200):
        f = _random_cf(rng)
        g = _random_cf(rng)
        assert ((f + g) - g - f).is_zero()
        assert (f - f).is_zero()
        h = (f + g) * (f - g) - (f * f - g * g)
        assert h.is_zero()


def test_diff_exponential():
    f = cf_const(1) - cf_exp({4: -2})
    assert f.diff(4) == cf_exp({4: -2}).scale(2)


def test_diff_unused_coordinate():
    f = cf_coord(4, 2).scale(Fraction(1, 2))
    assert f.diff(1).is_zero()


def test_diff_cos_gives_minus_sin():
    assert cf_cos({3: 1}).diff(3) == -cf_sin({3: 1})


def test_diff_matches_central_differences():
    rng = random.Random(1)
    h = 1e-6
    for _ in range(25):
        f = _random_cf(rng)
        if not f.is_real():
            f = f + f.conjugate()
        i = rng.randint(1, 4)
        df = f.diff(i)
        for _ in range(20):
            p = [rng.uniform(-1, 1) for _ in range(4)]
            pp, pm = list(p), list(p)
            pp[i - 1] += h
            pm[i - 1] -= h
            numeric = (f.eval(pp) - f.eval(pm)) / (2 * h)
            analytic = df.eval(p)
            assert abs(analytic - numeric) / (1 + abs(analytic)) < 1e-6


def test_eval_fixed_values():
    f = cf_const(1) - cf_exp({4: -2})
    assert f.eval([0, 0, 0, 0]) == 0
    g = cf_coord(4, 2).scale(Fraction(1, 2))
    assert g.eval([0, 0, 0, 2.0]) == pytest.approx(2.0)


def test_eval_real_pairing_property():
    rng = random.Random(2)
    for _ in range(30):
        f = _random_cf(rng)
        f = f + f.conjugate()  # force a real function
        assert f.is_real()
        p = [rng.uniform(-1, 1) for _ in range(4)]
        f.eval(p)  # must not raise the imaginary-residue error


def test_eval_rejects_nonreal():
    f = ClosedFunction.const(CRat(0, 1))
    with pytest.raises(Exception):
        f.eval([0.1, 0.2, 0.3, 0.4])


def test_matexp_zero_matrix():
    assert cfm_eq(cf_matexp([[Fraction(0)] * 4 for _ in range(4)], 1), cfm_identity(4))


def test_matexp_nilpotent_a41():
    a41 = StructureConstants.from_brackets(4, {(2, 4): [(1, 1)], (3, 4): [(1, 2)]})
    e = cf_matexp(a41.adjoint(3), 4)
    assert e[2][0] == cf_coord(4, 2).scale(Fraction(1, 2))


def test_matexp_rotation_block():
    m = [[Fraction(0)] * 4 for _ in range(4)]
    m[0][1] = Fraction(-1)
    m[1][0] = Fraction(1)
    e = cf_matexp(m, 3)
    assert e[0][0] == cf_cos({3: 1})
    assert e[0][1] == -cf_sin({3: 1})


def test_matexp_inverse_identity_on_corpus_adjoints(reg):
    for name in ("A_4_7", "A_4_11_b", "A_4_12", "VI0+R", "III+R"):
        binding = reg.grid_bindings(name, cap=1)[0]
        sc = reg.instantiate(name, binding)
        for i in range(4):
            m = sc.adjoint(i)
            e = cf_matexp(m, i + 1)
            em = cf_matexp([[-x for x in row] for row in m], i + 1)
            assert cfm_eq(cfm_mul(e, em), cfm_identity(4))


def test_matexp_split_exponents_numerically():
    rng = random.Random(5)
    m = [[Fraction(0)] * 4 for _ in range(4)]
    m[0][0] = Fraction(1, 2)
    m[1][2] = Fraction(1)
    m[2][1] = Fraction(-1)
    e = cf_matexp(m, 1)
    for _ in range(10):
        s, t = rng.uniform(-1, 1), rng.uniform(-1, 1)
        for i in range(4):
            for j in range(4):
                full = e[i][j].eval([s + t, 0, 0, 0])
                split = sum(
                    e[i][k].eval([s, 0, 0, 0]) * e[k][j].eval([t, 0, 0, 0])
                    for k in range(4)
                )
                assert abs(full - split) < 1e-9


def test_matexp_unsupported_spectrum():
    m = [[Fraction(0)] * 2 for _ in range(2)]
    m[0][1] = Fraction(1)
    m[1][0] = Fraction(2)  # eigenvalues +-sqrt(2)
    with pytest.raises(UnsupportedSpectrum) as exc:
        cf_matexp(m, 1)
    assert exc.value.factor is not None


def test_inverse_requires_unit_determinant():
    bad = cfm_identity(2)
    bad[0][0] = cf_const(1) + cf_coord(1)
    with pytest.raises(NonUnitDeterminant):
        cfm_inverse_unitdet(bad)


def test_inverse_of_exponential_matrix():
    m = [[Fraction(0)] * 3 for _ in range(3)]
    m[0][0] = Fraction(2)
    m[1][2] = Fraction(1)
    e = cf_matexp(m, 2)
    inv = cfm_inverse_unitdet(e)
    assert cfm_eq(cfm_mul(e, inv), cfm_identity(3))
