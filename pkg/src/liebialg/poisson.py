"""Poisson bivectors on the group chart: construction, verification, and
symplectic classification."""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .closedfun import (
    ClosedFunction,
    cfm_eval,
    cfm_mul,
    cfm_sub,
    cfm_transpose,
    cfm_inverse_unitdet,
    cfm_scale,
)
from .core import StructureConstants
from .errors import InputError
from .groupgeom import DoubleAdjointBlocks, InvariantFrame
from .rmatrix import TensorElement

GENERIC_POINT = (
    Fraction(1, 3),
    Fraction(1, 5),
    Fraction(1, 7),
    Fraction(1, 11),
)
FALLBACK_POINTS = (
    (Fraction(1, 2), Fraction(-1, 3), Fraction(1, 5), Fraction(-1, 7)),
    (Fraction(-2, 3), Fraction(1, 4), Fraction(-1, 5), Fraction(1, 6)),
    (Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)),
    (Fraction(-1, 2), Fraction(2, 3), Fraction(-3, 4), Fraction(4, 5)),
    (Fraction(3, 7), Fraction(-5, 11), Fraction(7, 13), Fraction(-9, 17)),
)


@dataclass
class PoissonBivector:
    P: list  # 4x4 CFMatrix, P[i][j] = {x_{i+1}, x_{j+1}}
    base: StructureConstants
    provenance: str  # 'sklyanin(...)' | 'pi(...)'

    def __post_init__(self):
        n = len(self.P)
        for i in range(n):
            for j in range(n):
                if self.P[i][j] != -self.P[j][i]:
                    raise InputError("bivector is not antisymmetric")
        for i in range(n):
            for j in range(n):
                if self.P[i][j].eval_at_zero():
                    raise InputError("bivector does not vanish at the origin")

    def bracket(self, i, j):
        """{x_i, x_j} as a closed function (1-based)."""
        return self.P[i - 1][j - 1]

    def eval(self, point):
        return np.array(cfm_eval(self.P, [float(x) for x in point]))


def sklyanin_bivector(frame: InvariantFrame, r: TensorElement, base=None) -> PoissonBivector:
    """P = XL^T r XL - XR^T r XR for antisymmetric r (entries {x_i, x_j})."""
    if not r.is_antisymmetric():
        raise InputError("Sklyanin bracket needs an antisymmetric r")
    rcf = [[ClosedFunction.const(x) for x in row] for row in r.r]
    xl, xr = frame.XL, frame.XR
    left = cfm_mul(cfm_transpose(xl), cfm_mul(rcf, xl))
    right = cfm_mul(cfm_transpose(xr), cfm_mul(rcf, xr))
    return PoissonBivector(cfm_sub(left, right), base, "sklyanin")


def pi_bivector(blocks: DoubleAdjointBlocks, frame: InvariantFrame, base=None) -> PoissonBivector:
    """P^kl = (-b a^-1)^ij XR_i^k XR_j^l from the double's adjoint blocks."""
    ainv = cfm_inverse_unitdet(blocks.a)
    pi = cfm_scale(Fraction(-1), cfm_mul(blocks.b, ainv))
    xr = frame.XR
    p = cfm_mul(cfm_transpose(xr), cfm_mul(pi, xr))
    return PoissonBivector(p, base, "pi")


@dataclass
class PoissonJacobiReport:
    passed: bool
    residuals: dict = field(default_factory=dict)  # (i,j,k) 1-based -> ClosedFunction

    def __bool__(self):
        return self.passed


def poisson_jacobi_check(pb: PoissonBivector) -> PoissonJacobiReport:
    """J^ijk = sum_l (P^il d_l P^jk + P^jl d_l P^ki + P^kl d_l P^ij), symbolically."""
    p = pb.P
    n = len(p)
    res = {}
    dp = [[[p[i][j].diff(l + 1) for l in range(n)] for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                acc = ClosedFunction.zero()
                for l in range(n):
                    acc = acc + p[i][l] * dp[j][k][l]
                    acc = acc + p[j][l] * dp[k][i][l]
                    acc = acc + p[k][l] * dp[i][j][l]
                if acc:
                    res[(i + 1, j + 1, k + 1)] = acc
    return PoissonJacobiReport(not res, res)


def linearization_check(pb: PoissonBivector, fd: StructureConstants) -> bool:
    """d_k P^ij (0) = ft^ij_k exactly, full tensor comparison."""
    p = pb.P
    n = len(p)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                v = p[i][j].diff(k + 1).eval_at_zero()
                if not v.is_real() or v.re != fd.f[i][j][k]:
                    return False
    return True


@dataclass
class SymplecticReport:
    symplectic: bool
    witness_point: tuple = None
    det_value: float = 0.0
    det_exact: Fraction = None  # set when the determinant is polynomial
    closed_ok: bool = None
    max_rank: int = 0

    def __bool__(self):
        return self.symplectic


def _numeric_rank(m, tol=1e-9):
    s = np.linalg.svd(np.array(m, dtype=float), compute_uv=False)
    return int(np.sum(s > tol * max(1.0, float(s[0]) if len(s) else 1.0)))


def symplectic_classify(pb: PoissonBivector, seed=0, npoints=20) -> SymplecticReport:
    """Invertibility at a deterministic generic point (with fallbacks) plus a
    numeric closedness check of Omega = P^{-1} at sampled points."""
    from .closedfun import cfm_det

    det_cf = cfm_det(pb.P)
    polynomial = det_cf.is_polynomial()
    max_rank = 0
    for point in (GENERIC_POINT,) + FALLBACK_POINTS:
        fpt = [float(x) for x in point]
        m = np.array(cfm_eval(pb.P, fpt))
        max_rank = max(max_rank, _numeric_rank(m))
        if polynomial:
            dv = _eval_polynomial_exact(det_cf, point)
            nonzero = dv != 0
            det_val = float(dv)
        else:
            dv = None
            det_val = det_cf.eval(fpt)
            nonzero = abs(det_val) > 1e-9
        if nonzero:
            ok = _closedness_check(pb, seed=seed, npoints=npoints)
            return SymplecticReport(True, point, det_val, dv, ok, 4)
    return SymplecticReport(False, None, 0.0, None, None, max_rank)


def _eval_polynomial_exact(f: ClosedFunction, point) -> Fraction:
    acc = Fraction(0)
    for (k, z), c in f.terms.items():
        if any(z):
            raise InputError("not a polynomial")
        v = c.re
        for i in range(4):
            if k[i]:
                v *= Fraction(point[i]) ** k[i]
        acc += v
    return acc


def _closedness_check(pb: PoissonBivector, seed=0, npoints=20, tol=1e-9):
    """dOmega_ijk = d_i Omega_jk - d_j Omega_ik + d_k Omega_ij = 0 numerically,
    using dOmega = -P^-1 (dP) P^-1 with analytic dP."""
    rng = np.random.default_rng(seed)
    p = pb.P
    n = len(p)
    dp = [[[p[i][j].diff(l + 1) for j in range(n)] for i in range(n)] for l in range(n)]
    checked = 0
    while checked < npoints:
        pt = rng.uniform(-0.6, 0.6, size=4)
        pm = np.array(cfm_eval(p, list(pt)))
        if abs(np.linalg.det(pm)) < 1e-6:
            continue
        pinv = np.linalg.inv(pm)
        domega = []
        for l in range(n):
            dpl = np.array(cfm_eval(dp[l], list(pt)))
            domega.append(-pinv @ dpl @ pinv)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    v = domega[i][j][k] - domega[j][i][k] + domega[k][i][j]
                    if abs(v) > tol:
                        return False
        checked += 1
    return True


def omega_at(pb: PoissonBivector, point):
    """Symplectic form value Omega(point) with Omega P = -I."""
    m = pb.eval(point)
    return -np.linalg.inv(m)
