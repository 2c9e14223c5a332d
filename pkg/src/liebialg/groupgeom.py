"""Chart-level geometry on the product-of-exponentials parameterization.

The group element is g = e^{x1 X1} e^{x2 X2} e^{x3 X3} e^{x4 X4}; conjugation
by coordinate exponentials uses e^{-x X_i} X_j e^{x X_i} = (e^{x Xadj_i})_j^k X_k
with matrices acting on the right of row vectors (row = input basis index).
"""

from dataclasses import dataclass

from . import ratlinalg as rl
from .closedfun import (
    cf_matexp,
    cfm_identity,
    cfm_inverse_unitdet,
    cfm_is_zero,
    cfm_mul,
    cfm_sub,
    cfm_transpose,
)
from .core import StructureConstants, build_double, jacobi_check, mixed_jacobi_check
from .errors import InputError


@dataclass
class GroupChart:
    base: StructureConstants

    def __post_init__(self):
        if not jacobi_check(self.base).passed:
            raise InputError("chart base algebra fails the Jacobi identity")


@dataclass
class InvariantFrame:
    Rmat: list  # right-invariant one-form coefficients R^i_j (row i, col j)
    Lmat: list  # left-invariant one-form coefficients L^i_j
    XR: list  # right-invariant vector fields, XR[j][l] = component on d_l
    XL: list  # left-invariant vector fields

    def field_rows(self, side):
        return self.XL if side == "L" else self.XR


def _neg(m):
    return [[-x for x in row] for row in m]


def invariant_frame(chart: GroupChart) -> InvariantFrame:
    """Assemble R, L symbolically and invert to the frame fields.

    R column j is row j of the ordered product of exp(-x_m Xadj_m) for
    m = j-1 .. 1; L column j is row j of exp(x_m Xadj_m) for m = j+1 .. n.
    """
    f = chart.base
    n = f.dim
    adj = f.adjoints()
    exp_neg = [cf_matexp(_neg(adj[i]), i + 1) for i in range(n)]
    exp_pos = [cf_matexp(adj[i], i + 1) for i in range(n)]

    rcols = []
    prod = cfm_identity(n)
    rcols.append(prod[0])
    for j in range(1, n):
        prod = cfm_mul(exp_neg[j - 1], prod)
        rcols.append(prod[j])
    lcols = [None] * n
    prod = cfm_identity(n)
    lcols[n - 1] = prod[n - 1]
    for j in range(n - 2, -1, -1):
        prod = cfm_mul(exp_pos[j + 1], prod)
        lcols[j] = prod[j]

    rmat = [[rcols[j][i] for j in range(n)] for i in range(n)]
    lmat = [[lcols[j][i] for j in range(n)] for i in range(n)]
    xr = cfm_transpose(cfm_inverse_unitdet(rmat))
    xl = cfm_transpose(cfm_inverse_unitdet(lmat))
    return InvariantFrame(rmat, lmat, xr, xl)


def vf_commutator(v, w):
    """Commutator of vector fields given as component rows (CFMatrix rows)."""
    n = len(v)
    out = []
    for k in range(n):
        acc = None
        for l in range(n):
            t1 = v[l] * w[k].diff(l + 1)
            t2 = w[l] * v[k].diff(l + 1)
            term = t1 - t2
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def frame_bracket_residuals(frame: InvariantFrame, f: StructureConstants):
    """Symbolic residuals of [XL_i, XL_j] = f_ij^k XL_k,
    [XR_i, XR_j] = -f_ij^k XR_k and [XL_i, XR_j] = 0."""
    n = f.dim
    bad = []
    for i in range(n):
        for j in range(i + 1, n):
            ll = vf_commutator(frame.XL[i], frame.XL[j])
            rr = vf_commutator(frame.XR[i], frame.XR[j])
            for k in range(n):
                want_l = ll[k]
                want_r = rr[k]
                for m in range(n):
                    if f.f[i][j][m]:
                        want_l = want_l - frame.XL[m][k].scale(f.f[i][j][m])
                        want_r = want_r + frame.XR[m][k].scale(f.f[i][j][m])
                if want_l:
                    bad.append(("LL", i + 1, j + 1, k + 1))
                if want_r:
                    bad.append(("RR", i + 1, j + 1, k + 1))
    for i in range(n):
        for j in range(n):
            lr = vf_commutator(frame.XL[i], frame.XR[j])
            if any(lr):
                bad.append(("LR", i + 1, j + 1, 0))
    return bad


@dataclass
class DoubleAdjointBlocks:
    a: list  # 4x4 CFMatrix, g-to-g block of Ad_{g^-1}
    b: list  # dual-to-g block
    d: list  # dual-to-dual block
    full: list  # the whole 8x8 matrix


def double_adjoint(f: StructureConstants, fd: StructureConstants) -> DoubleAdjointBlocks:
    """Ad_{g^-1} on the double as the ordered product
    exp(x1 Xadj_1) ... exp(x4 Xadj_4) of the double's adjoint matrices."""
    if not mixed_jacobi_check(f, fd).passed:
        raise InputError("pair fails the mixed Jacobi identity")
    dbl = build_double(f, fd)
    if not jacobi_check(dbl.sc).passed:
        raise InputError("double fails the Jacobi identity")
    n = f.dim
    m = cfm_identity(2 * n)
    for i in range(n):
        m = cfm_mul(m, cf_matexp(dbl.sc.adjoint(i), i + 1))
    a = [row[:n] for row in m[:n]]
    b = [row[:n] for row in m[n:]]
    d = [row[n:] for row in m[n:]]
    upper_right = [row[n:] for row in m[:n]]
    if not cfm_is_zero(upper_right):
        raise AssertionError("primal block leaked into the dual column space")
    blocks = DoubleAdjointBlocks(a, b, d, m)
    # invariance of the canonical pairing forces d = (a^-1)^T
    if not cfm_is_zero(blocks_pairing_residual(blocks)):
        raise AssertionError("pairing relation d = (a^-1)^T violated")
    return blocks


def blocks_pairing_residual(blocks: DoubleAdjointBlocks):
    """d - (a^-1)^T, identically zero by invariance of the pairing."""
    ainv = cfm_inverse_unitdet(blocks.a)
    return cfm_sub(blocks.d, cfm_transpose(ainv))
