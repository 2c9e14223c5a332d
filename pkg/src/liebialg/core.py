"""Exact multilinear algebra for Lie algebras, duals, cocommutators, and doubles.

Conventions (fixed throughout the package):
  [X_i, X_j] = f_ij^k X_k           stored as f[i][j][k], 0-based
  adjoint    (Xadj_i)_j^k = -f_ij^k  row j, column k
  dual       [Xt^i, Xt^j] = ft^ij_k Xt^k, same storage as a second instance
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
import random

from . import ratlinalg as rl
from .errors import InputError

Rat = Fraction


def _as_frac(x):
    return x if isinstance(x, Fraction) else Fraction(x)


class StructureConstants:
    """Rank-3 antisymmetric rational tensor of a Lie algebra on an ordered basis."""

    __slots__ = ("dim", "f", "_nonzero")

    def __init__(self, dim, f=None):
        self.dim = dim
        if f is None:
            f = [[[rl.ZERO] * dim for _ in range(dim)] for _ in range(dim)]
        self.f = f
        self._nonzero = None

    @classmethod
    def from_brackets(cls, dim, brackets):
        """Build from {(i, j): [(coeff, k), ...]} with 1-based indices, i < j."""
        sc = cls(dim)
        for (i, j), terms in brackets.items():
            if not (1 <= i <= dim and 1 <= j <= dim) or i == j:
                raise InputError(f"bad bracket indices ({i},{j})")
            for coeff, k in terms:
                c = _as_frac(coeff)
                sc.f[i - 1][j - 1][k - 1] += c
                sc.f[j - 1][i - 1][k - 1] -= c
        sc._nonzero = None
        return sc

    def nonzero(self):
        """Cached list of (i, j, k, value) with value != 0 (all pairs i, j)."""
        if self._nonzero is None:
            self._nonzero = [
                (i, j, k, self.f[i][j][k])
                for i in range(self.dim)
                for j in range(self.dim)
                for k in range(self.dim)
                if self.f[i][j][k]
            ]
        return self._nonzero

    def is_antisymmetric(self):
        d = self.dim
        return all(
            self.f[i][j][k] == -self.f[j][i][k]
            for i in range(d)
            for j in range(i, d)
            for k in range(d)
        )

    def is_abelian(self):
        return not self.nonzero()

    def adjoint(self, i):
        """Matrix (Xadj_i)_j^k = -f_ij^k (row j, col k)."""
        return [[-x for x in row] for row in self.f[i]]

    def adjoints(self):
        return [self.adjoint(i) for i in range(self.dim)]

    def y_matrix(self, k):
        """Matrix (Y^k)_ij = -f_ij^k."""
        d = self.dim
        return [[-self.f[i][j][k] for j in range(d)] for i in range(d)]

    def bracket_lines(self):
        """Sorted [(i, j, k, coeff)] with i < j, 1-based, for display."""
        return sorted(
            (i + 1, j + 1, k + 1, v) for (i, j, k, v) in self.nonzero() if i < j
        )

    def __eq__(self, other):
        return isinstance(other, StructureConstants) and self.dim == other.dim and self.f == other.f

    def __hash__(self):
        return hash((self.dim, tuple(tuple(tuple(r) for r in p) for p in self.f)))

    def __repr__(self):
        lines = ", ".join(
            f"[{i},{j}]->{v}*e{k}" for (i, j, k, v) in self.bracket_lines()
        )
        return f"StructureConstants(dim={self.dim}, {lines or 'abelian'})"


@dataclass
class AdjointSet:
    """Adjoint matrices of an algebra and (optionally) of its dual."""

    X: list
    Y: list
    Xt: list = None
    Yt: list = None

    @classmethod
    def build(cls, f: StructureConstants, fd: StructureConstants = None):
        xs = f.adjoints()
        ys = [f.y_matrix(k) for k in range(f.dim)]
        if fd is None:
            return cls(xs, ys)
        return cls(xs, ys, fd.adjoints(), [fd.y_matrix(k) for k in range(fd.dim)])


@dataclass
class JacobiReport:
    passed: bool
    residual: dict = field(default_factory=dict)  # (i,j,m,n) 1-based -> value

    def __bool__(self):
        return self.passed


def jacobi_check(sc: StructureConstants) -> JacobiReport:
    """Residual J_ijm^n = sum_k (f_ij^k f_km^n + f_ik^n f_mj^k + f_jk^n f_im^k)."""
    if not sc.is_antisymmetric():
        raise InputError("structure constants are not antisymmetric")
    d = sc.dim
    nz = sc.nonzero()
    # T_ijm^n = sum_k f_ij^k f_km^n over nonzero entries only; the full
    # residual is the cyclic sum J_ijm^n = T_ijm^n + T_jmi^n + T_mij^n,
    # which equals the three-term form stated in the docstring.
    acc = {}
    by_first = {}
    for (k, m, n, w) in nz:
        by_first.setdefault(k, []).append((m, n, w))
    for (i, j, k, v) in nz:
        for (m, n, w) in by_first.get(k, ()):
            key = (i, j, m, n)
            acc[key] = acc.get(key, rl.ZERO) + v * w
    total = {}
    for (i, j, m, n), v in acc.items():
        # T_ijm^n enters J at the slots (i,j,m), (m,i,j) and (j,m,i)
        for key in ((i, j, m, n), (m, i, j, n), (j, m, i, n)):
            s = total.get(key)
            t = v if s is None else s + v
            if t:
                total[key] = t
            elif s is not None:
                del total[key]
    res = {(i + 1, j + 1, m + 1, n + 1): v for (i, j, m, n), v in total.items()}
    return JacobiReport(not res, res)


def mixed_jacobi_check(f: StructureConstants, fd: StructureConstants):
    """Compatibility of a bracket/cobracket pair, checked two independent ways.

    Index form: f_kl^m ft^ij_m = f_mk^i ft^jm_l - f_ml^i ft^jm_k
                               - f_mk^j ft^im_l + f_ml^j ft^im_k
    Matrix form: (Xt^i)^j_l Y^l = -(Xt^j)^T Y^i + Y^j Xt^i - Y^i Xt^j + (Xt^i)^T Y^j
    Both evaluations must agree entry by entry.
    """
    if not f.is_antisymmetric() or not fd.is_antisymmetric():
        raise InputError("structure constants are not antisymmetric")
    if f.dim != fd.dim:
        raise InputError("dimension mismatch")
    d = f.dim
    fnz = f.nonzero()
    gnz = fd.nonzero()
    g_by_upper = {}
    g_by_second = {}
    for (a, b, c, w) in gnz:
        g_by_upper.setdefault(c, []).append((a, b, w))
        g_by_second.setdefault(b, []).append((a, c, w))
    acc = {}

    def bump(key, v):
        s = acc.get(key)
        v = v if s is None else s + v
        if v:
            acc[key] = v
        elif s is not None:
            del acc[key]

    for (k, l, m, v) in fnz:
        for (i, j, w) in g_by_upper.get(m, ()):
            bump((i, j, k, l), v * w)
    for (m, x, i, v) in fnz:
        # -f_mk^i fd^jm_l with x = k, + f_ml^i fd^jm_k with x = l
        for (j, y, w) in g_by_second.get(m, ()):
            bump((i, j, x, y), -v * w)
            bump((i, j, y, x), v * w)
            # +f_mk^j fd^im_l and -f_ml^j fd^im_k (i and j swapped)
            bump((j, i, x, y), v * w)
            bump((j, i, y, x), -v * w)
    res = {(i + 1, j + 1, k + 1, l + 1): v for (i, j, k, l), v in acc.items()}

    # independent matrix-form evaluation; the two residuals must agree
    xt = fd.adjoints()
    ys = [f.y_matrix(k) for k in range(d)]
    xt_t = [rl.transpose(m) for m in xt]
    p1 = [[rl.mat_mul(ys[j], xt[i]) for i in range(d)] for j in range(d)]
    p2 = [[rl.mat_mul(xt_t[i], ys[j]) for j in range(d)] for i in range(d)]
    for i in range(d):
        for j in range(d):
            lhs = rl.zeros(d, d)
            for l in range(d):
                if xt[i][j][l]:
                    lhs = rl.mat_add(lhs, rl.mat_scale(xt[i][j][l], ys[l]))
            rhs = rl.mat_sub(
                rl.mat_add(rl.mat_sub(p1[j][i], p1[i][j]), p2[i][j]), p2[j][i]
            )
            for k in range(d):
                for l in range(d):
                    want = acc.get((i, j, k, l), rl.ZERO)
                    if lhs[k][l] - rhs[k][l] != want:
                        raise AssertionError(
                            "index-form and matrix-form mixed residuals disagree"
                        )
    return JacobiReport(not res, res)


@dataclass
class DoubleAlgebra:
    sc: StructureConstants  # dim 8, ordered basis (X_1..X_4, Xt^1..Xt^4)
    pairing: list  # 8x8 hyperbolic form


def build_double(f: StructureConstants, fd: StructureConstants) -> DoubleAlgebra:
    """Structure constants of g + g* with the mixed bracket
    [X_i, Xt^j] = ft^jk_i X_k + f_ki^j Xt^k and the canonical pairing."""
    if f.dim != fd.dim:
        raise InputError("dimension mismatch")
    if not f.is_antisymmetric() or not fd.is_antisymmetric():
        raise InputError("structure constants are not antisymmetric")
    d = f.dim
    n = 2 * d
    sc = StructureConstants(n)
    for i in range(d):
        for j in range(d):
            for k in range(d):
                sc.f[i][j][k] = f.f[i][j][k]
                sc.f[d + i][d + j][d + k] = fd.f[i][j][k]
    for i in range(d):
        for j in range(d):
            for k in range(d):
                sc.f[i][d + j][k] = fd.f[j][k][i]
                sc.f[d + j][i][k] = -fd.f[j][k][i]
                sc.f[i][d + j][d + k] = f.f[k][i][j]
                sc.f[d + j][i][d + k] = -f.f[k][i][j]
    sc._nonzero = None
    pairing = rl.zeros(n, n)
    for i in range(d):
        pairing[i][d + i] = rl.ONE
        pairing[d + i][i] = rl.ONE
    return DoubleAlgebra(sc, pairing)


def pairing_ad_invariant(dbl: DoubleAlgebra):
    """<[Z,W],V> + <W,[Z,V]> = 0 for all basis triples.

    The canonical pairing couples index m to m +- dim only, so the sum
    collapses to two structure-tensor entries per triple.
    """
    n = dbl.sc.dim
    d = n // 2
    f = dbl.sc.f
    conj = [m + d if m < d else m - d for m in range(n)]
    for z in range(n):
        fz = f[z]
        for w in range(n):
            fzw = fz[w]
            for v in range(n):
                if fzw[conj[v]] + fz[v][conj[w]]:
                    return False
    return True


@dataclass
class CocommutatorTensor:
    """delta(X_i) = d[i][j][k] X_j (x) X_k with d[i][j][k] = ft^jk_i."""

    dim: int
    d: list

    def is_antisymmetric(self):
        n = self.dim
        return all(
            self.d[i][j][k] == -self.d[i][k][j]
            for i in range(n)
            for j in range(n)
            for k in range(n)
        )


def cocommutator(fd: StructureConstants) -> CocommutatorTensor:
    if not fd.is_antisymmetric():
        raise InputError("structure constants are not antisymmetric")
    n = fd.dim
    d = [[[fd.f[j][k][i] for k in range(n)] for j in range(n)] for i in range(n)]
    return CocommutatorTensor(n, d)


def cocommutator_to_dual(t: CocommutatorTensor) -> StructureConstants:
    """Inverse of :func:`cocommutator`."""
    n = t.dim
    sc = StructureConstants(n)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                sc.f[j][k][i] = t.d[i][j][k]
    sc._nonzero = None
    return sc


class TwoFormLA:
    """Antisymmetric 4x4 rational matrix w_ij = w(X_i, X_j)."""

    __slots__ = ("dim", "w")

    def __init__(self, dim, w):
        self.dim = dim
        self.w = w
        for i in range(dim):
            for j in range(dim):
                if w[i][j] != -w[j][i]:
                    raise InputError("two-form is not antisymmetric")

    @classmethod
    def from_pairs(cls, dim, pairs):
        """Build from {(i, j): coeff} (1-based, i < j)."""
        w = rl.zeros(dim, dim)
        for (i, j), c in pairs.items():
            c = _as_frac(c)
            w[i - 1][j - 1] += c
            w[j - 1][i - 1] -= c
        return cls(dim, w)

    def det(self):
        return rl.det(self.w)

    def __repr__(self):
        terms = [
            f"{self.w[i][j]}*e{i+1}^e{j+1}"
            for i in range(self.dim)
            for j in range(i + 1, self.dim)
            if self.w[i][j]
        ]
        return "TwoFormLA(" + (" + ".join(terms) or "0") + ")"


def ce_differential(w: TwoFormLA, f: StructureConstants):
    """(dw)(X_i,X_j,X_k) = -w([X_i,X_j],X_k) + w([X_i,X_k],X_j) - w([X_j,X_k],X_i).

    Returns the fully antisymmetric rank-3 tensor as nested lists.
    """
    d = f.dim
    ww = w.w
    out = [[[rl.ZERO] * d for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(d):
            for k in range(d):
                t = rl.ZERO
                for l in range(d):
                    t -= f.f[i][j][l] * ww[l][k]
                    t += f.f[i][k][l] * ww[l][j]
                    t -= f.f[j][k][l] * ww[l][i]
                out[i][j][k] = t
    return out


def _two_form_basis(dim):
    return list(combinations(range(dim), 2))


def closed_two_forms(f: StructureConstants):
    """Exact kernel basis of w -> dw on the space of two-forms."""
    d = f.dim
    pairs = _two_form_basis(d)
    triples = list(combinations(range(d), 3))
    rows = []
    for (i, j, k) in triples:
        row = []
        for (a, b) in pairs:
            w = rl.zeros(d, d)
            w[a][b] = rl.ONE
            w[b][a] = -rl.ONE
            t = rl.ZERO
            for l in range(d):
                t -= f.f[i][j][l] * w[l][k]
                t += f.f[i][k][l] * w[l][j]
                t -= f.f[j][k][l] * w[l][i]
            row.append(t)
        rows.append(row)
    basis = rl.nullspace(rows) if rows else [
        [rl.ONE if m == n else rl.ZERO for m in range(len(pairs))]
        for n in range(len(pairs))
    ]
    forms = []
    for vec in basis:
        w = rl.zeros(d, d)
        for coeff, (a, b) in zip(vec, pairs):
            w[a][b] = coeff
            w[b][a] = -coeff
        forms.append(TwoFormLA(d, w))
    return forms


@dataclass
class SymplecticReport:
    closed_basis: list
    witness: TwoFormLA
    max_rank: int

    @property
    def found(self):
        return self.witness is not None


def find_symplectic(f: StructureConstants, random_tries=30, seed=0) -> SymplecticReport:
    """Closed two-form basis plus one nondegenerate witness if one exists.

    Search order: coefficient vectors in {1,-1,2,-2,0}^k, then seeded random
    rationals; determinant tested exactly.
    """
    if not jacobi_check(f).passed:
        raise InputError("structure constants fail the Jacobi identity")
    basis = closed_two_forms(f)
    k = len(basis)
    d = f.dim
    max_rank = 0
    if k == 0:
        return SymplecticReport(basis, None, 0)

    def combine(coeffs):
        w = rl.zeros(d, d)
        for c, form in zip(coeffs, basis):
            if c:
                w = rl.mat_add(w, rl.mat_scale(_as_frac(c), form.w))
        return TwoFormLA(d, w)

    from itertools import product

    for coeffs in product([1, -1, 2, -2, 0], repeat=k):
        if not any(coeffs):
            continue
        cand = combine(coeffs)
        if cand.det():
            return SymplecticReport(basis, cand, d)
        max_rank = max(max_rank, rl.rank(cand.w))
    rng = random.Random(seed)
    for _ in range(random_tries):
        coeffs = [Fraction(rng.randint(-12, 12), rng.randint(1, 12)) for _ in range(k)]
        if not any(coeffs):
            continue
        cand = combine(coeffs)
        if cand.det():
            return SymplecticReport(basis, cand, d)
        max_rank = max(max_rank, rl.rank(cand.w))
    return SymplecticReport(basis, None, max_rank)
