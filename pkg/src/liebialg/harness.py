"""Verification campaigns over the corpus: one function per reference table.

Entry outcomes are pass / fail / flagged.  A flagged outcome records a
discrepancy between a derived object and the printed corpus payload on an
entry marked `status flagged`; it never fails a run.  Mathematical defects
(Jacobi failures, missing r-matrices, broken linearizations) always fail.
"""

from dataclasses import dataclass, field, asdict
from fractions import Fraction
import time

from itertools import product

from . import corpus as corpus_mod
from .core import (
    build_double,
    find_symplectic,
    jacobi_check,
    mixed_jacobi_check,
    pairing_ad_invariant,
)
from .closedfun import cfm_eq
from .errors import InputError
from .groupgeom import (
    GroupChart,
    blocks_pairing_residual,
    double_adjoint,
    frame_bracket_residuals,
    invariant_frame,
)
from .poisson import (
    linearization_check,
    pi_bivector,
    poisson_jacobi_check,
    sklyanin_bivector,
    symplectic_classify,
)
from .render import render_closed_function
from .rmatrix import (
    classify_r,
    generates_cocommutator,
    rank3_eq,
    solve_coboundary,
)

# rows that must match the printed payload exactly (not merely match-or-flag)
FRAME_SPOT_CHECKS = (
    ("A_4_1", {}),
    ("A_4_2_m1", {}),
    ("A_4_7", {}),
    ("A_4_9_0", {}),
    ("A_4_11_b", {"b": Fraction(1)}),
    ("VI0+R", {}),
    ("VII0+R", {}),
    ("A_4_12", {}),
)

DESIGNATED_POISSON_ROWS = (
    ("A_4_7", "A_4_7.i"),
    ("A_4_9_m12", "A_4_9_1.ii"),
    ("A_4_1", "A_4_1.i"),
    ("A_4_3", "A2+A2.i"),
    ("A_4_1", "II+R.i"),
    ("A_4_1", "II+R.iv"),
    ("A_4_2_m1", "A_4_2_m1.i"),
    ("A_4_3", "A_4_3.ii"),
    ("A_4_5_m1_m1", "A_4_5_m1_m1.i"),
    ("A_4_5_m1_b", "A_4_5_m1_b.i"),
    ("A_4_6_a_0", "II+R.ii"),
    ("A_4_9_0", "A_4_9_0.iv"),
    ("A_4_9_m12", "A_4_9_m12.iii"),
    ("A_4_9_1", "A_4_9_1.i"),
    ("A_4_9_b", "A_4_9_b.i"),
    ("A_4_12", "A_4_12.ii"),
    ("A2+A2", "A2+A2.v"),
    ("VI0+R", "II+R.xiv"),
    ("VII0+R", "II+R.xiv"),
    ("III+R", "III+R.xiii"),
    ("A_4_1", "A_4_9_0.i"),
    ("A_4_12", "A_4_12.i"),
    ("II+R.iv", "A_4_7"),
    ("A_4_7.i", "A_4_7"),
)


@dataclass
class Discrepancy:
    entry: str
    field: str
    expected: str
    derived: str

    def as_json(self):
        return asdict(self)


@dataclass
class EntryResult:
    entry: str
    status: str  # 'pass' | 'fail' | 'flagged'
    detail: str = ""
    discrepancies: list = field(default_factory=list)
    seconds: float = 0.0


@dataclass
class RunReport:
    table: str
    results: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def failed(self):
        return [r for r in self.results if r.status == "fail"]

    @property
    def flagged(self):
        return [r for r in self.results if r.status == "flagged"]

    @property
    def ok(self):
        return not self.failed

    def counts(self):
        n = {"pass": 0, "fail": 0, "flagged": 0}
        for r in self.results:
            n[r.status] += 1
        return n


class Workbench:
    """Caches frames and adjoint blocks across verification passes."""

    def __init__(self, reg: "corpus_mod.Corpus"):
        self.reg = reg
        self._frames = {}
        self._blocks = {}

    @staticmethod
    def _key(name, binding):
        return (name, tuple(sorted(binding.items())))

    def frame(self, name, binding):
        k = self._key(name, binding)
        if k not in self._frames:
            sc = self.reg.instantiate(name, binding)
            self._frames[k] = invariant_frame(GroupChart(sc))
        return self._frames[k]

    def blocks(self, g, dual, binding):
        k = (self._key(g, binding), dual)
        if k not in self._blocks:
            f = self.reg.instantiate(g, binding)
            fd = self.reg.instantiate(dual, binding)
            self._blocks[k] = double_adjoint(f, fd)
        return self._blocks[k]

    def bivector(self, g, dual, method, binding):
        f = self.reg.instantiate(g, binding)
        fd = self.reg.instantiate(dual, binding)
        if method == "sklyanin":
            sol = solve_coboundary(f, fd)
            if sol.empty:
                raise InputError(f"({g}, {dual}) admits no r-matrix")
            return sklyanin_bivector(
                self.frame(g, binding), sol.particular.antisymmetric_part(), f
            )
        return pi_bivector(self.blocks(g, dual, binding), self.frame(g, binding), f)

    def bivector_any(self, g, dual, binding):
        """Sklyanin when an r-matrix row exists for the pair, else the
        adjoint-block construction."""
        if (g, dual) in self.reg.rmatrices:
            return self.bivector(g, dual, "sklyanin", binding)
        return self.bivector(g, dual, "pi", binding)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.time()
        rep = fn(*args, **kwargs)
        rep.seconds = time.time() - t0
        return rep

    return wrapper


@_timed
def verify_table1(reg, seed=0):
    """Base algebras: Jacobi identity and a nondegenerate closed two-form."""
    rep = RunReport("table1")
    for name, entry in sorted(reg.algebras.items()):
        if "." in name or name == "4A_1":
            continue  # dual variants are exercised through tables 2-9
        t0 = time.time()
        status, detail = "pass", ""
        for b in reg.grid_bindings(name):
            sc = entry.structure_constants(b)
            if not jacobi_check(sc).passed:
                status, detail = "fail", f"Jacobi fails at {b}"
                break
            sym = find_symplectic(sc, seed=seed)
            if not sym.found:
                status, detail = "fail", f"no symplectic form at {b} (rank {sym.max_rank})"
                break
        rep.results.append(EntryResult(name, status, detail, seconds=time.time() - t0))
    return rep


@_timed
def verify_table2(reg, seed=0):
    """Bracket/cobracket pairs: mixed Jacobi and the double's Jacobi identity."""
    rep = RunReport("table2")
    for be in reg.bialgebras:
        t0 = time.time()
        status, detail = "pass", ""
        for b in reg.grid_bindings(be.g, be.dual):
            f = reg.instantiate(be.g, b)
            fd = reg.instantiate(be.dual, b)
            if not mixed_jacobi_check(f, fd).passed:
                status, detail = "fail", f"mixed Jacobi fails at {b}"
                break
            dbl = build_double(f, fd)
            if not jacobi_check(dbl.sc).passed:
                status, detail = "fail", f"double Jacobi fails at {b}"
                break
            if not pairing_ad_invariant(dbl):
                status, detail = "fail", f"pairing not ad-invariant at {b}"
                break
        res = EntryResult(be.name, status, detail, seconds=time.time() - t0)
        if status == "pass" and be.status == "flagged":
            res.status = "flagged"
            res.detail = be.note
        rep.results.append(res)
    return rep


@_timed
def verify_table34(reg, seed=0):
    """r-matrix rows: membership, classification, and dual-direction solves."""
    rep = RunReport("table34")
    for (g, dual), e in sorted(reg.rmatrices.items()):
        t0 = time.time()
        status, detail = "pass", ""
        discrepancies = []
        for b in reg.grid_bindings(g, dual, cap=2):
            f = reg.instantiate(g, b)
            fd = reg.instantiate(dual, b)
            sol = solve_coboundary(f, fd)
            if sol.empty:
                status, detail = "fail", f"defining system inconsistent at {b}"
                break
            if solve_coboundary(fd, f).empty and (dual, g) in reg.rmatrices:
                status, detail = "fail", f"dual-direction system inconsistent at {b}"
                break
            for combo in product(corpus_mod.RFREE_GRID, repeat=len(e.rfree)):
                bb = dict(b)
                bb.update(dict(zip(e.rfree, combo)))
                r = e.tensor(bb)
                if not generates_cocommutator(r, f, fd):
                    status, detail = "fail", f"printed r not in the solution set at {bb}"
                    break
                cl = classify_r(r, f)
                expected = e.expected_schouten(bb)
                if expected is None:
                    if cl.kind != "triangular":
                        status, detail = "fail", f"expected triangular, got {cl.kind} ({cl.violation})"
                        break
                else:
                    if not rank3_eq(cl.schouten, expected):
                        status, detail = "fail", "[[r,r]] differs from the printed certificate"
                        break
                    if cl.kind != "quasitriangular":
                        status, detail = "fail", f"nonzero [[r,r]] not quasi-triangular: {cl.violation}"
                        break
            if status != "pass":
                break
        res = EntryResult(e.name, status, detail, discrepancies, time.time() - t0)
        if status == "pass" and e.status == "flagged":
            res.status = "flagged"
            res.detail = e.note
        rep.results.append(res)
    return rep


def _compare_frame(reg, bench, name, binding):
    fe = reg.frames[name]
    fr = bench.frame(name, binding)
    out = []
    for side, derived in (("L", fr.XL), ("R", fr.XR)):
        for i in range(1, 5):
            stored = fe.components(side, i, binding)
            for k in range(4):
                if stored[k] != derived[i - 1][k]:
                    out.append(
                        Discrepancy(
                            f"frame {name}",
                            f"X{side}_{i} d{k+1} at {binding or 'no params'}",
                            render_closed_function(stored[k]),
                            render_closed_function(derived[i - 1][k]),
                        )
                    )
    return out


@_timed
def verify_table5(reg, bench=None, seed=0):
    """Frames: printed payload comparison plus the structural bracket relations."""
    bench = bench or Workbench(reg)
    rep = RunReport("table5")
    for name, fe in sorted(reg.frames.items()):
        t0 = time.time()
        bindings = reg.grid_bindings(name, cap=1)
        status, detail = "pass", ""
        discrepancies = []
        for b in bindings:
            discrepancies.extend(_compare_frame(reg, bench, name, b))
            f = reg.instantiate(name, b)
            bad = frame_bracket_residuals(bench.frame(name, b), f)
            if bad:
                status, detail = "fail", f"frame bracket relations fail: {bad[:3]}"
                break
        if status == "pass" and discrepancies:
            if fe.status == "flagged":
                status = "flagged"
                detail = fe.note
            else:
                status, detail = "fail", "printed frame differs from the derivation"
        rep.results.append(
            EntryResult(f"frame {name}", status, detail, discrepancies, time.time() - t0)
        )
    # spot-check set: exact match mandatory except the recorded flagged slot
    for name, binding in FRAME_SPOT_CHECKS:
        t0 = time.time()
        disc = _compare_frame(reg, bench, name, binding)
        allowed = [d for d in disc if "x3^3" in d.expected]
        status = "pass" if len(disc) == len(allowed) else "fail"
        detail = "" if status == "pass" else f"{len(disc)-len(allowed)} unexpected mismatches"
        if name == "A_4_11_b" and not allowed:
            status, detail = "fail", "expected flagged x3^3 discrepancy was not reported"
        rep.results.append(
            EntryResult(f"frame-spot {name}", status, detail, disc, time.time() - t0)
        )
    return rep


@_timed
def verify_table67(reg, bench=None, seed=0):
    """Bivectors: derivation, Jacobi, linearization, method agreement, and
    comparison against the printed brackets."""
    bench = bench or Workbench(reg)
    rep = RunReport("table67")
    for pe in reg.poisson:
        t0 = time.time()
        status, detail = "pass", ""
        discrepancies = []
        for b in reg.grid_bindings(pe.g, pe.dual, cap=1):
            try:
                P = bench.bivector(pe.g, pe.dual, pe.method, b)
            except InputError as ex:
                status, detail = "fail", str(ex)
                break
            fd = reg.instantiate(pe.dual, b)
            if not poisson_jacobi_check(P).passed:
                status, detail = "fail", f"Poisson Jacobi fails at {b}"
                break
            if not linearization_check(P, fd):
                status, detail = "fail", f"linearization mismatch at {b}"
                break
            if (pe.g, pe.dual) in reg.rmatrices:
                P2 = bench.bivector(pe.g, pe.dual, "pi", b)
                if not cfm_eq(P.P, P2.P):
                    status, detail = "fail", f"Sklyanin and adjoint-block bivectors differ at {b}"
                    break
            printed = pe.closed_matrix(b)
            for i in range(4):
                for j in range(i + 1, 4):
                    if printed[i][j] != P.P[i][j]:
                        discrepancies.append(
                            Discrepancy(
                                pe.name,
                                f"{{x{i+1},x{j+1}}} at {b or 'no params'}",
                                render_closed_function(printed[i][j]),
                                render_closed_function(P.P[i][j]),
                            )
                        )
        if status == "pass" and discrepancies:
            if pe.status == "flagged":
                status, detail = "flagged", pe.note
            elif (pe.g, pe.dual) in DESIGNATED_POISSON_ROWS:
                status, detail = "fail", "designated row differs from the printed brackets"
            else:
                status, detail = "fail", "printed brackets differ from the derivation"
        if status != "fail":
            # whether non-membership rows are genuinely degenerate is not
            # stated anywhere, so the computed rank is always reported
            cl = symplectic_classify(P, seed=seed)
            rank = 4 if cl.symplectic else cl.max_rank
            detail = f"{detail} [rank {rank}]".strip() if detail else f"rank {rank}"
        rep.results.append(
            EntryResult(pe.name, status, detail, discrepancies, time.time() - t0)
        )
    return rep


@_timed
def verify_table89(reg, bench=None, seed=0):
    """Invertibility of the bivectors named in the membership tables."""
    bench = bench or Workbench(reg)
    rep = RunReport("table89")
    for table in ("table8", "table9"):
        entry = reg.memberships.get(table)
        if entry is None:
            continue
        for (g, dual) in entry.pairs:
            t0 = time.time()
            status, detail = "pass", ""
            for b in reg.grid_bindings(g, dual, cap=1):
                P = bench.bivector_any(g, dual, b)
                cl = symplectic_classify(P, seed=seed)
                if not cl.symplectic:
                    status, detail = "fail", f"degenerate at {b} (rank {cl.max_rank})"
                    break
                if cl.closed_ok is False:
                    status, detail = "fail", f"inverse two-form not closed at {b}"
                    break
                if table == "table8":
                    P2 = bench.bivector_any(dual, g, b)
                    cl2 = symplectic_classify(P2, seed=seed)
                    if not cl2.symplectic:
                        status, detail = "fail", f"swapped pair degenerate at {b}"
                        break
            rep.results.append(
                EntryResult(f"{table} ({g}, {dual})", status, detail, seconds=time.time() - t0)
            )
    return rep


@_timed
def verify_integrable(reg, seed=0, flow=True):
    """Darboux form, symmetry closure, Leibniz, and conservation under flow."""
    from .integrable import (
        closure_check,
        darboux_check,
        flow_conserve,
        leibniz_check,
        load_example,
    )

    rep = RunReport("integrable")
    for ex_id in (1, 2):
        t0 = time.time()
        ex = load_example(reg, ex_id)
        status, detail = "pass", ""
        dar = darboux_check(ex, seed=seed)
        if not dar.passed:
            status, detail = "fail", f"Darboux residual {dar.max_residual:.2e}"
        clo = closure_check(ex, seed=seed)
        if status == "pass" and not clo.passed:
            status, detail = "fail", f"closure residual {clo.max_residual:.2e}"
        lei_ok, lei = leibniz_check(ex, seed=seed)
        if status == "pass" and not lei_ok:
            status, detail = "fail", f"Leibniz residual {lei:.2e}"
        if status == "pass" and flow:
            fl = flow_conserve(ex, hamiltonian=2)
            drift = fl.max_drift()
            if drift > 1e-6:
                status, detail = "fail", f"conserved drift {drift:.2e}"
        rep.results.append(
            EntryResult(f"example {ex_id}", status, detail, seconds=time.time() - t0)
        )
    return rep


TABLES = {
    "1": verify_table1,
    "2": verify_table2,
    "3": verify_table34,
    "4": verify_table34,
    "5": verify_table5,
    "6": verify_table67,
    "7": verify_table67,
    "8": verify_table89,
    "9": verify_table89,
    "integrable": verify_integrable,
}


def _campaign_order(selector):
    if selector in ("all", None):
        keys = ["1", "2", "3", "5", "6", "8", "integrable"]
    else:
        keys = [k.strip() for k in selector.replace("-", ",").split(",") if k.strip()]
    fns = []
    for k in keys:
        fn = TABLES.get(k)
        if fn is None:
            raise InputError(f"unknown table selector {k!r}")
        if fn not in fns:
            fns.append(fn)
    return fns


def _run_campaign(fn, reg, bench, seed):
    if fn in (verify_table5, verify_table67, verify_table89):
        return fn(reg, bench, seed=seed)
    return fn(reg, seed=seed)


def _run_campaign_pickled(args):
    selector, seed, corpus_paths = args
    reg = corpus_mod.load(corpus_paths)
    fn = _campaign_order(selector)[0]
    return _run_campaign(fn, reg, Workbench(reg), seed)


_SELECTOR_OF = {
    verify_table1: "1",
    verify_table2: "2",
    verify_table34: "3",
    verify_table5: "5",
    verify_table67: "6",
    verify_table89: "8",
    verify_integrable: "integrable",
}


def verify_tables(reg, selector="all", seed=0, jobs=1, corpus_paths=None):
    """Run the campaigns named by selector ('all', '1', '3-4', 'integrable', ...).

    With jobs > 1 the campaigns run in worker processes (each reloads the
    corpus from corpus_paths); the report order always follows the selector.
    """
    fns = _campaign_order(selector)
    if jobs and jobs > 1 and len(fns) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(jobs, len(fns))) as pool:
            return list(
                pool.map(
                    _run_campaign_pickled,
                    [(_SELECTOR_OF[fn], seed, corpus_paths) for fn in fns],
                )
            )
    bench = Workbench(reg)
    return [_run_campaign(fn, reg, bench, seed) for fn in fns]
