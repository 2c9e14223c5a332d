"""Machine-readable table corpus: format, parser, and parameter instantiation.

Line-oriented UTF-8 format.  A block opens with a header keyword at the start
of a line and owns the indented/keyword payload lines that follow:

    algebra NAME [params p1 p2 ...]
      bracket i j -> COEFF k [, COEFF k ...]
      constraint EXPR != EXPR
    bialgebra G DUAL
    rmatrix G DUAL
      r COEFF i wedge|tensor j [; ...]
      rfree p1 [p2 ...]
      schouten zero | schouten COEFF i j k
    poisson G DUAL sklyanin|pi
      pb i j = EXPR
    frame NAME
      xl i = EXPR in d1..d4
      xr i = EXPR in d1..d4
    membership table8|table9
      pair G DUAL
    fixture NAME
      ref KEY = NAME / expr KEY = EXPR / matrix KEY = a b c d ; ... / val KEY = EXPR

Shared payload lines: `source TEXT` (table/row anchor for reports),
`status flagged`, `note TEXT`.  `#` starts a comment.  Expressions follow the
grammar of exprtree.parse_expr (rationals, x1..x4, declared parameters,
+ - * / ^, exp/sin/cos/sinh/cosh, parentheses).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .core import StructureConstants
from .errors import CorpusSyntaxError, InputError
from .exprtree import Expr, parse_expr, to_text
from .rmatrix import TensorElement

DEFAULT_GRID = (Fraction(-2), Fraction(-1, 2), Fraction(1, 3), Fraction(2))
RFREE_GRID = (Fraction(0), Fraction(1))


@dataclass
class Constraint:
    lhs: Expr
    rhs: Expr

    def ok(self, binding):
        try:
            return self.lhs.eval_exact(binding) != self.rhs.eval_exact(binding)
        except Exception:
            return True  # constraints over unbound params never reject

    def text(self):
        return f"{to_text(self.lhs)} != {to_text(self.rhs)}"


@dataclass
class AlgebraEntry:
    name: str
    params: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    brackets: dict = field(default_factory=dict)  # (i, j) -> [(Expr, k)]
    source: str = ""
    status: str = ""
    note: str = ""
    kind: str = "algebra"

    def structure_constants(self, binding=None) -> StructureConstants:
        binding = binding or {}
        missing = [p for p in self.params if p not in binding]
        if missing:
            raise InputError(f"{self.name}: unbound parameters {missing}")
        for c in self.constraints:
            if not c.ok(binding):
                raise InputError(
                    f"{self.name}: binding violates constraint {c.text()}"
                )
        table = {}
        for (i, j), terms in self.brackets.items():
            table[(i, j)] = [(e.eval_exact(binding), k) for (e, k) in terms]
        return StructureConstants.from_brackets(4, table)


@dataclass
class BialgebraEntry:
    g: str
    dual: str
    source: str = ""
    status: str = ""
    note: str = ""
    kind: str = "bialgebra"

    @property
    def name(self):
        return f"({self.g}, {self.dual})"


@dataclass
class RMatrixEntry:
    g: str
    dual: str
    terms: list = field(default_factory=list)  # (Expr, i, j, kind)
    rfree: list = field(default_factory=list)
    schouten_terms: list = None  # None -> zero; else [(Expr, i, j, k)]
    source: str = ""
    status: str = ""
    note: str = ""
    kind: str = "rmatrix"

    @property
    def name(self):
        return f"r({self.g}, {self.dual})"

    def tensor(self, binding) -> TensorElement:
        return TensorElement.from_terms(
            [(e.eval_exact(binding), i, j, knd) for (e, i, j, knd) in self.terms]
        )

    def expected_schouten(self, binding):
        from .rmatrix import rank3_add, wedge3

        if not self.schouten_terms:
            return None
        acc = None
        for (e, i, j, k) in self.schouten_terms:
            t = wedge3(i, j, k, e.eval_exact(binding))
            acc = t if acc is None else rank3_add(acc, t)
        return acc


@dataclass
class PoissonEntry:
    g: str
    dual: str
    method: str  # 'sklyanin' | 'pi'
    brackets: dict = field(default_factory=dict)  # (i, j) -> Expr
    source: str = ""
    status: str = ""
    note: str = ""
    kind: str = "poisson"

    @property
    def name(self):
        return f"pb({self.g}, {self.dual})[{self.method}]"

    def closed_matrix(self, binding):
        """Printed brackets as an antisymmetric 4x4 matrix of ClosedFunction."""
        from .closedfun import ClosedFunction

        m = [[ClosedFunction.zero() for _ in range(4)] for _ in range(4)]
        for (i, j), e in self.brackets.items():
            cf = e.subs_params(binding).to_closed()
            m[i - 1][j - 1] = m[i - 1][j - 1] + cf
            m[j - 1][i - 1] = m[j - 1][i - 1] - cf
        return m


@dataclass
class FrameEntry:
    name: str
    xl: dict = field(default_factory=dict)  # i -> Expr over x's and d1..d4
    xr: dict = field(default_factory=dict)
    source: str = ""
    status: str = ""
    note: str = ""
    kind: str = "frame"

    def components(self, side, i, binding):
        """Field i of side 'L'/'R' as 4 ClosedFunction components."""
        table = self.xl if side == "L" else self.xr
        e = table[i].subs_params(binding)
        comps = []
        zero = {f"d{k}": Fraction(0) for k in range(1, 5)}
        for k in range(1, 5):
            sel = dict(zero)
            sel[f"d{k}"] = Fraction(1)
            comps.append(e.subs_params(sel).to_closed())
        return comps


@dataclass
class MembershipEntry:
    table: str  # 'table8' | 'table9'
    pairs: list = field(default_factory=list)
    source: str = ""
    status: str = ""
    note: str = ""
    kind: str = "membership"

    @property
    def name(self):
        return self.table


@dataclass
class FixtureEntry:
    name: str
    refs: dict = field(default_factory=dict)
    exprs: dict = field(default_factory=dict)
    matrices: dict = field(default_factory=dict)
    vals: dict = field(default_factory=dict)
    source: str = ""
    status: str = ""
    note: str = ""
    kind: str = "fixture"


_BLOCK_KEYWORDS = (
    "algebra",
    "bialgebra",
    "rmatrix",
    "poisson",
    "frame",
    "membership",
    "fixture",
)


def _strip_comment(line):
    out = []
    for ch in line:
        if ch == "#":
            break
        out.append(ch)
    return "".join(out)


def parse(text, filename="<corpus>"):
    """Parse corpus text into a list of entries with location diagnostics."""
    entries = []
    current = None

    def err(msg, lineno, col=None):
        raise CorpusSyntaxError(msg, line=lineno, col=col, filename=filename)

    def close():
        nonlocal current
        if current is not None:
            entries.append(current)
            current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        words = line.split()
        head = words[0]
        if head in _BLOCK_KEYWORDS:
            close()
            current = _open_block(head, words, err, lineno)
            continue
        if current is None:
            err(f"payload line outside any block: {head!r}", lineno)
        _payload_line(current, head, words, line, err, lineno, filename)
    close()
    return entries


def _open_block(head, words, err, lineno):
    if head == "algebra":
        if len(words) < 2:
            err("algebra needs a name", lineno)
        params = []
        if len(words) > 2:
            if words[2] != "params":
                err(f"expected 'params', found {words[2]!r}", lineno)
            params = words[3:]
        return AlgebraEntry(words[1], params=params)
    if head == "bialgebra":
        if len(words) != 3:
            err("bialgebra needs exactly two names", lineno)
        return BialgebraEntry(words[1], words[2])
    if head == "rmatrix":
        if len(words) != 3:
            err("rmatrix needs exactly two names", lineno)
        return RMatrixEntry(words[1], words[2])
    if head == "poisson":
        if len(words) != 4 or words[3] not in ("sklyanin", "pi"):
            err("poisson needs two names and a method (sklyanin|pi)", lineno)
        return PoissonEntry(words[1], words[2], words[3])
    if head == "frame":
        if len(words) != 2:
            err("frame needs a name", lineno)
        return FrameEntry(words[1])
    if head == "membership":
        if len(words) != 2 or words[1] not in ("table8", "table9"):
            err("membership needs table8 or table9", lineno)
        return MembershipEntry(words[1])
    if len(words) != 2:
        err("fixture needs a name", lineno)
    return FixtureEntry(words[1])


def _payload_line(entry, head, words, line, err, lineno, filename):
    if head == "source":
        entry.source = line[len("source") :].strip()
        return
    if head == "status":
        if len(words) != 2 or words[1] != "flagged":
            err("status must be 'flagged'", lineno)
        entry.status = "flagged"
        return
    if head == "note":
        entry.note = line[len("note") :].strip()
        return
    if head == "constraint" and entry.kind == "algebra":
        body = line[len("constraint") :]
        if "!=" not in body:
            err("constraint must be of the form EXPR != EXPR", lineno)
        lhs, rhs = body.split("!=", 1)
        entry.constraints.append(
            Constraint(
                parse_expr(lhs, line=lineno, filename=filename),
                parse_expr(rhs, line=lineno, filename=filename),
            )
        )
        return
    if head == "bracket" and entry.kind == "algebra":
        body = line[len("bracket") :].strip()
        if "->" not in body:
            err("bracket must be 'bracket i j -> coeff k [, coeff k]'", lineno)
        left, right = body.split("->", 1)
        lw = left.split()
        if len(lw) != 2:
            err("bracket needs two basis indices", lineno)
        i, j = _index(lw[0], err, lineno), _index(lw[1], err, lineno)
        terms = []
        for chunk in right.split(","):
            cw = chunk.strip().rsplit(maxsplit=1)
            if len(cw) != 2:
                err(f"bad bracket term {chunk.strip()!r}", lineno)
            terms.append(
                (
                    parse_expr(cw[0], line=lineno, filename=filename),
                    _index(cw[1], err, lineno),
                )
            )
        key = (i, j)
        if key in entry.brackets:
            err(f"duplicate bracket {key}", lineno)
        entry.brackets[key] = terms
        return
    if head == "r" and entry.kind == "rmatrix":
        body = line[1:].strip()
        for chunk in body.split(";"):
            cw = chunk.strip().rsplit(maxsplit=3)
            if len(cw) != 4 or cw[2] not in ("wedge", "tensor"):
                err(f"bad r term {chunk.strip()!r}", lineno)
            entry.terms.append(
                (
                    parse_expr(cw[0], line=lineno, filename=filename),
                    _index(cw[1], err, lineno),
                    _index(cw[3], err, lineno),
                    cw[2],
                )
            )
        return
    if head == "rfree" and entry.kind == "rmatrix":
        entry.rfree.extend(words[1:])
        return
    if head == "schouten" and entry.kind == "rmatrix":
        if words[1:] == ["zero"]:
            entry.schouten_terms = None
            return
        body = line[len("schouten") :].strip()
        entry.schouten_terms = entry.schouten_terms or []
        for chunk in body.split(";"):
            cw = chunk.strip().rsplit(maxsplit=3)
            if len(cw) != 4:
                err(f"bad schouten term {chunk.strip()!r}", lineno)
            entry.schouten_terms.append(
                (
                    parse_expr(cw[0], line=lineno, filename=filename),
                    _index(cw[1], err, lineno),
                    _index(cw[2], err, lineno),
                    _index(cw[3], err, lineno),
                )
            )
        return
    if head == "pb" and entry.kind == "poisson":
        body = line[len("pb") :].strip()
        if "=" not in body:
            err("pb must be 'pb i j = EXPR'", lineno)
        left, right = body.split("=", 1)
        lw = left.split()
        if len(lw) != 2:
            err("pb needs two coordinate indices", lineno)
        key = (_index(lw[0], err, lineno), _index(lw[1], err, lineno))
        if key in entry.brackets:
            err(f"duplicate pb {key}", lineno)
        entry.brackets[key] = parse_expr(right, line=lineno, filename=filename)
        return
    if head in ("xl", "xr") and entry.kind == "frame":
        body = line[2:].strip()
        if "=" not in body:
            err(f"{head} must be '{head} i = EXPR'", lineno)
        left, right = body.split("=", 1)
        i = _index(left.strip(), err, lineno)
        table = entry.xl if head == "xl" else entry.xr
        if i in table:
            err(f"duplicate {head} {i}", lineno)
        table[i] = parse_expr(right, line=lineno, filename=filename)
        return
    if head == "pair" and entry.kind == "membership":
        if len(words) != 3:
            err("pair needs two names", lineno)
        entry.pairs.append((words[1], words[2]))
        return
    if entry.kind == "fixture" and head in ("ref", "expr", "matrix", "val"):
        body = line[len(head) :].strip()
        if "=" not in body:
            err(f"{head} must be '{head} KEY = ...'", lineno)
        key, rhs = (s.strip() for s in body.split("=", 1))
        if head == "ref":
            entry.refs[key] = rhs
        elif head == "expr":
            entry.exprs[key] = parse_expr(rhs, line=lineno, filename=filename)
        elif head == "val":
            entry.vals[key] = parse_expr(rhs, line=lineno, filename=filename)
        else:
            rows = []
            for rtext in rhs.split(";"):
                rows.append(
                    [
                        parse_expr(cell, line=lineno, filename=filename)
                        for cell in rtext.split()
                    ]
                )
            if any(len(r) != len(rows[0]) for r in rows):
                err("matrix rows have unequal lengths", lineno)
            entry.matrices[key] = rows
        return
    err(f"unknown payload keyword {head!r} in {entry.kind} block", lineno)


def _index(tok, err, lineno):
    try:
        v = int(tok)
    except ValueError:
        err(f"expected a basis index, found {tok!r}", lineno)
    if not 1 <= v <= 8:
        err(f"basis index {v} out of range", lineno)
    return v


def validate_references(entries):
    """Cross-entry name resolution (run after all corpus files are merged)."""
    algebras = {e.name for e in entries if e.kind == "algebra"}
    for e in entries:
        refs = []
        if e.kind in ("bialgebra", "rmatrix", "poisson"):
            refs = [e.g, e.dual]
        elif e.kind == "frame":
            refs = [e.name]
        elif e.kind == "membership":
            refs = [n for pair in e.pairs for n in pair]
        for n in refs:
            if n not in algebras:
                raise CorpusSyntaxError(
                    f"unresolved algebra name {n!r} in {e.kind} block {getattr(e, 'name', '')}"
                )


# --------------------------------------------------------------------------
# serialization (canonical, re-parseable)
# --------------------------------------------------------------------------


def _tail(entry):
    out = []
    if entry.source:
        out.append(f"  source {entry.source}")
    if entry.status:
        out.append(f"  status {entry.status}")
    if entry.note:
        out.append(f"  note {entry.note}")
    return out


def serialize(entries):
    lines = []
    for e in entries:
        if e.kind == "algebra":
            head = f"algebra {e.name}"
            if e.params:
                head += " params " + " ".join(e.params)
            lines.append(head)
            for c in e.constraints:
                lines.append(f"  constraint {c.text()}")
            for (i, j) in sorted(e.brackets):
                terms = ", ".join(
                    f"{to_text(expr)} {k}" for (expr, k) in e.brackets[(i, j)]
                )
                lines.append(f"  bracket {i} {j} -> {terms}")
        elif e.kind == "bialgebra":
            lines.append(f"bialgebra {e.g} {e.dual}")
        elif e.kind == "rmatrix":
            lines.append(f"rmatrix {e.g} {e.dual}")
            body = " ; ".join(
                f"{to_text(expr)} {i} {knd} {j}" for (expr, i, j, knd) in e.terms
            )
            lines.append(f"  r {body}")
            if e.rfree:
                lines.append("  rfree " + " ".join(e.rfree))
            if e.schouten_terms is None:
                lines.append("  schouten zero")
            else:
                body = " ; ".join(
                    f"{to_text(expr)} {i} {j} {k}"
                    for (expr, i, j, k) in e.schouten_terms
                )
                lines.append(f"  schouten {body}")
        elif e.kind == "poisson":
            lines.append(f"poisson {e.g} {e.dual} {e.method}")
            for (i, j) in sorted(e.brackets):
                lines.append(f"  pb {i} {j} = {to_text(e.brackets[(i, j)])}")
        elif e.kind == "frame":
            lines.append(f"frame {e.name}")
            for i in sorted(e.xl):
                lines.append(f"  xl {i} = {to_text(e.xl[i])}")
            for i in sorted(e.xr):
                lines.append(f"  xr {i} = {to_text(e.xr[i])}")
        elif e.kind == "membership":
            lines.append(f"membership {e.table}")
            for (g, dual) in e.pairs:
                lines.append(f"  pair {g} {dual}")
        else:
            lines.append(f"fixture {e.name}")
            for k in sorted(e.refs):
                lines.append(f"  ref {k} = {e.refs[k]}")
            for k in sorted(e.vals):
                lines.append(f"  val {k} = {to_text(e.vals[k])}")
            for k in sorted(e.exprs):
                lines.append(f"  expr {k} = {to_text(e.exprs[k])}")
            for k in sorted(e.matrices):
                body = " ; ".join(
                    " ".join(to_text(c) for c in row) for row in e.matrices[k]
                )
                lines.append(f"  matrix {k} = {body}")
        lines.extend(_tail(e))
        lines.append("")
    return "\n".join(lines)


# --------------------------------------------------------------------------
# registry and instantiation
# --------------------------------------------------------------------------


class Corpus:
    """Indexed view over a list of parsed entries."""

    def __init__(self, entries):
        validate_references(entries)
        self.entries = entries
        self.algebras = {}
        self.bialgebras = []
        self.rmatrices = {}
        self.poisson = []
        self.frames = {}
        self.memberships = {}
        self.fixtures = {}
        for e in entries:
            if e.kind == "algebra":
                if e.name in self.algebras:
                    raise InputError(f"duplicate algebra {e.name}")
                self.algebras[e.name] = e
            elif e.kind == "bialgebra":
                self.bialgebras.append(e)
            elif e.kind == "rmatrix":
                self.rmatrices[(e.g, e.dual)] = e
            elif e.kind == "poisson":
                self.poisson.append(e)
            elif e.kind == "frame":
                self.frames[e.name] = e
            elif e.kind == "membership":
                self.memberships[e.table] = e
            else:
                self.fixtures[e.name] = e

    def algebra(self, name) -> AlgebraEntry:
        if name not in self.algebras:
            raise InputError(f"unknown algebra {name!r}")
        return self.algebras[name]

    def pair_params(self, g, dual):
        return sorted(set(self.algebra(g).params) | set(self.algebra(dual).params))

    def pair_constraints(self, g, dual):
        return self.algebra(g).constraints + self.algebra(dual).constraints

    def grid_bindings(self, g, dual=None, grid=DEFAULT_GRID, cap=None):
        """Cartesian grid over the pair's parameters filtered by constraints.

        Entries without parameters yield the single empty binding.
        """
        from itertools import product

        params = (
            self.pair_params(g, dual) if dual is not None else self.algebra(g).params
        )
        params = sorted(set(params))
        constraints = (
            self.pair_constraints(g, dual)
            if dual is not None
            else self.algebra(g).constraints
        )
        if not params:
            return [{}]
        out = []
        for combo in product(grid, repeat=len(params)):
            binding = dict(zip(params, combo))
            if all(c.ok(binding) for c in constraints):
                out.append(binding)
                if cap is not None and len(out) >= cap:
                    break
        return out

    def instantiate(self, name, binding=None) -> StructureConstants:
        return self.algebra(name).structure_constants(binding)


def to_json(entries):
    """JSON-ready structure for the parsed corpus (expressions as text)."""
    out = []
    for e in entries:
        rec = {"kind": e.kind, "source": e.source, "status": e.status, "note": e.note}
        if e.kind == "algebra":
            rec["name"] = e.name
            rec["params"] = list(e.params)
            rec["constraints"] = [c.text() for c in e.constraints]
            rec["brackets"] = {
                f"{i},{j}": [[to_text(expr), k] for (expr, k) in terms]
                for (i, j), terms in sorted(e.brackets.items())
            }
        elif e.kind == "bialgebra":
            rec["g"], rec["dual"] = e.g, e.dual
        elif e.kind == "rmatrix":
            rec["g"], rec["dual"] = e.g, e.dual
            rec["terms"] = [
                [to_text(expr), i, knd, j] for (expr, i, j, knd) in e.terms
            ]
            rec["rfree"] = list(e.rfree)
            rec["schouten"] = (
                None
                if e.schouten_terms is None
                else [[to_text(expr), i, j, k] for (expr, i, j, k) in e.schouten_terms]
            )
        elif e.kind == "poisson":
            rec["g"], rec["dual"], rec["method"] = e.g, e.dual, e.method
            rec["brackets"] = {
                f"{i},{j}": to_text(expr) for (i, j), expr in sorted(e.brackets.items())
            }
        elif e.kind == "frame":
            rec["name"] = e.name
            rec["xl"] = {str(i): to_text(x) for i, x in sorted(e.xl.items())}
            rec["xr"] = {str(i): to_text(x) for i, x in sorted(e.xr.items())}
        elif e.kind == "membership":
            rec["table"] = e.table
            rec["pairs"] = [list(p) for p in e.pairs]
        else:
            rec["name"] = e.name
            rec["refs"] = dict(e.refs)
            rec["vals"] = {k: to_text(v) for k, v in sorted(e.vals.items())}
            rec["exprs"] = {k: to_text(v) for k, v in sorted(e.exprs.items())}
            rec["matrices"] = {
                k: [[to_text(c) for c in row] for row in m]
                for k, m in sorted(e.matrices.items())
            }
        out.append(rec)
    return out


def load(paths=None) -> Corpus:
    """Load a corpus from explicit files, a directory, or the packaged data."""
    import os

    if paths is None:
        entries = []
        pkg = resources.files("liebialg").joinpath("data")
        for item in sorted(pkg.iterdir(), key=lambda p: p.name):
            if item.name.endswith(".txt"):
                entries.extend(parse(item.read_text("utf-8"), filename=item.name))
        return Corpus(entries)
    if isinstance(paths, (str, bytes)) and os.path.isdir(paths):
        files = sorted(
            os.path.join(paths, n) for n in os.listdir(paths) if n.endswith(".txt")
        )
        paths = files
    elif isinstance(paths, (str, bytes)):
        paths = [paths]
    entries = []
    for p in paths:
        with open(p, "r", encoding="utf-8") as fh:
            entries.extend(parse(fh.read(), filename=os.path.basename(p)))
    return Corpus(entries)
