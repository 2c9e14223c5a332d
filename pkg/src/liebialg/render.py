"""Canonical text rendering of real closed functions.

The output re-parses (through exprtree.parse_expr / to_closed) to the exact
same term map: complex-exponential conjugate pairs are folded back into
cos/sin with rational coefficients, so the round trip is bit-exact.
"""

from fractions import Fraction

from .errors import InputError

_Z4 = (0, 0, 0, 0)


def _frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _linear_text(coeffs) -> str:
    """sum coeffs[i] * x_i as text; coeffs is {0-based index: Fraction}."""
    parts = []
    for i in sorted(coeffs):
        q = coeffs[i]
        if not q:
            continue
        mag = abs(q)
        body = f"x{i+1}" if mag == 1 else f"{_frac(mag)}*x{i+1}"
        if not parts:
            parts.append(body if q > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if q > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


def _mono_factors(k):
    out = []
    for i, p in enumerate(k):
        if p == 1:
            out.append(f"x{i+1}")
        elif p:
            out.append(f"x{i+1}^{p}")
    return out


def _sort_key(item):
    (k, z), _ = item
    return (k, tuple((q.re, q.im) for q in z))


def render_closed_function(f) -> str:
    """Canonical representation of a real ClosedFunction."""
    if not f.terms:
        return "0"
    if not f.is_real():
        raise InputError("only real closed functions have a text form")
    pieces = []  # (coefficient Fraction, [factor strings])
    seen = set()
    for (k, z), c in sorted(f.terms.items(), key=_sort_key):
        if (k, z) in seen:
            continue
        alpha = {i: z[i].re for i in range(4) if z[i].re}
        beta = {i: z[i].im for i in range(4) if z[i].im}
        factors = _mono_factors(k)
        if alpha:
            factors.append(f"exp({_linear_text(alpha)})")
        if not beta:
            if c.im:
                raise InputError("real function has a stray imaginary coefficient")
            pieces.append((c.re, factors))
            seen.add((k, z))
            continue
        # fold the conjugate pair into cos/sin; keep the representative with
        # positive leading imaginary rate
        first = min(beta)
        if beta[first] < 0:
            continue
        zbar = tuple(q.conjugate() for q in z)
        cbar = f.terms.get((k, zbar))
        if cbar is None or cbar != c.conjugate():
            raise InputError("real function lacks a conjugate term")
        seen.add((k, z))
        seen.add((k, zbar))
        u, v = c.re, c.im
        arg = _linear_text(beta)
        if u:
            pieces.append((2 * u, factors + [f"cos({arg})"]))
        if v:
            pieces.append((-2 * v, factors + [f"sin({arg})"]))
    out = []
    for q, factors in pieces:
        mag = abs(q)
        if factors:
            body = "*".join(factors) if mag == 1 else "*".join([_frac(mag)] + factors)
        else:
            body = _frac(mag)
        if not out:
            out.append(body if q > 0 else f"-{body}")
        else:
            out.append(f"+ {body}" if q > 0 else f"- {body}")
    return " ".join(out) if out else "0"
