"""Sparse multivariate Laurent polynomials, rational functions of them,
antisymmetric (wedge) algebra, and the handful of exact series / linear
algebra primitives the rest of the library is built on.

Coefficients live in one of the :mod:`sgff.scalars` domains; every operation
is exact in exact domains and precision-faithful in the complex one.
Exponent vectors are stored sparsely and may be negative.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction

from .errors import DomainError, PreconditionError, TruncationError
from .scalars import QQ


class LaurentPoly:
    """A Laurent polynomial: map from integer exponent vectors to coefficients.

    Instances are immutable by convention.  Binary operations align variable
    sets automatically, so polynomials built over different contexts combine
    freely as long as they share the coefficient domain.
    """

    __slots__ = ("dom", "vars", "terms")

    def __init__(self, dom, vars, terms):
        self.dom = dom
        self.vars = tuple(vars)
        self.terms = terms  # dict[tuple[int, ...], coeff], no zero values

    # construction -----------------------------------------------------------
    @staticmethod
    def const(dom, c, vars=()):
        c = c if not isinstance(c, (int, Fraction)) else dom.of(c)
        if dom.is_zero(c):
            return LaurentPoly(dom, vars, {})
        return LaurentPoly(dom, vars, {(0,) * len(vars): c})

    @staticmethod
    def zero(dom, vars=()):
        return LaurentPoly(dom, vars, {})

    @staticmethod
    def var(dom, name, power=1):
        return LaurentPoly(dom, (name,), {(power,): dom.one})

    @staticmethod
    def monomial(dom, c, exps: dict):
        c = c if not isinstance(c, (int, Fraction)) else dom.of(c)
        names = tuple(exps)
        if dom.is_zero(c):
            return LaurentPoly(dom, names, {})
        return LaurentPoly(dom, names, {tuple(exps[v] for v in names): c})

    # bookkeeping --------------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def with_vars(self, vars):
        """Re-embed into the variable tuple ``vars`` (a superset)."""
        vars = tuple(vars)
        if vars == self.vars:
            return self
        idx = []
        for v in self.vars:
            if v not in vars:
                raise DomainError(f"variable {v} missing from target context")
            idx.append(vars.index(v))
        nterms = {}
        for exps, c in self.terms.items():
            key = [0] * len(vars)
            for i, e in zip(idx, exps):
                key[i] = e
            nterms[tuple(key)] = c
        return LaurentPoly(self.dom, vars, nterms)

    def _aligned(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(self.dom, other, self.vars)
        if self.vars == other.vars:
            return self, other
        vars = tuple(dict.fromkeys(self.vars + other.vars))
        return self.with_vars(vars), other.with_vars(vars)

    def used_vars(self):
        used = set()
        for exps in self.terms:
            for v, e in zip(self.vars, exps):
                if e:
                    used.add(v)
        return used

    # ring operations ----------------------------------------------------------
    def __add__(self, other):
        a, b = self._aligned(other)
        dom = a.dom
        terms = dict(a.terms)
        for exps, c in b.terms.items():
            if exps in terms:
                s = dom.add(terms[exps], c)
                if dom.is_zero(s):
                    del terms[exps]
                else:
                    terms[exps] = s
            else:
                terms[exps] = c
        return LaurentPoly(dom, a.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        dom = self.dom
        return LaurentPoly(dom, self.vars,
                           {e: dom.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._aligned(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(self.dom.of(other))
        a, b = self._aligned(other)
        dom = a.dom
        out = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                key = tuple(x + y for x, y in zip(e1, e2))
                c = dom.mul(c1, c2)
                if key in out:
                    s = dom.add(out[key], c)
                    if dom.is_zero(s):
                        del out[key]
                    else:
                        out[key] = s
                elif not dom.is_zero(c):
                    out[key] = c
        return LaurentPoly(dom, a.vars, out)

    __rmul__ = __mul__

    def scale(self, c):
        dom = self.dom
        if dom.is_zero(c):
            return LaurentPoly(dom, self.vars, {})
        return LaurentPoly(dom, self.vars,
                           {e: dom.mul(v, c) for e, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            mono = self.as_monomial()
            if mono is None:
                raise DomainError("negative power of a non-monomial")
            c, exps = mono
            inv = LaurentPoly.monomial(
                self.dom, self.dom.inv(c),
                {v: -e for v, e in zip(self.vars, exps)})
            return inv ** (-k)
        out = LaurentPoly.const(self.dom, self.dom.one, self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def as_monomial(self):
        """Return (coeff, exps) if this is a single term, else None."""
        if len(self.terms) != 1:
            return None
        ((exps, c),) = self.terms.items()
        return c, exps

    # substitution ---------------------------------------------------------------
    def subst(self, name, value):
        """Substitute ``name`` by ``value`` (scalar or LaurentPoly).

        Negative powers of ``name`` require ``value`` to be invertible (a
        nonzero scalar or a monomial).
        """
        if name not in self.vars:
            return self
        i = self.vars.index(name)
        dom = self.dom
        if not isinstance(value, LaurentPoly):
            value = LaurentPoly.const(dom, dom.of(value) if isinstance(
                value, (int, Fraction)) else value)
        rest = self.vars[:i] + self.vars[i + 1:]
        out = LaurentPoly.zero(dom, rest)
        cache = {}
        for exps, c in self.terms.items():
            k = exps[i]
            if k not in cache:
                cache[k] = value ** k
            base = LaurentPoly(dom, rest, {exps[:i] + exps[i + 1:]: c})
            out = out + base * cache[k]
        return out

    def rename(self, mapping: dict):
        new = tuple(mapping.get(v, v) for v in self.vars)
        if len(set(new)) != len(new):
            raise DomainError("rename collapses distinct variables")
        return LaurentPoly(self.dom, new, dict(self.terms))

    def permute_vars(self, mapping: dict):
        """Simultaneous substitution x -> mapping[x] within the same context."""
        order = [self.vars.index(mapping.get(v, v)) for v in self.vars]
        nterms = {}
        for exps, c in self.terms.items():
            key = [0] * len(exps)
            for pos, e in zip(order, exps):
                key[pos] = e
            nterms[tuple(key)] = c
        return LaurentPoly(self.dom, self.vars, nterms)

    def scale_var(self, name, c):
        """x -> c*x for the single variable ``name``."""
        if name not in self.vars:
            return self
        i = self.vars.index(name)
        dom = self.dom
        powers = {}
        nterms = {}
        for exps, v in self.terms.items():
            k = exps[i]
            if k not in powers:
                powers[k] = _scalar_pow(dom, c, k)
            nv = dom.mul(v, powers[k])
            if not dom.is_zero(nv):
                nterms[exps] = nv
        return LaurentPoly(dom, self.vars, nterms)

    def eval(self, assignment: dict):
        """Substitute scalars for all variables in ``assignment``."""
        out = self
        for k, v in assignment.items():
            out = out.subst(k, v)
        return out

    # extraction -------------------------------------------------------------
    def coeff_of(self, name, k: int):
        """Coefficient of name**k, a polynomial in the remaining variables."""
        if name not in self.vars:
            return self if k == 0 else LaurentPoly.zero(self.dom, self.vars)
        i = self.vars.index(name)
        rest = self.vars[:i] + self.vars[i + 1:]
        terms = {}
        for exps, c in self.terms.items():
            if exps[i] == k:
                terms[exps[:i] + exps[i + 1:]] = c
        return LaurentPoly(self.dom, rest, terms)

    def degree_range(self, name):
        """(min, max) exponent of ``name``; (0, 0) if absent or zero poly."""
        if name not in self.vars or not self.terms:
            return (0, 0)
        i = self.vars.index(name)
        exps = [e[i] for e in self.terms]
        return (min(exps), max(exps))

    def coeffs_by(self, name):
        """Split into {exponent of name: coefficient polynomial}."""
        if name not in self.vars:
            return {0: self}
        i = self.vars.index(name)
        rest = self.vars[:i] + self.vars[i + 1:]
        buckets = {}
        for exps, c in self.terms.items():
            buckets.setdefault(exps[i], {})[exps[:i] + exps[i + 1:]] = c
        return {k: LaurentPoly(self.dom, rest, t) for k, t in buckets.items()}

    def truncate(self, name, lo=None, hi=None):
        """Drop terms whose ``name``-exponent lies outside [lo, hi]."""
        if name not in self.vars:
            if (lo is not None and 0 < lo) or (hi is not None and 0 > hi):
                return LaurentPoly.zero(self.dom, self.vars)
            return self
        i = self.vars.index(name)
        terms = {e: c for e, c in self.terms.items()
                 if (lo is None or e[i] >= lo) and (hi is None or e[i] <= hi)}
        return LaurentPoly(self.dom, self.vars, terms)

    def scalar(self):
        """The value of a constant polynomial."""
        if not self.terms:
            return self.dom.zero
        ((exps, c),) = self.terms.items()
        if any(exps):
            raise DomainError("polynomial is not constant")
        return c

    # comparison ----------------------------------------------------------------
    def eq(self, other) -> bool:
        return (self - other).is_zero()

    def __eq__(self, other):
        if isinstance(other, (LaurentPoly, int, Fraction)):
            return self.eq(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms))))

    # presentation ----------------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            mono = "*".join(
                f"{v}^{e}" if e != 1 else v
                for v, e in zip(self.vars, exps) if e)
            cs = str(c)
            bits.append(f"({cs})*{mono}" if mono else f"({cs})")
        return " + ".join(bits)

    __repr__ = __str__

    def to_json(self) -> dict:
        """Canonical JSON term list (variables, exponents, coefficient text)."""
        return {
            "vars": list(self.vars),
            "terms": [[list(e), str(self.terms[e])]
                      for e in sorted(self.terms)],
        }

    def json_str(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def _scalar_pow(dom, c, k: int):
    if k < 0:
        return _scalar_pow(dom, dom.inv(c), -k)
    out = dom.one
    for _ in range(k):
        out = dom.mul(out, c)
    return out


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RatFunc:
    """Quotient of two Laurent polynomials.

    No gcd machinery: equality is decided by cross multiplication, which is
    exact.  Only monomial content is stripped to keep sizes in check.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den=None):
        if den is None:
            den = LaurentPoly.const(num.dom, num.dom.one, num.vars)
        if den.is_zero():
            raise ZeroDivisionError("RatFunc with zero denominator")
        self.num = num
        self.den = den

    @staticmethod
    def of(x, dom=None):
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, LaurentPoly):
            return RatFunc(x)
        dom = dom or QQ
        return RatFunc(LaurentPoly.const(dom, x))

    @property
    def dom(self):
        return self.num.dom

    def __add__(self, other):
        other = RatFunc.of(other, self.dom)
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RatFunc.of(other, self.dom))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = RatFunc.of(other, self.dom)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = RatFunc.of(other, self.dom)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero RatFunc")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return RatFunc.of(other, self.dom) / self

    def is_zero(self):
        return self.num.is_zero()

    def eq(self, other) -> bool:
        other = RatFunc.of(other, self.dom)
        if self.den.vars == other.den.vars and \
                self.den.terms == other.den.terms:
            return (self.num - other.num).is_zero()
        a, b = self.den._aligned(other.den)
        if a.terms == b.terms:
            return (self.num - other.num).is_zero()
        return (self.num * other.den - other.num * self.den).is_zero()

    def __eq__(self, other):
        if isinstance(other, (RatFunc, LaurentPoly, int, Fraction)):
            return self.eq(other)
        return NotImplemented

    def __hash__(self):
        return id(self)

    def subst(self, name, value):
        return RatFunc(self.num.subst(name, value),
                       self.den.subst(name, value))

    def eval_scalar(self, assignment: dict):
        num = self.num.eval(assignment).scalar()
        den = self.den.eval(assignment).scalar()
        return self.dom.div(num, den)

    def __str__(self):
        if self.den.as_monomial() and self.den == 1:
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# products of linear factors and exact linear division
# ---------------------------------------------------------------------------

def prod_linear(dom, var, roots, vars=None):
    """prod_j (var - roots[j]); roots are scalars or LaurentPolys."""
    out = LaurentPoly.const(dom, dom.one, vars or (var,))
    x = LaurentPoly.var(dom, var)
    for r in roots:
        if isinstance(r, LaurentPoly):
            out = out * (x - r)
        else:
            out = out * (x - LaurentPoly.const(dom, r))
    return out


def p_polynomials(n: int, dom=QQ, b_prefix="B", var="S", b_values=None):
    """The monic degree-2n product poly(var) = prod_j (var - B_j).

    With ``b_values`` the roots are scalars; otherwise the 2n roots are the
    formal variables ``B1 .. B{2n}``.  Used for both the S/B and the
    (frak) s/b sectors.
    """
    if b_values is not None:
        roots = [dom.of(v) if isinstance(v, (int, Fraction)) else v
                 for v in b_values]
        return prod_linear(dom, var, roots)
    roots = [LaurentPoly.var(dom, f"{b_prefix}{j + 1}") for j in range(2 * n)]
    return prod_linear(dom, var, roots)


def coeff_of_product(f: LaurentPoly, g: LaurentPoly, var: str, k: int):
    """Coefficient of var**k in f*g, without forming the full product."""
    fb = f.coeffs_by(var)
    gb = g.coeffs_by(var)
    dom = f.dom
    out = LaurentPoly.zero(dom)
    if len(fb) > len(gb):
        fb, gb = gb, fb
    for e, cf in fb.items():
        cg = gb.get(k - e)
        if cg is not None:
            out = out + cf * cg
    return out


def poly_divexact(f: LaurentPoly, g: LaurentPoly):
    """Quotient f/g when g divides f exactly; None otherwise.

    Laurent inputs are first shifted to ordinary polynomial support (every
    monomial is a unit), divided with a lex order, and the quotient shifted
    back.
    """
    if g.is_zero():
        raise ZeroDivisionError("poly_divexact by zero")
    if f.is_zero():
        return f
    f, g = f._aligned(g)
    dom = f.dom
    nv = len(f.vars)
    fmin = [min(e[i] for e in f.terms) for i in range(nv)]
    gmin = [min(e[i] for e in g.terms) for i in range(nv)]
    fsh = {e: c for e, c in zip(
        [tuple(x - m for x, m in zip(e, fmin)) for e in f.terms],
        f.terms.values())}
    gsh = {tuple(x - m for x, m in zip(e, gmin)): c
           for e, c in g.terms.items()}
    fwork = LaurentPoly(dom, f.vars, dict(fsh))
    gl = max(gsh)
    glc = gsh[gl]
    quot = {}
    guard = 0
    while not fwork.is_zero():
        fl = max(fwork.terms)
        if any(a < b for a, b in zip(fl, gl)):
            return None
        qexp = tuple(a - b for a, b in zip(fl, gl))
        qc = dom.div(fwork.terms[fl], glc)
        quot[qexp] = qc
        mono = LaurentPoly(dom, f.vars, {qexp: qc})
        fwork = fwork - mono * LaurentPoly(dom, f.vars, gsh)
        guard += 1
        if guard > 200000:
            return None
    shift = tuple(a - b for a, b in zip(fmin, gmin))
    return LaurentPoly(dom, f.vars,
                       {tuple(a + s for a, s in zip(e, shift)): c
                        for e, c in quot.items()})


def divide_linear(f: LaurentPoly, x: str, y: str, c=1):
    """Exact division of ``f`` by (x - c*y); raises if not divisible."""
    dom = f.dom
    c = dom.of(c) if isinstance(c, (int, Fraction)) else c
    if f.is_zero():
        return f
    check = f.subst(x, LaurentPoly.var(dom, y).scale(c))
    if not check.is_zero():
        raise DomainError(f"{x} - ({c})*{y} does not divide the polynomial")
    lo, hi = f.degree_range(x)
    quot = LaurentPoly.zero(dom, f.vars)
    rem = f
    xv = LaurentPoly.var(dom, x)
    yv = LaurentPoly.var(dom, y)
    divisor = xv - yv.scale(c)
    while not rem.is_zero():
        _, d = rem.degree_range(x)
        lead = rem.coeff_of(x, d) * LaurentPoly.var(dom, x, d - 1)
        quot = quot + lead
        rem = rem - divisor * lead
    return quot


# ---------------------------------------------------------------------------
# antisymmetric algebra
# ---------------------------------------------------------------------------

def perm_sign(perm) -> int:
    n = len(perm)
    seen = [False] * n
    sign = 1
    for i in range(n):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def skew_symmetrize(f: LaurentPoly, xvars, prefactor=None):
    """Sum over permutations sigma of sgn(sigma) * f(x_sigma)."""
    xvars = tuple(xvars)
    out = LaurentPoly.zero(f.dom, f.vars)
    for perm in itertools.permutations(range(len(xvars))):
        mapping = {xvars[i]: xvars[perm[i]] for i in range(len(xvars))}
        g = f.permute_vars(mapping) if f.vars else f
        out = out + (g if perm_sign(perm) > 0 else -g)
    if prefactor is not None:
        out = out * prefactor
    return out


def wedge(factors, svars=None, placeholder="S"):
    """det(factors_i(S_j)) for univariate Laurent polys in ``placeholder``.

    Multilinear and alternating in the factors; the result is an
    antisymmetric Laurent polynomial in ``svars``.
    """
    if not factors:
        raise PreconditionError("empty wedge")
    dom = factors[0].dom
    k = len(factors)
    svars = tuple(svars) if svars is not None else tuple(
        f"S{i + 1}" for i in range(k))
    if len(svars) != k:
        raise PreconditionError("arity mismatch between factors and variables")
    cols = [[f.rename({placeholder: v}) if placeholder in f.vars else f
             for v in svars] for f in factors]
    out = LaurentPoly.zero(dom, svars)
    for perm in itertools.permutations(range(k)):
        term = LaurentPoly.const(dom, dom.one, svars)
        for i in range(k):
            term = term * cols[i][perm[i]]
        out = out + (term if perm_sign(perm) > 0 else -term)
    return out


def monomial_wedge(dom, exps, svars):
    """S^{e_1} wedge ... wedge S^{e_k} for strictly increasing exponents."""
    factors = [LaurentPoly.var(dom, "S", e) if e != 0
               else LaurentPoly.const(dom, dom.one, ("S",)) for e in exps]
    return wedge(factors, svars)


def wedge_join(f: LaurentPoly, fvars, g: LaurentPoly, gvars, svars):
    """(f ^ g)(S_1..S_{p+q}) for antisymmetric f, g via (p,q)-shuffles."""
    p, q = len(fvars), len(gvars)
    if len(svars) != p + q:
        raise PreconditionError("wedge_join arity mismatch")
    dom = f.dom
    out = LaurentPoly.zero(dom, tuple(svars))
    idx = range(p + q)
    for subset in itertools.combinations(idx, p):
        comp = [i for i in idx if i not in subset]
        perm = list(subset) + comp
        sign = perm_sign(perm)
        fmap = {fvars[i]: svars[subset[i]] for i in range(p)}
        gmap = {gvars[i]: svars[comp[i]] for i in range(q)}
        term = f.rename(fmap) * g.rename(gmap)
        out = out + (term if sign > 0 else -term)
    return out


def wedge_coords(f: LaurentPoly, svars):
    """Coordinates of an antisymmetric polynomial on the monomial-wedge basis.

    Returns {ascending exponent tuple: coefficient poly in the other vars};
    f == sum coords[d] * monomial_wedge(d).
    """
    svars = tuple(svars)
    n = len(svars)
    if any(v not in f.vars for v in svars):
        f = f.with_vars(tuple(dict.fromkeys(f.vars + svars)))
    pos = [f.vars.index(v) for v in svars]
    rest = tuple(v for v in f.vars if v not in svars)
    restpos = [f.vars.index(v) for v in rest]
    sign = 1 if (n * (n - 1) // 2) % 2 == 0 else -1
    coords = {}
    for exps, c in f.terms.items():
        svals = tuple(exps[i] for i in pos)
        if len(set(svals)) != n:
            raise DomainError("not antisymmetric: repeated exponents present")
        if all(svals[i] > svals[i + 1] for i in range(n - 1)):
            key = tuple(reversed(svals))
            rexp = tuple(exps[i] for i in restpos)
            coords.setdefault(key, {})[rexp] = c
    out = {}
    for key, terms in coords.items():
        poly = LaurentPoly(f.dom, rest, terms)
        out[key] = poly if sign > 0 else -poly
    return out


def from_wedge_coords(dom, coords: dict, svars):
    out = LaurentPoly.zero(dom, tuple(svars))
    for exps, c in coords.items():
        w = monomial_wedge(dom, exps, svars)
        out = out + w * c
    return out


# ---------------------------------------------------------------------------
# one-variable series expansions (exact, explicitly truncated)
# ---------------------------------------------------------------------------

def series_inv(f: LaurentPoly, var: str, order: int, at: str):
    """Expansion of 1/f in ``var`` around 0 (``at='zero'``) or infinity.

    The extreme coefficient of ``f`` must be a unit (scalar times monomial).
    ``order`` counts corrections kept beyond the leading power.
    """
    if f.is_zero():
        raise ZeroDivisionError("series_inv of zero")
    dom = f.dom
    lo, hi = f.degree_range(var)
    k = lo if at == "zero" else hi
    lead = f.coeff_of(var, k)
    mono = lead.as_monomial()
    if mono is None:
        raise DomainError("leading coefficient is not a unit; cannot invert")
    lead_inv = LaurentPoly.monomial(
        dom, dom.inv(mono[0]),
        {v: -e for v, e in zip(lead.vars, mono[1])})
    xk = LaurentPoly.var(dom, var, -k)
    # f = lead*var^k * (1 + g), g of strictly positive grade; solve
    # (1 + g) u = 1 grade by grade: u_m = -sum_{j=1..m} g_j u_{m-j}.
    g = f * lead_inv * xk - LaurentPoly.const(dom, dom.one)
    sgn = 1 if at == "zero" else -1
    gb = {}
    for e, c in g.coeffs_by(var).items():
        if not c.is_zero():
            gb[sgn * e] = c
    u = {0: LaurentPoly.const(dom, dom.one)}
    for m in range(1, order + 1):
        acc = LaurentPoly.zero(dom)
        for j, gj in gb.items():
            if 0 < j <= m:
                acc = acc + gj * u.get(m - j, LaurentPoly.zero(dom))
        if not acc.is_zero():
            u[m] = -acc
    out = LaurentPoly.zero(dom)
    for m, um in u.items():
        out = out + um * LaurentPoly.var(dom, var, sgn * m)
    return out * lead_inv * xk


def series_sqrt(f: LaurentPoly, var: str, order: int, at: str, root_of_lead):
    """sqrt(f) as a series in ``var``; caller supplies a square root of the
    leading term (a monomial), fixing the branch."""
    dom = f.dom
    lo, hi = f.degree_range(var)
    k = lo if at == "zero" else hi
    lead = f.coeff_of(var, k)
    mono = lead.as_monomial()
    if mono is None:
        raise DomainError("leading coefficient is not a unit")
    if not (root_of_lead * root_of_lead -
            lead * LaurentPoly.var(dom, var, k)).is_zero():
        raise DomainError("provided root does not square to the leading term")
    lead_inv = series_inv(lead * LaurentPoly.var(dom, var, k), var, 0, at)
    one = LaurentPoly.const(dom, dom.one, f.vars)
    g = f * lead_inv - one  # strictly positive grade in the given direction
    # solve y^2 = 1 + g grade by grade: 2 y_j = g_j - sum_{0<i<j} y_i y_{j-i}
    grades = {}
    vi = g.vars.index(var) if var in g.vars else None
    for exps, c in g.terms.items():
        e = exps[vi] if vi is not None else 0
        d = e if at == "zero" else -e
        if d <= 0:
            raise DomainError("sqrt argument not normalized to 1 + O(grade)")
        grades.setdefault(d, {})[exps] = c
    y = {0: one}
    half = dom.inv(dom.of(2))
    for j in range(1, order + 1):
        gj = LaurentPoly(dom, g.vars, grades.get(j, {}))
        acc = gj
        for i in range(1, j):
            acc = acc - y.get(i, LaurentPoly.zero(dom, g.vars)) * \
                y.get(j - i, LaurentPoly.zero(dom, g.vars))
        acc = acc.scale(half)
        if not acc.is_zero():
            y[j] = acc
    total = LaurentPoly.zero(dom, g.vars)
    for part in y.values():
        total = total + part
    return total * root_of_lead


def series_exp(f: LaurentPoly, var: str, order: int, at: str):
    """exp(f) for f of strictly positive grade in the expansion direction."""
    dom = f.dom
    lo, hi = f.degree_range(var)
    if not f.is_zero():
        if at == "zero" and lo <= 0:
            raise TruncationError("exp argument must vanish at the expansion point")
        if at == "inf" and hi >= 0:
            raise TruncationError("exp argument must vanish at the expansion point")
    out = LaurentPoly.const(dom, dom.one, f.vars)
    term = LaurentPoly.const(dom, dom.one, f.vars)
    for k in range(1, order + 1):
        term = term * f
        term = (term.truncate(var, hi=order) if at == "zero"
                else term.truncate(var, lo=-order))
        if term.is_zero():
            break
        out = out + term.scale(dom.inv(dom.of(_fact(k))))
    return (out.truncate(var, hi=order) if at == "zero"
            else out.truncate(var, lo=-order))


def _fact(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


# ---------------------------------------------------------------------------
# linear algebra over a domain or over RatFunc entries
# ---------------------------------------------------------------------------

class _DomainField:
    def __init__(self, dom):
        self.dom = dom

    def of(self, x):
        return self.dom.of(x) if isinstance(x, (int, Fraction)) else x

    @property
    def zero(self):
        return self.dom.zero

    def is_zero(self, a):
        return self.dom.is_zero(a)

    def add(self, a, b):
        return self.dom.add(a, b)

    def sub(self, a, b):
        return self.dom.sub(a, b)

    def mul(self, a, b):
        return self.dom.mul(a, b)

    def div(self, a, b):
        return self.dom.div(a, b)

    def neg(self, a):
        return self.dom.neg(a)

    def pivot_weight(self, a):
        if getattr(self.dom, "exact", True):
            return 1
        return abs(a)


class _RatFuncField:
    def __init__(self, dom):
        self.dom = dom

    def of(self, x):
        return RatFunc.of(x, self.dom)

    @property
    def zero(self):
        return RatFunc(LaurentPoly.zero(self.dom))

    def is_zero(self, a):
        return a.is_zero()

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b

    def neg(self, a):
        return -a

    def pivot_weight(self, a):
        return -len(a.num.terms) - len(a.den.terms)


def field_for(entries_domain, rational_function=False):
    return _RatFuncField(entries_domain) if rational_function \
        else _DomainField(entries_domain)


def rref(matrix, field):
    """Row-reduce ``matrix`` in place (list of lists); returns pivot columns."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        best, weight = None, None
        for i in range(r, rows):
            if not field.is_zero(matrix[i][c]):
                w = field.pivot_weight(matrix[i][c])
                if best is None or w > weight:
                    best, weight = i, w
        if best is None:
            continue
        matrix[r], matrix[best] = matrix[best], matrix[r]
        inv = matrix[r][c]
        matrix[r] = [field.div(x, inv) for x in matrix[r]]
        for i in range(rows):
            if i != r and not field.is_zero(matrix[i][c]):
                f = matrix[i][c]
                matrix[i] = [field.sub(x, field.mul(f, y))
                             for x, y in zip(matrix[i], matrix[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return pivots


def matrix_rank(matrix, field) -> int:
    if not matrix:
        return 0
    work = [list(row) for row in matrix]
    return len(rref(work, field))


def solve_linear(matrix, rhs, field):
    """One solution of matrix * x = rhs, or None if inconsistent.

    ``matrix`` is a list of rows; free variables are set to zero.
    """
    if not matrix:
        return [] if all(field.is_zero(b) for b in rhs) else None
    cols = len(matrix[0])
    work = [list(row) + [b] for row, b in zip(matrix, rhs)]
    pivots = rref(work, field)
    if cols in pivots:
        return None  # pivot in the augmented column
    x = [field.zero] * cols
    for r, c in enumerate(pivots):
        x[c] = work[r][cols]
    return x


def nullspace(matrix, field):
    """Basis of the right kernel of ``matrix``."""
    if not matrix:
        return []
    cols = len(matrix[0])
    work = [list(row) for row in matrix]
    pivots = rref(work, field)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [field.zero] * cols
        vec[fc] = field.of(1)
        for r, pc in enumerate(pivots):
            vec[pc] = field.neg(work[r][fc])
        basis.append(vec)
    return basis


def det(matrix, field):
    """Determinant by fraction-free-ish elimination (small sizes only)."""
    n = len(matrix)
    if n == 0:
        return field.of(1)
    work = [list(row) for row in matrix]
    sign = 1
    acc = field.of(1)
    for c in range(n):
        piv = None
        for r in range(c, n):
            if not field.is_zero(work[r][c]):
                piv = r
                break
        if piv is None:
            return field.zero
        if piv != c:
            work[c], work[piv] = work[piv], work[c]
            sign = -sign
        acc = field.mul(acc, work[c][c])
        inv_p = work[c][c]
        for r in range(c + 1, n):
            if field.is_zero(work[r][c]):
                continue
            f = field.div(work[r][c], inv_p)
            work[r] = [field.sub(x, field.mul(f, y))
                       for x, y in zip(work[r], work[c])]
    return field.mul(field.of(sign), acc)
