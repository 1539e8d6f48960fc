"""Exact forms, canonical degree windows, asymptotic expansion coefficients
and the residue functionals built from them.

Two parallel sectors appear throughout:

* the **S-sector** (capital variables S, B_j, constants Q, A), and
* the **frak sector** (variables s, b_j, constants frak q, a).

Both are handled by one :class:`Sector` object parametrized by its 2n roots
and its pair of unit constants.  Asymptotic coefficients are produced by the
order-by-order recursion that the two shift equations impose on the ansatz;
nothing here is ever evaluated analytically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import (DomainError, PreconditionError, ResonanceError,
                     SplitError, TruncationError)
from .laurent import (LaurentPoly, RatFunc, field_for, poly_divexact,
                      prod_linear, solve_linear)
from .scalars import UnitRoot, ONE_ROOT

_ZERO = Fraction(0)


@dataclass
class ExactForm:
    """A certified exact form: ``expanded`` is D[generator] on the given side."""

    side: str              # "Q" or "q"
    generator: LaurentPoly
    expanded: LaurentPoly


class Sector:
    """One variable sector: 2n roots, the monic product polynomial and the
    shift constants, with exact resonance bookkeeping via unit-root angles.

    ``roots`` may be formal variables, polynomials (e.g. squares t_j^2 when
    half powers of the roots are needed exactly) or numeric samples.
    ``shift_root`` is the angle of the constant multiplying the variable in
    the shift equation (Q for the S-side, frak q for the s-side).
    """

    def __init__(self, dom, var: str, roots, shift_root: UnitRoot,
                 twist_root: Optional[UnitRoot] = None, sqrt_roots=None):
        self.dom = dom
        self.var = var
        self.roots = [r if isinstance(r, LaurentPoly)
                      else LaurentPoly.const(dom, r) for r in roots]
        if len(self.roots) % 2:
            raise PreconditionError("a sector needs an even number of roots")
        self.n = len(self.roots) // 2
        self.shift_root = shift_root
        self.twist_root = twist_root  # A for the S-side, a for the s-side
        self.sqrt_roots = sqrt_roots
        self.P = prod_linear(dom, var, self.roots)
        self._c = {j: self.P.coeff_of(var, j) for j in range(2 * self.n + 1)}

    # --- basic product polynomial helpers ---------------------------------
    def P_at(self, value):
        """P evaluated at a scalar, a polynomial, or c*var."""
        return self.P.subst(self.var, value)

    def P_scaled(self, c):
        """P(c * var) for a scalar c."""
        return self.P.scale_var(self.var, c)

    def P_minus(self):
        return self.P_scaled(self.dom.neg(self.dom.one))

    def P_shifted(self, k: int = 1):
        """P(var * shift^k)."""
        return self.P_scaled(self.shift_const(k))

    def shift_const(self, k: int = 1):
        return (self.shift_root ** k).realize(self.dom)

    def twist_const(self):
        if self.twist_root is None:
            raise DomainError("sector has no twist constant")
        return self.twist_root.realize(self.dom)

    def prod_roots(self):
        out = LaurentPoly.const(self.dom, self.dom.one)
        for r in self.roots:
            out = out * r
        return out

    def prod_sqrt_roots(self):
        if self.sqrt_roots is None:
            raise DomainError("sector has no square roots of its roots")
        out = LaurentPoly.const(self.dom, self.dom.one)
        for r in self.sqrt_roots:
            out = out * (r if isinstance(r, LaurentPoly)
                         else LaurentPoly.const(self.dom, r))
        return out

    # --- exact forms -------------------------------------------------------
    def q_exact_form(self, z: LaurentPoly, a2_inv=None) -> ExactForm:
        """D_a[z](s) = a^-2 p(s) z(s) - p(s q^2) z(s q^4)  (frak side)."""
        dom = self.dom
        if a2_inv is None:
            a2_inv = (self.twist_root ** (-2)).realize(dom)
        zs = z if self.var in z.vars else z.rename({"_": self.var})
        term1 = self.P * zs.scale(a2_inv) if not isinstance(a2_inv, LaurentPoly) \
            else self.P * zs * a2_inv
        term2 = self.P_shifted(2) * zs.scale_var(self.var, self.shift_const(4))
        return ExactForm("q", z, term1 - term2)

    def Q_exact_form(self, Z: LaurentPoly, A=None) -> ExactForm:
        """D_A[Z](S) = Z(S) P(S) - A Z(SQ) P(-S)  (S side)."""
        dom = self.dom
        if A is None:
            A = self.twist_const()
        term1 = Z * self.P
        term2 = (Z.scale_var(self.var, self.shift_const(1)) *
                 self.P_minus()).scale(A)
        return ExactForm("Q", Z, term1 - term2)

    # --- canonical window reduction -----------------------------------------
    def monomial_exact_form(self, k: int, A_root: UnitRoot):
        """D_A[var^k] together with its extreme coefficients."""
        dom = self.dom
        if (A_root * self.shift_root ** k).is_one:
            raise ResonanceError(
                f"A*Q^{k} = 1: the monomial of degree {2 * self.n + k} "
                "cannot be reduced")
        A = A_root.realize(dom)
        Zk = LaurentPoly.var(dom, self.var, k)
        form = self.Q_exact_form(Zk, A=A).expanded
        return form

    def reduce_poly_window(self, f, var: str, lo: int, hi: int, A_root):
        """Reduce the ``var``-degrees of ``f`` into [lo, hi] by exact forms.

        Returns (reduced, certificate) with certificate entries
        (var, k, multiplier) meaning ``multiplier * D_A[var^k]`` was
        subtracted.  Reduction happens from both ends; generic A guarantees
        progress, resonant A raises.
        """
        dom = self.dom
        cert = []
        cur = f.rename({self.var: var}) if self.var != var and self.var in f.vars else f
        n2 = 2 * self.n
        guard = 0
        while not cur.is_zero():
            dlo, dhi = cur.degree_range(var)
            if dhi > hi:
                k = dhi - n2
                form = self.monomial_exact_form(k, A_root).rename(
                    {self.var: var})
                top = form.coeff_of(var, dhi).scalar()
                mult = cur.coeff_of(var, dhi).scale(dom.inv(top))
                cur = cur - form * mult
                cert.append((var, k, mult))
            elif dlo < lo:
                k = dlo
                form = self.monomial_exact_form(k, A_root).rename(
                    {self.var: var})
                bot = form.coeff_of(var, dlo)
                mono = bot.as_monomial()
                if mono is None:
                    raise DomainError("extreme coefficient is not a unit")
                inv = LaurentPoly.monomial(
                    dom, dom.inv(mono[0]),
                    {v: -e for v, e in zip(bot.vars, mono[1])})
                mult = cur.coeff_of(var, dlo) * inv
                cur = cur - form * mult
                cert.append((var, k, mult))
            else:
                break
            guard += 1
            if guard > 10000:
                raise TruncationError("window reduction does not terminate")
        return cur, cert

    # --- asymptotic series ---------------------------------------------------
    def asymptotics(self, K: int) -> "AsymptoticSeries":
        return AsymptoticSeries(self, K)


class AsymptoticSeries:
    """Order-by-order solution of the shift equations for the four series.

    ``plus[k]`` are the coefficients of the expansion at infinity
    (``plus[0] = 1``), ``minus[k]`` those of the bracketed expansion at zero.
    The fixed prefactor of the minus series (shift^n times the inverse
    square roots of the roots, resp. the inverse product of the roots on the
    S-side) is exposed separately via :meth:`minus_prefactor`.

    The S-side solves  shift^{-2n} X(S*shift) P(S*shift) = X(S) P(-S)
    at infinity and the same equation without the shift^{-2n} prefactor at
    zero; the frak side solves  shift^{-4n} x(s*shift^4) p(s*shift^4)
    = x(s) p(s*shift^2)  at infinity and its prefactor-free version at zero.
    These are the large/small-variable shadows of the two functional
    equations of the integrand, whose exponential prefactor is only present
    in the expansion at +infinity.
    """

    def __init__(self, sector: Sector, K: int, frak: bool = None):
        self.sector = sector
        self.K = K
        self.frak = frak if frak is not None else sector.var in ("s", "sf")
        dom = sector.dom
        n2 = 2 * sector.n
        c = sector._c
        one = LaurentPoly.const(dom, dom.one)
        zero = LaurentPoly.zero(dom)
        self.plus = [one]
        self.minus = [one]
        root = sector.shift_root
        if not self.frak:
            for r in range(1, K + 1):
                if (root ** (-r)).is_one:
                    raise ResonanceError(f"Q^{r} = 1 at this coupling")
                piv = dom.sub(sector.shift_const(-r), dom.one)
                acc = zero
                for k in range(r):
                    cc = c.get(n2 - r + k)
                    if cc is None or cc.is_zero():
                        continue
                    w = dom.sub(sector.shift_const(-r),
                                dom.of((-1) ** (r + k)))
                    acc = acc + cc * self.plus[k].scale(w)
                self.plus.append(acc.scale(dom.neg(dom.inv(piv))))
            for r in range(1, K + 1):
                if (root ** r).is_one:
                    raise ResonanceError(f"Q^{r} = 1 at this coupling")
                piv_s = dom.sub(sector.shift_const(r), dom.one)
                acc = zero
                for k in range(r):
                    cc = c.get(r - k)
                    if cc is None or cc.is_zero():
                        continue
                    w = dom.sub(sector.shift_const(r),
                                dom.of((-1) ** (r - k)))
                    acc = acc + cc * self.minus[k].scale(w)
                # pivot = c_0 * (shift^r - 1); c_0 = prod of roots, a unit
                c0inv = _unit_inverse(c[0])
                self.minus.append(
                    (acc * c0inv).scale(dom.neg(dom.inv(piv_s))))
        else:
            for r in range(1, K + 1):
                if (root ** (4 * r)).is_one:
                    raise ResonanceError(f"q^{4 * r} = 1 at this coupling")
                piv = dom.sub(dom.one, sector.shift_const(4 * r))
                acc = zero
                for k in range(r):
                    cc = c.get(n2 - r + k)
                    if cc is None or cc.is_zero():
                        continue
                    w = dom.sub(dom.one, sector.shift_const(2 * r + 2 * k))
                    acc = acc + cc * self.plus[k].scale(w)
                self.plus.append(acc.scale(dom.neg(dom.inv(piv))))
            for r in range(1, K + 1):
                if (root ** (4 * r)).is_one:
                    raise ResonanceError(f"q^{4 * r} = 1 at this coupling")
                lead = sector.shift_const(4 * r)
                piv = dom.sub(lead, dom.one)
                acc = zero
                for k in range(r):
                    cc = c.get(r - k)
                    if cc is None or cc.is_zero():
                        continue
                    w = dom.sub(lead, sector.shift_const(2 * r - 2 * k))
                    acc = acc + cc * self.minus[k].scale(w)
                c0inv = _unit_inverse(c[0])
                self.minus.append(
                    (acc * c0inv).scale(dom.neg(dom.inv(piv))))

    def plus_coeff(self, k: int):
        if k < 0:
            return LaurentPoly.zero(self.sector.dom)
        if k > self.K:
            raise TruncationError(f"series order {self.K} < requested {k}")
        return self.plus[k]

    def minus_coeff(self, k: int):
        if k < 0:
            return LaurentPoly.zero(self.sector.dom)
        if k > self.K:
            raise TruncationError(f"series order {self.K} < requested {k}")
        return self.minus[k]

    def minus_prefactor(self):
        """prod B_j^{-1} on the S-side; q^n prod b_j^{-1/2} on the frak side."""
        sec = self.sector
        if not self.frak:
            return _unit_inverse(sec.prod_roots())
        pref = _unit_inverse(sec.prod_sqrt_roots())
        return pref.scale((sec.shift_root ** sec.n).realize(sec.dom))

    # --- residue functionals -------------------------------------------------
    def res_plus(self, N: LaurentPoly, var: str):
        """Coefficient of var^0 in  plus-series(var) * var^{-2n} * N  (S side)
        or plus-series * var^{-n} * N (frak side)."""
        shift = 2 * self.sector.n if not self.frak else self.sector.n
        out = LaurentPoly.zero(self.sector.dom)
        lo, hi = N.degree_range(var)
        if hi - shift > self.K:
            raise TruncationError(
                f"need series order {hi - shift}, have {self.K}")
        for d in range(max(lo, shift), hi + 1):
            cd = N.coeff_of(var, d)
            if cd.is_zero():
                continue
            out = out + cd * self.plus_coeff(d - shift)
        return out

    def res_minus(self, N: LaurentPoly, var: str, with_prefactor=True):
        """Coefficient of var^0 in minus-series(var) * N."""
        out = LaurentPoly.zero(self.sector.dom)
        lo, hi = N.degree_range(var)
        if -lo > self.K:
            raise TruncationError(f"need series order {-lo}, have {self.K}")
        for d in range(lo, min(hi, 0) + 1):
            cd = N.coeff_of(var, d)
            if cd.is_zero():
                continue
            out = out + cd * self.minus_coeff(-d)
        if with_prefactor and not out.is_zero():
            out = out * self.minus_prefactor()
        return out

    def res_wedge(self, N: LaurentPoly, svars, sign: str,
                  with_prefactor=True):
        """Alternating extension of res to antisymmetric polynomials.

        Equals sum_j (-1)^{j-1} res[N_j] (N_1 ^ .. ^ hat N_j ^ .. ^ N_k) for
        pure wedges; implemented as application in the last slot times
        (-1)^{k-1}, which agrees on pure wedges and is linear.
        """
        svars = tuple(svars)
        k = len(svars)
        last = svars[-1]
        if sign == "+":
            val = self.res_plus(N, last)
        else:
            val = self.res_minus(N, last, with_prefactor=with_prefactor)
        if k % 2 == 0:
            val = -val
        return val


def _unit_inverse(f: LaurentPoly):
    mono = f.as_monomial()
    if mono is None:
        raise DomainError("not a unit: cannot invert")
    c, exps = mono
    return LaurentPoly.monomial(f.dom, f.dom.inv(c),
                                {v: -e for v, e in zip(f.vars, exps)})


# ---------------------------------------------------------------------------
# sector constructors
# ---------------------------------------------------------------------------

def s_sector(params, n: int, dom=None, roots=None, var="S") -> Sector:
    """The capital sector: shift constant Q, twist A."""
    dom = dom or params.dom
    if roots is None:
        roots = [LaurentPoly.var(dom, f"B{j + 1}") for j in range(2 * n)]
    return Sector(dom, var, roots, params.Q_root, params.A_root)


def frak_sector(params, n: int, dom=None, roots=None, var="s",
                sqrt_roots=None) -> Sector:
    """The frak sector: shift constant frak q, twist a."""
    dom = dom or params.dom
    if roots is None:
        roots = [LaurentPoly.var(dom, f"b{j + 1}") for j in range(2 * n)]
    return Sector(dom, var, roots, params.frak_q_root, params.a_root,
                  sqrt_roots=sqrt_roots)


def compute_asymptotics(params, n: int, K: int, dom=None,
                        frak=False, roots=None, sqrt_roots=None
                        ) -> AsymptoticSeries:
    """Asymptotic expansion coefficients for either sector, orders <= K."""
    if frak:
        sec = frak_sector(params, n, dom=dom, roots=roots,
                          sqrt_roots=sqrt_roots)
        return AsymptoticSeries(sec, K, frak=True)
    sec = s_sector(params, n, dom=dom, roots=roots)
    return AsymptoticSeries(sec, K, frak=False)


def res_ops(N: LaurentPoly, series: AsymptoticSeries, var="S"):
    """(Res_+[N], Res_-[N]) for a one-variable Laurent polynomial."""
    return (series.res_plus(N, var), series.res_minus(N, var))


def res_ops_frak(ell: LaurentPoly, series: AsymptoticSeries, var="s"):
    """(res_+[ell], res_-[ell]) on the frak side."""
    return (series.res_plus(ell, var), series.res_minus(ell, var))


# ---------------------------------------------------------------------------
# the m/n split
# ---------------------------------------------------------------------------

@dataclass
class MNSplit:
    """Solution of p(s q^-2) l(s) = m(s) + w^-1 p(s) n(s q^-4) - p(s q^-2) n(s)
    with w = a^2 kept as a formal variable; coefficients are rational in w."""

    k: int
    n_coeffs: dict  # s-exponent -> RatFunc in w
    m_coeffs: dict  # s-exponent -> RatFunc in w

    def n_poly_at(self, w_value, dom, var="s"):
        """The n-polynomial at a concrete twist value a^2 = w_value."""
        out = LaurentPoly.zero(dom, (var,))
        for j, r in self.n_coeffs.items():
            val = r.subst("w", w_value)
            den = val.den.as_monomial()
            if den is None:
                raise DomainError("denominator not a unit at this twist")
            out = out + LaurentPoly.var(dom, var, j) * val.num * \
                _unit_inverse(val.den)
        return out

    def residue_at(self, w0, dom, var="s"):
        """res_{w=w0} n^(k)(s) dw/w as a Laurent polynomial in s (and b's).

        Computed by the substitution w = w0(1+eps): the true pole order is
        the valuation gap of the (possibly unreduced) numerator and
        denominator, and a simple pole contributes their normalized leading
        parts, divided exactly.
        """
        out = LaurentPoly.zero(dom, (var,))
        w0 = dom.of(w0) if isinstance(w0, (int, Fraction)) else w0
        eps_sub = (LaurentPoly.var(dom, "eps") +
                   LaurentPoly.const(dom, dom.one, ("eps",))).scale(w0)
        for j, r in self.n_coeffs.items():
            num = r.num.subst("w", eps_sub)
            den = r.den.subst("w", eps_sub)
            if num.is_zero():
                continue
            a = num.degree_range("eps")[0]
            b = den.degree_range("eps")[0]
            if b - a <= 0:
                continue
            if b - a > 1:
                raise SplitError("higher-order pole in the split residue")
            n0 = num.coeff_of("eps", a)
            d0 = den.coeff_of("eps", b)
            q = poly_divexact(n0, d0)
            if q is None:
                raise DomainError("residue is not polynomial in the roots")
            out = out + LaurentPoly.var(dom, var, j) * q
        return out


def mn_split(ell: LaurentPoly, k: int, params, n: int, dom=None,
             var="s") -> MNSplit:
    """Solve the window-constrained split for a given Laurent polynomial l.

    The n-polynomial is supported on s^{-k+1..0} for k >= 1 and on
    s^{0..-k+1} for k <= 0; the m-polynomial on s^{-k+1..2n-k}.  The twist
    a^2 stays formal (variable ``w``), so residues in a^2 are exact.
    """
    dom = dom or params.dom
    sec = frak_sector(params, n, dom=dom, var=var)
    p = sec.P
    q2 = sec.shift_const(-2)
    p_down2 = sec.P_scaled(q2)                       # p(s q^-2)
    p_plain = p
    if k >= 1:
        n_support = list(range(-k + 1, 1))
    else:
        n_support = list(range(0, -k + 2))
    m_support = set(range(-k + 1, 2 * n - k + 1))
    w = LaurentPoly.var(dom, "w")
    winv = RatFunc(LaurentPoly.const(dom, dom.one, ("w",)), w)

    lhs = p_down2 * ell
    # unknown contribution: w^-1 p(s) n(s q^-4) - p(s q^-2) n(s)
    cols = []
    for j in n_support:
        sj = LaurentPoly.var(dom, var, j)
        t1 = p_plain * sj.scale_var(var, sec.shift_const(-4))
        t2 = p_down2 * sj
        cols.append((RatFunc.of(t1) * winv) - RatFunc.of(t2))

    lo = min([lhs.degree_range(var)[0]] +
             [c.num.degree_range(var)[0] for c in cols] + [0])
    hi = max([lhs.degree_range(var)[1]] +
             [c.num.degree_range(var)[1] for c in cols] + [0])
    eq_exps = [e for e in range(lo, hi + 1) if e not in m_support]
    fld = field_for(dom, rational_function=True)
    rows = []
    rhs = []
    for e in eq_exps:
        rows.append([RatFunc(c.num.coeff_of(var, e), c.den) for c in cols])
        rhs.append(RatFunc.of(lhs.coeff_of(var, e)))
    sol = solve_linear(rows, rhs, fld)
    if sol is None:
        raise SplitError(f"no m/n split with window index k={k}")
    n_coeffs = dict(zip(n_support, sol))
    # m = lhs - (w^-1 p n(s q^-4) - p(s q^-2) n(s)), collected per exponent
    total = RatFunc.of(lhs)
    for j, c in zip(n_support, sol):
        total = total - cols[n_support.index(j)] * c
    m_coeffs = {}
    for e in range(lo, hi + 1):
        ce = RatFunc(total.num.coeff_of(var, e), total.den)
        if not ce.is_zero():
            if e not in m_support:
                raise SplitError("residual support escapes the m window")
            m_coeffs[e] = ce
    return MNSplit(k, n_coeffs, m_coeffs)


def reduce_to_window(L, n: int, params, svars, dom=None, relaxed=False,
                     roots=None):
    """Bring each wedge slot of ``L`` into the canonical degree window.

    Window [0, 2n-1] at generic A; ``relaxed=True`` uses A = 1 and the
    window [0, 2n] (degree 2n is then irreducible).  Returns
    (reduced, certificate); re-adding the certified exact-form multiples
    reconstructs the input exactly.
    """
    dom = dom or params.dom
    sec = s_sector(params, n, dom=dom, roots=roots)
    if relaxed:
        A_root = ONE_ROOT
        lo, hi = 0, 2 * n
    else:
        A_root = params.A_root
        if A_root is None:
            raise DomainError("window reduction needs a concrete alpha")
        lo, hi = 0, 2 * n - 1
    cert = []
    cur = L
    for var in svars:
        cur, c = sec.reduce_poly_window(cur, var, lo, hi, A_root)
        cert.extend(c)
    return cur, cert


def rebuild_from_certificate(reduced, cert, n, params, svars, dom=None,
                             relaxed=False, roots=None):
    """Inverse of :func:`reduce_to_window` (for certificate verification)."""
    dom = dom or params.dom
    sec = s_sector(params, n, dom=dom, roots=roots)
    A_root = ONE_ROOT if relaxed else params.A_root
    out = reduced
    for var, k, mult in cert:
        form = sec.monomial_exact_form(k, A_root).rename({sec.var: var})
        out = out + form * mult
    return out
