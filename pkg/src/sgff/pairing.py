"""The formal pairing model and the determinant identities built on it.

Pairings are never evaluated analytically: the pairing of s^m with S^l is a
free symbol I[m,l], wedge pairings are determinants of such symbols, and
every identity in scope is either an identity in these symbols or a
canonical-form statement after exact-form reduction.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import DomainError, PreconditionError
from .laurent import (LaurentPoly, RatFunc, coeff_of_product, divide_linear,
                      monomial_wedge, wedge_coords)
from .fermions import c_poly, s_sector_like, poly_det as _poly_det
from .exact_residue import (AsymptoticSeries, Sector, frak_sector,
                            reduce_to_window, s_sector)
from .towers import phi_unit, svars


# ---------------------------------------------------------------------------
# the free-symbol pairing
# ---------------------------------------------------------------------------

def pairing_symbol(dom, m: int, l: int):
    return LaurentPoly.var(dom, f"I[{m},{l}]")


def pair_single(ell: LaurentPoly, L: LaurentPoly, svar_ell="s", svar_L="S"):
    """(ell, L) expanded over the symbols I[m,l]; bilinear by construction."""
    dom = ell.dom
    out = LaurentPoly.zero(dom)
    for m, cm in ell.coeffs_by(svar_ell).items():
        for l, dl in L.coeffs_by(svar_L).items():
            out = out + cm * dl * pairing_symbol(dom, m, l)
    return out


def pair_wedge(ell_w: LaurentPoly, L_w: LaurentPoly, n: int,
               ell_vars=None, L_vars=None):
    """Pairing of two antisymmetric n-variable polynomials: the k x k
    determinant of single pairings, extended bilinearly over the monomial
    wedge bases of both sides."""
    dom = ell_w.dom
    ell_vars = tuple(ell_vars) if ell_vars else tuple(
        f"s{i + 1}" for i in range(n))
    L_vars = tuple(L_vars) if L_vars else svars(n)
    cl = wedge_coords(ell_w, ell_vars)
    cL = wedge_coords(L_w, L_vars)
    out = LaurentPoly.zero(dom)
    for me, ce in cl.items():
        for lL, cLl in cL.items():
            mat = [[pairing_symbol(dom, m, l) for l in lL] for m in me]
            out = out + ce * cLl * _poly_det(mat)
    return out


def pair(ell_w, L_w, n, params=None, backend="formal", ell_vars=None,
         L_vars=None, frak_roots=None, s_roots=None):
    """Spec-level pairing: ``formal`` pairs as given, ``reduced`` first
    brings both sides to their canonical windows so that exact forms pair
    to zero by construction."""
    if backend == "formal":
        return pair_wedge(ell_w, L_w, n, ell_vars, L_vars)
    if backend != "reduced":
        raise PreconditionError(f"unknown pairing backend {backend!r}")
    if params is None:
        raise PreconditionError("reduced pairing needs parameters")
    ell_vars = tuple(ell_vars) if ell_vars else tuple(
        f"s{i + 1}" for i in range(n))
    L_vars = tuple(L_vars) if L_vars else svars(n)
    L_red, _ = reduce_to_window(L_w, n, params, L_vars, roots=s_roots)
    ell_red = ell_w
    for v in ell_vars:
        ell_red = _reduce_frak_window(ell_red, v, n, params, frak_roots)
    return pair_wedge(ell_red, L_red, n, ell_vars, L_vars)


def _reduce_frak_window(f, var, n, params, roots=None):
    """Reduce a frak-side slot into [0, 2n-1] by q-exact forms."""
    dom = params.dom
    sec = frak_sector(params, n, dom=dom, roots=roots, var=var)
    a2inv = (params.a_root ** (-2)).realize(dom)
    cur = f
    guard = 0
    while not cur.is_zero():
        lo, hi = cur.degree_range(var)
        if hi > 2 * n - 1:
            k = hi - 2 * n
            form = sec.q_exact_form(LaurentPoly.var(dom, var, k),
                                    a2_inv=a2inv).expanded
            top = form.coeff_of(var, hi)
            mono = top.as_monomial()
            if mono is None or dom.is_zero(mono[0]):
                raise DomainError("frak reduction: top coefficient not a unit")
            cur = cur - form * cur.coeff_of(var, hi) * _inv_mono(top)
        elif lo < 0:
            k = lo
            form = sec.q_exact_form(LaurentPoly.var(dom, var, k),
                                    a2_inv=a2inv).expanded
            bot = form.coeff_of(var, lo)
            cur = cur - form * cur.coeff_of(var, lo) * _inv_mono(bot)
        else:
            return cur
        guard += 1
        if guard > 10000:
            raise DomainError("frak reduction does not terminate")
    return cur


def _inv_mono(p: LaurentPoly):
    mono = p.as_monomial()
    if mono is None:
        raise DomainError("not a unit")
    return LaurentPoly.monomial(p.dom, p.dom.inv(mono[0]),
                                {v: -e for v, e in zip(p.vars, mono[1])})


# ---------------------------------------------------------------------------
# the ell basis attached to a partition
# ---------------------------------------------------------------------------

class EllBasis:
    """The polynomials l_{I,i}, i = 0..n-1, for a balanced partition of
    {1..2n}, over formal or numeric frak roots.

    ``a_value``/``q2`` may be domain scalars or formal variables, so the
    same construction serves exact symbolic checks (a, q free) and
    specializations (a = 1, q a root of unity).
    """

    def __init__(self, partition, n, dom, roots=None, a_value=None,
                 q2_value=None, var="s", a_inv_value=None):
        i_minus, i_plus = partition
        if sorted(list(i_minus) + list(i_plus)) != list(range(1, 2 * n + 1)):
            raise PreconditionError("not a partition of {1..2n}")
        if len(i_minus) != len(i_plus):
            raise PreconditionError("partition must be balanced")
        self.n = n
        self.dom = dom
        self.var = var
        if roots is None:
            roots = [LaurentPoly.var(dom, f"b{j + 1}") for j in range(2 * n)]
        else:
            roots = [r if isinstance(r, LaurentPoly)
                     else LaurentPoly.const(dom, r) for r in roots]
        self.roots = roots
        self.a = a_value if a_value is not None else LaurentPoly.var(dom, "a")
        if not isinstance(self.a, LaurentPoly):
            self.a = LaurentPoly.const(dom, self.a)
        self.q2 = q2_value if q2_value is not None \
            else LaurentPoly.var(dom, "fq") ** 2
        if not isinstance(self.q2, LaurentPoly):
            self.q2 = LaurentPoly.const(dom, self.q2)
        if a_inv_value is not None:
            self.a_inv = a_inv_value if isinstance(a_inv_value, LaurentPoly) \
                else LaurentPoly.const(dom, a_inv_value)
        else:
            self.a_inv = _inv_mono(self.a)
        s = LaurentPoly.var(dom, var)
        self.p_minus = _prod(dom, s, [roots[j - 1] for j in i_minus])
        self.p_plus = _prod(dom, s, [roots[j - 1] for j in i_plus])
        self.partition = (tuple(i_minus), tuple(i_plus))
        self.polys = [self._ell(i) for i in range(n)]

    def _poly_part(self, p, shift):
        """[s^{shift} p(s)]_>= , the polynomial part."""
        out = LaurentPoly.zero(self.dom, (self.var,))
        for e, c in p.coeffs_by(self.var).items():
            if e + shift >= 0:
                out = out + c * LaurentPoly.var(self.dom, self.var, e + shift)
        return out

    def _ell(self, i):
        n, dom, var = self.n, self.dom, self.var
        q2 = self.q2
        a = self.a
        ppi = self._poly_part(self.p_plus, i - n)
        pmi = self._poly_part(self.p_minus, i - n)
        ppi_q = _subst_scale(ppi, var, q2)
        pmi_q = _subst_scale(pmi, var, q2)
        pp_q = _subst_scale(self.p_plus, var, q2)
        term1 = self.p_minus * (ppi - ppi_q)
        term2 = (q2 ** (i - n)) * pp_q * (pmi - a * a * pmi_q)
        return self.a_inv * (term1 + term2)

    def wedge(self, skip_zero=False):
        polys = self.polys[1:] if skip_zero else self.polys
        k = len(polys)
        sv = tuple(f"s{i + 1}" for i in range(k))
        from .laurent import wedge as _wedge
        return _wedge([p.rename({self.var: "_w"}) for p in polys], sv,
                      placeholder="_w")

    def generating_mismatch(self):
        """Cross-multiplied difference between sum_i (q^2 t)^{n-i} l_{I,i}
        and the closed rational form; zero iff the two constructions agree.
        """
        n, dom, var = self.n, self.dom, self.var
        q2, a = self.q2, self.a
        t = LaurentPoly.var(dom, "t")
        s = LaurentPoly.var(dom, var)
        lhs = LaurentPoly.zero(dom)
        for i in range(n):
            lhs = lhs + (q2 * t) ** (n - i) * self.polys[i]
        p_all = self.p_minus * self.p_plus
        p_q2s = _subst_scale(p_all, var, q2)
        pp_q2t = _subst_scale(self.p_plus.rename({var: "t"}), "t", q2)
        pm_t = self.p_minus.rename({var: "t"})
        pp_q2s = _subst_scale(self.p_plus, var, q2)
        ainv = self.a_inv
        d1 = t - q2 * s          # t - q^2 s
        d2 = q2 * t - s          # q^2 t - s
        d3 = t - s
        # closed form times d1*d2*d3
        rhs = (a * t * p_q2s) * d2 * d3 \
            - (ainv * q2 * t * p_all) * d1 * d3 \
            + pp_q2t * self.p_minus * (ainv * q2 * t * d1 * d3
                                       - ainv * t * d1 * d2) \
            + pm_t * pp_q2s * (ainv * t * d1 * d2 - a * t * d2 * d3)
        return lhs * d1 * d2 * d3 - rhs


def _prod(dom, x, roots):
    out = LaurentPoly.const(dom, dom.one)
    for r in roots:
        out = out * (x - r)
    return out


def _subst_scale(p: LaurentPoly, var: str, factor: LaurentPoly):
    """p with var -> factor * var, for polynomial ``factor`` (e.g. q^2)."""
    out = LaurentPoly.zero(p.dom)
    for e, c in p.coeffs_by(var).items():
        out = out + c * (factor ** e) * LaurentPoly.var(p.dom, var, e)
    return out


def ell_basis(partition, n, params=None, dom=None, roots=None,
              numeric=False, var="s") -> EllBasis:
    """Build the partition basis; formal a, q by default, specialized
    values when ``numeric`` and ``params`` are given."""
    if numeric:
        dom = dom or params.dom
        a = params.a_root.realize(dom)
        q2 = (params.frak_q_root ** 2).realize(dom)
        return EllBasis(partition, n, dom, roots=roots, a_value=a,
                        q2_value=q2, var=var)
    from .scalars import QQ
    dom = dom or QQ
    return EllBasis(partition, n, dom, roots=roots, var=var)


# ---------------------------------------------------------------------------
# the closed-form omega polynomial
# ---------------------------------------------------------------------------

def omega_polynomial(n: int, nu, dom, roots=None, zvar="Z", xvar="X"):
    """L^{(n)}_{Z,X}: the (n+1)x(n+1) determinant with C(Z, S_j) in the
    first row and odd X powers in the first column, over P(-Z)P(-X)."""
    C = c_poly(n, Fraction(nu), dom, roots=roots)
    sv = svars(n)
    rows = [[LaurentPoly.zero(dom)] + [C.at(zvar, s) for s in sv]]
    for i in range(1, n + 1):
        rows.append([LaurentPoly.var(dom, xvar, 2 * i - 1)] +
                    [LaurentPoly.var(dom, s, 2 * i - 1) for s in sv])
    num = _poly_det(rows) * phi_unit(dom, 0)
    sec = s_sector_like(dom, n, roots, "S")
    den = sec.P_minus().rename({"S": zvar}) * \
        sec.P_minus().rename({"S": xvar})
    return RatFunc(num, den)


# ---------------------------------------------------------------------------
# the main determinant identity over free symbols g[r,s]
# ---------------------------------------------------------------------------

def g_symbol(dom, r: int, s: int):
    return LaurentPoly.var(dom, f"g[{r},{s}]")


def pair_g(N_wedge: LaurentPoly, n: int, dom, L_vars=None):
    """Pairing of a formal pure wedge l_1 ^ .. ^ l_n against ``N_wedge``,
    expanded over the symbols g[r,s] = (l_r, S^s)."""
    L_vars = tuple(L_vars) if L_vars else svars(n)
    coords = wedge_coords(N_wedge, L_vars)
    out = LaurentPoly.zero(dom)
    for exps, c in coords.items():
        mat = [[g_symbol(dom, r + 1, s) for s in exps] for r in range(n)]
        out = out + c * _poly_det(mat)
    return out


def verify_det_identity(n: int, k: int, nu, dom, sample=None) -> bool:
    """det_{ij} omega(Z_i, X_j; l) * (l, M0)^{k-1} == (l, W-word): the
    bridge between the closed omega form and the plain fermion word,
    as a polynomial identity over g[r,s] (and B, Z, X); ``sample``
    evaluates B/Z/X first for randomized testing."""
    from .fermions import FermionWord, word_determinant_plain
    from .towers import primary_tower

    roots = None
    if sample is not None:
        roots = [sample[f"B{j + 1}"] for j in range(2 * n)]
    lhs_mat = []
    for i in range(1, k + 1):
        row = []
        for j in range(1, k + 1):
            om = omega_polynomial(n, nu, dom, roots=roots,
                                  zvar=f"Z{i}", xvar=f"X{j}")
            row.append(pair_g(om.num.subst("Phi[0]", dom.one), n, dom))
        lhs_mat.append(row)
    lhs = _poly_det(lhs_mat)
    m0 = primary_tower(n, dom).component(n, n).subst("Phi[0]", dom.one)
    pm0 = pair_g(m0, n, dom)
    factors = " ".join(f"psi0*(Z{i})" for i in range(1, k + 1)) + " " + \
        " ".join(f"chi0*(X{j})" for j in range(k, 0, -1))
    word = FermionWord.parse(factors)
    wval = word_determinant_plain(word, n, Fraction(nu), dom, roots=roots)
    rhs = pair_g(wval.num.subst("Phi[0]", dom.one), n, dom)
    for _ in range(k - 1):
        rhs = rhs * pm0
    diff = lhs - rhs
    if sample is not None:
        assign = {v: sample[v] for v in diff.used_vars() if v in sample}
        diff = diff.eval(assign)
    return diff.is_zero()


# ---------------------------------------------------------------------------
# omega_0 pm identity
# ---------------------------------------------------------------------------

def omega0_pm_identity(n: int, order: int, params, sign: str,
                       dom=None, roots=None) -> bool:
    """delta-zeta delta-xi acting on the cotangent series, times
    P(-Z)P(-X), equals C_pm(Z, X) order by order.

    The lattice shift zeta -> zeta q acts on Z as Z -> -Z; this check is
    what fixes that convention.
    """
    from .fermions import c_pm_series
    dom = dom or params.dom
    alpha, nu = params.alpha, params.nu
    sec = s_sector_like(dom, n, roots, "Z")
    P = sec.P
    Pm = sec.P_minus()
    PX, PmX = P.rename({"Z": "X"}), Pm.rename({"Z": "X"})
    quarter = dom.mul(dom.unit_root(Fraction(1, 2)),
                      dom.inv(dom.of(4 * Fraction(nu))))
    F = LaurentPoly.zero(dom, ("Z", "X"))
    J = order + 2 * n + 1
    rng = range(0, J + 1) if sign == "+" else range(1, J + 1)
    for j in rng:
        arg = alpha + Fraction(j) / nu if sign == "+" \
            else alpha - Fraction(j) / nu
        c = params.cot_half(arg)
        mono = {"X": j, "Z": -j} if sign == "+" else {"Z": j, "X": -j}
        F = F + LaurentPoly.monomial(
            dom, dom.mul(quarter, dom.mul(dom.of((-1) ** (j % 2)), c)), mono)
    mm = F.scale_var("Z", dom.neg(dom.one)).scale_var("X", dom.neg(dom.one))
    pz = F.scale_var("X", dom.neg(dom.one))
    px = F.scale_var("Z", dom.neg(dom.one))
    val = Pm * PmX * mm - P * PmX * pz - Pm * PX * px + P * PX * F
    if sign == "+":
        val = -val
    C = c_pm_series(n, params, order + 2 * n + 1, sign, zvar="Z", svar="X",
                    roots=roots)
    if sign == "+":
        window = {"lo": 2 * n - 1 - order}
    else:
        window = {"hi": 1 - 2 * n + order}
    diff = (val - C).truncate("Z", **window)
    return _is_small(diff, dom)


def _is_small(p: LaurentPoly, dom) -> bool:
    if getattr(dom, "exact", True):
        return p.is_zero()
    import mpmath
    tol = mpmath.mpf(2) ** (-100)
    return all(abs(c) <= tol for c in p.terms.values()) or p.is_zero()


# ---------------------------------------------------------------------------
# the shift identity
# ---------------------------------------------------------------------------

def shift_symbol_map(v: LaurentPoly, m: int, dom) -> LaurentPoly:
    """Rewrite pairing symbols at the shifted twist: I[m0,l] -> I[m0,l+m]."""
    out = LaurentPoly.zero(dom)
    for exps, c in v.terms.items():
        mono = {}
        for name, e in zip(v.vars, exps):
            if name.startswith("I[") and e:
                m0, l0 = map(int, name[2:-1].split(","))
                mono[f"I[{m0},{l0 + m}]"] = mono.get(
                    f"I[{m0},{l0 + m}]", 0) + e
            elif e:
                mono[name] = mono.get(name, 0) + e
        out = out + LaurentPoly.monomial(dom, c, mono)
    return out


def check_shift_identity(n: int, m: int, partition, dom, seed=0) -> bool:
    """(l_I(a'), L)_{alpha + m(1-nu)/nu} = (-1)^{mn} (l_I(a), L prod S^m),
    with a' = (-1)^m a, as an identity of pairing symbols with formal a, q.
    """
    from .scalars import pit_sample
    eb = ell_basis(partition, n, dom=dom)
    ell = eb.wedge()
    sv = svars(n)
    L = monomial_wedge(dom, tuple(range(1, 2 * n, 2)), sv)
    lhs_base = pair_wedge(ell, L, n)
    lhs = shift_symbol_map(lhs_base, m, dom)
    if m % 2:
        lhs = lhs.subst("a", -LaurentPoly.var(dom, "a"))
    prod_s = LaurentPoly.const(dom, dom.one)
    for v in sv:
        prod_s = prod_s * LaurentPoly.var(dom, v, m)
    rhs = pair_wedge(ell, L * prod_s, n)
    if (m * n) % 2:
        rhs = -rhs
    return (lhs - rhs).is_zero()


# ---------------------------------------------------------------------------
# the alpha -> 0 limit formula for the partition basis
# ---------------------------------------------------------------------------

def residue_symbol(dom, series_frak: AsymptoticSeries,
                   series_S: AsymptoticSeries, m: int, l: int, kappa):
    """kappa * [res_+(s^m) Res_+(S^l) - res_-(s^m) Res_-(S^l)]: the pole
    part of the symbol I[m,l] in the twist variable eps = a - 1, after
    dividing out one factor of (-2 pi i).  kappa = 1/2."""
    sm = LaurentPoly.var(dom, "s", m)
    Sl = LaurentPoly.var(dom, "S", l)
    rp = series_frak.res_plus(sm, "s") * series_S.res_plus(Sl, "S")
    rm = series_frak.res_minus(sm, "s") * series_S.res_minus(Sl, "S")
    return (rp - rm).scale(dom.of(kappa))


def check_limit_pairing_formula(n: int, partition, params, N_wedge,
                                order=None) -> bool:
    """The alpha -> 0 limit of (l^{(n)}_I, N^{(n)}) against the two-residue
    decomposition through res_pm / Res_pm.

    Both sides are expanded to first order in eps = a - 1 with the pairing
    symbols modelled as kappa R[m,l]/eps + J[m,l] (R computed from the
    asymptotic series, J free); equality is then an identity in the J's.
    The frak roots are squares t_j^2 so the half-integer prefactors are
    exact.
    """
    dom = params.dom
    K = order or (2 * n + 2)
    tvars = [LaurentPoly.var(dom, f"t{j + 1}") for j in range(2 * n)]
    frak_roots = [t * t for t in tvars]
    fser = AsymptoticSeries(
        frak_sector(params, n, dom=dom, roots=frak_roots, var="s",
                    sqrt_roots=tvars), K, frak=True)
    sser = AsymptoticSeries(s_sector(params, n, dom=dom), K, frak=False)
    kappa = Fraction(1, 2)

    eps = LaurentPoly.var(dom, "eps")

    def jet_trunc(p):
        return p.truncate("eps", lo=-1, hi=1)

    # ell polynomials with a = 1 + eps (a^{-1} = 1 - eps + O(eps^2)); the
    # O(eps^2) slack cannot reach the eps^0 coefficient through the simple
    # pole, so first-order data suffices.
    one_eps = LaurentPoly.const(dom, dom.one) + eps
    q2 = (params.frak_q_root ** 2).realize(dom)
    eb = EllBasis(partition, n, dom, roots=frak_roots, a_value=dom.one,
                  q2_value=q2, var="s")
    eb_eps = EllBasis(partition, n, dom, roots=frak_roots,
                      a_value=one_eps,
                      a_inv_value=LaurentPoly.const(dom, dom.one) - eps,
                      q2_value=q2, var="s")
    ells = [jet_trunc(p) for p in eb_eps.polys]

    def syms(v, tag):
        """replace I[m,l] by kappa R/eps + J[m,l] inside a pairing value"""
        out = LaurentPoly.zero(dom)
        for exps, c in v.terms.items():
            mono = LaurentPoly.const(dom, c)
            for name, e in zip(v.vars, exps):
                if not e:
                    continue
                if name.startswith("I["):
                    m0, l0 = map(int, name[2:-1].split(","))
                    R = residue_symbol(dom, fser, sser, m0, l0, kappa)
                    base = R * LaurentPoly.var(dom, "eps", -1) + \
                        LaurentPoly.var(dom, f"J[{m0},{l0}]")
                    for _ in range(e):
                        mono = jet_trunc(mono * base)
                else:
                    mono = mono * LaurentPoly.var(dom, name, e)
            out = jet_trunc(out + mono)
        return out

    sv = svars(n)
    ell_vars = tuple(f"s{i + 1}" for i in range(n))
    from .laurent import wedge as _wedge
    ell_w = _wedge([p.rename({"s": "_w"}) for p in ells], ell_vars,
                   placeholder="_w")
    lhs_sym = pair_wedge(ell_w, N_wedge, n, ell_vars, sv)
    lhs = syms(lhs_sym, "lhs")
    if not lhs.truncate("eps", hi=-1).is_zero():
        return False  # unexpected pole survives
    lhs0 = lhs.coeff_of("eps", 0)

    # rhs, in this library's residue normalization (Res_+ is the plain
    # coefficient extraction, i.e. minus the residue at infinity):
    #   - (tilde l, Res_+ N) + (-1)^n q^{-n} prod_{I^-} t^{-1} prod_{I^+} t
    #                                              * (tilde l, Res_- N),
    # both sides divided by (-2 pi i)^n.  The prefactor equals
    # res_-[p_{I^+}(s q^2)] / q^{2n}, which the l_{I,0} row contributes.
    res_p = sser.res_wedge(N_wedge, sv, "+")
    res_m = sser.res_wedge(N_wedge, sv, "-")
    if n == 1:
        term_p, term_m = res_p, res_m   # arity-0 pairing is a plain product
    else:
        # the right-hand pairings are limits of the alpha-dependent
        # pairings, so the tilde-l rows keep their first-order jets too
        tell = _wedge([p.rename({"s": "_w"}) for p in ells[1:]],
                      tuple(f"s{i + 1}" for i in range(n - 1)),
                      placeholder="_w")
        svm1 = svars(n - 1)
        term_p = pair_wedge(tell, res_p, n - 1,
                            tuple(f"s{i + 1}" for i in range(n - 1)), svm1)
        term_m = pair_wedge(tell, res_m, n - 1,
                            tuple(f"s{i + 1}" for i in range(n - 1)), svm1)
    pref = LaurentPoly.const(dom, (params.frak_q_root ** (-n)).realize(dom))
    if n % 2:
        pref = -pref
    im, ip = eb.partition
    for j in im:
        pref = pref * LaurentPoly.var(dom, f"t{j}", -1)
    for j in ip:
        pref = pref * LaurentPoly.var(dom, f"t{j}", 1)
    rhs_sym = -term_p + pref * term_m
    rhs = syms(rhs_sym, "rhs")
    if not rhs.truncate("eps", hi=-1).is_zero():
        return False
    rhs0 = rhs.coeff_of("eps", 0)
    return (lhs0 - rhs0).is_zero()
