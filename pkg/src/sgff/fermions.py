"""Fermion operators acting on towers.

The plain operators act by wedging with the two-variable polynomial C_n and
by odd-part extraction, with a 1/P(-Z) prefactor.  The dressed operators
replace C_n by the series C_+ / C_- (built from the cotangent series tau_pm)
and the prefactor by 1/sqrt(P(Z)P(-Z)), and acquire the off-diagonal pairing
block of the Bogolubov transform.  Multi-fermion states are evaluated either
sequentially or through the block determinant; Fourier modes are coefficient
extractions, never analytic continuations.

Convention: a word's factors are applied to the tower left to right, i.e.
``psi0*(Z) chi0*(X) M0`` applies psi0* first.  With this reading the
n = 1 value of that word is  -<Phi> X C_1(Z,S_1) / (P(-Z)P(-X)).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (DomainError, PreconditionError, ResonanceError,
                     TruncationError)
from .laurent import (LaurentPoly, RatFunc, coeff_of_product, divide_linear,
                      perm_sign, series_inv, series_sqrt, wedge_join)
from .towers import Tower, phi_unit, svars
from .exact_residue import Sector, s_sector


# ---------------------------------------------------------------------------
# the C polynomial
# ---------------------------------------------------------------------------

@dataclass
class CPolynomial:
    n: int
    poly: LaurentPoly           # in variables (var1, var2)
    var1: str
    var2: str

    def at(self, x1, x2):
        """C_n with the two slots renamed / substituted."""
        out = self.poly
        for var, val in ((self.var1, x1), (self.var2, x2)):
            if isinstance(val, str):
                out = out.rename({var: val})
            else:
                out = out.subst(var, val)
        return out


def c_poly(n: int, nu: Fraction, dom, roots=None, var1="Cx", var2="Cy",
           sector: Sector = None) -> CPolynomial:
    """C_n(S1, S2): odd in S1, even in S2, degrees (2n-1, 2n-2).

    Built from the partial-fraction pairing of P(±S1)P(±S2) over
    (eps1 S1 + eps2 S2), which combines into two exact linear divisions.
    """
    if sector is None:
        sector = s_sector_like(dom, n, roots, var1)
    P1 = sector.P.rename({sector.var: var1}) if sector.var != var1 else sector.P
    P2 = P1.rename({var1: var2})
    m1 = P1.scale_var(var1, dom.neg(dom.one))
    m2 = P2.scale_var(var2, dom.neg(dom.one))
    part_sum = divide_linear(P1 * P2 - m1 * m2, var1, var2, -1)
    part_dif = divide_linear(P1 * m2 - m1 * P2, var1, var2, 1)
    pref = dom.inv(dom.of(4 * Fraction(nu)))
    poly = LaurentPoly.var(dom, var1) * (part_sum + part_dif)
    return CPolynomial(n, poly.scale(pref), var1, var2)


def s_sector_like(dom, n, roots, var):
    from .scalars import UnitRoot
    if roots is None:
        roots = [LaurentPoly.var(dom, f"B{j + 1}") for j in range(2 * n)]
    return Sector(dom, var, roots, UnitRoot(Fraction(0)))


# ---------------------------------------------------------------------------
# plain fermions psi0*, chi0* on towers
# ---------------------------------------------------------------------------

def apply_psi0(tower: Tower, nu: Fraction, dom, zvar="Z", roots_of=None) -> Tower:
    """(psi0*(Z) L)^{(l+1,n)} = 1/P_n(-Z) * sum_j (-1)^j C_n(Z,S_j) L(rest)."""
    out = Tower(tower.charge + 1)
    for (l, n), comp in sorted(tower.components.items()):
        sec = s_sector_like(dom, n, roots_of(n) if roots_of else None, "S")
        C = c_poly(n, nu, dom, sector=sec)
        cz = C.at(zvar, "_slot")
        comp_p = RatFunc.of(comp)
        num = wedge_join(cz, ("_slot",), comp_p.num, svars(l), svars(l + 1))
        pm = sec.P_minus().rename({"S": zvar})
        out.set_component(l + 1, n, RatFunc(num, comp_p.den * pm))
    return out


def apply_chi0(tower: Tower, dom, zvar="Z", roots_of=None) -> Tower:
    """(chi0*(Z) L)^{(l-1,n)} = 1/P_n(-Z) * (L(Z,...) - L(-Z,...)) / 2."""
    out = Tower(tower.charge - 1)
    half = dom.inv(dom.of(2))
    for (l, n), comp in sorted(tower.components.items()):
        if l == 0:
            continue
        sec = s_sector_like(dom, n, roots_of(n) if roots_of else None, "S")
        comp_p = RatFunc.of(comp)
        z = LaurentPoly.var(dom, zvar)
        plus = comp_p.num.subst("S1", z)
        minus = comp_p.num.subst("S1", -z)
        shift = {f"S{i + 1}": f"S{i}" for i in range(1, l)}
        num = ((plus - minus) * half).rename(shift) if shift else \
            (plus - minus) * half
        pm = sec.P_minus().rename({"S": zvar})
        out.set_component(l - 1, n, RatFunc(num, comp_p.den * pm))
    return out


# ---------------------------------------------------------------------------
# tau series and the C_pm series
# ---------------------------------------------------------------------------

def tau_series(sign: str, order: int, params) -> dict:
    """Coefficients {l: tau_l} of tau_pm(x) = sum tau_l x^l.

    tau_+ runs over l >= 0, tau_- over l <= -1; both carry
    (i/2 nu) cot(pi/2 (alpha + l/nu)) with the displayed signs.
    Cotangent poles raise ResonanceError.
    """
    dom = params.dom
    i_half_nu = dom.mul(dom.unit_root(Fraction(1, 2)),
                        dom.inv(dom.of(2 * params.nu)))
    out = {}
    if sign == "+":
        rng = range(0, order + 1)
        outer = dom.neg(dom.one)
    elif sign == "-":
        rng = range(-order, 0)
        outer = dom.one
    else:
        raise PreconditionError("sign must be '+' or '-'")
    for l in rng:
        c = params.cot_half(params.alpha + Fraction(l) / params.nu)
        val = dom.mul(outer, dom.mul(dom.of((-1) ** (l % 2)),
                                     dom.mul(i_half_nu, c)))
        out[l] = val
    return out


def c_pm_series(n: int, params, order: int, sign: str, zvar="Z", svar="Sc",
                roots=None) -> LaurentPoly:
    """C_{+,n}(Z, S) (sign '+', expansion at Z -> infinity, Z-exponents
    kept >= 2n-1-order) or C_{-,n} (sign '-', at Z -> 0, exponents <=
    1-2n+order ... i.e. ``order`` powers beyond the extreme one).

    C_pm = (i/4 nu) * sgn * sum_l (-1)^l cot_l (S/Z)^l G_l(Z) G_l(S),
    G_l(Y) = P(Y) - (-1)^l P(-Y).
    """
    dom = params.dom
    sec = s_sector_like(dom, n, roots, zvar)
    P = sec.P
    Pm = sec.P_minus()
    lmax = order + 2 * n + 1
    taus = {}
    if sign == "+":
        ls = range(0, lmax + 1)
    else:
        ls = range(-lmax, 0)
    quarter = dom.mul(dom.unit_root(Fraction(1, 2)),
                      dom.inv(dom.of(4 * Fraction(params.nu))))
    if sign == "+":
        quarter = dom.neg(quarter)
    out = LaurentPoly.zero(dom, (zvar, svar))
    geven = P - Pm          # odd part doubled:  l even
    godd = P + Pm           # even part doubled: l odd
    geven_s = geven.rename({zvar: svar})
    godd_s = godd.rename({zvar: svar})
    for l in ls:
        c = params.cot_half(params.alpha + Fraction(l) / params.nu)
        if dom.is_zero(c):
            continue
        gz = geven if l % 2 == 0 else godd
        gs = geven_s if l % 2 == 0 else godd_s
        coeff = dom.mul(quarter, dom.mul(dom.of((-1) ** (l % 2)), c))
        term = gz * gs * LaurentPoly.monomial(dom, coeff,
                                              {zvar: -l, svar: l})
        out = out + term
    if sign == "+":
        return out.truncate(zvar, lo=2 * n - 1 - order)
    return out.truncate(zvar, hi=1 - 2 * n + order)


def c_pm_z_coefficient(n: int, params, j: int, sign: str, svar="S",
                       roots=None) -> LaurentPoly:
    """The polynomial multiplying Z^{2n-2j+1} in C_+ (sign '+') or
    Z^{2j-1} in C_- (sign '-'); for j in 1..n this is the representative
    p_{2j-1} resp. pbar_{2j-1} of the expansion."""
    if sign == "+":
        zpow = 2 * n - 2 * j + 1
        order = max(0, 2 * n - 1 - zpow)
        series = c_pm_series(n, params, order + 1, "+", svar=svar,
                             roots=roots)
    else:
        zpow = 2 * j - 1
        order = max(0, zpow - (1 - 2 * n))
        series = c_pm_series(n, params, order + 1, "-", svar=svar,
                             roots=roots)
    return series.coeff_of("Z", zpow)


# ---------------------------------------------------------------------------
# prefactor series 1/sqrt(P(Z)P(-Z))
# ---------------------------------------------------------------------------

def inv_sqrt_PP(sector: Sector, var: str, order: int, at: str):
    """Expansion of 1/sqrt(P(Z)P(-Z)) at infinity (root Z^{2n}) or at zero
    (root prod B_j, matching sqrt(P(-Z)/P(Z)) -> 1 at both ends)."""
    dom = sector.dom
    PP = sector.P * sector.P_minus()
    if at == "inf":
        root = LaurentPoly.var(dom, var, 2 * sector.n)
    else:
        root = sector.prod_roots()
    sq = series_sqrt(PP, var, 2 * order + 2, at, root)
    return series_inv(sq, var, order, at)


# ---------------------------------------------------------------------------
# fermion words
# ---------------------------------------------------------------------------

CREATION_KINDS = ("psi*", "psibar*", "chi*", "chibar*")
PLAIN_KINDS = ("psi0*", "chi0*")
_CHARGE = {"psi*": 1, "psibar*": 1, "psi0*": 1,
           "chi*": -1, "chibar*": -1, "chi0*": -1}
_WEIGHT = {"psi*": Fraction(1, 2), "chi*": Fraction(-1, 2),
           "chibar*": Fraction(1, 2), "psibar*": Fraction(-1, 2),
           "psi0*": Fraction(1, 2), "chi0*": Fraction(-1, 2)}


@dataclass(frozen=True)
class Factor:
    kind: str
    index: int = None     # odd positive Fourier index, or None
    var: str = None       # generating variable name, or None

    def __str__(self):
        if self.index is not None:
            return f"{self.kind}[{self.index}]"
        return f"{self.kind}({self.var})"


@dataclass
class FermionWord:
    """An ordered product of creation operators, applied left to right."""

    factors: list

    @staticmethod
    def parse(text: str) -> "FermionWord":
        """Parse e.g. 'psi*[1] chibar*[3]' or 'psi0*(Z) chi0*(X)'."""
        factors = []
        for tok in text.split():
            m = re.fullmatch(r"(psi0|chi0|psibar|chibar|psi|chi)\*"
                             r"(?:\[(\d+)\]|\((\w+)\))", tok)
            if not m:
                raise PreconditionError(f"cannot parse factor {tok!r}")
            kind = m.group(1) + "*"
            if m.group(2) is not None:
                idx = int(m.group(2))
                if idx <= 0 or idx % 2 == 0:
                    raise PreconditionError("mode indices are odd positive")
                factors.append(Factor(kind, index=idx))
            else:
                factors.append(Factor(kind, var=m.group(3)))
        return FermionWord(factors)

    def __str__(self):
        return " ".join(str(f) for f in self.factors)

    @property
    def charge(self) -> int:
        return sum(_CHARGE[f.kind] for f in self.factors)

    @property
    def weight(self) -> Fraction:
        return sum((_WEIGHT[f.kind] for f in self.factors), Fraction(0))

    def is_plain(self) -> bool:
        return all(f.kind in PLAIN_KINDS for f in self.factors)

    def canonical_mode_order(self):
        """Sort mode factors into the block order psi* (desc), psibar*
        (asc), chibar* (asc), chi* (desc); returns (sign, groups) or
        sign = 0 when a factor repeats (the word vanishes)."""
        for f in self.factors:
            if f.index is None:
                raise PreconditionError("canonical order needs mode factors")
        seen = set()
        for f in self.factors:
            key = (f.kind, f.index)
            if key in seen:
                return 0, None
            seen.add(key)
        rank = {"psi*": 0, "psibar*": 1, "chibar*": 2, "chi*": 3}
        keyed = []
        for f in self.factors:
            if f.kind == "psi*":
                sub = -f.index
            elif f.kind == "psibar*":
                sub = f.index
            elif f.kind == "chibar*":
                sub = f.index
            else:
                sub = -f.index
            keyed.append((rank[f.kind], sub, f))
        order = sorted(range(len(keyed)), key=lambda i: keyed[i][:2])
        perm = [0] * len(order)
        for newpos, old in enumerate(order):
            perm[newpos] = old
        sign = perm_sign(perm)
        sorted_factors = [keyed[i][2] for i in order]
        groups = {"psi*": [], "psibar*": [], "chibar*": [], "chi*": []}
        for f in sorted_factors:
            groups[f.kind].append(f.index)
        return sign, groups


# --- plain generating-variable determinant ---------------------------------

def poly_det(rows):
    """Determinant of a small matrix of LaurentPolys by permutation sum."""
    k = len(rows)
    if k == 0:
        raise PreconditionError("empty determinant")
    dom = None
    for row in rows:
        for x in row:
            if isinstance(x, LaurentPoly):
                dom = x.dom
                break
        if dom:
            break
    out = LaurentPoly.zero(dom)
    for perm in itertools.permutations(range(k)):
        term = LaurentPoly.const(dom, dom.one)
        zero = False
        for i in range(k):
            e = rows[i][perm[i]]
            if isinstance(e, LaurentPoly) and e.is_zero():
                zero = True
                break
            term = term * e
        if zero:
            continue
        out = out + (term if perm_sign(perm) > 0 else -term)
    return out


def word_determinant_plain(word: FermionWord, n: int, nu: Fraction, dom,
                           roots=None):
    """The (l, n) component of a plain generating word via the block
    determinant with vanishing pairing block.

    Value: <Phi> * det[[0 | C_n(Z_i, S_j)], [X_j^{2i-1} | S_j^{2i-1}]]
    / (prod_i P(-Z_i) prod_j P(-X_j)); no extra sign, matching the
    left-to-right sequential application of apply_psi0/apply_chi0.
    """
    # rows: psi0 factors in reverse application order; columns: chi0
    # factors in application order.  This orientation makes the determinant
    # equal (not merely proportional) to the sequential left-to-right value
    # for every word, including charged ones.
    zs = [f.var for f in reversed(word.factors) if f.kind == "psi0*"]
    xs = [f.var for f in word.factors if f.kind == "chi0*"]
    k, kp = len(zs), len(xs)
    l = n + k - kp
    if l < 0:
        raise PreconditionError("negative arity")
    sec = s_sector_like(dom, n, roots, "S")
    C = c_poly(n, nu, dom, sector=sec)
    sv = svars(l)
    rows = []
    for z in zs:
        rows.append([LaurentPoly.zero(dom) for _ in xs] +
                    [C.at(z, s) for s in sv])
    for i in range(1, n + 1):
        rows.append([LaurentPoly.var(dom, x, 2 * i - 1) for x in xs] +
                    [LaurentPoly.var(dom, s, 2 * i - 1) for s in sv])
    num = poly_det(rows) * phi_unit(dom, 0)
    den = LaurentPoly.const(dom, dom.one)
    for v in zs + xs:
        den = den * sec.P_minus().rename({"S": v})
    return RatFunc(num, den)


def apply_plain_word(word: FermionWord, n_max: int, nu: Fraction, dom,
                     base: Tower = None, roots_of=None) -> Tower:
    """Sequential evaluation of a plain word on the primary tower."""
    from .towers import primary_tower, bvars
    t = base if base is not None else primary_tower(n_max, dom)
    if roots_of is not None and base is None:
        def specialize(l, n, v):
            sub = dict(zip(bvars(n), roots_of(n)))
            return v.eval({k: x for k, x in sub.items() if k in v.vars})
        t = t.map_components(specialize)
    for f in word.factors:
        if f.kind == "psi0*":
            t = apply_psi0(t, nu, dom, zvar=f.var, roots_of=roots_of)
        elif f.kind == "chi0*":
            t = apply_chi0(t, dom, zvar=f.var, roots_of=roots_of)
        else:
            raise PreconditionError("plain words only")
    return t


# --- dressed Fourier-mode determinant ---------------------------------------

def word_determinant(word: FermionWord, n: int, params, dom=None,
                     modified=False, roots=None):
    """The (l, n) wedge component of a dressed Fourier-mode word.

    The matrix orientation matches the plain variant: rows are the
    psi*/psibar* factors in reverse application order, columns the
    chi*/chibar* factors in application order, so the determinant equals
    the left-to-right application of the word with no extra sign.  Each
    row/column folds in its own 1/sqrt(P(Z)P(-Z)) expansion (at infinity
    for unbarred, at zero for barred factors) before the Fourier
    coefficient is extracted.  Pairing-block entries exist only between
    psi* rows and chibar* columns (C_+) and between psibar* rows and chi*
    columns (C_-).  ``modified=True`` replaces the S-column entries by the
    polynomial C_n; the pairing block always keeps C_pm.
    """
    dom = dom or params.dom
    zfacs = [f for f in reversed(word.factors)
             if f.kind in ("psi*", "psibar*")]
    xfacs = [f for f in word.factors if f.kind in ("chi*", "chibar*")]
    k, kp = len(zfacs), len(xfacs)
    l = n + k - kp
    if l < 0:
        return LaurentPoly.zero(dom)
    sv = svars(l)
    amax = max([f.index for f in word.factors], default=1)
    order = amax + 2 * n + 2
    secZ = s_sector_like(dom, n, roots, "Z")
    fz_inf = inv_sqrt_PP(secZ, "Z", order, "inf")
    fz_zero = inv_sqrt_PP(secZ, "Z", order, "zero")
    fx_inf = fz_inf.rename({"Z": "X"})
    fx_zero = fz_zero.rename({"Z": "X"})
    Cpol = c_poly(n, Fraction(params.nu), dom, roots=roots,
                  var1="Z", var2="Sc")
    series = {}

    def cpm(sgn):
        if sgn not in series:
            series[sgn] = c_pm_series(n, params, order + 2 * n + 2, sgn,
                                      zvar="Z", svar="Sc", roots=roots)
        return series[sgn]

    def column_extract(poly_in_X, xfac):
        if xfac.kind == "chi*":
            return coeff_of_product(poly_in_X, fx_inf, "X", -xfac.index)
        return coeff_of_product(poly_in_X, fx_zero, "X", xfac.index)

    rows = []
    for zf in zfacs:
        if zf.kind == "psi*":
            pref, zexp, pair_kind, csgn = fz_inf, -zf.index, "chibar*", "+"
        else:
            pref, zexp, pair_kind, csgn = fz_zero, zf.index, "chi*", "-"
        zrow = coeff_of_product(cpm(csgn), pref, "Z", zexp)
        entries = []
        for xf in xfacs:
            if xf.kind == pair_kind:
                entries.append(column_extract(zrow.rename({"Sc": "X"}), xf))
            else:
                entries.append(LaurentPoly.zero(dom))
        base = Cpol.poly if modified else cpm(csgn)
        brow = coeff_of_product(base, pref, "Z", zexp)
        entries += [brow.rename({"Sc": s}) for s in sv]
        rows.append(entries)
    for i in range(1, n + 1):
        entries = [column_extract(LaurentPoly.var(dom, "X", 2 * i - 1), xf)
                   for xf in xfacs]
        entries += [LaurentPoly.var(dom, s, 2 * i - 1) for s in sv]
        rows.append(entries)
    return poly_det(rows) * phi_unit(dom, 0)


def leading_term(word: FermionWord, n: int, params, dom=None):
    """The extreme wedge of a dressed Fourier word: holes, particles and the
    cotangent prefactor.  Returns (scalar coefficient, B-power per variable,
    ascending exponent tuple, weight); raises PreconditionError when the
    ordering assumptions or the size of n do not hold.
    """
    dom = dom or params.dom
    sign, groups = word.canonical_mode_order()
    if sign == 0:
        raise PreconditionError("repeated factor: word vanishes")
    psis, psibars = groups["psi*"], groups["psibar*"]
    chibars, chis = groups["chibar*"], groups["chi*"]
    p, k = len(psis), len(psis) + len(psibars)
    q = len(chis)
    if q and chibars and 2 * n - max(chis) <= max(chibars):
        raise PreconditionError("n too small: hole blocks overlap")
    exps = set(range(1, 2 * n, 2))
    for b in chibars:
        if b not in exps:
            raise PreconditionError(f"hole S^{b} outside the filled zone")
        exps.remove(b)
    for b in chis:
        if 2 * n - b not in exps:
            raise PreconditionError(f"hole S^{2 * n - b} outside the zone")
        exps.remove(2 * n - b)
    for a in psis:
        exps.add(2 * n + a)
    for a in psibars:
        exps.add(-a)
    if len(exps) != n + k - q - len(chibars):
        raise PreconditionError("particle collides with the filled zone")
    coeff = dom.one
    i_over_nu = dom.mul(dom.unit_root(Fraction(1, 2)),
                        dom.inv(dom.of(Fraction(params.nu))))
    for a in psis:
        coeff = dom.mul(coeff, dom.mul(i_over_nu, params.cot_half(
            params.alpha + Fraction(a) / params.nu)))
    for a in psibars:
        coeff = dom.mul(coeff, dom.mul(i_over_nu, params.cot_half(
            params.alpha - Fraction(a) / params.nu)))
    m = Fraction(p - q + len(chibars) - len(psibars), 2)
    return coeff, q - p, tuple(sorted(exps)), m
