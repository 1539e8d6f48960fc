"""Towers: per-particle-number families of antisymmetric Laurent polynomials
linked by the specialization recurrence, together with the action of the
local integrals of motion.

A component ``(l, n)`` lives in variables ``S1..Sl`` over ``B1..B{2n}``.
Normalization constants of primaries are opaque symbolic units, carried as
extra variables ``Phi[m]`` that are never expanded.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import StructureError
from .laurent import LaurentPoly, RatFunc, monomial_wedge, series_exp, series_inv, series_sqrt, p_polynomials
from .scalars import QQ


def svars(l: int):
    return tuple(f"S{i + 1}" for i in range(l))


def bvars(n: int):
    return tuple(f"B{j + 1}" for j in range(2 * n))


def phi_unit(dom, m: int = 0):
    """The opaque normalization <Phi_{alpha + 2m(1-nu)/nu}> as a formal unit."""
    return LaurentPoly.var(dom, f"Phi[{m}]")


@dataclass
class Tower:
    """A charge-c family of components (l, n), l - n = c, n <= n_max."""

    charge: int
    components: dict = field(default_factory=dict)  # (l, n) -> poly / RatFunc
    n_max: int = 0

    def component(self, l: int, n: int):
        try:
            return self.components[(l, n)]
        except KeyError:
            raise StructureError(f"tower has no component (l={l}, n={n})")

    def set_component(self, l: int, n: int, value):
        if l - n != self.charge:
            raise StructureError(
                f"component (l={l}, n={n}) has charge {l - n} != {self.charge}")
        self.components[(l, n)] = value
        self.n_max = max(self.n_max, n)

    def map_components(self, fn) -> "Tower":
        out = Tower(self.charge, n_max=self.n_max)
        for (l, n), v in self.components.items():
            out.components[(l, n)] = fn(l, n, v)
        return out

    def to_json(self):
        return {
            "charge": self.charge,
            "n_max": self.n_max,
            "components": {
                f"{l},{n}": (v.to_json() if isinstance(v, LaurentPoly)
                             else {"num": v.num.to_json(),
                                   "den": v.den.to_json()})
                for (l, n), v in sorted(self.components.items())
            },
        }


def primary_tower(n_max: int, dom=QQ) -> Tower:
    """The charge-0 tower of the primary field: S ^ S^3 ^ ... ^ S^{2n-1}."""
    t = Tower(0)
    unit = phi_unit(dom, 0)
    t.set_component(0, 0, unit)
    for n in range(1, n_max + 1):
        w = monomial_wedge(dom, tuple(range(1, 2 * n, 2)), svars(n))
        t.set_component(n, n, w * unit)
    return t


def shifted_primary_tower(m: int, n_max: int, dom=QQ) -> Tower:
    """The tower of the shifted primary (weight m).

    Components are S^{2m+1} ^ S^{2m+3} ^ ... ^ S^{2n+2m-1} * prod_j B_j^{-m},
    times an extra sign (-1)^{m n} which makes the defining recurrence hold
    for every n (the sign is invisible in any single component's role as a
    form-factor polynomial).
    """
    t = Tower(0)
    unit = phi_unit(dom, m)
    t.set_component(0, 0, unit)
    for n in range(1, n_max + 1):
        exps = tuple(range(2 * m + 1, 2 * n + 2 * m, 2))
        w = monomial_wedge(dom, exps, svars(n))
        bmono = LaurentPoly.monomial(
            dom, dom.one, {b: -m for b in bvars(n)})
        comp = w * bmono * unit
        if (m * n) % 2:
            comp = -comp
        t.set_component(n, n, comp)
    return t


def check_recurrence(tower: Tower, n: int, sample=None):
    """Verify the defining specialization identity linking (l, n) to (l-1, n-1).

    Substitutes B_{2n-1} = B, B_{2n} = -B, S_l = B (B a fresh symbol) and
    compares with (-1)^c * B * prod_{p<l} (B^2 - S_p^2) * L^{(l-1,n-1)}.
    Returns (ok, witness); the witness is the difference when it fails.
    With ``sample`` (a dict of scalar values) the comparison is done at that
    evaluation point instead of symbolically.
    """
    c = tower.charge
    l = n + c
    hi = tower.component(l, n)
    lo = tower.component(l - 1, n - 1)
    wrap = isinstance(hi, RatFunc) or isinstance(lo, RatFunc)
    if wrap:
        hi, lo = RatFunc.of(hi), RatFunc.of(lo)
    dom = hi.dom if wrap else hi.dom
    B = LaurentPoly.var(dom, "Brec")
    lhs = hi.subst(f"S{l}", B).subst(f"B{2 * n - 1}", B).subst(f"B{2 * n}", -B)
    factor = LaurentPoly.const(dom, dom.one, ("Brec",))
    for p in range(1, l):
        sp = LaurentPoly.var(dom, f"S{p}")
        factor = factor * (B * B - sp * sp)
    rhs = lo * factor * B
    if c % 2:
        rhs = -rhs
    diff = lhs - rhs
    if sample is not None:
        if wrap:
            val = diff.eval_scalar(sample)
            return dom.is_zero(val), val
        val = diff.eval(sample)
        return val.is_zero(), val
    return diff.is_zero(), diff


def im_value(dom, n: int, j: int, barred: bool = False):
    """I_{2j-1,n} = sum_k B_k^{2j-1} (barred: negative powers)."""
    e = -(2 * j - 1) if barred else 2 * j - 1
    out = LaurentPoly.zero(dom, bvars(n))
    for b in bvars(n):
        out = out + LaurentPoly.var(dom, b, e)
    return out


def im_multiply(tower: Tower, f: LaurentPoly) -> Tower:
    """Multiply every component by f evaluated at its own n's IM values.

    ``f`` is a polynomial in variables ``I1, I3, ...`` and ``Ibar1, ...``.
    The recurrence survives because B^{2j-1} + (-B)^{2j-1} = 0.
    """
    dom = f.dom

    def act(l, n, comp):
        val = f
        for name in f.vars:
            if name.startswith("Ibar"):
                j = (int(name[4:]) + 1) // 2
                val = val.subst(name, im_value(dom, n, j, barred=True))
            elif name.startswith("I"):
                j = (int(name[1:]) + 1) // 2
                val = val.subst(name, im_value(dom, n, j, barred=False))
        return comp * val

    return tower.map_components(act)


def im_generating_exponent(dom, n: int, order: int, barred: bool = False):
    """X_n(Z) (or bar X_n) truncated: sum_j Z^{-(2j-1)} I_{2j-1,n} / (2j-1)."""
    out = LaurentPoly.zero(dom, ("Z",) + bvars(n))
    j = 1
    while 2 * j - 1 <= order:
        e = 2 * j - 1
        coeff = im_value(dom, n, j, barred=barred).scale(
            dom.inv(dom.of(e)))
        z = LaurentPoly.var(dom, "Z", e if barred else -e)
        out = out + z * coeff
        j += 1
    return out


def sqrt_P_ratio(dom, n: int, order: int, at: str = "inf"):
    """Series of sqrt(P(-Z)/P(Z)) at Z -> infinity or 0, to ``order``."""
    P = p_polynomials(n, dom, var="Z")
    Pm = P.scale_var("Z", dom.neg(dom.one))
    ratio = (Pm * series_inv(P, "Z", order + 2 * n, at)).truncate(
        "Z", **({"lo": -order} if at == "inf" else {"hi": order}))
    one = LaurentPoly.const(dom, dom.one, ratio.vars)
    return series_sqrt(ratio, "Z", order, at, one)


def im_exp_matches_sqrt(dom, n: int, order: int, barred: bool = False) -> bool:
    """exp(X_n(Z)) agrees with sqrt(P(-Z)/P(Z)) order by order."""
    at = "zero" if barred else "inf"
    xn = im_generating_exponent(dom, n, order, barred=barred)
    lhs = series_exp(xn, "Z", order, at)
    rhs = sqrt_P_ratio(dom, n, order, at)
    return (lhs - rhs).is_zero()
