"""Coefficient arithmetic backends and coupling-constant bookkeeping.

Every identity in this library is checked over one of four coefficient
domains:

* ``QQ``      -- exact rationals (``fractions.Fraction``),
* ``QQi``     -- exact Gaussian rationals,
* ``GFp``     -- a prime field carrying an embedded primitive N-th root of
                 unity, used for exact randomized identity testing,
* ``MPC``     -- arbitrary-precision complex floats (mpmath).

Unit complex constants such as q = exp(i*pi*nu) are tracked exactly as
rational "angles" (:class:`UnitRoot`) and only realized inside a domain on
demand.  This makes resonance tests (q^k = 1, cot poles, A*Q^k = 1) exact
integer arithmetic regardless of the backend.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

import mpmath

from .errors import DomainError, ResonanceError

Rat = Fraction


# ---------------------------------------------------------------------------
# unit roots: exp(i*pi*u) with u rational, tracked mod 2
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitRoot:
    """The unit complex number exp(i*pi*u) with u rational, reduced mod 2."""

    u: Fraction

    def __post_init__(self):
        object.__setattr__(self, "u", Fraction(self.u) % 2)

    def __mul__(self, other: "UnitRoot") -> "UnitRoot":
        return UnitRoot(self.u + other.u)

    def __pow__(self, k: int) -> "UnitRoot":
        return UnitRoot(self.u * k)

    def inverse(self) -> "UnitRoot":
        return UnitRoot(-self.u)

    @property
    def is_one(self) -> bool:
        return self.u == 0

    @property
    def is_real(self) -> bool:
        return self.u.denominator == 1

    def realize(self, dom):
        return dom.unit_root(self.u)

    def __repr__(self):
        return f"exp(i*pi*{self.u})"


ONE_ROOT = UnitRoot(Fraction(0))
MINUS_ONE_ROOT = UnitRoot(Fraction(1))


def cot_pi_is_pole(r: Fraction) -> bool:
    """cot(pi*r) has a pole exactly at integer r."""
    return Fraction(r).denominator == 1


def cot_pi_is_zero(r: Fraction) -> bool:
    """cot(pi*r) vanishes exactly at half-odd-integer r."""
    r = Fraction(r)
    return r.denominator == 2


# ---------------------------------------------------------------------------
# domains
# ---------------------------------------------------------------------------

class BaseDomain:
    """Common coercions; concrete domains fill in the arithmetic."""

    exact = True
    name = "base"

    def of(self, x):
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return self.is_zero(self.sub(a, b))

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def unit_root(self, u: Fraction):
        raise DomainError(f"{self.name} cannot represent exp(i*pi*{u})")

    def cot_pi(self, r: Fraction):
        """cot(pi*r) for rational r, computed as i(z+1)/(z-1), z=exp(2*pi*i*r)."""
        r = Fraction(r)
        if cot_pi_is_pole(r):
            raise ResonanceError(f"cot(pi*{r}) pole")
        if cot_pi_is_zero(r):
            return self.zero
        z = self.unit_root(2 * r)
        i = self.unit_root(Fraction(1, 2))
        num = self.mul(i, self.add(z, self.one))
        return self.div(num, self.sub(z, self.one))

    def __repr__(self):
        return f"<domain {self.name}>"


class RationalDomain(BaseDomain):
    name = "rational"
    zero = Fraction(0)
    one = Fraction(1)

    def of(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise DomainError(f"cannot coerce {x!r} into QQ")

    def is_zero(self, a):
        return a == 0

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in QQ")
        return 1 / a

    def unit_root(self, u: Fraction):
        u = Fraction(u) % 2
        if u == 0:
            return self.one
        if u == 1:
            return -self.one
        raise DomainError(f"exp(i*pi*{u}) is not rational")


@dataclass(frozen=True)
class Gaussian:
    """a + b*i with exact rational parts."""

    re: Fraction
    im: Fraction

    def __repr__(self):
        return f"({self.re}+{self.im}i)"


class GaussianDomain(BaseDomain):
    name = "gaussian-rational"
    zero = Gaussian(Fraction(0), Fraction(0))
    one = Gaussian(Fraction(1), Fraction(0))

    def of(self, x):
        if isinstance(x, Gaussian):
            return x
        if isinstance(x, (int, Fraction)):
            return Gaussian(Fraction(x), Fraction(0))
        raise DomainError(f"cannot coerce {x!r} into QQ(i)")

    def is_zero(self, a):
        return a.re == 0 and a.im == 0

    def add(self, a, b):
        return Gaussian(a.re + b.re, a.im + b.im)

    def mul(self, a, b):
        return Gaussian(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re)

    def neg(self, a):
        return Gaussian(-a.re, -a.im)

    def inv(self, a):
        n = a.re * a.re + a.im * a.im
        if n == 0:
            raise ZeroDivisionError("inverse of 0 in QQ(i)")
        return Gaussian(a.re / n, -a.im / n)

    def unit_root(self, u: Fraction):
        u = Fraction(u) % 2
        table = {
            Fraction(0): self.one,
            Fraction(1, 2): Gaussian(Fraction(0), Fraction(1)),
            Fraction(1): self.neg(self.one),
            Fraction(3, 2): Gaussian(Fraction(0), Fraction(-1)),
        }
        if u in table:
            return table[u]
        raise DomainError(f"exp(i*pi*{u}) is not Gaussian rational")


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _factorize(n: int) -> set:
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


class PrimeFieldDomain(BaseDomain):
    """GF(p) with p = 1 (mod N) and a fixed embedded N-th root of unity.

    The embedding sends exp(2*pi*i/N) to g^((p-1)/N) for a primitive root g,
    so every cyclotomic constant of conductor dividing N maps to a field
    element and cyclotomic identities can be tested with exact arithmetic.
    """

    name = "prime-field"
    zero = 0
    one = 1

    def __init__(self, root_order: int, index: int = 0, bits: int = 62):
        n = 2 * root_order if root_order % 2 else root_order
        # 4 | N so that i is always available for cot values.
        n = n * 4 // gcd(n, 4)
        self.order = n
        start = (1 << bits) // n
        found = 0
        m = start + 1
        while True:
            p = m * n + 1
            if _is_prime(p):
                if found == index:
                    break
                found += 1
            m += 1
        self.p = p
        self.cofactor = m
        primes = _factorize(m) | _factorize(n)
        g = 2
        while True:
            if all(pow(g, (p - 1) // q, p) != 1 for q in primes):
                break
            g += 1
        self.generator = g
        self.zeta = pow(g, (p - 1) // n, p)
        self.name = f"GF({p})"

    def of(self, x):
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            den = x.denominator % self.p
            if den == 0:
                raise DomainError(f"denominator of {x} vanishes mod {self.p}")
            return x.numerator * pow(den, -1, self.p) % self.p
        raise DomainError(f"cannot coerce {x!r} into GF({self.p})")

    def is_zero(self, a):
        return a % self.p == 0

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of 0 in GF({self.p})")
        return pow(a, -1, self.p)

    def unit_root(self, u: Fraction):
        k = Fraction(u) % 2 * self.order / 2
        if k.denominator != 1:
            raise DomainError(
                f"exp(i*pi*{u}) has conductor not dividing {self.order}")
        return pow(self.zeta, int(k), self.p)


class ComplexDomain(BaseDomain):
    """mpmath complex numbers at a fixed binary precision.

    Equality is decided within 2^(-prec/2), the backend's contract for
    values of moderate dynamic range.
    """

    exact = False

    def __init__(self, prec: int = 256):
        self.prec = prec
        self.ctx = mpmath.mp.clone()
        self.ctx.prec = prec
        self.tol = mpmath.mpf(2) ** (-(prec // 2))
        self.zero = self.ctx.mpc(0)
        self.one = self.ctx.mpc(1)
        self.name = f"MPC({prec})"

    def of(self, x):
        if isinstance(x, Fraction):
            return self.ctx.mpc(x.numerator) / x.denominator
        if isinstance(x, int):
            return self.ctx.mpc(x)
        if isinstance(x, (mpmath.mpc, mpmath.mpf, float, complex)):
            return self.ctx.mpc(x)
        raise DomainError(f"cannot coerce {x!r} into MPC")

    def is_zero(self, a):
        return abs(a) <= self.tol

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return 1 / a

    def unit_root(self, u: Fraction):
        u = Fraction(u)
        return self.ctx.expjpi(self.ctx.mpf(u.numerator) / u.denominator)

    def sqrt(self, a):
        return self.ctx.sqrt(a)


QQ = RationalDomain()
QQI = GaussianDomain()


def rel_close(dom: ComplexDomain, a, b, bits: int = 100) -> bool:
    """|a-b| <= 2^-bits * max(1, |a|, |b|), the acceptance-level tolerance."""
    scale = max(mpmath.mpf(1), abs(a), abs(b))
    return abs(a - b) <= mpmath.mpf(2) ** (-bits) * scale


# ---------------------------------------------------------------------------
# coupling constants
# ---------------------------------------------------------------------------

@dataclass
class ParameterPoint:
    """The coupling nu, twist alpha and all derived unit constants.

    Angles are exact; ``q``/``Q``/``frak_q``/``A``/``a`` are the
    realizations in ``dom`` (``None`` for A, a when alpha is symbolic).
    """

    nu: Fraction
    alpha: Optional[Fraction]
    dom: BaseDomain
    q_root: UnitRoot = field(init=False)
    Q_root: UnitRoot = field(init=False)
    frak_q_root: UnitRoot = field(init=False)
    A_root: Optional[UnitRoot] = field(init=False)
    a_root: Optional[UnitRoot] = field(init=False)

    def __post_init__(self):
        nu = self.nu
        self.q_root = UnitRoot(nu)
        self.Q_root = UnitRoot((1 - nu) / nu)
        self.frak_q_root = UnitRoot(Fraction(1) / (1 - nu))
        if self.alpha is None:
            self.A_root = self.a_root = None
        else:
            self.A_root = UnitRoot(self.alpha)
            self.a_root = UnitRoot(nu * self.alpha / (1 - nu))

    # realized constants -----------------------------------------------------
    @property
    def q(self):
        return self.q_root.realize(self.dom)

    @property
    def Q(self):
        return self.Q_root.realize(self.dom)

    @property
    def frak_q(self):
        return self.frak_q_root.realize(self.dom)

    @property
    def A(self):
        return None if self.A_root is None else self.A_root.realize(self.dom)

    @property
    def a(self):
        return None if self.a_root is None else self.a_root.realize(self.dom)

    # exact flags ------------------------------------------------------------
    @property
    def a_squared_is_one(self) -> bool:
        if self.a_root is None:
            return False
        return (2 * self.a_root.u) % 2 == 0

    @property
    def free_fermion_warning(self) -> bool:
        return self.nu == Fraction(1, 2)

    # resonance helpers ------------------------------------------------------
    def AQk_is_one(self, k: int) -> bool:
        """Exact test for the reduction resonance A*Q^k = 1."""
        if self.A_root is None:
            return False
        return (self.A_root * self.Q_root ** k).is_one

    def Qr_is_one(self, r: int) -> bool:
        return (self.Q_root ** r).is_one

    def qr4_is_one(self, r: int) -> bool:
        """frak_q^(4r) = 1, the x-series resonance."""
        return (self.frak_q_root ** (4 * r)).is_one

    def cot_arg(self, ell: int) -> Fraction:
        """The rational r with cot(pi*r) = cot(pi/2 (alpha + ell/nu))."""
        if self.alpha is None:
            raise DomainError("alpha is symbolic")
        return (self.alpha + Fraction(ell) / self.nu) / 2

    def cot_half(self, x: Fraction):
        """cot(pi/2 * x) realized in the domain."""
        return self.dom.cot_pi(Fraction(x) / 2)

    def root_conductor(self) -> int:
        """Smallest N with all unit constants and cot values in QQ(zeta_N)."""
        angles = [self.q_root.u, self.Q_root.u, self.frak_q_root.u,
                  Fraction(1, self.nu)]
        if self.alpha is not None:
            angles += [self.A_root.u, self.a_root.u,
                       self.alpha + Fraction(1, self.nu)]
        n = 4
        for ang in angles:
            d = 2 * Fraction(ang).denominator
            n = n * d // gcd(n, d)
        return n


def make_parameter_point(nu, alpha=None, backend="rational",
                         precision_bits: int = 256,
                         prime_index: int = 0) -> ParameterPoint:
    """Build a :class:`ParameterPoint` over the requested backend.

    ``backend`` is one of ``rational``, ``gaussian-rational``,
    ``prime-field``, ``complex``.  For the prime field the conductor is
    derived from nu and alpha so that every needed root of unity embeds.
    """
    nu = Fraction(nu)
    if not 0 < nu < 1:
        raise DomainError(f"nu = {nu} outside (0, 1)")
    alpha = None if alpha is None else Fraction(alpha)
    if backend == "rational":
        dom = QQ
    elif backend == "gaussian-rational":
        dom = QQI
    elif backend == "complex":
        dom = ComplexDomain(precision_bits)
    elif backend == "prime-field":
        probe = ParameterPoint(nu, alpha, QQ)
        dom = PrimeFieldDomain(probe.root_conductor(), index=prime_index)
    else:
        raise DomainError(f"unknown backend {backend!r}")
    return ParameterPoint(nu, alpha, dom)


# ---------------------------------------------------------------------------
# randomized identity testing samples
# ---------------------------------------------------------------------------

def pit_sample(seed: int, names) -> dict:
    """Deterministic assignment of distinct nonzero rationals to ``names``.

    No two assigned values collide up to sign (denominators in this theory
    contain differences and sums of the sampled symbols), and all values are
    nonzero.
    """
    rng = random.Random(seed)
    used = set()
    out = {}
    for name in names:
        while True:
            num = rng.randint(1, 60)
            den = rng.randint(1, 9)
            sign = rng.choice((1, -1))
            v = Fraction(sign * num, den)
            if v != 0 and v not in used and -v not in used:
                used.add(v)
                out[name] = v
                break
    return out


def pit_sample_in(dom: BaseDomain, seed: int, names) -> dict:
    """Same rational sample, coerced into ``dom``."""
    return {k: dom.of(v) for k, v in pit_sample(seed, names).items()}
