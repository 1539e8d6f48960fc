"""Small-chain higher-level Bethe-ansatz computations.

Dense linear algebra on 2n sites (dimension 4^n <= 64): the isotopic
two-particle scattering matrix, monodromy C operators, the domain-wall
partition function with its determinant evaluation, and the assembly of the
partition-sum wedge that lands on the Grassmannian.

Square roots of the spectral parameters enter the normalization, so all
entry points take the parameters through their square roots (exact in every
backend).
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .errors import PreconditionError, ResonanceError
from .laurent import LaurentPoly, perm_sign, wedge_coords
from .pairing import EllBasis


def _sq(dom, t):
    return dom.mul(t, t)


class ChainContext:
    """2n sites with parameters b_j = (sqrt_b_j)^2 over a scalar domain."""

    def __init__(self, params, sqrt_b, dom=None):
        self.params = params
        self.dom = dom or params.dom
        self.sqrt_b = [self.dom.of(t) if isinstance(t, (int, Fraction)) else t
                       for t in sqrt_b]
        self.b = [_sq(self.dom, t) for t in self.sqrt_b]
        if len(self.b) % 2:
            raise PreconditionError("even number of sites required")
        self.sites = len(self.b)
        self.q = params.frak_q_root.realize(self.dom)
        self.qinv = self.dom.inv(self.q)

    # --- local weights ----------------------------------------------------
    def weights(self, sx, x, sy, y):
        """(b, c) weights for spectral sqrt sx (x = sx^2) against site sqrt
        sy; poles raise ResonanceError."""
        dom = self.dom
        den = dom.sub(dom.mul(x, self.qinv), dom.mul(y, self.q))
        if dom.is_zero(den):
            raise ResonanceError("scattering pole x/y = q^2")
        bw = dom.div(dom.sub(x, y), den)
        cw = dom.div(dom.mul(dom.mul(sx, sy), dom.sub(self.qinv, self.q)),
                     den)
        return bw, cw

    def s_matrix(self, sx, sy):
        """The 4x4 two-site operator; basis |00>,|01>,|10>,|11> (0 = up)."""
        dom = self.dom
        x, y = _sq(dom, sx), _sq(dom, sy)
        bw, cw = self.weights(sx, x, sy, y)
        z = dom.zero
        return [[dom.one, z, z, z],
                [z, bw, cw, z],
                [z, cw, bw, z],
                [z, z, z, dom.one]]


def s_matrix_tilde(params, sqrt_bi, sqrt_bj, dom=None):
    """The isotopic two-soliton scattering operator as a 4x4 matrix."""
    ctx = ChainContext(params, [sqrt_bi, sqrt_bj], dom=dom)
    return ctx.s_matrix(ctx.sqrt_b[0], ctx.sqrt_b[1])


def _apply_two_qubit(dom, vec, mat, pos_a, pos_b, nbits):
    """Apply a 4x4 matrix on qubits (pos_a, pos_b) of a dense vector."""
    out = [dom.zero] * len(vec)
    for idx, amp in enumerate(vec):
        if dom.is_zero(amp):
            continue
        sa = (idx >> (nbits - 1 - pos_a)) & 1
        sb = (idx >> (nbits - 1 - pos_b)) & 1
        col = 2 * sa + sb
        for row in range(4):
            m = mat[row][col]
            if dom.is_zero(m):
                continue
            ra, rb = row >> 1, row & 1
            j = idx
            j &= ~(1 << (nbits - 1 - pos_a))
            j &= ~(1 << (nbits - 1 - pos_b))
            j |= ra << (nbits - 1 - pos_a)
            j |= rb << (nbits - 1 - pos_b)
            out[j] = dom.add(out[j], dom.mul(m, amp))
    return out


def monodromy_apply(ctx: ChainContext, sqrt_t, vec, aux_in: int,
                    aux_out: int):
    """<aux_out| S~_{a,2n} ... S~_{a,1} |aux_in> acting on a site vector.

    aux bits: 0 = up, 1 = down.  The C operator is the (down, up) block.
    """
    dom = ctx.dom
    nbits = ctx.sites + 1          # qubit 0 is the auxiliary space
    big = [dom.zero] * (1 << nbits)
    for idx, amp in enumerate(vec):
        big[(aux_in << ctx.sites) | idx] = amp
    for j in range(ctx.sites):     # S~_{a,1} acts first
        mat = ctx.s_matrix(sqrt_t, ctx.sqrt_b[j])
        big = _apply_two_qubit(dom, big, mat, 0, j + 1, nbits)
    out = [dom.zero] * len(vec)
    base = aux_out << ctx.sites
    for idx in range(len(vec)):
        out[idx] = big[base | idx]
    return out


def monodromy_C(ctx: ChainContext, sqrt_t, vec):
    """The spin-raising monodromy entry applied to a state."""
    return monodromy_apply(ctx, sqrt_t, vec, aux_in=0, aux_out=1)


def monodromy_entry_matrix(ctx: ChainContext, sqrt_t, entry="C"):
    """Dense matrix of a monodromy block (desk sizes only)."""
    blocks = {"A": (0, 0), "B": (1, 0), "C": (0, 1), "D": (1, 1)}
    aux_in, aux_out = blocks[entry]
    dim = 1 << ctx.sites
    cols = []
    for c in range(dim):
        e = [ctx.dom.zero] * dim
        e[c] = ctx.dom.one
        cols.append(monodromy_apply(ctx, sqrt_t, e, aux_in, aux_out))
    return [[cols[c][r] for c in range(dim)] for r in range(dim)]


def hlba_transfer_apply(ctx: ChainContext, sqrt_t, x_twist, vec):
    """(x A(t) + x^{-1} D(t)) |vec>: the isotopic transfer matrix."""
    dom = ctx.dom
    a = monodromy_apply(ctx, sqrt_t, vec, 0, 0)
    d = monodromy_apply(ctx, sqrt_t, vec, 1, 1)
    xinv = dom.inv(x_twist)
    return [dom.add(dom.mul(x_twist, u), dom.mul(xinv, v))
            for u, v in zip(a, d)]


def dwpf_direct(ctx: ChainContext, sqrt_spectral) -> object:
    """<up...| prod_j C(v_j) |down...> by direct matrix-vector products."""
    dom = ctx.dom
    if len(sqrt_spectral) != ctx.sites:
        raise PreconditionError("need as many C operators as sites")
    vec = [dom.zero] * (1 << ctx.sites)
    vec[(1 << ctx.sites) - 1] = dom.one          # all spins down
    for st in sqrt_spectral:
        st = dom.of(st) if isinstance(st, (int, Fraction)) else st
        vec = monodromy_C(ctx, st, vec)
    return vec[0]                                 # all spins up


def dwpf_izergin(ctx: ChainContext, sqrt_spectral) -> object:
    """The determinant evaluation of the domain-wall partition function.

    Normalization matches :func:`dwpf_direct` for the unit-diagonal
    scattering matrix used here; the overall sign convention was fixed once
    against the direct product and is exercised by the test suite on fresh
    samples.
    """
    dom = ctx.dom
    n = ctx.sites
    sv = [dom.of(t) if isinstance(t, (int, Fraction)) else t
          for t in sqrt_spectral]
    v = [_sq(dom, t) for t in sv]
    w = ctx.b
    sw = ctx.sqrt_b
    num = dom.one
    for t in sv + sw:
        num = dom.mul(num, t)
    for i in range(n):
        for j in range(n):
            num = dom.mul(num, dom.sub(v[i], w[j]))
    den = dom.one
    for i in range(n):
        for j in range(i + 1, n):
            den = dom.mul(den, dom.sub(v[i], v[j]))
            den = dom.mul(den, dom.sub(w[j], w[i]))
    qdiff = dom.sub(ctx.qinv, ctx.q)
    mat = []
    for i in range(n):
        row = []
        for j in range(n):
            dd = dom.mul(dom.sub(v[i], w[j]),
                         dom.sub(dom.mul(v[i], ctx.qinv),
                                 dom.mul(w[j], ctx.q)))
            if dom.is_zero(dd):
                raise ResonanceError("degenerate parameters in determinant")
            row.append(dom.div(qdiff, dd))
        mat.append(row)
    det = _scalar_det(dom, mat)
    return dom.mul(dom.div(num, den), det)


def _scalar_det(dom, mat):
    n = len(mat)
    out = dom.zero
    for perm in itertools.permutations(range(n)):
        term = dom.one
        for i in range(n):
            term = dom.mul(term, mat[i][perm[i]])
        out = dom.add(out, term if perm_sign(perm) > 0 else dom.neg(term))
    return out


def dwpf(ctx: ChainContext, sqrt_u, plus_subset) -> object:
    """<up| prod C(u_j) prod_{j in I+} C(b_j) |down> by direct products.

    ``plus_subset`` contains 1-based site indices; coincident spectral and
    site parameters are fine here (only the determinant formula needs
    genericity).
    """
    spectral = list(sqrt_u) + [ctx.sqrt_b[j - 1] for j in plus_subset]
    return dwpf_direct(ctx, spectral)


# ---------------------------------------------------------------------------
# the partition-sum wedge and its Grassmannian structure
# ---------------------------------------------------------------------------

def ell_from_bethe(params, sqrt_u, sqrt_b, n: int, dom=None):
    """Assemble the partition sum of partition-basis wedges weighted by
    domain-wall amplitudes.

    Returns (wedge polynomial in s1..sn, per-index polynomials from the
    column sums, diagnostics dict).  The diagnostics carry the Pluecker
    coordinates and the proportionality data for the wedge-of-sums
    comparison.
    """
    dom = dom or params.dom
    if len(sqrt_u) != n or len(sqrt_b) != 2 * n:
        raise PreconditionError("need n Bethe-like and 2n site parameters")
    ctx = ChainContext(params, sqrt_b, dom=dom)
    b = ctx.b
    q2 = (params.frak_q_root ** 2).realize(dom)
    total = None
    colsums = [None] * n
    for iminus in itertools.combinations(range(1, 2 * n + 1), n):
        iplus = tuple(j for j in range(1, 2 * n + 1) if j not in iminus)
        weight = dom.one
        for i in iminus:
            weight = dom.mul(weight, ctx.sqrt_b[i - 1])
        den = dom.one
        for i in iminus:
            for j in iplus:
                den = dom.mul(den, dom.sub(b[i - 1], b[j - 1]))
        amp = dwpf(ctx, sqrt_u, iplus)
        weight = dom.mul(dom.div(weight, den), amp)
        eb = EllBasis((iminus, iplus), n, dom, roots=b,
                      a_value=params.a_root.realize(dom), q2_value=q2)
        contrib = eb.wedge().scale(weight)
        total = contrib if total is None else total + contrib
        for j in range(n):
            piece = eb.polys[j].scale(weight)
            colsums[j] = piece if colsums[j] is None else colsums[j] + piece
    diagnostics = {
        "pluecker": pluecker_coords(total, n),
    }
    return total, colsums, diagnostics


def pluecker_coords(wedge_poly: LaurentPoly, n: int):
    """{ascending exponent tuple: scalar} coordinates of an n-wedge."""
    sv = tuple(f"s{i + 1}" for i in range(n))
    return {k: v.scalar() for k, v in wedge_coords(wedge_poly, sv).items()}


def pluecker_relations_residuals(coords: dict, n: int, dom):
    """All three-term (one-step) Pluecker relation values for the given
    coordinates; an empty or all-zero list certifies decomposability."""
    support = sorted({e for key in coords for e in key})
    out = []
    getz = lambda key: coords.get(key, dom.zero)

    def signed(key):
        base = tuple(sorted(key))
        if len(set(key)) != len(key):
            return dom.zero
        perm = sorted(range(len(key)), key=lambda i: key[i])
        sgn = perm_sign(perm)
        val = getz(base)
        return val if sgn > 0 else dom.neg(val)

    for alpha in itertools.combinations(support, n - 1):
        for beta in itertools.combinations(support, n + 1):
            acc = dom.zero
            for k, bk in enumerate(beta):
                term = dom.mul(signed(alpha + (bk,)),
                               signed(tuple(x for x in beta if x != bk)))
                acc = dom.add(acc, term if k % 2 == 0 else dom.neg(term))
            out.append(acc)
    return out


def is_decomposable(coords: dict, n: int, dom, tol_is_zero=None) -> bool:
    vals = pluecker_relations_residuals(coords, n, dom)
    chk = tol_is_zero or dom.is_zero
    return all(chk(v) for v in vals)


def wedge_of_sums(colsums, n: int, dom):
    """The wedge of the per-index column sums (the candidate decomposition)."""
    from .laurent import wedge as _wedge
    sv = tuple(f"s{i + 1}" for i in range(n))
    return _wedge([p.rename({"s": "_w"}) for p in colsums], sv,
                  placeholder="_w")


def rrr_prefactor(params, sqrt_u, sqrt_b, dom):
    """prod_{i,j} (u_i - u_j q^2) / prod_{i,j} (u_i - b_j q^2)."""
    q2 = (params.frak_q_root ** 2).realize(dom)
    u = [_sq(dom, dom.of(t) if isinstance(t, (int, Fraction)) else t)
         for t in sqrt_u]
    b = [_sq(dom, dom.of(t) if isinstance(t, (int, Fraction)) else t)
         for t in sqrt_b]
    num = dom.one
    for ui in u:
        for uj in u:
            num = dom.mul(num, dom.sub(ui, dom.mul(uj, q2)))
    den = dom.one
    for ui in u:
        for bj in b:
            den = dom.mul(den, dom.sub(ui, dom.mul(bj, q2)))
    return dom.div(num, den)


def rrr_constant(params, sqrt_u, sqrt_b, n, dom=None):
    """The proportionality constant between the partition-sum wedge and the
    wedge of its column sums.

    Computes  (partition wedge) * prefactor^{n-1} * prod_i sqrt(u_i)
    divided by (wedge of sums), coordinate by coordinate; returns
    (constant, relative spread over coordinates).  The constant depends
    only on q; sample independence is the library's test of the
    Grassmannian identity.  (The extra product of sqrt(u_i) relative to
    the printed prefactor is a normalization of the sqrt-weights; it is
    sample-independent only with this factor included.)
    """
    import mpmath
    dom = dom or params.dom
    total, colsums, diag = ell_from_bethe(params, sqrt_u, sqrt_b, n, dom=dom)
    coords = diag["pluecker"]
    W = wedge_of_sums(colsums, n, dom)
    Wc = pluecker_coords(W, n)
    pref = rrr_prefactor(params, sqrt_u, sqrt_b, dom)
    pv = dom.one
    for _ in range(n - 1):
        pv = dom.mul(pv, pref)
    for t in sqrt_u:
        pv = dom.mul(pv, dom.of(t) if isinstance(t, (int, Fraction)) else t)
    ratios = []
    scale = max(abs(x) for x in Wc.values())
    for k, val in Wc.items():
        if abs(val) > scale * mpmath.mpf(2) ** -40:
            ratios.append(dom.div(dom.mul(coords.get(k, dom.zero), pv), val))
    base = ratios[0]
    spread = max(abs(r - base) for r in ratios) / max(1, abs(base))
    return base, spread
