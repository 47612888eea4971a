"""Birkhoff normal forms, strictness indices, centralisers, classification.

The diagonalising algorithm repeatedly applies the kernel/image splitting of
a semisimple adjoint operator to push the coefficients of a truncated current
into the iterated centraliser of the leading semisimple string, recording the
gauge as an exact product of unipotent exponentials.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import One, Zero, nullspace, solve
from .elements import (GElement, TcElement, exp_ad, is_semisimple,
                       semisimple_split)
from .strat import LeviFiltration, full_mask, indices, levi_of_point


class BirkhoffNormalForm:
    """Result of the diagonalising algorithm.

    strictness: the index s (longest commuting semisimple leading string);
    normal: gauge-normalized element (coefficients >= s lie in the iterated
    centraliser of the first s); gauge_log: Y in eps*g_r with
    exp(ad_Y)(input) == normal, exactly.
    """

    __slots__ = ("input", "strictness", "normal", "gauge_log", "gauge_factors")

    def __init__(self, input, strictness, normal, gauge_log, gauge_factors):
        self.input = input
        self.strictness = strictness
        self.normal = normal
        self.gauge_log = gauge_log
        self.gauge_factors = gauge_factors

    def irregular_type(self):
        return self.normal.truncate(self.strictness)

    def verify_round_trip(self):
        return exp_ad(self.gauge_log, self.input) == self.normal


def _subalgebra_basis(rd, constraints):
    """Basis of the common centraliser of the given GElements, as GElements."""
    if not constraints:
        return [GElement.from_coords(rd, v) for v in _std_basis(rd)]
    rows = []
    for x in constraints:
        rows.extend(x.ad_matrix())
    return [GElement.from_coords(rd, v) for v in nullspace(rows, cols=rd.dim_g)]


def _std_basis(rd):
    n = rd.dim_g
    return [[One if i == j else Zero for j in range(n)] for i in range(n)]


def _restrict_ad(rd, x: GElement, sub_basis):
    """Matrix of ad_x on span(sub_basis), in sub_basis coordinates."""
    cols = [b.coords() for b in sub_basis]
    mat_cols = []
    for b in sub_basis:
        img = x.bracket(b).coords()
        coords = solve([[cols[j][i] for j in range(len(sub_basis))]
                        for i in range(rd.dim_g)], img)
        if coords is None:
            raise ValueError("ad does not preserve the subalgebra")
        mat_cols.append(coords)
    k = len(sub_basis)
    return [[mat_cols[j][i] for j in range(k)] for i in range(k)]


def birkhoff_normalize(x: TcElement) -> BirkhoffNormalForm:
    rd = x.rd
    r = x.depth
    cur = x
    factors = []  # gauge elements Y e^j, applied left to right
    s = 0
    sub_basis = [GElement.from_coords(rd, v) for v in _std_basis(rd)]
    while s < r:
        xs = cur.coeffs[s]
        if not is_semisimple(xs):
            break
        # clean the deeper coefficients: make them commute with X_s too
        ad = _restrict_ad(rd, xs, sub_basis)
        ker_vecs, img_vecs = semisimple_split(ad, [b.coords() for b in sub_basis])

        def lift(coords):
            out = GElement.zero(rd)
            for c, b in zip(coords, sub_basis):
                if c != 0:
                    out = out + b.scale(c)
            return out

        img_basis = [lift(v) for v in img_vecs]
        for k in range(s + 1, r):
            xk = cur.coeffs[k]
            # write xk = kernel part + [X_s, Z]; gauge by exp(ad_{-Z e^{k-s}})
            target = xk.coords()
            sub_cols = [b.coords() for b in sub_basis]
            coords = solve([[sub_cols[j][i] for j in range(len(sub_basis))]
                            for i in range(rd.dim_g)], target)
            if coords is None:
                raise AssertionError("coefficient escaped the iterated centraliser")
            img_part = _project_onto(ad, coords)
            if img_part is None:
                continue
            # exp(ad_{z e^{k-s}}) changes X_k by [z, X_s] = -ad_{X_s}(z)
            z = lift(img_part)
            if z.is_zero():
                continue
            gauge = TcElement.pure(rd, r, k - s, z)
            factors.append(gauge)
            cur = exp_ad(gauge, cur)
        sub_basis = [lift(v) for v in ker_vecs]
        s += 1
    gauge_log = _compose_gauge_logs(rd, r, factors)
    nf = BirkhoffNormalForm(x, s, cur, gauge_log, factors)
    if not nf.verify_round_trip():
        raise AssertionError("gauge log round trip failed")
    return nf


def _project_onto(ad, coords):
    """Solve ad * z = image-component of coords; None when coords is already
    in the kernel.  Decomposes coords = ker + ad(z) and returns z."""
    n = len(ad)
    # solve ad*z = v with v = coords - kernelpart: equivalently find z with
    # ad(ad(z)) = ad(coords) using that ad restricted to its image is invertible.
    rhs = [sum(ad[i][j] * coords[j] for j in range(n)) for i in range(n)]
    sq = [[sum(ad[i][k] * ad[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    z = solve(sq, rhs)
    if z is None:
        raise AssertionError("semisimple split failed")
    img = [sum(ad[i][j] * z[j] for j in range(n)) for i in range(n)]
    if all(v == 0 for v in img):
        return None
    return z


def _compose_gauge_logs(rd, r, factors):
    """Single Y in eps*g_r with exp(ad_Y) = product of the factor exponentials.

    Works functionally: U = exp(ad_{Y_m}) ... exp(ad_{Y_1}); L = log U is
    recovered column by column on the degree-0 copy of g, which determines
    each epsilon coefficient of Y up to the center (fixed to zero there).
    """
    zero = TcElement(rd, r)
    if not factors:
        return zero

    def apply_u(v):
        for f in factors:
            v = exp_ad(f, v)
        return v

    def apply_log(v):
        # log(I + N) v with N = U - I nilpotent of order <= r
        out = TcElement(rd, r)
        term = v
        sign = 1
        for k in range(1, r + 1):
            term = apply_u(term) - term  # N applied once more
            if term.is_zero():
                break
            out = out + term.scale(Fraction(sign, k))
            sign = -sign
        return out

    # L restricted to g e^0 gives, at the e^k coefficient, the map ad_{Y_k}
    coeffs = [GElement.zero(rd) for _ in range(r)]
    cartan_parts = [[None] * rd.dim_t for _ in range(r)]
    # root coefficients of Y_k from L(H) for Cartan basis H
    root_coeffs = [dict() for _ in range(r)]
    for t in range(rd.dim_t):
        h = GElement.cartan_vec(rd, tuple(One if k == t else Zero for k in range(rd.dim_t)))
        lv = apply_log(TcElement.pure(rd, r, 0, h))
        for k in range(r):
            # [Y_k, H] = -sum <a|H> (Y_k)_a E_a
            for i, c in lv.coeffs[k].root.items():
                pair = rd.roots[i][t]
                if pair != 0:
                    root_coeffs[k][i] = -c / pair
    # Cartan part of Y_k from the E_a coefficient of L(E_a)
    cartan_rows = [[] for _ in range(r)]
    cartan_rhs = [[] for _ in range(r)]
    for i in range(rd.num_roots):
        e = GElement.root_vec(rd, i)
        lv = apply_log(TcElement.pure(rd, r, 0, e))
        for k in range(r):
            coeff = lv.coeffs[k].root.get(i, Zero)
            # remove contributions of the root part of Y_k: [E_b, E_a] has an
            # E_a component only via b = 0 (none), so coeff = <a | cartan(Y_k)>
            # minus nothing; but root parts of Y_k can also contribute via
            # N(b,a) E_{b+a} = E_a iff b = 0: impossible.  So:
            cartan_rows[k].append(list(rd.roots[i]))
            cartan_rhs[k].append(coeff)
    ys = []
    for k in range(r):
        cart = solve(cartan_rows[k], cartan_rhs[k])
        if cart is None:
            raise AssertionError("gauge log reconstruction failed")
        # kill the central component for canonicity (it acts trivially)
        cart = _remove_center(rd, cart)
        ys.append(GElement(rd, cart, root_coeffs[k]))
    y = TcElement(rd, r, ys)
    if not y.in_birkhoff():
        raise AssertionError("gauge log has a constant term")
    return y


def _remove_center(rd, cart):
    center = rd.center_basis()
    if not center:
        return cart
    # subtract the unique central vector making cart orthogonal to the center
    # in plain coordinates (any canonical choice works; the action is trivial)
    rows = [list(z) for z in center]
    gram = [[sum(a * b for a, b in zip(rows[i], rows[j])) for j in range(len(rows))]
            for i in range(len(rows))]
    rhs = [sum(a * b for a, b in zip(rows[i], cart)) for i in range(len(rows))]
    coef = solve(gram, rhs)
    out = list(cart)
    for c, z in zip(coef, rows):
        out = [a - c * b for a, b in zip(out, z)]
    return out


def strictness_index(x: TcElement) -> int:
    return birkhoff_normalize(x).strictness


def irregular_type(x: TcElement) -> TcElement:
    return birkhoff_normalize(x).irregular_type()


# -- markings and centralisers -------------------------------------------------


def marking_index(x: TcElement) -> int:
    """Largest s with x in t_r^{(>= s)}: leading s coefficients in t and the
    tail commuting with them."""
    r = x.depth
    best = 0
    for s in range(r, -1, -1):
        if all(x.coeffs[i].is_cartan() for i in range(s)) and _tail_commutes(x, s):
            best = s
            break
    return best


def _tail_commutes(x, s):
    for i in range(s):
        for j in range(s, x.depth):
            if not x.coeffs[i].bracket(x.coeffs[j]).is_zero():
                return False
    return True


def marking_filtration(x: TcElement, s=None) -> LeviFiltration:
    """phi_i = {a : <a|X_0> = ... = <a|X_{s-1-i}> = 0}, the orbit-side chain.

    For s = r this is the extended chain phi_i = cap_{j <= r-1-i} phi_{X_j};
    indices are swapped relative to the stratification side per the duality.
    """
    rd = x.rd
    if s is None:
        s = marking_index(x)
    masks = []
    for i in range(s):
        m = full_mask(rd)
        for j in range(s - i):
            m &= levi_of_point(rd, x.coeffs[j].cartan)
        masks.append(m)
    return LeviFiltration(rd, masks)


class CentralizerReport:
    __slots__ = ("dim", "basis", "marking_s", "filtration", "predicted_dim",
                 "structure_verified")

    def __init__(self, dim, basis, marking_s, filtration, predicted_dim, structure_verified):
        self.dim = dim
        self.basis = basis
        self.marking_s = marking_s
        self.filtration = filtration
        self.predicted_dim = predicted_dim
        self.structure_verified = structure_verified


def centralizer(x: TcElement) -> CentralizerReport:
    """Exact kernel of ad_x on g_r, with the structural comparison.

    For markings with s in {r-1, r}: the kernel must equal the semidirect
    prediction (degreewise Levi factors of the marking filtration); for
    smaller s only the necessary containment is checked.
    """
    rd = x.rd
    r = x.depth
    n = rd.dim_g * r
    rows = []
    basis_elems = list(TcElement.basis(rd, r))
    cols = [x.bracket(b).coords() for b in basis_elems]
    mat = [[cols[j][i] for j in range(n)] for i in range(n)]
    kernel = [TcElement.from_coords(rd, r, v) for v in nullspace(mat, cols=n)]
    s = marking_index(x)
    if s == 0:
        return CentralizerReport(len(kernel), kernel, 0, None, None, None)
    filt = marking_filtration(x, s)
    if s >= r - 1:
        predicted_basis = _structural_basis(x)
        predicted = len(predicted_basis)
        verified = (len(kernel) == predicted) and all(
            x.bracket(v).is_zero() for v in predicted_basis)
        if not verified:
            raise AssertionError("centraliser does not match the structural description")
        return CentralizerReport(len(kernel), kernel, s, filt, predicted, verified)
    contained = _kernel_in_envelope(x, kernel, filt, s)
    return CentralizerReport(len(kernel), kernel, s, filt, None, contained)


def _structural_basis(x):
    """Predicted centraliser basis for s in {r-1, r} markings.

    Degree 0: the common centraliser of all coefficients of x inside g.
    Degree k >= 1: the Levi factor of cap_{j <= r-1-k} phi_{X_j}.
    """
    rd = x.rd
    r = x.depth
    out = []
    rows = []
    for g in x.coeffs:
        rows.extend(g.ad_matrix())
    for v in nullspace(rows, cols=rd.dim_g):
        out.append(TcElement.pure(rd, r, 0, GElement.from_coords(rd, v)))
    for k in range(1, r):
        m = full_mask(rd)
        for j in range(r - k):
            m &= levi_of_point(rd, x.coeffs[j].cartan)
        for t in range(rd.dim_t):
            out.append(TcElement.pure(rd, r, k, GElement.cartan_vec(
                rd, tuple(One if a == t else Zero for a in range(rd.dim_t)))))
        for b in indices(m):
            out.append(TcElement.pure(rd, r, k, GElement.root_vec(rd, b)))
    return out


def _kernel_in_envelope(x, kernel, filt, s):
    """Necessary conditions: Y_i in l_{phi_i} for i < s and Y_0 central for X_s."""
    rd = x.rd
    xs = x.coeffs[s] if s < x.depth else None
    for v in kernel:
        for i in range(s):
            allowed = set(indices(filt.mask(i)))
            if any(j not in allowed for j in v.coeffs[i].root):
                return False
        if xs is not None and not v.coeffs[0].bracket(xs).is_zero():
            return False
    return True


def structural_centralizer_dim(rd, filt: LeviFiltration, r):
    """dim g^X + sum of Levi-factor dimensions: the closed-form prediction
    for r-semisimple markings with orbit-side filtration filt."""
    total = 0
    for i in range(r):
        m = filt.mask(i)
        total += rd.dim_t + len(indices(m))
    return total


# -- classification --------------------------------------------------------------


def classify_marked(x: TcElement, y: TcElement):
    """Same stratum test for two r-semisimple markings (duality swap applied)."""
    for z in (x, y):
        if not all(g.is_cartan() for g in z.coeffs):
            raise ValueError("classification requires r-semisimple markings in t_r")
    fx = marking_filtration(x, x.depth)
    fy = marking_filtration(y, y.depth)
    return fx == fy, fx


def classify_unmarked(x: TcElement, y: TcElement):
    """True iff some Weyl element maps the marking tuple of x onto y's."""
    rd = x.rd
    for z in (x, y):
        if not all(g.is_cartan() for g in z.coeffs):
            raise ValueError("classification requires r-semisimple markings in t_r")
    xt = [g.cartan for g in x.coeffs]
    yt = [g.cartan for g in y.coeffs]
    for w in rd.weyl:
        if all(w.apply_cartan(a) == tuple(b) for a, b in zip(xt, yt)):
            return True
    return False


def kks_matrix(rd, lams, split):
    """omega_lambda on u^+ (x) u^-: direct evaluation <lambda | [Y, Y']>.

    lambda is extended by zero off the Cartan part; this must agree with the
    B-pairing matrix of the polarisation (cross-module consistency).
    """
    up = split.u_plus_basis()
    um = split.u_minus_basis()
    r = split.depth
    out = []
    for yp in up:
        row = []
        for ym in um:
            br = yp.bracket(ym)
            val = Zero
            for k in range(r):
                if k < len(lams):
                    val += sum((l * h for l, h in zip(lams[k], br.coeffs[k].cartan)
                                if l != 0 and h != 0), Zero)
            row.append(val)
        out.append(row)
    return out
