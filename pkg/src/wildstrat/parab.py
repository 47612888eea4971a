"""Parabolic subsets and filtrations, triangular splittings, characters.

A parabolic subset psi satisfies (psi+psi) cap Phi = psi and psi cup -psi =
Phi; its Levi factor is Lf(psi) = psi cap -psi and nu = psi minus Lf(psi)
indexes the nilradical.  Parabolic filtrations are nondecreasing chains of
these; they polarize the strata of the Levi-filtration stratification and

carry the character spaces that singularity modules are induced from.
"""

from __future__ import annotations

from .linalg import One, Zero, frac, frac_str, inverse, rank, solve
from .elements import GElement, TcElement
from . import strat
from .strat import (LeviFiltration, full_mask, indices, mask_from_indices,
                    negate_mask, weyl_mask)


class ClaimViolation(RuntimeError):
    """A verified statement of the underlying theory failed on actual data."""


# -- parabolic subsets --------------------------------------------------------


def is_closed(rd, mask):
    for i in indices(mask):
        for j in indices(mask):
            k = rd.root_sum.get((i, j))
            if k is not None and not (mask >> k) & 1:
                return False
    return True


def is_parabolic(rd, mask):
    return (mask | negate_mask(rd, mask)) == full_mask(rd) and is_closed(rd, mask)


def levi_factor(rd, mask):
    return mask & negate_mask(rd, mask)


def nilradical_mask(rd, mask):
    return mask & ~levi_factor(rd, mask)


def enumerate_parabolic(rd):
    """All parabolic subsets, generated as w(Phi+ cup Phi^-_Sigma)."""
    delta = rd.simple
    pos_mask = mask_from_indices(rd.positive)
    seen = set()
    for bits in range(1 << len(delta)):
        sigma = [delta[k] for k in range(len(delta)) if (bits >> k) & 1]
        span = strat.span_closure(rd, mask_from_indices(sigma))
        base = pos_mask | span
        for w in rd.weyl:
            seen.add(weyl_mask(w, base))
    out = sorted(seen)
    for m in out:
        if not is_parabolic(rd, m):
            raise ClaimViolation("generated subset fails the parabolic axioms")
    return out


def levi_factor_map(rd, parabolics=None):
    """The surjection Lf onto Levi subsystems, with its fibers."""
    if parabolics is None:
        parabolics = enumerate_parabolic(rd)
    fibers = {}
    for p in parabolics:
        fibers.setdefault(levi_factor(rd, p), []).append(p)
    return fibers


def weyl_classes(rd, masks):
    remaining = set(masks)
    orbits = []
    while remaining:
        m = next(iter(remaining))
        orbit = {weyl_mask(w, m) for w in rd.weyl}
        remaining -= orbit
        orbits.append(sorted(orbit))
    return orbits


# -- parabolic filtrations ------------------------------------------------------


class ParabolicFiltration:
    """Nondecreasing chain psi_0 <= ... <= psi_{r-1} of parabolic subsets."""

    __slots__ = ("rd", "depth", "masks")

    def __init__(self, rd, masks):
        self.rd = rd
        self.masks = tuple(masks)
        self.depth = len(self.masks)
        for m in self.masks:
            if not is_parabolic(rd, m):
                raise ValueError("chain member is not a parabolic subset")
        for a, b in zip(self.masks, self.masks[1:]):
            if a & ~b:
                raise ValueError("chain is not nondecreasing")

    def mask(self, i):
        return self.masks[i] if i < self.depth else full_mask(self.rd)

    def __eq__(self, other):
        return (isinstance(other, ParabolicFiltration) and self.rd is other.rd
                and self.masks == other.masks)

    def __hash__(self):
        return hash(self.masks)

    def levi_filtration(self):
        return LeviFiltration(self.rd, [levi_factor(self.rd, m) for m in self.masks])

    def nu(self, i):
        return nilradical_mask(self.rd, self.mask(i))

    def opposite(self):
        return ParabolicFiltration(self.rd, [negate_mask(self.rd, m) | levi_factor(self.rd, m)
                                             for m in self.masks])

    def weyl_image(self, w):
        return ParabolicFiltration(self.rd, [weyl_mask(w, m) for m in self.masks])

    def is_balanced(self):
        """[u_{psi_i}, u_{psi_j}] inside u_{psi_{i+j}} for i + j <= r - 1."""
        rd = self.rd
        nus = [self.nu(i) for i in range(self.depth)]
        for i in range(self.depth):
            for j in range(self.depth - i):
                target = nus[i + j]
                for a in indices(nus[i]):
                    for b in indices(nus[j]):
                        k = rd.root_sum.get((a, b))
                        if k is not None and rd.nsc.get((a, b)) is not None:
                            if not (target >> k) & 1:
                                return False
        return True

    def __repr__(self):
        return "ParabolicFiltration(" + " <= ".join(
            "{" + ",".join(map(str, indices(m))) + "}" for m in self.masks) + ")"


def enumerate_parabolic_filtrations(rd, r, parabolics=None):
    if parabolics is None:
        parabolics = enumerate_parabolic(rd)
    out = []

    def extend(chain):
        if len(chain) == r:
            out.append(ParabolicFiltration(rd, chain))
            return
        for m in parabolics:
            if not chain or (chain[-1] | m) == m:
                extend(chain + [m])

    extend([])
    return out


# -- relative heights and decompositions ---------------------------------------


def positive_system_containing(rd, mask):
    """A positive system (as a mask) containing the given roots; None if impossible."""
    pos = mask_from_indices(rd.positive)
    for w in rd.weyl:
        cand = weyl_mask(w, pos)
        if mask & ~cand == 0:
            return cand
    return None


def height_functional(rd, nu_mask):
    """xi in t with <a|xi> >= 1 on nu; certifies the pointed-cone precondition."""
    pos = positive_system_containing(rd, nu_mask)
    if pos is None:
        raise ValueError("nilradical roots do not generate a pointed cone")
    pos_idx = indices(pos)
    sums = set()
    for i in pos_idx:
        for j in pos_idx:
            k = rd.root_sum.get((i, j))
            if k is not None:
                sums.add(k)
    simples = [i for i in pos_idx if i not in sums]
    xi = solve([list(rd.roots[i]) for i in simples], [One] * len(simples))
    if xi is None:
        raise ValueError("no height functional")
    return tuple(xi)


def decompositions(rd, nu_list, mu, xi=None):
    """All f: nu -> Z_{>=0} with sum f_a a = mu (the decomposition set Dec)."""
    if xi is None:
        xi = height_functional(rd, mask_from_indices(nu_list))
    out = []

    def rec(pos, remaining, acc):
        if all(x == 0 for x in remaining):
            out.append(tuple(acc + [0] * (len(nu_list) - len(acc))))
            return
        if pos == len(nu_list):
            return
        ht = sum(r * x for r, x in zip(remaining, xi))
        if ht < 0:
            return
        a = rd.roots[nu_list[pos]]
        max_mult = int(ht)  # <a|xi> >= 1 bounds the multiplicity by the height
        for mult in range(max_mult + 1):
            rest = tuple(x - mult * y for x, y in zip(remaining, a))
            rec(pos + 1, rest, acc + [mult])

    rec(0, tuple(frac(x) for x in mu), [])
    return [f for f in out if _dec_ok(rd, nu_list, f, mu)]


def _dec_ok(rd, nu_list, f, mu):
    tot = [Zero] * rd.dim_t
    for mult, i in zip(f, nu_list):
        if mult:
            tot = [a + mult * b for a, b in zip(tot, rd.roots[i])]
    return tuple(tot) == tuple(frac(x) for x in mu)


def relative_height(rd, nu_list, mu, xi=None):
    """|mu|_nu = max cardinality of a decomposition (0 when Dec is empty)."""
    decs = decompositions(rd, nu_list, mu, xi)
    return max((sum(f) for f in decs), default=0)


# -- triangular splitting -------------------------------------------------------


class TriangularSplit:
    """Ordered bases of u^-, l, u^+ inside g_r for a parabolic filtration.

    The u^- generators are the module alphabet X_{a,i} = E_{-a} e^i for a in
    nu_0 and i < d_a, ordered by nondecreasing relative height of a (ties by
    root index) and then by epsilon degree.
    """

    def __init__(self, pf: ParabolicFiltration):
        self.pf = pf
        self.rd = rd = pf.rd
        self.depth = pf.depth
        lf = pf.levi_filtration()
        self.levi = lf
        nu0 = indices(pf.nu(0))
        xi = height_functional(rd, pf.nu(0)) if nu0 else None
        self.xi = xi
        heights = {a: relative_height(rd, nu0, rd.roots[a], xi) for a in nu0}
        self.nu0 = sorted(nu0, key=lambda a: (heights[a], a))
        self.heights = heights
        self.levels = {a: lf.level(a) for a in self.nu0}
        # generator list: (root index a in nu0, eps degree i), i < d_a
        self.gens = [(a, i) for a in self.nu0 for i in range(self.levels[a])]
        self.gen_pos = {g: k for k, g in enumerate(self.gens)}

    def u_minus_basis(self):
        rd = self.rd
        return [TcElement.pure(rd, self.depth, i, GElement.root_vec(rd, rd.neg[a]))
                for a, i in self.gens]

    def u_plus_basis(self):
        rd = self.rd
        return [TcElement.pure(rd, self.depth, i, GElement.root_vec(rd, a))
                for a, i in self.gens]

    def levi_basis(self):
        rd = self.rd
        out = []
        for i in range(self.depth):
            for t in range(rd.dim_t):
                out.append(TcElement.pure(rd, self.depth, i, GElement.cartan_vec(
                    rd, tuple(One if k == t else Zero for k in range(rd.dim_t)))))
            for b in indices(self.levi.mask(i)):
                out.append(TcElement.pure(rd, self.depth, i, GElement.root_vec(rd, b)))
        return out

    def dims(self):
        u = len(self.gens)
        return u, self.depth * self.rd.dim_t + sum(
            len(indices(self.levi.mask(i))) for i in range(self.depth)), u


def triangular_split(pf):
    return TriangularSplit(pf)


# -- characters -----------------------------------------------------------------


class FormalType:
    """lambda = (lambda_0..lambda_{r-1}), covectors on the t basis."""

    __slots__ = ("lams",)

    def __init__(self, lams):
        self.lams = tuple(tuple(frac(x) for x in lam) for lam in lams)

    @property
    def depth(self):
        return len(self.lams)

    def __getitem__(self, i):
        return self.lams[i]

    def __eq__(self, other):
        return isinstance(other, FormalType) and self.lams == other.lams

    def __hash__(self):
        return hash(self.lams)

    def scale(self, c):
        c = frac(c)
        return FormalType([tuple(c * x for x in lam) for lam in self.lams])

    def pair_cartan(self, i, h_coords):
        return sum((l * h for l, h in zip(self.lams[i], h_coords) if l != 0 and h != 0), Zero)

    def pair_coroot(self, rd, i, root_idx):
        return self.pair_cartan(i, rd.coroots[root_idx])

    def to_json(self):
        return {"depth": self.depth,
                "lambdas": [[frac_str(x) for x in lam] for lam in self.lams]}

    @classmethod
    def from_json(cls, data):
        return cls([[frac(x) for x in lam] for lam in data["lambdas"]])

    def __repr__(self):
        return f"FormalType({self.lams})"


class InadmissibleCharacter(ValueError):
    pass


def character_space(pf):
    """Basis of Z_phi = sum of Ker(phi_i) e^i; returns list of (i, t-vector)."""
    lf = pf.levi_filtration()
    out = []
    for i in range(pf.depth):
        for v in strat.kernel_basis(pf.rd, lf.mask(i)):
            out.append((i, tuple(v)))
    return out


def character_space_dim(pf):
    return len(character_space(pf))


def is_admissible(pf, ft: FormalType):
    """lambda_i must annihilate span{H_a : a in phi_i} for every i."""
    if ft.depth != pf.depth:
        return False
    lf = pf.levi_filtration()
    for i in range(pf.depth):
        for a in indices(lf.mask(i)):
            if ft.pair_coroot(pf.rd, i, a) != 0:
                return False
    return True


def require_admissible(pf, ft):
    if not is_admissible(pf, ft):
        raise InadmissibleCharacter(
            "formal type does not extend to a character of the singularity algebra")


# -- the nonsingularity pairing B -------------------------------------------------


def levi_projection(rd, levi_mask, g: GElement) -> GElement:
    """pi_phi: keep the Cartan part and the phi-root coordinates."""
    return GElement(rd, g.cartan, {i: c for i, c in g.root.items() if (levi_mask >> i) & 1})


def character_value(rd, levi_mask, lam, g: GElement):
    """chi(pi_phi(g)): extension of lambda by zero on the root part."""
    proj = levi_projection(rd, levi_mask, g)
    return sum((l * h for l, h in zip(lam, proj.cartan) if l != 0 and h != 0), Zero)


def b_pairing(pf, ft, y_plus: TcElement, y_minus: TcElement):
    """B(Y, Y') = sum_k <chi_k | pi_{phi_k}([Y_i, Y'_j])> over i + j = k."""
    rd = pf.rd
    lf = pf.levi_filtration()
    out = Zero
    for k in range(pf.depth):
        acc = GElement.zero(rd)
        for i in range(k + 1):
            j = k - i
            acc = acc + y_plus.coeffs[i].bracket(y_minus.coeffs[j])
        out += character_value(rd, lf.mask(k), ft[k], acc)
    return out


def b_pairing_matrix(pf, ft):
    """Matrix of B over the triangular bases (rows u^+, columns u^-)."""
    require_admissible(pf, ft)
    ts = triangular_split(pf)
    up = ts.u_plus_basis()
    um = ts.u_minus_basis()
    return [[b_pairing(pf, ft, yp, ym) for ym in um] for yp in up], ts


def is_nonsingular(pf, ft, cross_check=True):
    """Exact rank test of B, cross-checked against dual-stratum membership."""
    mat, ts = b_pairing_matrix(pf, ft)
    n = len(ts.gens)
    by_rank = rank(mat) == n if n else True
    if cross_check:
        lf = pf.levi_filtration()
        by_stratum = strat.dual_stratum_contains(pf.rd, lf, list(ft.lams))
        if by_rank != by_stratum:
            raise ClaimViolation(
                "nonsingularity rank test disagrees with dual-stratum membership")
    return by_rank


def nonsingular_levels_ok(pf, ft):
    """<lambda_{d_a - 1} | a^v> != 0 for every root; the level-wise criterion."""
    lf = pf.levi_filtration()
    for a in range(pf.rd.num_roots):
        d = lf.level(a)
        if d == 0:
            continue
        if ft.pair_coroot(pf.rd, d - 1, a) == 0:
            return False
    return True


def dual_basis(pf, ft):
    """u^+ basis (Y_{a,i}) dual to (X_{a,i}) for the quantization pairing.

    Normalized so that the antipode-contragredient form satisfies
    S_c(Y_{a,i}, X_{a',j}) = c delta delta, i.e. B(Y_{a,i}, X_{a',j}) =
    -delta delta.  Each Y_{a,i} lives on the root line of a.
    """
    require_admissible(pf, ft)
    if not is_nonsingular(pf, ft):
        raise SingularCharacterError("dual bases require a nonsingular character")
    rd = pf.rd
    ts = triangular_split(pf)
    lf = pf.levi_filtration()
    duals = {}
    for a in ts.nu0:
        d = ts.levels[a]
        # B(E_a e^i, E_{-a} e^j) = <lambda_{i+j} | H_a> (0 beyond the depth)
        line = [[ft.pair_coroot(rd, i + j, a) if i + j < pf.depth else Zero
                 for j in range(d)] for i in range(d)]
        coeffs = inverse(line)
        for i in range(d):
            duals[(a, i)] = [(-coeffs[i][j], (a, j)) for j in range(d) if coeffs[i][j] != 0]
    return duals, ts


class SingularCharacterError(ValueError):
    pass
