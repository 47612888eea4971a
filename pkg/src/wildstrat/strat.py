"""Levi subsystems, the Levi poset, Levi filtrations and stratifications.

Root subsets are integer bitmasks over the root list of a RootDatum.  All
predicates are exact linear algebra (span tests, kernel computations); no
thresholds anywhere.  Weyl quotients and the stratification axioms are
implemented as finite, testable procedures.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import Zero, in_row_span, nullspace, rank


# -- bitmask helpers ---------------------------------------------------------


def mask_from_indices(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def indices(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def full_mask(rd):
    return (1 << rd.num_roots) - 1


def negate_mask(rd, mask):
    return mask_from_indices(rd.neg[i] for i in indices(mask))


def weyl_mask(w, mask):
    return mask_from_indices(w.perm[i] for i in indices(mask))


# -- Levi subsystems ---------------------------------------------------------


def span_closure(rd, mask):
    """Phi_S: the roots inside the Q-span of the subset."""
    rows = [list(rd.roots[i]) for i in indices(mask)]
    out = 0
    for i in range(rd.num_roots):
        if in_row_span(rows, list(rd.roots[i])):
            out |= 1 << i
    return out


def is_levi(rd, mask):
    """span(phi) intersect Phi == phi."""
    return span_closure(rd, mask) == mask


def kernel_basis(rd, mask):
    """Basis of Ker(phi) = {X in t : <a|X> = 0 for a in phi}."""
    rows = [list(rd.roots[i]) for i in indices(mask)]
    return nullspace(rows, cols=rd.dim_t)


def kernel_dim(rd, mask):
    return len(kernel_basis(rd, mask))


def levi_witness(rd, mask):
    """Deterministic rational X in t with phi_X == mask.

    Found by a lexicographic perturbation over the kernel basis; raises when
    the subset is not Levi (no such point exists then).
    """
    basis = kernel_basis(rd, mask)
    avoid = [i for i in range(rd.num_roots) if not (mask >> i) & 1]
    if not basis:
        if avoid:
            raise ValueError("subset is the full root system only if nothing is left to avoid")
        return tuple(Zero for _ in range(rd.dim_t))
    t = 1
    while True:
        x = [Zero] * rd.dim_t
        for k, b in enumerate(basis):
            f = Fraction(t) ** k
            x = [a + f * c for a, c in zip(x, b)]
        if all(rd.pair(i, x) != 0 for i in avoid):
            return tuple(x)
        t += 1
        if t > 10000:
            raise ValueError("no witness point: subset is not Levi")


def levi_of_point(rd, x):
    """phi_X = {a in Phi : <a|X> = 0}; always a Levi subsystem."""
    return mask_from_indices(i for i in range(rd.num_roots) if rd.pair(i, x) == 0)


def enumerate_levi(rd):
    """All Levi subsystems, as W-orbits of the standard Phi_Sigma."""
    delta = rd.simple
    seen = set()
    for bits in range(1 << len(delta)):
        sigma = [delta[k] for k in range(len(delta)) if (bits >> k) & 1]
        base = span_closure(rd, mask_from_indices(sigma))
        for w in rd.weyl:
            seen.add(weyl_mask(w, base))
    return sorted(seen)


class LeviPoset:
    """The graded poset of Levi subsystems under anti-inclusion."""

    def __init__(self, rd):
        self.rd = rd
        self.elements = enumerate_levi(rd)
        self.rank = {m: kernel_dim(rd, m) for m in self.elements}

    def leq(self, a, b):
        """a <= b in the poset (anti-inclusion: a contains b as subsets)."""
        return (a | b) == a

    def covers(self):
        out = []
        for a in self.elements:
            for b in self.elements:
                if a != b and self.leq(a, b):
                    if not any(c not in (a, b) and self.leq(a, c) and self.leq(c, b)
                               for c in self.elements):
                        out.append((a, b))
        return out

    def greatest(self):
        return 0

    def least(self):
        return full_mask(self.rd)

    def hasse_dot(self):
        lines = ["digraph levi_poset {", "  rankdir=BT;"]
        for m in self.elements:
            label = "{" + ",".join(str(i) for i in indices(m)) + "}"
            lines.append(f'  "m{m}" [label="{label}\\nrank {self.rank[m]}"];')
        for a, b in self.covers():
            lines.append(f'  "m{a}" -> "m{b}";')
        lines.append("}")
        return "\n".join(lines)


# -- Levi filtrations --------------------------------------------------------


class LeviFiltration:
    """Nondecreasing chain phi_0 <= ... <= phi_{s-1} (phi_s = Phi implicit)."""

    __slots__ = ("rd", "depth", "masks")

    def __init__(self, rd, masks):
        self.rd = rd
        self.masks = tuple(masks)
        self.depth = len(self.masks)
        for a, b in zip(self.masks, self.masks[1:]):
            if a & ~b:
                raise ValueError("filtration is not nondecreasing")

    def mask(self, i):
        if i >= self.depth:
            return full_mask(self.rd)
        return self.masks[i]

    def __eq__(self, other):
        return (isinstance(other, LeviFiltration) and self.rd is other.rd
                and self.depth == other.depth and self.masks == other.masks)

    def __hash__(self):
        return hash((self.depth, self.masks))

    def level(self, root_idx):
        """d_a = min{i : a in phi_i}, in {0..depth}."""
        for i, m in enumerate(self.masks):
            if (m >> root_idx) & 1:
                return i
        return self.depth

    def levels(self):
        return tuple(self.level(i) for i in range(self.rd.num_roots))

    def dimension(self):
        return sum(kernel_dim(self.rd, m) for m in self.masks)

    def leq(self, other):
        """Product order: phi <= phi' iff phi_i contains phi'_i for all i."""
        if self.depth != other.depth:
            raise ValueError("comparing filtrations of different depth")
        return all((a | b) == a for a, b in zip(self.masks, other.masks))

    def weyl_image(self, w):
        return LeviFiltration(self.rd, [weyl_mask(w, m) for m in self.masks])

    def is_constant_full(self):
        return all(m == full_mask(self.rd) for m in self.masks)

    def __repr__(self):
        rd = self.rd
        return "LeviFiltration(" + " <= ".join(
            "{" + ",".join(map(str, indices(m))) + "}" for m in self.masks) + ")"


def stratum_of_tuple(rd, xs):
    """The unique Levi filtration whose stratum contains the tuple.

    Convention (stratification side): phi_i = intersection of phi_{X_j} over
    j >= i.  Orbit-side data enters through the duality swap X_i = A_{r-i};
    see the classification helpers for that convention.
    """
    s = len(xs)
    pointwise = [levi_of_point(rd, x) for x in xs]
    masks = []
    for i in range(s):
        m = full_mask(rd)
        for j in range(i, s):
            m &= pointwise[j]
        masks.append(m)
    filt = LeviFiltration(rd, masks)
    if not stratum_contains(filt, xs):
        raise AssertionError("membership re-verification failed")
    return filt


def stratum_contains(filt, xs):
    """Exact membership in the product stratum (kernel and avoided hyperplanes)."""
    rd = filt.rd
    if len(xs) != filt.depth:
        return False
    for i, x in enumerate(xs):
        for a in indices(filt.mask(i)):
            if rd.pair(a, x) != 0:
                return False
        for a in indices(filt.mask(i + 1) & ~filt.mask(i)):
            if rd.pair(a, x) == 0:
                return False
    return True


def stratum_witness(filt):
    """A rational point of the stratum: X_i has phi_{X_i} exactly phi-determined."""
    rd = filt.rd
    return tuple(levi_witness(rd, m) for m in filt.masks)


def enumerate_filtrations(rd, s, levis=None):
    """All depth-bounded Levi filtrations phi_0 <= ... <= phi_{s-1} (phi_s = Phi)."""
    if levis is None:
        levis = enumerate_levi(rd)
    out = []

    def extend(chain):
        if len(chain) == s:
            out.append(LeviFiltration(rd, chain))
            return
        for m in levis:
            if not chain or (chain[-1] | m) == m:
                extend(chain + [m])

    extend([])
    return out


def cardinality_bound(rd, s):
    """|W| (s+1)^{rk Phi}: the enumeration bound."""
    return len(rd.weyl) * (s + 1) ** rank([list(r) for r in rd.roots])


# -- Weyl quotients ----------------------------------------------------------


class QuotientStratum:
    __slots__ = ("orbit", "setwise_order", "pointwise_order", "out_order", "free_on_samples")

    def __init__(self, orbit, setwise_order, pointwise_order, out_order, free_on_samples):
        self.orbit = orbit
        self.setwise_order = setwise_order
        self.pointwise_order = pointwise_order
        self.out_order = out_order
        self.free_on_samples = free_on_samples


def pointwise_stabilizer(rd, filt):
    """Elements of W acting trivially on Ker(phi_0) x ... x Ker(phi_{s-1})."""
    kers = [kernel_basis(rd, m) for m in filt.masks]
    out = []
    for w in rd.weyl:
        ok = True
        for basis in kers:
            for v in basis:
                if w.apply_cartan(v) != tuple(v):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(w)
    return out


def weyl_orbits_and_quotient(rd, s, check_freeness=True):
    """Partition the depth-s filtrations into W-orbits, with stabilizer data.

    Returns (list of QuotientStratum, leq) where leq compares orbits in the
    quotient poset order (representative-wise comparability).
    """
    filts = enumerate_filtrations(rd, s)
    remaining = set(filts)
    orbits = []
    while remaining:
        f = next(iter(remaining))
        orbit = {f.weyl_image(w) for w in rd.weyl}
        remaining -= orbit
        orbits.append(sorted(orbit, key=lambda g: g.masks))
    strata = []
    for orbit in orbits:
        rep = orbit[0]
        setwise = [w for w in rd.weyl if rep.weyl_image(w) == rep]
        pointwise = pointwise_stabilizer(rd, rep)
        out_order = len(setwise) // len(pointwise)
        free = None
        if check_freeness:
            free = _out_acts_freely_on_sample(rd, rep, setwise, pointwise)
        strata.append(QuotientStratum(orbit, len(setwise), len(pointwise), out_order, free))

    def leq(i, j):
        a = strata[i].orbit[0]
        return any(a.leq(b) for b in strata[j].orbit)

    return strata, leq


def _out_acts_freely_on_sample(rd, filt, setwise, pointwise, samples=3):
    """Out = N/W_pointwise acting on a few stratum points: flag any fixed point."""
    pt_set = set(w.perm for w in pointwise)
    pts = [stratum_witness(filt)]
    # extra deterministic samples: scale the witness blocks
    for t in (2, 3):
        pts.append(tuple(tuple(Fraction(t) * x for x in blk) for blk in pts[0]))
    for w in setwise:
        if w.perm in pt_set:
            continue
        for xs in pts[:samples]:
            if all(w.apply_cartan(x) == tuple(x) for x in xs):
                return False
    return True


# -- dual strata --------------------------------------------------------------


def coroot_span_closure(rd, mask):
    """Coroots inside the Q-span of the masked coroots (dual-side span test)."""
    rows = [list(rd.coroots[i]) for i in indices(mask)]
    out = 0
    for i in range(rd.num_roots):
        if in_row_span(rows, list(rd.coroots[i])):
            out |= 1 << i
    return out


def is_levi_dual(rd, mask):
    return coroot_span_closure(rd, mask) == mask


def covector_pair(rd, lam, coroot_idx):
    """<lambda | a^v> for a covector on the t basis."""
    co = rd.coroots[coroot_idx]
    return sum((l * c for l, c in zip(lam, co) if l != 0 and c != 0), Zero)


def dual_stratum_of_covector(rd, lams):
    """phi^v_i = {a^v : <lambda_j | a^v> = 0 for all j >= i}, as a filtration."""
    r = len(lams)
    pointwise = [mask_from_indices(i for i in range(rd.num_roots)
                                   if covector_pair(rd, lam, i) == 0) for lam in lams]
    masks = []
    for i in range(r):
        m = full_mask(rd)
        for j in range(i, r):
            m &= pointwise[j]
        masks.append(m)
    filt = LeviFiltration(rd, masks)
    for m in masks:
        if not is_levi_dual(rd, m):
            raise AssertionError("dual stratum mask is not a dual Levi subsystem")
    return filt


def dual_stratum_contains(rd, filt, lams):
    """Membership of a covector tuple in the dual stratum of the filtration."""
    if len(lams) != filt.depth:
        return False
    for i, lam in enumerate(lams):
        for a in indices(filt.mask(i)):
            if covector_pair(rd, lam, a) != 0:
                return False
        for a in indices(filt.mask(i + 1) & ~filt.mask(i)):
            if covector_pair(rd, lam, a) == 0:
                return False
    return True


# -- stratification axioms -----------------------------------------------------


def verify_stratification_axioms(rd, filtrations, extra_points=()):
    """Combinatorial check of the stratification axioms on a finite family.

    - partition: every sample point lies in exactly one member stratum;
    - closure order: termwise kernel inclusion iff filtration order.
    Returns a report dict; 'ok' is False with the first violated axiom named.
    """
    report = {"ok": True, "violations": []}
    if not filtrations:
        report["ok"] = False
        report["violations"].append("empty family")
        return report
    s = filtrations[0].depth
    # ambient sample: witnesses of every depth-s stratum, not just the family's
    points = [stratum_witness(f) for f in enumerate_filtrations(rd, s)]
    points.extend(stratum_witness(f) for f in filtrations)
    points.extend(extra_points)
    for xs in points:
        hits = [f for f in filtrations if stratum_contains(f, xs)]
        if len(hits) != 1:
            report["ok"] = False
            report["violations"].append(
                f"partition: point lies in {len(hits)} strata (expected 1)")
            break
    for f in filtrations:
        for g in filtrations:
            incl = all(_kernel_included(rd, fm, gm) for fm, gm in zip(f.masks, g.masks))
            if incl != f.leq(g):
                report["ok"] = False
                report["violations"].append("closure order does not match poset order")
                return report
    return report


def _kernel_included(rd, inner_mask, outer_mask):
    """Ker(inner) included in Ker(outer) iff outer roots vanish on Ker(inner)."""
    basis = kernel_basis(rd, inner_mask)
    return all(rd.pair(a, v) == 0 for v in basis for a in indices(outer_mask))
