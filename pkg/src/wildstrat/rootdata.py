"""Split reductive Lie algebras presented by root data.

A RootDatum packages a Cartan subalgebra basis, the roots (as integer
covectors on that basis), coroots, a Chevalley structure-constant table
N(a,b) for [E_a, E_b] = N(a,b) E_{a+b}, and Weyl group generators.

The supported types are built from exact matrix realizations (gl_n, sl_n,
and the classical series B/C/D via the standard antidiagonal bilinear
forms), so every structure constant comes out of an honest matrix
commutator.  The Chevalley axioms and the Jacobi identity are verified at
construction time and a violation raises immediately.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .linalg import (One, Zero, frac, frac_str, identity, mat_mul,
                     nullspace, rank, solve, transpose)


class RootDatumError(ValueError):
    pass


def _mat_zero(n):
    return [[Zero] * n for _ in range(n)]


def _eij(n, i, j, c=One):
    m = _mat_zero(n)
    m[i][j] = frac(c)
    return m


def _madd(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _mscale(a, c):
    return [[c * x for x in row] for row in a]


def _commutator(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(mat_mul(a, b), mat_mul(b, a))]


class WeylElement:
    """A Weyl group element: a permutation of the root list plus its matrix on t."""

    __slots__ = ("perm", "tmat", "word")

    def __init__(self, perm, tmat, word=()):
        self.perm = tuple(perm)
        self.tmat = tuple(tuple(row) for row in tmat)
        self.word = tuple(word)

    def __eq__(self, other):
        return self.perm == other.perm

    def __hash__(self):
        return hash(self.perm)

    def apply_root_index(self, i):
        return self.perm[i]

    def apply_cartan(self, v):
        return tuple(sum((r * x for r, x in zip(row, v)), Zero) for row in self.tmat)

    def apply_covector(self, lam, rd):
        """w . lam, with (w.lam)(H) = lam(w^{-1} H)."""
        inv = rd.weyl_inverse(self)
        mat = inv.tmat
        # columns of inv.tmat give w^{-1} e_j
        return tuple(sum((lam[i] * mat[i][j] for i in range(len(lam))), Zero)
                     for j in range(len(lam)))


class RootDatum:
    def __init__(self, lie_type, n, *, t_mats, root_list, label=None):
        """root_list: list of (covector tuple, matrix) with covector on the t basis."""
        self.lie_type = lie_type
        self.n = n
        self.label = label or f"{lie_type}{n}"
        self.dim_t = len(t_mats)
        self._t_mats = t_mats
        self.roots = tuple(tuple(frac(x) for x in cov) for cov, _ in root_list)
        self._root_mats = [m for _, m in root_list]
        self.num_roots = len(self.roots)
        self.dim_g = self.dim_t + self.num_roots
        self.root_index = {r: i for i, r in enumerate(self.roots)}
        if len(self.root_index) != self.num_roots:
            raise RootDatumError("repeated roots")
        self.neg = tuple(self.root_index[tuple(-x for x in r)] for r in self.roots)
        self._build_tables()
        self._build_base_and_weyl()
        self._build_gram()
        self.verify()

    # -- construction ------------------------------------------------------

    def _coords(self, mat):
        """Express a matrix in the (t, roots) basis; raises if not in the algebra."""
        cols = [[x for row in m for x in row] for m in self._t_mats + self._root_mats]
        target = [x for row in mat for x in row]
        sol = solve(transpose(cols), target)
        if sol is None:
            raise RootDatumError("matrix not inside the realized Lie algebra")
        return sol

    def _build_tables(self):
        # coroots: [E_a, E_{-a}] expressed on the t basis
        self.coroots = []
        nsc = {}
        for i in range(self.num_roots):
            h = _commutator(self._root_mats[i], self._root_mats[self.neg[i]])
            coords = self._coords(h)
            if any(x != 0 for x in coords[self.dim_t:]):
                raise RootDatumError("[E_a, E_{-a}] not in the Cartan subalgebra")
            self.coroots.append(tuple(coords[:self.dim_t]))
        for i in range(self.num_roots):
            for j in range(self.num_roots):
                if j == self.neg[i]:
                    continue
                s = tuple(a + b for a, b in zip(self.roots[i], self.roots[j]))
                k = self.root_index.get(s)
                br = _commutator(self._root_mats[i], self._root_mats[j])
                coords = self._coords(br)
                if k is None:
                    if any(x != 0 for x in coords):
                        raise RootDatumError("bracket escapes the root decomposition")
                    continue
                c = coords[self.dim_t + k]
                check = list(coords)
                check[self.dim_t + k] = Zero
                if any(x != 0 for x in check):
                    raise RootDatumError("bracket not a multiple of a single root vector")
                if c != 0:
                    nsc[(i, j)] = c
        self.nsc = nsc
        self.root_sum = {}
        for i in range(self.num_roots):
            for j in range(self.num_roots):
                s = tuple(a + b for a, b in zip(self.roots[i], self.roots[j]))
                self.root_sum[(i, j)] = self.root_index.get(s)

    def pair(self, root_idx, cartan_vec):
        """<alpha | H> for a Cartan coordinate vector."""
        r = self.roots[root_idx]
        return sum((a * h for a, h in zip(r, cartan_vec) if a != 0 and h != 0), Zero)

    def cartan_integer(self, i, j):
        """<alpha_i | coroot_j>."""
        return self.pair(i, self.coroots[j])

    def _build_base_and_weyl(self):
        # positive roots: those with positive pairing against a generic vector
        xi = self._generic_regular_vector()
        pos = [i for i in range(self.num_roots) if self.pair(i, xi) > 0]
        self.positive = tuple(sorted(pos))
        # simple roots of that system: positive roots not a sum of two positives
        possums = set()
        for i in pos:
            for j in pos:
                k = self.root_sum[(i, j)]
                if k is not None:
                    possums.add(k)
        self.simple = tuple(sorted(i for i in pos if i not in possums))
        self.cartan_matrix = [[int(self.cartan_integer(self.roots.index(self.roots[i]),
                                                       j))
                               for j in self.simple] for i in self.simple]
        # actually store <alpha_i|alpha_j^v> over the base
        self.cartan_matrix = [[self._as_int(self.cartan_integer(i, j)) for j in self.simple]
                              for i in self.simple]
        gens = [self._reflection(i) for i in self.simple]
        self._weyl_gens = gens
        self.weyl = self._generate_weyl(gens)
        self._weyl_index = {w.perm: t for t, w in enumerate(self.weyl)}

    @staticmethod
    def _as_int(x):
        if x.denominator != 1:
            raise RootDatumError("Cartan integer is not an integer")
        return int(x)

    def _generic_regular_vector(self):
        t = 1
        while True:
            v = tuple(Fraction(t) ** k for k in range(self.dim_t))
            if all(self.pair(i, v) != 0 for i in range(self.num_roots)):
                return v
            t += 1

    def _reflection(self, i):
        """Reflection in root i, as permutation of the roots and matrix on t."""
        co = self.coroots[i]
        al = self.roots[i]
        perm = []
        for j in range(self.num_roots):
            img = tuple(a - self.pair(j, co) * b for a, b in zip(self.roots[j], al))
            k = self.root_index.get(img)
            if k is None:
                raise RootDatumError("reflection does not permute the roots")
            perm.append(k)
        n = self.dim_t
        tmat = [[(One if r == c else Zero) - al[r] * co[c] if True else Zero
                 for c in range(n)] for r in range(n)]
        # s(H) = H - <alpha|H> alpha^v ; entry (r,c) = delta - coroot[r]*alpha[c]
        tmat = [[(One if r == c else Zero) - co[r] * al[c] for c in range(n)]
                for r in range(n)]
        return WeylElement(perm, tmat, (i,))

    def _generate_weyl(self, gens):
        ident = WeylElement(tuple(range(self.num_roots)), identity(self.dim_t))
        seen = {ident.perm: ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for w in frontier:
                for g in gens:
                    perm = tuple(g.perm[w.perm[i]] for i in range(self.num_roots))
                    if perm not in seen:
                        tmat = mat_mul(g.tmat, [list(r) for r in w.tmat])
                        new = WeylElement(perm, tmat, g.word + w.word)
                        seen[perm] = new
                        nxt.append(new)
            frontier = nxt
        return tuple(seen.values())

    def weyl_inverse(self, w):
        inv_perm = [0] * self.num_roots
        for i, p in enumerate(w.perm):
            inv_perm[p] = i
        return self.weyl[self._weyl_index[tuple(inv_perm)]]

    def _build_gram(self):
        """Invariant form: the defining-representation trace form, rescaled so
        that the first simple root has (E_a | E_{-a}) = 1.

        On gl_n and the A series this makes every (E_a | E_{-a}) = 1 and the
        Cartan part the plain trace form; for B/C the constants necessarily
        differ between root lengths (no invariant form has them all equal).
        """
        def tr_prod(m1, m2):
            return sum(sum(a * b for a, b in zip(row, col))
                       for row, col in zip(m1, transpose(m2)))

        a0 = self.simple[0]
        base = tr_prod(self._root_mats[a0], self._root_mats[self.neg[a0]])
        if base == 0:
            raise RootDatumError("degenerate trace form on the first simple root")
        scale = One / base
        self.e_pair = tuple(scale * tr_prod(self._root_mats[i], self._root_mats[self.neg[i]])
                            for i in range(self.num_roots))
        self.gram = [[scale * tr_prod(self._t_mats[a], self._t_mats[b])
                      for b in range(self.dim_t)] for a in range(self.dim_t)]
        # normalization sanity: (H_a | H) = <a|H> (E_a|E_{-a}) for all a, H
        for i in range(self.num_roots):
            co = self.coroots[i]
            for t in range(self.dim_t):
                lhs = sum(co[a] * self.gram[a][t] for a in range(self.dim_t))
                if lhs != self.roots[i][t] * self.e_pair[i]:
                    raise RootDatumError("invariant form fails the coroot normalization")

    # -- verification ------------------------------------------------------

    def verify(self):
        self._verify_root_system()
        self._verify_chevalley()
        self._verify_jacobi()

    def _verify_root_system(self):
        for i, r in enumerate(self.roots):
            if self.neg[self.neg[i]] != i:
                raise RootDatumError("negation is not an involution")
            if self.pair(i, self.coroots[i]) != 2:
                raise RootDatumError("<a|a^v> != 2")
            for j in range(self.num_roots):
                self._as_int(self.cartan_integer(i, j))

    def _string_p(self, i, j):
        """p = max{k : a_j - k a_i in Phi} for i != -j."""
        p = 0
        cur = self.roots[j]
        while True:
            cur = tuple(a - b for a, b in zip(cur, self.roots[i]))
            if cur in self.root_index:
                p += 1
            else:
                return p

    def _verify_chevalley(self):
        for i in range(self.num_roots):
            for j in range(self.num_roots):
                if j == self.neg[i]:
                    continue
                k = self.root_sum[(i, j)]
                c = self.nsc.get((i, j))
                if k is None:
                    if c is not None:
                        raise RootDatumError("nonzero N for a non-root sum")
                    continue
                p = self._string_p(i, j)
                if c is None or abs(c) != p + 1:
                    raise RootDatumError(
                        f"|N| != p+1 at ({self.roots[i]}, {self.roots[j]}): N={c}, p={p}")
                # transpose compatibility: N(-a,-b) = -N(a,b)
                if self.nsc.get((self.neg[i], self.neg[j])) != -c:
                    raise RootDatumError("N(-a,-b) != -N(a,b)")

    def _basis_bracket(self, a, b):
        """Bracket of basis elements, as {basis index: coeff}.

        Basis indices: 0..dim_t-1 are the Cartan basis, dim_t+k is root k.
        """
        out = {}
        ta, tb = a < self.dim_t, b < self.dim_t
        if ta and tb:
            return out
        if ta and not tb:
            j = b - self.dim_t
            c = self.roots[j][a]
            if c != 0:
                out[b] = c
            return out
        if tb and not ta:
            i = a - self.dim_t
            c = self.roots[i][b]
            if c != 0:
                out[a] = -c
            return out
        i, j = a - self.dim_t, b - self.dim_t
        if j == self.neg[i]:
            for t, c in enumerate(self.coroots[i]):
                if c != 0:
                    out[t] = c
            return out
        k = self.root_sum[(i, j)]
        if k is not None and (i, j) in self.nsc:
            out[self.dim_t + k] = self.nsc[(i, j)]
        return out

    def _verify_jacobi(self):
        dim = self.dim_g
        for a in range(dim):
            for b in range(a + 1, dim):
                ab = self._basis_bracket(a, b)
                for c in range(b + 1, dim):
                    # [[a,b],c] + [[b,c],a] + [[c,a],b] = 0
                    acc = {}
                    for x, co in ab.items():
                        for y, co2 in self._basis_bracket(x, c).items():
                            acc[y] = acc.get(y, Zero) + co * co2
                    for x, co in self._basis_bracket(b, c).items():
                        for y, co2 in self._basis_bracket(x, a).items():
                            acc[y] = acc.get(y, Zero) + co * co2
                    for x, co in self._basis_bracket(c, a).items():
                        for y, co2 in self._basis_bracket(x, b).items():
                            acc[y] = acc.get(y, Zero) + co * co2
                    if any(v != 0 for v in acc.values()):
                        raise RootDatumError(f"Jacobi identity fails on basis triple {(a, b, c)}")

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {
            "type": self.lie_type,
            "rank": self.n,
            "roots": [[int(x) for x in r] for r in self.roots],
            "cartan_matrix": self.cartan_matrix,
            "structure_constants": {f"{i},{j}": frac_str(c) for (i, j), c in sorted(self.nsc.items())},
        }

    @property
    def center_dim(self):
        """Dimension of the center of g = common kernel of all roots."""
        return self.dim_t - rank([list(r) for r in self.roots])

    def center_basis(self):
        return nullspace([list(r) for r in self.roots], cols=self.dim_t)

    def defining_matrix(self, basis_index):
        """Matrix of a basis element in the defining representation (test oracle)."""
        if basis_index < self.dim_t:
            return self._t_mats[basis_index]
        return self._root_mats[basis_index - self.dim_t]

    def __repr__(self):
        return f"RootDatum({self.label}, {self.num_roots} roots, rank t = {self.dim_t})"


# ---------------------------------------------------------------------------
# matrix realizations
# ---------------------------------------------------------------------------


def _build_gl(n):
    t_mats = [_eij(n, i, i) for i in range(n)]
    roots = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            cov = tuple(One if k == i else (-One if k == j else Zero) for k in range(n))
            roots.append((cov, _eij(n, i, j)))
    return RootDatum("gl", n, t_mats=t_mats, root_list=roots)


def _build_sl(n):
    t_mats = [_madd(_eij(n, i, i), _mscale(_eij(n, i + 1, i + 1), -One)) for i in range(n - 1)]
    roots = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            # alpha_ij(h_k) with h_k = E_kk - E_{k+1,k+1}
            cov = tuple((One if k == i else Zero) - (One if k + 1 == i else Zero)
                        - (One if k == j else Zero) + (One if k + 1 == j else Zero)
                        for k in range(n - 1))
            roots.append((cov, _eij(n, i, j)))
    return RootDatum("sl", n, t_mats=t_mats, root_list=roots)


def _eps_cov(n, coeffs):
    return tuple(frac(coeffs.get(k, 0)) for k in range(n))


def _build_so_odd(n):
    """Type B_n as so(2n+1) for the symmetric form antidiag(1..1,2,1..1)."""
    size = 2 * n + 1
    mid = n  # 0-based index of the middle
    def pr(i):  # 0-based primed index
        return size - 1 - i
    t_mats = [_madd(_eij(size, i, i), _mscale(_eij(size, pr(i), pr(i)), -One)) for i in range(n)]
    roots = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            m = _madd(_eij(size, i, j), _mscale(_eij(size, pr(j), pr(i)), -One))
            roots.append((_eps_cov(n, {i: 1, j: -1}), m))
    for i in range(n):
        for j in range(i + 1, n):
            p = _madd(_eij(size, i, pr(j)), _mscale(_eij(size, j, pr(i)), -One))
            roots.append((_eps_cov(n, {i: 1, j: 1}), p))
            mneg = _madd(_eij(size, pr(j), i), _mscale(_eij(size, pr(i), j), -One))
            roots.append((_eps_cov(n, {i: -1, j: -1}), mneg))
    for i in range(n):
        e = _madd(_mscale(_eij(size, i, mid), 2 * One), _mscale(_eij(size, mid, pr(i)), -One))
        roots.append((_eps_cov(n, {i: 1}), e))
        f = _madd(_eij(size, mid, i), _mscale(_eij(size, pr(i), mid), -2 * One))
        roots.append((_eps_cov(n, {i: -1}), f))
    return RootDatum("B", n, t_mats=t_mats, root_list=roots)


def _build_sp(n):
    """Type C_n as sp(2n)."""
    size = 2 * n
    def pr(i):
        return size - 1 - i
    t_mats = [_madd(_eij(size, i, i), _mscale(_eij(size, pr(i), pr(i)), -One)) for i in range(n)]
    roots = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            m = _madd(_eij(size, i, j), _mscale(_eij(size, pr(j), pr(i)), -One))
            roots.append((_eps_cov(n, {i: 1, j: -1}), m))
    for i in range(n):
        for j in range(i + 1, n):
            p = _madd(_eij(size, i, pr(j)), _eij(size, j, pr(i)))
            roots.append((_eps_cov(n, {i: 1, j: 1}), p))
            mneg = _madd(_eij(size, pr(j), i), _eij(size, pr(i), j))
            roots.append((_eps_cov(n, {i: -1, j: -1}), mneg))
    for i in range(n):
        roots.append((_eps_cov(n, {i: 2}), _eij(size, i, pr(i))))
        roots.append((_eps_cov(n, {i: -2}), _eij(size, pr(i), i)))
    return RootDatum("C", n, t_mats=t_mats, root_list=roots)


def _build_so_even(n):
    """Type D_n as so(2n)."""
    size = 2 * n
    def pr(i):
        return size - 1 - i
    t_mats = [_madd(_eij(size, i, i), _mscale(_eij(size, pr(i), pr(i)), -One)) for i in range(n)]
    roots = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            m = _madd(_eij(size, i, j), _mscale(_eij(size, pr(j), pr(i)), -One))
            roots.append((_eps_cov(n, {i: 1, j: -1}), m))
    for i in range(n):
        for j in range(i + 1, n):
            p = _madd(_eij(size, i, pr(j)), _mscale(_eij(size, j, pr(i)), -One))
            roots.append((_eps_cov(n, {i: 1, j: 1}), p))
            mneg = _madd(_eij(size, pr(j), i), _mscale(_eij(size, pr(i), j), -One))
            roots.append((_eps_cov(n, {i: -1, j: -1}), mneg))
    return RootDatum("D", n, t_mats=t_mats, root_list=roots)


_BUILDERS = {
    "gl": _build_gl,
    "sl": _build_sl,
    "A": lambda n: _build_sl(n + 1),
    "B": _build_so_odd,
    "C": _build_sp,
    "D": _build_so_even,
}


@lru_cache(maxsize=None)
def root_datum(lie_type, n):
    """Build (and cache) the root datum of the given classical type."""
    if lie_type not in _BUILDERS:
        raise RootDatumError(f"unsupported type {lie_type!r}; choose from {sorted(_BUILDERS)}")
    if n < 1 or (lie_type in ("sl",) and n < 2) or (lie_type == "D" and n < 2):
        raise RootDatumError(f"rank {n} out of range for type {lie_type}")
    rd = _BUILDERS[lie_type](n)
    rd.label = f"{lie_type}{n}"
    return rd


def parse_type(name):
    """Parse labels like 'gl3', 'sl2', 'B2', 'A2' into a root datum."""
    name = name.strip()
    for prefix in ("gl", "sl", "A", "B", "C", "D"):
        if name.startswith(prefix):
            try:
                n = int(name[len(prefix):])
            except ValueError:
                continue
            return root_datum(prefix, n)
    raise RootDatumError(f"cannot parse Lie type {name!r}")
