"""Elements of g and of the truncated current algebra g_r = g (x) C[e]/e^r.

GElement: Cartan part (coordinates on the chosen t basis) + root coefficients.
TcElement: depth r and a coefficient GElement per epsilon degree.

The bracket, invariant form, depth-graded pairing ( . | . )_c, transposition,
semisimplicity test, and the kernel/image splitting for semisimple operators
all live here.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import (One, Zero, frac, frac_str, is_squarefree,
                     minimal_polynomial, nullspace, rank, rref)


class GElement:
    __slots__ = ("rd", "cartan", "root")

    def __init__(self, rd, cartan=None, root=None):
        self.rd = rd
        self.cartan = tuple(frac(x) for x in (cartan or (0,) * rd.dim_t))
        self.root = {i: frac(c) for i, c in (root or {}).items() if c != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, rd):
        return cls(rd)

    @classmethod
    def cartan_vec(cls, rd, coords):
        return cls(rd, cartan=coords)

    @classmethod
    def root_vec(cls, rd, idx, coeff=1):
        return cls(rd, root={idx: coeff})

    @classmethod
    def coroot(cls, rd, idx):
        return cls(rd, cartan=rd.coroots[idx])

    @classmethod
    def basis(cls, rd):
        for t in range(rd.dim_t):
            yield cls(rd, cartan=tuple(One if k == t else Zero for k in range(rd.dim_t)))
        for i in range(rd.num_roots):
            yield cls.root_vec(rd, i)

    # -- linear structure ---------------------------------------------------

    def is_zero(self):
        return all(x == 0 for x in self.cartan) and not self.root

    def __add__(self, other):
        self._check(other)
        root = dict(self.root)
        for i, c in other.root.items():
            nc = root.get(i, Zero) + c
            if nc == 0:
                root.pop(i, None)
            else:
                root[i] = nc
        return GElement(self.rd, tuple(a + b for a, b in zip(self.cartan, other.cartan)), root)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = frac(c)
        if c == 0:
            return GElement.zero(self.rd)
        return GElement(self.rd, tuple(c * x for x in self.cartan),
                        {i: c * v for i, v in self.root.items()})

    def __eq__(self, other):
        return (isinstance(other, GElement) and self.rd is other.rd
                and self.cartan == other.cartan and self.root == other.root)

    def __hash__(self):
        return hash((self.cartan, tuple(sorted(self.root.items()))))

    def _check(self, other):
        if self.rd is not other.rd:
            raise ValueError("elements over different root data")

    def coords(self):
        """Full coordinate vector on the (t basis, root) ordering."""
        rd = self.rd
        v = list(self.cartan) + [Zero] * rd.num_roots
        for i, c in self.root.items():
            v[rd.dim_t + i] = c
        return v

    @classmethod
    def from_coords(cls, rd, v):
        return cls(rd, cartan=v[:rd.dim_t],
                   root={i: c for i, c in enumerate(v[rd.dim_t:]) if c != 0})

    def is_cartan(self):
        return not self.root

    # -- Lie structure -------------------------------------------------------

    def bracket(self, other):
        self._check(other)
        rd = self.rd
        out_cartan = [Zero] * rd.dim_t
        out_root = {}

        def add_root(i, c):
            if c == 0:
                return
            nc = out_root.get(i, Zero) + c
            if nc == 0:
                out_root.pop(i, None)
            else:
                out_root[i] = nc

        # [t, root part]
        if any(x != 0 for x in self.cartan):
            for j, cj in other.root.items():
                add_root(j, rd.pair(j, self.cartan) * cj)
        if any(x != 0 for x in other.cartan):
            for i, ci in self.root.items():
                add_root(i, -rd.pair(i, other.cartan) * ci)
        # [root, root]
        for i, ci in self.root.items():
            for j, cj in other.root.items():
                if j == rd.neg[i]:
                    co = rd.coroots[i]
                    f = ci * cj
                    for t in range(rd.dim_t):
                        out_cartan[t] += f * co[t]
                else:
                    n = rd.nsc.get((i, j))
                    if n is not None:
                        add_root(rd.root_sum[(i, j)], ci * cj * n)
        return GElement(rd, out_cartan, out_root)

    def pairing(self, other):
        """Invariant bilinear form; (E_a | E_{-a}) = 1 on gl/sl/A types."""
        self._check(other)
        rd = self.rd
        out = Zero
        for i, ci in self.root.items():
            cj = other.root.get(rd.neg[i])
            if cj:
                out += ci * cj * rd.e_pair[i]
        g = rd.gram
        for a, ca in enumerate(self.cartan):
            if ca == 0:
                continue
            for b, cb in enumerate(other.cartan):
                if cb != 0 and g[a][b] != 0:
                    out += ca * g[a][b] * cb
        return out

    def transpose(self):
        """t-fixing involution swapping E_a with E_{-a}."""
        rd = self.rd
        return GElement(rd, self.cartan, {rd.neg[i]: c for i, c in self.root.items()})

    def ad_matrix(self):
        """Matrix of ad_x on g in the (t, roots) coordinate basis."""
        rd = self.rd
        cols = []
        for b in GElement.basis(rd):
            cols.append(self.bracket(b).coords())
        # columns were computed; transpose into row-major matrix
        n = rd.dim_g
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def __repr__(self):
        rd = self.rd
        parts = []
        for t, c in enumerate(self.cartan):
            if c != 0:
                parts.append(f"{frac_str(c)}*h{t}")
        for i, c in sorted(self.root.items()):
            label = ",".join(frac_str(x) for x in rd.roots[i])
            parts.append(f"{frac_str(c)}*E({label})")
        return " + ".join(parts) if parts else "0"


def is_semisimple(x: GElement) -> bool:
    """True iff the minimal polynomial of ad_x is squarefree over Q."""
    return is_squarefree(minimal_polynomial(x.ad_matrix()))


class NotSemisimpleError(ValueError):
    pass


def semisimple_split(f_matrix, space_basis):
    """Split V = Ker(f) + f(V) for a semisimple operator on span(space_basis).

    f_matrix is the matrix of f in the coordinates of space_basis.  Returns
    (kernel vectors, image vectors) as combinations of the given basis.
    Raises NotSemisimpleError when kernel and image overlap.
    """
    dim = len(space_basis)
    ker = nullspace(f_matrix, cols=dim)
    # image basis: the column space of f = row space of its transpose
    tr = [[f_matrix[r][c] for r in range(dim)] for c in range(dim)]
    tr_red, tr_piv = rref(tr)
    img = [tr_red[k] for k in range(len(tr_piv))]
    if rank(ker + img) != dim:
        raise NotSemisimpleError("kernel and image do not span: operator not semisimple")

    def comb(coords):
        out = space_basis[0].scale(0) if hasattr(space_basis[0], "scale") else None
        if out is None:
            return coords
        for c, b in zip(coords, space_basis):
            if c != 0:
                out = out + b.scale(c)
        return out

    return [comb(v) for v in ker], [comb(v) for v in img]


class TcElement:
    __slots__ = ("rd", "depth", "coeffs")

    def __init__(self, rd, depth, coeffs=None):
        self.rd = rd
        self.depth = depth
        if coeffs is None:
            coeffs = [GElement.zero(rd) for _ in range(depth)]
        if len(coeffs) != depth:
            raise ValueError("coefficient list does not match the depth")
        self.coeffs = tuple(coeffs)

    @classmethod
    def from_parts(cls, rd, depth, parts):
        """parts: iterable of (eps_degree, GElement)."""
        cs = [GElement.zero(rd) for _ in range(depth)]
        for d, g in parts:
            if 0 <= d < depth:
                cs[d] = cs[d] + g
        return cls(rd, depth, cs)

    @classmethod
    def pure(cls, rd, depth, d, g):
        return cls.from_parts(rd, depth, [(d, g)])

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __add__(self, other):
        self._check(other)
        return TcElement(self.rd, self.depth, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return TcElement(self.rd, self.depth, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, c):
        return TcElement(self.rd, self.depth, [g.scale(c) for g in self.coeffs])

    def __eq__(self, other):
        return (isinstance(other, TcElement) and self.rd is other.rd
                and self.depth == other.depth and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.depth, self.coeffs))

    def _check(self, other):
        if self.rd is not other.rd:
            raise ValueError("elements over different root data")
        if self.depth != other.depth:
            raise ValueError(f"depth mismatch: {self.depth} != {other.depth}")

    def bracket(self, other):
        """Degree-l coefficient = sum of [X_i, Y_j] over i + j = l, truncated."""
        self._check(other)
        out = [GElement.zero(self.rd) for _ in range(self.depth)]
        for i, xi in enumerate(self.coeffs):
            if xi.is_zero():
                continue
            for j, yj in enumerate(other.coeffs):
                if i + j >= self.depth:
                    break
                if yj.is_zero():
                    continue
                out[i + j] = out[i + j] + xi.bracket(yj)
        return TcElement(self.rd, self.depth, out)

    def pairing_c(self, other, c):
        """(X e^i | Y e^j)_c = (X|Y) delta_{i+j,c-1}."""
        self._check(other)
        out = Zero
        for i, xi in enumerate(self.coeffs):
            j = c - 1 - i
            if 0 <= j < self.depth and not xi.is_zero():
                out += xi.pairing(other.coeffs[j])
        return out

    def transpose(self):
        return TcElement(self.rd, self.depth, [g.transpose() for g in self.coeffs])

    def cartan_theta(self):
        """theta = -transpose, the Cartan involution on g_r."""
        return self.transpose().scale(-1)

    def truncate(self, k):
        """tau_k: the depth-k prefix."""
        return TcElement(self.rd, k, list(self.coeffs[:k]))

    def shift_down(self, k):
        """tau'_k: e^{-k} (X - tau_k X), an element of depth r - k."""
        return TcElement(self.rd, self.depth - k, list(self.coeffs[k:]))

    def in_birkhoff(self):
        return self.coeffs[0].is_zero()

    def coords(self):
        out = []
        for g in self.coeffs:
            out.extend(g.coords())
        return out

    @classmethod
    def from_coords(cls, rd, depth, v):
        n = rd.dim_g
        return cls(rd, depth, [GElement.from_coords(rd, v[k * n:(k + 1) * n]) for k in range(depth)])

    @classmethod
    def basis(cls, rd, depth):
        for d in range(depth):
            for g in GElement.basis(rd):
                yield cls.pure(rd, depth, d, g)

    def to_json(self):
        return {
            "depth": self.depth,
            "coeffs": [{
                "cartan": [frac_str(x) for x in g.cartan],
                "roots": {str(i): frac_str(c) for i, c in sorted(g.root.items())},
            } for g in self.coeffs],
        }

    @classmethod
    def from_json(cls, rd, data):
        depth = data["depth"]
        coeffs = []
        for entry in data["coeffs"]:
            cartan = [frac(x) for x in entry.get("cartan", ["0"] * rd.dim_t)]
            root = {int(i): frac(c) for i, c in entry.get("roots", {}).items()}
            coeffs.append(GElement(rd, cartan, root))
        return cls(rd, depth, coeffs)

    def __repr__(self):
        parts = [f"({g})*e^{d}" for d, g in enumerate(self.coeffs) if not g.is_zero()]
        return " + ".join(parts) if parts else "0"


def exp_ad(y: TcElement, x: TcElement) -> TcElement:
    """exp(ad_y) x for y in the Birkhoff ideal (nilpotent, hence exact)."""
    if not y.in_birkhoff():
        raise ValueError("gauge generator must lie in eps * g_r")
    out = x
    term = x
    k = 1
    while True:
        term = y.bracket(term).scale(Fraction(1, k))
        if term.is_zero():
            return out
        out = out + term
        k += 1


def pairing_invariance_defect(z: TcElement, x: TcElement, y: TcElement, c: int):
    """( [z,x] | y )_c + ( x | [z,y] )_c: zero for all triples iff c = depth."""
    return z.bracket(x).pairing_c(y, c) + x.pairing_c(z.bracket(y), c)


def antipode_sign(length: int) -> int:
    """Sign of the Hopf antipode on a degree-`length` monomial."""
    return -1 if length % 2 else 1
