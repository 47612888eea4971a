"""Finite generalised singularity modules and wild Shapovalov forms.

The module M^psi_lambda is realized on its PBW basis: monomials in the
generators X_{a,i} = E_{-a} e^i (a in nu_0, i < d_a) applied to the cyclic
vector.  The action straightens words by pushing commutators to the right
until letters annihilate the cyclic vector or act through the character.

Shapovalov entries are computed through the module action as the coefficient
of the cyclic vector (the zero-weight space is a line); blocks, radicals, the
D*C*Qtilde factorisation of the dilated matrices, the truncated-quotient
criterion and the simplicity probe all live here.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import CPoly, One, Zero, coeff_is_zero, inverse, nullspace, rank
from .strat import indices
from . import parab
from .parab import (FormalType, ParabolicFiltration, require_admissible,
                    triangular_split)


class SingularityModule:
    """Highest-weight side module for a polarisation and a formal type.

    With dilated=True the character is c * lambda and all coefficients are
    Laurent polynomials in c (class CPoly); otherwise plain rationals.
    """

    def __init__(self, pf: ParabolicFiltration, ft: FormalType, dilated=False):
        require_admissible(pf, ft)
        self.pf = pf
        self.ft = ft
        self.rd = pf.rd
        self.depth = pf.depth
        self.dilated = dilated
        self.split = triangular_split(pf)
        self.gens = self.split.gens            # [(alpha_idx, eps)], module alphabet
        self.gen_pos = self.split.gen_pos
        self.levels = self.split.levels
        self.nu0 = self.split.nu0
        self._levi_masks = [self.split.levi.mask(i) for i in range(self.depth)]
        self._apply_cache = {}
        self._lmul_cache = {}

    # -- characters ----------------------------------------------------------

    def character(self, letter):
        """chi on a levi letter; zero on root letters, lambda on Cartan ones."""
        kind, idx, i = letter
        if kind != "H":
            return self._zero()
        v = self.ft[i][idx]
        if self.dilated:
            return CPoly({1: v}) if v != 0 else CPoly()
        return v

    def _zero(self):
        return CPoly() if self.dilated else Zero

    def _one(self):
        return CPoly.const(1) if self.dilated else One

    # -- letter classification -------------------------------------------------

    def classify(self, letter):
        kind, idx, i = letter
        if kind == "H":
            return "levi"
        rd = self.rd
        neg = rd.neg[idx]
        if (self.pf.nu(i) >> idx) & 1:
            return "pos"
        if (self.pf.nu(i) >> neg) & 1:
            return "neg"
        return "levi"

    def gen_letter(self, gen):
        a, i = gen
        return ("E", self.rd.neg[a], i)

    # -- module action -----------------------------------------------------------

    def apply_letter(self, letter, vec):
        """Action of a g_r basis letter on a module vector {mono: coeff}."""
        out = {}
        for word, c in vec.items():
            for w2, c2 in self._apply(letter, word).items():
                _acc(out, w2, c * c2)
        return out

    def apply_tc(self, x, vec):
        """Action of a TcElement."""
        out = {}
        for i, g in enumerate(x.coeffs):
            for t, cv in enumerate(g.cartan):
                if cv != 0:
                    for w, c in self.apply_letter(("H", t, i), vec).items():
                        _acc(out, w, cv * c)
            for ridx, cv in g.root.items():
                for w, c in self.apply_letter(("E", ridx, i), vec).items():
                    _acc(out, w, cv * c)
        return out

    def _apply(self, letter, word):
        key = (letter, word)
        hit = self._apply_cache.get(key)
        if hit is not None:
            return hit
        cls = self.classify(letter)
        if not word:
            if cls == "neg":
                kind, idx, i = letter
                g = (self.rd.neg[idx], i)
                result = {(self.gen_pos[g],): self._one()}
            elif cls == "levi":
                val = self.character(letter)
                result = {} if coeff_is_zero(val) else {(): val}
            else:
                result = {}
        else:
            g0, rest = word[0], word[1:]
            result = {}
            inner = self._apply(letter, rest)
            for w2, c2 in inner.items():
                for w3, c3 in self._lmul(g0, w2).items():
                    _acc(result, w3, c2 * c3)
            lt0 = self.gen_letter(self.gens[g0])
            for coeff, b2 in self._bracket(letter, lt0):
                for w2, c2 in self._apply(b2, rest).items():
                    _acc(result, w2, coeff * c2)
        self._apply_cache[key] = result
        return result

    def _lmul(self, g, word):
        """Left multiplication by a generator on a PBW word (both normal)."""
        if not word or g <= word[0]:
            return {(g,) + word: self._one()}
        key = (g, word)
        hit = self._lmul_cache.get(key)
        if hit is not None:
            return hit
        y, rest = word[0], word[1:]
        result = {}
        for w2, c2 in self._lmul(g, rest).items():
            _acc(result, (y,) + w2, c2)
        for coeff, b2 in self._bracket(self.gen_letter(self.gens[g]),
                                       self.gen_letter(self.gens[y])):
            for w2, c2 in self._apply(b2, rest).items():
                _acc(result, w2, coeff * c2)
        self._lmul_cache[key] = result
        return result

    def _bracket(self, a, b):
        """[a, b] on letters, coefficients in the module's coefficient ring."""
        rd = self.rd
        out = []
        ka, ia = a[0], a[2]
        kb, ib = b[0], b[2]
        deg = ia + ib
        if deg >= self.depth:
            return out
        if ka == "H" and kb == "E":
            c = rd.roots[b[1]][a[1]]
            if c != 0:
                out.append((c, ("E", b[1], deg)))
        elif ka == "E" and kb == "H":
            c = rd.roots[a[1]][b[1]]
            if c != 0:
                out.append((-c, ("E", a[1], deg)))
        elif ka == "E" and kb == "E":
            i, j = a[1], b[1]
            if j == rd.neg[i]:
                for t, c in enumerate(rd.coroots[i]):
                    if c != 0:
                        out.append((c, ("H", t, deg)))
            else:
                n = rd.nsc.get((i, j))
                if n is not None:
                    out.append((n, ("E", rd.root_sum[(i, j)], deg)))
        return out

    # -- monomials and weights ----------------------------------------------------

    def word_of(self, mono):
        """Exponent tuple -> nondecreasing generator word."""
        out = []
        for g, e in enumerate(mono):
            out.extend([g] * e)
        return tuple(out)

    def mono_of(self, word):
        exps = [0] * len(self.gens)
        for g in word:
            exps[g] += 1
        return tuple(exps)

    def weight_of_word(self, word):
        rd = self.rd
        tot = [Zero] * rd.dim_t
        for g in word:
            a, _ = self.gens[g]
            tot = [x + y for x, y in zip(tot, rd.roots[a])]
        return tuple(tot)

    def weights_up_to(self, K):
        """All monoid elements of relative height <= K, sorted deterministically."""
        rd = self.rd
        seen = {tuple([Zero] * rd.dim_t): 0}
        frontier = [tuple([Zero] * rd.dim_t)]
        for _ in range(K):
            nxt = []
            for mu in frontier:
                for a in self.nu0:
                    cand = tuple(x + y for x, y in zip(mu, rd.roots[a]))
                    if cand not in seen:
                        seen[cand] = 1
                        nxt.append(cand)
            frontier = nxt
        out = []
        for mu in seen:
            h = parab.relative_height(rd, self.nu0, mu, self.split.xi)
            if h <= K and any(x != 0 for x in mu):
                out.append((h, mu))
        out.sort()
        return [mu for _, mu in out]

    def weight_basis(self, mu):
        """Ordered PBW basis of M[mu]: nonincreasing length, then lexicographic."""
        rd = self.rd
        decs = parab.decompositions(rd, self.nu0, mu, self.split.xi)
        monos = set()
        for f in decs:
            monos |= self._spread_exponents(f)
        # nonincreasing length; ties by generator word (root index, then eps)
        return sorted(monos, key=lambda m: (-sum(m), self.word_of(m)))

    def _spread_exponents(self, f):
        """All ways to give epsilon degrees to a root multiset."""
        out = {()}
        results = [[]]
        for mult, a in zip(f, self.nu0):
            d = self.levels[a]
            choices = _multisets(mult, d)
            new = []
            for base in results:
                for ch in choices:
                    new.append(base + [(a, ch)])
            results = new
        finals = set()
        for combo in results:
            exps = [0] * len(self.gens)
            for a, ch in combo:
                for i in ch:
                    exps[self.gen_pos[(a, i)]] += 1
            finals.add(tuple(exps))
        return finals

    def weight_space_dim(self, mu):
        return len(self.weight_basis(mu))

    # -- Shapovalov forms -----------------------------------------------------------

    def transpose_letter(self, gen_index):
        a, i = self.gens[gen_index]
        return ("E", a, i)

    def shapovalov_entry(self, mono_y, mono_x):
        """S(Y w, X w) = coefficient of w in (tY) . (X w), transpose variant."""
        vec = {self.word_of(mono_x): self._one()}
        for g in self.word_of(mono_y):
            vec = self.apply_letter(self.transpose_letter(g), vec)
            if not vec:
                return self._zero()
        return vec.get((), self._zero())

    def shapovalov_block(self, mu):
        basis = self.weight_basis(mu)
        mat = [[self.shapovalov_entry(y, x) for x in basis] for y in basis]
        return ShapovalovBlock(mu, basis, mat, self)

    def radical_dim(self, mu):
        blk = self.shapovalov_block(mu)
        return len(blk.radical())

    def radical_profile(self, K):
        return {mu: self.radical_dim(mu) for mu in self.weights_up_to(K)}

    def is_simple_up_to(self, K):
        return all(d == 0 for d in self.radical_profile(K).values())

    # -- nonsymmetric (antipode) variant ----------------------------------------------

    def nonsymmetric_entry(self, plus_word, mono_x):
        """S^iota(Y w^-, X w^+) for Y given as a word of u^+ letters.

        iota(Y_1...Y_k) = (-1)^k Y_k...Y_1 applied to X w^+ (rightmost first).
        """
        vec = {self.word_of(mono_x): self._one()}
        for letter in plus_word:
            vec = self.apply_letter(letter, vec)
            if not vec:
                return self._zero()
        sign = -1 if len(plus_word) % 2 else 1
        val = vec.get((), self._zero())
        return val if sign == 1 else -val

    def dual_letters(self, ft=None):
        """Expansion of the dual-basis vectors Y_{a,i} into u^+ letters."""
        duals, _ = parab.dual_basis(self.pf, ft or self.ft)
        out = {}
        for (a, i), combo in duals.items():
            out[(a, i)] = [(c, ("E", aa, j)) for c, (aa, j) in combo]
        return out

    def dual_block(self, mu, duals=None):
        """Matrix S_c(Y_{f,i} w^-, X_{g,j} w^+) over the mutually dual bases."""
        if duals is None:
            duals = self.dual_letters()
        basis = self.weight_basis(mu)
        mat = []
        for y in basis:
            row = []
            y_gens = self.word_of(y)
            for x in basis:
                row.append(self._dual_entry(y_gens, x, duals))
            mat.append(row)
        return ShapovalovBlock(mu, basis, mat, self, dual=True)

    def _dual_entry(self, y_gens, mono_x, duals):
        vecs = {self.word_of(mono_x): self._one()}
        for g in y_gens:
            a, i = self.gens[g]
            new = {}
            for coeff, letter in duals[(a, i)]:
                for w, c in self.apply_letter(letter, vecs).items():
                    _acc(new, w, coeff * c)
            vecs = new
            if not vecs:
                return self._zero()
        sign = -1 if len(y_gens) % 2 else 1
        val = vecs.get((), self._zero())
        return val if sign == 1 else -val


def _multisets(k, d):
    """Nondecreasing sequences of length k with entries in {0..d-1}."""
    if k == 0:
        return [()]
    out = []

    def rec(start, acc):
        if len(acc) == k:
            out.append(tuple(acc))
            return
        for v in range(start, d):
            rec(v, acc + [v])

    rec(0, [])
    return out


def _acc(d, k, v):
    nv = d.get(k, 0) + v
    if coeff_is_zero(nv):
        d.pop(k, None)
    else:
        d[k] = nv


class ShapovalovBlock:
    """Per-weight Shapovalov matrix with its factorisation interface."""

    def __init__(self, mu, basis, matrix, module, dual=False):
        self.mu = mu
        self.basis = basis
        self.matrix = matrix
        self.module = module
        self.dual = dual

    def lengths(self):
        return [sum(m) for m in self.basis]

    def dim(self):
        return len(self.basis)

    def _require_scalar(self):
        if self.module.dilated:
            raise ValueError("rank/radical need scalar entries: specialize c first")

    def rank(self):
        if not self.basis:
            return 0
        self._require_scalar()
        return rank(self.matrix)

    def radical(self):
        if not self.basis:
            return []
        self._require_scalar()
        return nullspace(self.matrix, cols=len(self.basis))

    def determinant(self):
        from .linalg import det
        self._require_scalar()
        return det(self.matrix)


class FactorisationError(RuntimeError):
    """The degree bounds of the factorisation claim failed on actual data."""


def factorize_block(block: ShapovalovBlock):
    """A[mu] = D C Qtilde: D diagonal d_i c^{l_i}, C unipotent lower triangular
    constant, Qtilde - Id with only negative powers of c.  Exact."""
    if not block.dual or not block.module.dilated:
        raise ValueError("factorisation applies to dilated dual-basis blocks")
    lengths = block.lengths()
    n = block.dim()
    a = block.matrix
    for i in range(n):
        for j in range(n):
            entry = a[i][j]
            dmax = entry.degree()
            if dmax is not None and dmax > min(lengths[i], lengths[j]):
                raise FactorisationError(
                    f"degree bound violated at ({i},{j}): deg {dmax} > min length")
            if lengths[i] == lengths[j] and i != j:
                if dmax is not None and dmax >= lengths[i]:
                    raise FactorisationError("no strict degree drop off the diagonal")
    d = []
    for i in range(n):
        lead = a[i][i].coeff(lengths[i])
        if lead == 0 or lead.denominator != 1 or lead <= 0:
            raise FactorisationError(f"diagonal leading coefficient {lead} not a positive integer")
        d.append(lead)
    dmat = [[CPoly({lengths[i]: d[i]}) if i == j else CPoly() for j in range(n)] for i in range(n)]
    cmat = [[Zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            dij = a[i][j].coeff(lengths[i])
            if i < j and dij != 0:
                raise FactorisationError("upper-triangular leading coefficient is nonzero")
            cmat[i][j] = dij / d[i]
    # Qtilde = C^{-1} D^{-1} A over Laurent polynomials
    cinv = inverse(cmat)
    qt = [[CPoly() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = CPoly()
            for k in range(n):
                if cinv[i][k] != 0:
                    acc = acc + a[k][j].shift(-lengths[k]) * Fraction(cinv[i][k], d[k])
            qt[i][j] = acc
    for i in range(n):
        for j in range(n):
            entry = qt[i][j] - (CPoly.const(1) if i == j else CPoly())
            deg = entry.degree()
            if deg is not None and deg >= 0:
                raise FactorisationError("Qtilde - Id has a nonnegative power of c")
    return dmat, cmat, qt


def reassemble(dmat, cmat, qt):
    """D*C*Qtilde, for the exactness check."""
    n = len(dmat)
    dc = [[dmat[i][i] * cmat[i][j] for j in range(n)] for i in range(n)]
    out = [[CPoly() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = CPoly()
            for k in range(n):
                acc = acc + dc[i][k] * qt[k][j]
            out[i][j] = acc
    return out


# -- module-level predicates ------------------------------------------------------


def truncated_quotient_proper(pf, ft, k):
    """I^{(k)} M proper iff lambda_k..lambda_{r-1} vanish on t cap [g, g]."""
    if not 1 <= k <= pf.depth - 1:
        raise ValueError("k must lie in 1..r-1")
    require_admissible(pf, ft)
    rd = pf.rd
    for i in range(k, pf.depth):
        for a in range(rd.num_roots):
            if ft.pair_coroot(rd, i, a) != 0:
                return False
    return True


def truncated_quotient_saturation(pf, ft, k, K):
    """Directly test whether the cyclic vector lies in I^{(k)} M, exploring
    module vectors of weight height <= K.  Positive answers are exact."""
    mod = SingularityModule(pf, ft)
    rd = pf.rd
    gens = []
    for i in range(k, pf.depth):
        for a in indices(pf.nu(i)):
            vec = mod.apply_letter(("E", rd.neg[a], i), {(): One})
            if vec:
                gens.append(vec)

    def height_ok(word):
        return len(word) <= K

    span = []  # list of dicts, kept in echelon form via word ordering
    def reduce(vec):
        vec = {w: c for w, c in vec.items() if height_ok(w)}
        for basis_vec, lead in span:
            c = vec.get(lead)
            if c:
                f = c / basis_vec[lead]
                for w, cv in basis_vec.items():
                    _acc(vec, w, -f * cv)
        return vec

    def insert(vec):
        vec = reduce(vec)
        if not vec:
            return False
        lead = sorted(vec)[0]
        span.append((vec, lead))
        return True

    frontier = []
    for g in gens:
        if insert(dict(g)):
            frontier.append(dict(g))
    letters = ([("H", t, i) for t in range(rd.dim_t) for i in range(pf.depth)]
               + [("E", b, i) for b in range(rd.num_roots) for i in range(pf.depth)])
    while frontier:
        new_frontier = []
        for vec in frontier:
            for letter in letters:
                img = mod.apply_letter(letter, vec)
                img = {w: c for w, c in img.items() if height_ok(w)}
                if img and insert(img):
                    new_frontier.append(img)
        frontier = new_frontier
    # does the span contain the cyclic vector?
    probe = reduce({(): One})
    return not probe  # empty residue means w IS in the generated submodule


def conjecture_probe(pf, ft, K):
    """Evidence report for the simplicity conjecture; never asserts it."""
    require_admissible(pf, ft)
    rd = pf.rd
    cond1 = parab.is_nonsingular(pf, ft)
    lf = pf.levi_filtration()
    cond2 = True
    for a in indices(lf.mask(1) & ~lf.mask(0)):
        v = ft.pair_coroot(rd, 0, a)
        if v.denominator == 1 and v > 0:
            cond2 = False
    mod = SingularityModule(pf, ft)
    observed = mod.is_simple_up_to(K)
    predicted = cond1 and cond2
    if predicted == observed:
        verdict = f"consistent up to K={K}"
    elif predicted and not observed:
        verdict = f"counterexample candidate: conditions hold but radical found at K<={K}"
    else:
        verdict = f"undetermined: conditions fail, no radical up to K={K}"
    return {
        "cond1_nonsingular": cond1,
        "cond2_alcove": cond2,
        "observed_simple_up_to_K": observed,
        "verdict": verdict,
    }
