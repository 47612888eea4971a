"""Normal ordering in U(g_r) relative to a triangular splitting.

Letters are basis elements of g_r (Cartan or root vectors at a fixed epsilon
degree).  A UEAContext fixes a total order on the letters - determined by the
polarisation and a block layout such as (neg, levi, pos) or (neg, pos, levi) -
and rewrites arbitrary words into the corresponding PBW normal form with
exact rational coefficients.  Used by the quantisation (V0 reduction) and as
the independent straightening oracle for the module action.
"""

from __future__ import annotations

from fractions import Fraction

from .strat import indices
from .parab import ParabolicFiltration, triangular_split


class UEAContext:
    """Letters: ('H', t, i) and ('E', root_idx, i); order fixed by `layout`.

    layout: tuple of block names from {"neg", "pos", "levi"} listed in
    increasing order.  neg/pos letters are ordered inside their block by the
    triangular-split generator order; levi letters by (eps, kind, index).
    """

    def __init__(self, pf: ParabolicFiltration, layout=("neg", "pos", "levi")):
        self.pf = pf
        self.rd = rd = pf.rd
        self.depth = pf.depth
        self.layout = layout
        ts = triangular_split(pf)
        self.split = ts
        lf = ts.levi
        letters = []
        self.block = {}
        # classify every letter of g_r
        for i in range(self.depth):
            for t in range(rd.dim_t):
                self.block[("H", t, i)] = "levi"
            lm = lf.mask(i)
            nu = pf.nu(i)
            for b in range(rd.num_roots):
                if (nu >> b) & 1:
                    self.block[("E", b, i)] = "pos"
                elif (nu >> rd.neg[b]) & 1:
                    self.block[("E", b, i)] = "neg"
                elif (lm >> b) & 1:
                    self.block[("E", b, i)] = "levi"
                else:
                    raise AssertionError("letter escapes the triangular classification")
        order = {}
        pos_rank = {g: k for k, g in enumerate(ts.gens)}
        counter = 0
        for name in layout:
            if name == "neg":
                for a, i in ts.gens:
                    order[("E", rd.neg[a], i)] = counter
                    counter += 1
            elif name == "pos":
                for a, i in ts.gens:
                    order[("E", a, i)] = counter
                    counter += 1
            else:
                for i in range(self.depth):
                    for t in range(rd.dim_t):
                        order[("H", t, i)] = counter
                        counter += 1
                    for b in sorted(indices(lf.mask(i))):
                        order[("E", b, i)] = counter
                        counter += 1
        self.order = order
        self._nf_cache = {}
        self._bracket_cache = {}

    # -- Lie brackets of letters -------------------------------------------

    def bracket(self, a, b):
        """[a, b] as a list of (coeff, letter)."""
        key = (a, b)
        hit = self._bracket_cache.get(key)
        if hit is not None:
            return hit
        rd = self.rd
        out = []
        ka, ia = a[0], a[2]
        kb, ib = b[0], b[2]
        deg = ia + ib
        if deg < self.depth:
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
        self._bracket_cache[key] = out
        return out

    # -- normal ordering ------------------------------------------------------

    def normal_form(self, word):
        """PBW normal form of a word (tuple of letters) as {word: coeff}."""
        word = tuple(word)
        hit = self._nf_cache.get(word)
        if hit is not None:
            return hit
        order = self.order
        k = next((t for t in range(len(word) - 1)
                  if order[word[t]] > order[word[t + 1]]), None)
        if k is None:
            result = {word: Fraction(1)}
        else:
            a, b = word[k], word[k + 1]
            result = {}
            swapped = word[:k] + (b, a) + word[k + 2:]
            for w, c in self.normal_form(swapped).items():
                _acc(result, w, c)
            for coeff, letter in self.bracket(a, b):
                for w, c in self.normal_form(word[:k] + (letter,) + word[k + 2:]).items():
                    _acc(result, w, coeff * c)
        self._nf_cache[word] = result
        return result

    def normal_form_of(self, element):
        """Normal form of {word: coeff}."""
        out = {}
        for word, c in element.items():
            for w, c2 in self.normal_form(word).items():
                _acc(out, w, c * c2)
        return out

    def multiply(self, x, y):
        """Product of two normal-form elements, re-normalized."""
        out = {}
        for wx, cx in x.items():
            for wy, cy in y.items():
                for w, c in self.normal_form(wx + wy).items():
                    _acc(out, w, cx * cy * c)
        return out

    def split_word(self, word):
        """Split a normal word into its (neg, pos, levi) blocks."""
        blocks = {"neg": [], "pos": [], "levi": []}
        for letter in word:
            blocks[self.block[letter]].append(letter)
        return tuple(blocks["neg"]), tuple(blocks["pos"]), tuple(blocks["levi"])


def _acc(d, k, v):
    nv = d.get(k, 0) + v
    if nv == 0:
        d.pop(k, None)
    else:
        d[k] = nv


def shuffle_coproduct(word):
    """Delta(x_1...x_n) = sum over subsets I of x_I (x) x_J (primitives)."""
    n = len(word)
    out = []
    for bits in range(1 << n):
        left = tuple(word[t] for t in range(n) if (bits >> t) & 1)
        right = tuple(word[t] for t in range(n) if not (bits >> t) & 1)
        out.append((left, right))
    return out


def antipode(element):
    """iota on a normal-form element: reverse each word with sign (-1)^len."""
    out = {}
    for word, c in element.items():
        sign = -1 if len(word) % 2 else 1
        _acc(out, tuple(reversed(word)), sign * c)
    return out
