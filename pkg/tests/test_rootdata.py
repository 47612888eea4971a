import json
from fractions import Fraction

import pytest

from wildstrat.linalg import mat_mul
from wildstrat.rootdata import RootDatumError, parse_type, root_datum
from conftest import gl_root_index


def _commutator(a, b):
    ab = mat_mul(a, b)
    ba = mat_mul(b, a)
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(ab, ba)]


def test_root_counts(sl2, gl2, sl3, gl3, b2):
    assert sl2.num_roots == 2 and gl2.num_roots == 2
    assert sl3.num_roots == 6 and gl3.num_roots == 6
    assert b2.num_roots == 8
    assert gl3.center_dim == 1 and sl3.center_dim == 0


def test_coroot_normalization(gl3, b2):
    for rd in (gl3, b2):
        for i in range(rd.num_roots):
            assert rd.pair(i, rd.coroots[i]) == 2
            for j in range(rd.num_roots):
                assert rd.cartan_integer(i, j).denominator == 1


def test_negation_involution(b2):
    for i in range(b2.num_roots):
        assert b2.neg[b2.neg[i]] == i
        assert b2.roots[b2.neg[i]] == tuple(-x for x in b2.roots[i])


def test_gl3_bracket_matches_matrix_commutator(gl3):
    # [E_12, E_23] = E_13 in the defining representation
    i12 = gl_root_index(gl3, 0, 1)
    i23 = gl_root_index(gl3, 1, 2)
    i13 = gl_root_index(gl3, 0, 2)
    assert gl3.root_sum[(i12, i23)] == i13
    assert gl3.nsc[(i12, i23)] == 1
    m = _commutator(gl3.defining_matrix(gl3.dim_t + i12), gl3.defining_matrix(gl3.dim_t + i23))
    assert m == gl3.defining_matrix(gl3.dim_t + i13)


def test_structure_constants_vs_defining_rep(gl3, b2):
    """Every table entry reproduces the honest matrix commutator."""
    for rd in (gl3, b2):
        for (i, j), n in rd.nsc.items():
            k = rd.root_sum[(i, j)]
            lhs = _commutator(rd.defining_matrix(rd.dim_t + i), rd.defining_matrix(rd.dim_t + j))
            rhs = [[n * x for x in row] for row in rd.defining_matrix(rd.dim_t + k)]
            assert lhs == rhs


def test_chevalley_root_strings(b2):
    """|N(a,b)| = p + 1 where p is the length of the descending root string."""
    for (i, j), n in b2.nsc.items():
        p = 0
        cur = b2.roots[j]
        while True:
            cur = tuple(a - x for a, x in zip(cur, b2.roots[i]))
            if cur in b2.root_index:
                p += 1
            else:
                break
        assert abs(n) == p + 1
    assert any(abs(n) == 2 for n in b2.nsc.values())


def test_transpose_sign_rule(gl3, b2):
    for rd in (gl3, b2):
        for (i, j), n in rd.nsc.items():
            assert rd.nsc[(rd.neg[i], rd.neg[j])] == -n


def test_weyl_group_orders(sl2, gl3, b2, sl4):
    assert len(sl2.weyl) == 2
    assert len(gl3.weyl) == 6
    assert len(b2.weyl) == 8
    assert len(sl4.weyl) == 24


def test_weyl_perm_matches_matrix_action(gl3, b2):
    for rd in (gl3, b2):
        for w in rd.weyl:
            for i in range(rd.num_roots):
                # pairing is preserved: <w(a) | w(H)> = <a | H>
                img = w.perm[i]
                h = rd.coroots[i]
                wh = w.apply_cartan(h)
                for j in range(rd.num_roots):
                    assert rd.pair(w.perm[j], wh) == rd.pair(j, h)
                assert tuple(wh) == rd.coroots[img]


def test_simple_roots_form_base(gl3):
    assert len(gl3.simple) == 2
    cm = gl3.cartan_matrix
    assert cm[0][0] == 2 and cm[1][1] == 2
    assert cm[0][1] in (-1,) and cm[1][0] in (-1,)


def test_serialization_shape(gl3):
    data = gl3.to_json()
    assert data["type"] == "gl" and data["rank"] == 3
    assert len(data["roots"]) == 6
    assert json.dumps(data, sort_keys=True)  # serializable
    parsed = {tuple(int(x) for x in k.split(",")): v
              for k, v in data["structure_constants"].items()}
    assert parsed  # nonempty table


def test_parse_type():
    assert parse_type("gl3").label == "gl3"
    assert parse_type("A2").num_roots == 6
    with pytest.raises(RootDatumError):
        parse_type("E8x")
    with pytest.raises(RootDatumError):
        root_datum("Z", 2)
