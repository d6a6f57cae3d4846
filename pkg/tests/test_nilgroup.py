"""Group arithmetic tests: collection against matrix models, consistency,
quotients, series data, subgroups, and serialization."""

import random

import pytest

from engelkit import nilgroup as ng


# -- small unitriangular integer matrix helpers (independent oracle) -----------


def mmul(a, b):
    n = len(a)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(n))
                       for j in range(n)) for i in range(n))


def mid(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def minv(a):
    n = len(a)
    I = mid(n)
    N = tuple(tuple(a[i][j] - I[i][j] for j in range(n)) for i in range(n))
    out, term, sign = I, N, -1
    for _ in range(n - 1):
        out = tuple(tuple(out[i][j] + sign * term[i][j] for j in range(n))
                    for i in range(n))
        term = mmul(term, N)
        sign = -sign
    return out


def mcomm(a, b):
    return mmul(mmul(minv(a), minv(b)), mmul(a, b))


def mpow(a, e):
    if e < 0:
        return mpow(minv(a), -e)
    out = mid(len(a))
    for _ in range(e):
        out = mmul(out, a)
    return out


def ut(n, entries):
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for (i, j), v in entries.items():
        m[i][j] = v
    return tuple(tuple(r) for r in m)


def random_word(rng, rank, length):
    return [rng.choice([1, -1]) * rng.randrange(1, rank + 1)
            for _ in range(length)]


# -- construction basics --------------------------------------------------------


def test_envelope_refusal():
    for rank, cap in [(5, 3), (3, 7), (0, 2), (2, 0), (5, 7)]:
        with pytest.raises(ValueError):
            ng.free_nilpotent(rank, cap)


def test_generator_counts():
    assert ng.free_nilpotent(2, 2).ngens == 3
    assert ng.free_nilpotent(2, 3).ngens == 5
    assert ng.free_nilpotent(1, 5).ngens == 1
    assert ng.free_nilpotent(3, 3).ngens == 14
    assert ng.free_nilpotent(3, 6).ngens == 196


def test_definitions_and_weights():
    P = ng.free_nilpotent(2, 3)
    assert P.weights == [1, 1, 2, 3, 3]
    assert P.definition(0) is None and P.definition(1) is None
    assert P.definition(2) == (1, 0)          # g3 = [g2, g1]
    assert P.definition(3) == (2, 0)          # g4 = [g3, g1]
    assert P.definition(4) == (2, 1)          # g5 = [g3, g2]


def test_presentations_cached():
    assert ng.free_nilpotent(2, 3) is ng.free_nilpotent(2, 3)


# -- collection against matrix models ----------------------------------------------


def test_heisenberg_collect_example():
    P = ng.free_nilpotent(2, 2)
    w = ng.normal_form(P, [2, 1])
    assert w.exps == ((0, 1), (1, 1), (2, 1))
    g1, g2, g3 = P.generators()
    assert ng.commutator(g2, g1) == g3
    assert ng.commutator(g1, g2) == ng.inverse(g3)
    assert ng.normal_form(P, []) == P.identity()


def test_heisenberg_matrix_oracle():
    P = ng.free_nilpotent(2, 2)
    M = {1: ut(3, {(0, 1): 1}), 2: ut(3, {(1, 2): 1})}
    imgs = [M[1], M[2], mcomm(M[2], M[1])]
    rng = random.Random(20240817)
    for _ in range(300):
        word = random_word(rng, 2, rng.randrange(0, 12))
        direct = mid(3)
        for letter in word:
            direct = mmul(direct, M[abs(letter)] if letter > 0
                          else minv(M[abs(letter)]))
        nf = ng.normal_form(P, word)
        collected = mid(3)
        for i, e in nf.exps:
            collected = mmul(collected, mpow(imgs[i], e))
        assert direct == collected


def _free23_model():
    # Pair of unitriangular 4x4 integer matrices per generator; a single
    # UT4 cannot contain a free class-3 rank-2 group (its gamma_3 has rank
    # 1, we need 2), so use two factors with different projections.
    A = (ut(4, {(0, 1): 1}), ut(4, {(0, 1): 1, (1, 2): 1}))
    B = (ut(4, {(1, 2): 1, (2, 3): 1}), ut(4, {(2, 3): 1}))
    return A, B


def pairmul(x, y):
    return (mmul(x[0], y[0]), mmul(x[1], y[1]))


def paircomm(x, y):
    return (mcomm(x[0], y[0]), mcomm(x[1], y[1]))


def pairinv(x):
    return (minv(x[0]), minv(x[1]))


def pairpow(x, e):
    return (mpow(x[0], e), mpow(x[1], e))


def test_free23_model_is_faithful():
    # Layer-by-layer injectivity of the frozen matrix model: independent
    # abelianized images, nonzero layer-2 image, invertible layer-3 block.
    A, B = _free23_model()
    ab = lambda x: (x[0][0][1], x[0][1][2], x[0][2][3],
                    x[1][0][1], x[1][1][2], x[1][2][3])
    va, vb = ab(A), ab(B)
    assert any(va[i] * vb[j] - va[j] * vb[i]
               for i in range(6) for j in range(i + 1, 6))
    C = paircomm(B, A)
    assert any((C[0][0][2], C[0][1][3], C[1][0][2], C[1][1][3]))
    D4, D5 = paircomm(C, A), paircomm(C, B)
    det = D4[0][0][3] * D5[1][0][3] - D4[1][0][3] * D5[0][0][3]
    assert det != 0


def test_free23_matrix_oracle():
    P = ng.free_nilpotent(2, 3)
    A, B = _free23_model()
    C = paircomm(B, A)
    imgs = [A, B, C, paircomm(C, A), paircomm(C, B)]
    rng = random.Random(996)
    pid = (mid(4), mid(4))
    for _ in range(500):
        word = random_word(rng, 2, rng.randrange(0, 14))
        direct = pid
        for letter in word:
            g = imgs[abs(letter) - 1]
            direct = pairmul(direct, g if letter > 0 else pairinv(g))
        nf = ng.normal_form(P, word)
        collected = pid
        for i, e in nf.exps:
            collected = pairmul(collected, pairpow(imgs[i], e))
        assert direct == collected
    # injectivity sampling: nonzero exponent vectors map off the identity
    for _ in range(100):
        exps = {i: rng.randrange(-4, 5) for i in range(5)}
        if not any(exps.values()):
            exps[rng.randrange(5)] = 1
        m = pid
        for i in range(5):
            if exps[i]:
                m = pairmul(m, pairpow(imgs[i], exps[i]))
        assert m != pid


# -- consistency and identities ------------------------------------------------------


@pytest.mark.parametrize("rank,cap", [(2, 3), (2, 4), (3, 3)])
def test_exhaustive_triple_consistency(rank, cap):
    P = ng.free_nilpotent(rank, cap)
    m = P.ngens
    for k in range(m):
        gk = {k: 1}
        for j in range(m):
            kj = P._mul(gk, {j: 1})
            gj = {j: 1}
            for i in range(m):
                assert P._mul(kj, {i: 1}) == P._mul(gk, P._mul(gj, {i: 1}))


def test_group_axioms_random():
    rng = random.Random(5)
    for rank, cap in [(2, 4), (3, 3)]:
        P = ng.free_nilpotent(rank, cap)
        for _ in range(40):
            u = ng.normal_form(P, random_word(rng, rank, rng.randrange(0, 8)))
            v = ng.normal_form(P, random_word(rng, rank, rng.randrange(0, 8)))
            w = ng.normal_form(P, random_word(rng, rank, rng.randrange(0, 8)))
            assert ng.multiply(ng.multiply(u, v), w) == \
                ng.multiply(u, ng.multiply(v, w))
            assert ng.inverse(ng.multiply(u, v)) == \
                ng.multiply(ng.inverse(v), ng.inverse(u))
            assert ng.multiply(u, ng.inverse(u)).is_identity
            assert ng.power(u, 3) == ng.multiply(ng.multiply(u, u), u)
            assert ng.power(u, -2) == ng.inverse(ng.power(u, 2))
            assert ng.commutator(u, u).is_identity
            assert ng.conjugate(u, v) == \
                ng.multiply(u, ng.commutator(u, v))


def test_hall_witt_identity():
    # [[u, v^-1], w]^v * [[v, w^-1], u]^w * [[w, u^-1], v]^u = 1
    P = ng.free_nilpotent(3, 5)
    rng = random.Random(41)
    for _ in range(12):
        u = ng.normal_form(P, random_word(rng, 3, rng.randrange(1, 7)))
        v = ng.normal_form(P, random_word(rng, 3, rng.randrange(1, 7)))
        w = ng.normal_form(P, random_word(rng, 3, rng.randrange(1, 7)))
        t1 = ng.conjugate(ng.commutator(ng.commutator(u, ng.inverse(v)), w), v)
        t2 = ng.conjugate(ng.commutator(ng.commutator(v, ng.inverse(w)), u), w)
        t3 = ng.conjugate(ng.commutator(ng.commutator(w, ng.inverse(u)), v), u)
        assert ng.multiply(ng.multiply(t1, t2), t3).is_identity


def test_left_normed_commutator():
    P = ng.free_nilpotent(2, 4)
    a, b = P.generator(1), P.generator(2)
    assert ng.left_normed_commutator([a]) == a
    assert ng.left_normed_commutator([b, a, a]) == \
        ng.commutator(ng.commutator(b, a), a)
    with pytest.raises(ValueError):
        ng.left_normed_commutator([])


def test_big_exponent_conjugation():
    P = ng.free_nilpotent(2, 4)
    g1, g2 = P.generator(1), P.generator(2)
    for e in (5, -3, 12):
        by_power = ng.conjugate(g2, ng.power(g1, e))
        step = g2
        for _ in range(abs(e)):
            step = ng.conjugate(step, g1 if e > 0 else ng.inverse(g1))
        assert by_power == step


def test_word_validation():
    P = ng.free_nilpotent(2, 2)
    with pytest.raises(ValueError):
        ng.normal_form(P, [0])
    with pytest.raises(ValueError):
        ng.normal_form(P, [4])
    with pytest.raises(ValueError):
        ng.normal_form(P, ["a"])


def test_mixed_presentation_rejected():
    u = ng.free_nilpotent(2, 2).generator(1)
    v = ng.free_nilpotent(2, 3).generator(1)
    with pytest.raises(ValueError):
        ng.multiply(u, v)


# -- quotients ------------------------------------------------------------------------


def test_quotient_heisenberg_center():
    P = ng.free_nilpotent(2, 2)
    g1, g2, g3 = P.generators()
    for rel in ([g3], [ng.commutator(g2, g1)]):
        Q = ng.quotient(P, rel)
        layers = ng.lower_central_series(Q)
        assert (layers[0].free_rank, layers[0].torsion) == (2, ())
        assert layers[1].trivial
        c = ng.nilpotency_class(Q)
        assert c == 1 and not c.at_cap
        # the quotient is abelian
        assert ng.commutator(Q.generator(1), Q.generator(2)).is_identity


def test_quotient_heisenberg_square():
    P = ng.free_nilpotent(2, 2)
    g1 = P.generator(1)
    Q = ng.quotient(P, [ng.power(g1, 2)])
    layers = ng.lower_central_series(Q)
    assert (layers[0].free_rank, layers[0].torsion) == (1, (2,))
    assert (layers[1].free_rank, layers[1].torsion) == (0, (2,))
    c = ng.nilpotency_class(Q)
    assert int(c) == 2 and c.at_cap
    # derived layer of order 2: [g1, g2] has order 2 in the quotient
    h = ng.commutator(Q.generator(1), Q.generator(2))
    assert not h.is_identity
    assert ng.power(h, 2).is_identity


def test_quotient_is_homomorphism():
    P = ng.free_nilpotent(2, 3)
    g1, g2 = P.generator(1), P.generator(2)
    rels = [ng.power(g1, 3), ng.commutator(ng.commutator(g2, g1), g2)]
    Q = ng.quotient(P, rels)
    for r in rels:
        assert Q.image(r).is_identity
    rng = random.Random(77)
    for _ in range(40):
        wa = random_word(rng, 2, rng.randrange(0, 8))
        wb = random_word(rng, 2, rng.randrange(0, 8))
        assert ng.multiply(ng.normal_form(Q, wa), ng.normal_form(Q, wb)) == \
            ng.normal_form(Q, wa + wb)
        # images of random products factor through the quotient map
        assert Q.image(ng.normal_form(P, wa)) == ng.normal_form(Q, wa)


def test_quotient_accumulates():
    P = ng.free_nilpotent(2, 3)
    g1, g2 = P.generator(1), P.generator(2)
    Q1 = ng.quotient(P, [ng.power(g1, 2)])
    Q2 = ng.quotient(Q1, [ng.power(g2, 3)])
    Qboth = ng.quotient(P, [ng.power(g1, 2), ng.power(g2, 3)])
    assert Q2 == Qboth


def test_lcs_free_groups():
    P = ng.free_nilpotent(2, 4)
    layers = ng.lower_central_series(P)
    assert [L.free_rank for L in layers] == [2, 1, 2, 3]
    assert all(not L.torsion for L in layers)
    for rank, cap in [(2, 2), (2, 3), (2, 4), (3, 3)]:
        c = ng.nilpotency_class(ng.free_nilpotent(rank, cap))
        assert int(c) == cap and c.at_cap
    c1 = ng.nilpotency_class(ng.free_nilpotent(1, 5))
    assert c1 == 1 and not c1.at_cap


def test_class_bound_reporting():
    c = ng.nilpotency_class(ng.free_nilpotent(2, 3))
    assert str(c) == ">= 3"
    assert int(c) == 3
    P = ng.free_nilpotent(2, 2)
    Q = ng.quotient(P, [P.generator(3)])
    assert str(ng.nilpotency_class(Q)) == "1"


# -- subgroups ----------------------------------------------------------------------


def test_subgroup_class_basics():
    P = ng.free_nilpotent(2, 2)
    assert ng.subgroup_class(P, []) == 0
    assert ng.subgroup_class(P, [P.identity()]) == 0
    assert ng.subgroup_class(P, [P.generator(1)]) == 1
    assert ng.subgroup_class(P, P.generators()) == ng.nilpotency_class(P)
    P23 = ng.free_nilpotent(2, 3)
    assert ng.subgroup_class(P23, [P23.generator(3)]) == 1
    assert ng.subgroup_class(P23, [P23.generator(1), P23.generator(2)]) == \
        ng.nilpotency_class(P23)


def test_subgroup_class_in_quotient():
    P = ng.free_nilpotent(2, 2)
    Q = ng.quotient(P, [ng.power(P.generator(1), 2)])
    assert ng.subgroup_class(Q, Q.generators()) == ng.nilpotency_class(Q)
    with pytest.raises(ValueError):
        ng.subgroup_class(Q, [P.generator(1)])


def test_subgroup_membership():
    P = ng.free_nilpotent(2, 2)
    g1, g2, g3 = P.generators()
    H = ng.Subgroup(P, [ng.power(g1, 2), g2])
    assert H.contains(ng.power(g1, 2))
    assert H.contains(g2)
    assert not H.contains(g1)
    assert H.contains(ng.commutator(ng.power(g1, 2), g2))
    assert not H.contains(g3)
    assert H.contains(ng.power(g3, 2))
    assert H.layer_lattice(2) == [[2]]


def test_subgroup_membership_in_quotient():
    P = ng.free_nilpotent(2, 2)
    Q = ng.quotient(P, [ng.power(P.generator(1), 2)])
    H = ng.Subgroup(Q, [Q.generator(2)])
    assert H.contains(Q.generator(2))
    assert not H.contains(Q.generator(3))
    assert H.contains(ng.power(Q.generator(3), 2))  # trivial in Q
    assert not H.contains(Q.generator(1))


# -- serialization -------------------------------------------------------------------


def test_dump_roundtrip_free():
    P = ng.free_nilpotent(2, 3)
    text = ng.dump_presentation(P)
    P2 = ng.read_presentation(text)
    assert P2 == P
    assert ng.dump_presentation(P2) == text
    assert ng.presentation_digest(P2) == ng.presentation_digest(P)


def test_dump_roundtrip_quotient():
    P = ng.free_nilpotent(2, 2)
    Q = ng.quotient(P, [ng.power(P.generator(1), 2)])
    text = ng.dump_presentation(Q)
    Q2 = ng.read_presentation(text)
    assert Q2 == Q
    assert ng.dump_presentation(Q2) == text
    # parsed quotient computes like the original
    assert ng.normal_form(Q2, [1, 2, 1]).exps == ng.normal_form(Q, [1, 2, 1]).exps


def test_read_presentation_rejects_garbage():
    with pytest.raises(ValueError):
        ng.read_presentation("not a dump\n")
    good = ng.dump_presentation(ng.free_nilpotent(2, 2))
    with pytest.raises(ValueError):
        ng.read_presentation(good + "junk line\n")


def test_element_hash_and_repr():
    P = ng.free_nilpotent(2, 2)
    u = ng.normal_form(P, [1, 2])
    v = ng.normal_form(P, [1, 2])
    assert u == v and hash(u) == hash(v)
    assert len({u, v}) == 1
    assert "g1" in repr(u)
    assert repr(P.identity()) == "<identity>"
