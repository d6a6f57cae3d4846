"""Relator families, the two quotient engines, and the certificate layer."""

import pytest

from engelkit import nilgroup as ng
from engelkit import sandwich_verifier as sv
from engelkit.nilgroup import (
    NormalClosure,
    free_nilpotent,
    lower_central_series,
    nilpotency_class,
)
from engelkit.sandwich_verifier import (
    InstantiationBall,
    SandwichFamily,
    ball_elements,
    certify_lemma31,
    engel_power_identity,
    exact_quotient,
    generator_family,
    relators_for,
    stabilized_class,
    streamed_bound_quotient,
)


class TestBall:
    def test_radius_zero_is_identity_only(self):
        F = generator_family(3, 3, "sandwich")
        ball = ball_elements(F, InstantiationBall(0))
        assert len(ball) == 1
        assert ball[0].exps == ()

    def test_rank3_sizes(self):
        F = generator_family(3, 3, "sandwich")
        assert len(ball_elements(F, InstantiationBall(1))) == 7
        assert len(ball_elements(F, InstantiationBall(2))) == 37

    def test_rank4_radius2_size(self):
        F = generator_family(4, 3, "sandwich")
        assert len(ball_elements(F, InstantiationBall(2))) == 65

    def test_inverse_closed(self):
        # pair and triple targets may be conjugated by g or g^-1
        # interchangeably, which several reductions rely on
        F = generator_family(2, 4, "sandwich")
        ball = ball_elements(F, InstantiationBall(2))
        exps = {u.exps for u in ball}
        assert all(ng.inverse(u).exps in exps for u in ball)

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError):
            InstantiationBall(-1)


class TestFamilyValidation:
    def test_unknown_kind(self):
        P = free_nilpotent(2, 3)
        gens = (P.generator(1), P.generator(2))
        with pytest.raises(ValueError):
            SandwichFamily(P, gens, "weak")

    def test_single_label_rejected(self):
        P = free_nilpotent(2, 3)
        with pytest.raises(ValueError):
            SandwichFamily(P, (P.generator(1),), "sandwich")

    def test_duplicate_labels_rejected(self):
        P = free_nilpotent(2, 3)
        g = P.generator(1)
        with pytest.raises(ValueError):
            SandwichFamily(P, (g, P.generator(1)), "sandwich")

    def test_foreign_label_rejected(self):
        P = free_nilpotent(2, 3)
        other = free_nilpotent(2, 4)
        with pytest.raises(ValueError):
            SandwichFamily(P, (P.generator(1), other.generator(2)), "sandwich")


class TestRelators:
    def test_identity_conjugator_pair_relators_present(self):
        P = free_nilpotent(2, 4)
        F = SandwichFamily(P, (P.generator(1), P.generator(2)), "sandwich")
        rel = {r.exps for r in relators_for(F, InstantiationBall(0))}
        a, b = P.generator(1), P.generator(2)
        assert ng.left_normed_commutator([b, a, a]).exps in rel
        assert ng.left_normed_commutator([b, a, b]).exps in rel
        assert ng.left_normed_commutator([a, b, b]).exps in rel
        assert ng.left_normed_commutator([a, b, a]).exps in rel

    def test_pair_relators_avoid_low_weights(self):
        # every relator is a commutator of weight >= 3, so layers 1 and 2
        # of any quotient stay free of rank 2 and 1
        P = free_nilpotent(2, 4)
        F = SandwichFamily(P, (P.generator(1), P.generator(2)), "strong")
        for r in relators_for(F, InstantiationBall(1)):
            assert r.exps
            wmin = min(P.weights[i] for i, _ in r.exps)
            assert wmin >= 3
        Q = exact_quotient(F, 1)
        layers = lower_central_series(Q)
        assert layers[0].free_rank == 2 and not layers[0].torsion
        assert layers[1].free_rank == 1 and not layers[1].torsion

    def test_triple_relators_start_at_weight_four(self):
        P = free_nilpotent(3, 5)
        F = SandwichFamily(
            P, tuple(P.generator(i) for i in (1, 2, 3)), "strong")
        ball = ball_elements(F, InstantiationBall(1))
        seen = 0
        for entries in sv._triple_instances(F, ball):
            for r in sv._instance_relators(entries, 4, P.cap):
                wmin = min(P.weights[i] for i, _ in r.exps)
                assert wmin >= 4
                seen += 1
            if seen > 400:
                return
        assert seen

    def test_minimal_flag_selects_lowest_weight_layer(self):
        P = free_nilpotent(2, 5)
        a, b = P.generator(1), P.generator(2)
        full = sv._instance_relators((a, b), 3, P.cap, full=True)
        least = sv._instance_relators((a, b), 3, P.cap, full=False)
        assert {r.exps for r in least} < {r.exps for r in full}
        assert len(least) == 4  # the four weight-3 words with distinct head
        assert all(min(P.weights[i] for i, _ in r.exps) == 3 for r in least)

    def test_relator_count_bound(self):
        F = generator_family(3, 6, "sandwich")
        with pytest.raises(ValueError):
            relators_for(F, InstantiationBall(1), max_relators=50)


def _closure_from(P, relator_iter):
    nc = NormalClosure(P)
    for r in relator_iter:
        nc.add(dict(r.exps))
    nc.stabilize()
    return nc


def _mutually_sift(nc1, nc2) -> bool:
    return (all(nc2.sifts_to_identity(dict(row)) for row in nc1.rows.values())
            and all(nc1.sifts_to_identity(dict(row))
                    for row in nc2.rows.values()))


class TestMinimalRelatorRoute:
    """The engines feed only the lowest-weight commutator of each instance;
    the normal closure must agree with the full-depth family's."""

    @pytest.mark.parametrize("rank,cap,kind", [
        (2, 4, "sandwich"),
        (2, 4, "strong"),
        (3, 4, "partial_strong"),
    ])
    def test_full_and_minimal_closures_agree(self, rank, cap, kind):
        F = generator_family(rank, cap, kind)
        nc_full = _closure_from(
            F.ambient, relators_for(F, InstantiationBall(1)))
        nc_min = exact_quotient(F, 1).closure
        assert _mutually_sift(nc_full, nc_min)


class TestEngines:
    def test_stabilized_class_matches_cold_rebuild(self):
        F = generator_family(2, 4, "sandwich")
        classes, Q, stabilized = stabilized_class(F, max_radius=3)
        assert stabilized
        assert classes[-1] == classes[-2]
        radius = len(classes)
        cold = exact_quotient(F, radius)
        assert nilpotency_class(cold) == classes[-1]

    def test_class_never_grows_with_radius(self):
        F = generator_family(2, 4, "strong")
        classes, _, _ = stabilized_class(F, max_radius=3)
        vals = [int(c) for c in classes]
        assert vals == sorted(vals, reverse=True)

    def test_streamed_bound_sound_and_sharp(self):
        F = generator_family(2, 4, "sandwich")
        c = int(nilpotency_class(exact_quotient(F, 1)))
        assert c >= 2
        Q, info = streamed_bound_quotient(F, c, max_radius=1)
        assert Q is not None
        assert int(nilpotency_class(Q)) <= c
        # one less is unreachable: the streamed closure sits inside the
        # full one, so it cannot kill a layer the full quotient keeps
        Q_bad, info_bad = streamed_bound_quotient(F, c - 1, max_radius=1)
        assert Q_bad is None

    def test_streamed_extra_goals_reported(self):
        F = generator_family(2, 4, "sandwich")
        c = int(nilpotency_class(exact_quotient(F, 1)))
        goal = lambda Q: int(nilpotency_class(Q)) <= c
        Q, info = streamed_bound_quotient(F, c, max_radius=1,
                                          extra_goals=[goal])
        assert Q is not None
        assert info["extra_goals_ok"] == [True]

    def test_streamed_respects_budget(self):
        F = generator_family(2, 4, "sandwich")
        Q, info = streamed_bound_quotient(F, 1, max_radius=1, max_fed=10)
        assert Q is None
        assert info["budget_hit"]


class TestSubgroupChecks:
    def test_class_at_most_on_known_subgroups(self):
        P = free_nilpotent(2, 4)
        a, b = P.generator(1), P.generator(2)
        memo = {}
        assert sv._class_at_most(P, [a], 1, memo)
        assert not sv._class_at_most(P, [a, b], 3, memo)
        assert sv._class_at_most(P, [a, b], 4, memo)
        P3 = free_nilpotent(2, 3)
        a3, b3 = P3.generator(1), P3.generator(2)
        c3 = ng.commutator(a3, b3)
        # [[a,b],a] is a basis word of weight 3, anything deeper is capped
        memo3 = {}
        assert sv._class_at_most(P3, [c3, a3], 2, memo3)
        assert not sv._class_at_most(P3, [c3, a3], 1, memo3)

    def test_closure_consistency_iterates(self):
        # once [a,b] joins the strong family, the pair ([a,b], c) admits
        # the same treatment inside the same quotient
        F = generator_family(3, 6, "strong")
        Q, info = streamed_bound_quotient(F, 3, max_radius=3)
        assert Q is not None
        labels = [Q.element(dict(x.exps)) for x in F.labels]
        a, b, c = labels
        e = ng.commutator(a, b)
        e2 = ng.commutator(e, c)
        extended = labels + [e]
        ball = ball_elements(
            SandwichFamily(Q, tuple(labels), "strong"), InstantiationBall(1))
        memo = {}
        for v in extended + [e2]:
            for g in ball:
                assert sv._class_at_most(Q, [e2, ng.conjugate(v, g)], 2, memo)


class TestCertificates:
    def test_engel_exponents(self):
        for n, expect in [(0, 1), (1, -2), (2, 4), (5, -32)]:
            cert = engel_power_identity(n)
            assert cert.verified
            w = dict(cert.witnesses)
            assert w["exponent"] == expect == (-2) ** n

    def test_engel_bound_enforced(self):
        with pytest.raises(ValueError):
            engel_power_identity(-1)
        with pytest.raises(ValueError):
            engel_power_identity(11)
        assert engel_power_identity(12, bound=12).verified

    def test_payload_deterministic(self):
        a = engel_power_identity(4)
        b = engel_power_identity(4)
        assert a.payload() == b.payload()
        assert a.to_dict()["duration_ms"] >= 0

    def test_json_round_trip(self):
        import json

        cert = engel_power_identity(2)
        assert json.loads(cert.to_json()) == cert.to_dict()

    def test_lemma31_identity_and_sharpness(self):
        cert = certify_lemma31(samples=25, seed=5)
        assert cert.verified
        w = dict(cert.witnesses)
        assert w["samples"] == 25
        assert w["class4_counter_witness"] is not None


class TestFreeProductWords:
    def test_involution_and_cancellation(self):
        a = (0, 0)
        x = (1,)
        assert sv._fp_mul(a, a) == (0,)
        assert sv._fp_mul(x, sv._fp_inv(x)) == (0,)
        assert sv._fp_mul(sv._fp_inv(a), a) == (0,)

    def test_commutator_reduced_form(self):
        x, a = (1,), (0, 0)
        assert sv._fp_comm(x, a) == (-1, 1, 0)

    def test_power_matches_repeated_product(self):
        u = sv._fp_comm((1,), (0, 0))
        acc = (0,)
        for _ in range(5):
            acc = sv._fp_mul(acc, u)
        assert acc == sv._fp_pow(u, 5)
        assert sv._fp_mul(acc, sv._fp_pow(u, -5)) == (0,)
