import random

import pytest

from orisogeny.construct import crater_curve, element, oriented_curve, oriented_e0, quaternion_basis
from orisogeny.errors import InvalidOrientation, NoShift, NoSolution
from orisogeny.isogeny import IsogenyExpr
from orisogeny.orientation import OrientedCurve, action_word, enc, ideal_action, twist
from orisogeny.quadratic import QuadForm, QuadOrder, class_group, reduced_forms
from orisogeny.vectorisation import (ActionCache, MitmTable, alpha_endring_pipeline,
                                     hidden_shift_instance, one_orbit, smooth_bound,
                                     solve_hidden_shift_bruteforce, vectorise, vectorise_effective,
                                     walk_length)


def class_by_search(X, X2):
    """Every reduced form tried in turn."""
    hits = [f for f in reduced_forms(X.disc) if enc(ideal_action(X, f)) == enc(X2)]
    assert len(hits) <= 1
    return hits[0] if hits else None


def check_contract(res, X):
    x = smooth_bound(X.disc)
    assert all(P.a <= x for P in res.word)
    assert res.prime_factor_count <= 2 * walk_length(X.disc)
    assert res.norm == 1 if not res.word else res.norm > 1


class TestParameters:
    def test_smooth_bound(self):
        assert smooth_bound(-47) == 58  # ln(47)^3 = 57.07
        assert smooth_bound(-47, 0.5) < smooth_bound(-47)
        assert walk_length(-47) == 4

    def test_table_keeps_first(self):
        T = MitmTable(2)
        assert T.insert("a", [1])
        assert not T.insert("a", [2])
        assert T["a"] == [1]
        assert not T.full()
        T.insert("b", [3])
        assert T.full()

    def test_cache_counts(self):
        X = crater_curve(419, -47)
        c = ActionCache()
        w = [QuadForm(2, 1, 6), QuadForm(3, 1, 4)]
        Y1, k1 = c.apply(X, w)
        Y2, k2 = c.apply(X, w)
        assert k1 == k2 == enc(action_word(X, [(P, 1) for P in w]))
        assert c.hits >= 2


class TestVectorise:
    def test_identity(self):
        X = crater_curve(419, -47)
        res = vectorise(X, X)
        assert res.ideal.is_principal()
        assert not res.twisted

    def test_class_number_one(self):
        X = oriented_e0(419)
        assert vectorise(X, X).ideal.is_principal()

    @pytest.mark.parametrize("disc,seed", [(-47, 0), (-47, 3), (-23, 1), (-39, 2), (-36, 0)])
    def test_matches_search(self, disc, seed):
        X = oriented_curve(419, disc)
        forms = reduced_forms(disc)
        f = random.Random(seed).choice(forms)
        X2 = ideal_action(X, f)
        res = vectorise(X, X2, seed=seed)
        assert not res.twisted
        assert res.ideal == class_by_search(X, X2) == f.reduced()
        assert enc(action_word(X, res.collapsed())) == enc(X2)
        check_contract(res, X)

    def test_twisted_orbit(self):
        X = crater_curve(419, -47)
        X2 = ideal_action(twist(X), QuadForm(2, 1, 6))
        assert class_by_search(X, X2) is None
        res = vectorise(X, X2)
        assert res.twisted
        assert enc(action_word(twist(X), res.collapsed())) == enc(X2)

    def test_ramified_has_one_orbit(self):
        E, _, j, _ = quaternion_basis(419)
        X = OrientedCurve(E, QuadOrder(-1676), IsogenyExpr(E, E, [(1, j)], degree=419, trace=0))
        assert one_orbit(X)
        assert not one_orbit(crater_curve(419, -47))

    def test_deterministic(self):
        X = crater_curve(419, -23)
        X2 = ideal_action(X, QuadForm(2, 1, 3))
        a, b = vectorise(X, X2, seed=5), vectorise(X, X2, seed=5)
        assert a.to_json() == b.to_json()

    def test_mismatched_orders(self):
        with pytest.raises(InvalidOrientation):
            vectorise(crater_curve(419, -47), crater_curve(419, -23))


class TestEffective:
    def test_chain_from_third_curve(self):
        X = crater_curve(419, -47)
        X2 = ideal_action(X, QuadForm(3, 1, 4))
        F = ideal_action(X, QuadForm(2, 1, 6))
        res, chain = vectorise_effective(X, X2, F)
        assert chain.domain == F.curve
        assert chain.degree() == res.norm
        expected = ideal_action(F, res.ideal)
        assert chain.codomain.j_invariant() == expected.curve.j_invariant()

    def test_twisted_has_no_solution(self):
        X = crater_curve(419, -47)
        X2 = ideal_action(twist(X), QuadForm(2, 1, 6))
        with pytest.raises(NoSolution):
            vectorise_effective(X, X2, X)


class TestHiddenShift:
    @pytest.mark.parametrize("disc", [-47, -39, -84])
    def test_recovers_planted(self, disc):
        X = crater_curve(419, disc)
        G = class_group(disc)
        rng = random.Random(disc)
        for _ in range(2):
            s = tuple(rng.randrange(n) for _, n in G.decomposition())
            X2 = ideal_action(X, G.from_vector(s))
            inst = hidden_shift_instance(X, X2, s)
            assert solve_hidden_shift_bruteforce(inst) == s

    def test_zero_and_unit_shift(self):
        X = crater_curve(419, -47)
        G = class_group(-47)
        assert solve_hidden_shift_bruteforce(hidden_shift_instance(X, X)) == (0,)
        e1 = G.from_vector((1,))
        assert solve_hidden_shift_bruteforce(hidden_shift_instance(X, ideal_action(X, e1))) == (1,)

    def test_no_shift_across_orbits(self):
        X = crater_curve(419, -47)
        with pytest.raises(NoShift):
            solve_hidden_shift_bruteforce(hidden_shift_instance(X, twist(X)))


class TestPipeline:
    def test_two_iota(self):
        theta = element(419, 0, 4, 0, 0)  # 2i
        X, res, report = alpha_endring_pipeline(theta.domain, theta)
        assert X.disc == -4
        assert res.ideal.is_principal()
        assert report["disc_input"] == -16
        assert report["primitive_disc"] == -4
        assert "out of scope" in report["endomorphism_basis"]

    def test_scalar_rejected(self):
        E = oriented_e0(419).curve
        with pytest.raises(InvalidOrientation):
            alpha_endring_pipeline(E, IsogenyExpr(E, E, [(2, None)], degree=4, trace=4))

    def test_depth_one_curve(self):
        # 2 theta on a curve below the Z[i] crater: primitivise removes the
        # factor 2 only, and the result lies in the orbit of the base
        Y = oriented_curve(419, -36, seed=1)
        theta = Y.theta * 2
        X, res, report = alpha_endring_pipeline(Y.curve, theta)
        assert X.disc == -36
        assert report["factorisation"] == [[2, 4], [3, 2]]
        base = oriented_curve(419, -36)
        assert enc(action_word(twist(base) if res.twisted else base, res.collapsed())) == enc(X)
