import random

import pytest

from orisogeny.construct import crater_curve, element, oriented_e0, quaternion_basis
from orisogeny.curve import Curve, isomorphisms_any
from orisogeny.errors import ConductorClash, InvalidOrientation
from orisogeny.isogeny import IsogenyChain, IsoStep, IsogenyExpr, conjugate
from orisogeny.orientation import (OrientedCurve, action_word, enc, from_endomorphism,
                                   ideal_action, primitivise, twist)
from orisogeny.quadratic import QuadForm, QuadOrder, class_group, compose, prime_ideals, reduced_forms

from oracles import all_oriented_keys, primitive_disc_oracle


def orbit_keys(X):
    return {enc(ideal_action(X, f)) for f in reduced_forms(X.disc)}


@pytest.fixture(scope="module")
def x47():
    return crater_curve(419, -47)


class TestEnc:
    def test_deterministic(self, x47):
        assert enc(x47).bytes == enc(x47).bytes
        assert enc(x47).hex() == enc(crater_curve(419, -47)).hex()

    @pytest.mark.parametrize("disc", [-47, -23])
    def test_isomorphism_invariance(self, disc):
        # carry theta to a rescaled model y^2 = x^3 + u^4 a x + u^6 b
        X = crater_curve(419, disc)
        E = X.curve
        assert E.is_short()
        u = E.F(5)
        E2 = Curve(419, (E.a[3] * u ** 4, E.a[4] * u ** 6))
        assert E2 != E
        iso = isomorphisms_any(E, E2)[0]
        Y = OrientedCurve(E2, X.order, conjugate(IsogenyChain([IsoStep(iso)], E), X.theta))
        assert enc(Y) == enc(X)
        assert Y.check()

    def test_twist_is_involution(self, x47):
        assert enc(twist(twist(x47))) == enc(x47)

    def test_twist_differs_off_the_real_classes(self, x47):
        # X and its twist are in different orbits when p is inert
        assert enc(twist(x47)) not in orbit_keys(x47)

    def test_twist_of_frobenius_orientation(self):
        # Z[j] at p = 419: i j i^-1 = -j, so (E0, j) is its own twist, while
        # the image under a class of order > 2 is not
        E, i, j, _ = quaternion_basis(419)
        theta = IsogenyExpr(E, E, [(1, j)], degree=419, trace=0)
        X = OrientedCurve(E, QuadOrder(-1676), theta, primitive=True)
        assert enc(twist(X)) == enc(X)
        G = class_group(-1676)
        a = next(f for f, n in G.decomposition() if n > 2)
        Y = ideal_action(X, a)
        assert enc(twist(Y)) != enc(Y)


class TestFromEndomorphism:
    def test_scalar_rejected(self):
        E = oriented_e0(31).curve
        with pytest.raises(InvalidOrientation):
            from_endomorphism(E, IsogenyExpr(E, E, [(3, None)], degree=9, trace=6))

    def test_shift_to_standard_generator(self):
        E = oriented_e0(31).curve
        O, g = from_endomorphism(E, element(31, 6, 2, 0, 0))  # 3 + i
        assert O.disc == -4
        assert (g.trace(), g.degree()) == (0, 1)


class TestPrimitivise:
    @pytest.mark.parametrize("A,B", [(0, 4), (0, 6), (2, 8), (0, 12)])
    def test_multiples_of_i(self, A, B):
        # (A + B i)/2 = A/2 + (B/2) i generates Z[(B/2) i]; primitive order is Z[i]
        theta = element(31, A, B, 0, 0)
        X = primitivise(theta.domain, theta)
        assert X.disc == -4
        assert X.check()

    def test_z_two_i(self):
        # Z[2i] at 419 extends to Z[i]
        theta = element(419, 0, 4, 0, 0)
        assert primitivise(theta.domain, theta).disc == -4

    def test_idempotent(self):
        theta = element(419, 1, 3, 1, 1)
        X = primitivise(theta.domain, theta)
        Y = primitivise(X.curve, X.theta)
        assert X.disc == Y.disc
        assert enc(X) == enc(Y)

    @pytest.mark.parametrize("abcd", [(1, 3, 1, 1), (0, 2, 2, 0), (2, 4, 0, 2), (0, 6, 2, 0)])
    def test_against_scalar_depth_oracle(self, abcd):
        theta = element(419, *abcd)
        X = primitivise(theta.domain, theta)
        assert X.disc == primitive_disc_oracle(theta.domain, theta)


class TestIdealAction:
    def test_principal_fixes(self, x47):
        assert enc(ideal_action(x47, QuadForm(1, 1, 12))) == enc(x47)

    def test_norm_form_is_principal(self, x47):
        # p pbar = (2) acts trivially
        p2, p2bar = prime_ideals(x47.order, 2)
        Y = action_word(x47, [(p2, 1), (p2bar, 1)])
        assert enc(Y) == enc(x47)

    def test_inverse_round_trip(self, x47):
        a = QuadForm(2, 1, 6)
        Y = ideal_action(x47, a)
        assert enc(Y) != enc(x47)
        assert enc(ideal_action(Y, QuadForm(2, -1, 6))) == enc(x47)

    def test_composition(self, x47):
        rng = random.Random(7)
        forms = reduced_forms(-47)
        for _ in range(6):
            a, b = rng.choice(forms), rng.choice(forms)
            lhs = enc(ideal_action(ideal_action(x47, a), b))
            rhs = enc(ideal_action(x47, compose(a, b)))
            assert lhs == rhs

    def test_free_action(self, x47):
        assert len(orbit_keys(x47)) == 5

    def test_conductor_prime_rejected(self):
        from orisogeny.construct import oriented_curve
        X = oriented_curve(419, -16)
        with pytest.raises(ConductorClash):
            action_word(X, [(QuadForm(2, 0, 2), 1)])


class TestExhaustiveOrbit:
    def test_p31_disc47(self):
        X = crater_curve(31, -47)
        keys = all_oriented_keys(31, QuadOrder(-47))
        orb, orbt = orbit_keys(X), orbit_keys(twist(X))
        assert len(orb) == len(orbt) == 5
        assert not orb & orbt
        assert keys == orb | orbt
