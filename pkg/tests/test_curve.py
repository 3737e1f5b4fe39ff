import random

import pytest

from orisogeny.arith import get_field
from orisogeny.curve import (Curve, automorphisms, canonical_model, is_supersingular, isomorphisms,
                             torsion_basis, weil_pairing)
from orisogeny.errors import NotOnCurve


@pytest.fixture(scope="module")
def e31():
    return Curve(31, (1, 0))


def brute_order(E):
    """Point count over F_{p^2} by enumerating x."""
    F = E.field(1)
    n = 1
    for x in F.elements():
        a1, a2, a3, a4, a6 = E.coeffs(F)
        if not (a1.is_zero() and a3.is_zero()):
            raise AssertionError("oracle expects a short model")
        rhs = x * x * x + a2 * x * x + a4 * x + a6
        n += 1 if rhs.is_zero() else (2 if rhs.is_square() else 0)
    return n


class TestModels:
    def test_canonical_j0(self):
        F = get_field(31, 2)
        C = canonical_model(F(0), 31)
        assert C.j_invariant() == F(0)
        assert [c for c in C.coeffs(C.field(1))][2] == C.field(1)(1)  # a3 = 1: y^2 + y = x^3

    def test_canonical_j1728(self):
        F = get_field(31, 2)
        C = canonical_model(F(1728), 31)
        assert C == Curve(31, (1, 0))

    def test_canonical_generic_j(self):
        F = get_field(31, 2)
        C = canonical_model(F(2), 31)
        assert C.j_invariant() == F(2)
        assert canonical_model(F(2), 31) == C

    def test_supersingular(self, e31):
        assert is_supersingular(e31)
        assert is_supersingular(Curve(419, (1, 0)))


class TestGroupOrder:
    def test_orders(self, e31):
        assert e31.order(1) == 32 ** 2
        assert e31.order(2) == (31 ** 2 - 1) ** 2

    def test_brute_count(self, e31):
        assert brute_order(e31) == e31.order(1)

    def test_full_two_torsion(self, e31):
        assert e31.order(1) % 4 == 0
        B = torsion_basis(e31, 2)
        assert B.P.degree == 1 and B.Q.degree == 1


class TestTorsion:
    def test_two_torsion_points_are_roots(self, e31):
        B = torsion_basis(e31, 2)
        for P in (B.P, B.Q, B.P + B.Q):
            x = P.x
            assert (x * x * x + x).is_zero()
            assert P.y.is_zero()

    def test_m_one_rejected(self, e31):
        with pytest.raises(ValueError):
            torsion_basis(e31, 1)

    @pytest.mark.parametrize("m", [3, 5, 8, 9])
    def test_basis_pairing_primitive(self, e31, m):
        B = torsion_basis(e31, m)
        z = weil_pairing(B.P, B.Q, m)
        assert z ** m == z.ctx(1)
        for d in range(1, m):
            if m % d == 0:
                assert z ** d != z.ctx(1)

    def test_pairing_alternating(self, e31):
        B = torsion_basis(e31, 5)
        one = B.P.ctx(1)
        assert weil_pairing(B.P, B.P, 5) == one
        assert weil_pairing(B.P, B.Q, 5) * weil_pairing(B.Q, B.P, 5) == one

    def test_pairing_two_torsion(self, e31):
        B = torsion_basis(e31, 2)
        assert weil_pairing(B.P, B.Q, 2) == B.P.ctx(-1)

    def test_bilinear(self, e31):
        B = torsion_basis(e31, 9)
        z = weil_pairing(B.P, B.Q, 9)
        assert weil_pairing(B.P * 2, B.Q * 4, 9) == z ** 8

    def test_coordinates_roundtrip(self, e31):
        B = torsion_basis(e31, 8)
        for a, b in [(0, 1), (3, 5), (7, 7)]:
            assert B.coordinates(B.combine(a, b)) == (a, b)


class TestIsomorphisms:
    def test_generic_automorphisms(self):
        F = get_field(31, 2)
        C = canonical_model(F(2), 31)
        assert len(isomorphisms(C, C)) == 2

    def test_j1728_automorphisms(self, e31):
        autos = automorphisms(e31)
        assert len(autos) == 4
        P = e31.random_point(1, random.Random(1))
        images = {(A(P).x, A(P).y) for A in autos}
        assert any(Q[0] == -P.x for Q in images)

    def test_different_j(self, e31):
        F = get_field(31, 2)
        assert isomorphisms(e31, canonical_model(F(2), 31)) == []

    def test_isomorphism_maps_points(self, e31):
        rng = random.Random(3)
        for A in automorphisms(e31):
            P = e31.random_point(1, rng)
            assert A(P).on_curve()
            assert A.inverse()(A(P)) == P


class TestPoints:
    def test_not_on_curve(self, e31):
        F = e31.field(1)
        with pytest.raises(NotOnCurve):
            e31.point(F(1), F(1))

    def test_group_law(self, e31):
        rng = random.Random(2)
        P, Q, R = (e31.random_point(1, rng) for _ in range(3))
        assert (P + Q) + R == P + (Q + R)
        assert P * 32 == e31.zero(P.ctx)  # exponent of E(F_{p^2}) is p + 1

    def test_json_roundtrip(self, e31):
        assert Curve.from_json(e31.to_json()) == e31
