from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mplreg.errors import DomainError
from mplreg.rootsofunity import (
    MINUS_ONE,
    ONE,
    ComplexPoint,
    RotationNumber,
    ZVector,
    contains,
    first_nontrivial_prefix,
    index_set_and_count,
    parse_complex,
    rotation_product,
    singular_hyperplanes,
)

rotations = st.builds(
    RotationNumber,
    st.integers(min_value=-30, max_value=30),
    st.integers(min_value=1, max_value=12),
)
zvectors = st.lists(rotations, min_size=1, max_size=6).map(ZVector)


def Z(text):
    return ZVector.parse(text)


class TestRotationNumber:
    def test_reduction_and_aliases(self):
        assert RotationNumber(2, 4) == RotationNumber(1, 2)
        assert RotationNumber(-1, 3) == RotationNumber(2, 3)
        assert RotationNumber(5, 5) == ONE
        assert RotationNumber.parse("1") == ONE
        assert RotationNumber.parse("-1") == MINUS_ONE
        assert RotationNumber.parse("3/6") == MINUS_ONE
        assert RotationNumber(0, 7) == RotationNumber(0, 1)

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError):
            RotationNumber.parse("1/0")
        with pytest.raises(ValueError):
            RotationNumber.parse("x/3")

    def test_rejects_floats(self):
        with pytest.raises(TypeError):
            RotationNumber(0.5)

    def test_value(self):
        assert MINUS_ONE.value() == -1
        assert ONE.value() == 1
        zeta = RotationNumber(1, 4).value()
        assert abs(zeta - mp.mpc(0, 1)) == 0

    def test_order(self):
        assert RotationNumber(2, 6).order == 3
        assert ONE.order == 1

    @given(rotations, rotations, rotations)
    def test_group_associativity(self, a, b, c):
        assert (a * b) * c == a * (b * c)

    @given(rotations)
    def test_inverse(self, a):
        assert (a * a.inverse()).is_one()

    @given(rotations, st.integers(min_value=-5, max_value=10))
    def test_pow_matches_repeated_product(self, a, n):
        acc = ONE
        step = a if n >= 0 else a.inverse()
        for _ in range(abs(n)):
            acc = acc * step
        assert a ** n == acc


class TestCombinatorics:
    def test_rotation_product_examples(self):
        # (-1)(-1) = 1
        assert rotation_product(Z("-1,-1"), 1, 2) == ONE
        assert rotation_product(Z("1,-1"), 1, 2) == MINUS_ONE
        # direct rational addition mod 1
        assert rotation_product(Z("1/3,1/3,1/3"), 1, 3) == ONE

    def test_rotation_product_bounds(self):
        with pytest.raises(IndexError):
            rotation_product(Z("1,-1"), 2, 1)
        with pytest.raises(IndexError):
            rotation_product(Z("1,-1"), 1, 3)

    def test_first_nontrivial_prefix(self):
        assert first_nontrivial_prefix(Z("-1,1")) == 1
        assert first_nontrivial_prefix(Z("1,1,1")) == 4  # r + 1
        assert first_nontrivial_prefix(Z("1,-1")) == 2

    def test_index_set_and_count(self):
        assert index_set_and_count(Z("1,-1"), 1) == ((1,), 1)
        assert index_set_and_count(Z("1,-1"), 2) == ((), 0)
        assert index_set_and_count(Z("-1,-1"), 2) == ((1,), 1)

    @given(zvectors)
    def test_count_bounds(self, z):
        q = first_nontrivial_prefix(z)
        for i in range(1, z.r + 1):
            _, qi = index_set_and_count(z, i)
            assert qi <= i
            if i >= q:
                assert qi <= i - 1


class TestDomains:
    def test_boundary_point_excluded(self):
        # (1, 0) sits on the boundary of U_2(-1, 1)
        assert not contains("Urz", Z("-1,1"), (1, 0))

    def test_v_minus_u_example(self):
        z = Z("1,-1")
        assert contains("Vrz", z, (2, -1))
        assert not contains("Urz", z, (2, -1))

    def test_ur_interior(self):
        for z in (Z("1,1,1"), Z("1/3,1/2,5/6")):
            assert contains("Ur", z, (2, 2, 2))

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            contains("Ur", Z("1,-1"), (2,))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            contains("Wr", Z("1"), (2,))

    @given(zvectors, st.data())
    @settings(max_examples=60)
    def test_inclusion_chain(self, z, data):
        coords = [
            data.draw(st.integers(min_value=-4, max_value=5))
            + Fraction(data.draw(st.integers(min_value=0, max_value=3)), 4)
            for _ in range(z.r)
        ]
        s = [mp.mpf(c.numerator) / c.denominator for c in coords]
        if contains("Ur", z, s):
            assert contains("Urz", z, s)
        if contains("Urz", z, s):
            assert contains("Vrz", z, s)

    def test_v_equals_u_iff_all_ones(self):
        # sample a rational grid; V = U exactly for the all-ones vector
        grid = [(a, b) for a in range(-2, 5) for b in range(-2, 5)]
        for z, expect_equal in ((Z("1,1"), True), (Z("1,-1"), False), (Z("-1,1/3"), False)):
            equal = all(
                contains("Vrz", z, s) == contains("Ur", z, s) for s in grid
            )
            assert equal == expect_equal


class TestHyperplanes:
    def test_all_prefixes_one(self):
        planes = singular_hyperplanes(Z("1,1"))
        assert [(p.index_sum, p.levels) for p in planes] == [
            (1, ("eq", 1)),
            (2, ("le", 2)),
        ]

    def test_no_trivial_prefix(self):
        assert singular_hyperplanes(Z("-1,1/3")) == []

    def test_case_b(self):
        planes = singular_hyperplanes(Z("-1,-1"))
        assert [(p.index_sum, p.levels) for p in planes] == [(2, ("le", 1))]

    def test_mixed_prefix(self):
        # prefixes of (1/3,1/3,1/3): 1/3, 2/3, 1 -> only i=3 trivial, case (b)
        planes = singular_hyperplanes(Z("1/3,1/3,1/3"))
        assert [(p.index_sum, p.levels) for p in planes] == [(3, ("le", 1))]

    def test_describe(self):
        planes = singular_hyperplanes(Z("1,1"))
        assert planes[0].describe() == "s_1 = 1"
        assert "n <= 2" in planes[1].describe()


class TestParsing:
    def test_parse_complex(self):
        assert parse_complex("2") == mp.mpc(2)
        assert parse_complex("1.5+0.5i") == mp.mpc(1.5, 0.5)
        assert parse_complex("-2-3i") == mp.mpc(-2, -3)
        assert parse_complex("1e-2+1e-3i") == mp.mpc(mp.mpf("1e-2"), mp.mpf("1e-3"))
        assert parse_complex("-i") == mp.mpc(0, -1)

    def test_complex_point(self):
        p = ComplexPoint.parse("2,-1")
        assert len(p) == 2
        assert p[1] == mp.mpc(-1)

    def test_zvector_parse_roundtrip(self):
        z = Z("1,-1,1/3")
        assert ZVector.parse(str(z)) == z
