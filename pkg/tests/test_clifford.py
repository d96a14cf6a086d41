from fractions import Fraction
from itertools import permutations, product
from pathlib import Path
import random

import numpy as np
import pytest

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.clifford import (
    CliffordElement, SignedPermMatrix, TorusAngles, blade_product, clifford_mul, clifford_sigma, clifford_trace,
    g_h, lift_orthogonal, mu_project, reverse, rotation_angles, spin_character, torus_angles_of, torus_element,
    vector_element,
)
from src.quadratic_field import ComplexQSqrt2


def random_element(rng, n, terms=4):
    return CliffordElement(n, {rng.randrange(1 << n): Fraction(rng.randint(-3, 3), rng.randint(1, 3))
                               for _ in range(terms)})


def spin_elements(n):
    """Every signed permutation of size n with determinant +1."""
    for perm in permutations(range(n)):
        for signs in product((1, -1), repeat=n):
            B = SignedPermMatrix(perm, signs)
            if B.det() == 1:
                yield B


class TestSignedPermMatrix:
    """Test suite for the SignedPermMatrix class"""

    def test_det_and_order(self):
        """Test determinant and order of a quarter turn"""
        B = SignedPermMatrix([1, 0, 2], [1, -1, 1])

        assert B.det() == 1
        assert B.order() == 4
        assert B.fixed_dim() == 1


    def test_inverse(self):
        """Test that B @ B^-1 is the identity"""
        B = SignedPermMatrix([2, 0, 1], [-1, 1, -1])

        assert (B @ B.inverse()).is_identity()
        assert B.power(-1) == B.inverse()


    def test_from_dense_round_trip(self):
        """Test that dense matrices convert back and forth"""
        B = SignedPermMatrix([1, 0, 2, 3], [1, 1, -1, 1])

        assert SignedPermMatrix.from_dense(B.to_dense()) == B
        np.testing.assert_array_equal(B.to_dense() @ np.array([1, 2, 3, 4]), np.array(B.apply([1, 2, 3, 4])))


    def test_from_dense_rejects_non_permutation(self):
        """Test that a column with two entries raises ValueError"""
        with pytest.raises(ValueError):
            SignedPermMatrix.from_dense([[1, 1], [0, 1]])


    def test_invalid_signs_raise(self):
        """Test that signs other than +-1 raise ValueError"""
        with pytest.raises(ValueError):
            SignedPermMatrix([0, 1], [1, 2])


    def test_to_json_is_one_based(self):
        """Test that the JSON permutation is 1-based"""
        assert SignedPermMatrix([1, 0], [1, -1]).to_json() == {"perm": [2, 1], "signs": [1, -1]}


    def test_fixed_dim_counts_positive_cycles(self):
        """Test that 2-cycles with positive sign product add one fixed direction"""
        B = SignedPermMatrix([1, 0, 2, 3], [1, 1, -1, -1])

        assert B.fixed_dim() == 1
        assert B.fixed_vectors() == [(1, 1, 0, 0)]


class TestCliffordProduct:
    """Test suite for clifford_mul and reverse"""

    ### Test relations ###
    def test_generator_squares_to_minus_one(self):
        """Test that e_1 e_1 == -1"""
        e1 = CliffordElement.monomial(3, [1])

        assert e1 * e1 == -1


    def test_unit_element(self):
        """Test that 1 * x == x"""
        rng = random.Random(1)
        x = random_element(rng, 4)

        assert CliffordElement.scalar_element(4) * x == x


    def test_two_plane_product(self):
        """Test that (e_1 e_2)(e_2 e_3) == -e_1 e_3"""
        a = CliffordElement.monomial(3, [1, 2])
        b = CliffordElement.monomial(3, [2, 3])

        assert a * b == CliffordElement.monomial(3, [1, 3], -1)


    def test_anticommutation(self):
        """Test that e_i e_j == -e_j e_i for i != j"""
        n = 5
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    assert CliffordElement.monomial(n, [i, j]) == -CliffordElement.monomial(n, [j, i])


    def test_blade_product_sign(self):
        """Test that shared indices contribute -1"""
        assert blade_product(0b1, 0b1) == (-1, 0)
        assert blade_product(0b10, 0b1) == (-1, 0b11)


    def test_dimension_mismatch_raises(self):
        """Test that factors of different dimension raise ValueError"""
        with pytest.raises(ValueError):
            clifford_mul(CliffordElement.scalar_element(2), CliffordElement.scalar_element(3))

    ### End of test relations ###


    ### Test algebraic properties ###
    def test_associativity(self):
        """Test that (ab)c == a(bc) on random sparse elements"""
        rng = random.Random(7)
        for _ in range(100):
            n = rng.randint(1, 8)
            a, b, c = (random_element(rng, n) for _ in range(3))
            assert (a * b) * c == a * (b * c)


    def test_distributivity(self):
        """Test that a(b + c) == ab + ac"""
        rng = random.Random(11)
        for _ in range(50):
            n = rng.randint(1, 6)
            a, b, c = (random_element(rng, n) for _ in range(3))
            assert a * (b + c) == a * b + a * c


    def test_reverse_is_anti_automorphism(self):
        """Test that reverse(ab) == reverse(b) reverse(a)"""
        rng = random.Random(3)
        for _ in range(100):
            n = rng.randint(1, 8)
            a, b = random_element(rng, n), random_element(rng, n)
            assert reverse(a * b) == reverse(b) * reverse(a)

    ### End of test algebraic properties ###


class TestSpinCovering:
    """Test suite for mu_project and lift_orthogonal"""

    ### Test mu_project ###
    def test_mu_of_one_is_identity(self):
        """Test that mu(1) is the identity"""
        assert mu_project(CliffordElement.scalar_element(4)).is_identity()


    def test_mu_of_plane_element(self):
        """Test that mu(e_1 e_2) == diag(-1, -1, 1, 1)"""
        assert mu_project(g_h(4, 1)) == SignedPermMatrix.diagonal([-1, -1, 1, 1])


    def test_mu_of_torus_element_doubles_angles(self):
        """Test that mu(x(t)) rotates by 2t"""
        x = TorusAngles(4, [Fraction(1, 4), Fraction(1, 2)])
        B = mu_project(torus_element(x))

        assert isinstance(B, SignedPermMatrix)
        assert rotation_angles(B) == [Fraction(1, 2), Fraction(1)]


    def test_mu_returns_dense_matrix(self):
        """Test that a product of two reflections with half-integer image comes back dense"""
        a = vector_element([1, 0, 0, 0])
        b = vector_element([Fraction(1, 2)] * 4)
        dense = mu_project(a * b)

        assert isinstance(dense, tuple)
        assert all(abs(float(entry)) == 0.5 for row in dense for entry in row)


    def test_mu_rejects_odd_elements(self):
        """Test that an odd element raises ValueError"""
        with pytest.raises(ValueError):
            mu_project(CliffordElement.monomial(3, [1]))


    def test_mu_rejects_non_unit(self):
        """Test that a non-unit even element raises ValueError"""
        with pytest.raises(ValueError):
            mu_project(CliffordElement.scalar_element(3, 2))


    def test_mu_is_homomorphism(self):
        """Test that mu(ab) == mu(a) mu(b) on lifts"""
        elements = list(spin_elements(3))
        rng = random.Random(5)
        for _ in range(30):
            A, B = rng.choice(elements), rng.choice(elements)
            a, b = lift_orthogonal(A), lift_orthogonal(B)
            assert mu_project(a * b) == mu_project(a) @ mu_project(b)


    def test_mu_kernel(self):
        """Test that mu(-g) == mu(g)"""
        g = lift_orthogonal(SignedPermMatrix([1, 0, 2], [1, -1, 1]))

        assert mu_project(-g) == mu_project(g)

    ### End of test mu_project ###


    ### Test lift_orthogonal ###
    def test_lift_of_identity(self):
        """Test that u(Id) == 1"""
        assert lift_orthogonal(SignedPermMatrix.identity(5)) == 1


    def test_lift_of_diagonal_pair(self):
        """Test that u(diag(-1, -1, 1)) == +-e_1 e_2"""
        u = lift_orthogonal(SignedPermMatrix.diagonal([-1, -1, 1]))

        assert u in (g_h(3, 1), -g_h(3, 1))


    def test_lift_of_swap_block(self):
        """Test that the swap of e_1, e_2 with one sign flip lifts into Spin(4)"""
        B = SignedPermMatrix([1, 0, 2, 3], [1, 1, -1, 1])
        u = lift_orthogonal(B)

        assert u.is_spin()
        assert mu_project(u) == B


    def test_lift_round_trip(self):
        """Test that mu(u(B)) == B for every signed permutation with det +1, n = 4"""
        for B in spin_elements(4):
            assert mu_project(lift_orthogonal(B)) == B


    def test_lift_is_deterministic(self):
        """Test that repeated lifts agree"""
        B = SignedPermMatrix([2, 0, 1, 3], [1, -1, -1, 1])

        assert lift_orthogonal(B) == lift_orthogonal(B)


    def test_lift_rejects_negative_determinant(self):
        """Test that det B = -1 raises ValueError"""
        with pytest.raises(ValueError):
            lift_orthogonal(SignedPermMatrix.diagonal([-1, 1, 1]))

    ### End of test lift_orthogonal ###


    def test_torus_angles_of_half_turn(self):
        """Test the torus element conjugate to the lift of diag(-1, -1, 1)"""
        B = SignedPermMatrix.diagonal([-1, -1, 1])
        x = torus_angles_of(lift_orthogonal(B), B)

        assert x == TorusAngles(3, [Fraction(1, 2)])


    def test_rotation_angles_rejects_reflection(self):
        """Test that rotation_angles raises ValueError for det -1"""
        with pytest.raises(ValueError):
            rotation_angles(SignedPermMatrix.diagonal([-1, 1, 1]))


class TestSpinCharacter:
    """Test suite for spin_character and clifford_trace"""

    ### Test closed values ###
    def test_identity_full_character(self):
        """Test that the identity has character 2^m"""
        assert spin_character(TorusAngles(7, [0, 0, 0]), "full") == 8


    def test_global_sign(self):
        """Test that -x has the negated character"""
        assert spin_character(TorusAngles(4, [0, 0], -1), "full") == -4


    def test_g_m_half_spin(self):
        """Test that chi_+-(g_m) == +-2^{m-1} i^m for n = 2m"""
        x = TorusAngles(4, [Fraction(1, 2), Fraction(1, 2)])

        assert spin_character(x, "plus") == -2
        assert spin_character(x, "minus") == 2


    def test_g_h_full_character_vanishes(self):
        """Test that chi(g_h) == 0 for h < m"""
        x = TorusAngles(6, [Fraction(1, 2), 0, 0])

        assert spin_character(x, "full") == 0


    def test_half_spin_needs_even_dimension(self):
        """Test that plus on n odd raises ValueError"""
        with pytest.raises(ValueError):
            spin_character(TorusAngles(3, [0]), "plus")


    def test_unknown_character_raises(self):
        """Test that an unknown character name raises ValueError"""
        with pytest.raises(ValueError):
            spin_character(TorusAngles(2, [0]), "half")

    ### End of test closed values ###


    ### Test consistency ###
    def test_full_is_sum_of_halves(self):
        """Test that chi == chi_+ + chi_- on random angles, exact and float"""
        rng = random.Random(2)
        for _ in range(100):
            m = rng.randint(1, 4)
            exact = TorusAngles(2 * m, [Fraction(rng.randrange(8), 4) for _ in range(m)])
            assert spin_character(exact, "full") == spin_character(exact, "plus") + spin_character(exact, "minus")
            floats = TorusAngles(2 * m, [Fraction(rng.randrange(1, 1000), 997) for _ in range(m)])
            total = complex(spin_character(floats, "plus")) + complex(spin_character(floats, "minus"))
            assert abs(complex(spin_character(floats, "full")) - total) < 1e-10


    def test_character_matches_clifford_trace(self):
        """Test that the character formulas agree with exact Clifford traces"""
        rng = random.Random(4)
        for _ in range(100):
            m = rng.randint(1, 4)
            x = TorusAngles(2 * m, [Fraction(rng.randrange(8), 4) for _ in range(m)], rng.choice((1, -1)))
            g = torus_element(x)
            for which in ("full", "plus", "minus"):
                assert clifford_trace(g, which) == spin_character(x, which)


    def test_trace_of_g_m(self):
        """Test that the half-spin traces of g_m are +-2^{m-1} i^m"""
        for m in range(1, 5):
            g = g_h(2 * m, m)
            expected = ComplexQSqrt2(2 ** (m - 1)) * ComplexQSqrt2(*((1, 0), (0, 1), (-1, 0), (0, -1))[m % 4])
            assert clifford_trace(g, "plus") == expected
            assert clifford_trace(g, "minus") == -expected


    def test_conjugacy_sign_for_generic_angles(self):
        """Test that flipping t_1 changes the half-spin characters for generic angles"""
        x = TorusAngles(5, [Fraction(1, 3), Fraction(1, 5)])
        y = x.flip_first()

        assert abs(complex(spin_character(x.restricted(), "plus"))
                   - complex(spin_character(y.restricted(), "plus"))) > 1e-6


    def test_conjugacy_sign_with_zero_angle(self):
        """Test that flipping t_1 leaves the characters unchanged when some t_j is in pi Z"""
        x = TorusAngles(5, [Fraction(1, 3), 0])
        y = x.flip_first()

        assert abs(complex(spin_character(x.restricted(), "plus"))
                   - complex(spin_character(y.restricted(), "plus"))) < 1e-12

    ### End of test consistency ###


class TestCliffordSigma:
    """Test suite for clifford_sigma"""

    def test_sigma_antisymmetry(self):
        """Test that sigma(-u, x) == -sigma(u, x) when the characters differ"""
        x = TorusAngles(3, [Fraction(1, 4)])
        lift = torus_element(x)
        rng = random.Random(9)
        for _ in range(50):
            u = (0, 0, Fraction(rng.randint(1, 5), 2))
            assert clifford_sigma([-c for c in u], x, lift) == -clifford_sigma(u, x, lift)


    def test_sigma_is_one_when_sines_vanish(self):
        """Test that sigma is 1 when some angle lies in pi Z"""
        x = TorusAngles(3, [0])

        assert clifford_sigma((0, 0, 1), x, torus_element(x)) == 1


    def test_sigma_needs_odd_dimension(self):
        """Test that n even raises ValueError"""
        x = TorusAngles(2, [Fraction(1, 4)])
        with pytest.raises(ValueError):
            clifford_sigma((0, 1), x, torus_element(x))


    def test_sigma_needs_nonzero_vector(self):
        """Test that u = 0 raises ValueError"""
        x = TorusAngles(3, [Fraction(1, 4)])
        with pytest.raises(ValueError):
            clifford_sigma((0, 0, 0), x, torus_element(x))
