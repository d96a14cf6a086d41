from fractions import Fraction
from pathlib import Path

import pytest

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.quadratic_field import (
    ComplexQSqrt2, PhaseSum, QSqrt2, add_number, exact_phase, i_power, mul_number, to_integer,
)


class TestQSqrt2:
    """Test suite for the QSqrt2 field element"""

    ### Test arithmetic ###
    def test_sqrt2_squared_is_two(self):
        """Test that (sqrt 2)^2 == 2 exactly"""
        root = QSqrt2(0, 1)

        assert root * root == 2


    def test_inverse_round_trip(self):
        """Test that x * x^-1 == 1 for a non-rational element"""
        x = QSqrt2(Fraction(3, 2), -2)

        assert x * x.inverse() == 1


    def test_inverse_of_zero_raises(self):
        """Test that inverting zero raises ZeroDivisionError"""
        with pytest.raises(ZeroDivisionError):
            QSqrt2(0).inverse()


    def test_power_matches_repeated_product(self):
        """Test that integer powers agree with repeated multiplication"""
        x = QSqrt2(1, 1)

        assert x ** 3 == x * x * x
        assert x ** -1 == x.inverse()

    ### End of test arithmetic ###


    ### Test ordering ###
    def test_sign_with_mixed_signs(self):
        """Test that the sign is exact when a and b have opposite signs"""
        assert QSqrt2(3, -2).sign() == 1
        assert QSqrt2(1, -1).sign() == -1
        assert QSqrt2(0).sign() == 0


    def test_ordering(self):
        """Test that comparisons follow the real embedding"""
        assert QSqrt2(0, 1) < QSqrt2(Fraction(3, 2))
        assert QSqrt2(0, 1) > 1

    ### End of test ordering ###


    def test_float_conversion(self):
        """Test that float() evaluates a + b*sqrt(2)"""
        assert float(QSqrt2(1, 1)) == pytest.approx(1 + 2 ** 0.5)


    def test_str_formats(self):
        """Test that str() shows rational and irrational parts"""
        assert str(QSqrt2(2)) == "2"
        assert str(QSqrt2(0, Fraction(1, 2))) == "1/2*sqrt2"
        assert str(QSqrt2(1, -1)) == "1-1*sqrt2"


class TestComplexQSqrt2:
    """Test suite for the ComplexQSqrt2 element and phase helpers"""

    def test_i_squared(self):
        """Test that i * i == -1"""
        assert i_power(1) * i_power(1) == -1
        assert i_power(4) == 1


    def test_conjugate(self):
        """Test that z * conj(z) is real"""
        z = ComplexQSqrt2(1, QSqrt2(0, 1))

        assert (z * z.conjugate()).is_real()
        assert z * z.conjugate() == 3


    ### Test exact_phase ###
    def test_exact_phase_quarter(self):
        """Test that exp(-2 pi i / 4) == -i"""
        assert exact_phase(Fraction(1, 4)) == ComplexQSqrt2(0, -1)


    def test_exact_phase_eighth(self):
        """Test that exp(-2 pi i / 8) == (1 - i)/sqrt 2"""
        half_root = QSqrt2(0, Fraction(1, 2))

        assert exact_phase(Fraction(1, 8)) == ComplexQSqrt2(half_root, -half_root)


    def test_exact_phase_rejects_other_denominators(self):
        """Test that phases outside (1/8)Z are not evaluated exactly"""
        assert exact_phase(Fraction(1, 3)) is None

    ### End of test exact_phase ###


    def test_phase_sum_mixed_flags_inexact(self):
        """Test that a phase outside (1/8)Z makes the sum inexact"""
        total = PhaseSum.from_counter({Fraction(0): 2, Fraction(1, 2): 1})
        assert total.is_exact
        assert total.value() == 1

        total.add(Fraction(1, 3))
        assert not total.is_exact
        assert complex(total).real == pytest.approx(0.5)


class TestNumberHelpers:
    """Test suite for the mixed exact/float number helpers"""

    def test_mul_number_stays_exact(self):
        """Test that exact factors give an exact product"""
        assert mul_number(2, QSqrt2(0, 1)) == ComplexQSqrt2(QSqrt2(0, 2))


    def test_add_number_falls_back_to_complex(self):
        """Test that a float summand gives a complex result"""
        result = add_number(QSqrt2(1), 0.5j)

        assert isinstance(result, complex)
        assert result == pytest.approx(1 + 0.5j)


    ### Test to_integer ###
    def test_to_integer_exact(self):
        """Test that exact integers are returned unchanged"""
        assert to_integer(ComplexQSqrt2(4)) == 4
        assert to_integer(Fraction(6, 3)) == 2


    def test_to_integer_rejects_fraction(self):
        """Test that a non-integral exact value raises RuntimeError"""
        with pytest.raises(RuntimeError):
            to_integer(Fraction(1, 2))


    def test_to_integer_rejects_irrational(self):
        """Test that an irrational exact value raises RuntimeError"""
        with pytest.raises(RuntimeError):
            to_integer(QSqrt2(1, 1))


    def test_to_integer_float_tolerance(self):
        """Test that float inputs are rounded within the tolerance"""
        assert to_integer(2.9999999999 + 1e-12j) == 3
        with pytest.raises(RuntimeError):
            to_integer(2.9, tolerance=1e-3)

    ### End of test to_integer ###
