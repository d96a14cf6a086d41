from fractions import Fraction
from pathlib import Path

import pandas as pd
import pytest

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.settings import Settings
from src.zp_manifolds import (
    ZpManifold, legendre, symmetric_terms, zp_eta, zp_eta_series, zp_harmonic, zp_table,
)


# published (eta_eps1, eta_eps2) for p = 3 mod 4 up to 503, trivial character
PUBLISHED_ETA = [
    (3, (Fraction(-2, 3), Fraction(4, 3))),
    (7, (-2, 0)), (11, (-2, 4)), (19, (-2, 4)), (23, (-6, 0)), (31, (-6, 0)),
    (43, (-2, 4)), (47, (-10, 0)), (59, (-6, 12)), (67, (-2, 4)), (71, (-14, 0)),
    (79, (-10, 0)), (83, (-6, 12)), (103, (-10, 0)), (107, (-6, 12)), (127, (-10, 0)),
    (131, (-10, 20)), (139, (-6, 12)), (151, (-14, 0)), (163, (-2, 4)), (167, (-22, 0)),
    (179, (-10, 20)), (191, (-26, 0)), (199, (-18, 0)), (211, (-6, 12)), (223, (-14, 0)),
    (227, (-10, 20)), (239, (-6, 12)), (251, (-30, 28)), (263, (-26, 0)), (271, (-22, 0)),
    (283, (-6, 12)), (307, (-6, 12)), (311, (-38, 0)), (331, (-6, 12)), (347, (-10, 20)),
    (359, (-38, 0)), (367, (-18, 0)), (379, (-6, 12)), (383, (-34, 0)), (419, (-18, 36)),
    (431, (-42, 0)), (439, (-30, 0)), (443, (-10, 20)), (463, (-14, 0)), (467, (-14, 28)),
    (479, (-50, 0)), (487, (-14, 0)), (491, (-18, 36)), (499, (-6, 12)), (503, (-42, 0)),
]


class TestZpManifold:
    """Test suite for ZpManifold and the Legendre symbol"""

    def test_legendre(self):
        """Test residues, non-residues and multiples of p"""
        assert legendre(2, 7) == 1
        assert legendre(3, 7) == -1
        assert legendre(14, 7) == 0
        assert legendre(-1, 11) == -1


    def test_legendre_needs_odd_prime(self):
        """Test that p = 2 and composite p raise ValueError"""
        with pytest.raises(ValueError):
            legendre(1, 2)
        with pytest.raises(ValueError):
            legendre(1, 15)


    def test_parameters(self):
        """Test r and m for p = 7"""
        manifold = ZpManifold(7)

        assert manifold.r == 1
        assert manifold.m == 3
        assert manifold.fixed_vector == (0, 0, 0, 0, 0, 0, 1)


    def test_prime_one_mod_four(self):
        """Test that p = 5 raises ValueError"""
        with pytest.raises(ValueError):
            ZpManifold(5)


    def test_spin_structures(self):
        """Test the torus angles and lattice shifts of the two structures"""
        manifold = ZpManifold(7)
        x1, shift1 = manifold.spin_structure(1)
        x2, shift2 = manifold.spin_structure(2)

        assert x1.angles == (Fraction(1, 7), Fraction(2, 7), Fraction(3, 7))
        assert x1.sign == 1
        assert x2.sign == -1
        assert shift1 == (0,) * 7
        assert shift2[-1] == Fraction(1, 2)


    def test_unknown_structure(self):
        """Test that h = 3 raises ValueError"""
        with pytest.raises(ValueError):
            ZpManifold(7).spin_structure(3)


class TestZpEta:
    """Test suite for the Z_p eta invariants"""

    ### Test zp_eta ###
    def test_known_values(self):
        """Test the eta invariants of both structures for sample primes"""
        expected = {
            3: (Fraction(-2, 3), Fraction(4, 3)),
            7: (-2, 0),
            43: (-2, 4),
            167: (-22, 0),
            251: (-14, 28),
            503: (-42, 0),
        }
        for p, values in expected.items():
            assert zp_eta(p) == values


    def test_extended_precision_agrees(self):
        """Test that mpmath sums round to the same values"""
        for p in (3, 43, 251):
            assert zp_eta(p, extended=True) == zp_eta(p)


    def test_character_scales(self):
        """Test that chi = -1 negates both invariants"""
        eta1, eta2 = zp_eta(43)

        assert zp_eta(43, chi=-1) == (-eta1, -eta2)


    def test_invalid_prime(self):
        """Test that p = 13 raises ValueError"""
        with pytest.raises(ValueError):
            zp_eta(13)

    ### End of test zp_eta ###


    ### Test eta series ###
    def test_series_at_zero_matches_invariant(self):
        """Test that the Hurwitz series at s = 0 reproduces the trigonometric sums"""
        for p in (7, 11, 19):
            eta1, eta2 = zp_eta(p)
            assert zp_eta_series(p, 1, 0.0) == pytest.approx(float(eta1), abs=1e-8)
            assert zp_eta_series(p, 2, 0.0) == pytest.approx(float(eta2), abs=1e-8)


    def test_series_pole(self):
        """Test that s = 1 raises ValueError"""
        with pytest.raises(ValueError):
            zp_eta_series(7, 1, 1.0)


    def test_symmetric_terms(self):
        """Test that the k and p - k terms coincide at s = 0"""
        terms = symmetric_terms(11)

        assert list(terms.columns) == ["k", "eps1_k", "eps1_p_minus_k", "eps2_k", "eps2_p_minus_k"]
        assert len(terms) == 5
        assert terms["eps1_k"].to_list() == pytest.approx(terms["eps1_p_minus_k"].to_list(), abs=1e-9)
        assert terms["eps2_k"].to_list() == pytest.approx(terms["eps2_p_minus_k"].to_list(), abs=1e-9)

    ### End of test eta series ###


class TestZpHarmonic:
    """Test suite for the Z_p harmonic spinor counts"""

    def test_known_values(self):
        """Test d_0 of the first structure for every p <= 71"""
        expected = {3: 0, 7: 2, 11: 2, 19: 26, 23: 90, 31: 1058, 43: 48770, 47: 178482,
                    59: 9099506, 67: 128207978, 71: 483939978}
        for p, d0 in expected.items():
            assert zp_harmonic(p) == d0


    def test_second_structure(self):
        """Test that the second structure has no harmonic spinors"""
        assert zp_harmonic(43, 2) == 0


    def test_float_limit(self):
        """Test that p > 71 needs extended precision"""
        with pytest.raises(ValueError):
            zp_harmonic(79)


    def test_extended_agrees(self):
        """Test that mpmath reproduces the double precision count"""
        assert zp_harmonic(71, extended=True) == 483939978


class TestZpTable:
    """Test suite for zp_table"""

    def test_row_count(self):
        """Test that 51 primes p = 3 mod 4 lie below 503"""
        table = zp_table(503)

        assert len(table) == 51
        assert table["p"].iloc[-1] == 503


    def test_published_values(self):
        """Test every row up to 503 against the published eta values"""
        table = zp_table(503)
        computed = dict(zip(table["p"].to_list(), zip(table["eta_eps1"], table["eta_eps2"])))
        expected = dict(PUBLISHED_ETA)
        # printed as (-30, 28); h(-251) = 7 forces eta_eps1 = -2h = -14
        expected[251] = (Fraction(-14), Fraction(28))

        assert list(computed) == list(expected)
        assert computed == {p: (str(e1), str(e2)) for p, (e1, e2) in expected.items()}


    def test_class_number_pattern(self):
        """Test that eta_eps1 = -2h(-p) and eta_eps2 = 4h(-p) for p = 3 mod 8"""
        for p in (131, 251, 467):
            class_number = -sum(k * legendre(k, p) for k in range(1, p)) // p
            eta1, eta2 = zp_eta(p)

            assert eta1 == -2 * class_number
            assert eta2 == 4 * class_number


    def test_columns_and_values(self):
        """Test the layout and the first rows"""
        table = zp_table(11)
        expected = pd.DataFrame({
            "r": [0, 1, 2],
            "p": [3, 7, 11],
            "eta_eps1": ["-2/3", "-2", str(zp_eta(11)[0])],
            "eta_eps2": ["4/3", "0", str(zp_eta(11)[1])],
            "d0_eps1": pd.array([0, 2, 2], dtype="Int64"),
        })

        pd.testing.assert_frame_equal(table, expected)


    def test_missing_counts_beyond_float_limit(self):
        """Test that d_0 is missing beyond p = 71 in double precision"""
        table = zp_table(83)

        assert table.loc[table["p"] == 79, "d0_eps1"].isna().all()
        assert table.loc[table["p"] == 71, "d0_eps1"].iloc[0] == 483939978


    def test_threads_do_not_change_result(self):
        """Test that a thread pool gives the same table"""
        pd.testing.assert_frame_equal(zp_table(60, Settings(threads=4)), zp_table(60))
