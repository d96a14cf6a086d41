from pathlib import Path
from itertools import product
import json

import pytest

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.dirac_spectrum import HolonomyCharacter, SpectrumTable
from src.families import builtin_examples, z4_group
from src.spin_structures import torus_structure


def sign_character(group):
    """First nontrivial +-1 character given by generator values, or None."""
    for values in product((1, -1), repeat=len(group.generators)):
        if -1 not in values:
            continue
        try:
            return HolonomyCharacter.from_generator_values(group, values)
        except ValueError:
            continue
    return None


class TestHolonomyCharacter:
    """Test suite for the HolonomyCharacter class"""

    def test_trivial(self, remark35):
        """Test that the trivial character is d_rho on every coset"""
        rho = HolonomyCharacter.trivial(remark35, dimension=2)

        assert rho.values == (2, 2)


    def test_identity_value_must_match_dimension(self):
        """Test that chi(Id) != d_rho raises ValueError"""
        with pytest.raises(ValueError):
            HolonomyCharacter(2, [1, 1])


    def test_from_generator_values_z4(self):
        """Test that i on the generator of Z_4 gives the powers of i"""
        rho = HolonomyCharacter.from_generator_values(z4_group(), [1j])

        assert rho.values == (1, 1j, -1, -1j)


    def test_from_generator_values_inconsistent(self, m1):
        """Test that values violating the group law raise ValueError"""
        with pytest.raises(ValueError):
            HolonomyCharacter.from_generator_values(m1, [-1, -1, -1])


    def test_from_generator_values_wrong_length(self, remark35):
        """Test that a value count different from the generator count raises ValueError"""
        with pytest.raises(ValueError):
            HolonomyCharacter.from_generator_values(remark35, [1, -1])


    def test_from_file(self, tmp_path, remark35):
        """Test that both file layouts are read"""
        by_generator = tmp_path / "gen.json"
        by_generator.write_text(json.dumps({"generator_values": ["-1"]}))
        explicit = tmp_path / "values.json"
        explicit.write_text(json.dumps({"dimension": 1, "values": [1, -1]}))

        assert HolonomyCharacter.from_file(remark35, by_generator).values == (1, -1)
        assert HolonomyCharacter.from_file(remark35, explicit).values == (1, -1)


class TestDiracSpectrum:
    """Test suite for the DiracSpectrum class"""

    ### Test torus_spectrum ###
    def test_torus_trivial_structure(self, dirac):
        """Test the first shell and the harmonic spinors of the trivial 3-torus structure"""
        table = dirac.torus_spectrum(torus_structure(3, (1, 1, 1)), max_key=8)

        assert table.entries == {4: (6, 6), 8: (12, 12)}
        assert table.d0 == 2
        assert not table.asymmetric


    def test_torus_shifted_structure(self, dirac):
        """Test that delta = (1, 1, -1) moves the first eigenvalue to key 1"""
        table = dirac.torus_spectrum(torus_structure(3, (1, 1, -1)), max_key=5)

        assert table.entries == {1: (2, 2), 5: (8, 8)}
        assert table.d0 == 0


    def test_torus_chiral_harmonic(self, dirac):
        """Test that the even torus splits its harmonic spinors evenly"""
        table = dirac.torus_spectrum(torus_structure(4, (1, 1, 1, 1)), max_key=4)

        assert table.d0 == 4
        assert (table.d0_plus, table.d0_minus) == (2, 2)


    def test_torus_spectrum_needs_torus(self, dirac, solver, remark35):
        """Test that a group with holonomy raises ValueError"""
        eps = solver.enumerate_spin_structures(remark35)[0]
        with pytest.raises(ValueError):
            dirac.torus_spectrum(eps)

    ### End of test torus_spectrum ###


    ### Test z2k_spectrum ###
    def test_remark35_asymmetric_first_shell(self, dirac, solver, remark35):
        """Test that the first shell of the n = 3 group is fully asymmetric"""
        eps = solver.enumerate_spin_structures(remark35)[0]
        table = dirac.z2k_spectrum(remark35, eps, max_key=9)

        assert table.entries[1] in ((2, 0), (0, 2))
        assert table.entries[9] in ((6, 4), (4, 6))
        assert table.asymmetric
        assert table.d0 == 0


    def test_sigma_flips_asymmetry(self, dirac, solver, remark35):
        """Test that the two structures with delta = (1, 1, -1) have mirrored spectra"""
        plus, minus = solver.enumerate_spin_structures(remark35)[:2]
        first = dirac.z2k_spectrum(remark35, plus, max_key=30)
        second = dirac.z2k_spectrum(remark35, minus, max_key=30)

        assert first.entries == {k: (m, p) for k, (p, m) in second.entries.items()}


    def test_example44_asymmetry(self, dirac, solver, gamma44, gamma44_prime):
        """Test that Gamma is asymmetric at key 1 while Gamma' is not"""
        eps = solver.find_structure(gamma44, (1, 1, 1, 1, 1, 1, -1))
        eps_prime = solver.find_structure(gamma44_prime, (-1, 1, 1, 1, 1, 1, 1))
        table = dirac.z2k_spectrum(gamma44, eps, max_key=9)
        table_prime = dirac.z2k_spectrum(gamma44_prime, eps_prime, max_key=9)

        assert table.entries[1] in ((4, 0), (0, 4))
        assert table_prime.entries[1] == (2, 2)
        assert table.laplacian()[1] == table_prime.laplacian()[1]


    def test_z2k_needs_z2k(self, dirac, solver):
        """Test that Z_4 holonomy raises ValueError"""
        group = z4_group()
        eps = solver.enumerate_spin_structures(group)[0]
        with pytest.raises(ValueError):
            dirac.z2k_spectrum(group, eps)

    ### End of test z2k_spectrum ###


    ### Test general path ###
    def test_general_matches_z2k(self, dirac, solver, remark35):
        """Test that the general formula reproduces the Z_2^k formula"""
        for eps in solver.enumerate_spin_structures(remark35)[:4]:
            table = dirac.z2k_spectrum(remark35, eps, max_key=30)
            general = dirac.general_spectrum(remark35, eps, max_key=30)
            assert general.entries == table.entries


    def test_general_multiplicity_needs_positive_key(self, dirac, solver, remark35):
        """Test that key 0 raises ValueError"""
        eps = solver.enumerate_spin_structures(remark35)[0]
        with pytest.raises(ValueError):
            dirac.general_multiplicity(remark35, eps, None, 0)


    def test_eta_difference_even_dimension(self, dirac, solver, m1):
        """Test that d+ - d- vanishes for n even"""
        eps = solver.enumerate_spin_structures(m1)[0]

        assert dirac.eta_difference(m1, eps, None, 4) == 0


    def test_chiral_harmonic_needs_even_dimension(self, dirac, solver, remark35):
        """Test that chiral harmonic spinors raise ValueError for n odd"""
        eps = solver.enumerate_spin_structures(remark35)[0]
        with pytest.raises(ValueError):
            dirac.chiral_harmonic_spinors(remark35, eps)

    ### End of test general path ###


    ### Test oracle cross-check ###
    def test_cross_check_remark35(self, dirac, solver, remark35):
        """Test that every structure on the n = 3 group agrees with the oracle"""
        for eps in solver.enumerate_spin_structures(remark35):
            for key, formula, oracle in dirac.cross_check(remark35, eps, max_key=20):
                assert formula == oracle


    def test_cross_check_m1(self, dirac, solver, m1):
        """Test that M_1 agrees with the oracle on its first shells"""
        for eps in solver.enumerate_spin_structures(m1)[:4]:
            for key, formula, oracle in dirac.cross_check(m1, eps, max_key=12):
                assert formula == oracle


    def test_cross_check_z4(self, dirac, solver):
        """Test that the general path on Z_4 holonomy agrees with the oracle"""
        group = z4_group()
        for eps in solver.enumerate_spin_structures(group):
            for key, formula, oracle in dirac.cross_check(group, eps, max_key=16):
                assert formula == oracle


    def test_cross_check_twisted(self, dirac, solver, remark35):
        """Test that the sign character agrees with the oracle"""
        rho = HolonomyCharacter.from_generator_values(remark35, [-1])
        eps = solver.enumerate_spin_structures(remark35)[0]
        for key, formula, oracle in dirac.cross_check(remark35, eps, rho, max_key=20):
            assert formula == oracle


    def test_cross_check_registry(self, dirac, solver):
        """Test that every registry group up to n = 7 agrees with the oracle up to 4 mu^2 = 40"""
        for name, group in builtin_examples().items():
            if group.n > 7:
                continue
            characters = [HolonomyCharacter.trivial(group)]
            twisted = sign_character(group)
            if twisted is not None:
                characters.append(twisted)
            for eps in solver.enumerate_spin_structures(group):
                for rho in characters:
                    for key, formula, oracle in dirac.cross_check(group, eps, rho, max_key=40):
                        assert formula == oracle, (name, eps.delta, eps.sigma, rho.values, key)

    ### End of test oracle cross-check ###


    ### Test derived spectra ###
    def test_spinor_laplacian(self, dirac, solver, remark35):
        """Test that the spinor Laplacian adds the two signs"""
        eps = solver.enumerate_spin_structures(remark35)[0]

        assert dirac.spinor_laplacian_spectrum(remark35, eps, max_key=9) == {1: 2, 5: 8, 9: 10}


    def test_covering_torus(self, dirac, solver, remark35):
        """Test that the covering torus keeps the lattice character"""
        eps = solver.enumerate_spin_structures(remark35)[0]
        table = dirac.covering_torus_spectrum(remark35, eps, max_key=1)

        assert table.entries == {1: (2, 2)}


    def test_spectrum_dispatch(self, dirac, solver, torus3):
        """Test that a torus structure goes through the torus path"""
        eps = solver.enumerate_spin_structures(torus3)[0]

        assert dirac.spectrum(torus3, eps, max_key=4).entries == {4: (6, 6)}


    def test_table_json(self):
        """Test the JSON layout of a spectrum table"""
        table = SpectrumTable(n=3, entries={4: (2, 1)}, d0=2)

        assert table.to_json() == {
            "entries": [{"four_mu_sq": 4, "d_plus": 2, "d_minus": 1}],
            "d0": 2,
            "asymmetric": True,
        }

    ### End of test derived spectra ###
