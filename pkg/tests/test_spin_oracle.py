from pathlib import Path

import numpy as np
import pytest

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.clifford import SignedPermMatrix, TorusAngles, lift_orthogonal, torus_angles_of
from src.dirac_spectrum import HolonomyCharacter
from src.settings import Settings
from src.spin_oracle import SpinOracle, build_spin_rep
from src.spin_structures import torus_structure


class TestSpinRep:
    """Test suite for the explicit spin representation"""

    def test_relations_hold(self):
        """Test that the Clifford relations hold for 2 <= n <= 8"""
        for n in range(2, 9):
            rep = build_spin_rep(n)
            assert rep.dim == 2 ** (n // 2)
            assert len(rep.gens) == n


    def test_out_of_range(self):
        """Test that n outside [2, max_dim] raises ValueError"""
        with pytest.raises(ValueError):
            build_spin_rep(1)
        with pytest.raises(ValueError):
            build_spin_rep(9)


    def test_u_projector_splits_in_half(self):
        """Test that S_u^+ and S_u^- have equal dimension"""
        rep = build_spin_rep(5)
        plus = rep.u_projector((1, 2, 0, 0, 1), "plus")
        minus = rep.u_projector((1, 2, 0, 0, 1), "minus")

        assert np.trace(plus).real == pytest.approx(2)
        assert np.allclose(plus + minus, np.eye(4))
        assert np.allclose(plus @ plus, plus)


    def test_u_projector_needs_nonzero_vector(self):
        """Test that u = 0 raises ValueError"""
        with pytest.raises(ValueError):
            build_spin_rep(3).u_projector((0, 0, 0), "plus")


    def test_half_projector_needs_even_dimension(self):
        """Test that the chirality split raises ValueError for n odd"""
        with pytest.raises(ValueError):
            build_spin_rep(3).half_projector("plus")


class TestSpinOracle:
    """Test suite for the SpinOracle class"""

    ### Test brute_multiplicity ###
    def test_torus_shell(self, oracle):
        """Test that the 3-torus has multiplicity 6 on the first shell"""
        eps = torus_structure(3, (1, 1, 1))
        rho = HolonomyCharacter.trivial(eps.group)

        assert oracle.brute_multiplicity(eps.group, eps, rho, 4) == (6, 6)


    def test_shifted_torus_shell(self, oracle):
        """Test that delta = (1, 1, -1) gives multiplicity 2 at key 1"""
        eps = torus_structure(3, (1, 1, -1))
        rho = HolonomyCharacter.trivial(eps.group)

        assert oracle.brute_multiplicity(eps.group, eps, rho, 1) == (2, 2)
        assert oracle.brute_multiplicity(eps.group, eps, rho, 4) == (0, 0)


    def test_brute_spectrum_matches_projector_traces(self, oracle, solver, remark35):
        """Test that the shell-wide trace formula matches explicit projectors onto S_u"""
        rep = oracle.rep(3)
        rho = HolonomyCharacter.trivial(remark35)
        for eps in solver.enumerate_spin_structures(remark35):
            spectrum = oracle.brute_spectrum(remark35, eps, rho, [1, 4, 5, 9])
            for key, pair in spectrum.items():
                totals = []
                for which in ("plus", "minus"):
                    total = 0j
                    for g, coset in enumerate(remark35.cosets):
                        lift = rep.element(eps.coset_lifts[g])
                        for u in oracle.enumerator.fixed_vectors(eps.delta, coset, key):
                            phase = np.exp(-2j * np.pi * float(sum(a * t for a, t in zip(u, coset.translation))))
                            total += phase * rep.trace(lift @ rep.u_projector(u, which))
                    totals.append(round((total / remark35.order).real))
                assert pair == tuple(totals)


    def test_non_positive_key(self, oracle):
        """Test that key 0 raises ValueError"""
        eps = torus_structure(3, (1, 1, 1))
        with pytest.raises(ValueError):
            oracle.brute_multiplicity(eps.group, eps, HolonomyCharacter.trivial(eps.group), 0)


    def test_dimension_limit(self):
        """Test that the oracle refuses dimensions above its limit"""
        oracle = SpinOracle(Settings(oracle_max_dim=4))
        with pytest.raises(ValueError):
            oracle.rep(5)

    ### End of test brute_multiplicity ###


    ### Test brute_harmonic ###
    def test_harmonic_trivial_type(self, oracle):
        """Test that the trivial structure on the torus has 2^m harmonic spinors"""
        eps = torus_structure(4, (1, 1, 1, 1))

        assert oracle.brute_harmonic(eps.group, eps, HolonomyCharacter.trivial(eps.group)) == 4


    def test_harmonic_non_trivial_type(self, oracle):
        """Test that a non-trivial delta has no harmonic spinors"""
        eps = torus_structure(3, (-1, 1, 1))

        assert oracle.brute_harmonic(eps.group, eps, HolonomyCharacter.trivial(eps.group)) == 0


    def test_harmonic_on_quotient(self, oracle, solver, dirac, m1):
        """Test that the trivial-type structures of M_1 match the exact count"""
        rho = HolonomyCharacter.trivial(m1)
        for eps in solver.enumerate_spin_structures(m1, trivial_type_only=True):
            assert oracle.brute_harmonic(m1, eps, rho) == dirac.harmonic_spinors(m1, eps, rho)

    ### End of test brute_harmonic ###


    ### Test sigma signs ###
    def test_sigma_needs_odd_dimension(self, oracle):
        """Test that sigma signs raise ValueError for n even"""
        B = SignedPermMatrix.diagonal([-1, -1, 1, 1])
        with pytest.raises(ValueError):
            oracle.sigma_sign((0, 0, 1, 0), TorusAngles(4, [1, 0]), lift_orthogonal(B))


    def test_sigma_is_one_for_equal_characters(self, oracle):
        """Test that sigma is +1 when the half-spin characters coincide"""
        B = SignedPermMatrix.identity(3)

        assert oracle.sigma_sign((0, 0, 1), TorusAngles(3, [0]), lift_orthogonal(B)) == 1


    def test_sigma_flips_with_u(self, oracle):
        """Test that sigma(-u, x) = -sigma(u, x) for a half turn"""
        B = SignedPermMatrix.diagonal([-1, -1, 1])
        lift = lift_orthogonal(B)
        x = torus_angles_of(lift, B)

        assert oracle.sigma_sign((0, 0, 1), x, lift) == -oracle.sigma_sign((0, 0, -1), x, lift)


    def test_sigma_torus_model_antisymmetric(self, oracle):
        """Test that the float torus model is antisymmetric in u"""
        B = SignedPermMatrix.diagonal([-1, -1, 1])
        lift = lift_orthogonal(B)
        x = torus_angles_of(lift, B)

        assert oracle.sigma_sign_torus((0, 0, 1), x) in (1, -1)
        assert oracle.sigma_sign_torus((0, 0, 1), x) == -oracle.sigma_sign_torus((0, 0, -1), x)

    ### End of test sigma signs ###
