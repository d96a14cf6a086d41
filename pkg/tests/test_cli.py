from pathlib import Path
import json

import pytest

import sys
sys.path.insert(0, str(Path(__file__).parent.parent))

from flatdirac import build_parser, main, select_structure
from src.families import remark35_group


class TestCommandLine:
    """Test suite for the flatdirac command line"""

    ### Test subcommands ###
    def test_describe_torus(self, capsys):
        """Test the describe output for the 3-torus"""
        assert main(["describe", "--group", "torus:3"]) == 0
        payload = json.loads(capsys.readouterr().out)

        assert payload["n"] == 3
        assert payload["order"] == 1
        assert payload["spin_structures"] == 8
        assert payload["trivial_type"] == 1
        assert payload["betti"] == [1, 3, 3, 1]
        assert len(payload["rows"]) == 1


    def test_spin_list_csv(self, capsys):
        """Test the CSV listing of spin structures"""
        assert main(["spin-list", "--group", "remark3.5", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()

        assert lines[0] == "index,delta,sigma,trivial_type"
        assert len(lines) == 9
        assert lines[1] == "0,1 1 -1,1,False"


    def test_dirac_spec(self, capsys):
        """Test that the Dirac spectrum of the n = 3 group is reported as asymmetric"""
        assert main(["dirac-spec", "--group", "remark3.5", "--max-4mu2", "9", "--delta", "1,1,-1", "--sigma", "1"]) == 0
        payload = json.loads(capsys.readouterr().out)

        assert payload["delta"] == [1, 1, -1]
        assert payload["asymmetric"] is True
        assert payload["d0"] == 0
        assert [row["four_mu_sq"] for row in payload["rows"]] == [1, 5, 9]


    def test_eta_zp(self, capsys):
        """Test the eta invariant and harmonic spinors of the Z_7-manifold"""
        assert main(["eta", "--p", "7"]) == 0
        payload = json.loads(capsys.readouterr().out)

        assert payload["p"] == 7
        assert payload["eta0"] == "-2"
        assert payload["d0"] == 2


    def test_eta_needs_group_or_prime(self, capsys):
        """Test that eta without --group or --p fails with exit code 1"""
        assert main(["eta"]) == 1
        error = json.loads(capsys.readouterr().err)

        assert error["error"] == "ValueError"


    def test_hodge_spec(self, capsys):
        """Test the 1-form spectrum of the 3-torus"""
        assert main(["hodge-spec", "--group", "torus:3", "--p", "1", "--max-4mu2", "4"]) == 0
        payload = json.loads(capsys.readouterr().out)

        assert payload["rows"] == [{"four_mu_sq": 0, "multiplicity": 3}, {"four_mu_sq": 4, "multiplicity": 18}]


    def test_compare_functions(self, capsys):
        """Test that the M_{j,h} pair in dimension 6 differs on functions"""
        assert main(["compare", "--group", "mjh:6:0:4", "--other", "mjh:6:1:3", "--kinds", "functions",
                     "--max-4mu2", "8"]) == 0
        payload = json.loads(capsys.readouterr().out)

        assert payload["rows"][0]["kind"] == "functions"
        assert payload["rows"][0]["equal"] is False
        assert payload["rows"][0]["certificate"] == "4"


    def test_zp_table_csv(self, capsys):
        """Test the CSV layout of the Z_p table"""
        assert main(["zp-table", "--pmax", "11", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()

        assert lines[0] == "r,p,eta_eps1,eta_eps2,d0_eps1"
        assert lines[1] == "0,3,-2/3,4/3,0"
        assert len(lines) == 4


    def test_families(self, capsys):
        """Test the Z_2 family listing in dimension 3"""
        assert main(["families", "--n", "3"]) == 0
        payload = json.loads(capsys.readouterr().out)

        assert [row["name"] for row in payload["rows"]] == ["mjh:3:0:1", "mjh:3:0:2", "mjh:3:1:0"]


    def test_oracle_check(self, capsys):
        """Test that the oracle agrees with the formulas on the n = 3 group"""
        assert main(["oracle-check", "--group", "remark3.5", "--max-4mu2", "9"]) == 0
        payload = json.loads(capsys.readouterr().out)

        assert payload["mismatches"] == 0
        assert all(row["match"] for row in payload["rows"])

    ### End of test subcommands ###


    ### Test errors and output ###
    def test_unknown_group(self, capsys):
        """Test that an unknown group exits with code 1 and a JSON error"""
        assert main(["describe", "--group", "nonsense"]) == 1
        error = json.loads(capsys.readouterr().err)

        assert error["error"] == "ValueError"
        assert "unknown group" in error["message"]


    def test_usage_error(self):
        """Test that a missing subcommand exits with code 2"""
        with pytest.raises(SystemExit) as excinfo:
            main([])

        assert excinfo.value.code == 2


    def test_out_file(self, tmp_path, capsys):
        """Test that --out writes the report instead of printing it"""
        fname = tmp_path / "describe.md"

        assert main(["describe", "--group", "torus:2", "--format", "md", "--out", str(fname)]) == 0
        assert capsys.readouterr().out == ""
        assert fname.read_text().startswith("**name**: torus:2")


    def test_parser_subcommands(self):
        """Test that every subcommand is registered"""
        args = build_parser().parse_args(["table1", "--max-4mu2", "20"])

        assert args.command == "table1"
        assert args.max_4mu2 == 20

    ### End of test errors and output ###


    ### Test select_structure ###
    def test_select_by_index(self):
        """Test that the listing index picks a structure"""
        eps = select_structure(remark35_group(), spin="1")

        assert eps.delta == (1, 1, -1)
        assert eps.sigma == (-1,)


    def test_select_by_eta_sign(self):
        """Test that plus and minus pick structures with opposite eta(0)"""
        group = remark35_group()
        plus = select_structure(group, spin="plus")
        minus = select_structure(group, spin="minus")

        assert plus.delta == minus.delta == (1, 1, -1)
        assert plus.sigma != minus.sigma


    def test_select_index_out_of_range(self):
        """Test that an index past the listing raises ValueError"""
        with pytest.raises(ValueError, match="spin index"):
            select_structure(remark35_group(), spin="8")

    ### End of test select_structure ###
