import json

import pytest

from autqm.cli import main, parse_auto_chain, parse_word


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out.strip()
    records = [json.loads(line) for line in out.splitlines() if line]
    return code, records


def run_one(capsys, *argv):
    code, records = run_cli(capsys, *argv)
    assert code == 0, records
    assert len(records) == 1
    return records[0]


class TestWordCommands:
    def test_reduce(self, capsys):
        record = run_one(capsys, "word", "reduce", "abBA")
        assert record["value"] == ""
        record = run_one(capsys, "word", "reduce", "abA")
        assert record["value"] == "abA"

    def test_mul(self, capsys):
        assert run_one(capsys, "word", "mul", "ab", "BA")["value"] == ""

    def test_pow(self, capsys):
        assert run_one(capsys, "word", "pow", "ab", "3")["value"] == "ababab"

    def test_cyc(self, capsys):
        record = run_one(capsys, "word", "cyc", "abA")
        assert record == {"op": "word.cyc", "core": "b", "conjugator": "a"}

    def test_conj(self, capsys):
        assert run_one(capsys, "word", "conj", "ab", "ba")["value"] is True
        assert run_one(capsys, "word", "conj", "aa", "bb")["value"] is False

    def test_parse_error_exit_code(self, capsys):
        code, _ = run_cli(capsys, "word", "reduce", "a1b")
        assert code == 2


class TestAutoCommands:
    def test_apply_swap(self, capsys):
        record = run_one(
            capsys, "auto", "apply", "--auto", "swap(1,2)", "--word", "abAB"
        )
        assert record["value"] == "baBA"

    def test_autocomm_transvection(self, capsys):
        record = run_one(
            capsys, "auto", "autocomm", "--auto", "lt(1,2)", "--word", "b"
        )
        assert record["value"] == "a"

    def test_chain_application_order(self, capsys):
        # inv(1) first, then swap: a -> a^-1 -> b^-1.
        record = run_one(
            capsys, "auto", "apply", "--auto", "inv(1);swap(1,2)", "--word", "a"
        )
        assert record["value"] == "B"

    def test_achiral_search(self, capsys):
        record = run_one(capsys, "auto", "achiral", "--word", "abAB")
        assert record["found"] is True
        assert record["k"] == 1
        assert record["images"] == ["b", "a"]

    def test_ad(self, capsys):
        record = run_one(capsys, "auto", "ad", "--word", "a")
        assert record["images"] == ["a", "abA"]


class TestWhiteheadCommands:
    def test_min(self, capsys):
        record = run_one(capsys, "wh", "min", "--word", "abb")
        assert record["length"] == 1
        assert record["trace"]

    def test_primitive(self, capsys):
        assert run_one(capsys, "wh", "primitive", "--word", "ab")["value"] is True
        assert run_one(capsys, "wh", "primitive", "--word", "aa")["value"] is False

    def test_freefactor(self, capsys):
        assert run_one(capsys, "wh", "freefactor", "--word", "b")["value"] is True
        assert (
            run_one(capsys, "wh", "freefactor", "--word", "abAB")["value"] is False
        )

    def test_graph(self, capsys):
        record = run_one(capsys, "wh", "graph", "--word", "abAB")
        assert record["connected"] is True
        assert record["has_cut_vertex"] is False


class TestQmCommands:
    def test_brooks(self, capsys):
        assert run_one(
            capsys, "qm", "brooks", "--pattern", "ab", "--on", "abab"
        )["value"] == "2"

    def test_homog(self, capsys):
        assert run_one(
            capsys, "qm", "homog", "--pattern", "ab", "--on", "abAB"
        )["value"] == "1"

    def test_defect_exact(self, capsys):
        record = run_one(capsys, "qm", "defect", "--pattern", "ab", "--exact")
        assert record["value"] == "1"
        assert len(record["witness"]) == 2

    def test_average_vanishes(self, capsys):
        record = run_one(
            capsys, "qm", "average", "--pattern", "ab", "--on", "a", "--group", "signed"
        )
        assert record["value"] == "0"

    def test_product_average(self, capsys):
        record = run_one(
            capsys,
            "qm",
            "product-average",
            "--pattern",
            "ab",
            "-k",
            "2",
            "-n",
            "3",
            "--on",
            "abAB,abAB,abAB",
        )
        assert record["value"] == "2"

    def test_invariance_report(self, capsys):
        record = run_one(
            capsys,
            "qm",
            "invariance",
            "--pattern",
            "ab",
            "--auto",
            "swap(1,2)",
            "--samples",
            "abAB,a",
        )
        assert record["checked"] == 2
        assert len(record["violations"]) == 1

    def test_eval_round_trip(self, capsys, tmp_path):
        from autqm.quasimorphisms import brooks_homogeneous

        f = brooks_homogeneous(parse_word("ab"))
        spec = tmp_path / "qm.json"
        spec.write_text(json.dumps(f.provenance))
        record = run_one(
            capsys, "qm", "eval", "--spec", str(spec), "--on", "abAB"
        )
        assert record["value"] == "1"


class TestNormCommands:
    def test_bfs(self, capsys):
        record = run_one(
            capsys,
            "norm",
            "bfs",
            "--word",
            "abAB",
            "--gens",
            "a,b",
            "--group",
            "signed",
            "--cutoff",
            "6",
        )
        assert record["value"] == 4
        assert [f["word"] for f in record["witness"]]

    def test_acl_witness(self, capsys):
        record = run_one(capsys, "norm", "acl", "--word", "a")
        assert record["value"] == 1
        assert record["witness"][0]["auto"]["images"] == ["a", "ab"]
        assert record["witness"][0]["element"] == "b"

    def test_sacl(self, capsys):
        record = run_one(capsys, "norm", "sacl", "--word", "a", "--nmax", "4")
        assert record["upper"] == "1/4"
        assert len(record["trace"]) == 4

    def test_cl(self, capsys):
        record = run_one(
            capsys, "norm", "cl", "--word", "abAB", "--len-cap", "1"
        )
        assert record["value"] == 1

    def test_bound_and_bavard(self, capsys):
        record = run_one(
            capsys,
            "norm",
            "bound",
            "--word",
            "aab",
            "--gens",
            "a,b",
            "--pattern",
            "ab",
            "--group",
            "swap",
        )
        assert record["value"] == "1/24"
        record = run_one(
            capsys,
            "norm",
            "bavard",
            "--word",
            "aab",
            "--pattern",
            "ab",
            "--group",
            "swap",
        )
        assert record["value"] == "1/48"
        assert record["scope"] == "restricted-to-group"


GRAPH_TEXT = """\
vertices 5
label 0 0
label 1 0
label 2 0
label 3 0
label 4 0
edge 0 1
edge 0 2
edge 0 3
edge 0 4
edge 1 3
edge 1 4
edge 2 3
edge 2 4
"""


class TestGpCommands:
    @pytest.fixture
    def graph_file(self, tmp_path):
        path = tmp_path / "pipe.graph"
        path.write_text(GRAPH_TEXT)
        return str(path)

    @pytest.fixture
    def dihedral_file(self, tmp_path):
        path = tmp_path / "dihedral.graph"
        path.write_text("vertices 2\nlabel 0 2\nlabel 1 2\n")
        return str(path)

    def test_nf(self, capsys, graph_file):
        record = run_one(
            capsys, "gp", "nf", "--graph", graph_file, "--word", "1^1 0^1 1^-1"
        )
        assert record["value"] == "0^1"

    def test_mul(self, capsys, dihedral_file):
        record = run_one(
            capsys,
            "gp",
            "mul",
            "--graph",
            dihedral_file,
            "--left",
            "0^1 1^1 0^1",
            "--right",
            "0^1",
        )
        assert record["value"] == "0^1 1^1"

    def test_join(self, capsys, graph_file):
        record = run_one(capsys, "gp", "join", "--graph", graph_file)
        assert record["gamma0"] == [0]
        assert record["factors"] == [[1, 2], [3, 4]]
        assert record["iso_classes"] == [[0, 1]]

    def test_dinfty(self, capsys, dihedral_file):
        record = run_one(
            capsys, "gp", "dinfty", "--graph", dihedral_file, "--factor", "0,1"
        )
        assert record["value"] is True

    def test_classify(self, capsys, dihedral_file):
        record = run_one(capsys, "gp", "classify", "--graph", dihedral_file)
        assert record["virtually_abelian"] is True

    def test_project(self, capsys, graph_file):
        record = run_one(
            capsys, "gp", "project", "--graph", graph_file, "--word", "0^2 1^1 3^-1"
        )
        assert record["components"] == ["1^1", "3^-1"]

    def test_pipeline(self, capsys, graph_file):
        record = run_one(
            capsys,
            "gp",
            "pipeline",
            "--graph",
            graph_file,
            "--pattern",
            "ab",
            "-k",
            "2",
            "--on",
            "1^1 2^1 1^1 2^1",
        )
        assert record["value"] == "2"

    def test_graph_parse_error(self, capsys, tmp_path):
        path = tmp_path / "bad.graph"
        path.write_text("vertices 2\nlabel 0 1\n")
        code, _ = run_cli(capsys, "gp", "classify", "--graph", str(path))
        assert code == 2


class TestVerifyCommand:
    def test_vanishing_suite_passes(self, capsys):
        code, records = run_cli(capsys, "verify", "vanishing")
        assert code == 0
        assert [r["check"] for r in records] == [
            "single_autocommutator_witness",
            "achiral_power_vanishing",
            "free_factor_vanishing",
        ]
        assert all(r["passed"] for r in records)

    def test_determinism(self, capsys):
        main(["verify", "equivariance", "--seed", "7"])
        first = capsys.readouterr().out
        main(["verify", "equivariance", "--seed", "7"])
        second = capsys.readouterr().out
        assert first == second  # records are byte-identical; timing is on stderr

    def test_config_file_seed(self, capsys, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"seed": 3}))
        code, records = run_cli(
            capsys, "verify", "ad-identity", "--config", str(config)
        )
        assert code == 0
        assert records[0]["passed"]


class TestParsers:
    def test_parse_word_round_trip(self):
        w = parse_word("abBA")
        assert w.letters == ()

    def test_parse_chain_ad(self):
        phi = parse_auto_chain("ad(ab)", 2)
        assert phi.witness is not None

    def test_bad_chain(self):
        with pytest.raises(Exception):
            parse_auto_chain("frobnicate(1)", 2)
