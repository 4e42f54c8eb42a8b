import json

import pytest

from traceforms.cli import main
from traceforms.forms import dumps, to_text
from traceforms.generators import sigma


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


@pytest.fixture
def form_file(tmp_path):
    def write(text, name="form.txt"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write


class TestGen:
    @pytest.mark.parametrize(
        "label, expected",
        [("tau:1", "x[1,1] + x[2,2]"), ("omega:0", "dx[1,1] + dx[2,2]"), ("omega:0,0", "0")],
    )
    def test_examples(self, capsys, label, expected):
        assert run(capsys, "gen", "--n", "2", label)[:2] == (0, expected)

    def test_structured(self, capsys):
        code, out, _ = run(capsys, "--format", "structured", "gen", "--n", "1", "tau:2")
        assert code == 0
        assert json.loads(out) == {"n": 1, "terms": [{"c": "1", "x": [[1, 1, 2]], "dx": []}]}

    def test_malformed(self, capsys):
        code, _, err = run(capsys, "gen", "--n", "2", "tau:1*omeg:2")
        assert code == 2 and "omeg:2" in err


class TestPerm:
    def test_factor(self, capsys):
        code, out, _ = run(capsys, "--format", "structured", "perm", "--n", "2", "--p", "2", "--q", "1", "2 3 1", "--mode", "factor")
        assert code == 0
        assert json.loads(out) == {"sign": 1, "factors": ["omega:2"], "count": 1, "zero": False}
        code, out, _ = run(capsys, "perm", "--n", "2", "--p", "2", "--q", "0", "1 2", "--mode", "factor")
        assert out == "sign: +1\nfactors: tau:1*tau:1\ncount: 2"

    def test_evaluate(self, capsys):
        assert run(capsys, "perm", "--n", "2", "--p", "0", "--q", "2", "2 1", "--mode", "evaluate")[:2] == (0, "0")

    def test_malformed(self, capsys):
        assert run(capsys, "perm", "--p", "1", "--q", "1", "1 1")[0] == 2
        assert run(capsys, "perm", "--p", "1", "--q", "1", "1 2 3")[0] == 2


class TestDim:
    @pytest.mark.parametrize(
        "args, expected",
        [
            (["--n", "2", "--p", "2", "--q", "0", "--method", "both"], {"span": 2, "kernel": 2, "equal": True}),
            (["--n", "1", "--p", "2", "--q", "0", "--method", "span"], {"span": 1}),
            (["--n", "2", "--p", "0", "--q", "3", "--method", "both"], {"span": 1, "kernel": 1, "equal": True}),
        ],
    )
    def test_examples(self, capsys, args, expected):
        code, out, _ = run(capsys, "--format", "structured", "dim", *args)
        assert code == 0 and json.loads(out) == expected

    def test_cap(self, capsys):
        code, _, err = run(capsys, "dim", "--n", "2", "--p", "5", "--q", "5")
        assert code == 2 and "max_degree" in err
        code, _, err = run(capsys, "dim", "--n", "5", "--p", "1", "--q", "0")
        assert code == 2 and "max_n" in err

    def test_caps_override(self, capsys, monkeypatch):
        monkeypatch.setenv("TRACEFORMS_CAPS", "max_n=4")
        code, out, _ = run(capsys, "dim", "--n", "4", "--p", "1", "--q", "0", "--method", "kernel")
        assert code == 0 and out == "kernel: 1"
        code, _, _ = run(capsys, "--caps", "max_n=3", "dim", "--n", "4", "--p", "1", "--q", "0")
        assert code == 2


class TestDecompose:
    def test_sigma2(self, capsys, form_file):
        code, out, _ = run(capsys, "decompose", form_file(to_text(sigma(2, 2))), "--n", "2")
        assert code == 0
        assert out == "tau:1*tau:1: 1/2\ntau:2: -1/2"

    def test_structured_input(self, capsys, form_file):
        path = form_file(dumps(sigma(2, 2)), "form.json")
        code, out, _ = run(capsys, "--format", "structured", "decompose", path)
        record = json.loads(out)
        assert record["coefficients"] == {"tau:1*tau:1": "1/2", "tau:2": "-1/2"}
        assert record["bidegree"] == [2, 0]

    def test_non_invariant(self, capsys, form_file):
        code, out, _ = run(capsys, "decompose", form_file("x[1,1]"), "--n", "2")
        assert code == 0 and out == "non-invariant: witness E[1,2]"

    def test_zero(self, capsys, form_file):
        code, out, _ = run(capsys, "decompose", form_file("0"), "--n", "2")
        assert code == 0 and out == "all coefficients zero"
        code, out, _ = run(capsys, "decompose", form_file("0"), "--n", "2", "--p", "2", "--q", "0")
        assert out == "tau:1*tau:1: 0\ntau:2: 0"

    def test_errors(self, capsys, form_file):
        assert run(capsys, "decompose", form_file("x[1,1] + dx[1,1]"), "--n", "2")[0] == 2
        assert run(capsys, "decompose", form_file("x[1,1] +"), "--n", "2")[0] == 2
        assert run(capsys, "decompose", "/nonexistent/form", "--n", "2")[0] == 2

    def test_gen_roundtrip(self, capsys, form_file):
        for label in ["tau:3", "omega:0,1", "omega:0,0,0", "omega:1,2"]:
            _, text, _ = run(capsys, "gen", "--n", "2", label)
            code, out, _ = run(capsys, "--format", "structured", "decompose", form_file(text), "--n", "2")
            coeffs = json.loads(out)["coefficients"]
            if text != "0":
                assert coeffs[label] == "1"
                assert all(v == "0" for k, v in coeffs.items() if k != label)


class TestOtherCommands:
    def test_check_invariance(self, capsys, form_file, tmp_path):
        code, out, _ = run(capsys, "check-invariance", form_file("x[1,1] + x[2,2]"), "--n", "2")
        assert code == 0 and out.startswith("invariant: true")
        assert out.count("fixed") == 2
        g = tmp_path / "g.json"
        g.write_text('{"n": 2, "rows": [["3", "1/2"], ["1", "1"]]}')
        code, out, _ = run(capsys, "--format", "structured", "check-invariance", form_file("x[1,2]"), "--n", "2", "--g", str(g))
        record = json.loads(out)
        assert record["invariant"] is False and record["witness"] == "E[1,1]"
        assert len(record["pullback"]) == 3

    def test_newton(self, capsys):
        code, out, _ = run(capsys, "newton", "--n", "3")
        assert code == 0 and out == "k=1: 0\nk=2: 0\nk=3: 0"

    def test_verify(self, capsys):
        code, out, _ = run(capsys, "verify", "--n", "1", "--max", "3")
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 10 and all(line.endswith("PASS") for line in lines)
        assert "n=1 p=1 q=1 generators=1 schurweyl=1 kernel=1 PASS" in lines

    def test_verify_cap(self, capsys):
        code, _, err = run(capsys, "verify", "--n", "2", "--max", "99")
        assert code == 2 and "max_degree" in err

    def test_perm_factor_count_matches_cycles(self, capsys):
        from traceforms.perm import cycle_decomposition, enumerate_symmetric_group

        for rho in enumerate_symmetric_group(4):
            _, out, _ = run(capsys, "--format", "structured", "perm", "--p", "2", "--q", "2", str(rho), "--mode", "factor")
            assert json.loads(out)["count"] == len(cycle_decomposition(rho))
