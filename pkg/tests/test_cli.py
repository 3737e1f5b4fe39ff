import json
import shutil
import subprocess

import pytest

from orisogeny.cli import EXIT_FAIL, EXIT_NEGATIVE, EXIT_OK, main
from orisogeny.construct import quaternion_basis
from orisogeny.curve import Curve, torsion_basis
from orisogeny.isogeny import IsogenyChain, ScalarStep, VeluStep


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


class TestDivide:
    def test_scalar_two(self, capsys, tmp_path):
        E = Curve(419, (1, 0))
        path = write(tmp_path, "phi.json", IsogenyChain([ScalarStep(E, 2)], E).to_json())
        code, out = run(capsys, "divide", "--in", path, "--n", 2)
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["result"] == "divided" and doc["degree"] == 1

    def test_not_divisible(self, capsys, tmp_path):
        E = Curve(419, (1, 0))
        K = torsion_basis(E, 3).P
        path = write(tmp_path, "phi.json", IsogenyChain([VeluStep(E, K, 3)], E).to_json())
        code, out = run(capsys, "divide", "--in", path, "--n", 2)
        assert code == EXIT_NEGATIVE
        assert json.loads(out)["result"] == "not_divisible"

    def test_demo(self, capsys):
        code, out = run(capsys, "divide", "--demo", "--n", 3, "--p", 79)
        assert code == EXIT_OK
        assert json.loads(out)["verified"] is True

    def test_malformed_input(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, out = run(capsys, "divide", "--in", path, "--n", 2)
        assert code == EXIT_FAIL
        assert json.loads(out)["result"] == "error"

    def test_divide_general(self, capsys, tmp_path):
        E, i, _, _ = quaternion_basis(419)
        two = IsogenyChain([ScalarStep(E, 2)], E)
        phi = IsogenyChain(i.steps + two.steps, E)
        path = write(tmp_path, "pair.json", {"phi": phi.to_json(), "eta": two.to_json()})
        code, out = run(capsys, "divide-general", "--in", path)
        assert code == EXIT_OK
        assert json.loads(out)["degree"] == 1


class TestOrientedCommands:
    def test_classgroup(self, capsys):
        code, out = run(capsys, "classgroup", "--disc", -47)
        assert code == EXIT_OK
        assert json.loads(out)["h"] == 5

    def test_enc_stable(self, capsys):
        a = run(capsys, "enc", "--disc", -47)
        b = run(capsys, "enc", "--disc", -47)
        assert a == b and a[0] == EXIT_OK

    def test_primitivise(self, capsys):
        code, out = run(capsys, "primitivise", "--element", 0, 4, 0, 0)
        assert code == EXIT_OK
        assert json.loads(out)["disc"] == -4

    def test_act_round_trip(self, capsys, tmp_path):
        code, out = run(capsys, "act", "--disc", -47, "--form", 2, 1, 6)
        assert code == EXIT_OK
        path = write(tmp_path, "y.json", json.loads(out)["oriented"])
        code, out = run(capsys, "act", "--in", path, "--form", 2, -1, 6)
        _, start = run(capsys, "enc", "--disc", -47)
        assert json.loads(out)["key_hex"] == json.loads(start)["key_hex"]

    def test_wrong_form_disc(self, capsys):
        code, out = run(capsys, "act", "--disc", -47, "--form", 2, 1, 3)
        assert code == EXIT_FAIL

    def test_vectorise(self, capsys):
        code, out = run(capsys, "vectorise", "--disc", -23, "--form", 2, 1, 3)
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["twisted"] is False
        assert doc["ideal"] == [2, 1, 3]

    def test_effective_twisted(self, capsys):
        code, out = run(capsys, "vectorise-effective", "--disc", -23, "--form", 2, 1, 3, "--twisted")
        assert code == EXIT_NEGATIVE
        assert json.loads(out)["result"] == "no_solution"

    def test_hidden_shift_demo(self, capsys):
        code, out = run(capsys, "hidden-shift-demo", "--disc", -47, "--seed", 4)
        assert code == EXIT_OK
        assert json.loads(out)["recovered"] is True


class TestVolcano:
    def test_dot(self, capsys):
        code, out = run(capsys, "volcano", "graph", "--disc", -4, "--ell", 3, "--depth", 1,
                        "--format", "dot")
        assert code == EXIT_OK
        assert out.count('[dir="down"]') == 4

    def test_walk(self, capsys):
        code, out = run(capsys, "volcano", "walk", "--disc", -64, "--ell", 2)
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["length"] == 2 and doc["end_disc"] == -4

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "g.json"
        code, out = run(capsys, "volcano", "graph", "--disc", -47, "--ell", 2, "--depth", 0,
                        "--out", path)
        assert code == EXIT_OK and out == ""
        assert len(json.loads(path.read_text())["nodes"]) == 5


@pytest.mark.skipif(shutil.which("orisogeny") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["orisogeny", "classgroup", "--disc", "-23"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["h"] == 3
