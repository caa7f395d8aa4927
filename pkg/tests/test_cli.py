import subprocess
import sys

import pytest

from linkrec.harness.cli import main

INSTANCE = """\
group green 2 1/2 0 1/2
group blue 2 24/25 0 1/25
gamma 1/25
k 0
rho 0
"""


@pytest.fixture
def inst(tmp_path):
    def write(edges=None, text=INSTANCE):
        path = tmp_path / "inst.txt"
        body = text
        if edges is not None:
            body += "edges E\n" + "".join(f"{i} {j}\n" for i, j in edges)
        path.write_text(body)
        return str(path)
    return write


def test_check_equilibrium(inst, capsys):
    assert main(["eq", "check", inst([(0, 1)])]) == 0
    assert capsys.readouterr().out.strip() == "equilibrium"


def test_check_not_equilibrium(inst, capsys):
    assert main(["eq", "check", inst([])]) == 1
    assert "add (0, 1)" in capsys.readouterr().out


def test_check_without_edges_is_input_error(inst):
    assert main(["eq", "check", inst()]) == 2


def test_enumerate(inst, capsys):
    assert main(["eq", "enumerate", inst()]) == 0
    out = capsys.readouterr().out
    assert out.splitlines() == ["1 equilibria", "edges 0-1"]


def test_enumerate_too_large(inst):
    assert main(["eq", "enumerate", inst(), "--max-n", "3"]) == 2


def test_three_node_semantics_flag(inst, capsys):
    text = ("group g 1 1/50 23/25 3/50\ngroup m 1 1/25 23/25 1/25\n"
            "group b 1 3/50 23/25 1/50\ngamma 3/5000\n")
    path = inst(text=text)
    assert main(["eq", "enumerate", path, "--semantics", "joint"]) == 0
    assert capsys.readouterr().out.startswith("0 equilibria")
    assert main(["eq", "enumerate", path]) == 0
    assert capsys.readouterr().out.startswith("1 equilibria")


def test_construct_round_trips_through_check(inst, tmp_path, capsys):
    text = INSTANCE.replace("green 2", "green 4").replace("blue 2", "blue 4")
    assert main(["eq", "construct", inst(text=text)]) == 0
    out = capsys.readouterr().out
    built = tmp_path / "built.txt"
    built.write_text(out)
    assert main(["eq", "check", str(built)]) == 0


def test_construct_inapplicable(inst):
    text = INSTANCE.replace("gamma 1/25", "gamma 1/100")
    assert main(["eq", "construct", inst(text=text)]) == 2


@pytest.mark.parametrize("what", ["degrees", "utility", "ur", "welfare"])
@pytest.mark.parametrize("mode", ["symmetric", "finite-n"])
def test_bounds(inst, what, mode):
    assert main(["bounds", what, inst(), "--mode", mode]) == 0


def test_zero_surplus_population_rejected(inst):
    path = inst(text=INSTANCE.replace("24/25 0 1/25", "1 0 0"))
    assert main(["bounds", "ur", path]) == 2


def test_inapplicable_envelope(inst, capsys):
    # blues that would link to greens leave the finite-n regime
    path = inst(text=INSTANCE.replace("24/25 0 1/25", "9/10 0 1/10"))
    assert main(["bounds", "degrees", path, "--mode", "finite-n"]) == 3
    assert main(["bounds", "ur", path, "--mode", "finite-n"]) == 3
    assert "inapplicable" in capsys.readouterr().err


def test_bad_input_file(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("nonsense line\n")
    assert main(["eq", "check", str(bad)]) == 2
    assert main(["eq", "check", str(tmp_path / "missing.txt")]) == 2


def test_sweep_to_file_and_plot(tmp_path):
    out, svg = tmp_path / "f.csv", tmp_path / "f.svg"
    assert main(["sweep", "fig3", "--g0", "1/2", "--out", str(out), "--plot", str(svg)]) == 0
    assert out.read_text().startswith("figure,g0,b0,gamma,k,rho,ur_exo,metric_lower,metric_upper,status")
    assert svg.stat().st_size > 0


def test_sweep_bad_config(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text("[sweep]\nnope = 1\n")
    assert main(["sweep", "fig1", "--config", str(cfg)]) == 2


def test_verify_exit_codes(tmp_path, capsys):
    report = tmp_path / "r.json"
    assert main(["verify", "prop1", "--budget", "2", "--max-n", "5", "--out", str(report)]) == 0
    assert "prop1: pass" in capsys.readouterr().out
    assert report.read_text().startswith("{")
    # no point fits in two nodes, so every suite is vacuous
    assert main(["verify", "prop2", "--max-n", "2"]) == 3


def test_module_entry_point(inst):
    proc = subprocess.run([sys.executable, "-m", "linkrec", "eq", "check", inst([(0, 1)])],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "equilibrium"
