import json
import subprocess
import sys
from pathlib import Path

import pytest

from diracmorph.cli import main

GOLDEN = Path(__file__).parent / "golden"
KEYS = {"command", "scenario", "grid", "residuals", "verdict", "tolerances", "fd"}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gamma_matches_golden(capsys):
    code, out, _ = run(capsys, "gamma", "2")
    assert code == 0
    assert out == (GOLDEN / "gamma_2.json").read_text()
    doc = json.loads(out)
    g1 = [[complex(*z) for z in row] for row in doc["representation"]["gammas"][0]]
    assert g1 == [[0, -1], [1, 0]]


def test_gamma_adapted(capsys):
    code, out, _ = run(capsys, "gamma", "--adapted", "2", "2")
    doc = json.loads(out)
    assert code == 0 and doc["representation"]["spinor_dim"] == 4
    assert doc["residuals"]["anticommutator"] == 0.0


@pytest.mark.parametrize("argv,code", [
    (["check", "--fixture", "proj3to2"], 0),
    (["check", "--fixture", "heisenberg"], 1),
    (["check", "--fixture", "warped_conformal"], 0),
    (["chain", "--fixture", "heisenberg"], 0),
    (["dirac", "--fixture", "proj3to2"], 0),
    (["check", "--fixture", "nope"], 2),
    (["check"], 2),
])
def test_exit_codes_and_schema(capsys, argv, code):
    got, out, _ = run(capsys, *argv)
    assert got == code
    doc = json.loads(out)
    assert doc["command"] == argv[0]
    if code == 2:
        assert set(doc["error"]) >= {"type", "message"}
    else:
        assert KEYS <= set(doc)


def test_check_report_fields(capsys):
    _, out, _ = run(capsys, "check", "--fixture", "heisenberg", "--seed", "4")
    doc = json.loads(out)
    assert doc["verdict"] == "no" and doc["responsible"] == "integrability"
    assert doc["residuals"]["integrability"] == pytest.approx(1.0, abs=1e-6)
    assert len(doc["residuals"]["witnesses"]) == 5 and doc["seed"] == 4
    assert doc["converse"]["holds"] is True
    assert doc["fd"]["order"] == 4


def test_output_is_byte_deterministic(capsys):
    a = run(capsys, "check", "--fixture", "warped_conformal")[1]
    b = run(capsys, "check", "--fixture", "warped_conformal")[1]
    assert a == b


def test_chain_heisenberg(capsys):
    _, out, _ = run(capsys, "chain", "--fixture", "heisenberg")
    doc = json.loads(out)
    assert doc["verdict"] == "pass"
    assert doc["residuals"]["max_residual"] <= 1e-5
    assert doc["terms"]["I_H_norm"] == pytest.approx(1.0, abs=1e-6)
    assert {"step1", "step2", "step3", "step4", "step5", "term_sum"} <= set(doc["residuals"])


def test_chain_hsweep(capsys):
    _, out, _ = run(capsys, "chain", "--fixture", "warped_conformal", "--hsweep")
    sweep = json.loads(out)["hsweep"]
    assert sweep["order"] == 2 and len(sweep["h"]) == 4
    for r in sweep["ratios"]:
        assert r == pytest.approx(4.0, rel=0.3)


def test_overrides(capsys):
    _, out, _ = run(capsys, "check", "--fixture", "proj3to2", "--grid", "2", "--order", "4",
                    "--h", "1e-3", "--tol", "1e-3")
    doc = json.loads(out)
    assert doc["grid"]["count"] == 8
    assert doc["fd"] == {"h": 1e-3, "order": 4}
    assert doc["tolerances"]["condition"] == 1e-3
    _, out, _ = run(capsys, "chain", "--fixture", "proj3to2", "--order", "2")
    assert json.loads(out)["fd"]["order"] == 2


def test_coarse_stencil_rejects_witnesses(capsys):
    # order-2 truncation error on cubic witnesses exceeds the harmonicity tolerance
    code, out, _ = run(capsys, "check", "--fixture", "proj3to2", "--order", "2", "--h", "1e-3")
    assert code == 2 and json.loads(out)["error"]["type"] == "NonHarmonicWitnessError"


def test_corpus_table(capsys):
    code, out, _ = run(capsys, "corpus")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "7/7"
    assert all(row["match"] for row in doc["fixtures"])
    code, out, _ = run(capsys, "corpus", "--all")
    assert code == 0 and json.loads(out)["total"] == 8


def test_scenario_file_input(capsys, tmp_path):
    f = tmp_path / "proj.ini"
    f.write_text("[dimensions]\nm = 3\nn = 2\n[domain]\nM = -1, 1, -1, 1, -1, 1\n"
                 "N = -2, 2, -2, 2\n[map]\npi_1 = x2\npi_2 = -x1\n")
    code, out, _ = run(capsys, "check", str(f))
    assert code == 0 and json.loads(out)["verdict"] == "yes"


def test_bad_file_reports_location(capsys, tmp_path):
    f = tmp_path / "bad.ini"
    f.write_text("[dimensions]\nm = 3\nn = 2\n[domain]\nM = -1, 1, -1, 1, -1, 1\n"
                 "N = -2, 2, -2, 2\n[map]\npi_1 = x1 +\npi_2 = x2\n")
    code, out, err = run(capsys, "check", str(f))
    assert code == 2
    assert f"{f}:8:" in json.loads(out)["error"]["message"]
    assert f"{f}:8:" in err


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "diracmorph", "gamma", "2"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert r.stdout == (GOLDEN / "gamma_2.json").read_text()
