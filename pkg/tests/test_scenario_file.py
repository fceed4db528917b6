import textwrap

import numpy as np
import pytest

from diracmorph.corpus import fixture, list_fixtures
from diracmorph.errors import ScenarioFileError
from diracmorph.morphism import check_conditions
from diracmorph.scenario_file import load_scenario, parse_scenario, scenario_to_text

HEIS = textwrap.dedent("""\
    # Heisenberg nilmanifold chart
    [meta]
    name = heis

    [dimensions]
    m = 3
    n = 2

    [domain]
    M = -0.25, 0.25, -0.25, 0.25, -0.25, 0.25
    N = -0.5, 0.5, -0.5, 0.5

    [metric_g]
    g_22 = 1 + x1^2
    g_23 = -x1

    [map]
    pi_1 = x1
    pi_2 = x2

    [spinor]
    psi_1 = exp(y1)*cos(y2)
    psi_2 = 0

    [numerics]
    order = 4
    grid = 2
    """)


def test_parse_heisenberg():
    s = parse_scenario(HEIS)
    assert (s.m, s.n, s.name, s.grid_points) == (3, 2, "heis", 2)
    G = s.g(np.array([[0.2, 0.0, 0.0]]))[0]
    assert np.allclose(G, [[1, 0, 0], [0, 1.04, -0.2], [0, -0.2, 1]])
    r = check_conditions(s)
    assert r.verdict == "no"
    assert r.integrability_residual == pytest.approx(1.0, abs=1e-6)


def test_load_from_disk(tmp_path):
    f = tmp_path / "heis.ini"
    f.write_text(HEIS)
    assert load_scenario(f).name == "heis"
    with pytest.raises(ScenarioFileError):
        load_scenario(tmp_path / "missing.ini")


def line_of(text, needle):
    return next(i for i, l in enumerate(text.splitlines(), 1) if needle in l)


@pytest.mark.parametrize("old,new,needle", [
    ("g_23 = -x1", "g_23 = -x1 +", "g_23"),
    ("pi_2 = x2", "pi_2 = x2 + z3", "pi_2"),
    ("pi_2 = x2", "pi_2 = i*x2", "pi_2"),
    ("psi_1 = exp(y1)*cos(y2)", "psi_1 = exp(x1)", "psi_1"),
    ("grid = 2", "grid = two", "grid"),
    ("order = 4", "order = 3", "[numerics]"),
    ("N = -0.5, 0.5, -0.5, 0.5", "N = -0.5, 0.5, 0.5", "N ="),
    ("g_22 = 1 + x1^2", "g_44 = 1", "g_44"),
    ("[meta]", "[metadata]", "[metadata]"),
])
def test_errors_carry_line_numbers(old, new, needle):
    text = HEIS.replace(old, new)
    with pytest.raises(ScenarioFileError) as info:
        parse_scenario(text, "bad.ini")
    assert info.value.line == line_of(text, needle)
    assert str(info.value).startswith(f"bad.ini:{info.value.line}: ")


def test_missing_sections():
    with pytest.raises(ScenarioFileError, match="map"):
        parse_scenario(HEIS.replace("pi_1 = x1\n", "").replace("pi_2 = x2\n", ""))
    with pytest.raises(ScenarioFileError, match="dimensions"):
        parse_scenario("[domain]\nM = 0, 1\n")
    with pytest.raises(ScenarioFileError):
        parse_scenario(HEIS.replace("n = 2", "n = 3"))


def test_conflicting_symmetric_entries():
    with pytest.raises(ScenarioFileError, match="symmetric"):
        parse_scenario(HEIS.replace("g_23 = -x1", "g_23 = -x1\ng_32 = x1"))


@pytest.mark.parametrize("name", list_fixtures(include_auxiliary=True))
def test_round_trip_fixtures(name):
    s = fixture(name).scenario
    text = scenario_to_text(s)
    t = parse_scenario(text)
    assert scenario_to_text(t) == text
    P = s.grid()
    assert np.array_equal(t.pi(P), s.pi(P))
    assert t.fd == s.fd and t.tolerances == s.tolerances
    a, b = check_conditions(s), check_conditions(t)
    assert a.verdict == b.verdict
    assert a.condition_residuals() == pytest.approx(b.condition_residuals(), abs=1e-12)
