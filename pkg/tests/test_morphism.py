import numpy as np
import pytest

from diracmorph.analysis.fields import Box, Field
from diracmorph.corpus import fixture, list_fixtures
from diracmorph.errors import DimensionError, NonHarmonicWitnessError, VanishingSpinorError
from diracmorph.geometry import Scenario, Tolerances
from diracmorph.morphism import (
    check_alpha_conditions,
    check_conditions,
    classify,
    converse_probe,
    cr_condition_check,
    default_witnesses,
    random_harmonic_witnesses,
)

NO_FIXTURES = ["warped_nonminimal", "heisenberg", "holo3to2", "conformal_vertical"]


def euclidean(m, pi, side=0.5):
    return Scenario(m=m, n=2, domain_M=Box.cube(m, side=side), domain_N=Box.cube(2, side=4.0),
                    pi=Field.vector(pi, m))


def test_projection_is_a_morphism():
    s = fixture("proj3to2").scenario
    r = check_conditions(s)
    assert r.verdict == "yes"
    assert max(r.condition_residuals().values()) <= 1e-8
    assert r.grid["count"] == 27 and r.grid["points_per_axis"] == 3


def test_heisenberg_and_warped_residuals():
    r = check_conditions(fixture("heisenberg").scenario)
    assert r.verdict == "no" and r.responsible == "integrability"
    assert r.integrability_residual == pytest.approx(1.0, abs=1e-6)
    r = check_conditions(fixture("warped_nonminimal").scenario)
    assert r.verdict == "no" and r.responsible == "fundamental_eq"
    assert r.fundamental_eq_residual == pytest.approx(1.0, abs=1e-4)


def test_classify_projection_with_witnesses():
    s = fixture("proj3to2").scenario
    ws = [["(y1 + i*y2)^2", "0"]] + default_witnesses(s, count=4, seed=3)
    r = classify(s, ws)
    assert r.verdict == "yes" and not r.inconsistency
    assert len(r.witness_residuals) == 5
    assert max(r.witness_residuals) <= 1e-6


def test_classify_rejects_non_harmonic_witness():
    s = fixture("proj3to2").scenario
    with pytest.raises(NonHarmonicWitnessError):
        classify(s, [["y1^2", "0"]])


def test_flat_versus_curved_principal_bundle():
    flat = classify(fixture("flat_principal").scenario, default_witnesses(fixture("flat_principal").scenario))
    assert flat.verdict == "yes" and max(flat.witness_residuals) <= 1e-6
    assert classify(fixture("heisenberg").scenario).verdict == "no"


def test_inconsistency_is_flagged():
    # conditions that pass only because of an absurd tolerance, witnesses that do not
    s = fixture("heisenberg").scenario.with_options(tolerances=Tolerances(condition=10.0))
    r = classify(s, default_witnesses(s, count=2))
    assert r.conditions_verdict == "yes"
    assert r.verdict == "inconclusive" and r.inconsistency
    assert min(r.witness_residuals) > 0.1


@pytest.mark.parametrize("tol,verdict", [(2.0, "yes"), (0.5, "inconclusive"), (0.05, "no")])
def test_verdict_bands(tol, verdict):
    s = fixture("heisenberg").scenario.with_options(tolerances=Tolerances(condition=tol))
    assert check_conditions(s).verdict == verdict


@pytest.mark.parametrize("name", list_fixtures())
@pytest.mark.parametrize("factor", [10.0, 0.1])
def test_verdicts_are_scale_robust(name, factor):
    fx = fixture(name)
    base = fx.scenario.tolerances
    s = fx.scenario.with_options(tolerances=base.scaled(factor))
    assert check_conditions(s).verdict == fx.expected.verdict


def test_alpha_conditions_examples():
    s = fixture("proj4to2").scenario
    assert check_alpha_conditions(s) == pytest.approx((0.0, 0.0), abs=1e-8)
    s2 = s.with_options(alpha=Field.spinor(["exp(x3)", "0"], 4))
    dirac_res, par = check_alpha_conditions(s2)
    assert dirac_res == pytest.approx(np.exp(s.grid()[:, 2].max()), abs=1e-8)
    assert par <= 1e-10
    a, b = check_alpha_conditions(fixture("warped_conformal").scenario)
    assert a <= 1e-8 and b <= 1e-8
    assert check_alpha_conditions(fixture("heisenberg").scenario) == (0.0, 0.0)


def test_alpha_vanishing_on_grid():
    s = fixture("proj4to2").scenario.with_options(alpha=Field.spinor(["x4", "0"], 4))
    with pytest.raises(VanishingSpinorError):
        check_conditions(s)


@pytest.mark.parametrize("name", NO_FIXTURES)
def test_converse_lower_bound(name):
    s = fixture(name).scenario
    probe = converse_probe(s)
    assert probe is not None and probe.condition == fixture(name).expected.responsible
    assert probe.holds
    assert probe.observed >= probe.bound - 1e-6


def test_converse_bounds_are_sharp():
    h = converse_probe(fixture("heisenberg").scenario)
    assert h.observed == pytest.approx(0.25, abs=1e-6)
    w = converse_probe(fixture("warped_nonminimal").scenario)
    assert w.observed == pytest.approx(0.5, abs=1e-6)
    assert converse_probe(fixture("proj3to2").scenario) is None


def test_random_witnesses_are_seeded():
    a = random_harmonic_witnesses(5, seed=7)
    assert a == random_harmonic_witnesses(5, seed=7)
    assert a != random_harmonic_witnesses(5, seed=8)
    assert len(a) == 5 and all(len(w) == 2 for w in a)


def test_default_witnesses_need_flat_target():
    s = fixture("proj3to2").scenario.with_options(h=Field.matrix([["2", "0"], ["0", "2"]], 2, prefix="y"))
    with pytest.raises(DimensionError):
        default_witnesses(s)


# ---------------------------------------------------------------------------
# explicit PDE systems

@pytest.mark.parametrize("m", [3, 4])
def test_cr_identity_map(m):
    r = cr_condition_check(euclidean(m, ["x1", "x2"]))
    assert r["plus"] <= 1e-10 and r["vertical"] <= 1e-10
    assert r["minus"] == pytest.approx(2.0, abs=1e-10)


@pytest.mark.parametrize("m", [3, 4])
def test_cr_reflection_is_antiholomorphic(m):
    r = cr_condition_check(euclidean(m, ["x1", "-x2"]))
    assert r["minus"] <= 1e-10 and r["plus"] == pytest.approx(2.0, abs=1e-10)


def test_cr_complex_square():
    s = Scenario(m=3, n=2, domain_M=Box.cube(3, center=[1.0, 0, 0], side=0.5),
                 domain_N=Box.cube(2, center=[1.0, 0.0], side=4.0),
                 pi=Field.vector(["x1^2 - x2^2", "2*x1*x2"], 3))
    assert cr_condition_check(s)["plus"] <= 1e-10


def test_cr_vertical_dependence():
    r = cr_condition_check(euclidean(3, ["x1", "x2 + x3"]))
    assert r["plus"] == pytest.approx(1.0, abs=1e-10)
    assert r["vertical"] == pytest.approx(1.0, abs=1e-10)
    r = cr_condition_check(euclidean(4, ["x1 + x4", "x2"]))
    assert r["plus"] == pytest.approx(1.0, abs=1e-10)


def test_cr_wrong_dimensions():
    s = Scenario(m=5, n=2, domain_M=Box.cube(5), domain_N=Box.cube(2, side=4.0),
                 pi=Field.vector(["x1", "x2"], 5))
    with pytest.raises(DimensionError):
        cr_condition_check(s)


@pytest.mark.parametrize("m,pi", [(3, ["x1", "x2"]), (3, ["0.6*x1 - 0.8*x2", "0.8*x1 + 0.6*x2"]),
                                  (3, ["x1", "-x2"]), (4, ["x1", "x2"]),
                                  (4, ["0.6*x1 + 0.8*x2", "-0.8*x1 + 0.6*x2"])])
def test_conforming_maps_pull_back_harmonic_witnesses(m, pi):
    s = euclidean(m, pi)
    assert cr_condition_check(s)["vertical"] <= 1e-10
    r = classify(s, default_witnesses(s, count=5, seed=11))
    assert r.verdict == "yes"
    assert max(r.witness_residuals) <= 1e-6


def test_holomorphic_but_not_riemannian():
    # Cauchy-Riemann holds, yet the non-constant dilation breaks the fundamental equation
    s = fixture("holo3to2").scenario
    assert cr_condition_check(s)["plus"] <= 1e-10
    r = classify(s, default_witnesses(s, count=3))
    assert r.verdict == "no" and min(r.witness_residuals) > 1e-2
