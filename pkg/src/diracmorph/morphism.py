"""Dirac-morphism classification from grid residuals and harmonic witnesses.

A horizontally conformal submersion is classified through its geometric
conditions: integrable horizontal distribution plus the fundamental equation
``(m - n) mu^V + (n - 1) grad^H ln(lambda) = 0``. For one-dimensional fibres the
horizontal and vertical parts of the equation vanish separately, so
``mu^V + (n - 1) grad^H ln(lambda) = 0`` and ``mu^H = 0`` are checked on their
own. Higher-codimension fibres add the two conditions on the section alpha.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .analysis.fields import Field, gradient
from .clifford import clifford_mul
from .dirac import (
    ChartSpinorField,
    PullbackSpec,
    _vertical_batch,
    chain_rule_batch,
    constant_alpha,
    dirac_batch,
)
from .errors import DimensionError, NonHarmonicWitnessError, VanishingSpinorError
from .geometry import Scenario, Tolerances, invariants_from, local_geometry

VERDICTS = ("yes", "no", "inconclusive")
# decade of slack between "clearly satisfied" and "clearly violated"
INCONCLUSIVE_FACTOR = 10.0


@dataclass(frozen=True, eq=False)
class MorphismReport:
    """Per-condition residual maxima over a sample grid and the resulting verdict.

    ``mu_H_residual`` is only meaningful for one-dimensional fibres; the alpha
    residuals only for fibres of dimension at least two. Witness residuals are
    ``max |D^M psi~| / max(1, |psi~|)`` over the grid, one entry per witness.
    """

    verdict: str
    fundamental_eq_residual: float
    integrability_residual: float
    mu_H_residual: float
    alpha_dirac_residual: float
    alpha_parallel_residual: float
    witness_residuals: list
    grid: dict
    tolerances: Tolerances
    codim1: bool
    inconsistency: bool = False
    worst_points: dict = dc_field(default_factory=dict)
    conditions_verdict: str = ""

    def condition_residuals(self) -> dict:
        out = {"fundamental_eq": self.fundamental_eq_residual,
               "integrability": self.integrability_residual}
        if self.codim1:
            out["mu_H"] = self.mu_H_residual
        else:
            out["alpha_dirac"] = self.alpha_dirac_residual
            out["alpha_parallel"] = self.alpha_parallel_residual
        return out

    def residuals(self) -> dict:
        out = self.condition_residuals()
        out["witnesses"] = list(self.witness_residuals)
        return out

    @property
    def responsible(self) -> str | None:
        """Name of the largest condition residual above tolerance, if any."""
        res = {k: v for k, v in self.condition_residuals().items() if v > self.tolerances.condition}
        return max(res, key=res.get) if res else None


def _verdict(values, tol: float) -> str:
    values = list(values)
    if all(v <= tol for v in values):
        return "yes"
    if any(v > INCONCLUSIVE_FACTOR * tol for v in values):
        return "no"
    return "inconclusive"


def _nrm(a):
    return np.linalg.norm(a, axis=-1)


def _alpha_field(s: Scenario):
    return s.alpha if s.alpha is not None else constant_alpha(s)


def _alpha_residuals(s: Scenario, P, lg, inv):
    alpha = _alpha_field(s)
    vd = _vertical_batch(s, alpha, P, lg)
    an = _nrm(vd.alpha)
    if np.any(an == 0):
        raise VanishingSpinorError("alpha vanishes on the grid", P[int(np.argmin(an))])
    muH = inv.mu_H[:, s.n:]
    dirac_res = _nrm(vd.D_V - 0.5 * s.n * clifford_mul(s.adapted_rep.fibre, muH, vd.alpha))
    par = np.max(_nrm(vd.nabla[:, : s.n]), axis=1)
    return dirac_res, par


def check_alpha_conditions(s: Scenario, grid=None) -> tuple[float, float]:
    """Maxima of ``|D^V alpha - (n/2) mu^H . alpha|`` and ``max_i |nabla^V_{E_i} alpha|``.

    Both are zero for one-dimensional fibres.
    """
    if s.codim1:
        return 0.0, 0.0
    P = s.grid(grid)
    lg = local_geometry(s.total_chart, P)
    inv = invariants_from(lg, s.n)
    d, p = _alpha_residuals(s, P, lg, inv)
    return float(d.max()), float(p.max())


def _grid_meta(s: Scenario, P, N) -> dict:
    return {"points_per_axis": int(N), "count": int(P.shape[0]),
            "box": s.domain_M.to_pairs()}


def check_conditions(s: Scenario, grid=None) -> MorphismReport:
    """Evaluate the characterising conditions on the scenario grid."""
    N = s.grid_points if grid is None else grid
    P = s.grid(N)
    lg = local_geometry(s.total_chart, P)
    inv = invariants_from(lg, s.n)
    n, k = s.n, s.k
    if s.codim1:
        fund = _nrm(inv.mu_V + (n - 1) * inv.grad_H_lnl)
    else:
        fund = _nrm(k * inv.mu_V + (n - 1) * inv.grad_H_lnl)
    integ = np.max(np.linalg.norm(inv.I_H, axis=-1), axis=(1, 2))
    muH = _nrm(inv.mu_H)
    if s.codim1:
        adir = apar = np.zeros(P.shape[0])
    else:
        adir, apar = _alpha_residuals(s, P, lg, inv)
    vals = {"fundamental_eq": fund, "integrability": integ, "mu_H": muH,
            "alpha_dirac": adir, "alpha_parallel": apar}
    worst = {name: P[int(np.argmax(v))].tolist() for name, v in vals.items()}
    rep = MorphismReport(
        verdict="",
        fundamental_eq_residual=float(fund.max()), integrability_residual=float(integ.max()),
        mu_H_residual=float(muH.max()), alpha_dirac_residual=float(adir.max()),
        alpha_parallel_residual=float(apar.max()), witness_residuals=[],
        grid=_grid_meta(s, P, N), tolerances=s.tolerances, codim1=s.codim1,
        worst_points=worst,
    )
    v = _verdict(rep.condition_residuals().values(), s.tolerances.condition)
    object.__setattr__(rep, "verdict", v)
    object.__setattr__(rep, "conditions_verdict", v)
    return rep


# ---------------------------------------------------------------------------
# witnesses

def _as_witness(s: Scenario, w) -> ChartSpinorField:
    if isinstance(w, ChartSpinorField):
        return w
    if isinstance(w, Field):
        return ChartSpinorField.from_field(w if w.domain is not None else w.with_domain(s.domain_N),
                                           s.base_rep)
    texts = list(w)
    return ChartSpinorField.from_field(Field.spinor(texts, s.n, prefix="y", domain=s.domain_N),
                                       s.base_rep)


def witness_base_residual(s: Scenario, w: ChartSpinorField, P) -> float:
    """``max |D^N psi| / max(1, |psi|)`` over ``pi(P)``."""
    Y = s.pi(P)
    D = dirac_batch(s.base_chart, s.base_rep.gammas, w, Y)
    scale = np.maximum(1.0, _nrm(w(Y)))
    return float(np.max(_nrm(D) / scale))


def witness_residual(s: Scenario, w: ChartSpinorField, P) -> float:
    """``max |D^M psi~| / max(1, |psi~|)`` over ``P`` for the pull-back of ``w``."""
    spec = PullbackSpec.from_scenario(s, w)
    b = chain_rule_batch(s, spec, P)
    return float(np.max(_nrm(b.lhs) / np.maximum(1.0, _nrm(b.psi_tilde))))


def classify(s: Scenario, witnesses=(), grid=None) -> MorphismReport:
    """Conditions plus harmonic-witness cross-validation.

    A "yes" from the conditions with a witness whose pull-back is not harmonic
    is reported as inconclusive with ``inconsistency=True``.

    Raises:
        NonHarmonicWitnessError: if a witness is not harmonic on ``pi(grid)``.
    """
    rep = check_conditions(s, grid)
    P = s.grid(rep.grid["points_per_axis"])
    tol = s.tolerances.harmonicity
    wres = []
    for idx, w in enumerate(witnesses):
        w = _as_witness(s, w)
        base = witness_base_residual(s, w, P)
        if base > tol:
            raise NonHarmonicWitnessError(
                f"witness {idx} is not harmonic on the base: residual {base:.3g} exceeds {tol:.3g}")
        wres.append(witness_residual(s, w, P))
    verdict, bad = rep.verdict, False
    if verdict == "yes" and any(r > tol for r in wres):
        verdict, bad = "inconclusive", True
    object.__setattr__(rep, "witness_residuals", wres)
    object.__setattr__(rep, "verdict", verdict)
    object.__setattr__(rep, "inconsistency", bad)
    return rep


def _coef(rng) -> str:
    a, b = np.round(rng.uniform(-1, 1, size=2), 4)
    return f"({a:.4f} + {b:.4f}*i)".replace("+ -", "- ")


def random_harmonic_witnesses(count: int = 5, seed: int = 0, degree: int = 3,
                               center=(0.0, 0.0)) -> list[tuple[str, str]]:
    """Seeded harmonic spinors on flat R^2 as expression pairs.

    ``psi+`` is a random polynomial in ``z = y1 + i y2`` and ``psi-`` one in
    ``zbar``, both expanded about ``center``.
    """
    rng = np.random.default_rng(seed)
    c1, c2 = (f"{float(c):g}" for c in center)
    z = f"((y1 - {c1}) + i*(y2 - {c2}))"
    zb = f"((y1 - {c1}) - i*(y2 - {c2}))"
    out = []
    for _ in range(count):
        plus = " + ".join(f"{_coef(rng)}*{z}^{d}" for d in range(degree + 1))
        minus = " + ".join(f"{_coef(rng)}*{zb}^{d}" for d in range(degree + 1))
        out.append((plus, minus))
    return out


def default_witnesses(s: Scenario, count: int = 5, seed: int = 0) -> list:
    """Harmonic witnesses for a flat target: random polynomials when n = 2, constants otherwise."""
    if s.h is not None:
        raise DimensionError("built-in witnesses need the flat target metric")
    if s.n == 2:
        return random_harmonic_witnesses(count, seed, center=tuple(s.domain_N.center))
    S = 2 ** (s.n // 2)
    rng = np.random.default_rng(seed)
    return [[_coef(rng) for _ in range(S)] for _ in range(count)]


# ---------------------------------------------------------------------------
# converse direction: prescribed-value witnesses

CONVERSE_FACTORS = {"fundamental_eq": 0.5, "mu_H": 0.5, "integrability": 0.25}


@dataclass(frozen=True)
class ConverseProbe:
    condition: str
    point: list
    residual: float
    factor: float
    bound: float
    observed: float
    noise: float

    @property
    def holds(self) -> bool:
        return self.observed >= self.bound - self.noise


def converse_probe(s: Scenario, report: MorphismReport | None = None) -> ConverseProbe | None:
    """Lower bound for ``|D^M psi~|`` from a violated condition.

    At the worst grid point of the responsible condition, constant witnesses
    (the basis spinors, harmonic on a flat target) are pulled back and the
    largest ratio ``|D^M psi~| / |psi~|`` is compared with ``factor * residual``.
    The factor is 1/2 for the vector-valued conditions and 1/4 for the
    integrability tensor. Returns ``None`` when no condition is violated.
    """
    report = report or check_conditions(s)
    name = report.responsible
    if name is None or name not in CONVERSE_FACTORS:
        return None
    p = np.asarray(report.worst_points[name], dtype=float)[None, :]
    res = report.condition_residuals()[name]
    S = s.base_rep.spinor_dim
    best, noise = 0.0, 0.0
    for e in np.eye(S):
        w = ChartSpinorField(s.base_rep, lambda Y, e=e: np.tile(e.astype(complex), (Y.shape[0], 1)))
        noise = max(noise, witness_base_residual(s, w, p))
        b = chain_rule_batch(s, PullbackSpec.from_scenario(s, w), p)
        best = max(best, float(_nrm(b.lhs)[0] / _nrm(b.psi_tilde)[0]))
    k = CONVERSE_FACTORS[name]
    noise = max(noise, s.tolerances.harmonicity)
    return ConverseProbe(name, p[0].tolist(), res, k, k * res, best, noise)


# ---------------------------------------------------------------------------
# explicit PDE systems for flat targets

def cr_condition_check(s: Scenario, grid=None) -> dict:
    """Maximum residuals of the holomorphic (+) and anti-holomorphic (-) systems.

    For ``R^3 -> R^2``: ``d1 pi1 = +/- d2 pi2``, ``d2 pi1 = -/+ d1 pi2``,
    ``d3 pi = 0``. For ``R^4 -> R^2`` with ``x1, x2`` horizontal and ``x3, x4``
    vertical: the same two equations plus ``d3 pi = d4 pi = 0``.
    """
    if s.n != 2 or s.m not in (3, 4):
        raise DimensionError("the explicit systems cover R^3 -> R^2 and R^4 -> R^2")
    P = s.grid(grid)
    J = np.swapaxes(gradient(s.pi, P, s.fd), 1, 2)  # (B, 2, m)
    vert = np.max(np.abs(J[:, :, 2:]), axis=(1, 2))
    out = {}
    for name, sgn in (("plus", 1.0), ("minus", -1.0)):
        a = np.abs(J[:, 0, 0] - sgn * J[:, 1, 1])
        b = np.abs(J[:, 0, 1] + sgn * J[:, 1, 0])
        r = np.maximum(np.maximum(a, b), vert)
        out[name] = float(r.max())
    out["vertical"] = float(vert.max())
    return out


__all__ = [
    "ConverseProbe", "MorphismReport", "check_alpha_conditions", "check_conditions", "classify",
    "converse_probe", "cr_condition_check", "default_witnesses", "random_harmonic_witnesses",
    "witness_base_residual", "witness_residual",
]
