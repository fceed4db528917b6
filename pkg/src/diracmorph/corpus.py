"""Built-in fixtures with closed-form geometry and known classification.

Each fixture stores the expected dilation and invariant norms as expressions
in the ``x`` coordinates of M, so they can be compared pointwise with the
numerical geometry, together with a note containing the hand derivation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analysis.fields import Box, Field
from .errors import ScenarioError
from .geometry import Scenario

DEFAULT_PSI = ("exp(y1)*cos(y2) + i*y1*y2", "sin(y1 + 2*y2) - i*y2^2")
SIDE = 0.5


@dataclass(frozen=True, eq=False)
class Expected:
    """Closed-form values; norm fields are expressions in ``x1..xm``.

    ``fundamental_norm`` is the norm of the fundamental-equation vector and
    ``responsible`` names the condition that decides a "no" verdict.
    """

    verdict: str
    lam: str = "1"
    mu_V_norm: str = "0"
    mu_H_norm: str = "0"
    I_H_norm: str = "0"
    grad_H_lnl_norm: str = "0"
    fundamental_norm: str = "0"
    responsible: str | None = None

    def evaluate(self, key: str, P, m: int) -> np.ndarray:
        return Field.scalar(getattr(self, key), m)(np.atleast_2d(P))


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    scenario: Scenario
    expected: Expected
    oracle_note: str
    auxiliary: bool = False

    def responsible_value(self, P=None) -> float | None:
        """Hand-oracle value of the deciding residual, maximised over ``P`` (default: grid)."""
        r = self.expected.responsible
        if r is None:
            return None
        P = self.scenario.grid() if P is None else P
        key = {"fundamental_eq": "fundamental_norm", "integrability": "I_H_norm",
               "mu_H": "mu_H_norm"}[r]
        return float(np.max(self.expected.evaluate(key, P, self.scenario.m)))


def _mat(rows):
    return [[str(c) for c in r] for r in rows]


def _diag(entries):
    d = len(entries)
    return [[entries[i] if i == j else "0" for j in range(d)] for i in range(d)]


def _scenario(name, m, n, pi, g=None, center=None, domain_N=None, alpha=None, grid_points=3):
    M = Box.cube(m, center=0.0 if center is None else center, side=SIDE)
    N = domain_N or Box.cube(n, side=1.0)
    return Scenario(
        m=m, n=n, domain_M=M, domain_N=N,
        pi=Field.vector(pi, m),
        g=None if g is None else Field.matrix(g, m),
        psi=Field.spinor(list(DEFAULT_PSI), n, prefix="y"),
        alpha=None if alpha is None else Field.spinor(alpha, m),
        grid_points=grid_points, name=name,
    )


_NOTES = {
    "proj3to2": """\
pi(x) = (x1, x2) on Euclidean R^3. d pi is the identity on span{d1, d2} and kills
d3, so V = d3, E_i = d_i and pi*h = g on H, hence lambda = 1. All frame fields
are coordinate fields, so every bracket and every Christoffel symbol vanishes:
mu^V = mu^H = 0, I^H = 0. Both conditions hold, verdict yes.""",
    "proj4to2": """\
pi(x) = (x1, x2) on Euclidean R^4 with fibres the (x3, x4)-planes. Coordinate
frame, lambda = 1, all connection coefficients zero, so mu^V = mu^H = I^H = 0.
With the constant section alpha = (1, 0) we get nabla^V alpha = 0 and
D^V alpha = 0. Verdict yes.""",
    "warped_nonminimal": """\
g = dx1^2 + dx2^2 + e^(2 x1) dx3^2, pi = (x1, x2). Orthonormal frame E1 = d1,
E2 = d2, V = e^(-x1) d3; pi is a Riemannian submersion (lambda = 1). Brackets:
[E1, V] = -V, all others zero. Koszul gives g(nabla_V V, E1) = -g([V, E1], V)
= -1, so the fibre mean curvature is mu^V = -E1 = -grad x1, of norm 1. The
horizontal distribution is spanned by coordinate fields: I^H = 0, and
mu^H = 0 because g(nabla_{E_i} E_i, V) = 0. The fundamental equation
mu^V + (n - 1) grad^H ln(lambda) = -E1 fails with residual exactly 1.
Verdict no.""",
    "heisenberg": """\
g = dx1^2 + dx2^2 + (dx3 - x1 dx2)^2, pi = (x1, x2). Coframe dx1, dx2,
theta = dx3 - x1 dx2 with dual frame E1 = d1, E2 = d2 + x1 d3, V = d3, so
lambda = 1. Brackets: [E1, E2] = d3 = V, [E1, V] = [E2, V] = 0. Hence
I^H(1, 2) = V with norm 1. Koszul: Gamma_12^3 = (1/2)(1 - 0 - 0) = 1/2,
Gamma_13^2 = -1/2, Gamma_23^1 = 1/2, Gamma_VV^i = 0, Gamma_ii^V = 0, so
mu^V = mu^H = 0. Only integrability fails, residual 1. Verdict no. For a
harmonic psi the chain rule reduces to D psi~ = (1/4) E1.E2.V.psi~ = psi~/4,
since the ordered volume element of the adapted representation is +1.""",
    "warped_conformal": """\
g = e^(-4 x1)(dx1^2 + dx2^2) + e^(2 x1)(dx3^2 + dx4^2), pi = (x1, x2) to the
Euclidean plane. H = span{d1, d2}, and pi*h = e^(4 x1) g on H, so
lambda = e^(2 x1). Adapted frame E_i = e^(2 x1) d_i, V_a = e^(-x1) d_{a+2}. The
fibres are flat and scaled by w = e^(x1), so mu^V = -grad^H ln w = -grad x1,
whose horizontal component along E1 is -E1(x1) = -e^(2 x1). Likewise
grad^H ln(lambda) = E1(2 x1) E1 = 2 e^(2 x1) E1. Therefore
2 mu^V + (n - 1) grad^H ln(lambda) = (-2 + 2) e^(2 x1) E1 = 0. H consists of
coordinate planes (I^H = 0) and lambda has no vertical derivative, so
mu^H = grad^V ln(lambda) = 0. For the constant alpha = (1, 0): the mixed
coefficients g(nabla_{E_i} V_b, V_c) vanish because [E_i, V_b] is a multiple of
V_b and the fibre metric is a multiple of the identity, so alpha is parallel in
horizontal directions; g(nabla_{V_a} V_b, V_c) = 0 (flat fibres with constant
frame), so D^V alpha = 0. Verdict yes.""",
    "flat_principal": """\
g = dx1^2 + dx2^2 + (dx3 + x2 dx1 + x1 dx2)^2 + dx4^2, pi = (x1, x2). The
connection form theta = dx3 + x2 dx1 + x1 dx2 = d(x3 + x1 x2) is closed, so in
the coordinates u = x3 + x1 x2 the metric is the flat product
dx1^2 + dx2^2 + du^2 + dx4^2 and the R^2-bundle is flat. Frame E1 = d1 - x2 d3,
E2 = d2 - x1 d3, V1 = d3, V2 = d4 with [E1, E2] = (-1 + 1) d3 = 0 and
[E_i, V_a] = 0, so lambda = 1, I^H = 0, all connection coefficients vanish.
A constant alpha is parallel with D^V alpha = 0 (abelian structure group).
Verdict yes.""",
    "holo3to2": """\
pi = (x1^2 - x2^2, 2 x1 x2), the complex square z^2 in z = x1 + i x2, on a box
centred at (1, 0, 0) away from the origin. d pi restricted to the x1x2-plane is
multiplication by 2z, so lambda = |2z| = 2r with r = sqrt(x1^2 + x2^2); the
fibres are straight x3-lines (mu^V = 0), H is the integrable family of
x1x2-planes (I^H = 0) and lambda has no x3-dependence (mu^H = 0). The
horizontal gradient of ln(lambda) = ln 2 + ln r has Euclidean norm 1/r, so
the fundamental equation mu^V + grad^H ln(lambda) fails with residual 1/r.
Verdict no.""",
    "conformal_vertical": """\
Auxiliary probe for mu^H = grad^V ln(lambda). g = e^(-2 x3)(dx1^2 + dx2^2) +
dx3^2, pi = (x1, x2). On H, pi*h = e^(2 x3) g, so lambda = e^(x3). Frame
E_i = e^(x3) d_i, V = d3. Koszul: g(nabla_{E_i} E_i, V) = -g([E_i, V], E_i) = 1
for each i, so mu^H = V; and grad^V ln(lambda) = V(x3) V = V. The fibres are
unit-speed straight lines, mu^V = 0, and I^H = 0. The fundamental equation
holds but mu^H = 1, so for one-dimensional fibres the verdict is no.""",
}


def _build(name: str) -> Fixture:
    if name == "proj3to2":
        s = _scenario(name, 3, 2, ["x1", "x2"])
        e = Expected("yes")
    elif name == "proj4to2":
        s = _scenario(name, 4, 2, ["x1", "x2"], alpha=["1", "0"])
        e = Expected("yes")
    elif name == "warped_nonminimal":
        s = _scenario(name, 3, 2, ["x1", "x2"], g=_diag(["1", "1", "exp(2*x1)"]))
        e = Expected("no", mu_V_norm="1", fundamental_norm="1", responsible="fundamental_eq")
    elif name == "heisenberg":
        s = _scenario(name, 3, 2, ["x1", "x2"],
                      g=_mat([[1, 0, 0], [0, "1 + x1^2", "-x1"], [0, "-x1", 1]]))
        e = Expected("no", I_H_norm="1", responsible="integrability")
    elif name == "warped_conformal":
        s = _scenario(name, 4, 2, ["x1", "x2"],
                      g=_diag(["exp(-4*x1)", "exp(-4*x1)", "exp(2*x1)", "exp(2*x1)"]),
                      alpha=["1", "0"])
        e = Expected("yes", lam="exp(2*x1)", mu_V_norm="exp(2*x1)",
                     grad_H_lnl_norm="2*exp(2*x1)")
    elif name == "flat_principal":
        s = _scenario(name, 4, 2, ["x1", "x2"],
                      g=_mat([["1 + x2^2", "x1*x2", "x2", 0],
                              ["x1*x2", "1 + x1^2", "x1", 0],
                              ["x2", "x1", 1, 0],
                              [0, 0, 0, 1]]),
                      alpha=["1", "0"])
        e = Expected("yes")
    elif name == "holo3to2":
        s = _scenario(name, 3, 2, ["x1^2 - x2^2", "2*x1*x2"], center=[1.0, 0.0, 0.0],
                      domain_N=Box.from_pairs([[0.3, 1.8], [-0.8, 0.8]]))
        e = Expected("no", lam="2*sqrt(x1^2 + x2^2)", grad_H_lnl_norm="1/sqrt(x1^2 + x2^2)",
                     fundamental_norm="1/sqrt(x1^2 + x2^2)", responsible="fundamental_eq")
    elif name == "conformal_vertical":
        s = _scenario(name, 3, 2, ["x1", "x2"], g=_diag(["exp(-2*x3)", "exp(-2*x3)", "1"]))
        e = Expected("no", lam="exp(x3)", mu_H_norm="1", responsible="mu_H")
    else:
        raise ScenarioError(f"unknown fixture {name!r}; known: {', '.join(list_fixtures(True))}")
    return Fixture(name, s, e, _NOTES[name], auxiliary=name in AUXILIARY)


CORE = ("proj3to2", "proj4to2", "warped_nonminimal", "heisenberg", "warped_conformal",
        "flat_principal", "holo3to2")
AUXILIARY = ("conformal_vertical",)

_CACHE: dict = {}


def fixture(name: str) -> Fixture:
    """Look up a fixture by name (fixtures are immutable and cached)."""
    if name not in _CACHE:
        _CACHE[name] = _build(name)
    return _CACHE[name]


def list_fixtures(include_auxiliary: bool = False) -> list[str]:
    return list(CORE) + (list(AUXILIARY) if include_auxiliary else [])


__all__ = ["CORE", "AUXILIARY", "DEFAULT_PSI", "Expected", "Fixture", "fixture", "list_fixtures"]
