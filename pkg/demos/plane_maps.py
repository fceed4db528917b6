"""Maps from R^3 and R^4 onto the plane: Cauchy-Riemann systems versus harmonic pull-backs.

Isometric projections (possibly rotated or reflected) satisfy one of the two
systems and pull every harmonic spinor back to a harmonic spinor. The complex
square also satisfies Cauchy-Riemann, but its dilation 2|z| is not constant,
so the pull-backs pick up a mean-curvature term.
"""

from diracmorph import Box, Field, Scenario, classify, cr_condition_check, default_witnesses, fixture
from diracmorph.errors import NotHorizontallyConformalError


def plane_map(m, pi):
    return Scenario(m=m, n=2, domain_M=Box.cube(m, side=0.5), domain_N=Box.cube(2, side=4.0),
                    pi=Field.vector(pi, m))


maps = {
    "projection R^3": plane_map(3, ["x1", "x2"]),
    "rotation R^3": plane_map(3, ["0.6*x1 - 0.8*x2", "0.8*x1 + 0.6*x2"]),
    "reflection R^3": plane_map(3, ["x1", "-x2"]),
    "projection R^4": plane_map(4, ["x1", "x2"]),
    "tilted fibres": plane_map(3, ["x1", "x2 + x3"]),
    "complex square": fixture("holo3to2").scenario,
}

print(f"{'map':16s} {'CR+':>9s} {'CR-':>9s} {'verdict':>8s} {'max |D psi~|':>13s}")
for label, s in maps.items():
    cr = cr_condition_check(s)
    try:
        rep = classify(s, default_witnesses(s, count=5, seed=1))
    except NotHorizontallyConformalError:
        # dilation differs between horizontal directions: not in scope of the classification
        print(f"{label:16s} {cr['plus']:9.2e} {cr['minus']:9.2e}   not horizontally conformal")
        continue
    print(f"{label:16s} {cr['plus']:9.2e} {cr['minus']:9.2e} {rep.verdict:>8s} "
          f"{max(rep.witness_residuals):13.2e}")
