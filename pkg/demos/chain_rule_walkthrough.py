"""Both sides of the Dirac chain rule on the Heisenberg chart, term by term.

A harmonic spinor on the plane is pulled back through the projection of the
Heisenberg group. The base Dirac operator vanishes, the fibres are minimal and
the dilation is constant, so only the integrability term survives:
``D psi~ = (1/4) I^H . psi~ = psi~ / 4``.
"""

import numpy as np

from diracmorph import PullbackSpec, chain_rule, fixture, harmonic_spinor_2d, oneill_chain_rule

s = fixture("heisenberg").scenario
psi = harmonic_spinor_2d("exp(y1)*cos(y2) + i*exp(y1)*sin(y2)", "y1 - i*y2", domain=s.domain_N)
spec = PullbackSpec.from_scenario(s, psi=psi)

p = np.array([0.1, -0.05, 0.2])
b = chain_rule(s, spec, p)

print("psi~          ", np.round(b.psi_tilde, 6))
print("D psi~        ", np.round(b.lhs, 6))
print("psi~ / 4      ", np.round(b.psi_tilde / 4, 6))
print()
print("right-hand side pieces:")
for key, val in b.rhs_parts.items():
    print(f"  {key:15s} {np.linalg.norm(val):.3e}")
print(f"chain-rule residual {b.residual:.2e}")
print()

# the eight labelled sums of the expansion and the five identities between them
for key, val in b.terms.items():
    print(f"  {key}  |.| = {np.linalg.norm(val):.6f}")
for key, chk in b.steps.items():
    print(f"  {key}: residual {chk.residual:.2e}")

# Riemannian submersion with line fibres: the three-term form
t = oneill_chain_rule(s, spec, p)
print()
print("lift      ", np.round(t.lift, 6))
print("mean curv.", np.round(t.mean_curvature, 6))
print("O'Neill   ", np.round(t.oneill, 6))
