"""Walk through the built-in fixtures: geometry, verdict and the deciding residual.

Run with ``python3 demos/corpus_tour.py``.
"""

import numpy as np

from diracmorph import check_conditions, converse_probe, fixture, geom_invariants, list_fixtures

for name in list_fixtures(include_auxiliary=True):
    fx = fixture(name)
    s = fx.scenario
    P = s.grid()
    inv = geom_invariants(s, P)
    rep = check_conditions(s)

    print(f"== {name}  (m={s.m}, n={s.n}, {P.shape[0]} grid points)")
    print(f"   lambda in [{inv.lam.min():.4f}, {inv.lam.max():.4f}]")
    print(f"   |mu_V| <= {np.linalg.norm(inv.mu_V, axis=1).max():.3e}   "
          f"|mu_H| <= {np.linalg.norm(inv.mu_H, axis=1).max():.3e}   "
          f"|I_H| <= {np.linalg.norm(inv.I_H, axis=-1).max():.3e}")
    print(f"   verdict {rep.verdict} (expected {fx.expected.verdict})")
    if rep.responsible:
        # the hand oracle is stored with the fixture
        print(f"   {rep.responsible} = {rep.condition_residuals()[rep.responsible]:.6f}, "
              f"hand value {fx.responsible_value():.6f}")
        probe = converse_probe(s, rep)
        print(f"   some harmonic pull-back has |D psi~|/|psi~| = {probe.observed:.4f} "
              f">= {probe.bound:.4f}")
    print()

# the derivations behind the numbers
print(fixture("heisenberg").oracle_note)
