"""Complex gamma-matrix representations of Clifford algebras.

Sign convention: ``v . v = -|v|^2``, i.e. ``gamma_a gamma_b + gamma_b gamma_a = -2 delta_ab``.
Chirality of an even-dimensional representation is ``i^(d/2) gamma_1 ... gamma_d``.

Representations are built by doubling from two seeds::

    d = 1:  gamma_1 = [[i]]
    d = 2:  gamma_1 = [[0, -1], [1, 0]],  gamma_2 = [[0, i], [i, 0]]

Going from ``2k`` to ``2k + 1`` generators appends ``i * omega_2k``; going from
``2k`` to ``2k + 2`` uses ``gamma_a (x) 1`` for the old generators and
``omega_2k (x) seed_b`` for the two new ones. The adapted representations below
use the same tensor layout, so horizontal slots come first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError

CONVENTION = "doubling-omega-kron/v1"

_SEED2 = np.array(
    [[[0, -1], [1, 0]],
     [[0, 1j], [1j, 0]]],
    dtype=complex,
)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _volume(gammas: np.ndarray) -> np.ndarray:
    out = np.eye(gammas.shape[-1], dtype=complex)
    for g in gammas:
        out = out @ g
    return out


def chirality_of(gammas: np.ndarray) -> np.ndarray:
    d = len(gammas)
    if d % 2:
        raise DimensionError("chirality needs an even number of generators")
    return (1j ** (d // 2)) * _volume(gammas)


@dataclass(frozen=True, eq=False)
class GammaRep:
    """Irreducible complex representation of the Clifford algebra on ``dim`` generators."""

    dim: int
    spinor_dim: int
    gammas: np.ndarray  # (dim, S, S)
    chirality: np.ndarray | None
    convention_id: str = CONVENTION

    def volume(self) -> np.ndarray:
        """Ordered product ``gamma_1 ... gamma_dim``."""
        return _volume(self.gammas)


@lru_cache(maxsize=None)
def build_gamma(d: int) -> GammaRep:
    """Deterministic gamma matrices for ``d >= 1`` generators."""
    if int(d) != d or d < 1:
        raise DimensionError("number of generators must be a positive integer")
    d = int(d)
    if d == 1:
        gam = np.array([[[1j]]])
    elif d == 2:
        gam = _SEED2.copy()
    elif d % 2 == 1:
        prev = build_gamma(d - 1)
        gam = np.concatenate([prev.gammas, (1j * prev.chirality)[None]], axis=0)
    else:
        prev = build_gamma(d - 2)
        one = np.eye(2)
        old = [np.kron(g, one) for g in prev.gammas]
        new = [np.kron(prev.chirality, s) for s in _SEED2]
        gam = np.array(old + new)
    chi = chirality_of(gam) if d % 2 == 0 else None
    return GammaRep(d, gam.shape[-1], _frozen(gam), None if chi is None else _frozen(chi))


@dataclass(frozen=True, eq=False)
class AdaptedRep:
    """Representation on ``S_H (x) S_V`` for an ``n``-dimensional base and ``k``-dimensional fibre.

    Horizontal slots ``0..n-1`` act as ``gamma^N_i (x) 1``; vertical slots act as
    ``omega_N (x) gamma^V_a`` (or ``i omega_N`` when ``k == 1``). ``conjugation``
    is the grading ``omega_N (x) 1``.
    """

    n: int
    k: int
    base: GammaRep
    fibre: GammaRep | None
    gammas: np.ndarray  # (n + k, S, S)
    conjugation: np.ndarray
    chirality: np.ndarray | None

    @property
    def dim(self) -> int:
        return self.n + self.k

    @property
    def spinor_dim(self) -> int:
        return self.gammas.shape[-1]

    @property
    def fibre_spinor_dim(self) -> int:
        return 1 if self.fibre is None else self.fibre.spinor_dim

    @property
    def total(self) -> GammaRep:
        return GammaRep(self.dim, self.spinor_dim, self.gammas, self.chirality)

    def volume(self) -> np.ndarray:
        return _volume(self.gammas)


@lru_cache(maxsize=None)
def build_adapted_rep(n: int, k: int) -> AdaptedRep:
    """Adapted representation for base dimension ``n`` (even) and fibre dimension ``k``."""
    if n < 2 or n % 2:
        raise DimensionError("base dimension n must be even and at least 2")
    if k < 1:
        raise DimensionError("fibre dimension k must be positive")
    base = build_gamma(n)
    omega = base.chirality
    if k == 1:
        fibre = None
        gam = np.concatenate([base.gammas, (1j * omega)[None]], axis=0)
        conj = omega
    else:
        fibre = build_gamma(k)
        one_v = np.eye(fibre.spinor_dim)
        hor = [np.kron(g, one_v) for g in base.gammas]
        ver = [np.kron(omega, g) for g in fibre.gammas]
        gam = np.array(hor + ver)
        conj = np.kron(omega, one_v)
    chi = chirality_of(gam) if (n + k) % 2 == 0 else None
    return AdaptedRep(n, k, base, fibre, _frozen(gam), _frozen(conj),
                      None if chi is None else _frozen(chi))


# ---------------------------------------------------------------------------
# actions on spinors

def _gammas(rep) -> np.ndarray:
    return rep.gammas


def clifford_mul(rep, v, psi) -> np.ndarray:
    """Clifford product ``v . psi`` for frame-coefficient vector(s) ``v``.

    Broadcasts over leading batch axes of ``v`` and ``psi``.
    """
    gam = _gammas(rep)
    v = np.asarray(v)
    psi = np.asarray(psi)
    if v.shape[-1] != gam.shape[0]:
        raise DimensionError(f"vector has {v.shape[-1]} frame coefficients, representation has {gam.shape[0]}")
    if psi.shape[-1] != gam.shape[-1]:
        raise DimensionError(f"spinor has {psi.shape[-1]} components, representation needs {gam.shape[-1]}")
    op = np.einsum("...a,ast->...st", v, gam)
    return np.einsum("...st,...t->...s", op, psi)


def conjugate(rep: AdaptedRep, psi) -> np.ndarray:
    """Apply the grading: ``+1`` on positive, ``-1`` on negative chirality."""
    psi = np.asarray(psi)
    if psi.shape[-1] != rep.conjugation.shape[0]:
        raise DimensionError("spinor dimension does not match the representation")
    return np.einsum("st,...t->...s", rep.conjugation, psi)


def two_form_action(rep: AdaptedRep, F, psi, tol: float = 1e-10) -> np.ndarray:
    """``sum_{i<j} E_i . E_j . F(i, j) . psi`` for a vertical-vector-valued 2-form.

    ``F`` has shape ``(..., n, n, n + k)`` in frame coefficients.
    """
    F = np.asarray(F)
    n = rep.n
    if F.shape[-3:] != (n, n, rep.dim):
        raise DimensionError(f"2-form must have shape (..., {n}, {n}, {rep.dim})")
    scale = max(1.0, float(np.max(np.abs(F), initial=0.0)))
    if np.max(np.abs(F + np.swapaxes(F, -3, -2)), initial=0.0) > tol * scale:
        raise ValueError("2-form is not antisymmetric")
    if np.max(np.abs(F[..., :n]), initial=0.0) > tol * scale:
        raise ValueError("2-form values must be vertical")
    psi = np.asarray(psi)
    out = np.zeros(np.broadcast_shapes(F.shape[:-3] + (psi.shape[-1],), psi.shape), dtype=complex)
    gam = rep.gammas
    for i in range(n):
        for j in range(i + 1, n):
            w = clifford_mul(rep, F[..., i, j, :], psi)
            out = out + np.einsum("st,...t->...s", gam[i] @ gam[j], w)
    return out


def vertical_mul(rep: AdaptedRep, w, alpha) -> np.ndarray:
    """Action of a vertical vector (fibre coefficients, length ``k``) on a fibre spinor."""
    if rep.fibre is None:
        raise DimensionError("one-dimensional fibres carry no fibre representation")
    return clifford_mul(rep.fibre, w, alpha)
