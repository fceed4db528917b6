"""Submersion geometry on chart boxes.

Frames are stored column-wise in coordinates: ``F[b, :, alpha]`` is the frame
vector ``e_alpha`` at point ``b``. Adapted frames on the total space list the
``n`` horizontal vectors ``E_i = lambda E_i^1`` first and the ``k = m - n``
vertical vectors ``V_a`` after them, matching the slot order of
:class:`~diracmorph.clifford.AdaptedRep`.

Connection coefficients are ``Gamma[b, alpha, beta, gamma] = g(nabla_{e_alpha} e_beta, e_gamma)``,
obtained from brackets of the frame fields with the orthonormal Koszul formula.
Brackets come from finite differences of the frame components, so everything
here evaluates batches of points at once.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .analysis.fields import Box, FDConfig, Field, directional, gradient
from .clifford import AdaptedRep, GammaRep, build_adapted_rep, build_gamma
from .errors import (
    DomainError,
    NotASubmersionError,
    NotHorizontallyConformalError,
    ScenarioError,
    StencilError,
)

RANK_TOL = 1e-10


@dataclass(frozen=True)
class Tolerances:
    conformality: float = 1e-6
    condition: float = 1e-4
    harmonicity: float = 1e-6

    def scaled(self, factor: float) -> "Tolerances":
        return Tolerances(self.conformality * factor, self.condition * factor,
                          self.harmonicity * factor)


@dataclass(frozen=True, eq=False)
class Scenario:
    """A horizontally conformal submersion ``pi: (M, g) -> (N, h)`` on chart boxes.

    ``g``/``h`` default to the Euclidean metric. ``psi`` (on N, ``y`` variables)
    and ``alpha`` (on M, ``x`` variables) are optional spinor fields.
    """

    m: int
    n: int
    domain_M: Box
    domain_N: Box
    pi: Field
    g: Field | None = None
    h: Field | None = None
    psi: Field | None = None
    alpha: Field | None = None
    fd: FDConfig | None = None
    tolerances: Tolerances = Tolerances()
    grid_points: int = 3
    name: str = "scenario"

    def __post_init__(self):
        m, n = self.m, self.n
        if n < 2 or n % 2:
            raise ScenarioError("base dimension n must be even and at least 2")
        if m <= n:
            raise ScenarioError("need m > n")
        if self.domain_M.dim != m or self.domain_N.dim != n:
            raise ScenarioError("domain boxes do not match the dimensions")
        if self.pi.shape != (n,) or self.pi.domain_dim != m:
            raise ScenarioError(f"map must be a vector field with {n} components on a {m}-dimensional chart")
        if self.g is not None and (self.g.shape != (m, m) or self.g.domain_dim != m):
            raise ScenarioError("metric g must be an m x m matrix field on M")
        if self.h is not None and (self.h.shape != (n, n) or self.h.domain_dim != n):
            raise ScenarioError("metric h must be an n x n matrix field on N")
        if self.psi is not None and (self.psi.shape != (2 ** (n // 2),) or self.psi.domain_dim != n):
            raise ScenarioError(f"psi must be a spinor field with {2 ** (n // 2)} components on N")
        k = m - n
        if self.alpha is not None:
            if k == 1:
                raise ScenarioError("alpha is fixed to 1 for one-dimensional fibres")
            if self.alpha.shape != (2 ** (k // 2),) or self.alpha.domain_dim != m:
                raise ScenarioError(f"alpha must be a spinor field with {2 ** (k // 2)} components on M")
        if self.grid_points < 1:
            raise ScenarioError("grid needs at least one point per axis")
        # fields are evaluated strictly inside their own chart box
        for attr, box in (("pi", self.domain_M), ("g", self.domain_M), ("alpha", self.domain_M),
                          ("h", self.domain_N), ("psi", self.domain_N)):
            f = getattr(self, attr)
            if f is not None and f.domain is None:
                object.__setattr__(self, attr, f.with_domain(box))
        if self.fd is None:
            object.__setattr__(self, "fd", FDConfig(step=1e-4 * self.domain_M.diameter, order=4))

    @property
    def k(self) -> int:
        return self.m - self.n

    @property
    def codim1(self) -> bool:
        return self.k == 1

    @cached_property
    def adapted_rep(self) -> AdaptedRep:
        return build_adapted_rep(self.n, self.k)

    @cached_property
    def base_rep(self) -> GammaRep:
        return build_gamma(self.n)

    @cached_property
    def pivots(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Coordinate columns used to solve for the kernel of ``d pi``.

        Chosen once at the domain centre (largest ``|det|`` block) so that the
        kernel basis is a smooth field over the whole chart.
        """
        c = self.domain_M.center[None, :]
        J = np.swapaxes(gradient(self.pi, c, self.fd), 1, 2)[0]
        best, best_det = None, -1.0
        for cols in itertools.combinations(range(self.m), self.n):
            d = abs(np.linalg.det(J[:, cols]))
            if d > best_det + 1e-14:
                best, best_det = cols, d
        sv = np.linalg.svd(J, compute_uv=False)
        if best_det <= 0 or sv[-1] <= RANK_TOL * max(sv[0], 1.0):
            raise NotASubmersionError("d pi is not surjective at the domain centre", c[0])
        free = tuple(j for j in range(self.m) if j not in best)
        return best, free

    @cached_property
    def total_chart(self) -> "AdaptedChart":
        return AdaptedChart(self)

    @cached_property
    def base_chart(self) -> "OrthonormalChart":
        return OrthonormalChart(self.n, self.domain_N, self.h, self.fd)

    def grid(self, points_per_axis: int | None = None) -> np.ndarray:
        """Sample points of M, kept 10% of the box side away from the faces.

        The margin also covers two nested finite-difference stencils (frame
        derivatives of frames that are themselves built from Jacobians).
        """
        N = self.grid_points if points_per_axis is None else points_per_axis
        side = self.domain_M.hi - self.domain_M.lo
        return self.domain_M.grid(N, margin=np.maximum(0.1 * side, 3 * self.fd.margin))

    def with_fd(self, fd: FDConfig) -> "Scenario":
        return _replace(self, fd=fd)

    def with_options(self, **kw) -> "Scenario":
        return _replace(self, **kw)


def _replace(s: Scenario, **kw) -> Scenario:
    fields = dict(m=s.m, n=s.n, domain_M=s.domain_M, domain_N=s.domain_N, pi=s.pi, g=s.g,
                  h=s.h, psi=s.psi, alpha=s.alpha, fd=s.fd, tolerances=s.tolerances,
                  grid_points=s.grid_points, name=s.name)
    fields.update(kw)
    return Scenario(**fields)


# ---------------------------------------------------------------------------
# linear algebra on batches

def _ip(u, v, G):
    return np.einsum("bi,bij,bj->b", u, G, v)


def gram_schmidt(K: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt of the columns of ``K`` (B, dim, r) w.r.t. metrics ``G``."""
    U = np.array(K, dtype=float, copy=True)
    for a in range(U.shape[2]):
        v = U[:, :, a]
        for b in range(a):
            u = U[:, :, b]
            v = v - _ip(u, v, G)[:, None] * u
        nrm2 = _ip(v, v, G)
        if np.any(nrm2 <= 0):
            raise NotASubmersionError("degenerate vectors in Gram-Schmidt")
        U[:, :, a] = v / np.sqrt(nrm2)[:, None]
    return U


def metric_batch(field: Field | None, P: np.ndarray, dim: int) -> np.ndarray:
    B = P.shape[0]
    if field is None:
        return np.broadcast_to(np.eye(dim), (B, dim, dim)).copy()
    G = field(P)
    asym = np.max(np.abs(G - np.swapaxes(G, 1, 2)), initial=0.0)
    if asym > 1e-12 * max(1.0, float(np.max(np.abs(G)))):
        raise ScenarioError("metric field is not symmetric")
    ev_min = np.linalg.eigvalsh(G)[:, 0]
    if np.any(ev_min <= 0):
        bad = int(np.argmin(ev_min))
        raise ScenarioError(f"metric is not positive definite at point {tuple(np.round(P[bad], 6))}")
    return G


# ---------------------------------------------------------------------------
# charts with orthonormal frame fields

class OrthonormalChart:
    """Riemannian chart with the Gram-Schmidt orthonormalisation of the coordinate frame."""

    def __init__(self, dim: int, domain: Box, metric: Field | None = None, fd: FDConfig | None = None):
        self.dim = dim
        self.domain = domain
        self.metric = metric if metric is None or metric.domain is not None else metric.with_domain(domain)
        self.fd = fd or FDConfig(step=1e-4 * domain.diameter)

    @property
    def frame_dim(self) -> int:
        return self.dim

    def metric_at(self, P):
        return metric_batch(self.metric, P, self.dim)

    def frame_at(self, P) -> np.ndarray:
        G = self.metric_at(P)
        if self.metric is None:
            return G  # identity
        return gram_schmidt(np.broadcast_to(np.eye(self.dim), G.shape), G)

    def features(self, P) -> np.ndarray:
        F = self.frame_at(P)
        return F.reshape(F.shape[0], -1)


@dataclass(eq=False)
class FrameBatch:
    P: np.ndarray
    Y: np.ndarray        # pi(P)
    J: np.ndarray        # (B, n, m)
    G: np.ndarray        # (B, m, m)
    V: np.ndarray        # (B, m, k) columns
    E1: np.ndarray       # (B, m, n) horizontal lifts of X
    E: np.ndarray        # (B, m, n) g-unit horizontal frame
    X: np.ndarray        # (B, n, n) h-orthonormal frame at pi(P)
    lam: np.ndarray      # (B,)
    residual: np.ndarray  # (B,)

    @property
    def F(self) -> np.ndarray:
        return np.concatenate([self.E, self.V], axis=2)


def frame_batch(s: Scenario, P: np.ndarray, check: bool = True) -> FrameBatch:
    P = np.asarray(P, dtype=float)
    m, n, k = s.m, s.n, s.k
    B = P.shape[0]
    J = np.swapaxes(gradient(s.pi, P, s.fd), 1, 2)
    sv = np.linalg.svd(J, compute_uv=False)
    bad = sv[:, -1] <= RANK_TOL * np.maximum(sv[:, 0], 1.0)
    if np.any(bad):
        raise NotASubmersionError("d pi is not surjective", P[np.argmax(bad)])
    G = metric_batch(s.g, P, m)
    Y = s.pi(P)
    H = metric_batch(s.h, Y, n)
    X = H if s.h is None else gram_schmidt(np.broadcast_to(np.eye(n), H.shape), H)

    piv, free = s.pivots
    Jp = J[:, :, piv]
    if np.any(np.abs(np.linalg.det(Jp)) <= RANK_TOL * np.maximum(sv[:, 0], 1.0) ** n):
        raise NotASubmersionError("kernel pivot block became singular inside the chart")
    K = np.zeros((B, m, k))
    K[:, list(free), :] = np.eye(k)
    K[:, list(piv), :] = -np.linalg.solve(Jp, J[:, :, list(free)])
    V = gram_schmidt(K, G)

    # horizontal lift: E1 = G^-1 J^T (J G^-1 J^T)^-1 X
    A = np.linalg.solve(G, np.swapaxes(J, 1, 2))
    E1 = A @ np.linalg.solve(J @ A, X)

    gram = np.einsum("bmi,bmn,bnj->bij", E1, G, E1)
    lam2 = np.mean(1.0 / np.einsum("bii->bi", gram), axis=1)
    # pull-back of h on the lifts is h(X_i, X_j) = delta_ij
    residual = np.max(np.abs(np.eye(n) - lam2[:, None, None] * gram), axis=(1, 2))
    if check and np.any(residual > s.tolerances.conformality):
        worst = int(np.argmax(residual))
        raise NotHorizontallyConformalError(
            f"not horizontally conformal: residual {residual[worst]:.3g} exceeds "
            f"{s.tolerances.conformality:.3g}", P[worst])
    lam = np.sqrt(lam2)
    return FrameBatch(P, Y, J, G, V, E1, lam[:, None, None] * E1, X, lam, residual)


class AdaptedChart:
    """The total space with its adapted orthonormal frame ``{E_i, V_a}``."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.dim = scenario.m
        self.domain = scenario.domain_M
        self.metric = scenario.g
        self.fd = scenario.fd

    @property
    def frame_dim(self) -> int:
        return self.dim

    def metric_at(self, P):
        return metric_batch(self.metric, P, self.dim)

    def frame_at(self, P) -> np.ndarray:
        return frame_batch(self.scenario, P).F

    def features(self, P) -> np.ndarray:
        fb = frame_batch(self.scenario, P)
        F = fb.F
        return np.concatenate([F.reshape(F.shape[0], -1), np.log(fb.lam)[:, None]], axis=1)


# ---------------------------------------------------------------------------
# connection coefficients

@dataclass(eq=False)
class LocalGeometry:
    P: np.ndarray
    F: np.ndarray       # (B, dim, d)
    G: np.ndarray       # (B, dim, dim)
    C: np.ndarray       # (B, d, d, d): g([e_a, e_b], e_c)
    Gamma: np.ndarray   # (B, d, d, d): g(nabla_{e_a} e_b, e_c)
    dlnl: np.ndarray | None  # (B, dim) coordinate gradient of ln lambda
    frames: FrameBatch | None


def local_geometry(chart, P: np.ndarray) -> LocalGeometry:
    """Frame, brackets and Levi-Civita coefficients of ``chart`` at a batch of points."""
    P = np.asarray(P, dtype=float)
    B, dim = P.shape
    cfg = chart.fd
    if isinstance(chart, AdaptedChart):
        fb = frame_batch(chart.scenario, P)
        F = fb.F
    else:
        fb = None
        F = chart.frame_at(P)
    d = F.shape[2]
    D = gradient(chart.features, P, cfg)  # (B, dim_nu, nfeat)
    dF = D[:, :, : dim * d].reshape(B, dim, dim, d)  # d_nu F^mu_beta
    dlnl = D[:, :, dim * d] if fb is not None else None
    G = chart.metric_at(P)
    # T[b, mu, a, c] = e_a(e_c^mu); bracket [e_a, e_c] = T - T^swap
    T = np.einsum("bna,bnmc->bmac", F, dF)
    Br = T - np.swapaxes(T, 2, 3)
    C = np.einsum("bmac,bmn,bnd->bacd", Br, G, F)
    Gamma = 0.5 * (C - np.swapaxes(C, 2, 3) - np.einsum("zbca->zabc", C))
    return LocalGeometry(P, F, G, C, Gamma, dlnl, fb)


# ---------------------------------------------------------------------------
# public per-point API

def stencil_guard(fn):
    """Report domain violations raised inside finite-difference stencils as :class:`StencilError`.

    Public entry points check their own input points first, so any later
    :class:`DomainError` comes from a stencil poking outside a chart box.
    """
    @functools.wraps(fn)
    def wrapper(*args, **kw):
        try:
            return fn(*args, **kw)
        except StencilError:
            raise
        except DomainError as e:
            if getattr(e, "_input_check", False):
                raise
            raise StencilError("finite-difference stencil leaves the domain", e.point) from e
    return wrapper

def _as_batch(p) -> tuple[np.ndarray, bool]:
    P = np.asarray(p, dtype=float)
    if P.ndim == 1:
        return P[None, :], True
    return P, False


def _squeeze(a, single):
    return a[0] if single and a is not None else a


@dataclass(frozen=True, eq=False)
class FramePointData:
    """Adapted frame at a point (or a batch, with a leading batch axis).

    Vectors are stored as rows: ``V[a]``, ``E1[i]``, ``E[i]`` are coordinate
    vectors on M and ``X[i]`` a coordinate vector on N.
    """

    p: np.ndarray
    V: np.ndarray
    E1: np.ndarray
    E: np.ndarray
    X: np.ndarray
    lam: np.ndarray | float
    conformality_residual: np.ndarray | float

    @property
    def frame(self) -> np.ndarray:
        """Frame vectors as rows, horizontal first."""
        return np.concatenate([self.E, self.V], axis=-2)


def check_input(box: Box, P):
    """Domain check for caller-supplied points (not converted by :func:`stencil_guard`)."""
    try:
        box.check(P)
    except DomainError as e:
        e._input_check = True
        raise


def _check_inside(s_or_chart, P):
    dom = s_or_chart.domain_M if isinstance(s_or_chart, Scenario) else s_or_chart.domain
    check_input(dom, P)


@stencil_guard
def adapted_frame(s: Scenario, p) -> FramePointData:
    """Adapted orthonormal frame, dilation and conformality residual at ``p``."""
    P, single = _as_batch(p)
    _check_inside(s, P)
    fb = frame_batch(s, P)
    sq = lambda a: _squeeze(a, single)
    return FramePointData(
        p=sq(P), V=sq(np.swapaxes(fb.V, 1, 2)), E1=sq(np.swapaxes(fb.E1, 1, 2)),
        E=sq(np.swapaxes(fb.E, 1, 2)), X=sq(np.swapaxes(fb.X, 1, 2)),
        lam=sq(fb.lam), conformality_residual=sq(fb.residual),
    )


def _point_of(fp):
    return fp.p if isinstance(fp, FramePointData) else np.asarray(fp, dtype=float)


@stencil_guard
def frame_connection(s, fp) -> np.ndarray:
    """``Gamma[alpha, beta, gamma] = g(nabla_{e_alpha} e_beta, e_gamma)`` in the adapted frame.

    ``s`` may also be a chart (e.g. ``s.base_chart``) and ``fp`` a bare point.
    """
    chart = s.total_chart if isinstance(s, Scenario) else s
    P, single = _as_batch(_point_of(fp))
    _check_inside(chart, P)
    return _squeeze(local_geometry(chart, P).Gamma, single)


@dataclass(frozen=True, eq=False)
class GeomInvariants:
    """Invariants at a point, all vectors in adapted-frame coefficients (horizontal first).

    ``I_H[i, j]`` is the vertical vector ``[E_i, E_j]^V``; ``A[i, a]`` is the
    horizontal vector ``(nabla_{E_i} V_a)^H``.
    """

    mu_V: np.ndarray
    mu_H: np.ndarray
    grad_H_lnl: np.ndarray
    grad_V_lnl: np.ndarray
    I_H: np.ndarray
    A: np.ndarray
    lam: np.ndarray | float


def invariants_from(lg: LocalGeometry, n: int) -> GeomInvariants:
    Gam, C = lg.Gamma, lg.C
    B, d = Gam.shape[0], Gam.shape[1]
    k = d - n
    hor, ver = slice(0, n), slice(n, d)
    mu_V = np.zeros((B, d))
    mu_V[:, hor] = np.einsum("baai->bi", Gam[:, ver, ver, hor]) / k
    mu_H = np.zeros((B, d))
    mu_H[:, ver] = np.einsum("biia->ba", Gam[:, hor, hor, ver]) / n
    I_H = np.zeros((B, n, n, d))
    I_H[:, :, :, ver] = C[:, hor, hor, ver]
    # frame derivatives of ln(lambda)
    e_lnl = np.einsum("bn,bna->ba", lg.dlnl, lg.F)
    gH = np.zeros((B, d))
    gV = np.zeros((B, d))
    gH[:, hor] = e_lnl[:, hor]
    gV[:, ver] = e_lnl[:, ver]
    A = np.zeros((B, n, k, d))
    A[:, :, :, hor] = Gam[:, hor, ver, hor]
    return GeomInvariants(mu_V, mu_H, gH, gV, I_H, A, lg.frames.lam)


@stencil_guard
def geom_invariants(s: Scenario, fp) -> GeomInvariants:
    """Mean curvatures, integrability tensor, O'Neill A and gradients of ln(lambda)."""
    P, single = _as_batch(_point_of(fp))
    _check_inside(s, P)
    inv = invariants_from(local_geometry(s.total_chart, P), s.n)
    if not single:
        return inv
    return GeomInvariants(*(a[0] for a in (inv.mu_V, inv.mu_H, inv.grad_H_lnl, inv.grad_V_lnl,
                                           inv.I_H, inv.A, inv.lam)))


def frame_to_coords(frame_rows: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Coordinate components of a vector given by frame coefficients."""
    return np.einsum("...a,...am->...m", coeffs, frame_rows)


def pushforward_check(s: Scenario, fp: FramePointData) -> float:
    """``max |d pi(V_a)|``, which vanishes for vertical vectors."""
    P, _ = _as_batch(fp.p)
    V = np.atleast_3d(fp.V) if fp.V.ndim == 2 else fp.V
    V = V.reshape(P.shape[0], s.k, s.m)
    dirs = V.reshape(-1, s.m)
    out = directional(s.pi, np.repeat(P, s.k, axis=0), dirs, s.fd)
    return float(np.max(np.abs(out)))


__all__ = [
    "AdaptedChart", "FrameBatch", "FramePointData", "GeomInvariants", "LocalGeometry",
    "OrthonormalChart", "Scenario", "Tolerances", "adapted_frame", "frame_batch",
    "frame_connection", "frame_to_coords", "geom_invariants", "gram_schmidt", "invariants_from",
    "check_input", "local_geometry", "metric_batch", "pushforward_check", "stencil_guard",
]
