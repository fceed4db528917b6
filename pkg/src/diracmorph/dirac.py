"""Spin connection, Dirac operators, pull-back spinors and the submersion chain rule.

Spinor components always refer to an orthonormal frame: the Gram-Schmidt frame
on N, the adapted frame ``{E_i, V_a}`` on M. The pull-back keeps components
fixed (``psi(pi(p)) (x) alpha(p)``); the dilation enters only through the frame
``E_i = lambda E_i^1`` used for derivatives and connection coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .analysis.fields import Box, FDConfig, Field, directional
from .clifford import AdaptedRep, GammaRep, build_gamma, clifford_mul, two_form_action
from .errors import (
    DimensionError,
    DiracMorphError,
    NonHarmonicWitnessError,
    NotRiemannianSubmersionError,
    VanishingSpinorError,
)
from .geometry import (
    AdaptedChart,
    FramePointData,
    GeomInvariants,
    OrthonormalChart,
    Scenario,
    _as_batch,
    _squeeze,
    check_input,
    invariants_from,
    local_geometry,
    stencil_guard,
)

FRAME_TAGS = ("adapted-M", "orthonormal-N")


class ChainRuleMismatch(DiracMorphError):
    pass


@dataclass(frozen=True, eq=False)
class ChartSpinorField:
    """Spinor field given by its components in an orthonormal frame.

    ``evaluator`` maps a batch of points ``(B, dim)`` to components ``(B, S)``.
    """

    rep: GammaRep | AdaptedRep
    evaluator: Callable[[np.ndarray], np.ndarray]
    frame_tag: str = "orthonormal-N"
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.frame_tag not in FRAME_TAGS:
            raise ValueError(f"frame_tag must be one of {FRAME_TAGS}")

    @classmethod
    def from_field(cls, f: Field, rep=None, frame_tag: str = "orthonormal-N") -> "ChartSpinorField":
        if f.kind != "spinor":
            raise DimensionError("expected a spinor field")
        if rep is None:
            rep = build_gamma(f.domain_dim)
        if rep.gammas.shape[-1] != f.shape[0]:
            raise DimensionError(f"spinor field has {f.shape[0]} components, representation needs "
                                 f"{rep.gammas.shape[-1]}")
        return cls(rep, f, frame_tag)

    def __call__(self, P) -> np.ndarray:
        P, single = _as_batch(P)
        return _squeeze(np.asarray(self.evaluator(P), dtype=complex), single)


def _as_spinor_field(psi, rep, tag) -> ChartSpinorField:
    if isinstance(psi, ChartSpinorField):
        return psi
    if isinstance(psi, Field):
        return ChartSpinorField.from_field(psi, rep, tag)
    return ChartSpinorField(rep, psi, tag)


# ---------------------------------------------------------------------------
# batch kernels

def _fd(fn, P, dirs, cfg):
    return directional(fn, P, dirs, cfg)


def _frame_derivatives(fn, P, F, cfg) -> np.ndarray:
    """``e_j(fn)`` for every frame vector: returns ``(B, d, *value_shape)``."""
    B, dim, d = F.shape
    dirs = np.swapaxes(F, 1, 2).reshape(B * d, dim)
    out = _fd(fn, np.repeat(P, d, axis=0), dirs, cfg)
    return out.reshape((B, d) + out.shape[1:])


def _pair_products(gam: np.ndarray) -> np.ndarray:
    return np.einsum("kst,ltu->klsu", gam, gam)


def _connection_action(Gamma, gam, psi) -> np.ndarray:
    """``(1/4) sum_{k,l} Gamma_{jkl} gamma_k gamma_l psi`` for every ``j``: ``(B, d, S)``."""
    Om = 0.25 * np.einsum("bjkl,klsu->bjsu", Gamma, _pair_products(gam))
    return np.einsum("bjsu,bu->bjs", Om, psi)


def _chart_for(s, tag):
    if isinstance(s, (AdaptedChart, OrthonormalChart)):
        return s
    if tag == "adapted-M":
        return s.total_chart
    return s.base_chart


def _nabla_batch(chart, gam, psi_fn, P, lg=None):
    lg = lg or local_geometry(chart, P)
    psi = np.asarray(psi_fn(P), dtype=complex)
    dpsi = _frame_derivatives(psi_fn, P, lg.F, chart.fd)
    conn = _connection_action(lg.Gamma, gam, psi)
    return psi, dpsi, conn, lg


def dirac_batch(chart, gam, psi_fn, P, lg=None) -> np.ndarray:
    _, dpsi, conn, _ = _nabla_batch(chart, gam, psi_fn, P, lg)
    return np.einsum("jst,bjt->bs", gam, dpsi + conn)


# ---------------------------------------------------------------------------
# public operations

@stencil_guard
def spin_covariant_derivative(s, rep, psi, fp, j: int) -> np.ndarray:
    """``e_j(psi) + 1/2 sum_{k<l} Gamma_{jk}^l e_k . e_l . psi`` at ``fp``."""
    psi = _as_spinor_field(psi, rep, "adapted-M")
    chart = _chart_for(s, psi.frame_tag)
    p = fp.p if isinstance(fp, FramePointData) else fp
    P, single = _as_batch(p)
    check_input(chart.domain, P)
    _, dpsi, conn, _ = _nabla_batch(chart, rep.gammas, psi, P)
    return _squeeze(dpsi[:, j] + conn[:, j], single)


@stencil_guard
def dirac_apply(s, rep, psi, p) -> np.ndarray:
    """``sum_j e_j . nabla_{e_j} psi`` in the frame named by ``psi.frame_tag``.

    ``s`` is a :class:`Scenario` or a chart object.
    """
    psi = _as_spinor_field(psi, rep, "orthonormal-N")
    chart = _chart_for(s, psi.frame_tag)
    P, single = _as_batch(p)
    check_input(chart.domain, P)
    gam = rep.gammas
    if gam.shape[0] != chart.frame_dim:
        raise DimensionError("representation does not match the chart dimension")
    return _squeeze(dirac_batch(chart, gam, psi, P), single)


@dataclass(frozen=True, eq=False)
class PullbackSpec:
    psi: ChartSpinorField
    alpha: Callable | None
    case: str  # codim1 | highcodim

    @classmethod
    def from_scenario(cls, s: Scenario, psi=None, alpha=None) -> "PullbackSpec":
        psi = s.psi if psi is None else psi
        if psi is None:
            raise ValueError("scenario has no spinor field psi")
        psi = _as_spinor_field(psi, s.base_rep, "orthonormal-N")
        if s.codim1:
            if alpha is not None:
                raise ValueError("alpha is fixed to 1 for one-dimensional fibres")
            return cls(psi, None, "codim1")
        alpha = alpha if alpha is not None else s.alpha
        if alpha is None:
            alpha = constant_alpha(s)
        return cls(psi, alpha, "highcodim")


def constant_alpha(s: Scenario) -> Field:
    """The constant first basis spinor of the fibre spinor space."""
    S = 2 ** (s.k // 2)
    return Field.spinor(["1"] + ["0"] * (S - 1), s.m, domain=s.domain_M)


def _alpha_values(spec: PullbackSpec, P) -> np.ndarray:
    if spec.alpha is None:
        return np.ones((P.shape[0], 1), dtype=complex)
    return np.asarray(spec.alpha(P), dtype=complex)


def pullback_evaluator(s: Scenario, spec: PullbackSpec) -> Callable:
    def ev(P):
        a = np.asarray(spec.psi(s.pi(P)), dtype=complex)
        b = _alpha_values(spec, P)
        return np.einsum("bi,bj->bij", a, b).reshape(P.shape[0], -1)
    return ev


def pullback_field(s: Scenario, spec: PullbackSpec) -> ChartSpinorField:
    return ChartSpinorField(s.adapted_rep, pullback_evaluator(s, spec), "adapted-M")


@stencil_guard
def pullback_spinor(s: Scenario, spec: PullbackSpec, fp) -> np.ndarray:
    """Components of the pull-back at ``fp`` in the adapted frame."""
    p = fp.p if isinstance(fp, FramePointData) else fp
    P, single = _as_batch(p)
    check_input(s.domain_M, P)
    if spec.case == "highcodim":
        a = _alpha_values(spec, P)
        if np.any(np.linalg.norm(a, axis=1) == 0):
            raise VanishingSpinorError("alpha vanishes", P[np.argmin(np.linalg.norm(a, axis=1))])
    return _squeeze(pullback_evaluator(s, spec)(P), single)


@dataclass(eq=False)
class _VerticalData:
    alpha: np.ndarray       # (B, Sv)
    nabla: np.ndarray       # (B, d, Sv): nabla^V_{e_j} alpha for every frame vector
    D_V: np.ndarray         # (B, Sv)


def _vertical_batch(s: Scenario, alpha_fn, P, lg) -> _VerticalData:
    rep = s.adapted_rep
    n = s.n
    gv = rep.fibre.gammas
    a = np.asarray(alpha_fn(P), dtype=complex)
    da = _frame_derivatives(alpha_fn, P, lg.F, s.fd)
    GV = lg.Gamma[:, :, n:, n:]
    conn = _connection_action(GV, gv, a)
    nab = da + conn
    D_V = np.einsum("ast,bat->bs", gv, nab[:, n:])
    return _VerticalData(a, nab, D_V)


@stencil_guard
def vertical_dirac(s: Scenario, fp, alpha) -> np.ndarray:
    """Fibre Dirac operator ``sum_a V_a . nabla^V_{V_a} alpha``; zero for one-dimensional fibres."""
    p = fp.p if isinstance(fp, FramePointData) else fp
    P, single = _as_batch(p)
    check_input(s.domain_M, P)
    if s.codim1:
        return _squeeze(np.zeros((P.shape[0], 1), dtype=complex), single)
    lg = local_geometry(s.total_chart, P)
    return _squeeze(_vertical_batch(s, alpha, P, lg).D_V, single)


@stencil_guard
def horizontal_parallel_residual(s: Scenario, fp, alpha) -> np.ndarray | float:
    """``max_i |nabla^V_{E_i} alpha|``; zero for one-dimensional fibres."""
    p = fp.p if isinstance(fp, FramePointData) else fp
    P, single = _as_batch(p)
    check_input(s.domain_M, P)
    if s.codim1:
        return 0.0 if single else np.zeros(P.shape[0])
    lg = local_geometry(s.total_chart, P)
    vd = _vertical_batch(s, alpha, P, lg)
    r = np.max(np.linalg.norm(vd.nabla[:, : s.n], axis=2), axis=1)
    return float(r[0]) if single else r


# ---------------------------------------------------------------------------
# chain rule

STEP_NAMES = ("step1", "step2", "step3", "step4", "step5")
TERM_NAMES = ("H0", "H1", "H2", "H3", "V0", "V1", "V2", "V3")


@dataclass(frozen=True, eq=False)
class StepCheck:
    lhs: np.ndarray
    rhs: np.ndarray
    residual: np.ndarray | float


@dataclass(frozen=True, eq=False)
class ChainRuleBreakdown:
    """Both sides of the chain rule, the eight labelled terms and the five step identities.

    ``rhs_parts`` holds the summands of the right-hand side: ``lift`` (lambda
    times the lifted base Dirac operator), ``fundamental``, ``alpha_parallel``,
    ``integrability`` and ``vertical``.
    """

    p: np.ndarray
    lhs: np.ndarray
    rhs_total: np.ndarray
    terms: dict
    steps: dict
    rhs_parts: dict
    residual: np.ndarray | float
    term_sum_residual: np.ndarray | float
    invariants: GeomInvariants
    psi_tilde: np.ndarray


def _block(Gamma, gam, psi, outer, s1, s2, coeff):
    Gs = np.zeros_like(Gamma)
    Gs[:, outer, s1, s2] = Gamma[:, outer, s1, s2]
    inner = _connection_action(Gs, gam, psi)  # (1/4) sum over the sub-block
    return (4.0 * coeff) * np.einsum("jst,bjt->bs", gam[outer], inner[:, outer])


def _norm(v):
    return np.linalg.norm(v, axis=-1)


def chain_rule_batch(s: Scenario, spec: PullbackSpec, P: np.ndarray) -> ChainRuleBreakdown:
    P = np.asarray(P, dtype=float)
    rep = s.adapted_rep
    gam = rep.gammas
    n, k = s.n, s.k
    hor, ver = slice(0, n), slice(n, n + k)
    chart = s.total_chart
    lg = local_geometry(chart, P)
    inv = invariants_from(lg, n)
    lam = lg.frames.lam

    pb = pullback_evaluator(s, spec)
    psi_t, dpsi, conn, _ = _nabla_batch(chart, gam, pb, P, lg)
    lhs = np.einsum("jst,bjt->bs", gam, dpsi + conn)

    G = lg.Gamma
    terms = {
        "H0": np.einsum("jst,bjt->bs", gam[hor], dpsi[:, hor]),
        "H1": _block(G, gam, psi_t, hor, hor, hor, 0.25),
        "H2": _block(G, gam, psi_t, hor, hor, ver, 0.5),
        "H3": _block(G, gam, psi_t, hor, ver, ver, 0.25),
        "V0": np.einsum("jst,bjt->bs", gam[ver], dpsi[:, ver]),
        "V1": _block(G, gam, psi_t, ver, hor, hor, 0.25),
        "V2": _block(G, gam, psi_t, ver, hor, ver, 0.5),
        "V3": _block(G, gam, psi_t, ver, ver, ver, 0.25),
    }

    # base side: D^N psi at pi(p), lifted with alpha and scaled by lambda
    Y = lg.frames.Y
    base = s.base_chart
    DN = dirac_batch(base, s.base_rep.gammas, spec.psi, Y)
    alpha = _alpha_values(spec, P)
    kron = lambda a, b: np.einsum("bi,bj->bij", a, b).reshape(a.shape[0], -1)
    lift = lam[:, None] * kron(DN, alpha)

    cm = lambda v, x: clifford_mul(rep, v, x)
    I_psi = two_form_action(rep, inv.I_H, psi_t)
    if s.codim1:
        fund_vec = inv.mu_V + (n - 1) * inv.grad_H_lnl + n * inv.mu_H
    else:
        fund_vec = k * inv.mu_V + (n - 1) * inv.grad_H_lnl
    parts = {
        "lift": lift,
        "fundamental": -0.5 * cm(fund_vec, psi_t),
        "integrability": 0.25 * I_psi,
    }
    psi_base = np.asarray(spec.psi(Y), dtype=complex)
    psi_bar = np.einsum("st,bt->bs", s.base_rep.chirality, psi_base)
    zero = np.zeros_like(psi_t)
    if s.codim1:
        parts["alpha_parallel"] = zero
        parts["vertical"] = zero
        alpha_par = zero
        psibar_DV = zero
    else:
        vd = _vertical_batch(s, spec.alpha, P, lg)
        alpha_par = np.zeros_like(psi_t)
        for i in range(n):
            alpha_par = alpha_par + np.einsum("st,bt->bs", gam[i], kron(psi_base, vd.nabla[:, i]))
        muH_alpha = clifford_mul(rep.fibre, inv.mu_H[:, ver], vd.alpha)
        parts["alpha_parallel"] = alpha_par
        parts["vertical"] = kron(psi_bar, vd.D_V - 0.5 * n * muH_alpha)
        psibar_DV = kron(psi_bar, vd.D_V)
    rhs = sum(parts.values())

    step_pairs = {
        "step1": (terms["H0"] + terms["H1"] + terms["H3"],
                  lift - 0.5 * (n - 1) * cm(inv.grad_H_lnl, psi_t) + alpha_par),
        "step2": (terms["V2"], -0.5 * k * cm(inv.mu_V, psi_t)),
        "step3": (terms["V0"] + terms["V3"], psibar_DV),
        "step4": (terms["H2"], 0.5 * I_psi - 0.5 * n * cm(inv.mu_H, psi_t)),
        "step5": (terms["V1"], -0.25 * I_psi),
    }
    steps = {name: StepCheck(a, b, _norm(a - b)) for name, (a, b) in step_pairs.items()}
    term_sum = sum(terms.values())
    return ChainRuleBreakdown(
        p=P, lhs=lhs, rhs_total=rhs, terms=terms, steps=steps, rhs_parts=parts,
        residual=_norm(lhs - rhs), term_sum_residual=_norm(term_sum - lhs),
        invariants=inv, psi_tilde=psi_t,
    )


def _squeeze_breakdown(b: ChainRuleBreakdown) -> ChainRuleBreakdown:
    f = lambda a: a[0]
    inv = b.invariants
    return ChainRuleBreakdown(
        p=f(b.p), lhs=f(b.lhs), rhs_total=f(b.rhs_total),
        terms={k: f(v) for k, v in b.terms.items()},
        steps={k: StepCheck(f(v.lhs), f(v.rhs), float(v.residual[0])) for k, v in b.steps.items()},
        rhs_parts={k: f(v) for k, v in b.rhs_parts.items()},
        residual=float(b.residual[0]), term_sum_residual=float(b.term_sum_residual[0]),
        invariants=GeomInvariants(*(f(a) for a in (inv.mu_V, inv.mu_H, inv.grad_H_lnl,
                                                     inv.grad_V_lnl, inv.I_H, inv.A, inv.lam))),
        psi_tilde=f(b.psi_tilde),
    )


@stencil_guard
def chain_rule(s: Scenario, spec: PullbackSpec, p) -> ChainRuleBreakdown:
    """Evaluate both sides of the chain rule and every proof-step identity at ``p``.

    ``p`` may be a single point or a batch ``(B, m)``.
    """
    P, single = _as_batch(p)
    check_input(s.domain_M, P)
    b = chain_rule_batch(s, spec, P)
    return _squeeze_breakdown(b) if single else b


@dataclass(frozen=True, eq=False)
class ONeillTerms:
    lift: np.ndarray
    mean_curvature: np.ndarray
    oneill: np.ndarray
    lhs: np.ndarray
    residual: np.ndarray | float


@stencil_guard
def oneill_chain_rule(s: Scenario, spec: PullbackSpec, p, tol: float = 1e-5) -> ONeillTerms:
    """Three-term form for Riemannian submersions with one-dimensional fibres.

    Returns the lifted base Dirac operator, ``-1/2 mu^V . psi~`` and
    ``-1/4 i sum_j E_j . A_{E_j} V . conj(psi~)``; raises
    :class:`ChainRuleMismatch` when their sum misses ``D^M psi~`` by more than ``tol``.
    """
    if not s.codim1:
        raise NotRiemannianSubmersionError("the three-term form needs one-dimensional fibres")
    P, single = _as_batch(p)
    check_input(s.domain_M, P)
    b = chain_rule_batch(s, spec, P)
    inv = b.invariants
    lam_dev = np.max(np.abs(inv.lam - 1.0))
    if lam_dev > s.tolerances.conformality:
        raise NotRiemannianSubmersionError(f"dilation differs from 1 by {lam_dev:.3g}", P[0])
    if np.max(_norm(inv.mu_H)) > s.tolerances.condition:
        raise NotRiemannianSubmersionError("horizontal mean curvature does not vanish", P[0])
    rep = s.adapted_rep
    psi_t = b.psi_tilde
    conj = np.einsum("st,bt->bs", rep.conjugation, psi_t)
    third = np.zeros_like(psi_t)
    for j in range(s.n):
        Aj = clifford_mul(rep, inv.A[:, j, 0], conj)
        third = third + np.einsum("st,bt->bs", rep.gammas[j], Aj)
    third = -0.25j * third
    middle = -0.5 * clifford_mul(rep, inv.mu_V, psi_t)
    lift = b.rhs_parts["lift"]
    res = _norm(lift + middle + third - b.lhs)
    if np.max(res) > tol:
        raise ChainRuleMismatch(f"three-term form misses the Dirac operator by {np.max(res):.3g}")
    if single:
        return ONeillTerms(lift[0], middle[0], third[0], b.lhs[0], float(res[0]))
    return ONeillTerms(lift, middle, third, b.lhs, res)


# ---------------------------------------------------------------------------
# flat two-dimensional harmonic spinors

def cauchy_riemann_residuals(fplus: Field, fminus: Field, P: np.ndarray, cfg: FDConfig):
    """``|d/dzbar f+|`` and ``|d/dz f-|`` with ``d/dz = d1 - i d2``, ``d/dzbar = d1 + i d2``."""
    e1 = np.tile([1.0, 0.0], (P.shape[0], 1))
    e2 = np.tile([0.0, 1.0], (P.shape[0], 1))
    d1p, d2p = _fd(fplus, P, e1, cfg), _fd(fplus, P, e2, cfg)
    d1m, d2m = _fd(fminus, P, e1, cfg), _fd(fminus, P, e2, cfg)
    return np.abs(d1p + 1j * d2p), np.abs(d1m - 1j * d2m)


@stencil_guard
def harmonic_spinor_2d(fplus, fminus="0", domain: Box | None = None, prefix: str = "y",
                       probes: int = 3, tol: float = 1e-6, cfg: FDConfig | None = None
                       ) -> ChartSpinorField:
    """Spinor ``(f+, f-)`` on flat R^2, checked to be harmonic.

    ``f+`` must be holomorphic and ``f-`` anti-holomorphic in ``z = x1 + i x2``
    (or the ``y`` coordinates); this is verified by finite differences on a
    ``probes x probes`` grid.

    Raises:
        NonHarmonicWitnessError: if a Cauchy-Riemann residual exceeds ``tol``.
    """
    domain = domain or Box.cube(2, side=2.0)
    cfg = cfg or FDConfig(step=1e-4 * domain.diameter, order=4)
    f = Field.spinor([fplus, fminus], 2, prefix=prefix, domain=domain)
    fp = Field.spinor([fplus], 2, prefix=prefix, domain=domain)
    fm = Field.spinor([fminus], 2, prefix=prefix, domain=domain)
    side = domain.hi - domain.lo
    P = domain.grid(probes, margin=0.1 * side)
    rp, rm = cauchy_riemann_residuals(lambda Q: fp(Q)[:, 0], lambda Q: fm(Q)[:, 0], P, cfg)
    r = float(max(rp.max(), rm.max()))
    if r > tol:
        raise NonHarmonicWitnessError(f"Cauchy-Riemann residual {r:.3g} exceeds {tol:.3g}")
    return ChartSpinorField(build_gamma(2), f, "orthonormal-N",
                            {"cr_residual": r, "fplus": fplus, "fminus": fminus})
