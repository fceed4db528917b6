"""Fields on chart boxes and central finite differences.

All evaluators in the package follow one calling convention: they take a batch
of points ``P`` of shape ``(B, dim)`` and return an array of shape
``(B, *value_shape)``. The finite-difference helpers here work on any such
callable, which is how nested derivatives (derivatives of frames that are
themselves built from Jacobians) are assembled.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from ..errors import DimensionError, DomainError, EvalError, StencilError
from .expr import compile_expr, is_complex, parse_expr

IMAG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box ``[lo_1, hi_1] x ... x [lo_d, hi_d]``."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float).reshape(-1)
        hi = np.asarray(self.hi, dtype=float).reshape(-1)
        if lo.shape != hi.shape or np.any(hi <= lo):
            raise DimensionError("box needs lo < hi componentwise")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "Box":
        a = np.asarray(pairs, dtype=float)
        return cls(a[:, 0], a[:, 1])

    @classmethod
    def cube(cls, dim: int, center=0.0, side: float = 0.5) -> "Box":
        c = np.broadcast_to(np.asarray(center, dtype=float), (dim,))
        return cls(c - side / 2, c + side / 2)

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi - self.lo))

    def contains(self, P, tol: float = 1e-12) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        return np.all((P >= self.lo - tol) & (P <= self.hi + tol), axis=-1)

    def check(self, P, what: str = "point"):
        P = np.asarray(P, dtype=float)
        inside = self.contains(P)
        if not np.all(inside):
            bad = P.reshape(-1, self.dim)[~inside.reshape(-1)][0]
            raise DomainError(f"{what} outside domain box", bad)

    def grid(self, points_per_axis: int, margin: float | np.ndarray = 0.0) -> np.ndarray:
        """Tensor grid of shape ``(N**dim, dim)`` inside the box shrunk by ``margin``."""
        margin = np.broadcast_to(np.asarray(margin, dtype=float), (self.dim,))
        lo, hi = self.lo + margin, self.hi - margin
        if np.any(hi < lo):
            raise DomainError("grid margin larger than the box")
        if points_per_axis == 1:
            axes = [np.array([0.5 * (a + b)]) for a, b in zip(lo, hi)]
        else:
            axes = [np.linspace(a, b, points_per_axis) for a, b in zip(lo, hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    def to_pairs(self) -> list[list[float]]:
        return [[float(a), float(b)] for a, b in zip(self.lo, self.hi)]


# ---------------------------------------------------------------------------
# fields

_KINDS = ("scalar", "vector", "matrix", "spinor")


@dataclass(frozen=True, eq=False)
class Field:
    """A scalar, vector, matrix or spinor valued function given by expressions.

    ``components`` is the row-major flattening of ``shape``. Real fields
    (metrics, maps) reject imaginary parts above ``IMAG_TOL``.
    """

    kind: str
    shape: tuple
    components: tuple
    domain_dim: int
    prefix: str = "x"
    domain: Box | None = None
    real: bool = True
    texts: tuple = dc_field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DimensionError(f"unknown field kind {self.kind!r}")
        if int(np.prod(self.shape, dtype=int)) != len(self.components):
            raise DimensionError(
                f"{self.kind} field of shape {self.shape} needs {int(np.prod(self.shape))} "
                f"components, got {len(self.components)}"
            )
        if self.domain is not None and self.domain.dim != self.domain_dim:
            raise DimensionError("domain box dimension does not match the field")
        if self.real:
            for c in self.components:
                if is_complex(c):
                    raise EvalError("imaginary unit in a real-valued field")
        compiled = tuple(
            compile_expr(c, self.domain_dim, self.prefix, real=self.real) for c in self.components
        )
        object.__setattr__(self, "_compiled", compiled)

    # constructors ---------------------------------------------------------
    @classmethod
    def _make(cls, kind, shape, texts, dim, prefix, domain, real):
        exprs = tuple(t if not isinstance(t, str) else parse_expr(t) for t in texts)
        return cls(kind, tuple(shape), exprs, dim, prefix, domain, real,
                   tuple(t if isinstance(t, str) else "" for t in texts))

    @classmethod
    def scalar(cls, text, dim, prefix="x", domain=None, real=True) -> "Field":
        return cls._make("scalar", (), [text], dim, prefix, domain, real)

    @classmethod
    def vector(cls, texts, dim, prefix="x", domain=None, real=True) -> "Field":
        return cls._make("vector", (len(texts),), list(texts), dim, prefix, domain, real)

    @classmethod
    def matrix(cls, rows, dim, prefix="x", domain=None, real=True) -> "Field":
        rows = [list(r) for r in rows]
        q = len(rows[0])
        if any(len(r) != q for r in rows):
            raise DimensionError("ragged matrix field")
        flat = [t for r in rows for t in r]
        return cls._make("matrix", (len(rows), q), flat, dim, prefix, domain, real)

    @classmethod
    def spinor(cls, texts, dim, prefix="x", domain=None) -> "Field":
        return cls._make("spinor", (len(texts),), list(texts), dim, prefix, domain, False)

    @classmethod
    def identity_matrix(cls, size, dim, prefix="x", domain=None) -> "Field":
        rows = [["1" if i == j else "0" for j in range(size)] for i in range(size)]
        return cls.matrix(rows, dim, prefix, domain)

    # evaluation -----------------------------------------------------------
    def __call__(self, P) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        single = P.ndim == 1
        if single:
            P = P[None, :]
        if P.shape[-1] != self.domain_dim:
            raise DimensionError(f"field on a {self.domain_dim}-dimensional chart got {P.shape[-1]} coordinates")
        if self.domain is not None:
            self.domain.check(P)
        vals = np.stack([f(P) for f in self._compiled], axis=-1)
        vals = vals.reshape(P.shape[:-1] + tuple(self.shape))
        if self.real:
            leak = np.max(np.abs(vals.imag), initial=0.0)
            if leak > IMAG_TOL:
                raise EvalError(f"imaginary part {leak:.3g} in a real-valued field")
            vals = vals.real.copy()
        return vals[0] if single else vals

    def with_domain(self, domain: Box) -> "Field":
        return Field(self.kind, self.shape, self.components, self.domain_dim, self.prefix,
                     domain, self.real, self.texts)


def eval_field(f: Field, p) -> np.ndarray:
    """Evaluate ``f`` at a single point (or a batch); see :meth:`Field.__call__`."""
    return f(p)


# ---------------------------------------------------------------------------
# finite differences

_STENCILS = {
    2: (np.array([-1.0, 1.0]), np.array([-0.5, 0.5])),
    4: (np.array([-2.0, -1.0, 1.0, 2.0]), np.array([1.0, -8.0, 8.0, -1.0]) / 12.0),
}


@dataclass(frozen=True)
class FDConfig:
    step: float = 1e-4
    order: int = 4
    richardson: bool = False

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("finite-difference step must be positive")
        if self.order not in _STENCILS:
            raise ValueError("finite-difference order must be 2 or 4")

    @property
    def reach(self) -> float:
        """Largest offset (in step units times step) any stencil point can have."""
        return float(np.max(np.abs(_STENCILS[self.order][0]))) * self.step

    @property
    def margin(self) -> float:
        return (2.0 if self.order == 2 else 3.0) * self.step

    def with_step(self, step: float) -> "FDConfig":
        return FDConfig(step, self.order, self.richardson)


def directional(fn: Callable, P: np.ndarray, dirs: np.ndarray, cfg: FDConfig) -> np.ndarray:
    """Central difference of ``fn`` along per-point vectors ``dirs``.

    ``P`` and ``dirs`` have shape ``(B, dim)``; returns ``(B, *value_shape)``.
    """
    P = np.asarray(P, dtype=float)
    dirs = np.asarray(dirs, dtype=float)
    offsets, weights = _STENCILS[cfg.order]

    def once(h):
        pts = P[:, None, :] + (h * offsets)[None, :, None] * dirs[:, None, :]
        B, s, dim = pts.shape
        vals = fn(pts.reshape(B * s, dim))
        vals = vals.reshape((B, s) + vals.shape[1:])
        return np.tensordot(weights, vals, axes=([0], [1])) / h

    d = once(cfg.step)
    if cfg.richardson:
        q = 2.0**cfg.order
        d = (q * once(cfg.step / 2) - d) / (q - 1.0)
    return d


def gradient(fn: Callable, P: np.ndarray, cfg: FDConfig) -> np.ndarray:
    """All coordinate partials: returns ``(B, dim, *value_shape)`` with axis 1 the direction."""
    P = np.asarray(P, dtype=float)
    B, dim = P.shape
    eye = np.eye(dim)
    Prep = np.repeat(P, dim, axis=0)
    dirs = np.tile(eye, (B, 1))
    d = directional(fn, Prep, dirs, cfg)
    return d.reshape((B, dim) + d.shape[1:])


def _check_stencil(f, P, cfg: FDConfig):
    dom = getattr(f, "domain", None)
    if dom is None:
        return
    reach = cfg.reach
    lo_ok = np.all(P - reach >= dom.lo - 1e-12, axis=-1)
    hi_ok = np.all(P + reach <= dom.hi + 1e-12, axis=-1)
    ok = lo_ok & hi_ok
    if not np.all(ok):
        raise StencilError("finite-difference stencil leaves the domain", P[~ok][0])


def derivative(f: Field | Callable, p, direction: int, cfg: FDConfig) -> np.ndarray:
    """Central difference of ``f`` along coordinate ``direction`` (0-based)."""
    P = np.asarray(p, dtype=float)
    single = P.ndim == 1
    P = np.atleast_2d(P)
    _check_stencil(f, P, cfg)
    dirs = np.zeros_like(P)
    dirs[:, direction] = 1.0
    d = directional(f, P, dirs, cfg)
    return d[0] if single else d


def jacobian(f: Field | Callable, p, cfg: FDConfig) -> np.ndarray:
    """Jacobian ``d f_k / d x_j`` of a vector field, shape ``(out, dim)`` per point."""
    P = np.asarray(p, dtype=float)
    single = P.ndim == 1
    P = np.atleast_2d(P)
    _check_stencil(f, P, cfg)
    g = gradient(f, P, cfg)  # (B, dim, out)
    J = np.swapaxes(g, 1, 2)
    return J[0] if single else J
