"""INI-style scenario files.

Example::

    [dimensions]
    m = 3
    n = 2

    [domain]
    M = -0.25, 0.25, -0.25, 0.25, -0.25, 0.25
    N = -0.5, 0.5, -0.5, 0.5

    [metric_g]
    g_22 = 1 + x1^2
    g_23 = -x1

    [map]
    pi_1 = x1
    pi_2 = x2

    [spinor]
    psi_1 = exp(y1)*cos(y2)
    psi_2 = 0

    [numerics]
    h = 1e-4
    order = 4
    grid = 3

Unlisted metric entries default to the Kronecker delta and the symmetric
partner of an off-diagonal entry is filled in. Spinor components on N use the
``y`` variables, everything on M uses ``x``.
"""

from __future__ import annotations

import configparser
import re
from pathlib import Path

from .analysis.expr import compile_expr, is_complex, parse_expr
from .analysis.fields import Box, FDConfig, Field
from .errors import DiracMorphError, ExprSyntaxError, ScenarioFileError
from .geometry import Scenario, Tolerances

SECTIONS = ("dimensions", "domain", "metric_g", "metric_h", "map", "spinor", "numerics", "meta")
_INDEX_RE = re.compile(r"^(g|h)_?(\d)_?(\d)$")
_COMP_RE = re.compile(r"^(pi|psi|alpha)_?(\d+)$")
_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=#;\s][^=]*?)\s*=")


def _line_index(text: str) -> dict:
    """Map ``(section, key)`` and ``(section, None)`` to 1-based line numbers."""
    out, section = {}, None
    for no, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            out.setdefault((section, None), no)
            continue
        m = _KEY_RE.match(line)
        if m and section is not None:
            out.setdefault((section, m.group(1).strip()), no)
    return out


class _Reader:
    def __init__(self, text: str, path: str):
        self.path = path
        self.lines = _line_index(text)
        self.cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                            inline_comment_prefixes=("#",), interpolation=None)
        self.cp.optionxform = str
        try:
            self.cp.read_string(text, source=path)
        except configparser.Error as e:
            raise ScenarioFileError(str(e).splitlines()[0], path, getattr(e, "lineno", None)) from e
        for sec in self.cp.sections():
            if sec not in SECTIONS:
                self.fail(f"unknown section [{sec}]", sec)

    def line(self, section, key=None):
        return self.lines.get((section, key), self.lines.get((section, None)))

    def fail(self, msg, section=None, key=None):
        raise ScenarioFileError(msg, self.path, self.line(section, key) if section else None)

    def items(self, section):
        return list(self.cp.items(section)) if self.cp.has_section(section) else []

    def get(self, section, key, default=None, required=False):
        if self.cp.has_option(section, key):
            return self.cp.get(section, key).strip()
        if required:
            self.fail(f"missing [{section}] {key}", section)
        return default

    def number(self, section, key, kind, default=None, required=False):
        raw = self.get(section, key, None, required)
        if raw is None:
            return default
        try:
            return kind(raw)
        except ValueError:
            self.fail(f"[{section}] {key}: expected a number, got {raw!r}", section, key)

    def expr(self, section, key, text, dim, prefix, real):
        try:
            tree = parse_expr(text)
            compile_expr(tree, dim, prefix, real)
        except ExprSyntaxError as err:
            self.fail(f"[{section}] {key}: {err}", section, key)
        if real and is_complex(tree):
            self.fail(f"[{section}] {key}: imaginary unit in a real-valued entry", section, key)
        return text


def _box(reader: _Reader, key: str, dim: int) -> Box:
    raw = reader.get("domain", key, required=True)
    parts = [p for p in re.split(r"[,\s()\[\]]+", raw) if p]
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        reader.fail(f"[domain] {key}: expected numbers", "domain", key)
    if len(vals) != 2 * dim:
        reader.fail(f"[domain] {key}: expected {dim} min/max pairs, got {len(vals)} numbers",
                    "domain", key)
    pairs = [vals[2 * i: 2 * i + 2] for i in range(dim)]
    if any(lo >= hi for lo, hi in pairs):
        reader.fail(f"[domain] {key}: each pair needs min < max", "domain", key)
    return Box.from_pairs(pairs)


def _metric(reader: _Reader, section: str, dim: int, letter: str, prefix: str):
    items = reader.items(section)
    if not items:
        return None
    M = [["1" if i == j else "0" for j in range(dim)] for i in range(dim)]
    seen = {}
    for key, val in items:
        m = _INDEX_RE.match(key)
        if not m or m.group(1) != letter:
            reader.fail(f"[{section}] unknown entry {key!r} (expected {letter}_ij)", section, key)
        i, j = int(m.group(2)) - 1, int(m.group(3)) - 1
        if not (0 <= i < dim and 0 <= j < dim):
            reader.fail(f"[{section}] {key}: index outside 1..{dim}", section, key)
        text = reader.expr(section, key, val.strip(), dim, prefix, True)
        pair = (min(i, j), max(i, j))
        if pair in seen and seen[pair] != text:
            reader.fail(f"[{section}] {key} conflicts with its symmetric entry", section, key)
        seen[pair] = text
        M[i][j] = M[j][i] = text
    try:
        return Field.matrix(M, dim, prefix=prefix)
    except DiracMorphError as e:
        reader.fail(f"[{section}] {e}", section)


def _components(reader: _Reader, section: str, name: str, count: int, dim: int,
                prefix: str = "x", real: bool = False):
    comps = {}
    for key, val in reader.items(section):
        m = _COMP_RE.match(key)
        if not m:
            reader.fail(f"[{section}] unknown entry {key!r}", section, key)
        if m.group(1) != name:
            continue
        idx = int(m.group(2))
        if not 1 <= idx <= count:
            reader.fail(f"[{section}] {key}: index outside 1..{count}", section, key)
        comps[idx] = reader.expr(section, key, val.strip(), dim, prefix, real)
    if not comps:
        return None
    missing = [i for i in range(1, count + 1) if i not in comps]
    if missing:
        reader.fail(f"[{section}] missing {name}_{missing[0]}", section)
    return [comps[i] for i in range(1, count + 1)]


def parse_scenario(text: str, path: str = "<string>") -> Scenario:
    """Build a :class:`Scenario` from scenario-file text.

    Raises:
        ScenarioFileError: with file name and line for malformed input.
    """
    r = _Reader(text, path)
    m = r.number("dimensions", "m", int, required=True)
    n = r.number("dimensions", "n", int, required=True)
    if n < 2 or n % 2 or m <= n:
        r.fail("need an even n >= 2 and m > n", "dimensions")
    dM, dN = _box(r, "M", m), _box(r, "N", n)
    g = _metric(r, "metric_g", m, "g", "x")
    h = _metric(r, "metric_h", n, "h", "y")
    pi = _components(r, "map", "pi", n, m, real=True)
    if pi is None:
        r.fail("missing [map] pi_1 ...", "map" if r.cp.has_section("map") else None)
    k = m - n
    psi = _components(r, "spinor", "psi", 2 ** (n // 2), n, prefix="y")
    alpha = _components(r, "spinor", "alpha", 2 ** (k // 2), m) if r.cp.has_section("spinor") else None
    if alpha is not None and k == 1:
        r.fail("alpha is fixed to 1 for one-dimensional fibres", "spinor")

    order = r.number("numerics", "order", int, 4)
    step = r.number("numerics", "h", float, 1e-4 * dM.diameter)
    rich = (r.get("numerics", "richardson", "false") or "false").lower() in ("1", "true", "yes", "on")
    grid = r.number("numerics", "grid", int, 3)
    tol = Tolerances(
        conformality=r.number("numerics", "tol_conformality", float, Tolerances.conformality),
        condition=r.number("numerics", "tol_condition", float, Tolerances.condition),
        harmonicity=r.number("numerics", "tol_harmonicity", float, Tolerances.harmonicity),
    )
    try:
        fd = FDConfig(step, order, rich)
    except ValueError as e:
        r.fail(str(e), "numerics")
    name = r.get("meta", "name", Path(path).stem if path != "<string>" else "scenario")
    try:
        return Scenario(
            m=m, n=n, domain_M=dM, domain_N=dN,
            pi=Field.vector(pi, m), g=g, h=h,
            psi=None if psi is None else Field.spinor(psi, n, prefix="y"),
            alpha=None if alpha is None else Field.spinor(alpha, m),
            fd=fd, tolerances=tol, grid_points=grid, name=name,
        )
    except DiracMorphError as e:
        raise ScenarioFileError(str(e), path, None) from e


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ScenarioFileError(f"cannot read file: {e.strerror}", str(p), None) from e
    return parse_scenario(text, str(p))


def _texts(f: Field):
    if not f.texts or any(t == "" for t in f.texts):
        raise ValueError("field was not built from expression text")
    return f.texts


def _fmt_box(b: Box) -> str:
    return ", ".join(repr(float(v)) for pair in b.to_pairs() for v in pair)


def scenario_to_text(s: Scenario) -> str:
    """Serialise a scenario whose fields were built from expression strings."""
    out = ["[meta]", f"name = {s.name}", "", "[dimensions]", f"m = {s.m}", f"n = {s.n}", "",
           "[domain]", f"M = {_fmt_box(s.domain_M)}", f"N = {_fmt_box(s.domain_N)}"]
    for sec, f, letter, dim in (("metric_g", s.g, "g", s.m), ("metric_h", s.h, "h", s.n)):
        if f is None:
            continue
        t = _texts(f)
        out += ["", f"[{sec}]"]
        for i in range(dim):
            for j in range(i, dim):
                val = t[i * dim + j]
                if val != ("1" if i == j else "0"):
                    out.append(f"{letter}_{i + 1}{j + 1} = {val}")
    out += ["", "[map]"] + [f"pi_{i + 1} = {t}" for i, t in enumerate(_texts(s.pi))]
    if s.psi is not None or s.alpha is not None:
        out += ["", "[spinor]"]
        if s.psi is not None:
            out += [f"psi_{i + 1} = {t}" for i, t in enumerate(_texts(s.psi))]
        if s.alpha is not None:
            out += [f"alpha_{i + 1} = {t}" for i, t in enumerate(_texts(s.alpha))]
    tol = s.tolerances
    # repr keeps every digit, so parsing the text gives back the same floats
    out += ["", "[numerics]", f"h = {s.fd.step!r}", f"order = {s.fd.order}",
            f"richardson = {str(s.fd.richardson).lower()}", f"grid = {s.grid_points}",
            f"tol_conformality = {tol.conformality!r}", f"tol_condition = {tol.condition!r}",
            f"tol_harmonicity = {tol.harmonicity!r}", ""]
    return "\n".join(out)


__all__ = ["load_scenario", "parse_scenario", "scenario_to_text"]
