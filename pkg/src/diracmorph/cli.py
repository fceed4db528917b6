"""Command-line front end: ``diracmorph {check,chain,dirac,gamma,corpus}``.

Every command prints one JSON document on standard output. Exit codes:
0 for success (verdict yes, or all fixtures as expected), 1 for a negative
verdict or a mismatch, 2 for invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .analysis.fields import FDConfig, Field
from .clifford import build_adapted_rep, build_gamma
from .corpus import DEFAULT_PSI, fixture, list_fixtures
from .dirac import PullbackSpec, chain_rule, chain_rule_batch
from .errors import DiracMorphError, ScenarioError
from .geometry import Scenario
from .morphism import classify, converse_probe, default_witnesses
from .scenario_file import load_scenario

SIG_DIGITS = 12
CHAIN_TOL = 1e-5


# ---------------------------------------------------------------------------
# JSON helpers

def _num(x):
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.{SIG_DIGITS}g}")


def _clean(obj):
    """Round floats to 12 significant digits and turn arrays/complex values into lists."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=False, ensure_ascii=True)


# ---------------------------------------------------------------------------
# scenario resolution

def _resolve(args) -> tuple[Scenario, str]:
    if args.fixture and args.scenario:
        raise ScenarioError("give either a scenario file or --fixture, not both")
    if args.fixture:
        s, label = fixture(args.fixture).scenario, f"fixture:{args.fixture}"
    elif args.scenario:
        s, label = load_scenario(args.scenario), args.scenario
    else:
        raise ScenarioError("a scenario file or --fixture NAME is required")
    return _apply_overrides(s, args), label


def _apply_overrides(s: Scenario, args) -> Scenario:
    kw = {}
    if args.h is not None or args.order is not None:
        kw["fd"] = FDConfig(args.h if args.h is not None else s.fd.step,
                            args.order if args.order is not None else s.fd.order,
                            s.fd.richardson)
    if args.grid is not None:
        if args.grid < 1:
            raise ScenarioError("--grid must be positive")
        kw["grid_points"] = args.grid
    if args.tol is not None and args.command == "check":
        t = s.tolerances
        kw["tolerances"] = type(t)(t.conformality, args.tol, t.harmonicity)
    return s.with_options(**kw) if kw else s


def _common(s: Scenario, label: str, command: str) -> dict:
    P = s.grid()
    return {
        "command": command,
        "scenario": {"name": s.name, "source": label, "m": s.m, "n": s.n},
        "grid": {"points_per_axis": s.grid_points, "count": int(P.shape[0]),
                 "box": s.domain_M.to_pairs()},
        "residuals": {},
        "verdict": None,
        "tolerances": {"conformality": s.tolerances.conformality,
                       "condition": s.tolerances.condition,
                       "harmonicity": s.tolerances.harmonicity},
        "fd": {"h": s.fd.step, "order": s.fd.order},
    }


def _default_psi(s: Scenario):
    if s.psi is not None:
        return s.psi
    if s.n != 2:
        raise ScenarioError("scenario has no [spinor] psi and no default exists for n != 2")
    return Field.spinor(list(DEFAULT_PSI), 2, prefix="y", domain=s.domain_N)


# ---------------------------------------------------------------------------
# commands

def cmd_check(args) -> tuple[dict, int]:
    s, label = _resolve(args)
    doc = _common(s, label, "check")
    try:
        witnesses = default_witnesses(s, count=5, seed=args.seed)
    except DiracMorphError:
        witnesses = []
    rep = classify(s, witnesses)
    doc["residuals"] = rep.residuals()
    doc["verdict"] = rep.verdict
    doc["inconsistency"] = rep.inconsistency
    doc["responsible"] = rep.responsible
    doc["seed"] = args.seed
    if rep.conditions_verdict == "no":
        probe = converse_probe(s, rep)
        if probe is not None:
            doc["converse"] = {"condition": probe.condition, "point": probe.point,
                               "bound": probe.bound, "observed": probe.observed,
                               "holds": probe.holds}
    return doc, 0 if rep.verdict == "yes" else 1


def _hsweep(s: Scenario, spec_psi, steps=4) -> dict:
    d = s.domain_M.diameter
    hs = [1e-2 * d / 2**i for i in range(steps)]
    P = s.with_fd(FDConfig(hs[0], 2)).grid()
    res = []
    for h in hs:
        t = s.with_fd(FDConfig(h, 2))
        b = chain_rule_batch(t, PullbackSpec.from_scenario(t, spec_psi), P)
        res.append(float(np.max(b.residual)))
    ratios = [res[i] / res[i + 1] if res[i + 1] > 0 else None for i in range(len(res) - 1)]
    return {"order": 2, "h": hs, "residuals": res, "ratios": ratios}


def cmd_chain(args) -> tuple[dict, int]:
    s, label = _resolve(args)
    doc = _common(s, label, "chain")
    psi = _default_psi(s)
    b = chain_rule(s, PullbackSpec.from_scenario(s, psi), s.grid())
    tol = args.tol if args.tol is not None else CHAIN_TOL
    inv = b.invariants
    r = {
        "max_residual": float(np.max(b.residual)),
        "term_sum": float(np.max(b.term_sum_residual)),
    }
    for name, st in b.steps.items():
        r[name] = float(np.max(st.residual))
    doc["residuals"] = r
    doc["terms"] = {
        "I_H_norm": float(np.max(np.linalg.norm(inv.I_H, axis=-1))),
        "mu_V_norm": float(np.max(np.linalg.norm(inv.mu_V, axis=-1))),
        "mu_H_norm": float(np.max(np.linalg.norm(inv.mu_H, axis=-1))),
        "grad_H_lnl_norm": float(np.max(np.linalg.norm(inv.grad_H_lnl, axis=-1))),
        "lambda_min": float(np.min(inv.lam)),
        "lambda_max": float(np.max(inv.lam)),
    }
    doc["chain_tolerance"] = tol
    if args.hsweep:
        doc["hsweep"] = _hsweep(s, psi)
    ok = all(v <= tol for v in r.values())
    doc["verdict"] = "pass" if ok else "fail"
    return doc, 0 if ok else 1


def cmd_dirac(args) -> tuple[dict, int]:
    s, label = _resolve(args)
    doc = _common(s, label, "dirac")
    psi = _default_psi(s)
    P = s.grid()
    b = chain_rule_batch(s, PullbackSpec.from_scenario(s, psi), P)
    norms = np.linalg.norm(b.lhs, axis=1)
    doc["probes"] = [{"point": P[i], "psi_tilde": b.psi_tilde[i], "dirac": b.lhs[i]}
                     for i in range(P.shape[0])]
    scale = np.maximum(1.0, np.linalg.norm(b.psi_tilde, axis=1))
    rel = float(np.max(norms / scale))
    doc["residuals"] = {"max_dirac_norm": float(np.max(norms)), "max_relative": rel}
    doc["verdict"] = "harmonic" if rel <= s.tolerances.harmonicity else "not_harmonic"
    return doc, 0


def cmd_gamma(args) -> tuple[dict, int]:
    doc = {"command": "gamma", "scenario": None, "grid": None, "residuals": {},
           "verdict": None, "tolerances": None, "fd": None}
    if args.adapted is not None:
        n, k = args.adapted
        rep = build_adapted_rep(n, k)
        doc["representation"] = {
            "kind": "adapted", "n": n, "k": k, "spinor_dim": rep.spinor_dim,
            "gammas": [g for g in rep.gammas], "conjugation": rep.conjugation,
            "chirality": rep.chirality,
        }
        gam = rep.gammas
    else:
        if args.dim is None:
            raise ScenarioError("gamma needs a dimension or --adapted N K")
        rep = build_gamma(args.dim)
        doc["representation"] = {
            "kind": "irreducible", "dim": rep.dim, "spinor_dim": rep.spinor_dim,
            "convention": rep.convention_id, "gammas": [g for g in rep.gammas],
            "chirality": rep.chirality,
        }
        gam = rep.gammas
    S = gam.shape[-1]
    eye = np.eye(S)
    worst = 0.0
    for a in range(len(gam)):
        for b in range(len(gam)):
            ac = gam[a] @ gam[b] + gam[b] @ gam[a] + 2.0 * (a == b) * eye
            worst = max(worst, float(np.max(np.abs(ac))))
    doc["residuals"] = {"anticommutator": worst}
    doc["verdict"] = "ok" if worst <= 1e-12 else "fail"
    return doc, 0 if worst <= 1e-12 else 1


def cmd_corpus(args) -> tuple[dict, int]:
    rows, matches = [], 0
    names = list_fixtures(include_auxiliary=args.all)
    for name in names:
        f = fixture(name)
        s = _apply_overrides(f.scenario, args)
        try:
            w = default_witnesses(s, count=5, seed=args.seed)
        except DiracMorphError:
            w = []
        rep = classify(s, w)
        ok = rep.verdict == f.expected.verdict
        matches += ok
        rows.append({"name": name, "expected": f.expected.verdict, "verdict": rep.verdict,
                     "match": ok, "residuals": rep.condition_residuals()})
    doc = {"command": "corpus", "scenario": None, "grid": None,
           "residuals": {}, "verdict": f"{matches}/{len(names)}", "tolerances": None,
           "fd": None, "fixtures": rows, "matches": matches, "total": len(names)}
    return doc, 0 if matches == len(names) else 1


COMMANDS = {"check": cmd_check, "chain": cmd_chain, "dirac": cmd_dirac, "gamma": cmd_gamma,
            "corpus": cmd_corpus}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, help="grid points per axis")
    common.add_argument("--h", type=float, help="finite-difference step (absolute)")
    common.add_argument("--order", type=int, choices=(2, 4), help="stencil order")
    common.add_argument("--tol", type=float, help="condition (check) or chain-rule (chain) tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for random witnesses")
    common.add_argument("--json", action="store_true", default=True,
                        help="emit JSON (always on)")

    p = _Parser(prog="diracmorph", description="Dirac operators through horizontally "
                "conformal submersions: checks, chain rule and classification.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (("check", "classify a scenario as Dirac morphism"),
                        ("chain", "verify the chain rule and its step identities"),
                        ("dirac", "Dirac operator of the pull-back at the grid points")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("scenario", nargs="?", help="scenario file")
        sp.add_argument("--fixture", help="built-in fixture name")
        if name == "chain":
            sp.add_argument("--hsweep", action="store_true",
                            help="order-2 step-halving probe of the residual")
    sp = sub.add_parser("gamma", parents=[common], help="dump gamma matrices")
    sp.add_argument("dim", nargs="?", type=int, help="number of generators")
    sp.add_argument("--adapted", nargs=2, type=int, metavar=("N", "K"),
                    help="adapted representation for base N and fibre K")
    sp = sub.add_parser("corpus", parents=[common], help="classify every built-in fixture")
    sp.add_argument("--all", action="store_true", help="include auxiliary fixtures")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "corpus":
        args.fixture = args.scenario = None
    try:
        doc, code = COMMANDS[args.command](args)
    except (DiracMorphError, ValueError) as e:
        err = {"command": args.command, "error": {"type": type(e).__name__, "message": str(e)}}
        point = getattr(e, "point", None)
        if point is not None:
            err["error"]["point"] = point
        print(dumps(err))
        print(f"diracmorph: {e}", file=sys.stderr)
        return 2
    print(dumps(doc))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
