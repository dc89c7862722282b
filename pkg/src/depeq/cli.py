"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 invalid input.  Diagnostics for
input errors go to standard error as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .game import FormatMismatch, Game, ProbTensor, fmt_rational, to_rational

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    game: str | None = None
    mode: str = "exact"
    tol: float | None = None
    eps: str = "1e-9"
    res: int | None = None
    seed: int = 0
    svg: str | None = None
    csv: str | None = None
    json: str | None = None
    tensor: str | None = None
    at: str | None = None
    minors: bool = False
    emit_poly: bool = False
    report: bool = False
    stmts: str | None = None
    example: str = "all"


def _fmt(v):
    if isinstance(v, (int, Fraction)):
        return fmt_rational(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (float, np.floating)):
        return float(v)
    return str(v)


def _load_game(cfg: RunConfig) -> Game:
    if cfg.game is None:
        raise InputError("--game is required")
    if cfg.game.startswith("fixture:"):
        from .fixtures import load_fixture

        try:
            return load_fixture(cfg.game.split(":", 1)[1])
        except KeyError as e:
            raise InputError(str(e)) from e
    try:
        g = Game.load(cfg.game)
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise InputError(f"cannot read game {cfg.game}: {e}") from e
    if cfg.mode == "float":
        g = Game(g.format, [[float(v) for v in t] for t in g.payoffs])
    return g


def _parse_numbers(text: str) -> list:
    try:
        return [to_rational(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"cannot parse numbers from {text!r}") from e


def _load_tensor(cfg: RunConfig, g: Game) -> ProbTensor:
    if cfg.tensor is None:
        raise InputError("--tensor is required")
    if cfg.tensor.endswith(".json"):
        with open(cfg.tensor) as fh:
            P = ProbTensor.from_json(json.load(fh))
    else:
        P = ProbTensor(g.format, _parse_numbers(cfg.tensor))
    if cfg.mode == "float":
        P = ProbTensor(P.format, [float(v) for v in P.entries])
    return P


def _emit(cfg: RunConfig, payload: dict):
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if cfg.json:
        with open(cfg.json, "w") as fh:
            fh.write(text + "\n")


# -- subcommands -----------------------------------------------------------------

def cmd_nash(cfg: RunConfig) -> int:
    from .spohn import nash_points, totally_mixed_nash_2p

    g = _load_game(cfg)
    out = []
    if g.dims in ((2, 2), (2, 2, 2)):
        pts = nash_points(g)
    elif g.n == 2:
        pts = totally_mixed_nash_2p(g)
    else:
        raise InputError(f"Nash solving is not implemented for format {g.dims}")
    for p in pts:
        out.append({
            "tensor": [_fmt(v) for v in p.tensor.entries] if p.tensor is not None else None,
            "projective": [_fmt(v) for v in p.projective] if p.projective is not None else None,
            "in_simplex": p.in_simplex,
            "real": p.is_real,
        })
    _emit(cfg, {"format": list(g.dims), "nash_points": out})
    return EXIT_OK


def cmd_check_de(cfg: RunConfig) -> int:
    from .spohn import NotInSimplex, is_dependency_equilibrium

    g = _load_game(cfg)
    P = _load_tensor(cfg, g)
    if P.format != g.format:
        raise InputError(f"tensor format {P.format.dims} does not match game format {g.dims}")
    if not P.normalized:
        raise InputError("tensor entries do not sum to one")
    try:
        res = is_dependency_equilibrium(g, P, cfg.tol)
    except NotInSimplex as e:
        raise InputError(str(e)) from e
    _emit(cfg, {"dependency_equilibrium": res.holds, "residuals": [_fmt(v) for v in res.residuals]})
    return EXIT_OK if res.holds else EXIT_FAIL


def cmd_konstanz(cfg: RunConfig) -> int:
    from .konstanz import build_konstanz, kernel_at, minor_census, sample_spohn_point

    g = _load_game(cfg)
    payload = {"format": list(g.dims), "pattern": build_konstanz(g).pattern(),
               "generic_kernel_dim": g.format.kernel_dim}
    if cfg.at:
        x = _parse_numbers(cfg.at)
        if len(x) != g.n:
            raise InputError(f"--at needs {g.n} coordinates")
        kb = kernel_at(g, x, cfg.tol)
        payload["matrix"] = [[_fmt(v) for v in row] for row in build_konstanz(g, x).rows]
        payload["kernel"] = {"dim": kb.dim, "rank": kb.rank,
                             "basis": [[_fmt(v) for v in b] for b in kb.basis]}
        P = sample_spohn_point(g, x, cfg.tol)
        payload["sample"] = [_fmt(v) for v in P.entries] if P is not None else None
    if cfg.minors or cfg.emit_poly:
        census = minor_census(g)
        rows = []
        for m in census:
            row = {"id": m.id, "columns": list(m.columns), "zero": m.is_zero,
                   "degree": m.degree, "linear_factors": [p.to_str() for p in m.linear_factors],
                   "residual_degree": m.residual.total_degree() if m.residual.terms else None}
            if cfg.emit_poly:
                row["poly"] = m.poly.to_str()
            rows.append(row)
        payload["minors"] = rows
    _emit(cfg, payload)
    return EXIT_OK


def cmd_curve22(cfg: RunConfig) -> int:
    from .curve22 import (
        SingularCurve,
        classify_arcs_robust,
        is_generic,
        j_invariant,
        landmarks,
        payoff_discriminant,
        spohn_cubic,
    )
    from .spohn import NonGeneric

    g = _load_game(cfg)
    if g.dims != (2, 2):
        raise InputError("curve22 needs a 2x2 game")
    c = spohn_cubic(g)
    payload = {"c": [_fmt(v) for v in c.c], "disc": _fmt(payoff_discriminant(g))}
    try:
        payload["j"] = _fmt(j_invariant(g))
    except SingularCurve as e:
        payload["j"] = None
        payload["singular_factors"] = list(e.factors)
    try:
        payload["landmarks"] = landmarks(g).to_json()
    except ValueError as e:
        payload["landmarks"] = None
        payload["landmark_error"] = str(e)
    report = None
    if cfg.report or cfg.svg:
        if is_generic(g):
            report = classify_arcs_robust(g, cfg.res or 256)
            payload["arcs"] = report.to_json()
        else:
            payload["arcs"] = None
            payload["arcs_error"] = str(NonGeneric("game is not generic"))
    _emit(cfg, payload)
    if cfg.svg and report is not None:
        from .svg import emit_svg

        emit_svg(report, cfg.svg, game=g)
    return EXIT_OK


def cmd_region(cfg: RunConfig) -> int:
    from .region import INSIDE, UNCERTAIN, rasterize_region

    g = _load_game(cfg)
    if g.n not in (2, 3):
        raise InputError("region rasterization supports two or three players")
    res = cfg.res or (256 if g.n == 2 else 32)
    R = rasterize_region(g, res, to_rational(cfg.eps))
    payload = {"resolution": res, "eps": cfg.eps, "inside_cells": R.count(INSIDE),
               "uncertain_cells": R.count(UNCERTAIN), "components": R.components(),
               "exact_resolved": R.exact_resolved}
    _emit(cfg, payload)
    if cfg.csv:
        with open(cfg.csv, "w") as fh:
            fh.write(R.to_csv())
    if cfg.svg:
        from .svg import emit_svg

        emit_svg(R, cfg.svg)
    return EXIT_OK


def cmd_ci(cfg: RunConfig) -> int:
    from .ci import InvalidStatement, ci_quadrics, ci_residual, parse_statements
    from .spohn import dependency_residual

    g = _load_game(cfg)
    try:
        stmts = parse_statements(cfg.stmts or "")
        for s in stmts:
            s.check_format(g.format)
    except InvalidStatement as e:
        raise InputError(str(e)) from e
    if not stmts:
        raise InputError("--stmts needs at least one statement")
    P = _load_tensor(cfg, g) if cfg.tensor else ProbTensor.uniform(g.dims)
    report = []
    for s in stmts:
        q = ci_quadrics(s, g.format)
        r = ci_residual(P, [s])
        report.append({"statement": str(s), "quadrics": len(q), "residuals": [_fmt(v) for v in r],
                       "holds": all(v == 0 for v in r) if P.exact else max(abs(float(v)) for v in r) < (cfg.tol or 1e-9)})
    dres = dependency_residual(g, P)
    _emit(cfg, {"tensor": [_fmt(v) for v in P.entries], "statements": report,
                "dependency_residual": [_fmt(v) for v in dres]})
    return EXIT_OK


# -- paper suite -----------------------------------------------------------------

def _check(results, name, ok, detail=""):
    results.append({"check": name, "ok": bool(ok), "detail": detail})


def suite_bach(cfg: RunConfig | None = None) -> list:
    from .fixtures import load_fixture
    from .spohn import dependency_residual, is_dependency_equilibrium, nash_point_22

    g = load_fixture("bach")
    out = []
    N = nash_point_22(g)
    want = tuple(Fraction(v, 25) for v in (6, 9, 4, 6))
    _check(out, "nash point", tuple(N.tensor.entries) == want, " ".join(map(str, N.tensor.entries)))
    _check(out, "nash residual", all(r == 0 for r in dependency_residual(g, N.tensor)))
    rng = np.random.default_rng(cfg.seed if cfg else 0)
    r = [Fraction(int(v), 7) for v in rng.integers(1, 40, size=6)]
    comps = {
        "line p11=p22=0": [(0, r[0], r[1], 0)],
        "conic": [(-6 * r[2] / (6 + r[2]), -3, 2, r[2])],
        "line through N": [(r[3], (3 * r[4] + r[3]) / 2, r[4], r[3])],
    }
    for name, pts in comps.items():
        for p in pts:
            P = ProbTensor((2, 2), p)
            _check(out, f"component {name} lies on the Spohn curve",
                   all(v == 0 for v in dependency_residual(g, P)))
    P = ProbTensor((2, 2), [r[3], (3 * r[4] + r[3]) / 2, r[4], r[3]]).normalize()
    _check(out, "line through N meets the open simplex", is_dependency_equilibrium(g, P).holds)
    return out


def suite_disconnected(cfg: RunConfig | None = None) -> list:
    from .curve22 import classify_arcs_robust, j_invariant
    from .fixtures import load_fixture
    from .spohn import nash_point_22

    g = load_fixture("disconnected")
    out = []
    j = j_invariant(g)
    _check(out, "j-invariant", j == Fraction(-(7**3) * 103**3, 2**8 * 3**2 * 47), str(j))
    N = nash_point_22(g)
    _check(out, "nash point", N.projective == (-1, 2, 1, -2) and not N.in_simplex, str(N.projective))
    rep = classify_arcs_robust(g)
    ends = sorted(tuple(sorted(a.endpoints)) for a in rep.arcs)
    _check(out, "arcs", rep.component_count == 2 and ends == [("E11", "F21"), ("E22", "F12")], str(ends))
    if cfg and cfg.svg:
        from .svg import emit_svg

        emit_svg(rep, cfg.svg, game=g)
    return out


def suite_ex23(cfg: RunConfig | None = None) -> list:
    from .fixtures import load_fixture
    from .konstanz import payoff_vars, rank_drop_points_32
    from .poly import parse_poly
    from .region import boundary_candidates, rasterize_region, region_membership_numeric

    g = load_fixture("ex23")
    out = []
    pts = rank_drop_points_32(g)
    aff = [p for p in pts if p.affine]
    special = [p for p in aff if abs(p.x1 - 22.9902299164) < 1e-6 and abs(p.x2 - 16.2987107576) < 1e-6]
    _check(out, "rank-drop points", len(pts) == 6 and len(aff) == 5 and len(special) == 1,
           f"{len(pts)} points, {len(aff)} affine")
    if special:
        inside, t = region_membership_numeric(g, (special[0].x1.real, special[0].x2.real))
        _check(out, "special point lies in the payoff region", inside, f"t*={t:.6g}")
    xs = payoff_vars(2)
    cands = {bc.poly for bc in boundary_candidates(g)}
    wanted = [
        "9*x1^2*x2 - 2*x1*x2^2 - 162*x1^2 - 189*x1*x2 + 30*x2^2 + 3906*x1 - 540*x2 + 2160",
        "72*x1^2*x2 - 19*x1*x2^2 - 1512*x1^2 - 1614*x1*x2 + 390*x2^2 + 36288*x1 - 2340*x2",
        "x1 - 13", "x1 - 24",
    ]
    for w in wanted:
        p = parse_poly(w, xs).primitive()
        _check(out, f"boundary candidate {w}", p in cands or -p in cands)
    R = rasterize_region(g, cfg.res if cfg and cfg.res else 512, Fraction(1, 10**6))
    _check(out, "open components", R.components() == 2, str(R.components()))
    if cfg and cfg.svg:
        from .svg import emit_svg

        emit_svg(R, cfg.svg)
    return out


def suite_centipede(cfg: RunConfig | None = None) -> list:
    from .fixtures import load_fixture
    from .region import region_membership, verify_certificate
    from .spohn import dependency_residual, totally_mixed_nash_2p

    g = load_fixture("centipede")
    out = []
    _check(out, "no totally mixed Nash equilibrium", totally_mixed_nash_2p(g) == [])
    # a point of the hyperboloid component: p31 = p32, p21 = 2 p22
    p22, p32 = Fraction(1), Fraction(1)
    # p11 p22 - 4 p12 p22 - 2 p22^2 + 4 p11 p32 - 2 p12 p32 + 3 p22 p32 + 2 p32^2 = 0, solved for p11
    p12 = Fraction(1)
    p11 = (4 * p12 * p22 + 2 * p22**2 + 2 * p12 * p32 - 3 * p22 * p32 - 2 * p32**2) / (p22 + 4 * p32)
    P = ProbTensor((3, 2), [p11, p12, 2 * p22, p22, p32, p32])
    _check(out, "hyperboloid component lies on the Spohn variety",
           all(v == 0 for v in dependency_residual(g, P)))
    found = None
    for x1 in range(1, 12):
        for x2 in range(1, 12):
            x = (Fraction(x1, 4), Fraction(x2, 4))
            m = region_membership(g, x)
            if m.inside:
                found = (x, m)
                break
        if found:
            break
    _check(out, "some grid point has an INSIDE certificate",
           found is not None and verify_certificate(g, found[0], found[1]),
           str(tuple(map(str, found[0]))) if found else "")
    return out


SUITES = {"bach": suite_bach, "disconnected": suite_disconnected, "ex23": suite_ex23, "centipede": suite_centipede}


def cmd_paper_suite(cfg: RunConfig) -> int:
    names = list(SUITES) if cfg.example == "all" else [cfg.example]
    if any(n not in SUITES for n in names):
        raise InputError(f"unknown example {cfg.example!r}; choose from {', '.join(SUITES)} or all")
    results = {}
    for n in names:
        results[n] = SUITES[n](cfg)
    ok = all(r["ok"] for rs in results.values() for r in rs)
    for n, rs in results.items():
        for r in rs:
            print(f"{'PASS' if r['ok'] else 'FAIL'}  {n}: {r['check']}" + (f"  [{r['detail']}]" if r["detail"] else ""))
    if cfg.json:
        with open(cfg.json, "w") as fh:
            json.dump(results, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "nash": cmd_nash,
    "check-de": cmd_check_de,
    "konstanz": cmd_konstanz,
    "curve22": cmd_curve22,
    "region": cmd_region,
    "ci": cmd_ci,
    "paper-suite": cmd_paper_suite,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="depeq", description="Dependency equilibria of normal-form games.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, game=True):
        if game:
            sp.add_argument("--game", help="game JSON file, or fixture:NAME")
        sp.add_argument("--mode", choices=("exact", "float"), default="exact")
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--json", help="also write the JSON result to this file")

    sp = sub.add_parser("nash", help="Nash points")
    common(sp)
    sp = sub.add_parser("check-de", help="test a tensor for dependency equilibrium")
    common(sp)
    sp.add_argument("--tensor", help="comma-separated entries or a tensor JSON file")
    sp = sub.add_parser("konstanz", help="Konstanz matrix, kernels and minors")
    common(sp)
    sp.add_argument("--at", help="payoff point, comma-separated")
    sp.add_argument("--minors", action="store_true")
    sp.add_argument("--emit-poly", action="store_true")
    sp = sub.add_parser("curve22", help="2x2 invariants, landmarks and arcs")
    common(sp)
    sp.add_argument("--report", action="store_true")
    sp.add_argument("--res", type=int)
    sp.add_argument("--svg")
    sp = sub.add_parser("region", help="rasterize the payoff region")
    common(sp)
    sp.add_argument("--res", type=int)
    sp.add_argument("--eps", default="1e-9")
    sp.add_argument("--svg")
    sp.add_argument("--csv")
    sp = sub.add_parser("ci", help="conditional-independence residuals")
    common(sp)
    sp.add_argument("--stmts", help='statements such as "1_|_23;2_|_3|1"')
    sp.add_argument("--tensor")
    sp = sub.add_parser("paper-suite", help="reproduce the worked examples")
    common(sp, game=False)
    sp.add_argument("example", nargs="?", default="all")
    sp.add_argument("--res", type=int)
    sp.add_argument("--svg")
    return p


def run(cfg: RunConfig) -> int:
    try:
        return COMMANDS[cfg.command](cfg)
    except (InputError, FormatMismatch) as e:
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return EXIT_INPUT


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__})
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
