"""Command line interface.

Exit codes: 0 success, 1 failed verification, 2 bad input, 3 cocycle
breakdown, 4 table cross-check mismatch.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field

from . import circle, cover, finite_cp, invariants, psl2, quasimorphism, sampling, suites
from .cover import CoverElement
from .errors import CocycleNotIntegral, EquivalenceViolation, PreconditionViolated
from .psl2 import ProjMat

EXIT_VERIFY, EXIT_PARSE, EXIT_COCYCLE, EXIT_TABLE = 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class Config:
    grid: int = circle.DEFAULT_SAMPLES
    tau_iters: int = quasimorphism.DEFAULT_TAU_ITERS
    tol_eq: float = circle.TOL_EQ
    tol_inv: float = circle.TOL_INV
    eps_int: float = invariants.EPS_INT
    eps_zero: float = invariants.EPS_ZERO
    eps_parab: float = psl2.EPS_PARAB
    cocycle_tol: float = cover.COCYCLE_TOL
    seed: int = field(default_factory=sampling.seed_from_env)

    def __post_init__(self):
        if self.grid < 64:
            raise UsageError("--grid must be at least 64")
        if self.tau_iters < 1:
            raise UsageError("--tau-iters must be positive")
        tols = (self.tol_eq, self.tol_inv, self.eps_int, self.eps_zero, self.eps_parab, self.cocycle_tol)
        if not all(t > 0 for t in tols):
            raise UsageError("tolerances must be positive")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")


# -- input parsing ---------------------------------------------------------------------

def parse_matrix(tokens: list[str]) -> ProjMat:
    """``rho:<theta>``, ``a:<lambda>``, ``u:<x>`` or four numbers in row-major order."""
    try:
        if len(tokens) == 1 and ":" in tokens[0]:
            kind, _, value = tokens[0].partition(":")
            v = float(value)
            ctor = {"rho": psl2.rotation, "a": psl2.dilation, "u": psl2.unipotent}.get(kind)
            if ctor is None:
                raise UsageError(f"unknown matrix token {kind!r}; expected rho, a or u")
            return ctor(v)
        if len(tokens) == 4:
            return ProjMat(*(float(t) for t in tokens))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    raise UsageError("expected a token like rho:1.0 or four matrix entries")


def parse_indices(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad index list {text!r}") from exc


def _number(text: str) -> float:
    """A float, or a product/quotient of floats and ``pi`` such as ``3*pi/4``."""
    value, op = 1.0, "*"
    for tok in re.split(r"([*/])", text.replace(" ", "")):
        if tok in ("*", "/"):
            op = tok
            continue
        x = math.pi if tok == "pi" else float(tok)
        value = value * x if op == "*" else value / x
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [_number(x) for x in text.split(",") if x.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad number list {text!r}") from exc


def _emit(obj, pretty: bool, render=None):
    if pretty and render is not None:
        print(render(obj))
    else:
        print(json.dumps(obj))


def _near_parabolic_warning(m: ProjMat, eps: float):
    t = m.trace_bar
    if t != 2.0 and abs(t - 2.0) < eps:
        print(f"warning: |trace| = {t!r} is within {eps:g} of 2; the class is sensitive to rounding", file=sys.stderr)


def _report(e: CoverElement, cfg: Config) -> cover.InvariantReport:
    return cover.invariant_report(e, cfg.tau_iters, cfg.grid, cfg.eps_int, cfg.eps_zero)


def _render_rows(rows: list[dict]) -> str:
    head = f"{'class':<34} {'trace':<8} {'direction':<13} {'ell#':<8} {'tau':>10}  numeric"
    lines = [head, "-" * len(head)]
    for r in rows:
        label = r.get("label", r["class"]["kind"])
        ok = "ok" if r["numeric"]["consistent"] else "MISMATCH"
        lines.append(
            f"{label:<34} {r['trace_category']:<8} {r['direction']:<13} {r['ell_sharp']:<8} {r['tau_exact']:>10.6f}  {ok}"
        )
    return "\n".join(lines)


# -- commands ----------------------------------------------------------------------------

def cmd_classify(args, cfg: Config) -> int:
    m = parse_matrix(args.matrix)
    _near_parabolic_warning(m, cfg.eps_parab)
    e = CoverElement(m, args.k)
    rep = _report(e, cfg)
    if args.dump_lift:
        circle.write_lift(args.dump_lift, cover.realize(e), cfg.grid)
    row = rep.to_dict()
    row["label"] = str(rep.label)
    _emit(row, args.pretty, lambda r: _render_rows([r]))
    return 0


def table_labels(thetas, lams, n_max: int) -> list[cover.ConjClassLabel]:
    """One label per row of the classification table, in table order."""
    L, K = cover.ConjClassLabel, cover.LabelKind
    out = []
    for t in thetas:
        out += [L(K.ELLIPTIC, 0, t), L(K.ELLIPTIC, -1, t)]
        for n in range(1, n_max + 1):
            out += [L(K.ELLIPTIC, n, t), L(K.ELLIPTIC, -1 - n, t)]
    out += [L(K.PARABOLIC_MINUS, 0), L(K.PARABOLIC_PLUS, 0)]
    for n in range(1, n_max + 1):
        out += [L(K.PARABOLIC_PLUS, n), L(K.PARABOLIC_MINUS, n), L(K.PARABOLIC_MINUS, -n), L(K.PARABOLIC_PLUS, -n)]
    out.append(L.central(0))
    for n in range(1, n_max + 1):
        out += [L.central(n), L.central(-n)]
    for lam in lams:
        out.append(L(K.HYPERBOLIC, 0, lam))
        for n in range(1, n_max + 1):
            out += [L(K.HYPERBOLIC, n, lam), L(K.HYPERBOLIC, -n, lam)]
    return out


def cmd_table(args, cfg: Config) -> int:
    thetas = _float_list(args.theta)
    lams = _float_list(args.lam)
    if any(not 0 < t < math.pi for t in thetas) or any(not x > 1 for x in lams) or args.n_max < 0:
        raise UsageError("need 0 < theta < pi, lambda > 1 and n-max >= 0")
    rows, bad = [], []
    for label in table_labels(thetas, lams, args.n_max):
        rep = _report(label.normal_form(), cfg)
        row = rep.to_dict()
        row["label"] = str(label)
        if not (rep.consistent and rep.label.equals(label)):
            bad.append(f"{label}: {'; '.join(rep.mismatches()) or f'classified as {rep.label}'}")
        rows.append(row)
    _emit(rows, args.pretty, _render_rows)
    for line in bad:
        print(f"mismatch: {line}", file=sys.stderr)
    return EXIT_TABLE if bad else 0


def cmd_verify(args, cfg: Config) -> int:
    settings = suites.Settings(grid=cfg.grid, tau_iters=cfg.tau_iters, scale=args.scale)
    checks = suites.run(args.suite, cfg.seed, settings)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} properties passed (seed {cfg.seed})")
    if failed:
        print(f"first failing property: {failed[0].name}", file=sys.stderr)
        return EXIT_VERIFY
    return 0


def cmd_finite_verify(args, cfg: Config) -> int:
    try:
        g = finite_cp.read_table(args.file)
        ext = finite_cp.CentralExtension(g, parse_indices(args.normal))
    except (OSError, ValueError, PreconditionViolated) as exc:
        raise UsageError(str(exc)) from exc
    if not ext.is_central:
        print("N is not central: the characterisations only apply to central extensions", file=sys.stderr)
    try:
        rep = finite_cp.verify_ntors(ext)
    except EquivalenceViolation as exc:
        print(f"equivalence violated: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    fibres = []
    for f in finite_cp.fiber_decomposition(ext):
        fibres.append({
            "base_class": list(f.base_class),
            "classes": [list(c) for c in f.classes],
            "s_subgroup": None if f.s_subgroup is None else list(f.s_subgroup),
        })
    out = {
        "order": g.order,
        "normal": ext.n_subgroup,
        "central": ext.is_central,
        "cp": rep.is_cp,
        "conditions": {
            "commutators": rep.commutators,
            "twisted": rep.twisted,
            "torsor": rep.torsor,
            "commuting_lifts": rep.commuting_lifts,
        },
        "witness": None if rep.witness is None else {"a": rep.witness[0], "b": rep.witness[1], "commutator": rep.witness[2]},
        "class_count": rep.class_count,
        "quotient_class_count": rep.quotient_class_count,
        "fibres": fibres,
    }
    _emit(out, args.pretty, lambda o: json.dumps(o, indent=2))
    return 0


# -- argument parsing -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, default=circle.DEFAULT_SAMPLES, help="grid size for displacement scans")
    common.add_argument("--tau-iters", type=int, default=quasimorphism.DEFAULT_TAU_ITERS, help="orbit length for tau")
    common.add_argument("--seed", type=lambda s: int(s, 0), default=None, help=f"RNG seed (default ${sampling.SEED_ENV})")
    common.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")

    p = argparse.ArgumentParser(prog="sl2cover", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="classify an element of the cover")
    c.add_argument("matrix", nargs="+", help="rho:<theta>, a:<lambda>, u:<x> or four entries")
    c.add_argument("--k", type=int, default=0, help="deck shift")
    c.add_argument("--dump-lift", metavar="PATH", help="write the realised lift as a sample table")
    c.set_defaults(func=cmd_classify)

    t = sub.add_parser("table", parents=[common], help="regenerate the conjugacy class table")
    t.add_argument("--theta", default="pi/6,pi/2,3*pi/4", help="comma-separated angles in (0, pi)")
    t.add_argument("--lambda", dest="lam", default="1.5,2,5", help="comma-separated values > 1")
    t.add_argument("--n-max", type=int, default=3)
    t.set_defaults(func=cmd_table)

    v = sub.add_parser("verify", parents=[common], help="run property suites")
    v.add_argument("suite", choices=[*suites.SUITES, "all"])
    v.add_argument("--scale", type=float, default=1.0, help="multiply sample counts")
    v.set_defaults(func=cmd_verify)

    f = sub.add_parser("finite", help="finite-group checks")
    fsub = f.add_subparsers(dest="finite_command", required=True)
    fv = fsub.add_parser("verify", parents=[common], help="check an extension given by a table file")
    fv.add_argument("file")
    fv.add_argument("--normal", required=True, help="comma-separated indices of N")
    fv.set_defaults(func=cmd_finite_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = Config(grid=args.grid, tau_iters=args.tau_iters, **({} if args.seed is None else {"seed": args.seed}))
        return args.func(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CocycleNotIntegral as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COCYCLE


if __name__ == "__main__":
    sys.exit(main())
