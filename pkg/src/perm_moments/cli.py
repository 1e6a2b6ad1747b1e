"""Command-line front end.

Subcommands: ``expect`` (one expectation by a chosen route), ``table`` (CSV
sweep of expectation vs asymptote over an n range), ``verify`` (named
invariant suites), ``simulate`` (Feller-coupling Monte Carlo driver).

Exit codes: 0 ok, 2 validation error, 3 numerical failure (tolerance or
truncation exceeded, or a verify suite failing), 4 internal error.  Every
failure path prints a single-line JSON diagnostic.  Identical configuration
and seed produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .angles import (
    AngleDistribution,
    AtomMixture,
    DiracOne,
    RootsOfUnityConjugate,
    UniformConjugate,
    moments_of,
)
from .asymptotics import asymptotic_ratio_table
from .classfun import (
    CoeffGrid,
    EvalPoint,
    GridKind,
    Randomization,
    char_poly_grid,
    expect_exact,
    folded_grid,
    geometric_grid,
    gf_report,
    one_minus_x,
)
from .errors import PermMomentsError, TruncationError
from .feller import mc_expect_per_cycle, mc_limit_product_mean
from .groups import GroupKind, expect_group_gf
from . import verify as verify_suites


class _CliError(Exception):
    def __init__(self, message: str, code: int = 2):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 - argparse hook
        raise _CliError(message, 2)


def parse_complex(text: str) -> complex:
    """Complex input as 're' or 're,im' (no parsed complex literals)."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise _CliError(f"cannot parse complex number from {text!r}")


def _grid_from_entries(entries: list[tuple[int, int, complex]], meta: dict) -> CoeffGrid:
    if not entries:
        raise _CliError("empty coefficient specification")
    k1 = max(e[0] for e in entries)
    k2 = max(e[1] for e in entries)
    b = np.zeros((k1 + 1, k2 + 1), dtype=np.complex128)
    for i, j, v in entries:
        b[i, j] = v
    if meta.get("kind", "poly") == "holo":
        radii = (float(meta.get("r1", 1.0)), float(meta.get("r2", "inf")))
        tail = meta.get("c")
        return CoeffGrid(b, GridKind.HOLOMORPHIC, radii, float(tail) if tail else None)
    return CoeffGrid(b)


def _parse_entry_line(line: str) -> tuple[int, int, complex]:
    fields = line.split()
    if len(fields) != 4:
        raise _CliError(f"coefficient line needs 'k1 k2 re im', got {line!r}")
    try:
        return int(fields[0]), int(fields[1]), complex(float(fields[2]), float(fields[3]))
    except ValueError as exc:
        raise _CliError(f"bad coefficient line {line!r}: {exc}")


def load_grid_file(path: str) -> CoeffGrid:
    """Coefficient file: one 'k1 k2 re im' line per entry, '#' comments.

    An optional '#! kind=holo r1=... [r2=...] [c=...]' header declares a
    holomorphic truncation with its radii and tail constant.
    """
    meta: dict = {}
    entries = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if not line:
                    continue
                if line.startswith("#!"):
                    for token in line[2:].split():
                        key, _, value = token.partition("=")
                        meta[key.lower()] = value
                    continue
                if line.startswith("#"):
                    continue
                entries.append(_parse_entry_line(line))
    except OSError as exc:
        raise _CliError(f"cannot read coefficient file {path!r}: {exc}")
    return _grid_from_entries(entries, meta)


def parse_fspec(text: str, trunc: int | None) -> CoeffGrid | tuple[int, int]:
    """Inline coefficients, a file path, or a named preset.

    Presets: ``one-minus-x``; ``charpoly:s1,s2`` (exponent pair, required for
    the Weyl groups); ``geom[:K]`` for the truncated geometric 1/(1-x).
    """
    if text == "one-minus-x":
        return one_minus_x()
    if text.startswith("charpoly:"):
        s1, _, s2 = text[len("charpoly:") :].partition(",")
        try:
            return (int(s1), int(s2 or "0"))
        except ValueError:
            raise _CliError(f"bad charpoly spec {text!r}")
    if text == "geom" or text.startswith("geom:"):
        k = text[len("geom:") :] if ":" in text else ""
        k_max = int(k) if k else (trunc if trunc is not None else 60)
        return geometric_grid(k_max)
    if ";" in text or len(text.split()) == 4:
        entries = [_parse_entry_line(chunk) for chunk in text.split(";") if chunk.strip()]
        return _grid_from_entries(entries, {})
    return load_grid_file(text)


def parse_dist(text: str) -> AngleDistribution:
    """'dirac1', 'uniform-pair', 'roots:p', or a JSON declaration file."""
    if text == "dirac1":
        return DiracOne()
    if text == "uniform-pair":
        return UniformConjugate()
    if text.startswith("roots:"):
        try:
            return RootsOfUnityConjugate(int(text[len("roots:") :]))
        except ValueError:
            raise _CliError(f"bad roots-of-unity spec {text!r}")
    try:
        with open(text, "r", encoding="utf-8") as fh:
            decl = json.load(fh)
    except OSError as exc:
        raise _CliError(f"cannot read distribution file {text!r}: {exc}")
    except json.JSONDecodeError as exc:
        raise _CliError(f"bad JSON in {text!r}: {exc}")
    variant = decl.get("variant")
    if variant == "dirac1":
        return DiracOne()
    if variant == "uniform-pair":
        return UniformConjugate()
    if variant == "roots":
        return RootsOfUnityConjugate(int(decl["p"]))
    if variant == "atoms":
        atoms = tuple(
            (
                complex(a["theta"]["re"], a["theta"]["im"]),
                complex(a["vartheta"]["re"], a["vartheta"]["im"]),
                float(a["prob"]),
            )
            for a in decl["atoms"]
        )
        return AtomMixture(atoms)
    raise _CliError(f"unknown distribution variant {variant!r}")


def _c(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_range(text: str) -> list[int]:
    pieces = text.split(":")
    if len(pieces) not in (2, 3):
        raise _CliError(f"n-range must be start:stop[:step], got {text!r}")
    try:
        start, stop = int(pieces[0]), int(pieces[1])
        step = int(pieces[2]) if len(pieces) == 3 else 1
    except ValueError:
        raise _CliError(f"bad n-range {text!r}")
    if step < 1:
        raise _CliError("n-range step must be positive")
    return list(range(start, stop + 1, step))


_GROUPS = {
    "symmetric": GroupKind.SYMMETRIC,
    "alternating": GroupKind.ALTERNATING,
    "weyl-so-even": GroupKind.WEYL_SO_EVEN,
    "weyl-so-odd": GroupKind.WEYL_SO_ODD,
    "weyl-su": GroupKind.WEYL_SU,
}

_VARIANTS = {"per-cycle": Randomization.PER_CYCLE, "per-point": Randomization.PER_POINT}


@dataclass
class _Common:
    group: GroupKind
    fspec: CoeffGrid | tuple[int, int]
    dist: AngleDistribution
    variant: Randomization
    x: EvalPoint
    order: int | None
    seed: int


def _common(args) -> _Common:
    fspec = parse_fspec(args.f, args.trunc)
    group = _GROUPS[args.group]
    if group in (GroupKind.WEYL_SO_EVEN, GroupKind.WEYL_SO_ODD, GroupKind.WEYL_SU):
        if not isinstance(fspec, tuple):
            raise _CliError("Weyl groups need --f charpoly:s1,s2")
    elif isinstance(fspec, tuple):
        fspec = char_poly_grid(*fspec)
    x1 = parse_complex(args.x1) if args.x1 is not None else 0.0 + 0.0j
    x2 = parse_complex(args.x2) if args.x2 is not None else 0.0 + 0.0j
    return _Common(
        group=group,
        fspec=fspec,
        dist=parse_dist(args.dist),
        variant=_VARIANTS[args.variant],
        x=EvalPoint(x1, x2),
        order=args.order,
        seed=args.seed,
    )


def _alpha_for(cfg: _Common):
    if isinstance(cfg.fspec, tuple):
        return None
    return moments_of(cfg.dist, cfg.fspec.k1, cfg.fspec.k2)


def cmd_expect(args) -> int:
    cfg = _common(args)
    if args.n is None:
        raise _CliError("expect needs --n")
    n = args.n
    stderr = None
    trunc_bound = None
    trials = None
    if args.route == "exact":
        if cfg.group is GroupKind.SYMMETRIC:
            value = expect_exact(cfg.fspec, _alpha_for(cfg), cfg.variant, cfg.x, n)
        elif cfg.group is GroupKind.ALTERNATING:
            from .groups import expect_an_exact

            value = expect_an_exact(cfg.fspec, _alpha_for(cfg), cfg.variant, cfg.x, n)
        else:
            raise _CliError("route=exact supports the symmetric and alternating groups")
    elif args.route == "gf":
        if cfg.group is GroupKind.SYMMETRIC and not isinstance(cfg.fspec, tuple):
            report = gf_report(cfg.fspec, _alpha_for(cfg), cfg.variant, cfg.x, n, cfg.order)
            if args.tol is not None and report.trunc_bound > args.tol:
                raise TruncationError(
                    f"truncation bound {report.trunc_bound:.3e} exceeds --tol {args.tol:.3e}"
                )
            value, trunc_bound = report.value, report.trunc_bound
        else:
            value = expect_group_gf(
                cfg.group, cfg.fspec, _alpha_for(cfg), cfg.variant, cfg.x, n, cfg.order
            )
    elif args.route == "mc":
        if cfg.group is not GroupKind.SYMMETRIC:
            raise _CliError("route=mc supports the symmetric group")
        if cfg.variant is not Randomization.PER_CYCLE:
            raise _CliError("route=mc samples the per-cycle randomization")
        if args.trials < 1:
            raise _CliError("route=mc needs --trials >= 1")
        folded = folded_grid(cfg.fspec, _alpha_for(cfg))
        if not folded.univariate:
            raise _CliError("route=mc needs a univariate grid")
        est = mc_expect_per_cycle(folded, cfg.x.x1, n, args.trials, cfg.seed)
        value, stderr, trials = est.value, est.stderr, est.trials
    else:
        raise _CliError(f"unknown route {args.route!r}")
    record = {
        "command": "expect",
        "group": args.group,
        "route": args.route,
        "variant": args.variant,
        "n": n,
        "x1": _c(cfg.x.x1),
        "x2": _c(cfg.x.x2),
        "value": _c(value),
        "stderr": stderr,
        "trunc_bound": trunc_bound,
        "trials": trials,
        "seed": cfg.seed if args.route == "mc" else None,
    }
    _emit(json.dumps(record, sort_keys=True) + "\n", args.out)
    return 0


def cmd_table(args) -> int:
    cfg = _common(args)
    if args.n_range is None:
        raise _CliError("table needs --n-range start:stop[:step]")
    if cfg.group is not GroupKind.SYMMETRIC or isinstance(cfg.fspec, tuple):
        raise _CliError("table sweeps the symmetric group with an explicit grid")
    n_list = _parse_range(args.n_range)
    report = asymptotic_ratio_table(
        cfg.fspec, _alpha_for(cfg), cfg.variant, cfg.x, n_list, cfg.order
    )
    lines = ["n,expect_re,expect_im,asym_re,asym_im,ratio_abs"]
    for row in report.csv_rows():
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    suites = {
        "class-equation": verify_suites.suite_class_equation,
        "gf-vs-exact": verify_suites.suite_gf_vs_exact,
        "feller": verify_suites.suite_feller,
        "asymptotics": verify_suites.suite_asymptotics,
        "groups": verify_suites.suite_groups,
    }
    if args.suite not in suites:
        raise _CliError(f"unknown suite {args.suite!r}; choose from {sorted(suites)}")
    results = suites[args.suite](seed=args.seed)
    lines = [
        json.dumps(
            {"suite": args.suite, "check": name, "passed": passed, "detail": detail},
            sort_keys=True,
        )
        for name, passed, detail in results
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if all(passed for _, passed, _ in results) else 3


def cmd_simulate(args) -> int:
    cfg = _common(args)
    if isinstance(cfg.fspec, tuple):
        raise _CliError("simulate needs an explicit coefficient grid")
    if args.trials < 1:
        raise _CliError("simulate needs --trials >= 1")
    folded = folded_grid(cfg.fspec, _alpha_for(cfg))
    if not folded.univariate:
        raise _CliError("simulate needs a univariate grid")
    if args.n is not None:
        est = mc_expect_per_cycle(folded, cfg.x.x1, args.n, args.trials, cfg.seed)
    else:
        est = mc_limit_product_mean(folded, cfg.x.x1, args.trials, cfg.seed)
    _emit(json.dumps(est.to_record(), sort_keys=True) + "\n", args.out)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="perm-moments", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--group", choices=sorted(_GROUPS), default="symmetric")
        p.add_argument("--f", default="one-minus-x", help="grid: inline, file, or preset")
        p.add_argument("--dist", default="dirac1", help="dirac1 | uniform-pair | roots:p | file")
        p.add_argument("--variant", choices=sorted(_VARIANTS), default="per-cycle")
        p.add_argument("--x1", default="0")
        p.add_argument("--x2", default=None)
        p.add_argument("--order", type=int, default=None, help="series truncation order")
        p.add_argument("--trunc", type=int, default=None, help="grid truncation for presets")
        p.add_argument("--trials", type=int, default=0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["json", "csv"], default=None)
        p.add_argument("--tol", type=float, default=None, help="truncation-bound tolerance")

    p_expect = sub.add_parser("expect", help="one expectation by a chosen route")
    add_common(p_expect)
    p_expect.add_argument("--route", choices=["exact", "gf", "mc"], default="gf")
    p_expect.add_argument("--n", type=int, default=None)
    p_expect.set_defaults(func=cmd_expect)

    p_table = sub.add_parser("table", help="CSV sweep of expectation vs asymptote")
    add_common(p_table)
    p_table.add_argument("--n-range", dest="n_range", default=None)
    p_table.set_defaults(func=cmd_table)

    p_verify = sub.add_parser("verify", help="run a named invariant suite")
    p_verify.add_argument("suite")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out", default=None)
    p_verify.set_defaults(func=cmd_verify)

    p_sim = sub.add_parser("simulate", help="Feller-coupling Monte Carlo driver")
    add_common(p_sim)
    p_sim.add_argument("--n", type=int, default=None, help="horizon; omit for the limit product")
    p_sim.set_defaults(func=cmd_simulate)

    return parser


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _CliError as exc:
        return _fail(exc.code, "validation", str(exc))
    except TruncationError as exc:
        return _fail(3, "numerical", str(exc))
    except PermMomentsError as exc:
        return _fail(2, "validation", str(exc))
    except (ValueError, TypeError) as exc:
        return _fail(2, "validation", str(exc))
    except Exception as exc:  # pragma: no cover - defensive
        return _fail(4, "internal", f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    raise SystemExit(main())
