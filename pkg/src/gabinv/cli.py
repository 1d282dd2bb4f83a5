"""Command-line entry point ``gabinv``.

Exit codes: 0 verdicts computed, 1 invalid input, 2 enumeration guard
exceeded, 3 condition (d) and the oracle (or its two forms) disagree.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .cases import BASE_LATTICE, CASES, case
from .diagram import render_ascii, render_svg
from .finite_gabor import riesz_frame_bounds
from .invariance import (
    ConditionInconsistencyError,
    InvarianceError,
    OracleMismatchError,
    brute_force_lattice,
    check,
    condition_d,
    decompose,
    invariance_set,
    model_for,
)
from .lattice import (
    IndexGuardError,
    LatticeError,
    adjoint,
    adjoint_formula,
    dual,
    format_matrix,
    integer_lattice,
    intermediate_lattices,
    parse_lattice,
    parse_matrix,
    quotient_cosets,
    sublattice_of,
    index,
)
from .sis import dft, sis_full_translation
from .windows import WindowError, load_window_arg, resolve_window
from .zak import ZakError, ZakGrid, ZakSplit, finite_zak, inverse_finite_zak

EXIT_OK, EXIT_INPUT, EXIT_GUARD, EXIT_MISMATCH = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _lattice_json(lat) -> dict:
    return lat.to_json()


def _emit(args, payload) -> None:
    if isinstance(payload, (dict, list)):
        if getattr(args, "format", "json") == "text":
            text = _as_text(payload)
        else:
            text = json.dumps(payload, indent=2, sort_keys=False) + "\n"
    else:
        text = payload
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _as_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_as_text(v, indent + 1).rstrip("\n"))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    else:
        for v in obj:
            lines.append(f"{pad}- {json.dumps(v)}")
    return "\n".join(lines) + "\n"


# -- shared setup -------------------------------------------------------------

def _split(args) -> ZakSplit:
    if (args.P is None) != (args.Q is None):
        raise UsageError("--P and --Q must be given together")
    if args.P is not None:
        return ZakSplit(args.P * args.Q, args.P)
    return ZakSplit(args.L, args.N)


def _seed() -> int | None:
    raw = os.environ.get("GABINV_SEED")
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"GABINV_SEED must be an integer, got {raw!r}") from None


def _window(args, split: ZakSplit) -> np.ndarray:
    vec = resolve_window(load_window_arg(args.window), split)
    if getattr(args, "phase", "one") == "random":
        rng = np.random.default_rng(_seed())
        z = finite_zak(vec, split).values
        z = z * np.exp(2j * np.pi * rng.random(z.shape))
        vec = inverse_finite_zak(ZakGrid(z, split=split))
    return vec


_FLAG_NAMES = {"lam": "--lambda"}


def _require(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise UsageError(f"{_FLAG_NAMES.get(n, '--' + n.replace('_', '-'))} is required")


def _resolution(split: ZakSplit) -> dict:
    return {"mode": "finite", "L": split.L, "N": split.N, "M": split.M, "grid": [split.N, split.M]}


# -- subcommands --------------------------------------------------------------

def cmd_lattice_info(args) -> int:
    if args.lam is None and args.tilde is None:
        raise UsageError("give --lambda and/or --tilde")
    out = {}
    for key, text in (("lambda", args.lam), ("lambda_tilde", args.tilde)):
        if text is None:
            continue
        lat = parse_lattice(text)
        entry = _lattice_json(lat)
        entry["dual"] = dual(lat).to_text()
        entry["adjoint"] = adjoint(lat).to_text()
        entry["adjoint_formula"] = format_matrix(adjoint_formula(parse_matrix(text)))
        out[key] = entry
    if args.lam is not None and args.tilde is not None:
        lam, tilde = parse_lattice(args.lam), parse_lattice(args.tilde)
        if not sublattice_of(lam, tilde):
            raise UsageError("--lambda must be a sublattice of --tilde")
        part = quotient_cosets(adjoint(lam), adjoint(tilde))
        out["index"] = index(lam, tilde)
        out["cosets"] = part.to_json()
    _emit(args, out)
    return EXIT_OK


def cmd_diagram(args) -> int:
    lam = parse_lattice(args.lam or BASE_LATTICE)
    marks = None
    if args.case:
        c = case(args.case)
        if args.tilde is not None:
            raise UsageError("--case and --tilde are exclusive")
        tilde, marks = c.tilde, c.marks
    elif args.tilde:
        tilde = parse_lattice(args.tilde)
    else:
        raise UsageError("give --case or --tilde")
    if args.mark:
        marks = [tuple(Fraction(x) for x in m.split(",")) for m in args.mark]
    if not sublattice_of(lam, tilde) or not sublattice_of(tilde, integer_lattice(2)):
        raise UsageError("need Lambda <= Lambda~ <= Z^2")
    fmt = args.format or "svg"
    if fmt == "svg":
        _emit(args, render_svg(lam, tilde, marks))
    elif fmt == "ascii":
        _emit(args, render_ascii(lam, tilde, marks))
    else:
        raise UsageError(f"diagram format must be svg or ascii, got {fmt}")
    return EXIT_OK


def _setup_check(args):
    _require(args, "lam", "tilde")
    split = _split(args)
    lam, tilde = parse_lattice(args.lam), parse_lattice(args.tilde)
    model = model_for(split, lam, _window(args, split))
    return split, lam, tilde, model


def cmd_check(args) -> int:
    split, lam, tilde, model = _setup_check(args)
    rep = check(model, tilde, args.tau, oracle=args.oracle, tol=args.tol)
    out = rep.to_json(max_witnesses=args.max_witnesses)
    out["resolution"] = _resolution(split)
    A, B, riesz = riesz_frame_bounds(model, args.tau)
    out["riesz"] = {"A": A, "B": B, "is_riesz_basis": riesz}
    if args.decompose:
        out["decomposition"] = decompose(model.window, model, tilde, args.tau, args.tol).to_json()
    if args.sis:
        out["sis"] = {"p": split.N, "full_translation": sis_full_translation(dft(model.window), split.N, args.tau)}
    _emit(args, out)
    return EXIT_OK


def cmd_decompose(args) -> int:
    split, lam, tilde, model = _setup_check(args)
    f = model.window if args.signal is None else resolve_window(load_window_arg(args.signal), split)
    res = decompose(f, model, tilde, args.tau, args.tol)
    out = {"lambda": lam.to_text(), "lambda_tilde": tilde.to_text(), "N": len(res.norms),
           "decomposition": res.to_json(), "resolution": _resolution(split)}
    _emit(args, out)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    _require(args, "lam")
    split = _split(args)
    lam = parse_lattice(args.lam)
    model = model_for(split, lam, _window(args, split))
    ambient = parse_lattice(args.ambient) if args.ambient else integer_lattice(2)
    result = invariance_set(model.zak_window, lam, ambient, args.tau, model if args.oracle else None, args.tol)
    out = {"lambda": lam.to_text(), "maximal": result.maximal.to_text(), "rows": list(result.table),
           "resolution": _resolution(split)}
    _emit(args, out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    _require(args, "lam")
    split = _split(args)
    lam = parse_lattice(args.lam)
    tildes = [parse_lattice(args.tilde)] if args.tilde else intermediate_lattices(lam, integer_lattice(2))
    windows = [("window", _window(args, split))]
    rng = np.random.default_rng(_seed())
    for k in range(args.random):
        supp = rng.random(split.resolution) < rng.random()
        z = supp * np.exp(2j * np.pi * rng.random(split.resolution))
        windows.append((f"random[{k}]", inverse_finite_zak(ZakGrid(z, split=split))))
    rows, mismatches = [], 0
    for name, vec in windows:
        model = model_for(split, lam, vec)
        for tilde in tildes:
            cd = condition_d(model.zak_window, lam, tilde, args.tau).condition_d
            orc = brute_force_lattice(model, tilde, args.tol)
            mismatches += cd != orc
            rows.append({"window": name, "lambda_tilde": tilde.to_text(), "condition_d": cd, "oracle": orc})
    _emit(args, {"lambda": lam.to_text(), "checks": len(rows), "disagreements": mismatches, "rows": rows,
                 "resolution": _resolution(split)})
    return EXIT_MISMATCH if mismatches else EXIT_OK


# -- argument parsing ---------------------------------------------------------

def _add_model_flags(p):
    p.add_argument("--lambda", dest="lam", metavar="LATTICE", help='lattice in model units, e.g. "4,0;0,2"')
    p.add_argument("--window", default="catalog:indicator", help="window JSON file or catalog:NAME")
    p.add_argument("--L", type=int, default=32)
    p.add_argument("--N", type=int, default=4)
    p.add_argument("--P", type=int, default=None, help="Zak grid time resolution (sets N=P, L=P*Q)")
    p.add_argument("--Q", type=int, default=None, help="Zak grid frequency resolution")
    p.add_argument("--tau", type=float, default=1e-9, help="relative zero threshold")
    p.add_argument("--tol", type=float, default=1e-9, help="span residual tolerance")
    p.add_argument("--phase", choices=("one", "random"), default="one",
                   help="replace Zak phases by seeded random ones (GABINV_SEED)")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gabinv", description="Extra invariance of Gabor spaces on integer lattices.")
    parser.add_argument("--version", action="version", version=f"gabinv {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    lat = sub.add_parser("lattice", help="lattice utilities")
    lsub = lat.add_subparsers(dest="lattice_command", parser_class=_Parser)
    info = lsub.add_parser("info", help="canonical basis, dual, adjoint, cosets")
    info.add_argument("--lambda", dest="lam", metavar="LATTICE")
    info.add_argument("--tilde", metavar="LATTICE")
    info.add_argument("--out")
    info.add_argument("--format", choices=("json", "text"), default="json")
    info.set_defaults(func=cmd_lattice_info)

    dia = lsub.add_parser("diagram", help="render a lattice pair and its mask B^(0)")
    dia.add_argument("--lambda", dest="lam", metavar="LATTICE", default=None)
    dia.add_argument("--tilde", metavar="LATTICE")
    dia.add_argument("--case", choices=[c.name for c in CASES])
    dia.add_argument("--mark", action="append", metavar="A,B", help="generator to draw in red (repeatable)")
    dia.add_argument("--format", choices=("svg", "ascii"), default="svg")
    dia.add_argument("--out")
    dia.set_defaults(func=cmd_diagram)

    chk = sub.add_parser("check", help="condition (d) for Lambda <= Lambda~")
    _add_model_flags(chk)
    chk.add_argument("--tilde", metavar="LATTICE")
    chk.add_argument("--oracle", action="store_true", help="cross-check with the brute-force span test")
    chk.add_argument("--decompose", action="store_true", help="decompose the window along the masks")
    chk.add_argument("--sis", action="store_true", help="add the shift-invariant-space analog")
    chk.add_argument("--max-witnesses", type=int, default=50)
    chk.set_defaults(func=cmd_check)

    dec = sub.add_parser("decompose", help="orthogonal decomposition along B^(l)")
    _add_model_flags(dec)
    dec.add_argument("--tilde", metavar="LATTICE")
    dec.add_argument("--signal", help="signal to decompose (window JSON or catalog:NAME); default the window")
    dec.set_defaults(func=cmd_decompose)

    enu = sub.add_parser("enumerate", help="verdicts for every intermediate lattice")
    _add_model_flags(enu)
    enu.add_argument("--ambient", metavar="LATTICE", help="upper lattice (default Z^2)")
    enu.add_argument("--oracle", action="store_true")
    enu.set_defaults(func=cmd_enumerate)

    orc = sub.add_parser("oracle", help="compare condition (d) with the brute-force oracle")
    _add_model_flags(orc)
    orc.add_argument("--tilde", metavar="LATTICE", help="single lattice (default: all intermediates)")
    orc.add_argument("--random", type=int, default=0, help="extra random-support windows")
    orc.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help, --version
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except IndexGuardError as exc:
        print(f"gabinv: enumeration guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (OracleMismatchError, ConditionInconsistencyError) as exc:
        print(f"gabinv: mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (UsageError, LatticeError, ZakError, WindowError, InvarianceError, KeyError, ValueError, OSError) as exc:
        print(f"gabinv: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
