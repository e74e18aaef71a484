"""Command-line driver: ``design``, ``analyze``, ``verify`` and ``simulate``.

Exit codes: 0 success, 1 domain failure (infeasible design, failed check,
resource cap hit), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Sequence

from . import codes, lattices, ring_arith
from .codes import LinearCode, cartesian_power, row_reduce_mod_p
from .designer import (
    DesignError,
    UniformDesign,
    certify_theorem1,
    check_lemma1,
    design_canonical,
    design_sos,
    lift_cartesian,
)
from .errors import InconsistentCodeError, NotApplicableError, ResourceLimitError
from .index_code import (
    GAIN_UNIT_DB,
    UNIFORM_TOL_DB,
    CrtIndexCode,
    check_bijectivity,
    gain_report,
    gain_upper_bound,
    verify_prop1,
)
from .ring_arith import is_prime, subset_product
from .sim import ChannelConfig, curves_to_csv, curves_to_json, default_subsets, monte_carlo
from .specfile import CodeSpec, SpecFormatError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- argument types -----------------------------------------------------------

def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _primes(text: str) -> tuple[int, ...]:
    ps = _int_list(text)
    if not ps:
        raise argparse.ArgumentTypeError("at least one prime required")
    bad = [p for p in ps if not is_prime(p)]
    if bad:
        raise argparse.ArgumentTypeError(f"not prime: {', '.join(map(str, bad))}")
    if len(set(ps)) != len(ps):
        raise argparse.ArgumentTypeError("primes must be distinct")
    return ps


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _snr_grid(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) != 3:
            raise ValueError
        return ChannelConfig.grid(*(float(p) for p in parts))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:STOP:STEP, got {text!r}")


def _subsets(text: str, r: int) -> tuple[tuple[int, ...], ...]:
    if text == "all":
        return default_subsets(r)
    out = []
    for item in text.split(";"):
        item = item.strip()
        if item in ("none", ""):
            out.append(())
            continue
        S = tuple(sorted(set(_int_list(item))))
        if not all(1 <= j <= r for j in S) or len(S) >= r:
            raise UsageError(f"side-information set {item!r} is not a proper subset of 1..{r}")
        out.append(S)
    return tuple(out)


# -- helpers ------------------------------------------------------------------

def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load(path: str) -> CodeSpec:
    try:
        return CodeSpec.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    except SpecFormatError as exc:
        raise UsageError(f"{path}: {exc}")


def _build(spec: CodeSpec) -> CrtIndexCode:
    try:
        return spec.build()
    except InconsistentCodeError:
        raise
    except ValueError as exc:
        raise UsageError(f"invalid code spec: {exc}")


_CAPS = (
    ("enum_cap", codes, "ENUMERATION_CAP"),
    ("sos_cap", ring_arith, "SUM_OF_SQUARES_CAP"),
    ("collinear_cap", ring_arith, "COLLINEAR_CAP"),
    ("box_cap", lattices, "BOX_CAP"),
)


@contextmanager
def _caps_applied(args: argparse.Namespace):
    saved = [(mod, name, getattr(mod, name)) for _, mod, name in _CAPS]
    try:
        for flag, mod, name in _CAPS:
            if getattr(args, flag) is not None:
                setattr(mod, name, getattr(args, flag))
        yield
    finally:
        for mod, name, value in saved:
            setattr(mod, name, value)


def default_decomposition(designs: Sequence[UniformDesign]) -> UniformDesign:
    """Smallest largest coordinate, ties broken lexicographically."""
    return min(designs, key=lambda d: (max(d.decomposition), d.decomposition))


def _summarize(design: UniformDesign, err) -> None:
    code = design.code
    print(f"kind: {design.kind}", file=err)
    print(f"primes: {','.join(map(str, code.primes))}  n={code.n}  ranks={list(code.ranks)}", file=err)
    print(f"predicted gain: {design.predicted_gain:.10f} dB/bit/dim", file=err)
    print(f"confirmed: {design.confirmed} (overall {design.report.overall_gain:.10f})", file=err)


# -- design -------------------------------------------------------------------

def cmd_design(args: argparse.Namespace) -> int:
    err = sys.stderr if args.output is None else sys.stdout
    if args.family == "canonical":
        try:
            design = design_canonical(args.primes, args.n, args.k, args.shared)
        except DesignError as exc:
            raise UsageError(str(exc))
        _summarize(design, err)
        _emit(CodeSpec.from_code(design.code, design.metadata()).dumps(), args.output)
        return EXIT_OK

    if len(args.primes) < 2:
        raise UsageError("sum-of-squares designs need at least two primes")
    result = design_sos(args.primes, args.N)
    q = math.prod(args.primes)
    print(f"q = {q}: {len(result.decompositions)} decomposition(s) into {args.N} squares", file=err)
    for rej in result.rejections:
        print(f"rejected {rej.describe(args.primes)}", file=err)
    for d in result.designs:
        wit = ", ".join(
            f"p={p}: lambda={lam} b={b}" for p, (lam, b) in zip(args.primes, map(d.level_witnesses.get, range(1, len(args.primes) + 1)))
        )
        print(f"accepted {d.decomposition}: {wit}", file=err)
    if not result.designs:
        print(f"error: {result.diagnostic}", file=sys.stderr)
        return EXIT_FAIL

    if args.decomposition is not None:
        chosen = [d for d in result.designs if tuple(sorted(args.decomposition)) == d.decomposition]
        if not chosen:
            print(f"error: decomposition {args.decomposition} is not among the accepted designs", file=sys.stderr)
            return EXIT_FAIL
        design = chosen[0]
    else:
        design = default_decomposition(result.designs)
    if args.m > 1:
        design = lift_cartesian(design, args.m)
    print(f"selected {design.decomposition} (m={design.m})", file=err)
    if args.certify_theorem1:
        cert = design.certificate
        for S, sols in cert.witnesses.items():
            P = subset_product(args.primes, S)
            shown = "; ".join(f"lambda={lam} b={b}" for lam, b in sols) or "none"
            print(f"  P={P} {S}: {shown}", file=err)
        print(f"subset-product certificate: {'passed' if cert.passed else 'FAILED'}", file=err)
    _summarize(design, err)
    _emit(CodeSpec.from_code(design.code, design.metadata()).dumps(), args.output)
    return EXIT_OK


# -- analyze ------------------------------------------------------------------

def cmd_analyze(args: argparse.Namespace) -> int:
    spec = _load(args.spec)
    idx = _build(spec)
    if idx.r == 1:
        print("warning: a single level has no side-information subsets; reporting rates only", file=sys.stderr)
        rates = idx.level_rates()
        if args.format == "json":
            text = json.dumps({"primes": list(idx.primes), "n": idx.n, "ranks": list(idx.ranks),
                               "level_rates": list(rates), "total_rate": sum(rates)}, indent=2)
        else:
            text = "level,prime,rank,rate\n" + "".join(
                f"{j},{p},{k},{rate:.12g}\n" for j, (p, k, rate) in enumerate(zip(idx.primes, idx.ranks, rates), 1)
            )
        _emit(text, args.output)
        return EXIT_OK
    report = gain_report(idx)
    text = json.dumps(report.as_dict(), indent=2) if args.format == "json" else report.to_csv()
    _emit(text, args.output)
    return EXIT_OK


# -- verify -------------------------------------------------------------------

def _sos_checks(idx: CrtIndexCode, meta: dict) -> list[tuple[str, bool, str]]:
    x = tuple(int(v) for v in meta["decomposition"])
    m = int(meta.get("m", 1))
    out = []
    q_ok = sum(v * v for v in x) == idx.q and len(x) * m == idx.n
    out.append(("decomposition", q_ok, f"|x|^2 = {sum(v * v for v in x)}, q = {idx.q}, N*m = {len(x) * m}"))
    if not q_ok:
        return out
    out.append(("rank1-distance", check_lemma1(x), f"<x> over Z_{idx.q} has minimum distance sqrt({idx.q})"))
    bad = []
    for j, (p, level) in enumerate(zip(idx.primes, idx.levels), start=1):
        expected = cartesian_power(LinearCode(p, len(x), (tuple(v % p for v in x),)), m)
        if row_reduce_mod_p(level.generators, p) != row_reduce_mod_p(expected.generators, p):
            bad.append(j)
    out.append(("levels-generated-by-x", not bad, "all levels collinear with x" if not bad else f"levels {bad} differ"))
    cert = certify_theorem1(idx.primes, x)
    fails = [subset_product(idx.primes, S) for S in cert.failing]
    out.append(("subset-witnesses", cert.passed, "all subset products certified" if cert.passed else f"failing products {fails}"))
    report = gain_report(idx)
    target = len(x) / 2 * GAIN_UNIT_DB
    g = report.overall_gain
    ok = report.uniform and g is not None and abs(g - target) <= UNIFORM_TOL_DB
    out.append(("uniform-gain", ok, f"overall {g} vs (N/2)*20log10(2) = {target}"))
    return out


def run_checks(idx: CrtIndexCode, meta: dict) -> list[tuple[str, bool, str]]:
    checks = []
    bij = check_bijectivity(idx)
    mode = "exhaustive" if bij.exhaustive else "sampled"
    checks.append(("bijectivity", bij.passed, f"{bij.checked} tuples ({mode}), {bij.mismatches} mismatches"))
    if idx.r >= 2:
        prop = verify_prop1(idx)
        bad = [r.subset for r in prop.rows if not r.passed]
        checks.append(("sublattice-bounds", prop.passed, "volume identity and distance bounds" if prop.passed else f"fails on {bad}"))
        report = gain_report(idx)
        try:
            bound = gain_upper_bound(idx)
        except NotApplicableError as exc:
            checks.append(("gain-bound", True, f"not applicable: {exc}"))
        else:
            g = report.overall_gain
            ok = g is not None and g <= bound + UNIFORM_TOL_DB
            detail = f"overall {g} <= {bound}"
            if meta.get("kind") == "canonical":
                ok = ok and abs(g - bound) <= UNIFORM_TOL_DB and report.uniform
                detail = f"overall {g} == {bound} (uniform={report.uniform})"
            checks.append(("gain-bound", ok, detail))
    if meta.get("decomposition") is not None:
        checks.extend(_sos_checks(idx, meta))
    return checks


def cmd_verify(args: argparse.Namespace) -> int:
    spec = _load(args.spec)
    try:
        idx = _build(spec)
    except InconsistentCodeError as exc:
        print(f"FAIL construction: {exc}")
        return EXIT_FAIL
    checks = run_checks(idx, spec.design)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_FAIL


# -- simulate -----------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace) -> int:
    spec = _load(args.spec)
    idx = _build(spec)
    subsets = _subsets(args.subsets, idx.r)
    cfg = ChannelConfig(trials=args.trials, seed=args.seed, snr_db=args.snr, subsets=subsets)
    curves = monte_carlo(idx, cfg)
    text = curves_to_json(curves) if args.format == "json" else curves_to_csv(curves, args.emit_theory)
    _emit(text, args.output)
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    caps = argparse.ArgumentParser(add_help=False)
    g = caps.add_argument_group("resource caps")
    g.add_argument("--enum-cap", type=_positive, default=None,
                   help=f"max codewords enumerated (default {codes.ENUMERATION_CAP})")
    g.add_argument("--sos-cap", type=_positive, default=None,
                   help=f"max sum-of-squares decompositions (default {ring_arith.SUM_OF_SQUARES_CAP})")
    g.add_argument("--collinear-cap", type=_positive, default=None,
                   help=f"max multipliers scanned per witness search (default {ring_arith.COLLINEAR_CAP})")
    g.add_argument("--box-cap", type=_positive, default=None,
                   help=f"max points in a lattice coefficient box (default {lattices.BOX_CAP})")

    parser = argparse.ArgumentParser(prog="crtindex", description="CRT lattice index codes")
    sub = parser.add_subparsers(dest="command", required=True)

    design = sub.add_parser("design", help="build a uniform-gain code")
    fam = design.add_subparsers(dest="family", required=True)
    can = fam.add_parser("canonical", parents=[caps], help="levels spanned by unit vectors")
    can.add_argument("--primes", type=_primes, required=True)
    can.add_argument("--n", type=_positive, required=True)
    can.add_argument("--k", type=_positive, required=True)
    can.add_argument("--shared", type=_positive, default=1, help="1-based coordinate shared by all levels")
    can.add_argument("-o", "--output", help="write the spec here instead of stdout")
    sos = fam.add_parser("sos", parents=[caps], help="rank-1 levels from a sum-of-squares decomposition")
    sos.add_argument("--primes", type=_primes, required=True)
    sos.add_argument("--N", type=_positive, required=True)
    sos.add_argument("--m", type=_positive, default=1, help="Cartesian lift factor")
    sos.add_argument("--certify-theorem1", action="store_true", help="print every subset-product witness")
    sos.add_argument("--decomposition", type=_int_list, default=None, help="pick this decomposition")
    sos.add_argument("-o", "--output", help="write the spec here instead of stdout")

    ana = sub.add_parser("analyze", parents=[caps], help="side-information gain table")
    ana.add_argument("spec")
    ana.add_argument("--format", choices=("csv", "json"), default="csv")
    ana.add_argument("-o", "--output")

    ver = sub.add_parser("verify", parents=[caps], help="run the structural checks")
    ver.add_argument("spec")

    simp = sub.add_parser("simulate", parents=[caps], help="Monte Carlo SER over AWGN")
    simp.add_argument("--spec", required=True)
    simp.add_argument("--snr", type=_snr_grid, default=_snr_grid("0:40:1"), help="START:STOP:STEP in dB")
    simp.add_argument("--trials", type=_positive, default=100_000)
    simp.add_argument("--seed", type=int, default=42)
    simp.add_argument("--subsets", default="all", help="'all', or ';'-separated sets such as 'none;1;1,2'")
    simp.add_argument("--emit-theory", action="store_true", help="add the high-SNR approximation column")
    simp.add_argument("--format", choices=("csv", "json"), default="csv")
    simp.add_argument("-o", "--output")
    return parser


_COMMANDS = {"design": cmd_design, "analyze": cmd_analyze, "verify": cmd_verify, "simulate": cmd_simulate}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with _caps_applied(args):
            return _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"crtindex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceLimitError, DesignError, InconsistentCodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
