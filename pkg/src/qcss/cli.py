"""Command-line front end: the pipeline staged through qcode files.

Subcommands: construct, extend, verify, girth, hashing-bound, decode-one,
simulate, threshold.  Exit codes: 0 success, 1 verification failure,
2 usage error, 3 search/solve/estimation exhaustion.

Bit vectors on the command line are hex strings of the little-endian
packed vector (bit i of the vector is bit i of the integer).
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import qcodefile, sim
from .channel import hashing_rate
from .decoder import (JointDecoder, build_graphs, compute_syndromes_fq,
                      symbols_from_bits, syndrome_symbols_from_bits)
from .extend import NoNonzeroSolutionError, extend_pair
from .field import GF2e, poly_from_string
from .protograph import (SearchExhausted, assemble, check_condition_a,
                         check_condition_b, search_arrays)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3


def _parse_grid(text: str):
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be a:b:step, got {text!r}")
    if step <= 0 or b < a:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    n = int(round((b - a) / step))
    vals = [a + k * step for k in range(n + 1)]
    return [v for v in vals if v <= b + 1e-12]


def _bits_to_hex(bits) -> str:
    val = 0
    for i, b in enumerate(np.asarray(bits, dtype=np.int64)):
        val |= int(b) << i
    width = (len(bits) + 3) // 4
    return format(val, f"0{width}x")


def _hex_to_bits(s: str, n: int):
    val = int(s, 16)
    if val >> n:
        raise ValueError(f"hex vector {s!r} has more than {n} bits")
    return np.array([(val >> i) & 1 for i in range(n)], dtype=np.uint8)


def _cmd_construct(args) -> int:
    try:
        arrays = search_arrays(args.P, args.L, args.girth_target, kind=args.kind,
                               rng_seed=args.seed)
    except SearchExhausted as exc:
        print(f"search-exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    comments = [f"construct P={args.P} L={args.L} girth_target={args.girth_target} "
                f"kind={args.kind} seed={args.seed}"]
    qcodefile.dump_proto(args.out, arrays, comments=comments)
    pair = assemble(arrays)
    print(f"wrote {args.out}: P={args.P} L={args.L} girth={pair.girth()}")
    return EXIT_OK


def _cmd_extend(args) -> int:
    qf = qcodefile.load(getattr(args, "in"))
    field = GF2e(args.e, poly_from_string(args.poly) if args.poly else None)
    pair = qf.proto_pair()
    try:
        ext = extend_pair(pair, field, rng_seed=args.seed, trivial=args.trivial)
    except NoNonzeroSolutionError as exc:
        print(f"no-all-nonzero-solution: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    comments = list(qf.comments) + [
        f"extend e={args.e} poly={args.poly or 'default'} seed={args.seed} "
        f"trivial={args.trivial}"]
    qcodefile.dump_extended(args.out, ext, comments=comments)
    print(f"wrote {args.out}: extended over GF(2^{args.e})")
    return EXIT_OK


def _cmd_verify(args) -> int:
    qf = qcodefile.load(getattr(args, "in"))
    arrays = qf.arrays()
    pair = assemble(arrays)
    results = []
    results.append(("condition-a", check_condition_a(arrays)))
    results.append(("condition-b", check_condition_b(arrays)))
    results.append(("proto-orthogonal-F2", pair.orthogonal()))
    g = pair.girth()
    if args.girth_target is not None:
        results.append((f"girth>={args.girth_target} (girth={g})",
                        g >= args.girth_target))
    else:
        results.append((f"girth={g}", True))
    if qf.extended:
        ext = qf.extended_pair()
        results.append(("lifted-orthogonal-Fq", ext.orthogonal_fq()))
        code = qf.css_code()
        results.append(("expanded-orthogonal-F2", code.verify_orthogonal()))
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return EXIT_OK if all(ok for _, ok in results) else EXIT_VERIFY


def _cmd_girth(args) -> int:
    qf = qcodefile.load(getattr(args, "in"))
    print(qf.proto_pair().girth())
    return EXIT_OK


def _cmd_hashing_bound(args) -> int:
    print("p_d,f_m,R")
    for p in args.pd_grid:
        print(f"{p!r},{2.0 * p / 3.0!r},{hashing_rate(p, args.convention)!r}")
    return EXIT_OK


def _cmd_decode_one(args) -> int:
    qf = qcodefile.load(args.code)
    code = qf.css_code()
    graphs = build_graphs(code)
    decoder = JointDecoder(*graphs)
    if args.error:
        xs, zs = args.error.split(",")
        x = _hex_to_bits(xs, code.n)
        z = _hex_to_bits(zs, code.n)
        xi, zeta = symbols_from_bits(code, x, z)
        sigma, tau = compute_syndromes_fq(code, xi, zeta, graphs=graphs)
    elif args.syndrome:
        ss, ts = args.syndrome.split(",")
        m = code.e * code.num_checks
        sigma, tau = syndrome_symbols_from_bits(
            code, _hex_to_bits(ss, m), _hex_to_bits(ts, m))
    else:
        print("need --error or --syndrome", file=sys.stderr)
        return EXIT_USAGE
    res = decoder.decode(sigma, tau, args.pd, max_iter=args.max_iter)
    print(f"status: {'success' if res.success else 'failure'}")
    print(f"iterations: {res.iterations}")
    print(f"x_hat: {_bits_to_hex(res.x_bits)}")
    print(f"z_hat: {_bits_to_hex(res.z_bits)}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    qf = qcodefile.load(args.code)
    code = qf.css_code()
    comments = [f"simulate code={args.code} fm_grid={args.fm_grid_raw} "
                f"trials={args.trials} max_failures={args.max_failures} "
                f"max_iter={args.max_iter} seed={args.seed} workers={args.workers} "
                f"rng={sim.RNG_ID}"]
    curve = sim.sweep(code, args.fm_grid, args.trials, args.seed,
                      max_iter=args.max_iter, workers=args.workers,
                      max_failures=args.max_failures, out_path=args.out,
                      header_comments=comments)
    for rec in curve:
        print(f"f_m={rec.f_m:.6g} fer={rec.fer:.4g} "
              f"({rec.failures}/{rec.trials} failures, {rec.wall_time:.1f}s)")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_threshold(args) -> int:
    curves = [sim.read_csv(p) for p in args.curves]
    try:
        est = sim.estimate_threshold(curves)
    except sim.NoCrossingError as exc:
        print(f"no-crossing: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    print(f"f_m_star={est.f_star!r} bracket=[{est.bracket[0]!r},{est.bracket[1]!r}] "
          f"P_pair={est.P_pair[0]}x{est.P_pair[1]}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcss",
                                 description="CSS codes from non-binary protograph "
                                             "LDPC pairs: construct, decode, simulate")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="search permutation arrays and write a proto qcode file")
    p.add_argument("--P", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--girth-target", type=int, default=8)
    p.add_argument("--kind", choices=("cpm", "apm"), default="cpm")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("extend", help="lift a proto file to a labeled qcode file")
    p.add_argument("--in", required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--poly", default=None,
                   help="low-degree-first bit string, e.g. 101110001 for 1+x^2+x^3+x^4+x^8")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trivial", action="store_true",
                   help="all-ones labels (binary embedding)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_extend)

    p = sub.add_parser("verify", help="run all structural checks on a qcode file")
    p.add_argument("--in", required=True)
    p.add_argument("--girth-target", type=int, default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("girth", help="print the exact Tanner girth")
    p.add_argument("--in", required=True)
    p.set_defaults(func=_cmd_girth)

    p = sub.add_parser("hashing-bound", help="print (p_d, f_m, R) CSV for the bound curve")
    p.add_argument("--pd-grid", type=_parse_grid, required=True, metavar="A:B:STEP")
    p.add_argument("--convention", choices=("standard", "printed"), default="standard")
    p.set_defaults(func=_cmd_hashing_bound)

    p = sub.add_parser("decode-one", help="decode a single error or syndrome pair")
    p.add_argument("--code", required=True)
    p.add_argument("--pd", type=float, required=True)
    p.add_argument("--max-iter", type=int, default=90)
    p.add_argument("--error", default=None, metavar="XHEX,ZHEX")
    p.add_argument("--syndrome", default=None, metavar="SHEX,THEX")
    p.set_defaults(func=_cmd_decode_one)

    p = sub.add_parser("simulate", help="Monte Carlo FER sweep to CSV")
    p.add_argument("--code", required=True)
    p.add_argument("--fm-grid", type=str, required=True, metavar="A:B:STEP")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--max-failures", type=int, default=None)
    p.add_argument("--max-iter", type=int, default=90)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("threshold", help="crossing of the two largest-P FER curves")
    p.add_argument("--curves", nargs="+", required=True)
    p.set_defaults(func=_cmd_threshold)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "simulate":
        args.fm_grid_raw = args.fm_grid
        args.fm_grid = _parse_grid(args.fm_grid)
    try:
        return args.func(args)
    except (SearchExhausted, NoNonzeroSolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except qcodefile.QCodeParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
