"""Command-line front end.

Every output file starts with one comment line recording the package
version, the full argument vector and the tolerance set in force::

    # hurwitzlab 0.1.0 argv=["counts", "--m", "4", "--k", "2"] tol={...}

Outputs are assembled in memory and written in one step, so a failing
invocation never leaves a partial file behind.

Exit codes: 0 success, 2 usage or domain error, 3 file error, 4 enumeration
cap exceeded, 5 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
from pathlib import Path

from hurwitzlab import __version__
from hurwitzlab.asymptotics import (
    conjecture_sweep,
    m0_estimate,
    positivity_signs,
    series_check,
)
from hurwitzlab.config import Tolerances, get_tolerances, tolerances
from hurwitzlab.errors import FileError, HurwitzError, NumericalError
from hurwitzlab.extremal import MODES, SearchConfig, extremal_search
from hurwitzlab.hurwitz import hurwitz_trace, hurwitz_trace_enumerate, trace_table
from hurwitzlab.linalg import operator_norm
from hurwitzlab.matrixio import dumps_matrix, read_matrix
from hurwitzlab.sampling import KINDS, sample_pair, sample_phone
from hurwitzlab.words import binomial, count_C

DEFAULT_VERIFY_LIMIT = 2000


def num(x) -> str:
    """Locale-free shortest round-trip text for a float."""
    return repr(float(x))


def json_num(x):
    x = float(x)
    return x if math.isfinite(x) else None


def header(argv: list[str]) -> str:
    tol = json.dumps(get_tolerances().as_dict(), sort_keys=True)
    return f"# hurwitzlab {__version__} argv={json.dumps(argv)} tol={tol}\n"


def write_atomic(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    target = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".",
                                   prefix=".hurwitzlab-")
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except OSError as exc:
        raise FileError(f"cannot write {path}: {exc}") from exc


def load(path: str):
    try:
        return read_matrix(path)
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc}") from exc


def parse_tol(items: list[str]) -> dict:
    fields = {f.name: f.type for f in dataclasses.fields(Tolerances)}
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or name not in fields:
            raise argparse.ArgumentTypeError(
                f"--tol expects name=value with name in {sorted(fields)}, got {item!r}")
        try:
            out[name] = int(value) if fields[name] in (int, "int") else float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad value in --tol {item!r}") from None
    return out


def _pair(args):
    """Matrices from ``--a/--b`` files or the sampler flags."""
    if args.a is not None or args.b is not None:
        if args.a is None or args.b is None:
            raise argparse.ArgumentTypeError("--a and --b must be given together")
        return load(args.a), load(args.b)
    if getattr(args, "n", None) is None:
        raise argparse.ArgumentTypeError("give --a/--b files or --n/--seed/--kind")
    a, b = sample_pair(args.n, args.seed, args.kind)
    return a.matrix, b.matrix


def cmd_trace(args) -> dict[str | None, str]:
    A, B = load(args.a), load(args.b)
    m, k = args.m, args.k
    if args.method == "recurrence":
        t = hurwitz_trace(A, B, m, k)
        sign, log10_abs, q = t.sign, t.log10_abs, t.q
    else:
        value = hurwitz_trace_enumerate(A, B, m, k)
        sign = (value > 0) - (value < 0)
        log10_abs = math.log10(abs(value)) if value else -math.inf
        na, nb = operator_norm(A), operator_norm(B)
        scale = A.shape[0] * binomial(m, k) * na ** (m - k) * nb**k if 0 <= k <= m else 0.0
        q = value / scale if scale else 0.0
    body = {"sign": sign, "log10_abs": json_num(log10_abs), "q": q, "method": args.method}
    return {args.out: json.dumps(body) + "\n"}


def cmd_table(args):
    A, B = load(args.a), load(args.b)
    table = trace_table(A, B, args.max_m, args.max_k)
    lines = ["m,k,sign,log10_abs_trace,q"]
    for (m, k), t in table.rows():
        lines.append(f"{m},{k},{t.sign},{num(t.log10_abs)},{num(t.q)}")
    return {args.out: "\n".join(lines) + "\n"}


def cmd_conjecture(args):
    A, B = _pair(args)
    sweep = conjecture_sweep(A, B, args.k, args.m_max)
    lines = ["m,q,delta_q"]
    prev = None
    for m, q in enumerate(sweep.q):
        dq = "" if prev is None else num(q - prev)
        lines.append(f"{m},{num(q)},{dq}")
        prev = q
    tol = get_tolerances().mono_tol
    if sweep.first_increase is None:
        lines.append(f"# status: no-increase k={args.k} m_max={args.m_max} mono_tol={tol!r}")
    else:
        m, dq = sweep.first_increase
        lines.append(f"# status: increase m={m} delta_q={dq!r} k={args.k} mono_tol={tol!r}")
        lines.append("# A=" + dumps_matrix(A).strip())
        lines.append("# B=" + dumps_matrix(B).strip())
    return {args.out: "\n".join(lines) + "\n"}


def cmd_m0(args):
    A, B = load(args.a), load(args.b)
    est = m0_estimate(A, B, args.k)
    body = est.as_dict()
    body["norm_gap"] = json_num(body["norm_gap"])
    verified = None
    lo = math.ceil(est.m0)
    if not est.trace_zero and lo <= args.verify_limit:
        signs = positivity_signs(A, B, args.k, lo, 11)
        bad = [m for m, s in signs.items() if s <= 0]
        if bad:
            raise NumericalError(f"tr S_(m,{args.k}) is not positive at m = {bad}")
        verified = [lo, lo + 10]
    body["verified_range"] = verified
    return {args.out: json.dumps(body) + "\n"}


def cmd_counts(args):
    m, k = args.m, args.k
    if not 0 <= k <= m:
        raise argparse.ArgumentTypeError("need 0 <= k <= m")
    lines = ["m,k,s,count"]
    for s in range(min(k, m - k) + 1):
        lines.append(f"{m},{k},{s},{count_C(m, k, s)}")
    return {args.out: "\n".join(lines) + "\n"}


def cmd_series(args):
    A, B = _pair(args)
    lines = ["tau,k,M,resolvent,partial_sum,abs_error,tail_bound,scaled_resolvent,leading"]
    for tau in args.tau:
        c = series_check(A, B, args.k, tau, args.M)
        scaled = (1 - tau) ** args.k * c.resolvent
        lines.append(",".join([num(tau), str(args.k), str(args.M), num(c.resolvent),
                               num(c.partial_sum), num(c.error), num(c.tail_bound),
                               num(scaled), num(c.leading)]))
    return {args.out: "\n".join(lines) + "\n"}


def cmd_el(args):
    config = SearchConfig(p=args.p, steps=args.steps, step_size=args.step_size,
                          shrink=args.shrink, seed=args.seed, mode=args.mode)
    start = None
    if args.start_a is not None or args.start_b is not None:
        if args.start_a is None or args.start_b is None:
            raise argparse.ArgumentTypeError("--start-a and --start-b must be given together")
        start = (load(args.start_a), load(args.start_b))
    result = extremal_search(args.n, args.m, args.k, config, start=start)
    outputs = {args.out: json.dumps(result.as_dict()) + "\n"}
    if args.trajectory is not None:
        lines = ["step,objective,combined"]
        lines += [f"{i},{num(obj)},{num(res)}" for i, obj, res in result.trajectory]
        outputs[args.trajectory] = "\n".join(lines) + "\n"
    return outputs


def cmd_sample(args):
    return {args.out: dumps_matrix(sample_phone(args.n, args.seed, args.kind).matrix)}


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="override a tolerance; repeatable")

    parser = argparse.ArgumentParser(prog="hurwitzlab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"hurwitzlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    def pair_flags(p, sampled=False):
        p.add_argument("--a", help="matrix JSON file for A")
        p.add_argument("--b", help="matrix JSON file for B")
        if sampled:
            p.add_argument("--n", type=_positive, help="sample a pair of this size instead")
            p.add_argument("--seed", type=_nonneg, default=0)
            p.add_argument("--kind", choices=KINDS, default="wishart")

    p = add("trace", cmd_trace, "tr S_{m,k}(A, B)")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--m", type=_nonneg, required=True)
    p.add_argument("--k", type=_nonneg, required=True)
    p.add_argument("--method", choices=("recurrence", "enumerate"), default="recurrence")

    p = add("table", cmd_table, "all traces up to --max-m in one pass")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--max-m", type=_positive, required=True)
    p.add_argument("--max-k", type=_nonneg)

    p = add("conjecture", cmd_conjecture, "monotonicity sweep of q_{m+k,k}")
    pair_flags(p, sampled=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--m-max", type=_nonneg, default=200)

    p = add("m0", cmd_m0, "explicit positivity threshold m0")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--verify-limit", type=_nonneg, default=DEFAULT_VERIFY_LIMIT,
                   help="check positivity on [ceil(m0), ceil(m0)+10] when ceil(m0) <= this")

    p = add("counts", cmd_counts, "sizes of the classes C(m, k, s)")
    p.add_argument("--m", type=_nonneg, required=True)
    p.add_argument("--k", type=_nonneg, required=True)

    p = add("series", cmd_series, "resolvent trace against its truncated series")
    pair_flags(p, sampled=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--tau", type=float, nargs="+", required=True)
    p.add_argument("--M", type=_nonneg, default=60)

    p = add("el", cmd_el, "hill-climb for extremal pairs and report EL residuals")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--steps", type=_positive, default=1000)
    p.add_argument("--step-size", type=float, default=0.1)
    p.add_argument("--shrink", type=float, default=0.5)
    p.add_argument("--seed", type=_nonneg, default=0)
    p.add_argument("--mode", choices=MODES, default="maximize")
    p.add_argument("--start-a")
    p.add_argument("--start-b")
    p.add_argument("--trajectory", help="write the accepted-step trajectory CSV here")

    p = add("sample", cmd_sample, "deterministic random phone matrix")
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--seed", type=_nonneg, required=True)
    p.add_argument("--kind", choices=KINDS, default="wishart")

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        overrides = parse_tol(args.tol)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    try:
        with tolerances(**overrides):
            outputs = args.func(args)
            head = header(argv)
        for path, text in outputs.items():
            write_atomic(path, head + text)
    except argparse.ArgumentTypeError as exc:
        print(f"hurwitzlab: error: {exc}", file=sys.stderr)
        return 2
    except HurwitzError as exc:
        print(f"hurwitzlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
