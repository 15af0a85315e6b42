"""Command line entry point: ``comon verify|build|certify``.

Every check prints one line ``CHECK <name> <STATUS> key=value ...``.
Exit codes: 0 all PASS, 1 some FAIL or INCOMPLETE, 2 usage, 3 I/O.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import ComonError, SolverIncomplete

TARGETS = (
    "partition",
    "basis",
    "clone-locus",
    "structural-zeros",
    "witness",
    "decomposition",
    "lower-bound",
    "f-structure",
    "rank4",
    "span-identity",
)
DEFAULT_SEED = 1


@dataclass
class CheckReport:
    name: str
    status: str
    fields: dict = field(default_factory=dict)
    elapsed_ms: int | None = None

    def line(self, timing=False):
        parts = ["CHECK", self.name, self.status]
        parts += [f"{k}={_fmt(v)}" for k, v in self.fields.items()]
        if timing and self.elapsed_ms is not None:
            parts.append(f"elapsed_ms={self.elapsed_ms}")
        return " ".join(parts)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v)
    return str(v).replace(" ", "")


def _status(ok):
    return "PASS" if ok else "FAIL"


def _guard(name, fn):
    """Run one check; library errors become FAIL / INCOMPLETE reports."""
    t0 = time.perf_counter()
    try:
        reps = fn()
    except SolverIncomplete as e:
        reps = [CheckReport(name, "INCOMPLETE", {"detail": e})]
    except (ComonError, ValueError) as e:
        reps = [CheckReport(name, "FAIL", {"detail": e})]
    ms = int((time.perf_counter() - t0) * 1000)
    for r in reps:
        r.elapsed_ms = ms
    return reps


# -- checks ----------------------------------------------------------------


def check_partition(args):
    from .gadgets import verify_partition_property

    r = verify_partition_property()
    return [CheckReport("partition", _status(r.ok), {"subsets": r.subsets, "qualifying": len(r.qualifying)})]


def check_basis(args):
    from .gadgets import rank_one_report, star_span_dims, verify_dim_L

    out = [CheckReport("dim-L", "PASS", {"value": verify_dim_L()})]
    dims = star_span_dims()
    out.append(CheckReport("star-dims", _status(all(d == 60 for d in dims.values())), dims))
    rep = rank_one_report()
    sym = sum(1 for _, s, _ in rep if s)
    one = sum(1 for _, _, r in rep if r == 1)
    out.append(CheckReport("rank-one", _status(sym == one == 300), {"matrices": len(rep), "symmetric": sym, "rank1": one}))
    return out


def check_clone_locus(args):
    from .gadgets import STARS, clone_locus

    out = []
    for s in STARS:
        loc = clone_locus(s)
        out.append(CheckReport(f"clone-locus-{s}", "PASS", {"dim": loc.dim, "pattern": "+1/-1/-1"}))
    return out


def check_structural_zeros(args):
    from .gadgets import structural_zero_report

    r = structural_zero_report()
    return [CheckReport("structural-zeros", _status(r.ok), {"matrices": r.matrices, "identities": len(r.checks)})]


def check_witness(args):
    from .counterexample import residual_rank3_certificate, verify_witness_membership, witness_sum

    corr = verify_witness_membership()
    n = sum(len(corr.positions(a)) for a in (1, 2, 3))
    out = [CheckReport("witness-membership", "PASS", {"unknowns": 3 * 5 * corr.dim, "nonzero-slices": n})]
    cert = residual_rank3_certificate(witness_sum())
    out.append(CheckReport("witness-rank", _status(cert == 3), {"certificate": cert}))
    return out


@lru_cache(maxsize=None)
def _built():
    from .counterexample import build_903

    return build_903()


def check_decomposition(args):
    from .counterexample import verify_903

    if args.input:
        from .fileio import read_decomposition

        try:
            D = read_decomposition(args.input)
        except OSError as e:
            raise _IOFailure(str(e)) from None
    else:
        D = _built()
    r = verify_903(D, mode=args.mode, seed=args.seed, trials=args.trials)
    f = {"terms": len(D), "mode": args.mode}
    if args.mode == "freivalds":
        f.update(seed=args.seed, trials=args.trials)
    if not r.ok:
        f["detail"] = r.detail
    return [CheckReport("sum-equals-S", _status(r.ok), f)]


def check_lower_bound(args):
    from .counterexample import lower_bound_chain

    lb = lower_bound_chain()
    built = len(_built())
    ok = lb.equality and lb.residual == 3 and lb.value == built == 903
    return [
        CheckReport(
            "lower-bound-chain",
            _status(ok),
            {"value": lb.value, "adjoined": lb.independent, "residual": lb.residual, "equality": lb.equality, "built": built},
        )
    ]


def check_f_structure(args):
    from .counterexample import check_F_structure

    r = check_F_structure(raise_on_failure=False)
    fields = {k: _status(ok) for k, (ok, _) in r.items.items()}
    return [CheckReport("f-structure", _status(r.ok), fields)]


def _rank4_reports(signs, samples, seed):
    from .counterexample import pencil_rank4_certificate, sample_pairs

    out = []
    pairs = sample_pairs(samples, seed)
    for a, b in signs:
        for x, y in pairs:
            name = "rank4"
            try:
                c = pencil_rank4_certificate(a, b, x, y)
            except SolverIncomplete as e:
                out.append(CheckReport(name, "INCOMPLETE", {"a": a, "b": b, "x": x, "y": y, "factor": e.factor}))
                continue
            pts = ";".join(":".join(str(v) for v in p) for p in c.locus)
            out.append(
                CheckReport(
                    name,
                    _status(c.ok),
                    {"a": a, "b": b, "x": x, "y": y, "independent": c.independent, "locus": pts, "span": c.span_dim},
                )
            )
    return out


SIGN_CASES = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def check_rank4(args):
    return _rank4_reports(SIGN_CASES, getattr(args, "samples", 5), args.seed)


def check_span_identity(args):
    from .counterexample import symmetric_span_identity_check

    trials = 100
    r = symmetric_span_identity_check(trials=trials, seed=args.seed, raise_on_failure=False)
    f = {"trials": r.trials, "seed": args.seed}
    if not r.ok:
        f["instance"] = r.failure
    return [CheckReport("span-identity", _status(r.ok), f)]


CHECKS = {
    "partition": check_partition,
    "basis": check_basis,
    "clone-locus": check_clone_locus,
    "structural-zeros": check_structural_zeros,
    "witness": check_witness,
    "decomposition": check_decomposition,
    "lower-bound": check_lower_bound,
    "f-structure": check_f_structure,
    "rank4": check_rank4,
    "span-identity": check_span_identity,
}


class _IOFailure(Exception):
    pass


# -- commands --------------------------------------------------------------


def _emit(reports, args, stream):
    for r in reports:
        print(r.line(timing=args.timing), file=stream, flush=True)


def cmd_verify(args, stream=sys.stdout):
    targets = TARGETS if args.target == "all" else (args.target,)
    ok = True
    for t in targets:
        try:
            reps = _guard(t, lambda: CHECKS[t](args))
        except _IOFailure as e:
            print(f"error: {e}", file=sys.stderr)
            return 3
        _emit(reps, args, stream)
        ok = ok and all(r.status == "PASS" for r in reps)
    return 0 if ok else 1


def cmd_build(args, stream=sys.stdout):
    from . import counterexample as X
    from . import fileio

    try:
        if args.what == "decomposition":
            n = fileio.write_decomposition(X.build_903(), args.out)
            f = {"terms": n}
        elif args.what == "tensor-s":
            n = fileio.write_tensor(X.tensor_S(), args.out)
            f = {"entries": n}
        else:
            n = fileio.write_corrections(X.verify_witness_membership(), args.out)
            f = {"rows": n}
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    f["out"] = args.out
    _emit([CheckReport(f"build-{args.what}", "PASS", f)], args, stream)
    return 0


def cmd_certify(args, stream=sys.stdout):
    if args.samples < 1:
        raise _Usage("--samples must be at least 1")
    signs = [(a, b) for a, b in SIGN_CASES if (args.a is None or a == args.a) and (args.b is None or b == args.b)]
    reps = _guard("rank4", lambda: _rank4_reports(signs, args.samples, args.seed))
    _emit(reps, args, stream)
    return 0 if all(r.status == "PASS" for r in reps) else 1


class _Usage(Exception):
    pass


def _sign(text):
    v = int(text)
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("must be 1 or -1")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="comon", description="Exact checks for the 800^3 rank counterexample.")
    p.add_argument("--timing", action="store_true", help="append elapsed_ms to every report line")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run checks")
    v.add_argument("target", choices=("all",) + TARGETS)
    v.add_argument("--mode", choices=("exact", "freivalds"), default="exact")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--samples", type=int, default=5)
    v.add_argument("--in", dest="input", default=None, help="decomposition file to verify")

    b = sub.add_parser("build", help="write an artifact file")
    b.add_argument("what", choices=("decomposition", "tensor-s", "corrections"))
    b.add_argument("-o", "--out", required=True)

    c = sub.add_parser("certify", help="run a certificate")
    c.add_argument("which", choices=("rank4",))
    c.add_argument("--a", type=_sign, default=None)
    c.add_argument("--b", type=_sign, default=None)
    c.add_argument("--samples", type=int, default=5)
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return p


def main(argv=None, stream=None):
    stream = stream or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args, stream)
        if args.command == "build":
            return cmd_build(args, stream)
        return cmd_certify(args, stream)
    except _Usage as e:
        parser.print_usage(sys.stderr)
        print(f"comon: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
