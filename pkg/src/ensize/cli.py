"""Command-line entry point: ``ensize <command> [flags]``.

Commands
--------
prob        reach probability for (n, m, profile)
min-size    smallest ensemble reaching a target probability (JSON)
estimate-p  dependence profile from a recorded-votes CSV or a planted stream (JSON)
simulate    Monte Carlo reach probability next to the exact value (JSON)
sweep       accuracy per ensemble size; CSV columns
            ensemble_size,accuracy,correct,instances_seen,seed plus a JSON summary
gen         dump an RBF stream (features..., label) or planted votes
            (instance_id, classifier_id, score_0..score_{m-1}) as CSV

Exit codes: 0 success, 1 I/O or data error, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import DEFAULT_TOL, DatasetIOError, EnsizeError, ParseError
from .estimator import accumulate, finalize_profile, read_votes_csv, write_votes_csv
from .experiment import DEFAULT_SIZES, SweepConfig, run_sweep
from .independence import min_ensemble_size, reach_probability, simulate_chain
from .streams import PlantedVoteConfig, RbfConfig, rbf_stream, synthetic_vote_stream, write_stream_csv


class UsageError(EnsizeError):
    pass


def _num(x):
    """12 significant digits; integral floats keep a trailing ``.0``."""
    s = f"{x:.12g}"
    if isinstance(x, float) and s.lstrip("-").isdigit():
        s += ".0"
    return s


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _dump(obj) -> str:
    return json.dumps(_round(obj), sort_keys=True)


def _profile(text, m):
    try:
        p = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--p must be comma-separated numbers, got {text!r}") from None
    if len(p) != m - 1:
        raise UsageError(f"--p needs m-1 = {m - 1} values, got {len(p)}")
    return p


def _sizes(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


def _emit(args, text):
    print(text)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def cmd_prob(args):
    p = _profile(args.p, args.m)
    _emit(args, _num(reach_probability(args.n, args.m, p)))


def cmd_min_size(args):
    p = _profile(args.p, args.m)
    rec = min_ensemble_size(args.m, p, args.target)
    _emit(args, _dump(rec.to_dict()))


def cmd_estimate_p(args):
    if args.votes:
        state = accumulate(read_votes_csv(args.votes), tol=args.tol)
    else:
        if args.planted is None or args.m is None:
            raise UsageError("estimate-p needs --votes FILE or --planted P --m M")
        cfg = PlantedVoteConfig(_profile(args.planted, args.m), args.n, args.m, args.instances, args.seed)
        state = accumulate(synthetic_vote_stream(cfg), m=args.m, tol=args.tol)
    out = {
        "p": finalize_profile(state).tolist(),
        "dependent_counts": state.dependent_counts.tolist(),
        "total_counts": state.total_counts.tolist(),
        "instances": state.instances_processed,
    }
    _emit(args, _dump(out))


def cmd_simulate(args):
    p = _profile(args.p, args.m)
    emp = simulate_chain(args.n, args.m, p, args.trials, args.seed, partitions=args.partitions, jobs=args.jobs)
    exact = reach_probability(args.n, args.m, p)
    out = {"empirical": emp, "exact": exact, "gap": abs(emp - exact), "trials": args.trials, "seed": args.seed}
    _emit(args, _dump(out))


def _rbf_config(args):
    return RbfConfig(
        m=args.rbf_m,
        n_features=args.features,
        centroids_per_class=args.centroids,
        noise_std=args.noise,
        instances=args.instances,
        seed=args.seed,
    )


def cmd_sweep(args):
    dataset = args.csv if args.csv else _rbf_config(args)
    cfg = SweepConfig(
        sizes=args.sizes,
        dataset=dataset,
        label_column=args.label_column,
        target_probability=args.target,
        seed=args.seed,
        window=args.window,
        ridge=args.ridge,
        bagging_rate=args.bagging_rate,
        feature_fraction=args.feature_fraction,
        tol=args.tol,
        output=args.output,
    )
    outcome = run_sweep(cfg, jobs=args.jobs)
    if not args.output:
        sys.stdout.write(outcome.to_csv())
    summary = _dump(outcome.summary())
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(summary + "\n")
    if args.output:
        print(summary)


def cmd_gen(args):
    if args.kind == "rbf":
        stream = rbf_stream(_rbf_config(args))
        write_stream_csv(args.output or sys.stdout, stream)
    else:
        if args.planted is None:
            raise UsageError("gen votes needs --planted P")
        m = len(args.planted.split(",")) + 1
        cfg = PlantedVoteConfig(_profile(args.planted, m), args.n, m, args.instances, args.seed)
        write_votes_csv(args.output or sys.stdout, synthetic_vote_stream(cfg))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="absolute rank tolerance")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--output", default=None, help="write the main result to this file")

    parser = argparse.ArgumentParser(
        prog="ensize", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob", parents=[common], help="reach probability")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", required=True, help="comma-separated p_1..p_{m-1}")
    p.set_defaults(func=cmd_prob)

    p = sub.add_parser("min-size", parents=[common], help="minimal ensemble size")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--target", type=float, default=0.999)
    p.set_defaults(func=cmd_min_size)

    p = sub.add_parser("estimate-p", parents=[common], help="estimate the dependence profile")
    p.add_argument("--votes", help="recorded votes CSV")
    p.add_argument("--planted", help="planted profile for a synthetic vote stream")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int, default=8, help="votes per instance")
    p.add_argument("--instances", type=int, default=20_000)
    p.set_defaults(func=cmd_estimate_p)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo check")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--trials", type=int, default=200_000)
    p.add_argument("--partitions", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    def stream_flags(q):
        q.add_argument("--rbf-m", type=int, default=4, help="class count of the RBF stream")
        q.add_argument("--features", type=int, default=20)
        q.add_argument("--centroids", type=int, default=5, help="centroids per class")
        q.add_argument("--noise", type=float, default=0.05)
        q.add_argument("--instances", type=int, default=50_000)

    p = sub.add_parser("sweep", parents=[common], help="accuracy vs ensemble size")
    p.add_argument("--sizes", type=_sizes, default=DEFAULT_SIZES)
    p.add_argument("--csv", help="dataset CSV instead of the RBF generator")
    p.add_argument("--label-column", default="-1")
    p.add_argument("--target", type=float, default=0.999)
    p.add_argument("--window", type=int, default=500)
    p.add_argument("--ridge", type=float, default=1e-6)
    p.add_argument("--bagging-rate", type=float, default=1.0)
    p.add_argument("--feature-fraction", type=float, default=0.75)
    p.add_argument("--summary", help="also write the JSON summary here")
    stream_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", parents=[common], help="dump a synthetic stream")
    p.add_argument("kind", choices=["rbf", "votes"])
    p.add_argument("--planted", help="profile for kind=votes")
    p.add_argument("--n", type=int, default=8, help="votes per instance (kind=votes)")
    stream_flags(p)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (DatasetIOError, ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EnsizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
