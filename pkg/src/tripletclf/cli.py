"""Command-line driver: ``tripletclf <command> [options]``.

Exit codes: 0 success, 2 usage, 3 data, 4 numerical (singular prior,
inconsistent counts, divergence). Failures print one line to stderr of the
form ``error[CODE]: message``.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .erm import TrainConfig, load_model, save_model, train
from .errors import DataError, DomainError, TripletError
from .eval_bench import (ExperimentConfig, bound_curve, bound_curve_csv, bound_grid,
                         classification_accuracy, experiment_run, format_table, results_csv,
                         subsample_to_prior)
from .prior_model import DEFAULT_GUARD, estimate_pi_T, prior_from_pi_T
from .rng import CounterStream
from .triplet_data import (GaussianSource, GaussianSpec, PoolSource, aggregate_pointwise,
                           examples_to_arrays, generate_triplets, load_labeled_csv, read_triplets,
                           write_labeled_csv, write_triplets)

log = logging.getLogger("tripletclf")

SEED_ENV = "TRIPLETCLF_SEED"


def parse_gaussian(text: str, prior: float) -> GaussianSpec:
    """``"mu_plus;mu_minus;sigma"`` with comma-separated means."""
    try:
        plus, minus, sigma = text.split(";")
        return GaussianSpec(tuple(float(v) for v in plus.split(",")),
                            tuple(float(v) for v in minus.split(",")), float(sigma), prior)
    except ValueError as exc:
        raise DomainError(f"bad --gaussian spec {text!r}: expected 'mu+;mu-;sigma' ({exc})") from None


def _write_config(out: Path, command: str, config: dict) -> None:
    path = out.with_name(out.name + ".config.json")
    path.write_text(json.dumps({"command": command, **config}, indent=2, sort_keys=True, default=_jsonable) + "\n",
                    encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    raise TypeError(type(obj).__name__)


def _prior_line(n1: int, n2: int) -> str:
    pi_T = estimate_pi_T(n1, n2)
    return f"n1={n1} n2={n2} pi_T_hat={pi_T!r} pi_plus_hat={prior_from_pi_T(pi_T)!r}"


def _load_pool(path, prior, seed):
    X, y = examples_to_arrays(load_labeled_csv(path))
    if prior is not None:
        X, y = subsample_to_prior(X, y, prior, CounterStream(seed).generator(7))
    return X, y


def cmd_gen(args) -> int:
    out = Path(args.out)
    test = None
    if args.gaussian:
        if args.prior is None:
            raise DomainError("--gaussian needs --prior")
        spec = parse_gaussian(args.gaussian, args.prior)
        source = GaussianSource(spec)
        if args.test_out:
            stream = CounterStream(args.seed).spawn(1)
            test = source.draw(stream, np.arange(args.test_size or 1000, dtype=np.uint64))
    else:
        X, y = _load_pool(args.csv, args.prior, args.seed)
        if args.test_out:
            n_test = args.test_size or min(1000, int(0.2 * len(y)))
            if not 0 < n_test < len(y):
                raise DataError(f"cannot hold out {n_test} of {len(y)} examples")
            test = (X[:n_test], y[:n_test])
            X, y = X[n_test:], y[n_test:]
        source = PoolSource(X, y, replace=not args.no_replace)
    data = generate_triplets(source, args.triplets, args.seed)
    write_triplets(data, out)
    if test is not None:
        write_labeled_csv(args.test_out, *test)
    _write_config(out, "gen", {k: v for k, v in vars(args).items() if k != "func"})
    print(_prior_line(data.n1, data.n2))
    return 0


def cmd_estimate_prior(args) -> int:
    data = read_triplets(args.triplets)
    print(_prior_line(data.n1, data.n2))
    return 0


def _train_config(args) -> TrainConfig:
    return TrainConfig(loss=args.loss, model=args.model, hidden_width=args.hidden_width,
                       learning_rate=args.lr, epochs=args.epochs, batch_size=args.batch_size,
                       seed=args.seed, pi_plus=args.prior, pi_test=args.pi_test, guard=args.guard,
                       weight_decay=args.weight_decay, floor_risk=args.floor_risk,
                       standardize=args.standardize)


def cmd_train(args) -> int:
    data = read_triplets(args.triplets)
    bags = aggregate_pointwise(data)
    config = _train_config(args)
    model, trace = train(bags, config)
    source = "flag" if args.prior is not None else "estimated"
    log.info("resolved pi_plus=%r (%s) pi_test=%r", trace.pi_plus, source, trace.pi_test)
    out = Path(args.out)
    save_model(model, out)
    resolved = config.to_dict()
    resolved.update(pi_plus=trace.pi_plus, pi_test=trace.pi_test, prior_source=source,
                    triplets=str(args.triplets), n1=data.n1, n2=data.n2)
    _write_config(out, "train", resolved)
    final = trace.risk[-1] if trace.risk else float("nan")
    print(f"pi_plus={trace.pi_plus!r} pi_test={trace.pi_test!r} epochs={config.epochs} final_risk={final!r}")
    return 0


def cmd_eval(args) -> int:
    model = load_model(args.model)
    X, y = examples_to_arrays(load_labeled_csv(args.test))
    acc = classification_accuracy(model, (X, y))
    print(f"accuracy={acc!r} n_test={len(y)}")
    if args.out:
        out = Path(args.out)
        out.write_text(json.dumps({"accuracy": acc, "n_test": len(y)}) + "\n", encoding="utf-8")
        _write_config(out, "eval", {"model": str(args.model), "test": str(args.test)})
    return 0


def cmd_bound_curve(args) -> int:
    grid = bound_grid(args.start, args.stop, args.step)
    rows = bound_curve(grid, args.pi_test, args.guard)
    text = bound_curve_csv(rows)
    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="utf-8")
        _write_config(out, "bound-curve", {k: v for k, v in vars(args).items() if k != "func"})
        print(f"rows={len(rows)}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_experiment(args) -> int:
    config_kw = dict(trials=args.trials, methods=tuple(args.methods), train=_train_config(args),
                     prior_source=args.prior_source, singular_policy=args.singular_policy,
                     test_size=args.test_size, seed=args.seed, prior=args.prior)
    if args.gaussian:
        source_kw = dict(gaussian=parse_gaussian(args.gaussian, args.prior))
        name = args.name or "gaussian"
    else:
        X, y = examples_to_arrays(load_labeled_csv(args.csv))
        source_kw = dict(pool=(X, y))
        name = args.name or Path(args.csv).stem
    results = []
    for n in args.triplets:
        config = ExperimentConfig(name=f"{name}/{n}", n_triplets=n, **source_kw, **config_kw)
        results.append(experiment_run(config))
    table = format_table(results)
    sys.stdout.write(table)
    if args.out:
        out = Path(args.out)
        out.write_text(results_csv(results), encoding="utf-8")
        out.with_suffix(".txt").write_text(table, encoding="utf-8")
        _write_config(out, "experiment", {"runs": [r.config.summary() for r in results],
                                          "csv": args.csv})
    return 0


def _add_train_flags(p, prior_help):
    p.add_argument("--loss", default="double-hinge", choices=["squared", "double-hinge", "logistic"])
    p.add_argument("--model", default="linear", choices=["linear", "mlp1"])
    p.add_argument("--hidden-width", type=int, default=100)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=0, help="0 = full batch")
    p.add_argument("--prior", type=float, default=None, help=prior_help)
    p.add_argument("--pi-test", type=float, default=None, help="test class prior (default: training prior)")
    p.add_argument("--guard", type=float, default=DEFAULT_GUARD)
    p.add_argument("--weight-decay", type=float, default=0.0)
    p.add_argument("--floor-risk", action="store_true", help="clip each class-wise partial risk at zero")
    p.add_argument("--standardize", action="store_true", help="standardize inputs using triplet points")


def build_parser() -> argparse.ArgumentParser:
    default_seed = int(os.environ.get(SEED_ENV, "0"))
    parser = argparse.ArgumentParser(prog="tripletclf",
                                     description="Binary classification from triplet comparisons.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a triplet file from labeled data")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--csv", help="labeled CSV pool (last column is the label)")
    src.add_argument("--gaussian", help="'mu+;mu-;sigma', e.g. '1,1;-1,-1;1.0'")
    p.add_argument("--prior", type=float, help="class prior (Gaussian) or pool subsampling target (CSV)")
    p.add_argument("--triplets", type=int, required=True)
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--no-replace", action="store_true", help="draw pool examples without replacement")
    p.add_argument("--test-out", help="also write a held-out labeled test CSV")
    p.add_argument("--test-size", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("estimate-prior", help="estimate the class prior from keep/flip counts")
    p.add_argument("--triplets", required=True)
    p.set_defaults(func=cmd_estimate_prior)

    p = sub.add_parser("train", help="train a classifier on a triplet file")
    p.add_argument("--triplets", required=True)
    _add_train_flags(p, "known class prior (default: estimate from the triplet counts)")
    p.add_argument("--seed", type=int, default=default_seed)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="accuracy of a saved model on a labeled CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bound-curve", help="bound coefficient over a grid of priors (CSV)")
    p.add_argument("--from", dest="start", type=float, default=0.51)
    p.add_argument("--to", dest="stop", type=float, default=0.99)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--pi-test", type=float, default=None)
    p.add_argument("--guard", type=float, default=DEFAULT_GUARD)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound_curve)

    p = sub.add_parser("experiment", help="multi-trial comparison table")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--csv")
    src.add_argument("--gaussian")
    p.add_argument("--name")
    p.add_argument("--triplets", type=int, nargs="+", default=[1000])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--methods", nargs="+", default=["squared", "double_hinge", "kmeans"])
    p.add_argument("--prior-source", default="estimate", choices=["estimate", "known"])
    p.add_argument("--singular-policy", default="error", choices=["error", "skip"])
    p.add_argument("--test-size", type=int)
    p.add_argument("--out", help="CSV report path; an aligned table is written next to it")
    _add_train_flags(p, "class prior of the generated data")
    p.set_defaults(prior=0.7)
    p.add_argument("--seed", type=int, default=default_seed)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except TripletError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_status
    except OSError as exc:
        print(f"error[IO]: {exc}", file=sys.stderr)
        return DataError.exit_status


if __name__ == "__main__":
    sys.exit(main())
