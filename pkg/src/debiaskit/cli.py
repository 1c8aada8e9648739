"""Command-line interface.

Subcommands:

* debias      -- one-shot transform, writes a debiased embedding file
* ect / eqt   -- residual-bias measures for one attribute
* bench       -- analogy / similarity utility benchmarks
* experiment  -- the full randomized-trial protocol from a JSON config

Exit codes: 0 success, 1 usage error, 2 data error (malformed files,
out-of-vocabulary tokens), 3 numeric error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from . import __version__
from .bias_metrics import SynonymLexicon, ect, eqt, filter_professions, load_professions
from .debias import DebiasSpec, load_token_set, run_pipeline
from .embedding_store import load_embeddings, save_embeddings
from .errors import DataError, NumericError, UsageError
from .experiment import emit_report, load_config, run_experiment
from .quality_bench import (
    ANALOGY_METHODS,
    analogy_accuracy,
    load_analogy_dataset,
    load_similarity_dataset,
    similarity_score,
)
from .resources import BUILTIN_PAIR_SETS, builtin_lexicon, builtin_pair_set, builtin_professions
from .subspace import load_pair_set, restrict_to_vocabulary

log = logging.getLogger("debiaskit")

SEED_HELP = (
    "base seed; trial t runs with seed+t, and dimension i of a pipeline "
    "samples its pairs with seed (seed+t)*10007+i"
)


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; this tool reserves 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _resolve_pairs(spec: str, name: str | None = None):
    """A --pairs value is a built-in set name or a path to a pair file."""
    if spec in BUILTIN_PAIR_SETS:
        return builtin_pair_set(spec)
    return load_pair_set(spec, name or spec)


def _load_professions(path):
    return load_professions(path) if path else builtin_professions()


def _load_lexicon(path):
    return SynonymLexicon.load(path) if path else builtin_lexicon()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="debiaskit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"debiaskit {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("debias", help="debias an embedding and write the result")
    p.add_argument("--embeddings", required=True, help="word2vec text file")
    p.add_argument(
        "--pairs", required=True, action="append",
        help=f"bias dimension: built-in name ({', '.join(BUILTIN_PAIR_SETS)}) or a pair-file "
             "path; repeat for a multi-dimension pipeline, applied in order",
    )
    p.add_argument("--method", required=True, choices=["sub", "lp", "pp", "hd"])
    p.add_argument("--sigma", type=float, default=1.0, help="pp smoothing scale (default 1.0)")
    p.add_argument("--sample-size", type=int, default=8,
                   help="pairs sampled per dimension (default 8)")
    p.add_argument("--seed", type=int, default=0, help=SEED_HELP)
    p.add_argument("--neutral-set", default=None,
                   help="hd only: file of neutral tokens, one per line "
                        "(default: every token outside the dimension's pair list)")
    p.add_argument("--out", required=True, help="output embedding path")

    p = sub.add_parser("ect", help="embedding coherence test for one attribute")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--pairs", required=True, help="attribute pair set (name or path)")
    p.add_argument("--professions", default=None, help="professions file (default: shipped list)")

    p = sub.add_parser("eqt", help="embedding quality test for one attribute")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--pairs", required=True, help="attribute pair set (name or path)")
    p.add_argument("--professions", default=None)
    p.add_argument("--lexicon", default=None, help="synonym lexicon TSV (default: shipped)")

    p = sub.add_parser("bench", help="analogy and similarity benchmarks")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--google", default=None, help="Google-format analogy file")
    p.add_argument("--msr", default=None, help="MSR-format analogy file")
    p.add_argument("--ws353", default=None, help="WS353-format similarity file")
    p.add_argument("--rg65", default=None, help="RG-65-format similarity file")
    p.add_argument("--analogy-method", choices=list(ANALOGY_METHODS), default="3cosadd")

    p = sub.add_parser("experiment", help="run the full trial protocol from a JSON config")
    p.add_argument("--config", required=True, help="JSON config; paths resolve relative to it")
    p.add_argument("--trials", type=int, default=None, help="override the config's trial count")
    p.add_argument("--seed", type=int, default=None, help="override the config's base seed; " + SEED_HELP)
    p.add_argument("--out", default=None, help="report path (overrides config output)")
    p.add_argument("--format", choices=["json", "tsv"], default="json")
    p.add_argument("--workers", type=int, default=1, help="parallel trial workers")
    return parser


def _cmd_debias(args) -> int:
    emb = load_embeddings(args.embeddings)
    dims = tuple(restrict_to_vocabulary(_resolve_pairs(s), emb) for s in args.pairs)
    neutral = load_token_set(args.neutral_set) if args.neutral_set else None
    spec = DebiasSpec(
        method=args.method, dimensions=dims, pp_sigma=args.sigma, hd_neutral_tokens=neutral
    )
    if args.seed < 0:
        raise UsageError("--seed must be nonnegative")
    debiased = run_pipeline(emb, spec, args.seed, args.sample_size)
    save_embeddings(debiased, args.out)
    log.info("wrote %d x %d embedding to %s", len(debiased), debiased.dim, args.out)
    return 0


def _cmd_ect(args) -> int:
    emb = load_embeddings(args.embeddings)
    pairs = restrict_to_vocabulary(_resolve_pairs(args.pairs), emb)
    professions = filter_professions(_load_professions(args.professions), emb)
    print(f"ect\t{pairs.name}\t{ect(emb, pairs, professions)!r}")
    return 0


def _cmd_eqt(args) -> int:
    emb = load_embeddings(args.embeddings)
    pairs = restrict_to_vocabulary(_resolve_pairs(args.pairs), emb)
    professions = filter_professions(_load_professions(args.professions), emb)
    lexicon = _load_lexicon(args.lexicon)
    print(f"eqt\t{pairs.name}\t{eqt(emb, pairs, professions, lexicon)!r}")
    return 0


def _cmd_bench(args) -> int:
    emb = load_embeddings(args.embeddings)
    ran = False
    for name, path in (("google", args.google), ("msr", args.msr)):
        if path:
            result = analogy_accuracy(emb, load_analogy_dataset(path, name), args.analogy_method)
            print(
                f"analogy_{name}\taccuracy={result.accuracy:.4f}"
                f"\tattempted={result.attempted}\tskipped={result.skipped}"
            )
            ran = True
    for name, path in (("ws353", args.ws353), ("rg65", args.rg65)):
        if path:
            result = similarity_score(emb, load_similarity_dataset(path, name))
            print(
                f"similarity_{name}\trho={result.rho:.4f}"
                f"\tused={result.used}\tskipped={result.skipped}"
            )
            ran = True
    if not ran:
        raise UsageError("bench needs at least one of --google/--msr/--ws353/--rg65")
    return 0


def _cmd_experiment(args) -> int:
    config = load_config(args.config)
    if args.trials is not None:
        config = dataclasses.replace(config, trials=args.trials)
    if args.seed is not None:
        config = dataclasses.replace(config, base_seed=args.seed)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    report = run_experiment(config, workers=args.workers)
    out = args.out or config.output
    if out:
        emit_report(report, args.format, out)
        log.info("wrote %s report to %s", args.format, out)
    else:
        stream = report.to_json_bytes().decode() if args.format == "json" else report.to_tsv()
        sys.stdout.write(stream)
    return 0


_COMMANDS = {
    "debias": _cmd_debias,
    "ect": _cmd_ect,
    "eqt": _cmd_eqt,
    "bench": _cmd_bench,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"debiaskit: usage error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"debiaskit: numeric error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"debiaskit: data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"debiaskit: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"debiaskit: data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
