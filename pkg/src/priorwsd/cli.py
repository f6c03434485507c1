"""Command-line entry point.

Exit codes: 0 success, 1 validation error (bad config, flags or input files),
2 runtime failure.
"""

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline, synth
from .composers import MODELS, load_params
from .datasets import write_dataset
from .errors import PriorWSDError, StageError, ValidationError
from .senses import load_inventory
from .vectorspace import load_vectors

log = logging.getLogger("priorwsd")

MODE_CHOICES = ("none", "all", "verbs")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--config", metavar="PATH", help="key=value configuration file")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--disambig", choices=MODE_CHOICES, action="append",
                   help="disambiguation mode; repeat for several (default: all three)")
    p.add_argument("--model", choices=MODELS, action="append",
                   help="composition model; repeat for several (default: all four)")
    p.add_argument("--dataset", metavar="PATH", action="append", help="phrase-pair dataset (TSV)")
    p.add_argument("--corpus", metavar="PATH", help="corpus, one tokenized sentence per line")
    p.add_argument("--out", metavar="DIR", help="output directory for artifacts")
    p.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                   help="override any config key")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = _Parser(prog="priorwsd",
                     description="Prior word-sense disambiguation for compositional models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in [
        ("build-vectors", "build PPMI word vectors from the corpus"),
        ("induce-senses", "cluster context vectors into sense centroids"),
        ("train-rae", "train the RAE and write RAE and RecNN parameters"),
        ("evaluate", "score every (model, mode) pair on the datasets"),
        ("run-all", "run every stage in order"),
    ]:
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "run-all":
            p.add_argument("--resume", action="store_true",
                           help="reuse artifacts already present in the output directory")
    p = sub.add_parser("synth-bench", help="write the synthetic pseudo-homonym benchmark")
    _common(p)
    p.add_argument("--fused", type=int, default=10, help="number of fused verb pairs")
    p.add_argument("--sentences", type=int, default=200)
    p.add_argument("--pairs", type=int, default=40, help="evaluation pairs")
    return parser


def _overrides(args):
    out = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"--set expects KEY=VALUE, got {item!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    if args.seed is not None:
        out["seed"] = str(args.seed)
    if args.disambig:
        out["modes"] = ",".join(args.disambig)
    if args.model:
        out["models"] = ",".join(args.model)
    if args.dataset:
        out["datasets"] = ",".join(str(Path(d).resolve()) for d in args.dataset)
    if args.corpus:
        out["corpus"] = str(Path(args.corpus).resolve())
    if args.out:
        out["out"] = args.out
    return out


def _config(args):
    overrides = _overrides(args)
    if args.config:
        return pipeline.load_config(args.config, overrides)
    return pipeline.make_config(overrides)


def _need(path, what):
    if not path.exists():
        raise ValidationError(f"{what} not found at {path}; run the earlier stage first")
    return path


def cmd_synth_bench(args):
    seed = args.seed if args.seed is not None else 0
    out = Path(args.out or "bench")
    out.mkdir(parents=True, exist_ok=True)
    bench = synth.make_benchmark(pipeline.stage_seed(seed, "synth"), args.fused,
                                 args.sentences, args.pairs)
    synth.write_corpus(bench.corpus, out / "corpus.txt")
    synth.write_gold(bench.fused, out / "gold.tsv")
    write_dataset(bench.pairs, out / "dataset.tsv",
                  header=[f"synthetic pseudo-homonym benchmark, seed {seed}",
                          "scores: 5-7 when the landmark verb matches the sense, 1-3 otherwise"])
    (out / "bench.cfg").write_text(
        f"seed = {seed}\ncorpus = corpus.txt\ndatasets = dataset.tsv\nout = run\n"
        f"window = 5\ndimension = 100\nrae_epochs = 20\n",
        encoding="utf-8",
    )
    print(f"wrote {len(bench.corpus)} sentences and {len(bench.pairs)} pairs to {out}")


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors exit 1, --help exits 0
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth-bench":
            cmd_synth_bench(args)
            return 0
        config = _config(args)
        Path(config.out).mkdir(parents=True, exist_ok=True)
        if args.command == "run-all":
            reports = pipeline.run_pipeline(config, resume=args.resume)
        elif args.command == "build-vectors":
            pipeline.stage_vectors(config)
            return 0
        elif args.command == "induce-senses":
            space = load_vectors(_need(config.path(pipeline.VECTORS_FILE), "vectors"),
                                 config.lowercase)
            pipeline.stage_senses(config, space)
            return 0
        elif args.command == "train-rae":
            space = load_vectors(_need(config.path(pipeline.VECTORS_FILE), "vectors"),
                                 config.lowercase)
            pipeline.stage_models(config, space)
            return 0
        else:
            space = load_vectors(_need(config.path(pipeline.VECTORS_FILE), "vectors"),
                                 config.lowercase)
            inv = load_inventory(_need(config.path(pipeline.SENSES_FILE), "sense inventory"))
            rae = load_params(_need(config.path(pipeline.RAE_FILE), "RAE parameters"))
            recnn = load_params(_need(config.path(pipeline.RECNN_FILE), "RecNN parameters"))
            reports = pipeline.stage_evaluate(config, space, inv, rae, recnn)
        for r in reports:
            print(r.to_table())
        return 0
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1 if isinstance(exc.cause, ValidationError) else 2
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PriorWSDError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
