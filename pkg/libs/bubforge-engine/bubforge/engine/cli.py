"""``bubforge`` command line: corpora, training, database generation, synthesis and evaluation."""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence

import torch

from bubforge.engine.assembler import (
    CcaBubbleSource,
    DatabaseBubbleSource,
    load_flow_spec,
    synthesize_scenes,
)
from bubforge.engine.assembler.sources import AbstractBubbleSource
from bubforge.engine.bubdb import BubbleDb, build, correlation_matrix, feature_statistics, load_db, save_db
from bubforge.engine.bubdb.statistics import statistics_to_dict
from bubforge.engine.ccarender.corpus import load_corpus_settings, make_corpus
from bubforge.engine.config import config_hash, read_json
from bubforge.engine.errors import BubforgeError, ValidationError
from bubforge.engine.features.descriptors import extract_features
from bubforge.engine.features.feature_vector import FEATURE_NAMES
from bubforge.engine.gan import (
    evaluate_conditioning,
    evaluate_point,
    grad_check,
    load_gan_config,
    load_model,
    save_model,
    train,
)
from bubforge.engine.imgproc.codecs import read_pbm, read_pgm
from bubforge.engine.patchpipe import build_training_set, load_patch_settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2
THREADS_ENV = "BUBFORGE_THREADS"
GRADCHECK_TOLERANCE = 1e-4


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with status 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _config(path: Optional[str]) -> Dict[str, Any]:
    return read_json(path) if path else {}


def _emit(args: argparse.Namespace, payload: Dict[str, Any], text: str) -> None:
    print(json.dumps(payload, sort_keys=True) if args.json else text)


def _seed(args: argparse.Namespace) -> int:
    return 0 if args.seed is None else args.seed


def cmd_corpus(args: argparse.Namespace) -> int:
    settings = load_corpus_settings(_config(args.config))
    patch_settings = load_patch_settings({"record_side": args.side})
    records = make_corpus(args.n, _seed(args), settings, patch_settings, progress=args.verbose > 0)
    db = BubbleDb.from_records(records, is_corpus=True, seed=_seed(args), config_hash=config_hash(settings))
    save_db(db, args.out)
    _emit(args, {"records": len(db), "seed": db.seed, "out": str(args.out)}, f"wrote {len(db)} records to {args.out}")
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    settings = load_patch_settings({**_config(args.config), "record_side": args.side})
    paths = sorted(Path(args.images).glob("*.pgm"))
    if not paths:
        raise ValidationError(f"no .pgm images in {args.images}")
    records = build_training_set(
        (read_pgm(p) for p in paths), settings, threads=args.threads, progress=args.verbose > 0
    )
    if not records:
        raise ValidationError(f"no single-bubble patches found in {len(paths)} images")
    db = BubbleDb.from_records(records, is_corpus=True, seed=_seed(args), config_hash=config_hash(settings))
    save_db(db, args.out)
    _emit(
        args,
        {"images": len(paths), "records": len(db), "seed": db.seed, "out": str(args.out)},
        f"wrote {len(db)} records from {len(paths)} images to {args.out}",
    )
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    overrides = {**_config(args.config), "epochs": args.epochs, "batch_size": args.batch_size, "seed": args.seed}
    cfg = load_gan_config(overrides)
    corpus = load_db(args.corpus)
    if not corpus.is_corpus:
        logger.warning("%s is not flagged as a training corpus", args.corpus)
    model = train(corpus.records, cfg, progress=args.verbose > 0)
    save_model(model, args.out)
    last = model.history[-1].to_dict() if model.history else {}
    _emit(
        args,
        {"epochs": len(model.history), "seed": cfg.seed, "last_epoch": last, "out": str(args.out)},
        f"trained {len(model.history)} epochs, wrote {args.out}",
    )
    return EXIT_OK


def cmd_gendb(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    db = build(model, args.n, seed=_seed(args), batch=args.batch, progress=args.verbose > 0)
    db.config_hash = config_hash(model.config)
    save_db(db, args.out)
    _emit(args, {"records": len(db), "seed": db.seed, "out": str(args.out)}, f"wrote {len(db)} bubbles to {args.out}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    spec = load_flow_spec(args.flow, {"seed": args.seed, "count": args.bubbles})
    source: AbstractBubbleSource
    if args.renderer == "cca":
        source = CcaBubbleSource(load_corpus_settings(_config(args.config)))
    elif args.db is None:
        raise ValidationError("synth needs --db unless --renderer cca is given")
    else:
        source = DatabaseBubbleSource(load_db(args.db))
    metas = synthesize_scenes(spec, source, args.count, args.out, threads=args.threads)
    summary = {
        "scenes": len(metas),
        "seed": spec.seed,
        "counts": [m["count"] for m in metas],
        "out": str(args.out),
    }
    _emit(args, summary, f"wrote {len(metas)} scenes to {args.out}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    if args.value is not None:
        point = evaluate_point(model, args.sweep, args.value, samples=args.samples, seed=_seed(args))
        payload = {
            "component": point.component,
            "requested": point.requested,
            "measured": point.measured,
            "relative_error": point.relative_error,
            "failures": point.failures,
            "seed": _seed(args),
        }
        _emit(args, payload, f"{point.component}: requested {point.requested:.4f}, "
              f"measured {point.measured:.4f}, relative error {point.relative_error:.2%}")
        return EXIT_OK
    report = evaluate_conditioning(
        model, args.sweep, samples=args.samples, seed=_seed(args), points=args.points
    )
    lines = [f"{r:.4f} -> {m:.4f}" for r, m in zip(report.requested, report.measured)]
    _emit(
        args,
        {**report.to_dict(), "seed": _seed(args)},
        "\n".join(lines + [f"{report.component}: normalized RMSE {report.rmse:.4f}"]),
    )
    return EXIT_OK


def cmd_features(args: argparse.Namespace) -> int:
    k = extract_features(read_pgm(args.image), read_pbm(args.mask))
    text = " ".join(f"{name}={value:.6f}" for name, value in zip(FEATURE_NAMES, k.to_list()))
    _emit(args, k.to_dict(), text)
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    report = grad_check(seed=_seed(args))
    _emit(args, {**report.to_dict(), "seed": _seed(args)}, f"max relative error {report.max_rel_error:.3e}")
    if report.max_rel_error >= GRADCHECK_TOLERANCE:
        logger.error("gradient check failed: %.3e >= %.0e", report.max_rel_error, GRADCHECK_TOLERANCE)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    db = load_db(args.db)
    payload: Dict[str, Any] = {
        "records": len(db),
        "side": db.side,
        "corpus": db.is_corpus,
        "seed": db.seed,
        "config_hash": db.config_hash,
        "statistics": statistics_to_dict(feature_statistics(db)),
    }
    text = f"{len(db)} records, side {db.side}, corpus={db.is_corpus}, seed {db.seed}"
    if len(db) >= 3:
        corr = correlation_matrix(db)
        payload["correlation"] = corr.to_dict()
        text += "\n" + "\n".join(
            f"{name:>4} " + " ".join(f"{v:+.3f}" for v in row) for name, row in zip(FEATURE_NAMES, corr.matrix)
        )
    _emit(args, payload, text)
    return EXIT_OK


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    common.add_argument("--json", action="store_true", help="print machine-readable JSON")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    common.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")

    parser = ArgumentParser(prog="bubforge", description="Synthetic bubbly-flow image generation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = sub.add_parser("corpus", parents=[common], help="render a CCA training corpus")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--side", type=int, default=None, help="record side in pixels")
    p.add_argument("--config", help="ccarender settings JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_corpus)

    p = sub.add_parser("extract", parents=[common], help="build a training corpus from camera images")
    p.add_argument("--images", required=True, help="directory of .pgm images")
    p.add_argument("--side", type=int, default=None, help="record side in pixels")
    p.add_argument("--config", help="patchpipe settings JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_extract)

    p = sub.add_parser("train", parents=[common], help="train the conditional GAN")
    p.add_argument("--corpus", required=True)
    p.add_argument("--config", help="gan settings JSON")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("gendb", parents=[common], help="generate a bubble database")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--batch", type=int, default=256)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_gendb)

    p = sub.add_parser("synth", parents=[common], help="synthesize labeled flow images")
    p.add_argument("--flow", help="flow spec JSON (packaged defaults when omitted)")
    p.add_argument("--db", help="bubble database")
    p.add_argument("--renderer", choices=("gan", "cca"), default="gan")
    p.add_argument("--config", help="ccarender settings JSON for --renderer cca")
    p.add_argument("--count", type=int, default=1, help="number of scenes")
    p.add_argument("--bubbles", type=int, default=None, help="bubbles per scene, overrides the flow spec")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("eval", parents=[common], help="conditioning fidelity report")
    p.add_argument("--model", required=True)
    p.add_argument("--sweep", choices=FEATURE_NAMES, required=True)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--value", type=float, default=None, help="single requested value instead of a sweep")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("features", parents=[common], help="feature vector of a bubble image and mask")
    p.add_argument("--image", required=True, help=".pgm image")
    p.add_argument("--mask", required=True, help=".pbm mask")
    p.set_defaults(handler=cmd_features)

    p = sub.add_parser("gradcheck", parents=[common], help="finite-difference gradient check")
    p.set_defaults(handler=cmd_gradcheck)

    p = sub.add_parser("stats", parents=[common], help="database feature statistics")
    p.add_argument("--db", required=True)
    p.set_defaults(handler=cmd_stats)
    return parser


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "1")
        try:
            threads = int(raw)
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if threads < 1:
        raise ValidationError(f"thread count must be >= 1, got {threads}")
    return threads


def _configure_logging(verbose: int) -> None:
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def dispatch(argv: Sequence[str]) -> int:
    """
    Runs one subcommand.

    Returns:
        int: 0 on success, 1 on invalid input or usage, 2 on runtime or I/O failure.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as e:
        return int(e.code or 0)
    _configure_logging(args.verbose)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        args.threads = resolve_threads(args.threads)
        torch.set_num_threads(args.threads)
        return handler(args)
    except ValidationError as e:
        print(f"bubforge {args.command}: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (BubforgeError, OSError) as e:
        print(f"bubforge {args.command}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def main(argv: Optional[List[str]] = None) -> int:
    return dispatch(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
