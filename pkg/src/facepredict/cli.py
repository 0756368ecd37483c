"""Command line entry point: ``facepredict <command> ...``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .artifact import load_artifact, save_artifact
from .config import PipelineConfig, load_config
from .dataset import read_manifest, scan_corpus, load_pgm, write_manifest, write_pgm
from .errors import FpmError, LengthMismatch, NonFiniteLoss
from .evalmatch import evaluate_corpus
from .fixture import make_fixture
from .pipeline import fit_pipeline, predict_images, prepare_corpus

log = logging.getLogger("facepredict")


def _corpus(source: str):
    p = Path(source)
    return scan_corpus(p) if p.is_dir() else read_manifest(p)


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config)
    return cfg.updated(seed=args.seed, epochs=getattr(args, "epochs", None),
                       refine_on_target=True if getattr(args, "refine_on_target", False) else None)


def cmd_ingest(args) -> int:
    corpus = scan_corpus(args.root)
    out = Path(args.out or Path(args.root) / "corpus.json")
    write_manifest(corpus, out)
    print(f"{len(corpus.sequences)} subjects, {corpus.n_images} images -> {out}")
    for name in corpus.skipped:
        print(f"skipped: {name}")
    return 0


def cmd_train(args) -> int:
    cfg = _config(args)
    corpus = _corpus(args.manifest)
    fp = fit_pipeline(prepare_corpus(corpus, cfg), cfg)
    save_artifact(fp, args.out)
    for key, rep in sorted(fp.reports.items()):
        print(f"model {key}: {fp.pair_counts.get(key, sum(fp.pair_counts.values()))} pairs, "
              f"loss {rep.initial_loss:.6g} -> {rep.final_loss:.6g} ({rep.epochs_run} epochs)")
    print(f"artifact -> {args.out}")
    return 0


def cmd_predict(args) -> int:
    fp = load_artifact(args.artifact)
    if len(args.images) != fp.config.window:
        raise LengthMismatch(f"model window is {fp.config.window} images, got {len(args.images)}")
    _, raw = predict_images(fp, [load_pgm(p) for p in args.images], args.subject)
    write_pgm(args.out, raw)
    print(f"predicted {raw.width}x{raw.height} face -> {args.out}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    corpus = _corpus(args.manifest)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    report = evaluate_corpus(corpus, cfg, out_dir=out.parent)
    report.write(out)
    sys.stdout.write(report.to_text())
    return 0


def cmd_make_fixture(args) -> int:
    paths = make_fixture(args.out, args.subjects, args.length, 42 if args.seed is None else args.seed)
    print(f"wrote {len(paths)} images to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="facepredict", description="Face aging prediction (STFT + PCA + MLP).")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, out_help, config=True):
        if config:
            p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", required=out_help is not None, help=out_help)

    p = sub.add_parser("ingest", help="scan a corpus directory and write a manifest")
    p.add_argument("root")
    common(p, None, config=False)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="fit basis and predictor, write an FPM1 artifact")
    p.add_argument("manifest", help="manifest file or corpus directory")
    p.add_argument("--epochs", type=int)
    common(p, "artifact path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict the next face from k images")
    p.add_argument("artifact")
    p.add_argument("images", nargs="+")
    p.add_argument("--subject", help="subject id for per-subject artifacts")
    common(p, "output PGM", config=False)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="leave-last-out evaluation over a corpus")
    p.add_argument("manifest", help="manifest file or corpus directory")
    p.add_argument("--epochs", type=int)
    p.add_argument("--refine-on-target", action="store_true",
                   help="also train on the held-out targets (leaks the answer)")
    common(p, "report path (JSON; text goes to <out>.txt)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("make-fixture", help="write a synthetic aging corpus")
    p.add_argument("--subjects", type=int, default=50)
    p.add_argument("--length", type=int, default=6)
    common(p, "output directory", config=False)
    p.set_defaults(func=cmd_make_fixture)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NonFiniteLoss as exc:
        print(f"error: training diverged: {exc}", file=sys.stderr)
        return 3
    except LengthMismatch as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (FpmError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
