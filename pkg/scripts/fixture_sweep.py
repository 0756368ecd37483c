"""Sweep a few pipeline settings over the synthetic aging corpus and print match percentages.

    python scripts/fixture_sweep.py --subjects 50 --length 6 --out /tmp/sweep
"""
import argparse
import itertools
import time
from pathlib import Path

from facepredict.config import PipelineConfig
from facepredict.dataset import scan_corpus
from facepredict.evalmatch import evaluate_prepared
from facepredict.fixture import make_fixture
from facepredict.pipeline import prepare_corpus


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--subjects", type=int, default=50)
    ap.add_argument("--length", type=int, default=6)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out", default="sweep_fixture")
    ap.add_argument("--ranks", default="5,10,20")
    ap.add_argument("--epochs", default="1000,5000")
    ap.add_argument("--scopes", default="corpus,subject")
    args = ap.parse_args()

    out = Path(args.out)
    if not any(out.glob("*.pgm")):
        make_fixture(out, args.subjects, args.length, args.seed)
    corpus = scan_corpus(out)

    print(f"{'scope':>8} {'rank':>5} {'epochs':>7} {'mean':>7} {'min':>7} {'max':>7} {'secs':>6}")
    cache = {}
    for scope, rank, epochs in itertools.product(
        args.scopes.split(","), map(int, args.ranks.split(",")), map(int, args.epochs.split(","))
    ):
        cfg = PipelineConfig(rank=rank, epochs=epochs, scope=scope, seed=args.seed)
        key = (cfg.image_size, cfg.block, cfg.hop)
        if key not in cache:  # spectral vectors do not depend on rank/epochs/scope
            cache[key] = prepare_corpus(corpus, cfg)
        t0 = time.perf_counter()
        rep = evaluate_prepared(cache[key], cfg)
        dt = time.perf_counter() - t0
        print(f"{scope:>8} {rank:>5} {epochs:>7} {rep.mean_percent:7.2f} "
              f"{rep.min_percent:7.2f} {rep.max_percent:7.2f} {dt:6.1f}")


if __name__ == "__main__":
    main()
