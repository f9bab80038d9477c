"""Parse, reconstruct and check every corpus program; print per-file timings."""

import argparse
import time
from dataclasses import dataclass

from ergosess import corpus
from ergosess.parser import parse_signature
from ergosess.typecheck import check_signature


@dataclass
class TimingConfig:
    repeat: int = 5
    verbose: bool = False


def time_entry(e, cfg):
    best = float("inf")
    for _ in range(cfg.repeat):
        start = time.perf_counter()
        report = check_signature(parse_signature(e.source()), "implicit", e.cost)
        best = min(best, time.perf_counter() - start)
    return report, best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("-v", "--verbose", action="store_true")
    cfg = TimingConfig(**vars(ap.parse_args()))
    total = 0.0
    print(f"{'file':10} {'cost':6} {'defs':>5} {'ms':>8}  verdict")
    for e in corpus.ENTRIES.values():
        report, best = time_entry(e, cfg)
        total += best
        print(f"{e.name:10} {e.cost:6} {len(report.verdicts):5} {1000 * best:8.1f}  "
              f"{'ok' if report.ok else 'FAILED'}")
        if cfg.verbose or not report.ok:
            for line in report.lines():
                print("    " + line)
    print(f"total {1000 * total:.1f} ms (best of {cfg.repeat})")


if __name__ == "__main__":
    main()
