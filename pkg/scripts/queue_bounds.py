"""Run both queue implementations on generated schedules and compare work with the typed bound."""

import argparse
import random
from dataclasses import dataclass

from ergosess import corpus, interp
from ergosess.parser import parse_signature
from ergosess.recon import reconstruct


@dataclass
class BoundsConfig:
    max_n: int = 20
    random_schedules: int = 10
    seed: int = 0


def queue_work(two_list, ops):
    name = "queue2" if two_list else "queue"
    src = corpus.entry(name).source() + "\n" + corpus.queue_driver(two_list, ops)
    cfg = interp.spawn_config(reconstruct(parse_signature(src), "send"), "drive")
    res = interp.run(cfg)
    return sum(cfg.work_by_def[d] for d in corpus.QUEUE_DEFS[name]), res.steps


def row(label, two_list, ops):
    work, steps = queue_work(two_list, ops)
    bound = corpus.queue_potential(two_list, ops)
    mark = "=" if work == bound else ("<" if work < bound else "!! >")
    print(f"{label:24} enq={ops.count('e'):3} deq={ops.count('d'):3} "
          f"work={work:5} {mark} bound={bound:5} steps={steps}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=20)
    ap.add_argument("--random-schedules", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    cfg = BoundsConfig(**vars(ap.parse_args()))
    for two_list in (False, True):
        print("two-list queue" if two_list else "linear queue")
        for n in range(1, cfg.max_n + 1):
            row(f"  drain n={n}", two_list, "e" * n + "d" * (n + 1))
        rng = random.Random(cfg.seed)
        for _ in range(cfg.random_schedules):
            ops = "".join(rng.choice("ed") for _ in range(rng.randint(1, cfg.max_n)))
            row(f"  {ops[:20]}", two_list, ops)


if __name__ == "__main__":
    main()
