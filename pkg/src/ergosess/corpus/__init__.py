"""The case-study programs, their cost models and their closed drivers."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .. import syntax as sx
from ..parser import parse_signature

HERE = Path(__file__).parent


@dataclass(frozen=True)
class Entry:
    name: str
    cost: str = "none"
    drivers: tuple[str, ...] = ()

    @property
    def path(self) -> Path:
        return HERE / f"{self.name}.ss"

    def source(self) -> str:
        return self.path.read_text()

    def signature(self) -> sx.Signature:
        return parse_signature(self.source())


ENTRIES = {e.name: e for e in (
    Entry("list", "send", ("main",)),
    Entry("queue", "send", ("main",)),
    Entry("queue2", "send", ("main",)),
    Entry("trie", "send", ("count3", "num1", "insert_twice_delete")),
    Entry("binary", "none", ("three", "one", "two_vs_three", "pair_of_three")),
    Entry("primes", "none", ("sieve8",)),
    Entry("linlam", "none", ("run_idid", "id_of_idid")),
    Entry("equality"),
    Entry("indexed"),
)}

# drivers re-typed after every step: binary counter, two-list queue, nat arithmetic
PRESERVATION_DRIVERS = (("trie", "count3"), ("queue2", "main"), ("binary", "two_vs_three"))

QUEUE_DEFS = {"queue": ("empty", "elem"),
              "queue2": ("nil", "cons", "rev", "reverse", "queue_lists", "queue_rev", "queue_new")}


def entry(name: str) -> Entry:
    return ENTRIES[name]


# ---------------------------------------------------------------------------
# Generated queue drivers


def queue_driver(two_list: bool, ops: str, name: str = "drive") -> str:
    """Source of a driver performing `ops` (a string over 'e' and 'd') on a fresh queue.

    A dequeue on an empty queue ends the run with `none`; otherwise the
    driver offers the remaining queue to its client.  The driver is given
    more potential than it needs and the surplus is spent as its own work.
    """
    ins, dele, new = ("enq", "deq", "queue_new") if two_list else ("ins", "del", "empty")
    lines = [f"q <- {new} <- ;"]
    size, closing, depth = 0, False, 0
    for i, op in enumerate(ops):
        if op == "e":
            lines += [f"x{i} <- nat_zero <- ;", f"q.{ins} ; send q x{i} ;"]
            size += 1
        elif op == "d" and size > 0:
            lines += [f"q.{dele} ;", f"case q ( some => y{i} <- recv q ;",
                      f"d{i} <- nat_drop <- y{i} ; wait d{i} ;"]
            size -= 1
            depth += 1
        elif op == "d":
            lines += [f"q.{dele} ;", "case q ( none => wait q ; close u )"]
            closing = True
            break
        else:
            raise ValueError(f"unknown queue operation {op!r}")
    if not closing:
        lines.append("u <- q")
    lines[-1] += " )" * depth
    offered = "1" if closing else f"queue{{{size}}}"
    budget = 20 * len(ops) * (len(ops) + 1) + 10
    return "\n".join([f"decl {name} : . |{{{budget}}}- (u : {offered})",
                      f"proc u <- {name} <- ="] + ["  " + ln for ln in lines]) + "\n"


def queue_potential(two_list: bool, ops: str) -> int:
    """The potential the operations in `ops` pay into the queue, per its type."""
    paid, size = (4 if two_list else 0), 0
    for op in ops:
        if op == "e":
            paid += 6 if two_list else 2 * size
            size += 1
        else:
            paid += 4 if two_list else 2
            if size == 0:
                break
            size -= 1
    return paid
