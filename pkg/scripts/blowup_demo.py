#!/usr/bin/env python3
"""Show how nested knowledge under alternating fixpoints blows up the
refinement chain, and how the capacity guard cuts the run off.

Usage: python3 scripts/blowup_demo.py [--cap N]
"""

import argparse

from epmu.checker import check
from epmu.errors import CapacityExceeded
from epmu.formula import parse_formula
from epmu.system import MultiAgentSystem

SYSTEM = MultiAgentSystem(
    [1, 2, 3, 4, 5], 1,
    [(1, 2), (1, 4), (1, 5), (2, 1), (2, 2), (2, 3), (3, 5), (4, 1), (4, 2),
     (5, 1), (5, 2), (5, 3), (5, 4), (5, 5)],
    ["p", "q"],
    {1: {"q"}, 2: {"p"}, 3: {"p"}, 5: {"p"}},
    {"a": set(), "b": {"p"}},
)

FORMULA = (
    "mu Z1 . p | K a . EX "
    "(nu Z2 . q & K b . EX (mu Z3 . p | K a . EX Z3) & EX Z2) | EX Z1"
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cap", type=int, default=20,
                    help="capacity for the second, guarded run (default 20)")
    args = ap.parse_args()

    f = parse_formula(FORMULA)
    print("system: 5 states, obs(a) = {} (blind), obs(b) = {p}")
    print(f"formula: {FORMULA}")
    print()
    v = check(SYSTEM, f)
    print(f"unbounded run: verdict={'holds' if v.holds else 'does not hold'}")
    print(f"refinement sizes along the chain: {v.refinement_sizes}")
    growth = [f"x{b / a:.1f}" for a, b in zip(v.refinement_sizes, v.refinement_sizes[1:])]
    print(f"per-step growth: {growth}")
    print()
    print(f"re-running with --cap {args.cap}:")
    try:
        check(SYSTEM, f, cap=args.cap)
        print("  (cap never reached)")
    except CapacityExceeded as e:
        print(f"  CapacityExceeded: {e}")


if __name__ == "__main__":
    main()
