#!/usr/bin/env python3
"""Randomized probe of the conditional-entropy chain rule; a slack below
-1e-8 is serialized as a candidate counterexample and exits with code 4.

Example:
    python scripts/run_conjecture_probe.py --trials 500 --r 1 --eta 0.9
"""

import argparse
import json
import sys

from cxtherm.experiments import decoupling_probe
from cxtherm.gates import default_gate_set


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--r", type=int, default=1)
    ap.add_argument("--eta", type=float, default=0.9)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    res = decoupling_probe((1, 1, 1), default_gate_set(), args.r, args.eta,
                           args.trials, args.seed, threads=args.threads)
    print(f"min slack over {res.trials} trials: {res.min_slack:.6e} nats")
    if res.violation is not None:
        path = f"conjecture-violation-{args.seed}.json"
        with open(path, "w") as fh:
            json.dump(res.violation, fh, indent=2, sort_keys=True)
        print(f"counterexample candidate written to {path}")
        sys.exit(4)


if __name__ == "__main__":
    main()
