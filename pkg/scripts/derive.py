"""Recompute the derived operators and freeze them in data/derived.ops.

Usage: python3 scripts/derive.py [lift] [gb] [diag]
"""

import logging
import sys
import time

from sl3jones import pipeline


def main(argv):
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    stages = argv or ["lift", "gb", "diag"]
    if "lift" in stages:
        t0 = time.time()
        ops = pipeline.search_and_lift()
        path = pipeline.save_derived(ops)
        print(f"lifted {sorted(ops)} in {time.time() - t0:.0f}s -> {path}")
    if "gb" in stages:
        ops = pipeline.derive_lex_basis()
        pipeline.save_derived(ops)
        print(f"lex basis {sorted(ops)}")
    if "diag" in stages:
        ops = pipeline.derive_diagonal()
        pipeline.save_derived(ops)
        print(f"diagonal {sorted(ops)}")


if __name__ == "__main__":
    main(sys.argv[1:])
