#!/usr/bin/env python3
"""Exact verification sweep over every small instance, one line per result.

Covers complete, path, cycle and star graphs with 2 to 4 vertices, money
totals 1 to 4, both models.  Exits nonzero if any instance fails.
"""

import sys

from moneychains import graphs, oracle


def sweep():
    yield graphs.complete(2), "complete:2"
    for n in (3, 4):
        yield graphs.complete(n), f"complete:{n}"
        yield graphs.path(n), f"path:{n}"
        yield graphs.cycle(n), f"cycle:{n}"
        yield graphs.star(n), f"star:{n}"


def main() -> int:
    failures = 0
    for g, name in sweep():
        for m in (1, 2, 3, 4):
            for model in (1, 2):
                r = oracle.oracle_report(model, g, m,
                                         label=f"model={model} {name} m={m}")
                status = "ok" if r["passed"] else "FAIL"
                print(f"{r['instance']:28s} period={r['period']} "
                      f"db={r['max_db_violation']:g} "
                      f"marginal_err={r['max_marginal_error']:g} {status}")
                failures += not r["passed"]
    if failures:
        print(f"{failures} instances failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
