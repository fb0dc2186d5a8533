#!/usr/bin/env python3
"""Classify every map in a census and tally the normality classes.

Usage: python3 scripts/run_census.py [n_per_side] [sample_size seed]
With two extra arguments a seeded random sample is classified instead of
the exhaustive census.
"""

import json
import sys
from collections import Counter

from fibertop.census import census_instances, sampled_instances
from fibertop.harness import classify, hierarchy_violations


def main() -> int:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 3
    if len(sys.argv) > 3:
        instances = sampled_instances(n, int(sys.argv[2]), int(sys.argv[3]))
    else:
        instances = [i for i in census_instances(2 * n)
                     if i.f.domain.n <= n and i.f.codomain.n <= n]
    counts = Counter()
    violations = []
    for inst in instances:
        cls = classify(inst.f)
        counts.update(k for k, v in cls.items() if v is True)
        bad = hierarchy_violations(cls, inst.f.codomain.n == 1)
        if bad:
            violations.append((inst.uid, bad))
    print(json.dumps({"instances": len(instances),
                      "counts": dict(sorted(counts.items())),
                      "violations": violations}, indent=2))
    return 1 if violations else 0


if __name__ == "__main__":
    sys.exit(main())
