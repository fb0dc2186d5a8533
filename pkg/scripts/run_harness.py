#!/usr/bin/env python3
"""Run the full theorem equivalence sweep and print the summary.

Usage: python3 scripts/run_harness.py [total] [depth] [budget]
Writes one JSON line per instance record to harness_records.jsonl.
"""

import json
import sys
import time

from fibertop.harness import digest, run_theorem_sweep


def main() -> int:
    total = int(sys.argv[1]) if len(sys.argv) > 1 else 6
    depth = int(sys.argv[2]) if len(sys.argv) > 2 else 6
    budget = int(sys.argv[3]) if len(sys.argv) > 3 else 2
    t0 = time.monotonic()
    report = run_theorem_sweep(total, depth, budget)
    elapsed = time.monotonic() - t0
    with open("harness_records.jsonl", "w", encoding="utf-8") as handle:
        for rec in report["records"]:
            handle.write(json.dumps(rec, sort_keys=True) + "\n")
    summary = {k: v for k, v in report.items() if k != "records"}
    print(json.dumps(summary, indent=2, sort_keys=True))
    print(f"digest: {digest(report)}")
    print(f"elapsed: {elapsed:.1f}s; records in harness_records.jsonl")
    clean = not (report["thm_mismatches"] or report["hierarchy_violations"]
                 or report["anomalies"] or report["extension_contract_failures"])
    return 0 if clean else 1


if __name__ == "__main__":
    sys.exit(main())
