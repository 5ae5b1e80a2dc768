#!/usr/bin/env python3
"""Recomputes the pooled lateness table from a sweep's totals.csv.

For each (variant, entity) the mean total lateness of every policy cell is taken over
its replications; the row reports the mean and population standard deviation of those
cell means. An empty entity is the undisrupted row.

usage: lateness_summary.py OUTPUT_DIR/totals.csv > summary.csv
"""
import csv
import statistics
import sys
from collections import OrderedDict


def main(path):
    cells = OrderedDict()
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            key = (row["variant"], row["entity"])
            cells.setdefault(key, OrderedDict()).setdefault(row["policy"], []).append(
                float(row["total_lateness"])
            )
    print("variant,entity,cells,mean_lateness,std_lateness")
    for (variant, entity), by_policy in cells.items():
        means = [sum(v) / len(v) for v in by_policy.values()]
        print(f"{variant},{entity},{len(means)},{statistics.fmean(means)!r},{statistics.pstdev(means)!r}")


if __name__ == "__main__":
    main(sys.argv[1])
