#!/usr/bin/env python3
"""Extracts the response label of every disrupted cell from a sweep's report.csv.

usage: desk_labels.py OUTPUT_DIR/report.csv > labels.csv
"""
import csv
import sys


def main(path):
    print("variant,entity,policy,label")
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            if row["entity"]:
                print(f'{row["variant"]},{row["entity"]},{row["policy"]},{row["label"]}')


if __name__ == "__main__":
    main(sys.argv[1])
