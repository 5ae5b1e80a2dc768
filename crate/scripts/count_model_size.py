#!/usr/bin/env python3
"""Counts the columns and rows the model builder should emit for an instance.

Works from the instance file and the model definition alone: it enumerates the index
sets (edge-product arcs, stocked products, dispatched products, readiness pairs) and
does not look at any program the builder produced.

usage: count_model_size.py INSTANCE.json [--penalized] > manifest.json
"""
import json
import sys


def count(inst, penalized):
    entities = {e["id"]: e for e in inst["entities"]}
    preds = {}
    for r in inst.get("bom", []):
        preds.setdefault(r["successor"], set()).add(r["component"])

    arcs = []
    for e in inst["edges"]:
        for k in sorted(e.get("lead_time", {})):
            due = entities[e["to"]].get("due_time", {}).get(k)
            arcs.append((e["from"], e["to"], k, due))

    producible = {i: set(e.get("production_cost", {})) for i, e in entities.items()}
    stocked = {i: set() for i in entities}
    dispatched = {i: set() for i in entities}
    for f, t, k, _ in arcs:
        stocked[f].add(k)
        stocked[t].add(k)
        dispatched[f].add(k)
    for i, e in entities.items():
        for k in producible[i]:
            stocked[i].add(k)
            stocked[i] |= preds.get(k, set())
        for field in ("demand", "initial_inventory", "holding_cost"):
            stocked[i] |= set(e.get(field, {}))
    demand = [(i, k) for i, e in entities.items() for k, d in e.get("demand", {}).items() if d > 0]
    open_ = [i for i in entities if producible[i]]
    late = [a for a in arcs if a[3] is not None] if penalized else []

    def required(j, k):
        kind = entities[j]["kind"]
        if kind == "oem":
            return preds.get(k, set())
        if kind == "distributor":
            return {k}
        return set()

    ready = 0
    for j in entities:
        if entities[j]["kind"] == "supplier":
            continue
        for k in dispatched[j]:
            req = required(j, k)
            ready += sum(1 for f, t, kk, _ in arcs if t == j and kk in req)

    n = len(arcs)
    columns = {
        "y": n, "beta": n, "x": len(demand), "p": sum(len(s) for s in producible.values()),
        "zeta": len(open_), "I": sum(len(s) for s in stocked.values()), "delta": len(demand),
        "a": n, "o": sum(len(s) for s in dispatched.values()), "z": n, "w": n, "v": n,
    }
    rows = {
        "balance": sum(len(s) for s in stocked.values()),
        "edge_cap": n,
        "mix_cap": sum(1 for e in inst["edges"] if e.get("lead_time")),
        "prod_cap": len(open_),
        "shortage": len(demand),
        "arr_ub": n, "arr_link": n, "arr_lb": n,
        "ready": ready,
        "late": len(late), "v_ub": len(late), "v_link": len(late), "v_lb": len(late), "w_def": len(late),
    }
    return {
        "columns": columns,
        "rows": rows,
        "total_columns": sum(columns.values()),
        "total_rows": sum(rows.values()),
        "free_binaries": n + len(open_) + len(late),
    }


def main(argv):
    path = argv[1]
    penalized = "--penalized" in argv[2:]
    with open(path) as f:
        inst = json.load(f)
    manifest = count(inst, penalized)
    manifest = {"instance": path.rsplit("/", 1)[-1], "policy": "1:500" if penalized else "none", **manifest}
    print(json.dumps(manifest, indent=2))


if __name__ == "__main__":
    main(sys.argv)
