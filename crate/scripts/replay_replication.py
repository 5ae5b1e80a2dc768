#!/usr/bin/env python3
"""Replays a frozen replication from its recorded lead times.

Given an instance, a plan file and a replication record, recomputes readiness, arrival
and customer lateness from the recorded lead times and compares them with the record.
Readiness of product k at a non-supplier is the latest arrival over used inbound arcs
carrying a component k needs (the BOM predecessors at an OEM, k itself at a
distributor); arrival is readiness at the sender plus the sampled lead time.

usage: replay_replication.py INSTANCE.json PLAN.json REPLICATION.json
"""
import json
import re
import sys

TOL = 1e-9


def main(inst_path, plan_path, rep_path):
    inst = json.load(open(inst_path))
    plan = json.load(open(plan_path))
    rep = json.load(open(rep_path))
    kinds = {e["id"]: e["kind"] for e in inst["entities"]}
    due = {(e["id"], k): t for e in inst["entities"] for k, t in e.get("due_time", {}).items()}
    preds = {}
    for r in inst.get("bom", []):
        preds.setdefault(r["successor"], set()).add(r["component"])

    used = set()
    for name, value in plan["values"].items():
        m = re.fullmatch(r"beta\(([^,]+),([^,]+),([^,]+)\)", name)
        if m and value > 0.5:
            used.add(m.groups())
    lead = {(r["from"], r["to"], r["product"]): r["value"] for r in rep["lead_times"]}
    assert set(lead) == used, "lead times recorded for exactly the used arcs"

    # Kahn order over the edges of the instance.
    succ = {e["id"]: [] for e in inst["entities"]}
    indeg = {e["id"]: 0 for e in inst["entities"]}
    for e in inst["edges"]:
        succ[e["from"]].append(e["to"])
        indeg[e["to"]] += 1
    order = [i for i in indeg if indeg[i] == 0]
    for i in order:
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                order.append(j)

    arrival, ready = {}, {}
    for j in order:
        for (f, t, k) in sorted(used):
            if f != j:
                continue
            if (j, k) not in ready:
                if kinds[j] == "supplier":
                    o = 0.0
                else:
                    need = preds.get(k, set()) if kinds[j] == "oem" else {k}
                    o = max([arrival[a] for a in arrival if a[1] == j and a[2] in need] + [0.0])
                ready[(j, k)] = o
            arrival[(f, t, k)] = ready[(j, k)] + lead[(f, t, k)]

    late = {}
    for (f, t, k), a in arrival.items():
        if kinds[t] == "customer" and (t, k) in due:
            late[(t, k)] = max(late.get((t, k), 0.0), max(0.0, a - due[(t, k)]))

    def check(label, mine, rows, key):
        theirs = {key(r): r["value"] for r in rows}
        for k, v in mine.items():
            assert abs(theirs[k] - v) <= TOL, f"{label} {k}: {theirs[k]} vs {v}"
        print(f"{label}: {len(mine)} values agree")

    check("arrivals", arrival, rep["arrivals"], lambda r: (r["from"], r["to"], r["product"]))
    recorded_ready = {(r["entity"], r["product"]): r["value"] for r in rep["readiness"]}
    check("readiness", ready, [{"entity": e, "product": p, "value": recorded_ready[(e, p)]} for e, p in ready],
          lambda r: (r["entity"], r["product"]))
    check("lateness", late, rep["lateness"], lambda r: (r["entity"], r["product"]))


if __name__ == "__main__":
    main(*sys.argv[1:4])
