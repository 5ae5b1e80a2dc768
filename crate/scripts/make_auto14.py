#!/usr/bin/env python3
"""Writes data/auto14.json, the synthesized automotive network.

Topology: 7 suppliers, 3 OEMs, 2 distributors, 2 customers. All numbers are
invented desk-scale values; see data/README.md.
"""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "auto14.json"

products = ["engine", "body", "electronics", "transmission", "vehicle_1", "vehicle_2"]
bom = [
    ("engine", "vehicle_1"), ("body", "vehicle_1"), ("transmission", "vehicle_1"),
    ("engine", "vehicle_2"), ("electronics", "vehicle_2"), ("transmission", "vehicle_2"),
]

# id, product, capacity, unit production cost, open cost
suppliers = [
    ("S1", "engine", 60, 4.0, 60),
    ("S2", "engine", 60, 5.0, 50),
    ("S3", "body", 60, 3.0, 40),
    ("S4", "body", 60, 3.5, 40),
    ("S5", "electronics", 60, 2.0, 30),
    ("S6", "transmission", 60, 5.0, 50),
    ("S7", "transmission", 60, 4.0, 60),
]
# id, products, capacity, unit cost, open cost
oems = [
    ("A1", ["vehicle_1"], 40, 10.0, 120),
    ("A2", ["vehicle_1", "vehicle_2"], 60, 9.0, 150),
    ("A3", ["vehicle_2"], 40, 11.0, 100),
]

entities = []
for sid, k, cap, cost, open_cost in suppliers:
    entities.append({
        "id": sid, "kind": "supplier", "production_capacity": cap, "open_cost": open_cost,
        "production_cost": {k: cost}, "holding_cost": {k: 0.5},
    })
for aid, ks, cap, cost, open_cost in oems:
    entities.append({
        "id": aid, "kind": "oem", "production_capacity": cap, "open_cost": open_cost,
        "production_cost": {k: cost for k in ks}, "holding_cost": {k: 1.0 for k in ks},
    })
for did in ["D1", "D2"]:
    entities.append({"id": did, "kind": "distributor", "holding_cost": {"vehicle_1": 1.0, "vehicle_2": 1.0}})
entities.append({"id": "C1", "kind": "customer", "demand": {"vehicle_1": 30},
                 "shortage_penalty": {"vehicle_1": 400}, "due_time": {"vehicle_1": 9}})
entities.append({"id": "C2", "kind": "customer", "demand": {"vehicle_2": 30},
                 "shortage_penalty": {"vehicle_2": 400}, "due_time": {"vehicle_2": 9}})

edges = []


def edge(f, t, lead, cap, fixed, unit, penalty=None):
    e = {"from": f, "to": t, "capacity": cap, "fixed_cost": fixed,
         "unit_cost": {k: unit for k in lead}, "lead_time": lead}
    if penalty is not None:
        e["fixed_late_penalty"] = {k: penalty for k in lead}
        e["unit_late_penalty"] = {k: penalty for k in lead}
    edges.append(e)


# Supplier tier: every component has a backup source.
edge("S1", "A1", {"engine": 3}, 40, 20, 1.0)
edge("S1", "A2", {"engine": 3}, 60, 20, 1.0)
edge("S2", "A2", {"engine": 2}, 60, 25, 1.5)
edge("S2", "A3", {"engine": 2}, 40, 25, 1.5)
edge("S3", "A1", {"body": 2}, 40, 15, 1.0)
edge("S3", "A2", {"body": 2}, 40, 15, 1.0)
edge("S4", "A1", {"body": 3}, 40, 15, 1.0)
edge("S4", "A2", {"body": 3}, 40, 15, 1.0)
edge("S5", "A2", {"electronics": 2}, 40, 10, 0.5)
edge("S5", "A3", {"electronics": 2}, 40, 10, 0.5)
edge("S6", "A1", {"transmission": 3}, 40, 20, 1.0)
edge("S6", "A2", {"transmission": 3}, 60, 20, 1.0)
edge("S6", "A3", {"transmission": 3}, 40, 20, 1.0)
edge("S7", "A1", {"transmission": 3}, 40, 20, 1.0)
edge("S7", "A2", {"transmission": 3}, 60, 20, 1.0)
edge("S7", "A3", {"transmission": 3}, 40, 20, 1.0)
# OEM tier.
edge("A1", "D1", {"vehicle_1": 2}, 40, 30, 2.0)
edge("A1", "D2", {"vehicle_1": 3}, 40, 30, 2.0)
edge("A2", "D1", {"vehicle_1": 2, "vehicle_2": 2}, 60, 30, 2.0)
edge("A2", "D2", {"vehicle_1": 3, "vehicle_2": 3}, 60, 30, 2.0)
edge("A3", "D1", {"vehicle_2": 2}, 40, 30, 2.0)
edge("A3", "D2", {"vehicle_2": 3}, 40, 30, 2.0)
# Distribution tier, the only arcs with due times and lateness penalties.
edge("D1", "C1", {"vehicle_1": 2}, 60, 25, 1.5, penalty=20)
edge("D1", "C2", {"vehicle_2": 2}, 60, 25, 1.5, penalty=20)
edge("D2", "C1", {"vehicle_1": 1}, 60, 25, 1.5, penalty=20)
edge("D2", "C2", {"vehicle_2": 1}, 60, 25, 1.5, penalty=20)

doc = {
    "schema": 1,
    "products": [{"id": k} for k in products],
    "bom": [{"component": c, "successor": s, "conversion_rate": 1} for c, s in bom],
    "entities": entities,
    "edges": edges,
}
OUT.write_text(json.dumps(doc, indent=2) + "\n")


def write_edits(name, edits):
    path = OUT.parent / f"auto14_{name}.json"
    path.write_text(json.dumps(edits, indent=2) + "\n")


def edge_obj(f, t, lead, cap, fixed, unit, penalty=None):
    edges.clear()
    edge(f, t, lead, cap, fixed, unit, penalty)
    return edges[0]


# Reverse tree: one transmission supplier fewer, a fourth OEM and a third distributor.
# S7 absorbs S6's capacity; A4 takes 20 units of each vehicle, 20 from A1 and 20 from A3.
a4 = {
    "id": "A4", "kind": "oem", "production_capacity": 20, "open_cost": 100,
    "production_cost": {"vehicle_1": 10.0, "vehicle_2": 10.0},
    "holding_cost": {"vehicle_1": 1.0, "vehicle_2": 1.0},
}
d3 = {"id": "D3", "kind": "distributor", "holding_cost": {"vehicle_1": 1.0, "vehicle_2": 1.0}}
write_edits("reverse_tree", {
    "remove_entities": ["S6"],
    "add_entities": [a4, d3],
    "add_edges": [
        edge_obj("S1", "A4", {"engine": 3}, 20, 20, 1.0),
        edge_obj("S3", "A4", {"body": 2}, 20, 15, 1.0),
        edge_obj("S5", "A4", {"electronics": 2}, 20, 10, 0.5),
        edge_obj("S7", "A4", {"transmission": 3}, 20, 20, 1.0),
        edge_obj("A2", "D3", {"vehicle_1": 2, "vehicle_2": 2}, 60, 30, 2.0),
        edge_obj("A3", "D3", {"vehicle_2": 2}, 40, 30, 2.0),
        edge_obj("A4", "D1", {"vehicle_1": 2, "vehicle_2": 2}, 20, 30, 2.0),
        edge_obj("A4", "D3", {"vehicle_1": 2, "vehicle_2": 2}, 20, 30, 2.0),
        edge_obj("D3", "C1", {"vehicle_1": 2}, 60, 25, 1.5, penalty=20),
        edge_obj("D3", "C2", {"vehicle_2": 2}, 60, 25, 1.5, penalty=20),
    ],
    "production_capacity": {"S7": 120, "A1": 20, "A3": 20},
})

# Chain: one transmission supplier, one OEM and one distributor fewer. A1 is rebuilt to
# make both vehicles and ship through D1 like A2.
a1 = {
    "id": "A1", "kind": "oem", "production_capacity": 40, "open_cost": 120,
    "production_cost": {"vehicle_1": 10.0, "vehicle_2": 10.5},
    "holding_cost": {"vehicle_1": 1.0, "vehicle_2": 1.0},
}
write_edits("chain", {
    "remove_entities": ["S6", "A1", "A3", "D2"],
    "add_entities": [a1],
    "add_edges": [
        edge_obj("S1", "A1", {"engine": 3}, 60, 20, 1.0),
        edge_obj("S3", "A1", {"body": 2}, 60, 15, 1.0),
        edge_obj("S5", "A1", {"electronics": 2}, 60, 10, 0.5),
        edge_obj("S7", "A1", {"transmission": 3}, 60, 20, 1.0),
        edge_obj("A1", "D1", {"vehicle_1": 2, "vehicle_2": 2}, 60, 30, 2.0),
    ],
    "production_capacity": {"S7": 120},
})
