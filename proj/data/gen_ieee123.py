#!/usr/bin/env python3
"""Generate the balanced single-phase-equivalent IEEE 123-bus fixture (ieee123.json).

Topology and segment lengths follow the IEEE 123-node test feeder line data
(closed switches are kept as short branches, normally-open ties are dropped,
the substation regulator node 150 is folded into slack bus 149). Spot loads
are aggregated across phases. The feeder is modeled at 12.47 kV with uprated
three-phase conductors so that high EV penetration studies stay solvable.
"""
import json
import sys

FT_TO_KM = 0.0003048

# (from, to, length_ft, config)
SEGMENTS = [
    (149, 1, 400, 1), (1, 2, 175, 10), (1, 3, 250, 11), (1, 7, 300, 1), (3, 4, 200, 11),
    (3, 5, 325, 11), (5, 6, 250, 11), (7, 8, 200, 1), (8, 12, 225, 10), (8, 9, 225, 9),
    (8, 13, 300, 1), (9, 14, 425, 9), (13, 34, 150, 11), (13, 18, 825, 2), (14, 11, 250, 9),
    (14, 10, 250, 9), (15, 16, 375, 11), (15, 17, 350, 11), (18, 19, 250, 9), (18, 21, 300, 2),
    (19, 20, 325, 9), (21, 22, 525, 10), (21, 23, 250, 2), (23, 24, 550, 11), (23, 25, 275, 2),
    (25, 26, 350, 7), (25, 28, 200, 2), (26, 27, 275, 7), (26, 31, 225, 11), (27, 33, 500, 9),
    (28, 29, 300, 2), (29, 30, 350, 2), (30, 250, 200, 2), (31, 32, 300, 11), (34, 15, 100, 11),
    (35, 36, 650, 8), (35, 40, 250, 1), (36, 37, 300, 9), (36, 38, 250, 10), (38, 39, 325, 10),
    (40, 41, 325, 11), (40, 42, 250, 1), (42, 43, 500, 10), (42, 44, 200, 1), (44, 45, 200, 9),
    (44, 47, 250, 1), (45, 46, 300, 9), (47, 48, 150, 4), (47, 49, 250, 4), (49, 50, 250, 4),
    (50, 51, 250, 4), (52, 53, 200, 1), (53, 54, 125, 1), (54, 55, 275, 1), (54, 57, 350, 3),
    (55, 56, 275, 1), (57, 58, 250, 10), (57, 60, 750, 3), (58, 59, 250, 10), (60, 61, 550, 5),
    (60, 62, 250, 12), (62, 63, 175, 12), (63, 64, 350, 12), (64, 65, 425, 12), (65, 66, 325, 12),
    (67, 68, 200, 9), (67, 72, 275, 3), (67, 97, 250, 3), (68, 69, 275, 9), (69, 70, 325, 9),
    (70, 71, 275, 9), (72, 73, 275, 11), (72, 76, 200, 3), (73, 74, 350, 11), (74, 75, 400, 11),
    (76, 77, 400, 6), (76, 86, 700, 3), (77, 78, 100, 6), (78, 79, 225, 6), (78, 80, 475, 6),
    (80, 81, 475, 6), (81, 82, 250, 6), (81, 84, 675, 11), (82, 83, 250, 6), (84, 85, 475, 11),
    (86, 87, 450, 6), (87, 88, 175, 9), (87, 89, 275, 6), (89, 90, 225, 10), (89, 91, 225, 6),
    (91, 92, 300, 11), (91, 93, 225, 6), (93, 94, 275, 9), (93, 95, 300, 6), (95, 96, 200, 10),
    (97, 98, 275, 3), (98, 99, 550, 3), (99, 100, 300, 3), (100, 450, 800, 3), (101, 102, 225, 11),
    (101, 105, 275, 3), (102, 103, 325, 11), (103, 104, 700, 11), (105, 106, 225, 10),
    (105, 108, 325, 3), (106, 107, 575, 10), (108, 109, 450, 9), (108, 300, 1000, 3),
    (109, 110, 300, 9), (110, 111, 575, 9), (110, 112, 125, 9), (112, 113, 525, 9),
    (113, 114, 325, 9), (135, 35, 375, 4), (152, 52, 400, 1), (160, 67, 350, 6),
    (197, 101, 250, 3),
    # closed switches
    (13, 152, 10, 0), (18, 135, 10, 0), (60, 160, 10, 0), (97, 197, 10, 0),
    # distribution transformer 61 -> 610 referred to the primary side
    (61, 610, 0, -1),
]

# Aggregated three-phase spot loads: bus -> (kW, kvar, zip class)
LOADS = {
    1: (40, 20, "sp"), 2: (20, 10, "sp"), 4: (40, 20, "si"), 5: (20, 10, "sz"), 6: (40, 20, "sp"),
    7: (20, 10, "sp"), 9: (40, 20, "sp"), 10: (20, 10, "si"), 11: (40, 20, "sz"), 12: (20, 10, "sp"),
    16: (40, 20, "sp"), 17: (20, 10, "sp"), 19: (40, 20, "sp"), 20: (40, 20, "si"), 22: (40, 20, "sz"),
    24: (40, 20, "sp"), 28: (40, 20, "si"), 29: (40, 20, "sz"), 30: (40, 20, "sp"), 31: (20, 10, "sp"),
    32: (20, 10, "sp"), 33: (40, 20, "si"), 34: (40, 20, "sz"), 35: (40, 20, "sp"), 37: (40, 20, "sz"),
    38: (20, 10, "si"), 39: (20, 10, "sp"), 41: (20, 10, "sp"), 42: (20, 10, "sp"), 43: (40, 20, "sz"),
    45: (20, 10, "si"), 46: (20, 10, "sp"), 47: (105, 75, "si"), 48: (210, 150, "sz"), 49: (140, 95, "sp"),
    50: (40, 20, "sp"), 51: (20, 10, "sp"), 52: (40, 20, "sp"), 53: (40, 20, "sp"), 55: (20, 10, "sz"),
    56: (20, 10, "sp"), 58: (20, 10, "si"), 59: (20, 10, "sp"), 60: (20, 10, "sp"), 62: (40, 20, "sz"),
    63: (40, 20, "sp"), 64: (75, 35, "si"), 65: (140, 100, "sz"), 66: (75, 35, "sp"), 68: (20, 10, "sp"),
    69: (40, 20, "sp"), 70: (20, 10, "sp"), 71: (40, 20, "sp"), 73: (40, 20, "sp"), 74: (40, 20, "sz"),
    75: (40, 20, "sp"), 76: (245, 180, "si"), 77: (40, 20, "sp"), 79: (40, 20, "sz"), 80: (40, 20, "sp"),
    82: (40, 20, "sp"), 83: (20, 10, "sp"), 84: (20, 10, "sp"), 85: (40, 20, "sp"), 86: (20, 10, "sp"),
    87: (40, 20, "sp"), 88: (40, 20, "sp"), 90: (40, 20, "si"), 92: (40, 20, "sp"), 94: (40, 20, "sp"),
    95: (20, 10, "sp"), 96: (20, 10, "sp"), 98: (40, 20, "sp"), 99: (40, 20, "sp"), 100: (40, 20, "sz"),
    102: (20, 10, "sp"), 103: (40, 20, "sp"), 104: (40, 20, "sp"), 106: (40, 20, "sp"), 107: (40, 20, "sp"),
    109: (40, 20, "sp"), 111: (20, 10, "sp"), 112: (20, 10, "si"), 113: (40, 20, "sz"), 114: (20, 10, "sp"),
}

# Shunt capacitor banks, kvar (modeled as constant-impedance reactive injection)
CAPACITORS = {83: 600, 88: 50, 90: 50, 92: 50}

# Per-config balanced positive-sequence data: r, x ohm/km, ampacity A
CONFIGS = {
    "trunk": (0.060, 0.330, 1000.0),
    "three_phase": (0.120, 0.380, 700.0),
    "lateral": (0.350, 0.400, 350.0),
    "cable": (0.250, 0.120, 350.0),
    "switch": (0.001, 0.001, 1000.0),
    "transformer": (0.0, 0.0, 350.0),
}

TRUNK = {(149, 1), (1, 7), (7, 8), (8, 13), (13, 152), (152, 52), (52, 53), (53, 54),
         (54, 57), (57, 60), (60, 160), (160, 67), (13, 18), (18, 135), (135, 35),
         (18, 21), (21, 23), (23, 25), (67, 97), (97, 197), (197, 101), (67, 72), (72, 76)}

# Installed protective devices: (from, to) -> type. Classes are sized from base current.
DEVICES = {
    (149, 1): "overcurrent-relay",
    (13, 152): "recloser", (13, 18): "recloser", (60, 160): "recloser", (67, 97): "recloser",
    (72, 76): "recloser", (18, 135): "recloser", (54, 57): "recloser",
    (67, 72): "dorsr", (97, 197): "dorsr", (8, 13): "dorsr",
    (1, 3): "fuse", (1, 2): "fuse", (8, 12): "fuse", (8, 9): "fuse", (13, 34): "fuse",
    (18, 19): "fuse", (21, 22): "fuse", (23, 24): "fuse", (25, 26): "fuse", (25, 28): "fuse",
    (35, 36): "fuse", (40, 41): "fuse", (42, 43): "fuse", (44, 45): "fuse", (47, 48): "fuse",
    (57, 58): "fuse", (60, 62): "fuse", (60, 61): "fuse", (67, 68): "fuse", (72, 73): "fuse",
    (76, 77): "fuse", (76, 86): "recloser", (87, 88): "fuse", (89, 90): "fuse", (91, 92): "fuse",
    (93, 94): "fuse", (95, 96): "fuse", (101, 102): "fuse", (105, 106): "fuse", (108, 109): "fuse",
    (108, 300): "fuse", (100, 450): "fuse", (81, 84): "fuse", (26, 31): "fuse",
}


def config_of(seg):
    f, t, _, cfg = seg
    if cfg == 0:
        return "switch"
    if cfg == -1:
        return "transformer"
    if (f, t) in TRUNK:
        return "trunk"
    if 1 <= cfg <= 6:
        return "three_phase"
    if cfg == 12:
        return "cable"
    return "lateral"


def build(kv=12.47, slack_v=1.0):
    buses = sorted({b for s in SEGMENTS for b in s[:2]})
    assert len(buses) == 123, len(buses)
    assert len(SEGMENTS) == 122, len(SEGMENTS)
    out_buses = []
    for b in buses:
        entry = {"id": b, "kind": "slack" if b == 149 else "load", "nominal_kv": kv,
                 "candidate": b != 149,
                 "zip_load": {"sz": {"p_kw": 0, "q_kvar": 0}, "si": {"p_kw": 0, "q_kvar": 0},
                              "sp": {"p_kw": 0, "q_kvar": 0}}}
        if b == 149:
            entry["voltage_pu"] = slack_v
        if b in LOADS:
            p, q, cls = LOADS[b]
            entry["zip_load"][cls] = {"p_kw": p, "q_kvar": q}
        if b in CAPACITORS:
            entry["zip_load"]["sz"]["q_kvar"] -= CAPACITORS[b]
        out_buses.append(entry)
    out_branches = []
    for i, seg in enumerate(SEGMENTS, start=1):
        f, t, ft, _ = seg
        cfg = config_of(seg)
        r, x, amp = CONFIGS[cfg]
        km = ft * FT_TO_KM
        if cfg == "transformer":
            r_ohm, x_ohm = 1.2, 3.6
        elif cfg == "switch":
            r_ohm, x_ohm = 0.001, 0.001
        else:
            r_ohm, x_ohm = r * km, x * km
        br = {"id": i, "from": f, "to": t, "r_ohm": round(r_ohm, 6), "x_ohm": round(x_ohm, 6),
              "length_km": round(km, 6), "capacity_kva": round(3 ** 0.5 * kv * amp, 1),
              "rated_current_a": amp}
        if (f, t) in DEVICES:
            br["device"] = {"type": DEVICES[(f, t)], "class": "auto"}
        out_branches.append(br)
    return {"name": "IEEE 123-bus (balanced equivalent, 12.47 kV)", "base_mva": 10.0,
            "buses": out_buses, "branches": out_branches}


if __name__ == "__main__":
    net = build()
    json.dump(net, sys.stdout if len(sys.argv) < 2 else open(sys.argv[1], "w"), indent=1)
