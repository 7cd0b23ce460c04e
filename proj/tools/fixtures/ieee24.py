"""Writes data/ieee24.json.

IEEE RTS-24 electrical data (impedances, charging, ratings, voltage set
points) with demand and generation capacity tripled as in the Romero et al.
(2002) planning variant: 8550 MW / 1740 MVAr of load, 41 corridors of which 7
are new rights of way, at most 3 new circuits per corridor. Currency:
10^6 US$. Transformer taps and the bus 6 reactor are not modelled.
"""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parents[2] / "data"
SCALE = 3.0

# id, kind, P (MW), Q (MVAr) before scaling
BUSES = [
    (1, "pv", 108, 22), (2, "pv", 97, 20), (3, "pq", 180, 37), (4, "pq", 74, 15),
    (5, "pq", 71, 14), (6, "pq", 136, 28), (7, "pv", 125, 25), (8, "pq", 171, 35),
    (9, "pq", 175, 36), (10, "pq", 195, 40), (11, "pq", 0, 0), (12, "pq", 0, 0),
    (13, "slack", 265, 54), (14, "pv", 194, 39), (15, "pv", 317, 64), (16, "pv", 100, 20),
    (17, "pq", 0, 0), (18, "pv", 333, 68), (19, "pq", 181, 37), (20, "pq", 128, 26),
    (21, "pv", 0, 0), (22, "pv", 0, 0), (23, "pv", 0, 0), (24, "pq", 0, 0),
]

# bus, Pmax, Qmin, Qmax (unit totals per bus before scaling), V set point, plan G1 (MW, scaled)
GENS = [
    (1, 192, -50, 80, 1.035, 465), (2, 192, -50, 80, 1.035, 576), (7, 300, 0, 180, 1.025, 900),
    (13, 591, 0, 240, 1.020, 1236), (14, 0, -50, 200, 0.980, 0), (15, 215, -50, 110, 1.014, 612),
    (16, 155, -50, 80, 1.017, 310), (18, 400, -50, 200, 1.050, 1200), (21, 400, -50, 200, 1.050, 1200),
    (22, 300, -60, 96, 1.050, 900), (23, 660, -125, 310, 1.050, 1151),
]

# from, to, existing, r, x, b, rating (MVA), cost
LINES = [
    (1, 2, 1, 0.0026, 0.0139, 0.4611, 175, 3), (1, 3, 1, 0.0546, 0.2112, 0.0572, 175, 55),
    (1, 5, 1, 0.0218, 0.0845, 0.0229, 175, 22), (1, 8, 0, None, 0.1344, None, 175, 35),
    (2, 4, 1, 0.0328, 0.1267, 0.0343, 175, 33), (2, 6, 1, 0.0497, 0.1920, 0.0520, 175, 50),
    (2, 8, 0, None, 0.1267, None, 175, 33), (3, 9, 1, 0.0308, 0.1190, 0.0322, 175, 31),
    (3, 24, 1, 0.0023, 0.0839, 0.0, 400, 50), (4, 9, 1, 0.0268, 0.1037, 0.0281, 175, 27),
    (5, 10, 1, 0.0228, 0.0883, 0.0239, 175, 23), (6, 7, 0, None, 0.1950, None, 175, 50),
    (6, 10, 1, 0.0139, 0.0605, 2.4590, 175, 16), (7, 8, 1, 0.0159, 0.0614, 0.0166, 175, 16),
    (8, 9, 1, 0.0427, 0.1651, 0.0447, 175, 43), (8, 10, 1, 0.0427, 0.1651, 0.0447, 175, 43),
    (9, 11, 1, 0.0023, 0.0839, 0.0, 400, 50), (9, 12, 1, 0.0023, 0.0839, 0.0, 400, 50),
    (10, 11, 1, 0.0023, 0.0839, 0.0, 400, 50), (10, 12, 1, 0.0023, 0.0839, 0.0, 400, 50),
    (11, 13, 1, 0.0061, 0.0476, 0.0999, 500, 66), (11, 14, 1, 0.0054, 0.0418, 0.0879, 500, 58),
    (12, 13, 1, 0.0061, 0.0476, 0.0999, 500, 66), (12, 23, 1, 0.0124, 0.0966, 0.2030, 500, 134),
    (13, 14, 0, None, 0.0447, None, 500, 62), (13, 23, 1, 0.0111, 0.0865, 0.1818, 500, 120),
    (14, 16, 1, 0.0050, 0.0389, 0.0818, 500, 54), (14, 23, 0, None, 0.0620, None, 500, 86),
    (15, 16, 1, 0.0022, 0.0173, 0.0364, 500, 24), (15, 21, 2, 0.0063, 0.0490, 0.1030, 500, 68),
    (15, 24, 1, 0.0067, 0.0519, 0.1091, 500, 72), (16, 17, 1, 0.0033, 0.0259, 0.0545, 500, 36),
    (16, 19, 1, 0.0030, 0.0231, 0.0485, 500, 32), (16, 23, 0, None, 0.0822, None, 500, 114),
    (17, 18, 1, 0.0018, 0.0144, 0.0303, 500, 20), (17, 22, 1, 0.0135, 0.1053, 0.2212, 500, 146),
    (18, 21, 2, 0.0033, 0.0259, 0.0545, 500, 36), (19, 20, 2, 0.0051, 0.0396, 0.0833, 500, 55),
    (19, 23, 0, None, 0.0606, None, 500, 84), (20, 23, 2, 0.0028, 0.0216, 0.0455, 500, 30),
    (21, 22, 1, 0.0087, 0.0678, 0.1424, 500, 94),
]

# r/x and b/x of new rights of way, taken from existing lines of the same voltage class
NEW_LINE_RATIOS = {175: (0.2586, 0.2708), 500: (0.1282, 2.1000)}

REACTIVE_BUSES = (3, 4, 5, 6, 8, 9, 10, 19, 20)

PENALTIES = {"eta": 5.4e3, "kappa_v": 2.2e4, "kappa_flow": 5.4e3, "kappa_qgen": 5.4e3,
             "kappa_pgen": 5.4e3, "kappa_qreac": 5.4e3, "kappa_l": 2.2e4, "infeasible": 1.0e7}


def corridor(n, line):
    f, t, n0, r, x, b, cap, cost = line
    if r is None:
        rx, bx = NEW_LINE_RATIOS[cap]
        r, b = round(rx * x, 6), round(bx * x, 6)
    return {"id": n + 1, "from_bus": f, "to_bus": t, "r": r, "x": x, "b_shunt": b, "rating": cap / 100,
            "circuit_cost": cost, "existing": n0, "max_new": 3}


def case():
    v_set = {g[0]: g[4] for g in GENS}
    buses = [{"id": i, "kind": k, "p_demand": round(SCALE * p / 100, 6), "q_demand": round(SCALE * q / 100, 6),
              "v_setpoint": v_set.get(i, 1.0), "v_min": 0.95, "v_max": 1.05} for i, k, p, q in BUSES]
    gens = [{"bus": b, "p_min": 0.0, "p_max": SCALE * pmax / 100, "q_min": SCALE * qmin / 100,
             "q_max": SCALE * qmax / 100, "participation": 1.0, "p_dispatch": g1 / 100}
            for b, pmax, qmin, qmax, _, g1 in GENS]
    return {
        "schema_version": "tnep-case/1",
        "name": "ieee24",
        "base_mva": 100.0,
        "currency_unit": "1e6 USD",
        "limits": {"v_min": 0.95, "v_max": 1.05, "l_min": 0.0, "l_max": 0.45},
        "buses": buses,
        "generators": gens,
        "corridors": [corridor(n, line) for n, line in enumerate(LINES)],
        "reactive_candidates": [{"bus": b, "fixed_cost": 0.001, "variable_cost": 3.0e-6, "q_max": 5.0}
                                for b in REACTIVE_BUSES],
        "generation_plan": {str(b): g1 / 100 for b, *_, g1 in GENS},
        "penalties": PENALTIES,
    }


if __name__ == "__main__":
    path = OUT / "ieee24.json"
    path.write_text(json.dumps(case(), indent=1) + "\n")
    print(path)
