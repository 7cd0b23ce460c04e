"""Writes data/garver6.json and data/garver6_dynamic.json.

Line data: Garver (1970) as used by Romero et al. (2002); resistance is one
tenth of the reactance and there is no line charging. Currency: 10^3 US$.
"""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parents[2] / "data"

# from, to, existing, x, rating (MW), cost
LINES = [
    (1, 2, 1, 0.40, 100, 40), (1, 3, 0, 0.38, 100, 38), (1, 4, 1, 0.60, 80, 60),
    (1, 5, 1, 0.20, 100, 20), (1, 6, 0, 0.68, 70, 68), (2, 3, 1, 0.20, 100, 20),
    (2, 4, 1, 0.40, 100, 40), (2, 5, 0, 0.31, 100, 31), (2, 6, 0, 0.30, 100, 30),
    (3, 4, 0, 0.59, 82, 59), (3, 5, 1, 0.20, 100, 20), (3, 6, 0, 0.48, 100, 48),
    (4, 5, 0, 0.63, 75, 63), (4, 6, 0, 0.30, 100, 30), (5, 6, 0, 0.61, 78, 61),
]

# id, kind, P (MW), Q (MVAr)
BUSES = [(1, "slack", 80, 16), (2, "pq", 240, 48), (3, "pv", 40, 8),
         (4, "pq", 160, 32), (5, "pq", 240, 48), (6, "pv", 0, 0)]

# bus, Pmax, Qmin, Qmax (MW/MVAr), fixed dispatch (MW)
GENS = [(1, 150, -10, 65, 141), (3, 360, -10, 150, 322), (6, 600, -10, 200, 297)]

V_SET = 1.0


def case(greenfield=False, horizon=None, penalties=None):
    buses = [{"id": i, "kind": k, "p_demand": p / 100, "q_demand": q / 100,
              "v_setpoint": V_SET, "v_min": 0.95, "v_max": 1.05} for i, k, p, q in BUSES]
    gens = [{"bus": b, "p_min": 0.0, "p_max": pmax / 100, "q_min": qmin / 100, "q_max": qmax / 100,
             "participation": 1.0, "p_dispatch": pd / 100} for b, pmax, qmin, qmax, pd in GENS]
    corridors = [{"id": n + 1, "from_bus": f, "to_bus": t, "r": round(x / 10, 6), "x": x, "b_shunt": 0.0,
                  "rating": cap / 100, "circuit_cost": cost, "existing": 0 if greenfield else n0,
                  "max_new": 5}
                 for n, (f, t, n0, x, cap, cost) in enumerate(LINES)]
    reactive = [{"bus": b, "fixed_cost": 0.1, "variable_cost": 0.0003, "q_max": 1.0} for b in (2, 4, 5)]
    doc = {
        "schema_version": "tnep-case/1",
        "name": "garver6-dynamic" if horizon else "garver6",
        "base_mva": 100.0,
        "currency_unit": "1e3 USD",
        "limits": {"v_min": 0.95, "v_max": 1.05, "l_min": 0.0, "l_max": 0.45},
        "buses": buses,
        "generators": gens,
        "corridors": corridors,
        "reactive_candidates": reactive,
    }
    if horizon:
        doc["horizon"] = horizon
    if penalties:
        doc["penalties"] = penalties
    return doc


STATIC_PENALTIES = {"eta": 1.1e4, "kappa_v": 4.4e4, "kappa_flow": 1.1e4, "kappa_qgen": 1.1e4,
                    "kappa_pgen": 1.1e4, "kappa_qreac": 1.1e4, "kappa_l": 4.4e4, "infeasible": 1.02e4}

DYNAMIC_HORIZON = {"years": 3, "discount": [1.0, 0.729, 0.478],
                   "load_scale": [1.0, 1.1, 1.2], "gen_scale": [1.0, 1.1, 1.2]}


def write(name, doc):
    path = OUT / name
    path.write_text(json.dumps(doc, indent=1) + "\n")
    print(path)


if __name__ == "__main__":
    write("garver6.json", case(penalties=STATIC_PENALTIES))
    write("garver6_dynamic.json", case(greenfield=True, horizon=DYNAMIC_HORIZON, penalties=STATIC_PENALTIES))
