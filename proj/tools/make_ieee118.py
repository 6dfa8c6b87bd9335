#!/usr/bin/env python3
"""Writes data/ieee118/case.json: a best-effort reconstruction of the modified
IEEE 118-bus system with three 500 MW wind farms at buses 17, 66 and 94.

Topology, branch reactances, generator locations, capacities and cost
coefficients come from the MATPOWER case118 (via PYPOWER). Unit commitment
data (minimum output, ramps, minimum on/off times, start-up and no-load
costs), line ratings and the daily load and wind shapes are not in that case
and are filled in by the size-based rules below.

    pip install pypower
    python3 tools/make_ieee118.py data/ieee118/case.json
"""

import json
import sys

from pypower.case118 import case118

T = 24
# Per-unit daily load shape (peak = 1).
LOAD_SHAPE = [0.67, 0.63, 0.60, 0.59, 0.59, 0.60, 0.74, 0.86, 0.95, 0.96, 0.96, 0.95,
              0.95, 0.95, 0.93, 0.94, 0.99, 1.00, 1.00, 0.96, 0.91, 0.83, 0.73, 0.63]
# Day-ahead wind shape in the spirit of a CAISO curve: high at night, low at midday.
WIND_SHAPE = [0.62, 0.65, 0.66, 0.65, 0.63, 0.60, 0.55, 0.48, 0.40, 0.33, 0.28, 0.25,
              0.24, 0.25, 0.28, 0.33, 0.40, 0.47, 0.53, 0.58, 0.61, 0.63, 0.64, 0.63]
WIND_BUSES = [17, 66, 94]
WIND_MW = 500.0
WIND_SCALE = [1.0, 0.9, 0.8]
PEAK_SHARE = 0.75  # peak load over total generating capacity
RATING_MW = 300.0
HEAVY_RATING_MW = 600.0  # branches with x < 0.02 p.u.


def unit_data(pmax):
    if pmax >= 300:
        return dict(min_on=8, min_off=8, ramp=0.3, pmin=0.4)
    if pmax >= 100:
        return dict(min_on=4, min_off=4, ramp=0.5, pmin=0.3)
    return dict(min_on=1, min_off=1, ramp=1.0, pmin=0.2)


def main(path):
    c = case118()
    bus_ids = [int(b[0]) for b in c["bus"]]
    buses = [{"id": str(b), **({"ref": True} if int(row[1]) == 3 else {})} for b, row in zip(bus_ids, c["bus"])]

    lines = []
    for i, br in enumerate(c["branch"]):
        x = br[3]
        lines.append({"id": f"l{i + 1}", "from": str(int(br[0])), "to": str(int(br[1])),
                      "susceptance": round(1.0 / x, 6),
                      "capacity_mw": HEAVY_RATING_MW if x < 0.02 else RATING_MW})

    gens = []
    total = 0.0
    for i, (g, cost) in enumerate(zip(c["gen"], c["gencost"])):
        pmax = float(g[8])
        total += pmax
        u = unit_data(pmax)
        c2, c1 = float(cost[4]), float(cost[5])
        gens.append({"id": f"g{i + 1}", "bus": str(int(g[0])), "pmin_mw": round(u["pmin"] * pmax, 3),
                     "pmax_mw": pmax, "ramp_up_mw": round(u["ramp"] * pmax, 3),
                     "ramp_down_mw": round(u["ramp"] * pmax, 3), "min_on": u["min_on"], "min_off": u["min_off"],
                     "startup_cost": round(2.0 * pmax, 3), "no_load_cost": round(0.5 * pmax, 3),
                     "c2": c2, "c1": c1})

    base_load = sum(float(b[2]) for b in c["bus"])
    scale = PEAK_SHARE * total / base_load
    demand = {}
    for row in c["bus"]:
        if row[2] > 0:
            demand[str(int(row[0]))] = [round(float(row[2]) * scale * s, 3) for s in LOAD_SHAPE]

    wind = []
    for m, (b, k) in enumerate(zip(WIND_BUSES, WIND_SCALE)):
        shifted = WIND_SHAPE[m:] + WIND_SHAPE[:m]
        wind.append({"id": f"w{m + 1}", "bus": str(b), "wmax_mw": WIND_MW,
                     "forecast_mw": [round(WIND_MW * k * s, 3) for s in shifted]})

    doc = {"version": 1, "horizon": T, "buses": buses, "lines": lines, "generators": gens,
           "wind": wind, "demand": demand}
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/ieee118/case.json")
