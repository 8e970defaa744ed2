#!/usr/bin/env python3
"""MILP worker: incremental HiGHS model driven over line-delimited JSON.

Requests (one JSON object per line on stdin):
  {"op": "solve", "cols": {...}, "rows": {...}, "obj": {...}|null,
   "gap_abs": g, "time_limit": t, "warm": [...]|null}
  {"op": "write", "cols": ..., "rows": ..., "obj": ..., "path": "model.lp"}
  {"op": "ping"}
  {"op": "quit"}

Responses mirror one line of JSON per request.
"""
import json
import sys

import numpy as np
from scipy.optimize._highspy import _core as hs


def make_highs():
    h = hs._Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    h.setOptionValue("random_seed", 0)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    h.setOptionValue("mip_rel_gap", 0.0)
    return h


HIGHS = make_highs()
NUM_COLS = 0


def apply_deltas(msg):
    global NUM_COLS
    cols = msg.get("cols") or {}
    if cols.get("lb"):
        lb = np.asarray(cols["lb"], dtype=np.float64)
        ub = np.asarray(cols["ub"], dtype=np.float64)
        obj = np.asarray(cols["obj"], dtype=np.float64)
        n = len(lb)
        empty_i = np.array([], dtype=np.int32)
        HIGHS.addCols(n, obj, lb, ub, 0, empty_i, empty_i,
                      np.array([], dtype=np.float64))
        integ = cols.get("integer") or []
        idx = np.array([NUM_COLS + i for i, f in enumerate(integ) if f],
                       dtype=np.int32)
        if len(idx):
            HIGHS.changeColsIntegrality(
                len(idx), idx, np.full(len(idx), 1, dtype=np.uint8))
        NUM_COLS += n
    rows = msg.get("rows") or {}
    if rows.get("lower"):
        lower = np.asarray(rows["lower"], dtype=np.float64)
        upper = np.asarray(rows["upper"], dtype=np.float64)
        # +-1e30 is the pipe's infinity sentinel (== kHighsInf)
        lower = np.where(lower <= -1e30, -hs.kHighsInf, lower)
        upper = np.where(upper >= 1e30, hs.kHighsInf, upper)
        starts = np.asarray(rows["starts"], dtype=np.int32)
        index = np.asarray(rows["index"], dtype=np.int32)
        value = np.asarray(rows["value"], dtype=np.float64)
        HIGHS.addRows(len(lower), lower, upper, len(index), starts, index,
                      value)
    obj = msg.get("obj")
    if obj is not None:
        idx = np.asarray(obj["index"], dtype=np.int32)
        val = np.asarray(obj["value"], dtype=np.float64)
        if len(idx):
            HIGHS.changeColsCost(len(idx), idx, val)
        HIGHS.changeObjectiveOffset(float(obj.get("offset", 0.0)))


def solve(msg):
    apply_deltas(msg)
    HIGHS.setOptionValue("mip_abs_gap", float(msg.get("gap_abs", 0.0)))
    HIGHS.setOptionValue("time_limit", max(0.01, float(msg.get("time_limit", 1e7))))
    warm = msg.get("warm")
    if warm and len(warm) == NUM_COLS:
        sol = hs.HighsSolution()
        sol.col_value = [float(v) for v in warm]
        HIGHS.setSolution(sol)
    HIGHS.run()
    status = HIGHS.getModelStatus()
    out = {"status": "error", "msg": str(status)}
    S = hs.HighsModelStatus
    if status == S.kModelEmpty:
        off = HIGHS.getLp().offset_ if hasattr(HIGHS.getLp(), "offset_") else 0.0
        return {"status": "optimal", "objective": float(off), "bound": float(off),
                "values": []}
    info = HIGHS.getInfo()
    has_sol = info.primal_solution_status == hs.kSolutionStatusFeasible
    if status == S.kOptimal or (status == S.kObjectiveBound and has_sol):
        out = {"status": "optimal"}
    elif status == S.kInfeasible:
        return {"status": "infeasible"}
    elif status == S.kTimeLimit:
        out = {"status": "timelimit"}
    elif status == S.kUnboundedOrInfeasible or status == S.kUnbounded:
        return {"status": "error", "msg": "model unbounded"}
    else:
        return out
    if has_sol:
        out["objective"] = float(HIGHS.getObjectiveValue())
        out["bound"] = float(info.mip_dual_bound)
        out["values"] = list(HIGHS.getSolution().col_value)
    else:
        out["values"] = None
    return out


def main():
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
            op = msg.get("op")
            if op == "quit":
                print(json.dumps({"status": "bye"}), flush=True)
                return
            if op == "ping":
                resp = {"status": "ok", "highs": "%d.%d.%d" % (
                    hs.HIGHS_VERSION_MAJOR, hs.HIGHS_VERSION_MINOR,
                    hs.HIGHS_VERSION_PATCH)}
            elif op == "solve":
                resp = solve(msg)
            elif op == "write":
                apply_deltas(msg)
                HIGHS.writeModel(msg["path"])
                resp = {"status": "ok"}
            else:
                resp = {"status": "error", "msg": "unknown op %r" % op}
        except Exception as exc:  # report, never die mid-protocol
            resp = {"status": "error", "msg": "%s: %s" % (type(exc).__name__, exc)}
        print(json.dumps(resp), flush=True)


if __name__ == "__main__":
    main()
