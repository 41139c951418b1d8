#!/usr/bin/env python3
# Copyright 2026 The freqalloc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Solver wrapper: reads an LP file, solves it with HiGHS through SciPy and
writes the JSON solution format read by freqalloc.

    milp_scipy.py MODEL.lp SOLUTION.json [--time SECONDS]

Only the LP subset written by freqalloc is understood: one objective,
labelled rows, "lo <= x <= hi" bounds and a Binary section.
"""

import argparse
import json
import math
import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, linprog, milp
from scipy.sparse import csr_matrix

SECTIONS = {
    "maximize": "max",
    "maximum": "max",
    "max": "max",
    "minimize": "min",
    "minimum": "min",
    "min": "min",
    "subject to": "rows",
    "such that": "rows",
    "st": "rows",
    "s.t.": "rows",
    "bounds": "bounds",
    "binary": "binary",
    "binaries": "binary",
    "bin": "binary",
    "general": "general",
    "generals": "general",
    "end": "end",
}

NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$|^[+-]?inf(inity)?$", re.I)


class LpError(Exception):
    pass


def is_number(tok):
    return bool(NUMBER.match(tok))


def to_float(tok):
    low = tok.lower().lstrip("+")
    if low in ("inf", "infinity"):
        return math.inf
    if low in ("-inf", "-infinity"):
        return -math.inf
    return float(tok)


class Model:
    def __init__(self):
        self.names = []
        self.index = {}
        self.sense = "max"
        self.objective = {}
        self.rows = []  # (name, {var: coef}, op, rhs)
        self.lower = {}
        self.upper = {}
        self.integer = set()

    def var(self, name):
        if name not in self.index:
            self.index[name] = len(self.names)
            self.names.append(name)
        return self.index[name]


def parse_linear(tokens):
    """Parses '[+|-] [coef] var ...' into {var: coef}."""
    terms = {}
    sign = 1.0
    coef = None
    for tok in tokens:
        if tok in ("+", "-"):
            sign = 1.0 if tok == "+" else -1.0
            continue
        if is_number(tok):
            coef = to_float(tok) if coef is None else coef * to_float(tok)
            continue
        value = sign * (1.0 if coef is None else coef)
        terms[tok] = terms.get(tok, 0.0) + value
        sign, coef = 1.0, None
    if coef is not None:
        # "0 x" style empty objective leaves no dangling number; anything else is a constant.
        raise LpError("constant term in a linear expression")
    return terms


def split_ops(line):
    return re.sub(r"(<=|>=|=<|=>|<|>|=)", r" \1 ", line).split()


def parse_lp(text):
    m = Model()
    section = None
    pending = []

    def flush_objective():
        toks = pending[:]
        if toks and toks[0].endswith(":"):
            toks = toks[1:]
        for name, coef in parse_linear(toks).items():
            m.var(name)
            m.objective[name] = m.objective.get(name, 0.0) + coef

    def flush_row():
        toks = pending[:]
        if not toks:
            return
        name = None
        if toks[0].endswith(":"):
            name, toks = toks[0][:-1], toks[1:]
        ops = [i for i, t in enumerate(toks) if t in ("<=", ">=", "=<", "=>", "=", "<", ">")]
        if len(ops) != 1 or ops[0] != len(toks) - 2:
            raise LpError("cannot parse row %r" % " ".join(pending))
        op = toks[ops[0]]
        op = {"=<": "<=", "<": "<=", "=>": ">=", ">": ">="}.get(op, op)
        terms = parse_linear(toks[: ops[0]])
        for v in terms:
            m.var(v)
        m.rows.append((name or "r%d" % len(m.rows), terms, op, to_float(toks[-1])))

    def row_complete(toks):
        ops = [i for i, t in enumerate(toks) if t in ("<=", ">=", "=<", "=>", "=", "<", ">")]
        return bool(ops) and ops[-1] == len(toks) - 2

    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in SECTIONS:
            if section in ("max", "min"):
                flush_objective()
            pending = []
            section = SECTIONS[key]
            if section in ("max", "min"):
                m.sense = section
            if section == "end":
                break
            continue
        toks = split_ops(line)
        if section in ("max", "min"):
            pending.extend(toks)
        elif section == "rows":
            pending.extend(toks)
            if row_complete(pending):
                flush_row()
                pending = []
        elif section == "bounds":
            parse_bound(m, toks)
        elif section in ("binary", "general"):
            for name in toks:
                m.var(name)
                m.integer.add(name)
                if section == "binary":
                    m.lower[name] = max(m.lower.get(name, 0.0), 0.0)
                    m.upper[name] = min(m.upper.get(name, 1.0), 1.0)
        else:
            raise LpError("text outside any section: %r" % line)
    if pending:
        raise LpError("unterminated row")
    return m


def parse_bound(m, toks):
    if len(toks) == 2 and toks[1].lower() == "free":
        m.var(toks[0])
        m.lower[toks[0]] = -math.inf
        m.upper[toks[0]] = math.inf
    elif len(toks) == 5 and toks[1] == "<=" and toks[3] == "<=":
        m.var(toks[2])
        m.lower[toks[2]] = to_float(toks[0])
        m.upper[toks[2]] = to_float(toks[4])
    elif len(toks) == 3 and toks[1] in ("<=", ">=", "="):
        a, op, b = toks
        name, value, op = (a, to_float(b), op) if not is_number(a) else (b, to_float(a), {"<=": ">=", ">=": "<=", "=": "="}[op])
        m.var(name)
        if op in ("<=", "="):
            m.upper[name] = value
        if op in (">=", "="):
            m.lower[name] = value
    else:
        raise LpError("cannot parse bound %r" % " ".join(toks))


def arrays(m):
    n = len(m.names)
    c = np.zeros(n)
    for name, coef in m.objective.items():
        c[m.index[name]] = coef
    if m.sense == "max":
        c = -c
    lo = np.array([m.lower.get(v, 0.0) for v in m.names])
    hi = np.array([m.upper.get(v, math.inf) for v in m.names])
    rows, cols, vals = [], [], []
    rlo, rhi = [], []
    for r, (_, terms, op, rhs) in enumerate(m.rows):
        for name, coef in terms.items():
            rows.append(r)
            cols.append(m.index[name])
            vals.append(coef)
        rlo.append(rhs if op in (">=", "=") else -math.inf)
        rhi.append(rhs if op in ("<=", "=") else math.inf)
    a = csr_matrix((vals, (rows, cols)), shape=(len(m.rows), n))
    integrality = np.array([1 if v in m.integer else 0 for v in m.names])
    return c, lo, hi, a, np.array(rlo), np.array(rhi), integrality


def polish(c, lo, hi, a, rlo, rhi, integrality, x):
    """Fixes integers at their rounded values and re-solves the LP tightly."""
    lo = lo.copy()
    hi = hi.copy()
    fixed = np.round(x)
    mask = integrality == 1
    lo[mask] = fixed[mask]
    hi[mask] = fixed[mask]
    ub_rows = np.isfinite(rhi)
    lb_rows = np.isfinite(rlo)
    a_ub = None
    b_ub = None
    if a.shape[0] > 0:
        parts, rhs = [], []
        if ub_rows.any():
            parts.append(a[ub_rows])
            rhs.append(rhi[ub_rows])
        if lb_rows.any():
            parts.append(-a[lb_rows])
            rhs.append(-rlo[lb_rows])
        if parts:
            from scipy.sparse import vstack

            a_ub = vstack(parts).tocsr()
            b_ub = np.concatenate(rhs)
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=list(zip(lo, hi)),
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status == 0:
        out = res.x.copy()
        out[mask] = fixed[mask]
        return out
    return None


def solve(m, time_limit):
    c, lo, hi, a, rlo, rhi, integrality = arrays(m)
    n = len(m.names)
    if n == 0:
        return "optimal", {}, 0.0
    constraints = [LinearConstraint(a, rlo, rhi)] if a.shape[0] > 0 else []
    options = {"disp": False, "mip_rel_gap": 0.0}
    if time_limit is not None:
        options["time_limit"] = float(time_limit)
    res = milp(c, constraints=constraints, integrality=integrality, bounds=Bounds(lo, hi), options=options)
    if res.status == 2:
        return "infeasible", None, None
    if res.x is None:
        if res.status == 1:
            return "timeout", None, None
        raise RuntimeError("HiGHS failed: %s" % res.message)
    x = res.x
    polished = polish(c, lo, hi, a, rlo, rhi, integrality, x)
    if polished is not None:
        x = polished
    status = "optimal" if res.status == 0 else "timeout"
    values = {name: float(x[i]) for i, name in enumerate(m.names)}
    sign = -1.0 if m.sense == "max" else 1.0
    objective = sign * float(np.dot(c, x))
    return status, values, objective


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("lp")
    ap.add_argument("out")
    ap.add_argument("--time", type=float, default=None, help="time limit in seconds")
    args = ap.parse_args(argv)
    with open(args.lp) as f:
        text = f.read()
    try:
        model = parse_lp(text)
    except LpError as e:
        print("milp_scipy: %s" % e, file=sys.stderr)
        return 2
    status, values, objective = solve(model, args.time)
    doc = {"status": status}
    if values is not None:
        doc["values"] = values
        doc["objective"] = objective
    with open(args.out, "w") as f:
        json.dump(doc, f, indent=1, sort_keys=True)
        f.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
