"""Solve an LP file written by `fdgtool lp --export` and print one JSON line.

usage: external_check.py <file.lp> [ipm|simplex]

Uses highspy when it is installed and otherwise parses the file itself and
hands it to scipy's HiGHS wrapper. The reported tolerance is the optimality
tolerance of the chosen method scaled by the objective magnitude.
"""

import json
import re
import sys
import time

IPM_TOL = 1e-8
SIMPLEX_TOL = 1e-7


def with_highspy(path, method):
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("solver", method)
    if h.readModel(path) != highspy.HighsStatus.kOk:
        sys.exit(f"cannot read {path}")
    h.run()
    return h.modelStatusToString(h.getModelStatus()), h.getInfo().objective_function_value


def parse_terms(tokens):
    terms, sign, coef = {}, 1.0, 1.0
    for t in tokens:
        if t in "+-":
            sign = -1.0 if t == "-" else 1.0
        elif t.startswith("h_"):
            terms[t] = terms.get(t, 0.0) + sign * coef
            sign, coef = 1.0, 1.0
        else:
            coef = float(t)
    return terms


def read_lp(path):
    text = open(path).read()
    head, rest = text.split("\nSubject To\n")
    body, bounds = rest.split("\nBounds\n")
    objective = parse_terms(head.split("obj:")[1].split())
    rows = []
    for m in re.finditer(r"^ \S+:(.*?) (<=|>=|=) (\S+)$", body, re.M | re.S):
        rows.append((parse_terms(m.group(1).split()), m.group(2), float(m.group(3))))
    columns = re.findall(r"^ (h_\w+) >= 0$", bounds, re.M)
    return objective, rows, columns


def with_scipy(path, method):
    from scipy.optimize import linprog
    from scipy.sparse import coo_matrix

    objective, rows, columns = read_lp(path)
    index = {c: i for i, c in enumerate(columns)}
    c = [-objective.get(col, 0.0) for col in columns]
    groups = {"ub": ([], [], [], []), "eq": ([], [], [], [])}
    for terms, sense, rhs in rows:
        key, flip = ("eq", 1.0) if sense == "=" else ("ub", -1.0 if sense == ">=" else 1.0)
        r, cols, vals, b = groups[key]
        k = len(b)
        for name, v in terms.items():
            r.append(k)
            cols.append(index[name])
            vals.append(flip * v)
        b.append(flip * rhs)

    def matrix(key):
        r, cols, vals, b = groups[key]
        if not b:
            return None, None
        return coo_matrix((vals, (r, cols)), shape=(len(b), len(columns))).tocsr(), b

    a_ub, b_ub = matrix("ub")
    a_eq, b_eq = matrix("eq")
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=(0, None),
                  method="highs-ipm" if method == "ipm" else "highs-ds")
    return ("Optimal" if res.status == 0 else res.message), (-res.fun if res.status == 0 else None)


def main():
    path = sys.argv[1]
    method = sys.argv[2] if len(sys.argv) > 2 else "ipm"
    start = time.time()
    try:
        status, value = with_highspy(path, method)
        backend = "highspy"
    except ImportError:
        status, value = with_scipy(path, method)
        backend = "scipy"
    tol = IPM_TOL if method == "ipm" else SIMPLEX_TOL
    print(json.dumps({
        "status": status,
        "value": value,
        "tolerance": tol * (1.0 + abs(value or 0.0)),
        "method": method,
        "backend": backend,
        "seconds": round(time.time() - start, 2),
    }))


if __name__ == "__main__":
    main()
