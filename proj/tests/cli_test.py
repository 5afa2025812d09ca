#!/usr/bin/env python3
"""Drives the czl binary: exit codes, documented outputs, schema validity."""
import json
import os
import subprocess
import sys
import tempfile

import jsonschema

CZL, SCHEMA = sys.argv[1], sys.argv[2]
validator = jsonschema.Draft202012Validator(json.load(open(SCHEMA)))
failures = []


def run(args, want_code, out_file=None):
    proc = subprocess.run([CZL, *args], capture_output=True, text=True)
    label = " ".join(args)
    if proc.returncode != want_code:
        failures.append(f"{label}: exit {proc.returncode}, wanted {want_code}\n{proc.stderr}")
        return None
    text = open(out_file).read() if out_file else proc.stdout
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        failures.append(f"{label}: not JSON ({e})")
        return None
    errors = list(validator.iter_errors(doc))
    if errors:
        failures.append(f"{label}: schema: {errors[0].message}")
    return doc


def expect(cond, what):
    if not cond:
        failures.append(what)


doc = run(["list-cones"], 0)
expect(doc and {c["name"] for c in doc["cones"]} >= {"orthant_1", "lorentz_4", "vinberg", "rank3_quat"}, "list-cones names")

doc = run(["describe", "rank3_quat"], 0)
if doc:
    c = doc["cone"]
    expect(c["m"] == 0, "rank3_quat m")
    expect(c["sigma"] == [[1, 0, 0], [1, 1, 0], [1, 0, 1]], "rank3_quat sigma")
    expect(c["sigma_star"] == [[1, 1, 1], [0, 1, 0], [0, 0, 1]], "rank3_quat sigma_star")
    expect(c["reversal"]["verdict"] == "not equal", "rank3_quat reversal")
    expect(sorted(map(tuple, c["order_sigma"])) == sorted({(a, b, d) for a in (0, 1) for b in (0, 1) for d in (0, 1)}),
           "order_sigma is a permutation")
doc = run(["describe", "vinberg"], 0)
expect(doc and doc["cone"]["m"] == "fails", "vinberg m")
doc = run(["describe", "orthant_3"], 0)
expect(doc and doc["cone"]["m"] == 0 and doc["cone"]["sigma"] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "orthant_3")
run(["describe", "nope"], 2)

doc = run(["check", "lemma-diag", "--r", "3", "--trials", "100", "--seed", "7"], 0)
expect(doc and doc["reports"][0]["details"]["offdiag_residual"] < 1e-10 * 8, "lemma-diag off-diagonal")

doc = run(["check", "fe-completed", "--cone", "orthant_1", "--s", "0.5", "--f", "gaussian"], 0)
if doc:
    r = doc["reports"][0]
    expect(abs(r["lhs"][0][0] - 0.5 ** 0.5) < 1e-8 and abs(r["rhs"][0][0] - 0.5 ** 0.5) < 1e-8, "Tate value")

doc = run(["check", "fe-completed", "--cone", "orthant_1", "--s", "0.3;0.5+2i;0.9", "--f", "hermite:1"], 0)
expect(doc and len(doc["reports"]) == 3, "three points")

for args in (["check", "gamma-identity", "--trials", "200"], ["check", "half-gamma", "--cone", "vinberg"],
             ["check", "multiplier", "--cone", "rank3_quat"], ["check", "det-conjecture", "--cone", "lorentz_4"],
             ["check", "gindikin", "--cone", "lorentz_4"], ["check", "graph"],
             ["check", "fe-distribution", "--cone", "orthant_2", "--f", "hermite:1,0", "--s", "0.4+i,0.7"],
             ["calibrate", "--cone", "orthant_2"]):
    run(args, 0)

# guard violations are structured errors carrying the inequality
doc = run(["check", "fe-completed", "--cone", "orthant_1", "--s", "1.5"], 1)
expect(doc and doc["error"]["type"] == "guard" and "outside (0, 1)" in doc["error"]["inequality"], "strip guard")
doc = run(["check", "fe-completed", "--cone", "lorentz_4", "--s", "auto-strip"], 1)
expect(doc and doc["error"]["type"] == "guard", "divergent Gaussian guard")

# usage errors
run(["check", "bogus"], 2)
run(["check", "fe-raw", "--cone", "orthant_2", "--s", "0.5"], 2)
run(["check", "fe-raw", "--cone", "orthant_1", "--s", "1+"], 2)
run(["check", "fe-raw", "--cone", "orthant_1", "--f", "bump"], 2)
run(["--no-such-flag"], 2)
run([], 2)

with tempfile.TemporaryDirectory() as tmp:
    p3 = os.path.join(tmp, "p3.json")
    json.dump({"vertices": ["a", "b", "c"], "edges": [["a", "b"], ["b", "c"]]}, open(p3, "w"))
    c4 = os.path.join(tmp, "c4.json")
    json.dump({"vertices": 4, "edges": [[0, 1], [1, 2], [2, 3], [3, 0]]}, open(c4, "w"))
    doc = run(["graph", p3], 0)
    expect(doc and doc["structure"]["m"] == 0 and doc["structure"]["dims"] == [[2, 1, 4], [3, 1, 4], [3, 2, 0]], "P3")
    doc = run(["graph", c4], 1)
    expect(doc and doc["error"]["type"] == "not-chordal", "C4 rejected")
    doc = run(["check", "graph", "--graph", c4], 1)
    run(["graph", os.path.join(tmp, "missing.json")], 1)

    cone = os.path.join(tmp, "cone.json")
    json.dump({"name": "mine", "rank": 2, "dims": [[2, 1, 4]], "invariants": "star"}, open(cone, "w"))
    doc = run(["describe", cone], 0)
    expect(doc and doc["cone"]["m"] == 1 and doc["cone"]["p"] == [0, 4], "cone from JSON")

    out = os.path.join(tmp, "report.json")
    run(["check", "det-conjecture", "--cone", "vinberg", "--out", out], 0, out_file=out)
    doc = run(["check", "det-conjecture", "--cone", "vinberg", "--out", "/proc/forbidden/report.json"], 1)
    expect(doc and doc["error"]["type"] == "io", "I/O error is structured")
    doc = run(["suite", "desk", "--out", "/proc/forbidden/report.json"], 1)
    expect(doc and doc["error"]["type"] == "io", "suite I/O error is structured")

if failures:
    print("\n".join(failures))
    sys.exit(1)
print("cli: all checks passed")
