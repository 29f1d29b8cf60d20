#!/usr/bin/env python3
"""End-to-end tests for the cgn command-line tool.

Usage: cli_test.py /path/to/cgn
Exits nonzero on the first failed check.
"""
import json
import math
import subprocess
import sys
import tempfile
from pathlib import Path

CGN = sys.argv[1]

SQRT2_FILE = {
    "map": {"n": 1, "m": 1,
            "components": [[{"coeff": 1.0, "powers": [2]},
                            {"coeff": -2.0, "powers": [0]}]]},
    "outer": {"kind": "max_affine", "A": [[1.0], [-1.0]], "b": [0.0, 0.0]},
    "x0": [1.5],
    "delta": "inf",
    "eta": 1.0,
    "regularity": {"kind": "regular_point", "radius": 0.5, "beta": 0.5},
    "majorant": {"kind": "lipschitz", "K": 2.0, "R": 0.5},
}

INFEASIBLE_FILE = {
    "map": {"n": 1, "m": 1,
            "components": [[{"coeff": 1.0, "powers": [2]},
                            {"coeff": 1.0, "powers": [0]}]]},
    "outer": {"kind": "max_affine", "A": [[1.0], [-1.0]], "b": [0.0, 0.0]},
    "x0": [1.5],
    "delta": "inf",
    "eta": 1.0,
    "regularity": {"kind": "regular_point", "radius": 1.0, "beta": 0.5},
    "majorant": {"kind": "lipschitz", "K": 2.0, "R": 1.0},
}

checks = 0


def run(*args, stdin=None):
    return subprocess.run([CGN, *args], capture_output=True, text=True,
                          input=stdin, timeout=60)


def expect(cond, label, detail=""):
    global checks
    checks += 1
    if not cond:
        print(f"FAIL: {label}\n{detail}", file=sys.stderr)
        sys.exit(1)


def write_json(tmp: Path, name: str, doc) -> str:
    path = tmp / name
    path.write_text(json.dumps(doc))
    return str(path)


def main():
    tmp = Path(tempfile.mkdtemp(prefix="cgn-cli-"))

    # --- certify -----------------------------------------------------------
    r1 = run("certify", "--demo", "sqrt2")
    expect(r1.returncode == 0, "certify sqrt2 exits 0", r1.stderr)
    cert = json.loads(r1.stdout)
    expect(cert["valid"] is True, "sqrt2 certificate valid")
    expect(math.isclose(cert["t_star"], (9 - 3 * math.sqrt(7)) / 8,
                        rel_tol=0, abs_tol=1e-9), "sqrt2 t_star closed form")
    expect(cert["rate"] == "quadratic", "sqrt2 rate")
    expect([c["name"] for c in cert["checks"]][:2] == ["d(F(x0),C)>0", "xi>0"],
           "check names present")

    r2 = run("certify", "--demo", "sqrt2")
    expect(r1.stdout == r2.stdout, "certify output is byte-deterministic")

    sqrt2_path = write_json(tmp, "sqrt2.json", SQRT2_FILE)
    r = run("certify", sqrt2_path)
    expect(r.returncode == 0, "certify from file exits 0", r.stderr)
    expect(json.loads(r.stdout)["t_star"] == cert["t_star"],
           "file and demo agree")

    xi0 = dict(SQRT2_FILE, overrides={"xi": 0.0})
    r = run("certify", write_json(tmp, "xi0.json", xi0))
    expect(r.returncode == 1, "xi = 0 exits 1 (hypothesis failure)", r.stdout)
    doc = json.loads(r.stdout)
    expect(doc["valid"] is False, "xi = 0 certificate invalid")
    holds = {c["name"]: c["holds"] for c in doc["checks"]}
    expect(holds["xi>0"] is False, "xi>0 check is false")

    bad = tmp / "bad.json"
    bad.write_text("{nope")
    expect(run("certify", str(bad)).returncode == 2, "malformed JSON exits 2")
    expect(run("certify", str(tmp / "missing.json")).returncode == 2,
           "missing file exits 2")
    expect(run("certify", "--demo", "nope").returncode == 2,
           "unknown demo exits 2")
    expect(run("certify").returncode == 2, "certify without input exits 2")

    # --- solve -------------------------------------------------------------
    trace_path = tmp / "trace.csv"
    r = run("solve", "--demo", "sqrt2", "--verify", "--trace", str(trace_path))
    expect(r.returncode == 0, "solve sqrt2 exits 0", r.stderr)
    expect("stop: Feasible" in r.stdout, "solve reports Feasible", r.stdout)
    expect("iterations: 3" in r.stdout, "solve reports 3 iterations", r.stdout)
    expect("certificate: valid" in r.stdout, "solve --verify shows certificate")
    expect("majorization: all k pass" in r.stdout,
           "solve --verify majorization line", r.stdout)
    lines = trace_path.read_text().splitlines()
    expect(lines[0] == "k,x0,step_norm,dist,h,t,dt,bd1_ok,bd2_ok",
           "trace header", lines[0])
    expect(len(lines) == 5, "trace has 4 data rows", str(lines))
    expect(lines[1].startswith("0,1.5,"), "trace row 0", lines[1])
    expect(lines[1].split(",")[7] == "1", "bd1 recorded in trace", lines[1])

    r = run("solve", sqrt2_path)
    expect(r.returncode == 0 and "stop: Feasible" in r.stdout,
           "solve from file", r.stdout)

    r = run("solve", write_json(tmp, "nofeas.json", INFEASIBLE_FILE),
            "--max-iter", "25")
    expect(r.returncode == 4, "infeasible instance exits 4", r.stdout)
    expect("stop: MaxIter" in r.stdout, "MaxIter reported")
    expect("plateau:" in r.stdout, "plateau diagnostics printed", r.stdout)

    r = run("solve", "--demo", "sqrt2", "--max-iter", "1")
    expect(r.returncode == 4, "exhausted budget exits 4", r.stdout)

    # Verification still runs on an invalid certificate (informational).
    r = run("solve", write_json(tmp, "xi0b.json", xi0), "--verify")
    expect(r.returncode == 0, "invalid certificate does not break solve",
           r.stdout + r.stderr)
    expect("certificate: invalid" in r.stdout, "invalid certificate reported")
    expect("majorization: unavailable" in r.stdout,
           "xi = 0 has no scalar sequence", r.stdout)

    # --- scalar ------------------------------------------------------------
    r = run("scalar", "--lipschitz", "1", "--xi", "0.25", "--alpha", "1")
    expect(r.returncode == 0, "scalar exits 0", r.stderr)
    expect("0.2928932188134524" in r.stdout, "scalar t* value", r.stdout)
    header = r.stdout.splitlines()[1].split()
    expect(header == ["k", "t_k", "t*-t_k", "gap", "ratio"],
           "scalar table columns", r.stdout)

    r = run("scalar", "--lipschitz", "1", "--xi", "0.5")
    expect(r.returncode == 0, "boundary scalar exits 0", r.stderr)
    ratios = [line.split()[-1] for line in r.stdout.splitlines()[3:8]]
    expect(all(v == "0.5" for v in ratios), "boundary gap ratios are 0.5",
           str(ratios))
    expect("linear rate" in r.stdout, "boundary is linear-only", r.stdout)

    r = run("scalar", "--lipschitz", "1", "--xi", "0.6")
    expect(r.returncode == 1, "h3 failure exits 1", r.stdout)
    expect("discriminant" in r.stderr, "violated discriminant printed", r.stderr)

    r = run("scalar", "--smale", "1", "--xi", "0.01", "--alpha", "1")
    expect(r.returncode == 0, "smale scalar works", r.stderr)
    r = run("scalar", "--custom", "cubic", "--xi", "0.1", "--R", "2")
    expect(r.returncode == 0, "catalog scalar works", r.stderr)

    expect(run("scalar", "--xi", "0.25").returncode == 2,
           "scalar without a model exits 2")
    r = run("scalar", "--lipschitz", "1", "--smale", "1", "--xi", "0.25")
    expect(r.returncode == 2, "two models exit 2", r.stdout)

    # --- demo --------------------------------------------------------------
    for name in ("sqrt2", "orthant", "minimax"):
        r = run("demo", name)
        expect(r.returncode == 0, f"demo {name} exits 0", r.stderr)
        doc = json.loads(r.stdout)
        expect(set(doc) >= {"map", "outer", "x0", "delta", "eta",
                            "regularity", "majorant"},
               f"demo {name} sections")
        # Round-trip: the emitted problem file certifies cleanly.
        path = write_json(tmp, f"demo_{name}.json", doc)
        expect(run("certify", path).returncode == 0,
               f"demo {name} JSON re-certifies")
        rr = run("solve", path, "--verify")
        expect(rr.returncode == 0 and "majorization: all k pass" in rr.stdout,
               f"demo {name} JSON solves and verifies", rr.stdout)
    expect(run("demo", "nope").returncode == 2, "unknown demo name exits 2")
    expect(run("demo").returncode == 2, "demo without a name exits 2")

    # --- top level ---------------------------------------------------------
    expect(run().returncode == 2, "no subcommand exits 2")
    expect(run("--help").returncode == 0, "--help exits 0")
    expect(run("frobnicate").returncode == 2, "unknown subcommand exits 2")

    print(f"cli: all {checks} checks passed")


if __name__ == "__main__":
    main()
