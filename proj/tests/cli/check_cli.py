"""End-to-end checks of the srlab command line. Usage: check_cli.py <srlab> <repo> <case>"""
import json
import os
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

EXE, REPO, CASE = sys.argv[1], pathlib.Path(sys.argv[2]), sys.argv[3]
SCHEMA = json.loads((REPO / "schema" / "run_report.schema.json").read_text())
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)
TMP = pathlib.Path(tempfile.mkdtemp(prefix="srlab-cli-"))

SMALL = """name = small
model = "chf(1)"
domain = hemisphere
seed = 77
checks = [santalo, lambda1, hardy]
santalo_functions = [one, grad_sq]
santalo_samples = 1500
lambda1_samples = 300
hardy_samples = 1500
"""


def run(*args, env=None):
    e = dict(os.environ)
    e.pop("SRLAB_OUT_DIR", None)
    e.update(env or {})
    return subprocess.run([EXE, *map(str, args)], capture_output=True, text=True, env=e)


def expect(cond, msg, proc=None):
    if not cond:
        if proc is not None:
            msg += f"\nrc={proc.returncode}\nstdout:\n{proc.stdout}\nstderr:\n{proc.stderr}"
        raise SystemExit("FAILED: " + msg)


def validate(path):
    report = json.loads(pathlib.Path(path).read_text())
    errors = sorted(VALIDATOR.iter_errors(report), key=lambda e: list(e.path))
    expect(not errors, f"{path} violates the schema: " + "; ".join(e.message for e in errors[:5]))
    return report


def write(name, text):
    p = TMP / name
    p.write_text(text)
    return p


def golden(name):
    cfg = REPO / "scenarios" / f"{name}.cfg"
    out = TMP / "out"
    p = run("run", cfg, "--out", out, "--compare", REPO / "scenarios" / f"{name}.expected.json")
    expect(p.returncode == 0, f"golden {name}", p)
    validate(out / f"{name}.json")


def determinism():
    cfg = write("small.cfg", SMALL)
    a, b, c = TMP / "a", TMP / "b", TMP / "c"
    p = run("run", cfg, "--out", a)
    expect(p.returncode == 0, "first run", p)
    p = run("run", cfg, "--out", b, "--compare", a / "small.json")
    expect(p.returncode == 0 and "identical" in p.stdout, "rerun is identical", p)
    p = run("run", cfg, "--out", c, "--serial", "--compare", a / "small.json")
    expect(p.returncode == 0 and "identical" in p.stdout, "serial matches parallel", p)
    ra, rb = (json.loads((d / "small.json").read_text()) for d in (a, b))
    ra.pop("run_info"), rb.pop("run_info")
    expect(json.dumps(ra) == json.dumps(rb), "byte-identical without run_info")
    p = run("run", cfg, "--out", TMP / "d", "--seed", 78, "--compare", a / "small.json")
    expect(p.returncode == 1 and "DIFFERENT" in p.stdout, "another seed changes the values", p)


def empty_checks():
    cfg = write("empty.cfg", 'name = empty\nmodel = "heisenberg(1)"\nseed = 1\nchecks = []\n')
    p = run("run", cfg, env={"SRLAB_OUT_DIR": str(TMP / "env")})
    expect(p.returncode == 0, "empty check list", p)
    r = validate(TMP / "env" / "empty.json")
    expect(r["checks"] == [] and r["summary"]["pass"] is True, "zero checks reported")


def config_errors():
    cases = {
        "unknown key": ("name = e\nmodel = martinet\nseed = 1\nchecks = []\nbogus = 1\n", ":5:"),
        "bad number": ("name = e\nmodel = martinet\nseed = 1\nchecks = [santalo]\ndomain = box\n"
                       "box_lo = [0, 0.5, 0]\nbox_hi = [1, 1, 1]\nsantalo_samples = many\n", ":8:"),
        "unknown check": ("name = e\nmodel = martinet\nseed = 1\nchecks = [santalo, nope]\n", ":4:"),
        "missing seed": ("name = e\nmodel = martinet\nchecks = []\n", "seed"),
        "unknown model": ("name = e\nmodel = \"torus(2)\"\nseed = 1\nchecks = []\n", "torus"),
        "domain mismatch": ("name = e\nmodel = martinet\ndomain = hemisphere\nseed = 1\nchecks = []\n", "sphere"),
        "syntax": ("name = e\nmodel martinet\nseed = 1\n", ":2"),
    }
    for label, (text, needle) in cases.items():
        p = run("run", write("bad.cfg", text), "--out", TMP / "bad")
        expect(p.returncode == 2, f"{label}: exit code 2", p)
        expect(needle in p.stderr, f"{label}: diagnostic mentions {needle!r}", p)
    p = run("run", TMP / "missing.cfg")
    expect(p.returncode == 2, "missing file", p)


def check_failure():
    text = (REPO / "scenarios" / "spherical-band.cfg").read_text()
    text = text.replace("expect_reduction = false", "expect_reduction = true")
    p = run("run", write("band.cfg", text), "--out", TMP / "fail")
    expect(p.returncode == 1, "failing check gives exit 1", p)
    r = validate(TMP / "fail" / "spherical-band.json")
    expect(r["summary"]["pass"] is False, "report still written with pass = false")


def numeric_error():
    text = ("name = budget\nmodel = martinet\ndomain = box\nbox_lo = [-0.5, 0.5, -0.5]\nbox_hi = [0.5, 1.5, 0.5]\n"
            "seed = 3\nchecks = [santalo, radii]\nsantalo_samples = 300\nflow_max_steps = 3\n")
    p = run("run", write("budget.cfg", text), "--out", TMP / "num")
    expect(p.returncode == 3, "step budget gives exit 3", p)
    r = validate(TMP / "num" / "budget.json")
    expect("error" in r["checks"][0], "error recorded on the check")


def goldens_guard():
    d = TMP / "gold"
    p = run("emit-goldens", "--list", "--out", d)
    names = p.stdout.split()
    expect(p.returncode == 0 and len(names) == 6, "six bundled scenarios", p)
    expect(not d.exists(), "--list writes nothing")
    p = run("emit-goldens", "--out", d)
    expect(p.returncode == 0 and len(list(d.iterdir())) == 12, "cfg + expected table per scenario", p)
    p = run("emit-goldens", "--out", d)
    expect(p.returncode == 2 and "--force" in p.stderr, "refuses to overwrite", p)
    p = run("emit-goldens", "--out", d, "--force")
    expect(p.returncode == 0, "--force overwrites", p)
    for n in names:
        expect((d / f"{n}.cfg").read_text() == (REPO / "scenarios" / f"{n}.cfg").read_text(),
               f"committed scenarios/{n}.cfg is current")
        t = json.loads((d / f"{n}.expected.json").read_text())
        expect(all("provenance" in e for e in t["expectations"] if "value" in e), f"{n}: provenance tags")


def csv_exports():
    out = TMP / "csv"
    p = run("run", REPO / "scenarios" / "sphere-hemisphere.cfg", "--out", out)
    expect(p.returncode == 0, "sphere run", p)
    rows = (out / "sphere-hemisphere.spectral.csv").read_text().split()
    expect(rows[0] == "nodes,lambda1" and rows[-1].startswith("inf,"), "spectral csv layout")
    rows = (out / "sphere-hemisphere.radii.csv").read_text().split()
    expect(rows[0].endswith("inv_R_p,inv_r_p") and len(rows) == 9, "radii csv layout")


CASES = {f.__name__: f for f in (determinism, empty_checks, config_errors, check_failure, numeric_error,
                                 goldens_guard, csv_exports)}

if CASE.startswith("golden:"):
    golden(CASE.split(":", 1)[1])
else:
    CASES[CASE]()
print("ok", CASE)
