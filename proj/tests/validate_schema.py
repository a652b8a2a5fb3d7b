"""Runs the CLI over the samples and scenarios and validates every JSON
document (inputs, stdout reports, emitted files) against the schema."""

import json
import pathlib
import subprocess
import sys

import jsonschema

cli, schema_path, samples, out = sys.argv[1:5]
samples = pathlib.Path(samples)
out = pathlib.Path(out)
out.mkdir(parents=True, exist_ok=True)
validator = jsonschema.Draft202012Validator(json.loads(pathlib.Path(schema_path).read_text()))

failures = []


def check(doc, label):
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        failures.append(f"{label}: {errors[0].message} at {list(errors[0].path)}")


def run(args, expect, label):
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    if proc.returncode != expect:
        failures.append(f"{label}: exit {proc.returncode}, expected {expect}: {proc.stderr.strip()}")
        return
    if expect == 1:
        return
    check(json.loads(proc.stdout), label)


for path in sorted(samples.glob("*.json")):
    check(json.loads(path.read_text()), path.name)

emit = ["--out", str(out), "--emit", "json,csv,svg"]
runs = [
    (["split", samples / "separated_discs.json", "--certify"], 0),
    (["split", samples / "separated_hull.json"], 0),
    (["split", samples / "mixed_space.json"], 0),
    (["split", samples / "concentric_discs.json"], 2),
    (["split", samples / "three_in_plane.json"], 1),
    (["separability", samples / "sets_separated.json"], 0),
    (["separability", samples / "sets_overlapping.json"], 2),
    (["separability", samples / "mixed_space.json"], 0),
    (["central-sphere", samples / "pentagon.json"], 0),
    (["two-lines", samples / "two_lines_square.json"], 0),
    (["certify", samples / "separated_discs.json"], 0),
    (["scenario", "concentric_discs"], 0),
    (["scenario", "collinear_balls"], 0),
    (["scenario", "pentagon"], 0),
    (["scenario", "pentagon", "--alpha", "0.05"], 0),
    (["scenario", "three_caps"], 0),
    (["scenario", "random_separated", "--seed", "3", "--dim", "2"], 0),
    (["scenario", "random_separated", "--seed", "3"], 0),
]
for args, expect in runs:
    args = [str(a) for a in args]
    run(args + emit, expect, " ".join(args))

emitted = sorted(out.glob("*.json"))
for path in emitted:
    check(json.loads(path.read_text()), f"emitted {path.name}")
for path in sorted(out.glob("*.svg")):
    text = path.read_text()
    if not text.startswith("<svg") or "</svg>" not in text:
        failures.append(f"emitted {path.name}: not an SVG document")

for f in failures:
    print("FAIL", f)
print(f"{len(runs)} runs, {len(emitted)} emitted documents, {len(failures)} failures")
sys.exit(1 if failures else 0)
