"""Validate shipped scenarios and CLI output against schema/ with jsonschema."""

import csv
import io
import json
import pathlib
import subprocess
import sys

import jsonschema

source = pathlib.Path(sys.argv[1])
exe = sys.argv[2]
schemas = {p.name: json.loads(p.read_text()) for p in (source / "schema").glob("*.json")}
for schema in schemas.values():
    jsonschema.Draft202012Validator.check_schema(schema)

failures = 0


def check(schema_name, doc, label):
    global failures
    errors = list(jsonschema.Draft202012Validator(schemas[schema_name]).iter_errors(doc))
    for e in errors:
        print(f"{label}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
    failures += bool(errors)


for path in sorted((source / "scenarios").glob("*.json")):
    check("scenario.schema.json", json.loads(path.read_text()), path.name)
    run = subprocess.run([exe, "solve", str(path), "--format", "json"], capture_output=True, text=True, check=True)
    check("trajectory.schema.json", json.loads(run.stdout), path.name + " trajectory")
    run = subprocess.run([exe, "solve", str(path)], capture_output=True, text=True, check=True)
    header = next(csv.reader(io.StringIO(run.stdout)))
    if header[0] != "t" or header[-1] != "jump":
        print(f"{path.name}: bad CSV header {header}")
        failures += 1
    if path.name.startswith("verify_"):
        run = subprocess.run([exe, "verify", str(path)], capture_output=True, text=True, check=True)
        check("theorem_report.schema.json", json.loads(run.stdout), path.name + " report")

for path in sorted((source / "tests" / "data").glob("*.json")):
    doc = json.loads(path.read_text())
    if path.name != "overlapping_pieces.json":
        check("scenario.schema.json", doc, path.name)

print("schema failures:", failures)
sys.exit(1 if failures else 0)
