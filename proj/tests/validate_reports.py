"""Runs the CLI on every config and validates each report against `lcft schema`."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema


def main() -> int:
    exe, config_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    schema = json.loads(subprocess.run([exe, "schema"], check=True, capture_output=True, text=True).stdout)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    skip = {"props_model", "support_lemmas"}  # long-running; covered by the acceptance runs
    failures = 0
    with tempfile.TemporaryDirectory() as out:
        for cfg in sorted(config_dir.iterdir()):
            if cfg.stem in skip:
                continue
            proc = subprocess.run([exe, "run", str(cfg), "--out", out], capture_output=True, text=True)
            if proc.returncode not in (0, 2):
                print(f"{cfg.name}: exit {proc.returncode}: {proc.stderr.strip()}")
                failures += 1
                continue
            report = json.loads((pathlib.Path(out) / f"{cfg.stem}.json").read_text())
            errors = list(validator.iter_errors(report))
            for e in errors:
                print(f"{cfg.name}: {e.json_path}: {e.message}")
            failures += bool(errors)
            print(f"{cfg.name}: exit {proc.returncode}, schema {'ok' if not errors else 'INVALID'}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
