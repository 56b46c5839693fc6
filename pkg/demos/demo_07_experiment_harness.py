"""Reproducible experiments: config files, manifests, verdicts.

Experiments are described by a line-oriented key = value config, run into
a directory with fixed-schema CSV diagnostics and a manifest holding the
config hash, file digests, metrics and pass/fail verdicts.  Identical
config + seed reproduce the CSV bytes exactly; ``hydrostat report``
rebuilds the verdicts from the persisted files alone.

The same flow is available on the command line:

    hydrostat validate demo.ini
    hydrostat run demo.ini --out runs/demo --seed 7
    hydrostat report runs/demo

Run:  python demos/demo_07_experiment_harness.py
"""

import json
import tempfile
from pathlib import Path

from hydrostat.cli import main as cli_main
from hydrostat.config import parse_config
from hydrostat.experiments import (load_manifest, manifest_core_bytes,
                                   reconstruct_verdicts, run_experiment)

base = Path(tempfile.mkdtemp(prefix="hydrostat_demo_"))
config_text = f"""
# energy identity on a smooth shear, desk scale shrunk for the demo
[grid]
nx = 16
ny = 16
nz = 16

[time]
dt = 2e-3
t_end = 0.02

[initial_data]
kind = analytic
expression_u = 0
expression_v = cos(2*pi*x)
epsilon = 0

[experiment]
kind = energy_identity

[output]
directory = {base / 'run_a'}
seed = 7
"""
config_path = base / "demo.ini"
config_path.write_text(config_text)

cfg = parse_config(path=config_path)
print(f"config hash: {cfg.config_hash}")

report, manifest = run_experiment(cfg)
print("\nverdicts:")
for name, ok in sorted(report.verdicts.items()):
    print(f"  {'PASS' if ok else 'FAIL'} {name}")
print("metrics:", json.dumps({k: round(v, 12) if isinstance(v, float) else v
                              for k, v in report.metrics.items()}, indent=2))

# determinism: run again elsewhere, compare bytes
run_experiment(cfg, out_dir=base / "run_b")
same_csv = ((base / "run_a" / "series.csv").read_bytes()
            == (base / "run_b" / "series.csv").read_bytes())
same_core = (manifest_core_bytes(load_manifest(base / "run_a"))
             == manifest_core_bytes(load_manifest(base / "run_b")))
print(f"\nrepeated run: CSV bytes identical = {same_csv}, "
      f"manifest core identical = {same_core}")

# verdicts rebuilt from disk alone
rebuilt = reconstruct_verdicts(load_manifest(base / "run_a"), base / "run_a")
print(f"verdicts reconstructed from persisted data match: "
      f"{rebuilt == manifest['verdicts']}")

print("\nsame thing through the CLI:")
rc = cli_main(["report", str(base / "run_a")])
print(f"exit code {rc} (0 = all pass, 1 = failed verdict, 2 = config error)")
