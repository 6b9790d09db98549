"""
Command-line workflow
=====================

Write a run configuration, simulate it, continue it, and compute the
criteria report; every output file is deterministic.
"""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
from pathlib import Path


def fracfujita(*args):
    cmd = [sys.executable, "-m", "fracfujita.cli_io", *args]
    done = subprocess.run(cmd, capture_output=True, text=True)
    print("$ fracfujita", " ".join(args), f"-> exit {done.returncode}")
    print((done.stdout + done.stderr).rstrip())
    return done.returncode


work = Path(tempfile.mkdtemp())
config = {"alpha": 0.5, "beta": 0.25, "p": 2.0, "dim": 1, "L": 32.0, "n": 128,
          "dt": 0.05, "T_max": 2.0, "q_list": [1, 2, "inf"],
          "datum": {"kind": "gaussian", "amplitude": 0.5, "width": 1.0}}
(work / "run.json").write_text(json.dumps(config, indent=1))

fracfujita("--version")
fracfujita("ml-eval", "--a", "0.5", "--b", "1", "--z", "-3")
fracfujita("simulate", "--config", str(work / "run.json"), "--out", str(work / "first"))
fracfujita("continue", "--state", str(work / "first" / "state.npz"), "--extra-T", "2",
           "--out", str(work / "second"))
fracfujita("criteria", "--config", str(work / "run.json"), "--out", str(work / "crit.json"))
print((work / "second" / "outcome.json").read_text())

config["n"] = 100
(work / "bad.json").write_text(json.dumps(config))
fracfujita("simulate", "--config", str(work / "bad.json"), "--out", str(work / "bad"))
