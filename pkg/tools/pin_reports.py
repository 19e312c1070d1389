"""Regenerate the pinned canonical reports of the built-in scenarios.

Run after an intentional change to a demo or to check numerics:

    python3 tools/pin_reports.py
"""

from pathlib import Path

from metalgeom.demos import BUILTINS, builtin
from metalgeom.scenario import load_scenario, run

OUT = Path(__file__).resolve().parents[1] / "src" / "metalgeom" / "data" / "expected"

if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for name in BUILTINS:
        path = OUT / f"{name}.json"
        path.write_text(run(load_scenario(builtin(name))).to_json(), encoding="utf-8")
        print(f"wrote {path}")
