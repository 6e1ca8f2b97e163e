"""Run every stage end to end and collect the outputs in one directory.

    python3 scripts/run_pipeline.py --out results --seed 42
"""

import argparse
import sys
from pathlib import Path

from compdesign.cli import data_path, main


def stages(out: Path, seed: str) -> list[tuple[str, list[str]]]:
    return [
        ("mixture rule", ["mix", "--al", "80.93", "--b4c", "15", "--gr", "4.07"]),
        ("composition front", ["optimize", "--seed", seed, "--out", str(out / "front.csv"),
                               "--svg", str(out / "front.svg")]),
        ("fuzzy crisp table", ["fuzzy", "--out", str(out / "crisp.csv"), "--svg", str(out / "crisp.svg")]),
        ("CoF tree", ["tree", "train", "--data", str(data_path("cof_micro.csv")), "--out", str(out / "cof_tree.json")]),
        ("CoF tree text", ["tree", "show", "--tree", str(out / "cof_tree.json")]),
        ("wear tree", ["tree", "train", "--data", str(data_path("wear_400m.csv")),
                       "--out", str(out / "wear_tree.json")]),
        ("tribo front", ["tribo", "--seed", seed, "--out", str(out / "tribo.csv"), "--svg", str(out / "tribo.svg")]),
    ]


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, argv_ in stages(out, str(args.seed)):
        print(f"== {name}")
        code = main(argv_)
        if code:
            print(f"stage '{name}' failed with exit code {code}", file=sys.stderr)
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
