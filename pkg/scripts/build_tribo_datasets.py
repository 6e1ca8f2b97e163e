"""Construct the bundled tribology datasets and verify the trees they train.

The original CoF and wear measurements are not published, so these tables
are reconstructions. Each one is built so that a default-config CART tree
realizes the rules quoted for it:

* micro CoF (20 rows; load, b4c): b4c < 3 -> 0.51733, and
  load >= 6 with b4c > 5 -> 0.44189;
* wear at 400 m sliding distance (load, sliding speed): predictions never
  decrease when load and speed increase together;
* nano CoF / wear (load, nano b4c): minimum CoF 0.25 and minimum wear 0.56.

Usage:  python scripts/build_tribo_datasets.py [--check]
"""

import argparse
import itertools
import sys
from pathlib import Path

import numpy as np

from compdesign.cart import Dataset, Internal, build_tree, predict, read_dataset, render_tree_text, write_dataset

DATA = Path(__file__).resolve().parents[1] / "src" / "compdesign" / "data"


def micro_cof() -> Dataset:
    loads = [2.0, 4.0, 8.0, 10.0]
    b4c = [0.0, 2.0, 4.0, 6.0, 8.0]
    mid_b4c = {2.0: 0.4862, 4.0: 0.4835, 8.0: 0.4791, 10.0: 0.4768}
    low_load_high_b4c = {(2.0, 6.0): 0.4690, (4.0, 6.0): 0.4655, (2.0, 8.0): 0.4671, (4.0, 8.0): 0.4642}
    rows, y = [], []
    for w, l in itertools.product(b4c, loads):
        if w < 3:
            t = 0.51733
        elif w < 5:
            t = mid_b4c[l]
        elif l < 6:
            t = low_load_high_b4c[(l, w)]
        else:
            t = 0.44189
        rows.append((l, w))
        y.append(t)
    return Dataset(("load", "b4c"), np.array(rows), np.array(y))


def wear_400m() -> Dataset:
    loads = [10.0, 20.0, 30.0, 40.0]
    speeds = [1.0, 2.0, 3.0, 4.0]
    rows, y = [], []
    for l, v in itertools.product(loads, speeds):
        rows.append((l, v))
        y.append(round(0.5 + 0.02 * l + 0.15 * v + 0.004 * l * v, 4))
    return Dataset(("load", "speed"), np.array(rows), np.array(y))


NANO_LOADS = [2.0, 4.0, 6.0, 8.0, 10.0]
NANO_B4C = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]


def nano_cof() -> Dataset:
    rows, y = [], []
    for l, w in itertools.product(NANO_LOADS, NANO_B4C):
        if w >= 0.3:
            t = 0.25 if l <= 5 else 0.31
        else:
            t = 0.36 if l <= 5 else 0.42
        rows.append((l, w))
        y.append(t)
    return Dataset(("load", "b4c"), np.array(rows), np.array(y))


def nano_wear() -> Dataset:
    rows, y = [], []
    for l, w in itertools.product(NANO_LOADS, NANO_B4C):
        if l >= 6:
            t = 0.56 if w >= 0.7 else 0.71
        else:
            t = 0.60 if w >= 0.3 else 0.82
        rows.append((l, w))
        y.append(t)
    return Dataset(("load", "b4c"), np.array(rows), np.array(y))


def _has_split(node, feature, threshold) -> bool:
    if not isinstance(node, Internal):
        return False
    if node.feature == feature and abs(node.threshold - threshold) < 1e-12:
        return True
    return _has_split(node.left, feature, threshold) or _has_split(node.right, feature, threshold)


def check() -> list[str]:
    problems = []
    cof = build_tree(read_dataset(DATA / "cof_micro.csv"))
    if f"{predict(cof, (4.0, 2.0)):.5f}" != "0.51733":
        problems.append("cof: (4, 2) does not predict 0.51733")
    if f"{predict(cof, (8.0, 8.0)):.5f}" != "0.44189":
        problems.append("cof: (8, 8) does not predict 0.44189")
    if not _has_split(cof.root, 1, 3.0) or not _has_split(cof.root, 0, 6.0) or not _has_split(cof.root, 1, 5.0):
        problems.append("cof: expected splits b4c < 3, b4c < 5, load < 6")

    wear = build_tree(read_dataset(DATA / "wear_400m.csv"))
    grid = [(l, v) for l in np.linspace(5, 45, 41) for v in np.linspace(0.5, 4.5, 41)]
    pred = {p: predict(wear, p) for p in grid}
    for p, q in itertools.product(grid, grid):
        if q[0] >= p[0] and q[1] >= p[1] and pred[q] < pred[p]:
            problems.append(f"wear: prediction drops from {p} to {q}")
            break

    ncof = build_tree(read_dataset(DATA / "nano_cof.csv"))
    nwear = build_tree(read_dataset(DATA / "nano_wear.csv"))
    if min(l.value for l in ncof.leaves()) > 0.25 + 1e-12:
        problems.append("nano cof: no leaf at 0.25")
    if min(l.value for l in nwear.leaves()) > 0.56 + 1e-12:
        problems.append("nano wear: no leaf at 0.56")
    for name, tree in (("cof", cof), ("wear", wear), ("nano cof", ncof), ("nano wear", nwear)):
        print(f"-- {name}")
        print(render_tree_text(tree), end="")
    return problems


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="only verify the bundled files")
    args = ap.parse_args()
    if not args.check:
        for name, ds in (("cof_micro.csv", micro_cof()), ("wear_400m.csv", wear_400m()),
                         ("nano_cof.csv", nano_cof()), ("nano_wear.csv", nano_wear())):
            write_dataset(ds, DATA / name)
            print(f"wrote {DATA / name} ({len(ds)} rows)")
    problems = check()
    for p in problems:
        print("FAIL", p, file=sys.stderr)
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
