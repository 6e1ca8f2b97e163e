"""Command-line front end: ``compdesign {mix,optimize,fuzzy,tree,tribo}``.

Exit codes: 0 success, 1 validation or domain error, 2 I/O error.
Diagnostics go to stderr. Randomized commands require ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import warnings
from importlib import resources
from pathlib import Path

from . import __version__, cart, fuzzy, moo, tribo
from .composition import (
    CompositionBounds,
    Interval,
    PhaseConstants,
    composition_problem,
    evaluate_objectives,
    validate_composition,
)
from .errors import DomainError, ParseError
from .svgplot import emit_svg_scatter

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


class UsageError(DomainError):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise UsageError(message)


def data_path(name: str) -> Path:
    return Path(str(resources.files("compdesign") / "data" / name))


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_path, subcommand: str, config: dict, seed, inputs) -> Path:
    manifest = {
        "tool": "compdesign",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "inputs": {str(p): _digest(p) for p in inputs},
    }
    path = Path(str(out_path) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _nsga_config(overrides: dict, seed: int) -> moo.NsgaConfig:
    allowed = {"population_size", "generations", "crossover_probability",
               "mutation_probability_per_gene", "sbx_eta", "mutation_eta"}
    unknown = set(overrides) - allowed
    if unknown:
        raise ParseError(f"unknown nsga settings: {sorted(unknown)}")
    return moo.NsgaConfig(seed=seed, **overrides)


def _nsga_dict(c: moo.NsgaConfig) -> dict:
    return {
        "population_size": c.population_size,
        "generations": c.generations,
        "crossover_probability": c.crossover_probability,
        "mutation_probability_per_gene": c.mutation_probability_per_gene,
        "sbx_eta": c.sbx_eta,
        "mutation_eta": c.mutation_eta,
    }


# --- mix -------------------------------------------------------------------

def cmd_mix(args) -> int:
    k = PhaseConstants() if args.sigma_m is None else PhaseConstants(sigma_m=args.sigma_m)
    props = evaluate_objectives(validate_composition(args.al, args.b4c, args.gr), k)
    print(f"E = {props.elastic_modulus:.2f} GPa")
    print(f"sigma = {props.uts:.2f} MPa")
    return EXIT_OK


# --- optimize --------------------------------------------------------------

def cmd_optimize(args) -> int:
    cfg_path = Path(args.config) if args.config else data_path("optimize_default.json")
    doc = _read_json(cfg_path)
    try:
        b = doc.get("bounds", {})
        bounds = CompositionBounds(
            Interval(*b.get("al", (75.0, 100.0))),
            Interval(*b.get("b4c", (0.0, 15.0))),
            Interval(*b.get("gr", (0.0, 10.0))),
        )
        constants = PhaseConstants(**doc.get("constants", {}))
    except TypeError as exc:
        raise ParseError(f"{cfg_path}: {exc}") from exc
    config = _nsga_config(doc.get("nsga", {}), args.seed)
    sense = (moo.Sense.MAXIMIZE, moo.Sense.MAXIMIZE)
    archive = moo.nsga2_run(composition_problem(constants), bounds.gene_bounds(), sense, config)

    al = [100.0 - m.genes[0] - m.genes[1] for m in archive.members]
    _write_text(args.out, archive.to_csv({"al": al}))
    resolved = {
        "bounds": {"al": [bounds.al.low, bounds.al.high], "b4c": [bounds.b4c.low, bounds.b4c.high],
                   "gr": [bounds.gr.low, bounds.gr.high]},
        "constants": vars(constants),
        "genes": ["b4c_wt", "gr_wt"],
        "objectives": ["E_gpa", "sigma_mpa"],
        "nsga": _nsga_dict(config),
    }
    write_manifest(args.out, "optimize", resolved, args.seed, [cfg_path])
    if args.svg:
        points = [tuple(m.objectives) for m in archive.members]
        emit_svg_scatter(args.svg, points, "E (GPa)", "sigma (MPa)", range(len(points)),
                         "Pareto front of the mixture-rule objectives")
    knee = moo.knee_point(archive, sense)
    b4c, gr = knee.genes
    print(f"front size: {len(archive)}")
    print(f"knee: Al = {100 - b4c - gr:.2f}%, B4C = {b4c:.2f}%, Gr = {gr:.2f}%, "
          f"E = {knee.objectives[0]:.2f} GPa, sigma = {knee.objectives[1]:.2f} MPa")
    return EXIT_OK


# --- fuzzy -----------------------------------------------------------------

def _read_grid(path) -> list[tuple[float, ...]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        return []
    body = rows[1:] if not _is_numeric(rows[0]) else rows
    try:
        return [tuple(float(c) for c in r) for r in body]
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _is_numeric(row) -> bool:
    try:
        [float(c) for c in row]
        return True
    except ValueError:
        return False


def _parse_point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(c) for c in text.split(","))
    except ValueError as exc:
        raise ParseError(f"bad --point {text!r}: {exc}") from exc


def crisp_csv(rb: fuzzy.RuleBase, table) -> str:
    buf = io.StringIO()
    buf.write(",".join([v.name for v in rb.inputs] + [v.name for v in rb.outputs]) + "\n")
    for inputs, outputs in table:
        cells = [f"{x:.2f}" for x in inputs] + [f"{outputs[v.name]:.2f}" for v in rb.outputs]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def cmd_fuzzy(args) -> int:
    rb_path = Path(args.rulebase) if args.rulebase else data_path("rulebase.json")
    rb = fuzzy.load_rulebase(rb_path)
    inputs = [rb_path]
    if args.point:
        grid = [_parse_point(p) for p in args.point]
    else:
        grid_path = Path(args.grid) if args.grid else data_path("table1_grid.csv")
        grid = _read_grid(grid_path)
        inputs.append(grid_path)
    for row in grid:
        if len(row) != len(rb.inputs):
            raise ParseError(f"grid row {row} has {len(row)} values, rule base has {len(rb.inputs)} inputs")
        if len(row) == 3:
            validate_composition(*row)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", fuzzy.ClampWarning)
        table = fuzzy.generate_crisp_dataset(rb, grid)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _write_text(args.out, crisp_csv(rb, table))
    write_manifest(args.out, "fuzzy", {"grid_rows": len(grid)}, None, inputs)
    if args.svg:
        outs = [v.name for v in rb.outputs]
        if len(outs) != 2:
            raise DomainError("--svg needs a rule base with exactly two outputs")
        points = [(o[outs[0]], o[outs[1]]) for _, o in table]
        front = []
        if points:
            mask = moo.nondominated_mask(points, (moo.Sense.MAXIMIZE, moo.Sense.MAXIMIZE))
            front = [i for i, keep in enumerate(mask) if keep]
        emit_svg_scatter(args.svg, points, outs[0], outs[1], front, "Objective space of the crisp dataset")
    print(f"wrote {len(table)} rows to {args.out}")
    return EXIT_OK


# --- tree ------------------------------------------------------------------

def _parse_feature_flags(extra: list[str], names) -> list[float]:
    values: dict[str, float] = {}
    it = iter(extra)
    for flag in it:
        if not flag.startswith("--"):
            raise UsageError(f"unexpected argument {flag!r}")
        name, _, inline = flag[2:].partition("=")
        raw = inline if inline else next(it, None)
        if raw is None:
            raise UsageError(f"--{name} needs a value")
        try:
            values[name.replace("-", "_")] = float(raw)
        except ValueError:
            raise UsageError(f"--{name}: {raw!r} is not a number") from None
    unknown = set(values) - set(names)
    if unknown:
        raise cart.ArityMismatch(f"unknown feature(s) {sorted(unknown)}; tree uses {list(names)}")
    missing = [n for n in names if n not in values]
    if missing:
        raise cart.ArityMismatch(f"missing feature(s) {missing}")
    return [values[n] for n in names]


def cmd_tree(args, extra: list[str]) -> int:
    if args.tree_cmd == "train":
        if extra:
            raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
        data = cart.read_dataset(args.data)
        config = cart.TreeConfig(args.max_depth, args.min_samples_leaf, args.min_samples_split)
        tree = cart.build_tree(data, config)
        cart.save_tree(tree, args.out)
        write_manifest(args.out, "tree train", cart.tree_to_dict(tree)["config"], None, [args.data])
        print(f"trained tree of depth {tree.depth()} with {len(tree.leaves())} leaves -> {args.out}")
    elif args.tree_cmd == "predict":
        tree = cart.load_tree(args.tree)
        x = _parse_feature_flags(extra, tree.feature_names)
        print(f"{cart.predict(tree, x):.5f}")
    else:
        if extra:
            raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
        print(cart.render_tree_text(cart.load_tree(args.tree)), end="")
    return EXIT_OK


# --- tribo -----------------------------------------------------------------

def cmd_tribo(args) -> int:
    cfg_path = Path(args.config) if args.config else data_path("nano_tribo.json")
    cfg = tribo.load_tribo_config(cfg_path)
    inputs = [cfg_path, cfg.cof_data, cfg.wear_data]
    if args.raw:
        rows = tribo.raw_pareto(cart.read_dataset(cfg.cof_data), cart.read_dataset(cfg.wear_data))
        names = cart.read_dataset(cfg.cof_data).feature_names
        lines = [",".join(list(names) + ["cof", "wear"])]
        lines += [",".join(f"{v:.6f}" for v in list(x) + [c, w]) for x, c, w in rows]
        _write_text(args.out, "\n".join(lines) + "\n")
        write_manifest(args.out, "tribo --raw", {}, None, inputs)
        print(f"{len(rows)} non-dominated raw rows -> {args.out}")
        return EXIT_OK
    if args.seed is None:
        raise UsageError("tribo needs --seed (or --raw)")
    surrogates = tribo.surrogates_from_config(cfg)
    config = _nsga_config(cfg.nsga, args.seed)
    archive = tribo.optimize_tribo(cfg.design, surrogates, config)
    _write_text(args.out, archive.to_csv())
    resolved = {
        "variables": [[v.name, v.low, v.high] for v in cfg.design.variables],
        "cof_features": dict(cfg.design.cof_binding),
        "wear_features": dict(cfg.design.wear_binding),
        "objectives": ["cof", "wear"],
        "tree": cart.tree_to_dict(surrogates.cof)["config"],
        "nsga": _nsga_dict(config),
    }
    write_manifest(args.out, "tribo", resolved, args.seed, inputs)
    if args.svg:
        points = [tuple(m.objectives) for m in archive.members]
        emit_svg_scatter(args.svg, points, "CoF", "wear", range(len(points)), "Tribological objective space")
    names = [v.name for v in cfg.design.variables]
    for label, k in (("min CoF", 0), ("min wear", 1)):
        m = min(archive.members, key=lambda m: (m.objectives[k], m.objectives[1 - k]))
        design = ", ".join(f"{n} = {g:.3f}" for n, g in zip(names, m.genes))
        print(f"{label}: {design} -> cof = {m.objectives[0]:.5f}, wear = {m.objectives[1]:.5f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="compdesign", description="Al2219-B4C-Gr composite design toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    m = sub.add_parser("mix", help="rule-of-mixtures E and sigma for one composition")
    m.add_argument("--al", type=float, required=True)
    m.add_argument("--b4c", type=float, required=True)
    m.add_argument("--gr", type=float, required=True)
    m.add_argument("--sigma-m", type=float, default=None, help="matrix UTS in MPa (default 0)")

    o = sub.add_parser("optimize", help="NSGA-II Pareto front of (E, sigma)")
    o.add_argument("--config", help="JSON config (default: bundled)")
    o.add_argument("--out", required=True)
    o.add_argument("--svg")
    o.add_argument("--seed", type=int, required=True)

    f = sub.add_parser("fuzzy", help="crisp (E, sigma) dataset from the fuzzy rule base")
    f.add_argument("--rulebase", help="rule base JSON (default: bundled)")
    f.add_argument("--grid", help="CSV of al_wt,b4c_wt,gr_wt rows (default: bundled 14-row grid)")
    f.add_argument("--point", action="append", help="inline grid row 'al,b4c,gr' (repeatable)")
    f.add_argument("--out", required=True)
    f.add_argument("--svg")

    t = sub.add_parser("tree", help="CART regression trees")
    tsub = t.add_subparsers(dest="tree_cmd", required=True, parser_class=_Parser)
    tt = tsub.add_parser("train")
    tt.add_argument("--data", required=True)
    tt.add_argument("--out", default="tree.json")
    tt.add_argument("--max-depth", type=int, default=4)
    tt.add_argument("--min-samples-leaf", type=int, default=1)
    tt.add_argument("--min-samples-split", type=int, default=2)
    tp = tsub.add_parser("predict", help="predict; pass one --<feature> <value> per tree feature")
    tp.add_argument("--tree", default="tree.json")
    ts = tsub.add_parser("show")
    ts.add_argument("--tree", default="tree.json")

    r = sub.add_parser("tribo", help="NSGA-II over tree surrogates of CoF and wear")
    r.add_argument("--config", help="tribo JSON config (default: bundled nano config)")
    r.add_argument("--out", required=True)
    r.add_argument("--svg")
    r.add_argument("--seed", type=int)
    r.add_argument("--raw", action="store_true", help="non-dominated rows of the raw tables instead")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if args.cmd == "tree":
            return cmd_tree(args, extra)
        if extra:
            raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
        return {"mix": cmd_mix, "optimize": cmd_optimize, "fuzzy": cmd_fuzzy, "tribo": cmd_tribo}[args.cmd](args)
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
