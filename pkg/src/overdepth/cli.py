"""Command-line front end for the reconstruction pipeline.

Subcommands: ``bank`` (dump kernels), ``fit`` (mixture model from a depth
corpus), ``predict-synth`` (oracle weight maps), ``globalize`` (recover a
scene map), ``eval`` (depth metrics), ``demo`` (end-to-end synthetic run),
``bench`` (backend comparison).  Every command is deterministic given its
seed and inputs; errors exit nonzero with a one-line diagnostic.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .bank import build_filter_bank, named_subsets, resolve_subset
from .globalizer import (
    DEFAULT_BETA_FINAL,
    DEFAULT_BETA_GROWTH,
    DEFAULT_BETA_INIT,
    SolverConfig,
    globalize,
    init_w,
)
from .metrics import depth_to_scene, evaluate, scene_to_depth
from .mixture import (
    fit_mixture_model,
    load_mixture_model,
    sample_coefficients,
    save_mixture_model,
)
from .pfm import read_pfm, write_pfm
from .predictor import (
    CorruptionConfig,
    read_weight_map,
    synth_predict,
    write_weight_map,
)
from .synth import make_corpus


def cmd_bank(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    bank = build_filter_bank()
    lines = []
    for i, f in enumerate(bank.filters):
        write_pfm(f.kernel, out_dir / f"filter_{i:02d}.pfm")
        lines.append(f"{i} {f.kind.value} {f.scale} {f.orientation_index} {f.norm:.6f}")
    (out_dir / "bank.txt").write_text("\n".join(lines) + "\n", encoding="ascii")
    print(f"wrote {len(bank)} kernels to {out_dir}")
    return 0


def _depth_corpus_to_scene(corpus_dir: Path) -> list[np.ndarray]:
    paths = sorted(corpus_dir.glob("*.pfm"))
    if not paths:
        raise ValueError(f"no PFM depth maps found in {corpus_dir}")
    return [depth_to_scene(read_pfm(p)) for p in paths]


def cmd_fit(args) -> int:
    bank = build_filter_bank()
    fields = _depth_corpus_to_scene(Path(args.corpus_dir))
    samples = sample_coefficients(fields, bank, stride=args.stride)
    model = fit_mixture_model(
        samples, args.components, min_assign=args.min_assign, seed=args.seed
    )
    save_mixture_model(model, args.out_model)
    print(
        f"fitted {model.num_filters} x {model.num_components} mixture model "
        f"from {len(fields)} maps -> {args.out_model}"
    )
    return 0


def cmd_predict_synth(args) -> int:
    bank = build_filter_bank()
    model = load_mixture_model(args.model)
    subset = resolve_subset(args.subset, bank)
    y_true = depth_to_scene(read_pfm(args.depth_pfm))
    corruption = CorruptionConfig(args.ambiguity, args.temperature, args.seed)
    wmap = synth_predict(y_true, bank, model, subset, corruption)
    write_weight_map(wmap, args.out_owm)
    print(
        f"wrote weight map ({wmap.width}x{wmap.height}, "
        f"{len(wmap.filter_indices)} filters) -> {args.out_owm}"
    )
    return 0


def cmd_globalize(args) -> int:
    bank = build_filter_bank()
    model = load_mixture_model(args.model)
    wmap = read_weight_map(args.in_owm)
    subset = resolve_subset(args.subset, bank) if args.subset else None
    config = SolverConfig(
        subset=subset,
        beta_init=args.beta_init,
        beta_final=args.beta_final,
        beta_growth=args.beta_growth,
        reg_weight=args.reg_weight,
        record_trace=args.trace is not None,
    )
    y, trace = globalize(wmap, model, bank, config)
    write_pfm(y, args.out_pfm)
    depth_out = (
        Path(args.depth_out)
        if args.depth_out
        else Path(args.out_pfm).with_suffix(".depth.pfm")
    )
    write_pfm(scene_to_depth(y), depth_out)
    if args.trace:
        trace.write_csv(args.trace)
    print(
        f"globalized {wmap.width}x{wmap.height} map in {len(trace)} iterations "
        f"-> {args.out_pfm}, {depth_out}"
    )
    return 0


def cmd_eval(args) -> int:
    z_hat = read_pfm(args.pred_pfm)
    z_true = read_pfm(args.truth_pfm)
    mask = read_pfm(args.mask) != 0.0 if args.mask else None
    print(evaluate(z_hat, z_true, mask).format_line())
    return 0


def _argmax_decode_rmse(wmap, model, bank, filter_index, y_true) -> float:
    """RMSE of per-pixel argmax decoding of one zeroth-order filter."""
    stack = init_w(wmap, model)
    decoded = stack[wmap.filter_indices.index(filter_index)]
    decoded = decoded / float(bank[filter_index].kernel.sum())
    return float(np.sqrt(np.mean((decoded - y_true) ** 2)))


def run_demo(
    out_dir,
    seed: int = 0,
    size: int = 64,
    corpus_size: int = 100,
    components: int = 64,
    ambiguities=(0.0, 0.3, 0.6),
):
    """Full synthetic pipeline; returns the summary rows (list of dicts).

    Generates a corpus, fits a model, produces oracle weight maps for a
    held-out field over the ambiguity grid, globalizes with the full bank,
    then repeats at zero ambiguity for the named filter-subset ablations.
    Artifacts (corpus, model, maps, summary.csv) land in ``out_dir``.
    """
    out_dir = Path(out_dir)
    corpus_dir = out_dir / "corpus"
    corpus_dir.mkdir(parents=True, exist_ok=True)
    bank = build_filter_bank()

    for i, y in enumerate(make_corpus(corpus_size, (size, size), seed)):
        write_pfm(scene_to_depth(y), corpus_dir / f"depth_{i:03d}.pfm")
    fields = _depth_corpus_to_scene(corpus_dir)
    samples = sample_coefficients(fields, bank, stride=4)
    model = fit_mixture_model(samples, components, seed=seed)
    save_mixture_model(model, out_dir / "model.gmm")

    test_rng = np.random.default_rng(seed + 1_000_003)
    from .synth import bump_field

    y_true = bump_field((size, size), test_rng)
    write_pfm(scene_to_depth(y_true), out_dir / "truth.depth.pfm")
    z_true = scene_to_depth(y_true)

    groups = named_subsets(bank)
    ablations = [
        ("full", groups["full"]),
        ("scale0,scale1", tuple(sorted(groups["scale0"] + groups["scale1"]))),
        (
            "scale0,scale1,scale2",
            tuple(sorted(groups["scale0"] + groups["scale1"] + groups["scale2"])),
        ),
        ("order0", groups["order0"]),
        ("order0,order1", tuple(sorted(groups["order0"] + groups["order1"]))),
        ("scale0", groups["scale0"]),
    ]

    rows = []

    def solve_row(section, label, subset, ambiguity):
        corruption = CorruptionConfig(ambiguity, 1.0, seed)
        wmap = synth_predict(y_true, bank, model, subset, corruption)
        y_hat, _ = globalize(wmap, model, bank, SolverConfig(subset=subset))
        rmse_y = float(np.sqrt(np.mean((y_hat - y_true) ** 2)))
        m = evaluate(scene_to_depth(y_hat), z_true)
        row = {
            "section": section,
            "label": label,
            "ambiguity": ambiguity,
            "filters": len(subset),
            "rmse_y": rmse_y,
            **m.as_dict(),
        }
        rows.append(row)
        return row

    for amb in ambiguities:
        solve_row("ambiguity", "full", groups["full"], amb)
    for label, subset in ablations:
        solve_row("ablation", label, subset, 0.0)

    header = list(rows[0].keys())
    out_lines = [",".join(header)]
    for row in rows:
        out_lines.append(
            ",".join(
                f"{row[k]:.10g}" if isinstance(row[k], float) else str(row[k])
                for k in header
            )
        )
    (out_dir / "summary.csv").write_text("\n".join(out_lines) + "\n", encoding="ascii")
    return rows


def cmd_demo(args) -> int:
    rows = run_demo(
        args.out_dir,
        seed=args.seed,
        size=args.size,
        corpus_size=args.corpus_size,
        components=args.components,
    )
    for row in rows:
        print(
            f"{row['section']:9s} {row['label']:22s} amb={row['ambiguity']:.1f} "
            f"filters={row['filters']:2d} rmse_y={row['rmse_y']:.5f} "
            f"rmse_lin={row['rmse_lin']:.5f} delta1={row['delta1']:.4f}"
        )
    print(f"summary written to {Path(args.out_dir) / 'summary.csv'}")
    return 0


def cmd_bench(args) -> int:
    print(
        bench_mod.format_report(
            slots=args.slots,
            comps=args.comps,
            repeats=args.repeats,
            solve_size=args.solve_size,
            seed=args.seed,
            skip_solve=args.skip_solve,
        )
    )
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="overdepth",
        description="Scene-map recovery from distributions over derivative coefficients",
    )
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("bank", help="dump all filter kernels as PFM plus bank.txt")
    q.add_argument("out_dir")
    q.set_defaults(func=cmd_bank)

    q = sub.add_parser("fit", help="fit a mixture model from a PFM depth corpus")
    q.add_argument("corpus_dir")
    q.add_argument("out_model")
    q.add_argument("--components", type=int, default=64)
    q.add_argument("--min-assign", type=int, default=None)
    q.add_argument("--stride", type=int, default=4)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_fit)

    q = sub.add_parser(
        "predict-synth", help="oracle weight map from a ground-truth depth map"
    )
    q.add_argument("depth_pfm")
    q.add_argument("out_owm")
    q.add_argument("--model", required=True)
    q.add_argument("--subset", default="full")
    q.add_argument("--ambiguity", type=float, default=0.0)
    q.add_argument("--temperature", type=float, default=1.0)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_predict_synth)

    q = sub.add_parser("globalize", help="recover a scene map from a weight map")
    q.add_argument("in_owm")
    q.add_argument("out_pfm")
    q.add_argument("--model", required=True)
    q.add_argument("--depth-out", default=None)
    q.add_argument("--subset", default=None)
    q.add_argument("--beta-init", type=float, default=DEFAULT_BETA_INIT)
    q.add_argument("--beta-final", type=float, default=DEFAULT_BETA_FINAL)
    q.add_argument("--beta-growth", type=float, default=DEFAULT_BETA_GROWTH)
    q.add_argument("--reg-weight", type=float, default=1.0)
    q.add_argument("--trace", default=None)
    q.set_defaults(func=cmd_globalize)

    q = sub.add_parser("eval", help="depth metrics for predicted vs true PFM")
    q.add_argument("pred_pfm")
    q.add_argument("truth_pfm")
    q.add_argument("--mask", default=None)
    q.set_defaults(func=cmd_eval)

    q = sub.add_parser("demo", help="end-to-end synthetic pipeline run")
    q.add_argument("out_dir")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--size", type=int, default=64)
    q.add_argument("--corpus-size", type=int, default=100)
    q.add_argument("--components", type=int, default=64)
    q.set_defaults(func=cmd_demo)

    q = sub.add_parser("bench", help="compare compiled and numpy kernel backends")
    q.add_argument("--slots", type=int, default=12_544)
    q.add_argument("--comps", type=int, default=64)
    q.add_argument("--repeats", type=int, default=5)
    q.add_argument("--solve-size", type=int, default=32)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--skip-solve", action="store_true")
    q.set_defaults(func=cmd_bench)

    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as err:  # one-line diagnostic, nonzero exit
        print(f"error: {err}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
