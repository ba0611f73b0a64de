"""Operator command line: synthesis, decomposition, features, training,
evaluation protocols, learning curves, benchmark assembly, and serving.

Exit codes: 0 success, 1 usage/config, 2 data error, 3 numeric failure.
Every command that takes --seed is byte-reproducible; pass --print-config to
echo the fully materialized configuration as JSON.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import io as mio
from .classify.dataset import LabeledDataset
from .classify.forest import ForestConfig
from .classify.mlp import MlpConfig
from .classify.protocol import (
    ProtocolConfig,
    run_learning_curve,
    run_protocol,
    run_protocol_grouped,
)
from .errors import ConfigError, DataError, MousetrapError, NumericError
from .features import SCHEMAS, featurize
from .gan.model import GanBundle, GanConfig, generate
from .gan.train import RnnDetectorConfig, train_gan
from .lognormal import FitConfig, decompose_trajectory
from .modelstore import load_model, save_model, train_full_model
from .surrogate import sample_human_set, sample_human_trajectory, segment_endpoints
from .synth import (
    DIRECTIONS,
    DirectionStats,
    VelocityKind,
    default_shape_ranges,
    estimate_direction_stats,
    sample_point_count,
    sample_shape_spec,
    synth_trajectory,
)

FEATURE_SETS = {"neuromotor": "neuromotor37", "global": "global6", "combined": "combined43"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _effective_config(args, fields):
    cfg = {"command": args.command}
    for f in fields:
        cfg[f] = getattr(args, f)
    return cfg


def _maybe_print_config(args, fields):
    if args.print_config:
        print(json.dumps(_effective_config(args, fields), sort_keys=True))


def _load_trajectory_ds(path) -> LabeledDataset:
    ds, _ = mio.load_trajectories_jsonl(path)
    return ds


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    _maybe_print_config(args, ["input", "output", "assign_directions"])
    events = mio.read_events_csv(args.input)
    result = mio.parse_raw_events(events, assign_directions=args.assign_directions)
    ds = LabeledDataset(np.ones(len(result.trajectories), dtype=int),
                        ["human"] * len(result.trajectories),
                        [t.direction for t in result.trajectories],
                        trajectories=result.trajectories)
    mio.save_trajectories_jsonl(args.output, ds)
    print(f"ingested {len(ds)} trajectories ({result.dropped} short segments dropped) "
          f"-> {args.output}")
    return 0


def cmd_synth(args) -> int:
    _maybe_print_config(args, ["shape", "vp", "n", "stats", "ranges", "output",
                               "seed", "rate", "vp_mu_p", "vp_width", "vp_growth"])
    rng = np.random.default_rng(args.seed)
    if args.stats:
        with open(args.stats) as fh:
            stats = DirectionStats.from_dict(json.load(fh))
    else:
        # no human stats supplied: estimate from a seeded surrogate corpus
        stats = estimate_direction_stats(sample_human_set(32, np.random.default_rng(args.seed)))
    if args.ranges:
        with open(args.ranges) as fh:
            loaded = json.load(fh)
        ranges = {kind: {p: tuple(v) for p, v in fam.items()}
                  for kind, fam in loaded.items()}
    else:
        ranges = default_shape_ranges()
    vp = VelocityKind(args.vp, mu_p=args.vp_mu_p, width=args.vp_width,
                      growth=args.vp_growth)
    trajs = []
    made = 0
    while made < args.n:
        direction = DIRECTIONS[made % len(DIRECTIONS)]
        start, end = segment_endpoints(direction)
        start = (start[0] + rng.uniform(-8, 8), start[1] + rng.uniform(-8, 8))
        end = (end[0] + rng.uniform(-8, 8), end[1] + rng.uniform(-8, 8))
        m = sample_point_count(stats, direction, rng) if direction in stats.stats \
            else max(4, int(round(rng.normal(60, 15))))
        span = max(abs(end[0] - start[0]), abs(end[1] - start[1]))
        shape = sample_shape_spec(args.shape, ranges, rng, span=span)
        try:
            trajs.append(synth_trajectory(shape, vp, start, end, m,
                                          rate_hz=args.rate, direction=direction))
        except ConfigError:
            continue
        made += 1
    tag = f"{args.shape}_vp{args.vp}"
    ds = LabeledDataset(np.zeros(len(trajs), dtype=int), [tag] * len(trajs),
                        [t.direction for t in trajs], trajectories=trajs)
    mio.save_trajectories_jsonl(args.output, ds)
    print(f"synthesized {len(ds)} {tag} trajectories -> {args.output}")
    return 0


def cmd_gan_train(args) -> int:
    _maybe_print_config(args, ["input", "preset", "output", "seed", "epochs", "m", "batch"])
    ds = _load_trajectory_ds(args.input)
    humans = [t for t, y in zip(ds.trajectories, ds.y) if y == 1]
    base = GanConfig.paper if args.preset == "paper" else GanConfig.desk
    overrides = {"seed": args.seed, "M": args.m}
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if args.batch is not None:
        overrides["batch"] = args.batch
    cfg = base(**overrides)
    bundle = train_gan(humans, cfg)
    with open(args.output, "w") as fh:
        json.dump(bundle.as_dict(), fh, sort_keys=True)
        fh.write("\n")
    print(f"trained gan ({cfg.epochs} epochs, units {cfg.gen_units}) -> {args.output}; "
          f"final losses g={bundle.history['gen_loss'][-1]:.4f} "
          f"d={bundle.history['disc_loss'][-1]:.4f}")
    return 0


def _load_bundle(path) -> GanBundle:
    with open(path) as fh:
        return GanBundle.from_dict(json.load(fh))


def cmd_gan_gen(args) -> int:
    _maybe_print_config(args, ["bundle", "n", "output", "seed"])
    bundle = _load_bundle(args.bundle)
    rng = np.random.default_rng(args.seed)
    trajs = [generate(bundle, rng.standard_normal(bundle.config.R)) for _ in range(args.n)]
    ds = LabeledDataset(np.zeros(len(trajs), dtype=int), ["gan"] * len(trajs),
                        [None] * len(trajs), trajectories=trajs)
    mio.save_trajectories_jsonl(args.output, ds)
    print(f"generated {len(ds)} gan trajectories -> {args.output}")
    return 0


def cmd_decompose(args) -> int:
    _maybe_print_config(args, ["input", "output", "target_snr", "max_strokes",
                               "figures", "max_figures"])
    ds, ids = mio.load_trajectories_jsonl(args.input)
    cfg = FitConfig(target_snr=args.target_snr, max_strokes=args.max_strokes)
    fig_dir = Path(args.figures) if args.figures else None
    if fig_dir:
        fig_dir.mkdir(parents=True, exist_ok=True)
    with open(args.output, "w") as fh:
        fh.write(json.dumps({"schema_version": 1, "kind": "decompositions"},
                            sort_keys=True) + "\n")
        for i, (rid, tr) in enumerate(zip(ids, ds.trajectories)):
            dec = decompose_trajectory(tr, cfg)
            rec = {"id": rid, **dec.as_dict()}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            if fig_dir and i < args.max_figures:
                from .report import save_decomposition_figure
                save_decomposition_figure(tr, dec, fig_dir / f"{rid}.png")
    print(f"decomposed {len(ds)} trajectories -> {args.output}")
    return 0


def cmd_features(args) -> int:
    _maybe_print_config(args, ["input", "set", "output", "threads"])
    ds, ids = mio.load_trajectories_jsonl(args.input)
    schema = FEATURE_SETS[args.set]
    X = featurize(ds.trajectories, schema, processes=args.threads)
    out = LabeledDataset(ds.y, ds.attack_types, ds.directions, X=X, schema=schema)
    mio.save_features_jsonl(args.output, out, ids)
    print(f"extracted {schema} features for {len(out)} rows -> {args.output}")
    return 0


def cmd_bench(args) -> int:
    _maybe_print_config(args, ["spec", "output", "human_jsonl", "gan", "seed"])
    spec = mio.BenchmarkSpec.from_json(args.spec)
    if args.seed is not None:
        spec = mio.BenchmarkSpec(spec.n_human_like, spec.attacks, args.seed, spec.rate_hz)
    if args.human_jsonl:
        humans = _load_trajectory_ds(args.human_jsonl).trajectories
    else:
        humans = sample_human_set(max(spec.n_human_like, 16),
                                  np.random.default_rng(spec.seed + 1))
    bundle = _load_bundle(args.gan) if args.gan else None
    ds, manifest = mio.build_benchmark(spec, humans, bundle)
    paths = mio.write_benchmark(args.output, ds, manifest)
    print(f"benchmark: {manifest['total']} rows -> {paths['trajectories']}")
    return 0


def _model_cfg_for(kind: str, args):
    if kind == "rf":
        return ForestConfig(n_trees=args.trees)
    if kind in ("knn", "oneclass"):
        return {"k": args.k}
    if kind == "mlp":
        return MlpConfig(epochs=args.epochs or 100)
    if kind == "rnn":
        units = tuple(int(u) for u in args.units.split(","))
        return RnnDetectorConfig(units=units, M=args.m,
                                 epochs=args.epochs or 30)
    return None


def cmd_train(args) -> int:
    _maybe_print_config(args, ["input", "model", "output", "seed", "trees", "k",
                               "epochs", "units", "m"])
    if args.model == "rnn":
        ds = _load_trajectory_ds(args.input)
    else:
        ds, _ = mio.load_features_jsonl(args.input)
    model = train_full_model(args.model, ds, seed=args.seed,
                             model_cfg=_model_cfg_for(args.model, args))
    save_model(args.output, model)
    print(f"trained {args.model} on {len(ds)} rows -> {args.output}")
    return 0


def _trained_model_cfg(trained):
    if trained.kind == "rf":
        return ForestConfig(n_trees=len(trained.payload.trees))
    if trained.kind == "knn":
        return {"k": trained.payload.k}
    if trained.kind == "oneclass":
        return {"k": trained.payload.k, "quantile": trained.payload.quantile}
    if trained.kind == "mlp":
        return MlpConfig(hidden=tuple(trained.payload.sizes[1:-1]))
    if trained.kind == "rnn":
        return RnnDetectorConfig(units=trained.payload.net.units, M=trained.payload.m)
    return None


def cmd_eval(args) -> int:
    _maybe_print_config(args, ["model", "input", "by", "repeats", "train_frac",
                               "seed", "output"])
    trained = load_model(args.model)
    if trained.kind == "rnn":
        ds = _load_trajectory_ds(args.input)
    else:
        ds, _ = mio.load_features_jsonl(args.input)
        if trained.feature_schema and ds.schema != trained.feature_schema:
            raise DataError(f"model expects {trained.feature_schema}, "
                            f"dataset is {ds.schema}")
    cfg = ProtocolConfig(train_frac=args.train_frac, repeats=args.repeats, seed=args.seed)
    model_cfg = _trained_model_cfg(trained)
    rows = []
    if args.by:
        groups = run_protocol_grouped(ds, trained.kind, cfg, by=args.by,
                                      model_cfg=model_cfg)
        for tag in sorted(groups):
            r = groups[tag]
            rows.append({"group": tag, **{k: f"{v:.4f}" for k, v in r.mean.as_dict().items()},
                         "acc_std": f"{r.std.acc:.4f}"})
    else:
        r = run_protocol(ds, trained.kind, cfg, model_cfg=model_cfg)
        rows.append({"group": "all", **{k: f"{v:.4f}" for k, v in r.mean.as_dict().items()},
                     "acc_std": f"{r.std.acc:.4f}"})
    for row in rows:
        print("  ".join(f"{k}={v}" for k, v in row.items()))
    if args.output:
        from .report import save_metrics_csv, save_metrics_figure
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        save_metrics_csv(out / "metrics.csv", rows)
        save_metrics_figure(out / "metrics.png", rows)
        print(f"report -> {out}/metrics.csv, {out}/metrics.png")
    return 0


def cmd_curve(args) -> int:
    _maybe_print_config(args, ["input", "models", "l_values", "repeats", "seed", "output"])
    models = [m.strip() for m in args.models.split(",") if m.strip()]
    l_values = [int(v) for v in args.l_values.split(",")]
    if any(m == "rnn" for m in models):
        ds = _load_trajectory_ds(args.input)
    else:
        ds, _ = mio.load_features_jsonl(args.input)
    cfg = ProtocolConfig(repeats=args.repeats, seed=args.seed)
    result = run_learning_curve(ds, models, l_values, cfg)
    for model in models:
        line = ", ".join(f"L={l}: {result.acc[model][l]:.4f}"
                         for l in sorted(result.acc[model]))
        trend = "ok" if result.trend_ok[model] else "DEGRADED"
        print(f"{model}: {line}  [trend {trend}]")
    if args.output:
        from .report import save_learning_curve_csv, save_learning_curve_figure
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        save_learning_curve_csv(out / "curve.csv", result.acc)
        save_learning_curve_figure(out / "curve.png", result.acc)
        print(f"report -> {out}/curve.csv, {out}/curve.png")
    return 0


def cmd_serve(args) -> int:
    _maybe_print_config(args, ["model", "gan", "port", "host", "cors"])
    import uvicorn

    from .service import create_app

    app = create_app(model_path=args.model, gan_path=args.gan, cors_origin=args.cors)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="mousetrap",
                     description="Mouse-dynamics bot detection toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", action="store_true",
                       help="machine-readable errors on stderr")
        p.add_argument("--print-config", action="store_true", dest="print_config")
        p.add_argument("--threads", type=int, default=os.cpu_count(),
                       help="worker processes for batch feature extraction")

    p = sub.add_parser("ingest", help="raw event CSV -> trajectory JSONL")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--assign-directions", action="store_true", dest="assign_directions")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("synth", help="function-based bot trajectories")
    p.add_argument("--shape", choices=("linear", "quadratic", "exponential"), required=True)
    p.add_argument("--vp", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("-n", type=int, default=100)
    p.add_argument("--stats", default=None, help="direction stats JSON")
    p.add_argument("--ranges", default=None, help="shape parameter ranges JSON")
    p.add_argument("--vp-mu-p", type=float, default=0.45, dest="vp_mu_p")
    p.add_argument("--vp-width", type=float, default=0.25, dest="vp_width")
    p.add_argument("--vp-growth", type=float, default=9.0, dest="vp_growth")
    p.add_argument("--rate", type=float, default=200.0)
    p.add_argument("-o", "--output", required=True)
    common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("gan-train", help="train the adversarial generator")
    p.add_argument("input", help="human trajectory JSONL")
    p.add_argument("--preset", choices=("paper", "desk"), default="desk")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch", type=int, default=None)
    p.add_argument("-m", type=int, default=50, help="output sequence length")
    p.add_argument("-o", "--output", required=True)
    common(p)
    p.set_defaults(func=cmd_gan_train)

    p = sub.add_parser("gan-gen", help="sample trajectories from a trained bundle")
    p.add_argument("bundle")
    p.add_argument("-n", type=int, default=100)
    p.add_argument("-o", "--output", required=True)
    common(p)
    p.set_defaults(func=cmd_gan_gen)

    p = sub.add_parser("decompose", help="lognormal stroke decomposition")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--target-snr", type=float, default=25.0, dest="target_snr")
    p.add_argument("--max-strokes", type=int, default=20, dest="max_strokes")
    p.add_argument("--figures", default=None, help="directory for per-trajectory figures")
    p.add_argument("--max-figures", type=int, default=8, dest="max_figures")
    common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("features", help="extract feature vectors")
    p.add_argument("input")
    p.add_argument("--set", choices=tuple(FEATURE_SETS), default="combined")
    p.add_argument("-o", "--output", required=True)
    common(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("bench", help="assemble a benchmark from a spec")
    p.add_argument("--spec", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--human-jsonl", default=None, dest="human_jsonl")
    p.add_argument("--gan", default=None, help="trained bundle for gan bots")
    common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("train", help="train a detector model")
    p.add_argument("input")
    p.add_argument("--model", choices=("rf", "knn", "mlp", "rnn", "oneclass"),
                   required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--units", default="32,16")
    p.add_argument("-m", type=int, default=50)
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="run the 70/30 x 5 evaluation protocol")
    p.add_argument("model")
    p.add_argument("input")
    p.add_argument("--by", choices=("direction", "attack"), default=None)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--train-frac", type=float, default=0.7, dest="train_frac")
    p.add_argument("-o", "--output", default=None)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("curve", help="accuracy against training-set size")
    p.add_argument("input")
    p.add_argument("--models", default="rf")
    p.add_argument("--L", dest="l_values", required=True,
                   help="comma-separated training sizes")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("-o", "--output", default=None)
    common(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("serve", help="run the HTTP classification service")
    p.add_argument("--model", default=None)
    p.add_argument("--gan", default=None)
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--cors", default="*")
    common(p)
    p.set_defaults(func=cmd_serve)

    return parser


def _emit_error(args, exc: Exception, code: int) -> int:
    if getattr(args, "json", False):
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
    else:
        print(f"error: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (ConfigError, _UsageError) as exc:
        return _emit_error(args, exc, 1)
    except (DataError, FileNotFoundError) as exc:
        return _emit_error(args, exc, 2)
    except NumericError as exc:
        return _emit_error(args, exc, 3)
    except MousetrapError as exc:
        return _emit_error(args, exc, 2)


if __name__ == "__main__":
    sys.exit(main())
