"""Command line surface.

One subcommand per pipeline stage: estimate, train-ct, apply-ct, gains,
train-cbt, apply-cbt, eval, sae, hist, synth. Machine-readable outputs
are full-precision CSV (plus rendered PNG figures on the report paths);
humans get fixed four-decimal tables on standard output.

Exit codes: 0 success, 2 usage, 3 data, 4 numerical.
"""

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import reports
from .core import normalize, rb_chromaticity
from .data import (
    DatasetManifest,
    SynthConfig,
    load_image,
    load_manifest,
    write_synth_dataset,
)
from .errors import ColorTigerError, DataError, NumericalError, UsageError
from .estimators import gray_world, shades_of_gray, sog_sweep, white_patch
from .evaluate import ImageEstimates, baseline_errors, cross_validate, train_size_sweep, vote_centers
from .metrics import angular_errors, nearest_angle_histogram, sets_angular_error, summarize
from .parallel import ordered_map
from .tiger import (
    BengalModel,
    GainTriplet,
    TigerModel,
    cluster_estimate_pool,
    gains_from_estimates,
    load_model,
    save_model,
    vote,
)

THREADS_ENV = "COLORTIGER_THREADS"


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _triplet(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected r,g,b, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"non-numeric triplet {text!r}") from exc


def _add_common(p, seed_required=False):
    p.add_argument("--config", help="key=value file supplying flag defaults")
    p.add_argument("--threads", type=int, default=_default_threads(),
                   help=f"worker threads (default ${THREADS_ENV} or 1)")
    if seed_required:
        p.add_argument("--seed", type=int, required=True,
                       help="seed for every stochastic step")


def _add_corpus(p):
    p.add_argument("--manifest", required=True, help="dataset manifest CSV")
    p.add_argument("--profile", choices=("none", "cube"), default="none",
                   help="preprocessing profile applied on load")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="colortiger",
        description="Unsupervised two-center illuminant estimation and evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)
    parsers = {}

    p = sub.add_parser("estimate", help="run a statistics estimator over images")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--manifest", help="dataset manifest CSV")
    source.add_argument("--image", help="a single image file, no ground truth needed")
    p.add_argument("--profile", choices=("none", "cube"), default="none",
                   help="preprocessing profile applied on load")
    p.add_argument("--method", choices=("gw", "wp", "sog"), default="gw")
    p.add_argument("--p", type=int, default=6, help="Minkowski power for sog")
    p.add_argument("--out", help="write estimates CSV here")
    _add_common(p)
    p.set_defaults(func=cmd_estimate)
    parsers["estimate"] = p

    p = sub.add_parser("train-ct", help="learn a two-center model without ground truth")
    _add_corpus(p)
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--n", type=int, default=8, help="sweep upper power")
    p.add_argument("--t", type=float, default=0.3, help="trim fraction")
    p.add_argument("--provenance", default="", help="free-form dataset identifier")
    _add_common(p, seed_required=True)
    p.set_defaults(func=cmd_train_ct)
    parsers["train-ct"] = p

    p = sub.add_parser("apply-ct", help="estimate illuminants with a trained model")
    _add_corpus(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="write estimates CSV here")
    _add_common(p)
    p.set_defaults(func=cmd_apply_ct)
    parsers["apply-ct"] = p

    p = sub.add_parser("gains", help="learn per-channel sensor gains")
    _add_corpus(p)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--out", help="write gains as key-value text here")
    _add_common(p)
    p.set_defaults(func=cmd_gains)
    parsers["gains"] = p

    p = sub.add_parser("train-cbt", help="learn a cross-sensor model")
    _add_corpus(p)
    p.add_argument("--target-manifest", required=True,
                   help="manifest of the sensor the model will be applied to")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--t", type=float, default=0.3)
    p.add_argument("--provenance", default="")
    _add_common(p, seed_required=True)
    p.set_defaults(func=cmd_train_cbt)
    parsers["train-cbt"] = p

    p = sub.add_parser("apply-cbt", help="apply a cross-sensor model")
    _add_corpus(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(func=cmd_apply_cbt)
    parsers["apply-cbt"] = p

    p = sub.add_parser("eval", help="cross-validated evaluation with error statistics")
    _add_corpus(p)
    p.add_argument("--folds", type=int, default=3)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--t", type=float, default=0.3)
    p.add_argument("--model", help="also evaluate this pretrained model on the whole set")
    p.add_argument("--train-limit", type=int, nargs="+",
                   help="emit a train-size curve for these per-fold caps")
    p.add_argument("--out-dir", required=True)
    _add_common(p, seed_required=True)
    p.set_defaults(func=cmd_eval)
    parsers["eval"] = p

    p = sub.add_parser("sae", help="optimal-assignment angular error between sets")
    _add_corpus(p)
    p.add_argument("--estimator", choices=("gw", "wp", "sog"), default="gw")
    p.add_argument("--p", type=int, default=6)
    p.add_argument("--out-dir")
    _add_common(p)
    p.set_defaults(func=cmd_sae)
    parsers["sae"] = p

    p = sub.add_parser("hist", help="nearest-angle histograms in both directions")
    _add_corpus(p)
    p.add_argument("--estimator", choices=("gw", "wp", "sog", "sweep"), default="sweep")
    p.add_argument("--p", type=int, default=6)
    p.add_argument("--n", type=int, default=8, help="sweep upper power")
    p.add_argument("--bin-width", type=float, default=0.25)
    p.add_argument("--out-dir", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_hist)
    parsers["hist"] = p

    p = sub.add_parser("synth", help="generate a synthetic two-mode corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--images", type=int, default=500)
    p.add_argument("--pixels", type=int, default=64)
    p.add_argument("--mode-a", type=_triplet, default=(1.0, 0.9, 0.7))
    p.add_argument("--mode-b", type=_triplet, default=(0.7, 0.9, 1.0))
    p.add_argument("--spread", type=float, default=2.0)
    p.add_argument("--mix", type=float, default=0.5)
    p.add_argument("--gains", type=_triplet, default=(1.0, 1.0, 1.0))
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--outlier-fraction", type=float, default=0.0)
    _add_common(p, seed_required=True)
    p.set_defaults(func=cmd_synth)
    parsers["synth"] = p

    return parser, parsers


def _read_kv_file(path) -> dict:
    values = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"config line without '=': {line!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _preload_config(parsers, argv) -> None:
    """Turn key=value file entries into parser defaults before parsing.

    Explicit flags override the injected defaults; a default also lifts
    the required marker so the file alone can satisfy a flag.
    """
    command = next((tok for tok in argv if not tok.startswith("-")), None)
    config_path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
        elif tok.startswith("--config="):
            config_path = tok.split("=", 1)[1]
    if command not in parsers or not config_path:
        return
    values = _read_kv_file(config_path)
    subparser = parsers[command]
    for action in subparser._actions:
        dest = action.dest
        if dest in ("help", "config") or dest not in values:
            continue
        text = values[dest]
        convert = action.type or str
        if action.nargs in ("+", "*"):
            parsed = [convert(v) for v in text.split()]
        else:
            parsed = convert(text)
        subparser.set_defaults(**{dest: parsed})
        action.required = False


def _estimator_fn(method: str, p: int):
    if method == "gw":
        return "gray_world", gray_world
    if method == "wp":
        return "white_patch", white_patch
    return f"shades_of_gray_p{p}", lambda img: shades_of_gray(img, p)


def _load_corpus_estimates(manifest: DatasetManifest, n: int, workers: int) -> list:
    """Per-image estimate bundles, decoding each image exactly once."""
    def worker(entry):
        img = load_image(entry.path, manifest.profile)
        return ImageEstimates(gw=gray_world(img), wp=white_patch(img),
                              sweep=sog_sweep(img, n))
    return ordered_map(worker, manifest.entries, workers)


def cmd_estimate(args) -> int:
    name, fn = _estimator_fn(args.method, args.p)
    if args.image:
        estimate = fn(load_image(args.image, args.profile))
        print(f"{name}: {estimate[0]:.4f} {estimate[1]:.4f} {estimate[2]:.4f}")
        if args.out:
            reports.write_estimates_csv(
                args.out, [(Path(args.image).name, name, estimate, None)])
            print(f"estimate written to {args.out}")
        return 0
    manifest = load_manifest(args.manifest, args.profile)
    def worker(entry):
        return fn(load_image(entry.path, manifest.profile))
    estimates = ordered_map(worker, manifest.entries, args.threads)
    errors = angular_errors(np.stack(estimates), manifest.ground_truths())
    rows = [(str(e.path.name), name, est, err)
            for e, est, err in zip(manifest.entries, estimates, errors)]
    if args.out:
        reports.write_estimates_csv(args.out, rows)
    print(f"{name} over {len(rows)} images")
    print(reports.summary_table_text([(name, summarize(errors))]))
    if args.out:
        print(f"estimates written to {args.out}")
    return 0


def cmd_train_ct(args) -> int:
    manifest = load_manifest(args.manifest, args.profile)
    estimates = _load_corpus_estimates(manifest, args.n, args.threads)
    pool = np.vstack([e.sweep for e in estimates])
    centers = cluster_estimate_pool(pool, args.t, args.seed)
    provenance = args.provenance or Path(args.manifest).stem
    model = TigerModel(centers=centers, n=args.n, t=args.t, seed=args.seed,
                       provenance=provenance)
    save_model(model, args.out)
    for i, center in enumerate(model.centers):
        chroma = rb_chromaticity(center)
        label = "warm" if i == 0 else "cool"
        print(f"center{i} ({label}): rb chromaticity ({chroma.r:.4f}, {chroma.b:.4f})")
    print(f"model written to {args.out}")
    return 0


def _apply_with_model(args, expect_method: str):
    manifest = load_manifest(args.manifest, args.profile)
    model = load_model(args.model)
    is_bengal = isinstance(model, BengalModel)
    if expect_method == "ct" and is_bengal:
        raise DataError(f"{args.model} holds a cross-sensor model; use apply-cbt")
    if expect_method == "cbt" and not is_bengal:
        raise DataError(f"{args.model} holds a same-sensor model; use apply-ct")

    if is_bengal:
        gains = model.target_gains.as_array()
        def worker(entry):
            img = load_image(entry.path, manifest.profile)
            e_gw = normalize(gray_world(img) / gains)
            e_wp = normalize(white_patch(img) / gains)
            return normalize(model.centers[vote(model.centers, e_gw, e_wp)] * gains)
        method_name = "color_bengal_tiger"
    else:
        def worker(entry):
            img = load_image(entry.path, manifest.profile)
            return model.centers[vote(model.centers, gray_world(img), white_patch(img))]
        method_name = "color_tiger"

    estimates = ordered_map(worker, manifest.entries, args.threads)
    errors = angular_errors(np.stack(estimates), manifest.ground_truths())
    rows = [(str(e.path.name), method_name, est, err)
            for e, est, err in zip(manifest.entries, estimates, errors)]
    if args.out:
        reports.write_estimates_csv(args.out, rows)
    distinct = np.unique(np.round(np.stack(estimates), 12), axis=0).shape[0]
    print(f"{method_name}: {len(rows)} images, {distinct} distinct output value(s)")
    print(reports.summary_table_text([(method_name, summarize(errors))]))
    if args.out:
        print(f"estimates written to {args.out}")
    return 0


def cmd_apply_ct(args) -> int:
    return _apply_with_model(args, "ct")


def cmd_apply_cbt(args) -> int:
    return _apply_with_model(args, "cbt")


def cmd_gains(args) -> int:
    manifest = load_manifest(args.manifest, args.profile)
    estimates = _load_corpus_estimates(manifest, args.n, args.threads)
    gains = gains_from_estimates(np.vstack([e.sweep for e in estimates]))
    print(f"gains: g_r={gains.g_r:.4f} g_g={gains.g_g:.4f} g_b={gains.g_b:.4f}")
    if args.out:
        lines = [f"g_r {reports.full(gains.g_r)}",
                 f"g_g {reports.full(gains.g_g)}",
                 f"g_b {reports.full(gains.g_b)}"]
        Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"gains written to {args.out}")
    return 0


def cmd_train_cbt(args) -> int:
    train_manifest = load_manifest(args.manifest, args.profile)
    target_manifest = load_manifest(args.target_manifest, args.profile)
    train_est = _load_corpus_estimates(train_manifest, args.n, args.threads)
    target_est = _load_corpus_estimates(target_manifest, args.n, args.threads)
    train_pool = np.vstack([e.sweep for e in train_est])
    source_gains = gains_from_estimates(train_pool)
    target_gains = gains_from_estimates(np.vstack([e.sweep for e in target_est]))
    neutral = train_pool / source_gains.as_array()
    neutral /= np.linalg.norm(neutral, axis=1)[:, None]
    centers = cluster_estimate_pool(neutral, args.t, args.seed)
    provenance = args.provenance or Path(args.manifest).stem
    model = BengalModel(centers=centers, n=args.n, t=args.t, seed=args.seed,
                        provenance=provenance, source_gains=source_gains,
                        target_gains=target_gains)
    save_model(model, args.out)
    print(f"source gains: {source_gains.g_r:.4f} {source_gains.g_g:.4f} {source_gains.g_b:.4f}")
    print(f"target gains: {target_gains.g_r:.4f} {target_gains.g_g:.4f} {target_gains.g_b:.4f}")
    print(f"model written to {args.out}")
    return 0


def cmd_eval(args) -> int:
    manifest = load_manifest(args.manifest, args.profile)
    estimates = _load_corpus_estimates(manifest, args.n, args.threads)
    gts = manifest.ground_truths()
    result = cross_validate(estimates, gts, args.folds, args.seed, t=args.t)

    rows = [("color_tiger", result.pooled_summary)]
    rows += [(f"color_tiger/fold{fr.fold}", s)
             for fr, s in zip(result.folds, result.fold_summaries)]
    for name, errs in baseline_errors(estimates, gts).items():
        rows.append((name, summarize(errs)))
    if args.model:
        model = load_model(args.model)
        if isinstance(model, BengalModel):
            raise DataError("eval expects a same-sensor model; use apply-cbt to score one")
        chosen = vote_centers(model.centers, estimates)
        rows.append(("color_tiger_pretrained", summarize(angular_errors(chosen, gts))))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports.write_summary_csv(out / "summary.csv", rows)
    per_image = [(str(manifest.entries[idx].path.name), f"color_tiger/fold{fold}", est, err)
                 for idx, fold, est, err in result.per_image_rows()]
    reports.write_estimates_csv(out / "per_image.csv", per_image)
    from . import plots
    plots.save_summary_png(out / "summary.png", rows[:1] + rows[1 + len(result.folds):],
                           "angular error statistics")
    if args.train_limit:
        curve = train_size_sweep(estimates, gts, args.folds, args.seed,
                                 args.train_limit, t=args.t)
        reports.write_curve_csv(out / "train_size_curve.csv", curve)
        plots.save_curve_png(out / "train_size_curve.png", curve,
                             "median error vs training size")
    print(f"{args.folds}-fold cross-validation over {len(estimates)} images")
    print(reports.summary_table_text(rows))
    print(f"reports written to {out}")
    return 0


def cmd_sae(args) -> int:
    manifest = load_manifest(args.manifest, args.profile)
    name, fn = _estimator_fn(args.estimator, args.p)
    def worker(entry):
        return fn(load_image(entry.path, manifest.profile))
    estimates = np.stack(ordered_map(worker, manifest.entries, args.threads))
    gts = manifest.ground_truths()
    result = sets_angular_error(gts, estimates)
    identity_mean = float(np.mean(np.diagonal(result.cost)))
    print(f"SAE ({name}): {result.mean_angle:.4f} deg over {len(gts)} pairs "
           f"(identity pairing {identity_mean:.4f} deg)")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        reports.write_assignment_csv(out / "assignment.csv", result)
        from . import plots
        plots.save_assignment_png(out / "sae_scatter.png", gts, estimates, result,
                                  f"optimal assignment, {name}")
        print(f"assignment written to {out}")
    return 0


def cmd_hist(args) -> int:
    manifest = load_manifest(args.manifest, args.profile)
    gts = manifest.ground_truths()
    if args.estimator == "sweep":
        name = f"sog_sweep_n{args.n}"
        def worker(entry):
            return sog_sweep(load_image(entry.path, manifest.profile), args.n)
        estimates = np.vstack(ordered_map(worker, manifest.entries, args.threads))
    else:
        name, fn = _estimator_fn(args.estimator, args.p)
        def worker(entry):
            return fn(load_image(entry.path, manifest.profile))
        estimates = np.stack(ordered_map(worker, manifest.entries, args.threads))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    from . import plots
    gt_to_est = nearest_angle_histogram(gts, estimates, args.bin_width)
    est_to_gt = nearest_angle_histogram(estimates, gts, args.bin_width)
    reports.write_histogram_csv(out / "hist_gt_to_est.csv", gt_to_est)
    reports.write_histogram_csv(out / "hist_est_to_gt.csv", est_to_gt)
    plots.save_histogram_png(out / "hist_gt_to_est.png", gt_to_est,
                             f"ground truth to closest {name}")
    plots.save_histogram_png(out / "hist_est_to_gt.png", est_to_gt,
                             f"{name} to closest ground truth")
    print(f"{name}: {estimates.shape[0]} estimates vs {gts.shape[0]} ground truths")
    print(f"histograms written to {out}")
    return 0


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        image_count=args.images, pixels_per_image=args.pixels,
        mode_a=args.mode_a, mode_b=args.mode_b, mode_spread=args.spread,
        mode_mix=args.mix, gains=GainTriplet(*args.gains), noise_sigma=args.noise,
        outlier_fraction=args.outlier_fraction, seed=args.seed)
    manifest = write_synth_dataset(cfg, args.out_dir)
    print(f"wrote {len(manifest.entries)} images to {args.out_dir}")
    print(f"manifest: {Path(args.out_dir) / 'manifest.csv'}")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, parsers = _build_parser()
    try:
        _preload_config(parsers, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return exc.exit_code
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return exc.exit_code
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ColorTigerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
