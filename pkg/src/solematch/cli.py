"""Command-line interface for the matching pipeline and experiment kit."""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np
import pandas as pd

from . import evalkit, icp as icp_mod, imgproc, pointcloud as pc, synthgen
from .features import FEATURE_COLUMNS, PAIR_META_COLUMNS
from .forest import DEFAULT_PARAMS, HyperGrid, RandomForestMatcher, grid_search_cv
from .pipeline import PairFeaturizer


def machine_errors(fn):
    """Convert exceptions into machine-readable stderr JSON and exit code 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except Exception as exc:
            sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
            sys.exit(1)

    return wrapper


@click.group()
def main():
    """Outsole impression matching tools."""


@main.command()
@click.argument("image", type=click.Path(exists=True))
@click.argument("out_csv", type=click.Path())
@click.option("--darkness-threshold", default=230.0, show_default=True)
@machine_errors
def extract(image, out_csv, darkness_threshold):
    """Edge-detect IMAGE and write the extracted point cloud to OUT_CSV."""
    img = imgproc.load_gray(image)
    cloud = imgproc.extract_points(imgproc.edge_detect(img), darkness_threshold)
    cloud.to_csv(out_csv)
    click.echo(json.dumps({"points": len(cloud)}))


@main.command()
@click.argument("q_csv", type=click.Path(exists=True))
@click.argument("k_csv", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="Write the transform JSON here.")
@click.option("--seed", default=0, show_default=True)
@machine_errors
def align(q_csv, k_csv, out, seed):
    """Align the K cloud onto the Q cloud and report the winning transform."""
    q = pc.PointCloud.from_csv(q_csv)
    k = pc.PointCloud.from_csv(k_csv)
    result = icp_mod.align(q, k, icp_mod.IcpConfig(seed=seed))
    payload = json.dumps(result.to_dict())
    if out:
        Path(out).write_text(payload)
    click.echo(payload)


@main.command()
@click.argument("q_image", type=click.Path(exists=True))
@click.argument("k_image", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="Append the feature row to this CSV.")
@click.option("--seed", default=0, show_default=True)
@click.option("--cut", type=click.Choice(pc.CUT_REGIONS), default=None, help="Cut Q to a partial print.")
@click.option("--foot", type=click.Choice(pc.FEET), default="left", show_default=True)
@click.option("--reflect-k", is_flag=True, help="Mirror K before matching.")
@machine_errors
def features(q_image, k_image, out, seed, cut, foot, reflect_k):
    """Run the full pipeline on an image pair and print the 35 features."""
    featurizer = PairFeaturizer(seed=seed)
    result = featurizer.featurize_images(
        imgproc.load_gray(q_image),
        imgproc.load_gray(k_image),
        q_cut=(cut, foot) if cut else None,
        reflect_k=reflect_k,
    )
    row = result.features.to_dict()
    if out:
        frame = pd.DataFrame([row])
        frame.to_csv(out, index=False, mode="a", header=not Path(out).exists())
    click.echo(json.dumps({"features": row, "alignment": result.alignment.to_dict()}))


@main.command()
@click.argument("features_csv", type=click.Path(exists=True))
@click.argument("model_out", type=click.Path())
@click.option("--grid", type=click.Choice(["none", "full", "small"]), default="none", show_default=True,
              help="Hyperparameter search: none trains the default configuration.")
@click.option("--folds", default=5, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--n-jobs", default=1, show_default=True)
@machine_errors
def train(features_csv, model_out, grid, folds, seed, n_jobs):
    """Train a forest on a feature CSV (columns per the pipeline, plus label)."""
    frame = evalkit.load_features(features_csv)
    X = evalkit.feature_matrix(frame, FEATURE_COLUMNS)
    y = frame["label"].to_numpy(dtype=np.int64)
    groups = frame["q_shoe_id"].to_numpy() if "q_shoe_id" in frame.columns else None
    if grid == "none":
        params = dict(DEFAULT_PARAMS)
        table = None
    else:
        hyper = (
            HyperGrid()
            if grid == "full"
            else HyperGrid(n_trees=(100, 200), max_depth=(None, 10), min_split=(2,), min_leaf=(1,))
        )
        params, table = grid_search_cv(X, y, hyper, folds=folds, seed=seed, groups=groups, n_jobs=n_jobs)
    model = RandomForestMatcher(seed=seed, n_jobs=n_jobs, **params)
    model.fit(X, y, columns=list(FEATURE_COLUMNS))
    model.save(model_out)
    out = {"params": params, "n_rows": int(len(y))}
    if table is not None:
        out["grid_points"] = len(table)
        out["best_cv_accuracy"] = max(r["cv_accuracy"] for r in table)
    click.echo(json.dumps(out))


@main.command()
@click.argument("model_file", type=click.Path(exists=True))
@click.argument("q_image", type=click.Path(exists=True))
@click.argument("k_image", type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True)
@machine_errors
def predict(model_file, q_image, k_image, seed):
    """Posterior probability that the pair of images is mated."""
    model = RandomForestMatcher.load(model_file)
    featurizer = PairFeaturizer(seed=seed)
    result = featurizer.featurize_images(imgproc.load_gray(q_image), imgproc.load_gray(k_image))
    posterior = model.predict_proba(result.features.values)
    click.echo(json.dumps({"posterior": float(posterior)}))


@main.command()
@click.argument("model_file", type=click.Path(exists=True))
@click.argument("features_csv", type=click.Path(exists=True))
@machine_errors
def evaluate(model_file, features_csv):
    """Evaluate a trained model on a labeled feature CSV."""
    model = RandomForestMatcher.load(model_file)
    frame = evalkit.load_features(features_csv)
    report = evalkit.evaluate(model, frame)
    click.echo(json.dumps(report.to_dict()))


@main.command()
@click.argument("out_dir", type=click.Path())
@click.option("--persons", default=15, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--blur-levels", default="2,4,6,8,10", show_default=True)
@machine_errors
def synth(out_dir, persons, seed, blur_levels):
    """Generate a synthetic outsole corpus and registry under OUT_DIR."""
    levels = tuple(int(v) for v in blur_levels.split(",") if v)
    registry, records = synthgen.generate_corpus(
        out_dir, n_persons=persons, blur_levels=levels, spec=synthgen.SynthSpec(seed=seed)
    )
    click.echo(json.dumps({"registry": str(registry), "records": len(records)}))


@main.command()
@click.argument("registry", type=click.Path(exists=True))
@click.argument("out_dir", type=click.Path())
@click.option("--regimes", default="baseline,full", show_default=True,
              help="Comma list from: baseline,full,full_indicator,category,scenario,full_loo,category_loo (loo = full_loo).")
@click.option("--scenarios", default="", help="Comma list; empty means every scenario the registry supports.")
@click.option("--seed", default=7, show_default=True)
@click.option("--n-trees", default=DEFAULT_PARAMS["n_trees"], show_default=True)
@click.option("--n-jobs", default=1, show_default=True)
@click.option("--train-fraction", default=0.7, show_default=True)
@machine_errors
def experiment(registry, out_dir, regimes, scenarios, seed, n_trees, n_jobs, train_fraction):
    """Featurize scenario pairs from REGISTRY, train regimes, and emit reports."""
    records = evalkit.load_registry(registry)
    wanted = tuple(s for s in scenarios.split(",") if s) or evalkit.SCENARIOS
    regime_list = tuple("full_loo" if r == "loo" else r for r in regimes.split(",") if r)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    frames = {}
    for scenario in wanted:
        try:
            train_set, test_set = evalkit.build_scenario_pairsets(records, scenario, train_fraction, seed)
        except evalkit.PairingError as exc:
            click.echo(json.dumps({"scenario": scenario, "skipped": str(exc)}), err=True)
            continue
        frames[scenario] = {}
        for split, pairset in (("train", train_set), ("test", test_set)):
            cache = out / f"features_{scenario}_{split}.csv"
            if cache.exists():
                frame = evalkit.load_features(cache)
            else:
                frame = evalkit.featurize_pairs(pairset, seed=seed, n_jobs=n_jobs)
                evalkit.save_features(frame, cache)
            frames[scenario][split] = frame

    params = dict(DEFAULT_PARAMS, n_trees=n_trees)
    bundle = evalkit.run_experiment_matrix(frames, regimes=regime_list, params=params, seed=seed, n_jobs=n_jobs)
    matrix = pd.DataFrame(bundle["accuracy"]).T
    matrix.to_csv(out / "accuracy_matrix.csv")
    bundle["emd_mated"].to_csv(out / "emd_mated.csv")
    bundle["emd_non_mated"].to_csv(out / "emd_non_mated.csv")
    (out / "reports.json").write_text(json.dumps(bundle["reports"], indent=2))
    population = pd.concat([frames[s]["test"] for s in frames], ignore_index=True)
    evalkit.save_features(population[list(FEATURE_COLUMNS) + list(PAIR_META_COLUMNS)], out / "population.csv")
    click.echo(json.dumps({"accuracy": bundle["accuracy"], "out_dir": str(out)}))


@main.command()
@click.option("--port", default=None, type=int, help="Defaults to SOLE_PORT or 8000.")
@click.option("--model-dir", type=click.Path(), default=None)
@click.option("--population-dir", type=click.Path(), default=None)
@click.option("--static-dir", type=click.Path(), default=None, help="Built UI bundle to serve at /.")
@click.option("--workers", default=2, show_default=True)
@click.option("--seed", default=None, type=int)
@machine_errors
def serve(port, model_dir, population_dir, static_dir, workers, seed):
    """Start the HTTP service."""
    import os

    import uvicorn

    from .service import create_app

    port = port or int(os.environ.get("SOLE_PORT", "8000"))
    app = create_app(
        model_dir=model_dir,
        population_dir=population_dir,
        seed=seed,
        workers=workers,
        static_dir=static_dir,
    )
    uvicorn.run(app, host="0.0.0.0", port=port)


if __name__ == "__main__":
    main()
