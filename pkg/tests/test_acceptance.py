"""Acceptance suite: every criterion prints one PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines live.  The
end-to-end criterion builds a 30-shoe synthetic corpus, featurizes six
scenarios, and trains the baseline-only and all-scenario models, so this
module dominates the suite's runtime.
"""

import os
import time
import warnings

import numpy as np
import pytest
from scipy.optimize import linprog
from scipy.stats import rankdata

from solematch import (
    FEATURE_COLUMNS,
    HyperGrid,
    IcpConfig,
    NeighborIndex,
    PointCloud,
    RandomForestMatcher,
    RigidTransform,
    align,
)
from solematch import evalkit, pointcloud as pc, synthgen
from solematch.clustersim import cluster_metrics
from solematch.imagemetrics import PhaseCorrMap, mse, ncc, peak_value, phase_correlation, ssim
from solematch.imgproc import BinaryImage
from solematch.simfeatures import jaccard, min_dist_stats, proportion_overlap
from solematch.synthgen import SynthSpec


def report(name: str, ok: bool, detail: str = "") -> bool:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else ""))
    return ok


def structured_cloud(n=500, seed=0, scale=100.0):
    """Aperiodic synthetic tread cloud (lines plus scattered marks)."""
    rng = np.random.default_rng(seed)
    pts = []
    per_line = (n - n // 5) // 8
    for i, off in enumerate(np.sort(rng.uniform(0, scale, 8))):
        span = rng.uniform(0.5 * scale, scale)
        start = rng.uniform(0, scale - span)
        run = np.linspace(start, start + span, per_line)
        fixed = np.full(per_line, off)
        pts.append(np.column_stack([fixed, run] if i % 2 == 0 else [run, fixed]))
    pts.append(rng.uniform(0, scale, size=(n // 5, 2)))
    pts = np.vstack(pts)[:n]
    return PointCloud(pts + rng.normal(0, 0.2, size=pts.shape))


# -- criterion 1: ICP recovery ------------------------------------------------


class TestIcpRecovery:
    def test_recovery_trials_and_runtime(self):
        rng = np.random.default_rng(1001)
        base = structured_cloud(500, seed=17)
        span = max(base.x.max() - base.x.min(), base.y.max() - base.y.min())
        good = 0
        trials = 100
        for trial in range(trials):
            theta = np.deg2rad(rng.uniform(-30, 30))
            shift = rng.uniform(-span / 2, span / 2, size=2)
            noise = rng.normal(0, 0.5, size=(len(base), 2))
            moved = PointCloud(pc.apply_to_array(RigidTransform(theta, *shift), base.points) + noise)
            result = align(base, moved, IcpConfig(seed=trial))
            aligned = pc.apply(result.transform, moved)
            if min_dist_stats(aligned, base).p50 <= 1.0:
                good += 1

        big = structured_cloud(2000, seed=23)
        moved = pc.apply(RigidTransform(np.deg2rad(8), 15.0, -10.0), big)
        t0 = time.time()
        align(big, moved, IcpConfig(seed=9))
        elapsed = time.time() - t0

        ok = report(
            "icp-recovery",
            good >= 95 and elapsed <= 10.0,
            f"{good}/100 trials good, full align at 2000 pts took {elapsed:.1f}s",
        )
        assert ok


# -- criterion 2: oracle equivalence -------------------------------------------


def lp_transport(a, b):
    n, m = len(a), len(b)
    cost = np.abs(np.subtract.outer(a, b)).ravel()
    a_eq = np.zeros((n + m, n * m))
    for i in range(n):
        a_eq[i, i * m : (i + 1) * m] = 1
    for j in range(m):
        a_eq[n + j, j::m] = 1
    b_eq = np.concatenate([np.full(n, 1 / n), np.full(m, 1 / m)])
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    assert res.success
    return res.fun


class TestOracleEquivalence:
    def test_all_oracles(self):
        rng = np.random.default_rng(1002)

        cloud = PointCloud(rng.uniform(0, 100, size=(200, 2)))
        index = NeighborIndex(cloud)
        queries = rng.uniform(-10, 110, size=(1000, 2))
        kd_exact = True
        for q in queries:
            _, dist = index.nearest(q)
            brute = np.sqrt(((cloud.points - q) ** 2).sum(axis=1)).min()
            if dist != brute:
                kd_exact = False
                break

        scores = np.round(rng.random(20), 2)
        labels = rng.integers(0, 2, size=20)
        labels[:2] = [0, 1]
        pos, neg = scores[labels == 1], scores[labels == 0]
        concordant = sum((1.0 if p > q else 0.5 if p == q else 0.0) for p in pos for q in neg)
        auc_oracle = concordant / (len(pos) * len(neg))
        auc_exact = evalkit.auc_score(scores, labels) == auc_oracle

        emd_ok = True
        for trial in range(3):
            a = rng.normal(size=5)
            b = rng.normal(size=5)
            if abs(evalkit.emd_shift(a, b, standardize=False) - lp_transport(a, b)) > 1e-9:
                emd_ok = False

        q = PointCloud(rng.uniform(0, 50, size=(200, 2)))
        k = PointCloud(rng.uniform(0, 50, size=(200, 2)))
        stats = min_dist_stats(q, k)
        dists = np.sqrt(((q.points[:, None] - k.points[None]) ** 2).sum(axis=2)).min(axis=1)
        oracle = (
            dists.mean(),
            dists.std(),
            *(np.percentile(dists, p) for p in (10, 25, 50, 75, 90)),
        )
        min_dist_ok = all(abs(a - b) <= 1e-9 for a, b in zip(stats.as_tuple(), oracle))

        ok = report(
            "oracle-equivalence",
            kd_exact and auc_exact and emd_ok and min_dist_ok,
            f"kd={kd_exact} auc={auc_exact} emd={emd_ok} mindist={min_dist_ok}",
        )
        assert ok


# -- criterion 3: formula checks ------------------------------------------------


class TestFormulaChecks:
    def test_pinned_formulas(self):
        grid_ok = len(HyperGrid()) == 144 and len(HyperGrid().points()) == 144
        columns_ok = len(FEATURE_COLUMNS) == 35 and FEATURE_COLUMNS[0] == "q_points_count"

        r = np.zeros((10, 10))
        r[4, 7] = 10.0
        pv_ok = peak_value(PhaseCorrMap(r=r, peak_location=(4, 7), peak=10.0)) == 100.0

        rng = np.random.default_rng(1003)
        qa = np.vstack([rng.normal((0, 0), 0.5, (60, 2)), rng.normal((1000, 0), 0.5, (40, 2))])
        kb = np.vstack([rng.normal((0, 0), 0.5, (40, 2)), rng.normal((1000, 0), 0.5, (60, 2))])
        cm = cluster_metrics(PointCloud(qa), PointCloud(kb), 2)
        cpm_ok = abs(cm.cpm - 0.2) < 1e-9

        img = BinaryImage((rng.random((24, 20)) >= 0.5).astype(float))
        shift_ok = True
        for shift in ((3, 5), (11, 2), (0, 9)):
            rolled = BinaryImage(np.roll(img.pixels, shift, axis=(0, 1)))
            if phase_correlation(img, rolled).peak_location != shift:
                shift_ok = False

        ok = report(
            "formula-checks",
            grid_ok and columns_ok and pv_ok and cpm_ok and shift_ok,
            f"grid144={grid_ok} cols35={columns_ok} pv100={pv_ok} cpm0.2={cpm_ok} shift={shift_ok}",
        )
        assert ok


# -- criterion 4: identity suite -------------------------------------------------


class TestIdentitySuite:
    def test_self_pair_identities(self):
        rng = np.random.default_rng(1004)
        cloud = PointCloud(rng.uniform(0, 60, size=(300, 2)))
        img = BinaryImage((rng.random((32, 32)) >= 0.4).astype(float))

        overlap_one = all(proportion_overlap(cloud, cloud, d) == 1.0 for d in (1, 2, 3, 5, 10))
        jaccard_one = all(jaccard(cloud, cloud, d) == 1.0 for d in (0, 1, 2))
        ncc_one = abs(ncc(img, img) - 1.0) < 1e-12
        ssim_one = abs(ssim(img, img) - 1.0) < 1e-12
        mse_zero = mse(img, img) == 0.0
        stats_zero = min_dist_stats(cloud, cloud).as_tuple() == (0.0,) * 7
        cm = cluster_metrics(cloud, cloud, 20)
        cluster_zero = cm.cdm == 0.0 and cm.cpm == 0.0 and cm.twrm == 0.0 and cm.im == 1
        emd_zero = evalkit.emd_shift(cloud.x, cloud.x) == 0.0

        ok = report(
            "identity-suite",
            overlap_one and jaccard_one and ncc_one and ssim_one and mse_zero and stats_zero and cluster_zero and emd_zero,
            f"overlap={overlap_one} jaccard={jaccard_one} ncc={ncc_one} ssim={ssim_one} "
            f"mse0={mse_zero} mindist0={stats_zero} cluster0/im1={cluster_zero} emd0={emd_zero}",
        )
        assert ok


# -- criteria 5 and 6: end-to-end reproduction and shift detection ----------------

END_TO_END_SCENARIOS = ("PristineAN", "Blurry02", "Blurry06", "Blurry10", "PartialToe", "PartialHeel")


@pytest.fixture(scope="module")
def end_to_end(tmp_path_factory):
    t_start = time.time()
    out = tmp_path_factory.mktemp("corpus")
    _, records = synthgen.generate_corpus(
        out,
        n_persons=15,
        feet=("L", "R"),
        sizes=("9",),
        blur_levels=(2, 6, 10),
        wear_visits=(),
        spec=SynthSpec(seed=7),
    )
    assert len({r.shoe_id for r in records}) == 30

    n_jobs = min(4, os.cpu_count() or 1)
    frames = {}
    for scenario in END_TO_END_SCENARIOS:
        train_set, test_set = evalkit.build_scenario_pairsets(records, scenario, 0.7, seed=7)
        frames[scenario] = {
            "train": evalkit.featurize_pairs(train_set, seed=7, n_jobs=n_jobs),
            "test": evalkit.featurize_pairs(test_set, seed=7, n_jobs=n_jobs),
        }

    params = {"n_trees": 400, "max_depth": None, "min_split": 2, "min_leaf": 1}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bundle = evalkit.run_experiment_matrix(
            frames, regimes=("baseline", "full"), params=params, seed=7, n_jobs=1
        )
    elapsed = time.time() - t_start
    return {"frames": frames, "bundle": bundle, "elapsed": elapsed, "n_jobs": n_jobs}


class TestEndToEndReproduction:
    def test_full_vs_baseline(self, end_to_end):
        acc = end_to_end["bundle"]["accuracy"]
        full_pristine = acc["full"]["PristineAN"]
        full_blur6 = acc["full"]["Blurry06"]
        baseline_blur6 = acc["baseline"]["Blurry06"]
        # core-second budget: 30 minutes on four desktop cores
        core_seconds = end_to_end["elapsed"] * (os.cpu_count() or 1)
        within_budget = core_seconds <= 30 * 60 * 4

        ok = report(
            "end-to-end-reproduction",
            full_pristine >= 0.90
            and full_blur6 >= 0.80
            and (full_blur6 - baseline_blur6) >= 0.10
            and within_budget,
            f"full pristine={full_pristine:.3f}, full blur6={full_blur6:.3f}, "
            f"baseline blur6={baseline_blur6:.3f}, core-seconds={core_seconds:.0f}",
        )
        assert ok


class TestDistributionShift:
    def test_emd_ratio_for_k_overlap(self, end_to_end):
        frames = end_to_end["frames"]

        def mated_values(scenario):
            rows = [frames[scenario][sp] for sp in ("train", "test")]
            import pandas as pd

            merged = pd.concat(rows, ignore_index=True)
            return merged.loc[merged["label"] == 1, "k_pct_threshold_3"].to_numpy(dtype=float)

        pristine = mated_values("PristineAN")
        blur10 = mated_values("Blurry10")
        rng = np.random.default_rng(7)
        perm = rng.permutation(len(pristine))
        half = len(pristine) // 2
        resample = evalkit.emd_shift(pristine[perm[:half]], pristine[perm[half:]])
        shift = evalkit.emd_shift(pristine, blur10)
        ratio = shift / max(resample, 1e-12)

        ok = report(
            "distribution-shift",
            ratio >= 5.0,
            f"pristine-vs-blur10 EMD={shift:.3f}, resample EMD={resample:.3f}, ratio={ratio:.1f}",
        )
        assert ok


# -- criterion 7: determinism ----------------------------------------------------


class TestDeterminism:
    def test_byte_identical_models_and_posteriors(self):
        rng = np.random.default_rng(1005)
        n = 120
        y = rng.integers(0, 2, size=n)
        X = rng.normal(size=(n, 35))
        X[:, 5] += y * 2.0
        cols = list(FEATURE_COLUMNS)

        a = RandomForestMatcher(n_trees=24, seed=7, n_jobs=1).fit(X, y, columns=cols)
        b = RandomForestMatcher(n_trees=24, seed=7, n_jobs=1).fit(X, y, columns=cols)
        c = RandomForestMatcher(n_trees=24, seed=7, n_jobs=2).fit(X, y, columns=cols)

        json_ok = a.to_json() == b.to_json() == c.to_json()
        post_ok = (
            np.array_equal(a.predict_proba(X), b.predict_proba(X))
            and np.array_equal(a.predict_proba(X), c.predict_proba(X))
        )

        ok = report(
            "determinism",
            json_ok and post_ok,
            f"model-json={json_ok} posteriors={post_ok} (serial and 2-way parallel)",
        )
        assert ok
