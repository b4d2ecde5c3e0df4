"""Scenario construction, train/test hygiene, and model evaluation.

A registry CSV describes every available print (who wore the shoe, which
foot, which visit, how blurry the capture is).  From it this module builds
mated and non-mated pairs for each comparison scenario, keeps shoes strictly
on one side of the train/test split, featurizes pairs, trains models under
several training regimes, and quantifies how feature distributions shift
between scenarios.
"""

from __future__ import annotations

import csv
import warnings
import zlib
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.stats import gaussian_kde, rankdata, wasserstein_distance

from .errors import DegenerateCutError, EmptyCloudError, PairingError
from .features import FEATURE_COLUMNS, INDICATOR_COLUMNS, PAIR_META_COLUMNS
from .forest import RandomForestMatcher
from .imgproc import load_gray
from .pipeline import PairFeaturizer

SCENARIOS = (
    "PristineAN",
    "PartialToe",
    "PartialHeel",
    "PartialInside",
    "PartialOutside",
    "PristineTime2",
    "PristineTime3",
    "Blurry02",
    "Blurry04",
    "Blurry06",
    "Blurry08",
    "Blurry10",
    "Pristine150",
)

SCENARIO_CATEGORY = {
    "PristineAN": "pristine",
    "Pristine150": "pristine",
    "PristineTime2": "pristine",
    "PristineTime3": "pristine",
    "PartialToe": "partial",
    "PartialHeel": "partial",
    "PartialInside": "partial",
    "PartialOutside": "partial",
    "Blurry02": "blurry",
    "Blurry04": "blurry",
    "Blurry06": "blurry",
    "Blurry08": "blurry",
    "Blurry10": "blurry",
}

REGISTRY_COLUMNS = (
    "shoe_id",
    "person_id",
    "model",
    "size",
    "foot",
    "visit",
    "blur_level",
    "replicate",
    "image_path",
)

_PARTIAL_REGION = {
    "PartialToe": "toe",
    "PartialHeel": "heel",
    "PartialInside": "inside",
    "PartialOutside": "outside",
}
_TIME_VISIT = {"PristineTime2": 2, "PristineTime3": 3}
_BLUR_LEVEL = {f"Blurry{lvl:02d}": lvl for lvl in (2, 4, 6, 8, 10)}


@dataclass(frozen=True)
class ShoeRecord:
    shoe_id: str
    person_id: str
    model: str
    size: str
    foot: str
    visit: int
    blur_level: int
    replicate: int
    image_path: str


@dataclass(frozen=True)
class Pair:
    pair_id: str
    label: int
    q: ShoeRecord
    k: ShoeRecord
    q_cut_region: str | None = None
    reflect_k: bool = False


@dataclass
class ScenarioPairSet:
    scenario: str
    split: str
    pairs: list = field(default_factory=list)

    @property
    def mated(self) -> list:
        return [p for p in self.pairs if p.label == 1]

    @property
    def non_mated(self) -> list:
        return [p for p in self.pairs if p.label == 0]


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    auc: float | None
    optimal_threshold: float | None
    sensitivity: float | None
    specificity: float | None
    tp: int
    fp: int
    tn: int
    fn: int

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "auc": self.auc,
            "optimal_threshold": self.optimal_threshold,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "confusion": {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn},
        }


# -- registry I/O -------------------------------------------------------


def load_registry(path) -> list[ShoeRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(REGISTRY_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise PairingError(f"registry is missing columns: {sorted(missing)}")
        for row in reader:
            records.append(
                ShoeRecord(
                    shoe_id=row["shoe_id"],
                    person_id=row["person_id"],
                    model=row["model"],
                    size=str(row["size"]),
                    foot=row["foot"],
                    visit=int(row["visit"]),
                    blur_level=int(row["blur_level"]),
                    replicate=int(row["replicate"]),
                    image_path=row["image_path"],
                )
            )
    return records


def write_registry(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REGISTRY_COLUMNS)
        for r in records:
            writer.writerow(
                [r.shoe_id, r.person_id, r.model, r.size, r.foot, r.visit, r.blur_level, r.replicate, r.image_path]
            )


# -- pair construction ---------------------------------------------------


def _sorted_records(records) -> list[ShoeRecord]:
    return sorted(records, key=lambda r: (r.shoe_id, r.visit, r.blur_level, r.replicate))


def _by_shoe(records) -> dict:
    out: dict[str, list[ShoeRecord]] = {}
    for r in _sorted_records(records):
        out.setdefault(r.shoe_id, []).append(r)
    return out


def _class_partners(shoes: dict, require_same_model: bool = True):
    """Ordered shoe-id pairs from different people matching class characteristics."""
    ids = sorted(shoes)
    partners = []
    for i, s1 in enumerate(ids):
        for s2 in ids[i + 1 :]:
            a, b = shoes[s1][0], shoes[s2][0]
            if a.person_id == b.person_id:
                continue
            if a.size != b.size or a.foot != b.foot:
                continue
            if require_same_model and a.model != b.model:
                continue
            partners.append((s1, s2))
    return partners


def _balance(km: list, knm: list, seed: int) -> tuple[list, list]:
    """Downsample the larger class to the smaller so pair sets are balanced."""
    rng = np.random.Generator(np.random.PCG64(seed))
    target = min(len(km), len(knm))
    def sample(pairs):
        if len(pairs) <= target:
            return pairs
        keep = np.sort(rng.choice(len(pairs), size=target, replace=False))
        return [pairs[i] for i in keep]
    return sample(km), sample(knm)


def build_pairs(records, scenario: str, seed: int = 0, balance: bool = True) -> list[Pair]:
    """Mated and non-mated pairs for one scenario from one side of the split.

    Mates are always two different captures of the same physical outsole.
    Non-mates come from different outsoles that agree in class
    characteristics (model, size, foot), except in the unseen-model scenario
    where the reflected opposite foot of the same pair of shoes is used.
    """
    if scenario not in SCENARIOS:
        raise PairingError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")

    if scenario in _BLUR_LEVEL:
        km, knm = _blur_pairs(records, _BLUR_LEVEL[scenario], scenario)
    elif scenario in _TIME_VISIT:
        km, knm = _time_pairs(records, _TIME_VISIT[scenario], scenario)
    elif scenario == "Pristine150":
        km, knm = _reflected_pairs(records, scenario)
    else:
        km, knm = _pristine_pairs(records, scenario)
        if scenario in _PARTIAL_REGION:
            region = _PARTIAL_REGION[scenario]
            km = [replace(p, q_cut_region=region) for p in km]
            knm = [replace(p, q_cut_region=region) for p in knm]

    if not km:
        raise PairingError(f"{scenario}: no shoe offers two distinct captures for mated pairs")
    if not knm:
        raise PairingError(f"{scenario}: no two shoes agree in model, size, and foot for non-mated pairs")
    if balance:
        km, knm = _balance(km, knm, seed)
    return km + knm


def _pair_id(scenario, label, q, k) -> str:
    kind = "KM" if label else "KNM"
    return f"{scenario}:{kind}:{q.shoe_id}.{q.visit}.{q.blur_level}.{q.replicate}-{k.shoe_id}.{k.visit}.{k.blur_level}.{k.replicate}"


def _pristine_pairs(records, scenario):
    base = [r for r in records if r.visit == 1 and r.blur_level == 0]
    shoes = _by_shoe(base)
    km = []
    for sid in sorted(shoes):
        recs = shoes[sid]
        for i in range(len(recs)):
            for j in range(i + 1, len(recs)):
                km.append(Pair(_pair_id(scenario, 1, recs[i], recs[j]), 1, recs[i], recs[j]))
    knm = []
    for s1, s2 in _class_partners(shoes):
        for q in shoes[s1][:2]:
            for k in shoes[s2][:2]:
                knm.append(Pair(_pair_id(scenario, 0, q, k), 0, q, k))
    return km, knm


def _time_pairs(records, visit, scenario):
    q_side = _by_shoe([r for r in records if r.visit == 1 and r.blur_level == 0])
    k_side = _by_shoe([r for r in records if r.visit == visit and r.blur_level == 0])
    km = []
    for sid in sorted(q_side):
        if sid not in k_side:
            continue
        for q in q_side[sid]:
            for k in k_side[sid]:
                km.append(Pair(_pair_id(scenario, 1, q, k), 1, q, k))
    knm = []
    both = {sid: q_side[sid] for sid in q_side if sid in k_side}
    for s1, s2 in _class_partners(both):
        for q in q_side[s1][:2]:
            for k in k_side[s2][:2]:
                knm.append(Pair(_pair_id(scenario, 0, q, k), 0, q, k))
    return km, knm


def _blur_pairs(records, level, scenario):
    q_side = _by_shoe([r for r in records if r.blur_level == level])
    k_side = _by_shoe([r for r in records if r.blur_level == 0 and r.visit == 1])
    km = []
    for sid in sorted(q_side):
        if sid not in k_side:
            continue
        q, k = q_side[sid][0], k_side[sid][0]
        km.append(Pair(_pair_id(scenario, 1, q, k), 1, q, k))
    knm = []
    both = {sid: q_side[sid] for sid in q_side if sid in k_side}
    for s1, s2 in _class_partners(both):
        for q in q_side[s1][:1]:
            for k in k_side[s2][:2]:
                knm.append(Pair(_pair_id(scenario, 0, q, k), 0, q, k))
    return km, knm


def _reflected_pairs(records, scenario):
    km, _ = _pristine_pairs(records, scenario)
    base = [r for r in records if r.visit == 1 and r.blur_level == 0]
    shoes = _by_shoe(base)
    by_pair: dict[tuple, dict] = {}
    for sid, recs in shoes.items():
        r = recs[0]
        by_pair.setdefault((r.person_id, r.model, r.size), {})[r.foot] = recs
    knm = []
    for key in sorted(by_pair):
        feet = by_pair[key]
        if "L" not in feet or "R" not in feet:
            continue
        for qf, kf in (("L", "R"), ("R", "L")):
            q, k = feet[qf][0], feet[kf][0]
            knm.append(Pair(_pair_id(scenario, 0, q, k), 0, q, k, reflect_k=True))
    return km, knm


# -- splitting ------------------------------------------------------------


def split_by_shoe(records, train_fraction: float = 0.7, seed: int = 0, group: str = "shoe"):
    """Random partition of shoe ids into train and test.

    ``group="pair"`` keeps both feet of one person's pair on the same side,
    which the reflected non-mate construction needs.  Pairs are built within
    each side separately, so no derived pair can straddle the split.
    """
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1)")
    if group == "pair":
        keys = sorted({(r.person_id, r.model, r.size) for r in records})
    else:
        keys = sorted({r.shoe_id for r in records})
    if len(keys) < 2:
        raise PairingError("need at least two shoes to split")
    rng = np.random.Generator(np.random.PCG64(seed))
    order = rng.permutation(len(keys))
    n_train = int(round(train_fraction * len(keys)))
    n_train = min(max(n_train, 1), len(keys) - 1)
    chosen = {keys[i] for i in order[:n_train]}
    if group == "pair":
        train_ids = {r.shoe_id for r in records if (r.person_id, r.model, r.size) in chosen}
    else:
        train_ids = set(chosen)
    test_ids = {r.shoe_id for r in records} - train_ids
    return train_ids, test_ids


def records_for(records, shoe_ids) -> list[ShoeRecord]:
    return [r for r in records if r.shoe_id in shoe_ids]


def build_scenario_pairsets(records, scenario: str, train_fraction: float = 0.7, seed: int = 0):
    group = "pair" if scenario == "Pristine150" else "shoe"
    frac = 0.5 if scenario == "Pristine150" else train_fraction
    train_ids, test_ids = split_by_shoe(records, frac, seed, group=group)
    train = ScenarioPairSet(scenario, "train", build_pairs(records_for(records, train_ids), scenario, seed))
    test = ScenarioPairSet(scenario, "test", build_pairs(records_for(records, test_ids), scenario, seed))
    return train, test


# -- featurization --------------------------------------------------------


def _featurize_one(pair: Pair, featurizer: PairFeaturizer, scenario: str, base_seed: int) -> dict | None:
    pair_seed = (base_seed * 1000003 + zlib.crc32(pair.pair_id.encode())) % (2**31)
    worker = PairFeaturizer(**{**featurizer.get_params(), "seed": pair_seed})
    q_img = load_gray(pair.q.image_path)
    k_img = load_gray(pair.k.image_path)
    cut = None
    if pair.q_cut_region:
        foot = "left" if pair.q.foot.upper().startswith("L") else "right"
        cut = (pair.q_cut_region, foot)
    try:
        result = worker.featurize_images(q_img, k_img, q_cut=cut, reflect_k=pair.reflect_k)
    except (EmptyCloudError, DegenerateCutError) as exc:
        warnings.warn(f"pair {pair.pair_id} dropped: {exc}")
        return None
    row = result.features.to_dict()
    row.update(
        label=pair.label,
        pair_id=pair.pair_id,
        q_shoe_id=pair.q.shoe_id,
        k_shoe_id=pair.k.shoe_id,
        scenario=scenario,
    )
    return row


def featurize_pairs(
    pairset: ScenarioPairSet,
    featurizer: PairFeaturizer | None = None,
    seed: int = 0,
    n_jobs: int = 1,
) -> pd.DataFrame:
    """Compute the similarity features for every pair in a scenario set.

    Pairs whose prints degrade to an empty point cloud are dropped with a
    warning; everything else becomes one labeled row.
    """
    featurizer = featurizer or PairFeaturizer()
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_featurize_one)(pair, featurizer, pairset.scenario, seed) for pair in pairset.pairs
    )
    frame = pd.DataFrame([r for r in rows if r is not None])
    return frame[list(FEATURE_COLUMNS) + list(PAIR_META_COLUMNS)]


def save_features(frame: pd.DataFrame, path) -> None:
    frame.to_csv(path, index=False)


def load_features(path) -> pd.DataFrame:
    frame = pd.read_csv(path)
    missing = set(FEATURE_COLUMNS) - set(frame.columns)
    if missing:
        raise PairingError(f"feature file missing columns: {sorted(missing)}")
    return frame


# -- evaluation -----------------------------------------------------------


def auc_score(scores, labels) -> float:
    """Area under the ROC curve via the rank statistic (ties get average rank)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes")
    ranks = rankdata(scores)
    u = float(np.sum(ranks[labels == 1])) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def youden_threshold(scores, labels) -> tuple[float, float, float]:
    """Threshold maximizing sensitivity + specificity - 1, with those rates.

    Candidates are the observed scores; classification is mated when the
    score is at or above the threshold.  The smallest optimal threshold wins
    ties.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    best = None
    for t in np.unique(scores):
        sens = float(np.mean(pos >= t))
        spec = float(np.mean(neg < t))
        j = sens + spec - 1.0
        if best is None or j > best[0] + 1e-12:
            best = (j, float(t), sens, spec)
    _, t, sens, spec = best
    return t, sens, spec


def evaluate_scores(scores, labels, threshold: float = 0.5) -> EvalReport:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    pred = scores >= threshold
    tp = int(np.sum(pred & (labels == 1)))
    tn = int(np.sum(~pred & (labels == 0)))
    fp = int(np.sum(pred & (labels == 0)))
    fn = int(np.sum(~pred & (labels == 1)))
    accuracy = (tp + tn) / len(labels)
    if np.unique(labels).size < 2:
        return EvalReport(accuracy, None, None, None, None, tp, fp, tn, fn)
    auc = auc_score(scores, labels)
    t, sens, spec = youden_threshold(scores, labels)
    return EvalReport(accuracy, auc, t, sens, spec, tp, fp, tn, fn)


def evaluate(model: RandomForestMatcher, frame: pd.DataFrame, threshold: float = 0.5) -> EvalReport:
    """Score a trained model on a feature frame that carries labels."""
    X = feature_matrix(frame, model.columns_)
    scores = model.predict_proba(X)
    return evaluate_scores(scores, frame["label"].to_numpy(), threshold)


def feature_matrix(frame: pd.DataFrame, columns) -> np.ndarray:
    missing = set(columns) - set(frame.columns)
    if missing:
        raise PairingError(f"feature frame lacks columns: {sorted(missing)}")
    return frame[list(columns)].to_numpy(dtype=np.float64)


# -- distribution shift ----------------------------------------------------


def emd_shift(samples_a, samples_b, standardize: bool = True) -> float:
    """Earth Mover's Distance between two 1D samples.

    Both samples are first standardized with the mean and standard deviation
    of the combined sample, so features on different scales are comparable;
    pass ``standardize=False`` for the raw distance.  Zero combined variance
    means both distributions are the same point mass, hence distance 0.
    """
    a = np.asarray(samples_a, dtype=np.float64)
    b = np.asarray(samples_b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise ValueError("EMD needs two nonempty samples")
    a = a[~np.isnan(a)]
    b = b[~np.isnan(b)]
    if a.size == 0 or b.size == 0:
        raise ValueError("EMD needs non-NaN values on both sides")
    if standardize:
        combined = np.concatenate([a, b])
        std = float(np.std(combined))
        if std == 0.0:
            return 0.0
        mean = float(np.mean(combined))
        a = (a - mean) / std
        b = (b - mean) / std
    return float(wasserstein_distance(a, b))


def emd_table(baseline_frame: pd.DataFrame, scenario_frames: dict, label: int) -> pd.DataFrame:
    """Per-feature EMD between the baseline scenario and every other scenario."""
    rows = {}
    base = baseline_frame[baseline_frame["label"] == label]
    for feature in FEATURE_COLUMNS:
        row = {}
        for scenario, frame in scenario_frames.items():
            sub = frame[frame["label"] == label]
            try:
                row[scenario] = emd_shift(base[feature], sub[feature])
            except ValueError:
                row[scenario] = np.nan
        rows[feature] = row
    return pd.DataFrame(rows).T


def kde_curve(samples, n_points: int = 256) -> dict:
    """Gaussian kernel density curve (Silverman bandwidth) for plotting."""
    samples = np.asarray(samples, dtype=np.float64)
    samples = samples[~np.isnan(samples)]
    if samples.size < 2 or np.std(samples) == 0:
        center = float(samples[0]) if samples.size else 0.0
        return {"x": [center], "y": [1.0], "degenerate": True}
    kde = gaussian_kde(samples, bw_method="silverman")
    lo = float(samples.min() - 3 * kde.factor * samples.std())
    hi = float(samples.max() + 3 * kde.factor * samples.std())
    xs = np.linspace(lo, hi, n_points)
    return {"x": xs.tolist(), "y": kde(xs).tolist(), "degenerate": False}


# -- experiment matrix ------------------------------------------------------

REGIMES = ("baseline", "full", "full_indicator", "category", "scenario", "full_loo", "category_loo")


def _with_indicators(frame: pd.DataFrame) -> pd.DataFrame:
    frame = frame.copy()
    cats = frame["scenario"].map(SCENARIO_CATEGORY)
    for col in INDICATOR_COLUMNS:
        frame[col] = (cats == col.removeprefix("category_")).astype(float)
    return frame


def _train_on(frames: list, params: dict, seed: int, indicators: bool = False, n_jobs: int = 1) -> RandomForestMatcher:
    data = pd.concat(frames, ignore_index=True)
    columns = list(FEATURE_COLUMNS)
    if indicators:
        data = _with_indicators(data)
        columns = columns + list(INDICATOR_COLUMNS)
    X = feature_matrix(data, columns)
    y = data["label"].to_numpy(dtype=np.int64)
    model = RandomForestMatcher(seed=seed, n_jobs=n_jobs, **params)
    model.fit(X, y, columns=columns)
    return model


def _eval_on(model: RandomForestMatcher, frame: pd.DataFrame, indicators: bool = False) -> EvalReport:
    if indicators:
        frame = _with_indicators(frame)
    return evaluate(model, frame)


def run_experiment_matrix(
    scenario_frames: dict,
    regimes=REGIMES,
    params: dict | None = None,
    seed: int = 7,
    baseline_scenario: str = "PristineAN",
    n_jobs: int = 1,
) -> dict:
    """Train the requested regimes and evaluate each on every test scenario.

    ``scenario_frames`` maps scenario name to {"train": frame, "test": frame}.
    Scenarios named in the canonical list but absent from the input are
    skipped with a warning.  Returns a bundle with the accuracy matrix, the
    per-cell reports, and mated/non-mated EMD shift tables against the
    baseline scenario.
    """
    from .forest import DEFAULT_PARAMS

    params = dict(DEFAULT_PARAMS if params is None else params)
    present = [s for s in SCENARIOS if s in scenario_frames]
    absent = [s for s in SCENARIOS if s not in scenario_frames]
    if absent:
        warnings.warn(f"scenarios missing from input and skipped: {absent}")
    if baseline_scenario not in present:
        raise PairingError(f"baseline scenario {baseline_scenario!r} is required")

    train_of = {s: scenario_frames[s]["train"] for s in present}
    test_of = {s: scenario_frames[s]["test"] for s in present}
    accuracy: dict[str, dict[str, float]] = {}
    reports: dict[str, dict[str, dict]] = {}

    def record(regime, scenario, report):
        accuracy.setdefault(regime, {})[scenario] = report.accuracy
        reports.setdefault(regime, {})[scenario] = report.to_dict()

    for regime in regimes:
        if regime == "baseline":
            model = _train_on([train_of[baseline_scenario]], params, seed, n_jobs=n_jobs)
            for s in present:
                record(regime, s, _eval_on(model, test_of[s]))
        elif regime in ("full", "full_indicator"):
            ind = regime == "full_indicator"
            model = _train_on([train_of[s] for s in present], params, seed, indicators=ind, n_jobs=n_jobs)
            for s in present:
                record(regime, s, _eval_on(model, test_of[s], indicators=ind))
        elif regime == "category":
            for cat in ("pristine", "blurry", "partial"):
                members = [s for s in present if SCENARIO_CATEGORY[s] == cat]
                if not members:
                    continue
                model = _train_on([train_of[s] for s in members], params, seed, n_jobs=n_jobs)
                for s in members:
                    record(regime, s, _eval_on(model, test_of[s]))
        elif regime == "scenario":
            for s in present:
                model = _train_on([train_of[s]], params, seed, n_jobs=n_jobs)
                record(regime, s, _eval_on(model, test_of[s]))
        elif regime == "full_loo":
            for s in present:
                others = [t for t in present if t != s]
                if not others:
                    continue
                model = _train_on([train_of[t] for t in others], params, seed, n_jobs=n_jobs)
                record(regime, s, _eval_on(model, test_of[s]))
        elif regime == "category_loo":
            for s in present:
                others = [t for t in present if t != s and SCENARIO_CATEGORY[t] == SCENARIO_CATEGORY[s]]
                if not others:
                    warnings.warn(f"category_loo: no training peers for {s}; skipped")
                    continue
                model = _train_on([train_of[t] for t in others], params, seed, n_jobs=n_jobs)
                record(regime, s, _eval_on(model, test_of[s]))
        else:
            raise ValueError(f"unknown regime {regime!r}")

    emd_mated = emd_table(test_of[baseline_scenario], test_of, label=1)
    emd_non_mated = emd_table(test_of[baseline_scenario], test_of, label=0)
    return {
        "accuracy": accuracy,
        "reports": reports,
        "emd_mated": emd_mated,
        "emd_non_mated": emd_non_mated,
        "scenarios": present,
        "skipped": absent,
        "params": params,
        "seed": seed,
    }
