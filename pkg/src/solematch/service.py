"""HTTP service exposing the matching pipeline to the examiner UI.

POSTing a questioned/known image pair enqueues the full pipeline on a
bounded worker pool and returns a job id; the job resource reports progress
and, once done, the alignment, the 35 features, and the posterior.  A
population endpoint serves per-metric histograms and density curves so the
UI can show where a pair sits against known mated and non-mated pairs.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, File, Form, HTTPException, UploadFile
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from PIL import Image

from . import pointcloud as pc
from .errors import SolematchError
from .evalkit import kde_curve, load_features
from .features import FEATURE_COLUMNS
from .forest import RandomForestMatcher
from .imgproc import GrayImage
from .pipeline import PairFeaturizer

JOB_STATUSES = ("queued", "aligning", "featurizing", "done", "failed")
OVERLAY_POINT_LIMIT = 5000
DEFAULT_SIZE_LIMIT = 16 * 1024 * 1024


@dataclass
class PairJob:
    job_id: str
    status: str = "queued"
    model_id: str = "default"
    alignment: dict | None = None
    features: dict | None = None
    posterior: float | None = None
    error: str | None = None
    error_code: str | None = None
    q_points: list | None = None
    k_star_points: list | None = None

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "status": self.status,
            "model_id": self.model_id,
            "alignment": self.alignment,
            "features": self.features,
            "posterior": self.posterior,
            "error": self.error,
            "error_code": self.error_code,
            "q_points": self.q_points,
            "k_star_points": self.k_star_points,
        }


@dataclass
class ServiceState:
    model_dir: Path
    population_dir: Path | None
    seed: int
    size_limit: int
    queue_limit: int
    jobs: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    executor: ThreadPoolExecutor = None
    models: dict = field(default_factory=dict)
    population = None
    pending: int = 0


def _decode_image(data: bytes) -> GrayImage:
    with Image.open(io.BytesIO(data)) as im:
        return GrayImage(np.asarray(im.convert("L"), dtype=np.float64))


def _overlay_points(cloud, limit=OVERLAY_POINT_LIMIT, seed=0):
    pts = cloud.points
    if len(pts) > limit:
        rng = np.random.Generator(np.random.PCG64(seed))
        keep = np.sort(rng.choice(len(pts), size=limit, replace=False))
        pts = pts[keep]
    return [[float(x), float(y)] for x, y in pts]


def _run_job(state: ServiceState, job: PairJob, q_img: GrayImage, k_img: GrayImage, pair_seed: int):
    try:
        with state.lock:
            job.status = "aligning"
        featurizer = PairFeaturizer(seed=pair_seed)
        q_cloud = featurizer.extract_cloud(q_img)
        k_cloud = featurizer.extract_cloud(k_img)
        from . import icp as icp_mod
        from . import imgproc

        alignment = icp_mod.align(q_cloud, k_cloud, featurizer._config())
        with state.lock:
            job.status = "featurizing"
        k_star = pc.apply(alignment.transform, k_cloud)
        jq = imgproc.binarize(q_img, featurizer.binarize_threshold)
        jk = imgproc.binarize(k_img, featurizer.binarize_threshold)
        features = featurizer.similarity_features(q_cloud, k_star, jq, jk, alignment)
        model = state.models[job.model_id]
        posterior = model.predict_proba(features.values)
        with state.lock:
            job.alignment = alignment.to_dict()
            job.features = {
                name: (None if np.isnan(v) else float(v))
                for name, v in zip(FEATURE_COLUMNS, features.values)
            }
            job.posterior = float(posterior)
            job.q_points = _overlay_points(q_cloud, seed=pair_seed)
            job.k_star_points = _overlay_points(k_star, seed=pair_seed + 1)
            job.status = "done"
    except SolematchError as exc:
        with state.lock:
            job.status = "failed"
            job.error = str(exc)
            job.error_code = type(exc).__name__
    except Exception as exc:  # pragma: no cover - defensive
        with state.lock:
            job.status = "failed"
            job.error = str(exc)
            job.error_code = type(exc).__name__
    finally:
        with state.lock:
            state.pending -= 1


def create_app(
    model_dir=None,
    population_dir=None,
    seed: int | None = None,
    workers: int = 2,
    queue_limit: int = 16,
    size_limit: int = DEFAULT_SIZE_LIMIT,
    static_dir=None,
) -> FastAPI:
    """Build the FastAPI app; directories fall back to SOLE_* env vars."""
    model_dir = Path(model_dir or os.environ.get("SOLE_MODEL_DIR", "models"))
    seed = int(os.environ.get("SOLE_SEED", "0")) if seed is None else seed
    population_dir = Path(population_dir) if population_dir else None

    state = ServiceState(
        model_dir=model_dir,
        population_dir=population_dir,
        seed=seed,
        size_limit=size_limit,
        queue_limit=queue_limit,
    )
    state.executor = ThreadPoolExecutor(max_workers=workers)
    if model_dir.is_dir():
        for path in sorted(model_dir.glob("*.json")):
            state.models[path.stem] = RandomForestMatcher.load(path)
    if "default" not in state.models and state.models:
        state.models["default"] = state.models[sorted(state.models)[0]]
    if population_dir is not None:
        pop_file = population_dir / "population.csv"
        if pop_file.exists():
            state.population = load_features(pop_file)

    app = FastAPI(title="solematch")
    app.state.matcher = state

    @app.post("/api/pairs", status_code=202)
    async def create_pair(
        q_image: UploadFile = File(...),
        k_image: UploadFile = File(...),
        model_id: str = Form("default"),
    ):
        if model_id not in state.models:
            raise HTTPException(status_code=404, detail=f"unknown model {model_id!r}")
        blobs = []
        for upload in (q_image, k_image):
            data = await upload.read()
            if len(data) > state.size_limit:
                raise HTTPException(status_code=413, detail=f"{upload.filename} exceeds the size limit")
            try:
                img = _decode_image(data)
            except Exception:
                raise HTTPException(status_code=400, detail=f"{upload.filename} is not a decodable image")
            blobs.append((data, img))
        with state.lock:
            if state.pending >= state.queue_limit:
                raise HTTPException(status_code=429, detail="job queue is full")
            state.pending += 1
            job = PairJob(job_id=str(uuid.uuid4()), model_id=model_id)
            state.jobs[job.job_id] = job
        digest = hashlib.sha256(blobs[0][0] + blobs[1][0]).digest()
        pair_seed = (state.seed * 1000003 + int.from_bytes(digest[:4], "big")) % (2**31)
        state.executor.submit(_run_job, state, job, blobs[0][1], blobs[1][1], pair_seed)
        return {"job_id": job.job_id}

    @app.get("/api/pairs/{job_id}")
    def get_pair(job_id: str):
        with state.lock:
            job = state.jobs.get(job_id)
            if job is None:
                raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
            return JSONResponse(job.to_dict())

    @app.get("/api/models")
    def list_models():
        return {"models": sorted(state.models)}

    @app.get("/api/population/{metric}")
    def population(metric: str, scenario: str | None = None):
        if metric not in FEATURE_COLUMNS:
            raise HTTPException(status_code=404, detail=f"unknown metric {metric!r}")
        if state.population is None:
            raise HTTPException(status_code=404, detail="no population data loaded")
        frame = state.population
        if scenario:
            frame = frame[frame["scenario"] == scenario]
            if frame.empty:
                raise HTTPException(status_code=404, detail=f"no rows for scenario {scenario!r}")
        out = {"metric": metric, "scenario": scenario}
        for label, key in ((1, "mated"), (0, "non_mated")):
            values = frame.loc[frame["label"] == label, metric].to_numpy(dtype=np.float64)
            values = values[~np.isnan(values)]
            counts, edges = np.histogram(values, bins=20) if values.size else (np.array([]), np.array([]))
            out[key] = {
                "histogram": {"counts": counts.tolist(), "bin_edges": edges.tolist()},
                "kde": kde_curve(values),
                "n": int(values.size),
            }
        return out

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
