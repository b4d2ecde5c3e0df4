"""Iterative closest point registration with multi-start, two-way search.

A single ICP run alternates nearest-neighbour correspondence with the
closed-form rigid update (2D Procrustes) that minimizes the summed squared
correspondence distance.  Because ICP only finds a local optimum, the full
``align`` search tries five translation starts, both alignment directions,
and a ladder of downsample rates, then keeps the candidate whose transformed
known print overlaps the questioned print best at full resolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import pointcloud as pc
from .errors import EmptyCloudError
from .pointcloud import NeighborIndex, PointCloud, RigidTransform

DEFAULT_DOWNSAMPLE_RATES = (0.04, 0.05, 0.06, 0.20, 0.50)
START_NAMES = ("center", "left", "right", "up", "down")
Q_REFERENCE = "Q-reference"
K_REFERENCE = "K-reference"


@dataclass(frozen=True)
class IcpConfig:
    max_iterations: int = 200
    convergence_tol: float = 1e-6          # relative MSE improvement
    downsample_rates: tuple = DEFAULT_DOWNSAMPLE_RATES
    starts: tuple = START_NAMES
    overlap_threshold_for_selection: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be > 0")
        for r in self.downsample_rates:
            if not 0 < r <= 1:
                raise ValueError(f"downsample rates must be in (0, 1], got {r}")


@dataclass
class AlignmentResult:
    """Outcome of one alignment; ``transform`` always maps K onto Q's frame."""

    transform: RigidTransform
    objective: float
    selection_score: float
    direction: str
    start_used: str
    rate_used: float
    iterations: int = 0
    converged: bool = False
    degenerate_correspondence: bool = False
    objective_history: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "transform": {"theta": self.transform.theta, "tx": self.transform.tx, "ty": self.transform.ty},
            "objective": self.objective,
            "selection_score": self.selection_score,
            "direction": self.direction,
            "start_used": self.start_used,
            "rate_used": self.rate_used,
            "iterations": self.iterations,
            "converged": self.converged,
            "degenerate_correspondence": self.degenerate_correspondence,
        }


def rigid_fit(source: np.ndarray, target: np.ndarray) -> RigidTransform:
    """Closed-form rotation + translation minimizing sum ||R s + t - x||^2.

    Solved by SVD of the centered cross-covariance with a determinant
    correction so the result is a proper rotation, never a reflection.
    """
    sc = source.mean(axis=0)
    tc = target.mean(axis=0)
    h = (source - sc).T @ (target - tc)
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    if d == 0:
        d = 1.0
    rot = vt.T @ np.diag([1.0, d]) @ u.T
    theta = float(np.arctan2(rot[1, 0], rot[0, 0]))
    t = tc - np.array([np.cos(theta) * sc[0] - np.sin(theta) * sc[1],
                       np.sin(theta) * sc[0] + np.cos(theta) * sc[1]])
    return RigidTransform(theta, float(t[0]), float(t[1]))


def icp_single(
    reference: PointCloud,
    moving: PointCloud,
    init: RigidTransform = pc.IDENTITY,
    cfg: IcpConfig = IcpConfig(),
    reference_index: NeighborIndex | None = None,
) -> AlignmentResult:
    """Run plain ICP from one starting transform.

    Each iteration matches every moving point to its nearest reference point
    and re-solves the total rigid transform from the original moving cloud to
    the matched targets, so the objective cannot increase.  Stops when the
    relative MSE improvement falls below the tolerance, or at the iteration
    cap.  The returned transform maps the original moving cloud into the
    reference frame (the start transform is folded in).
    """
    if len(reference) == 0 or len(moving) == 0:
        raise EmptyCloudError("icp needs two nonempty clouds")
    index = reference_index if reference_index is not None else NeighborIndex(reference)
    src = moving.points
    current = pc.apply_to_array(init, src)
    dists, idx = index.query(current)
    mse_prev = float(np.mean(dists**2))
    transform = init
    history = [mse_prev * len(src)]
    degenerate = False
    iterations = 0
    converged = False
    for _ in range(cfg.max_iterations):
        iterations += 1
        targets = reference.points[idx]
        if np.unique(idx).size == 1:
            degenerate = True
        transform = rigid_fit(src, targets)
        current = pc.apply_to_array(transform, src)
        dists, idx = index.query(current)
        mse = float(np.mean(dists**2))
        history.append(mse * len(src))
        improvement = mse_prev - mse
        if improvement <= cfg.convergence_tol * max(mse_prev, 1e-300):
            converged = True
            break
        mse_prev = mse
    objective = history[-1]
    return AlignmentResult(
        transform=transform,
        objective=objective,
        selection_score=0.0,
        direction=Q_REFERENCE,
        start_used="",
        rate_used=1.0,
        iterations=iterations,
        converged=converged,
        degenerate_correspondence=degenerate,
        objective_history=history,
    )


def make_starts(moving: PointCloud) -> list[RigidTransform]:
    """The five canonical starting transforms for the moving cloud.

    No rotation is seeded.  Besides the identity, the cloud is shifted left,
    right, up, and down by twice its own coordinate range along that axis,
    which is far enough to escape a bad overlap basin.
    """
    if len(moving) == 0:
        raise EmptyCloudError("cannot derive starts from an empty cloud")
    min_x, min_y, max_x, max_y = moving.bounds()
    sx = 2.0 * (max_x - min_x)
    sy = 2.0 * (max_y - min_y)
    return [
        RigidTransform(0.0, 0.0, 0.0),
        RigidTransform(0.0, -sx, 0.0),
        RigidTransform(0.0, sx, 0.0),
        RigidTransform(0.0, 0.0, sy),
        RigidTransform(0.0, 0.0, -sy),
    ]


def _overlap_fraction(moved: np.ndarray, index: NeighborIndex, d: float) -> float:
    dists, _ = index.query(moved)
    return float(np.mean(dists <= d))


def align(q: PointCloud, k: PointCloud, cfg: IcpConfig = IcpConfig()) -> AlignmentResult:
    """Full two-way, multi-start, multi-rate alignment of K onto Q.

    Every (rate x start x direction) combination is run as an independent ICP
    candidate on clouds downsampled at that rate.  Candidates where Q was the
    moving cloud are inverted so every candidate ends up expressed as a K to
    Q-frame transform.  Each candidate is scored by the proportion overlap of
    the full Q cloud against the fully transformed K cloud at the selection
    radius; because K is the clean, complete print in every comparison
    scenario, this direction stays discriminative even when Q is partial or
    degraded, where the reverse direction saturates for any rough alignment.
    The best score wins; ties are broken by the lower mean squared
    correspondence distance (the raw objective is a sum over the candidate's
    own downsampled cloud, so it is not comparable across rates) and then by
    enumeration order.
    """
    if len(q) == 0 or len(k) == 0:
        raise EmptyCloudError("align needs two nonempty clouds")

    candidates = []
    order = 0
    for rate_i, rate in enumerate(cfg.downsample_rates):
        # One seed per rate for both clouds, so identical inputs sample
        # identical subsets and a self-pair aligns exactly.
        rate_seed = int(np.random.SeedSequence((cfg.seed, rate_i)).generate_state(1)[0])
        q_small = downsample_if_needed(q, rate, rate_seed)
        k_small = downsample_if_needed(k, rate, rate_seed)
        for direction in (Q_REFERENCE, K_REFERENCE):
            if direction == Q_REFERENCE:
                reference, moving = q_small, k_small
            else:
                reference, moving = k_small, q_small
            ref_index = NeighborIndex(reference)
            starts = make_starts(moving)
            for start_name, start in zip(START_NAMES, starts):
                result = icp_single(reference, moving, start, cfg, reference_index=ref_index)
                tf = result.transform if direction == Q_REFERENCE else pc.invert(result.transform)
                k_star = pc.apply_to_array(tf, k.points)
                k_star_index = NeighborIndex(PointCloud(k_star))
                score = _overlap_fraction(q.points, k_star_index, cfg.overlap_threshold_for_selection)
                result.transform = tf
                result.selection_score = score
                result.direction = direction
                result.start_used = start_name
                result.rate_used = rate
                mean_err = result.objective / max(len(moving), 1)
                candidates.append((order, mean_err, result))
                order += 1

    best = max(
        candidates,
        key=lambda item: (item[2].selection_score, -item[1], -item[0]),
    )
    return best[2]


def downsample_if_needed(cloud: PointCloud, rate: float, seed: int) -> PointCloud:
    if rate >= 1.0:
        return cloud
    return pc.downsample(cloud, rate, seed)
