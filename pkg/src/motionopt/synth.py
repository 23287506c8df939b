"""Seeded synthetic hand-eye and pose-graph instances with known ground truth."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .dualquat import UnitDualQuaternion, dq_conjugate, dq_mul
from .motion import Motion, MotionVector, motion_from_udq, udq_from_motion
from .residual import Edge, HandEyeDataset, PoseGraph, gauge_align, poses_to_motions

DEFAULT_MAX_ANGLE = math.pi - 0.1
DEFAULT_MAX_TRANS = 1.0


@dataclass(frozen=True)
class NoiseSpec:
    rot_sigma: float = 0.0
    trans_sigma: float = 0.0

    def __post_init__(self):
        if self.rot_sigma < 0 or self.trans_sigma < 0:
            raise ValueError("noise standard deviations must be nonnegative")


@dataclass(frozen=True)
class SynthInstance:
    """Generated data plus ground truth.

    For pose graphs ``ground_truth`` is gauge-aligned (vertex 0 at identity)
    and ``anchor`` holds the raw pose drawn for vertex 0.
    """

    data: HandEyeDataset | PoseGraph
    ground_truth: MotionVector
    seed: int | None = None
    anchor: UnitDualQuaternion | None = None


def random_motion(rng: np.random.Generator, max_angle: float = DEFAULT_MAX_ANGLE, max_trans: float = DEFAULT_MAX_TRANS) -> Motion:
    """Axis uniform on the sphere, angle uniform in ``[0, max_angle]``,
    translation uniform in the cube ``[-max_trans, max_trans]^3``."""
    axis = rng.normal(size=3)
    norm = np.linalg.norm(axis)
    axis = axis / norm if norm > 0 else np.array([1.0, 0.0, 0.0])
    angle = rng.uniform(0.0, max_angle)
    t = rng.uniform(-max_trans, max_trans, size=3)
    return Motion(tuple(angle * axis), tuple(t))


def noise_motion(rng: np.random.Generator, noise: NoiseSpec) -> Motion:
    return Motion(tuple(rng.normal(0.0, noise.rot_sigma, 3)), tuple(rng.normal(0.0, noise.trans_sigma, 3)))


def _perturb(q: UnitDualQuaternion, rng: np.random.Generator, noise: NoiseSpec) -> UnitDualQuaternion:
    if noise.rot_sigma == 0 and noise.trans_sigma == 0:
        return q
    return UnitDualQuaternion.of(dq_mul(q, udq_from_motion(noise_motion(rng, noise))))


def gen_handeye(
    rng: np.random.Generator,
    m: int,
    model: Literal["one_unknown", "two_unknown"] = "one_unknown",
    noise: NoiseSpec = NoiseSpec(),
    max_angle: float = DEFAULT_MAX_ANGLE,
    max_trans: float = DEFAULT_MAX_TRANS,
    seed: int | None = None,
) -> SynthInstance:
    """Data satisfying ``a_i q = q b_i`` (one unknown) or ``a_i q = p b_i``
    (two unknowns) exactly before noise; ground truth is ``[x_q]`` or
    ``[x_q, x_p]``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if model not in ("one_unknown", "two_unknown"):
        raise ValueError(f"unknown hand-eye model {model!r}")
    xq = random_motion(rng, max_angle, max_trans)
    q = udq_from_motion(xq)
    if model == "two_unknown":
        xp = random_motion(rng, max_angle, max_trans)
        p = udq_from_motion(xp)
        truth = MotionVector((xq, xp))
    else:
        p = q
        truth = MotionVector((xq,))
    qc = dq_conjugate(q)
    pairs = []
    for _ in range(m):
        b = udq_from_motion(random_motion(rng, max_angle, max_trans))
        a = UnitDualQuaternion.of(dq_mul(dq_mul(p, b), qc))
        pairs.append((_perturb(a, rng, noise), b))
    return SynthInstance(HandEyeDataset(tuple(pairs)), truth, seed)


def _topology_edges(rng: np.random.Generator, n: int, topology: str, loops: int) -> list[tuple[int, int]]:
    if topology == "chain":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif topology == "cycle":
        if n < 3:
            raise ValueError("a cycle needs at least 3 vertices")
        edges = [(i, i + 1) for i in range(n - 1)] + [(n - 1, 0)]
    elif topology == "grid":
        cols = math.ceil(math.sqrt(n))
        edges = []
        for v in range(n):
            if (v + 1) % cols != 0 and v + 1 < n:
                edges.append((v, v + 1))
            if v + cols < n:
                edges.append((v, v + cols))
    else:
        raise ValueError(f"unknown topology {topology!r}")
    taken = set(edges) | {(j, i) for i, j in edges}
    candidates = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in taken]
    if loops > len(candidates):
        raise ValueError(f"cannot add {loops} loop closures; only {len(candidates)} vertex pairs free")
    if loops > 0:
        for k in rng.choice(len(candidates), size=loops, replace=False):
            edges.append(candidates[int(k)])
    return edges


def gen_pose_graph(
    rng: np.random.Generator,
    n: int,
    topology: Literal["chain", "cycle", "grid"] = "chain",
    extra_loop_closures: int = 0,
    noise: NoiseSpec = NoiseSpec(),
    max_angle: float = DEFAULT_MAX_ANGLE,
    max_trans: float = DEFAULT_MAX_TRANS,
    seed: int | None = None,
) -> SynthInstance:
    """Random poses and edge measurements ``q_ij = p_i^* p_j`` (then noise)."""
    if n < 2:
        raise ValueError("a pose graph needs at least 2 vertices")
    poses = [udq_from_motion(random_motion(rng, max_angle, max_trans)) for _ in range(n)]
    edges = []
    for i, j in _topology_edges(rng, n, topology, extra_loop_closures):
        q = UnitDualQuaternion.of(dq_mul(dq_conjugate(poses[i]), poses[j]))
        edges.append(Edge(i, j, _perturb(q, rng, noise)))
    aligned = gauge_align(poses)
    return SynthInstance(PoseGraph(n, tuple(edges)), poses_to_motions(aligned), seed, anchor=poses[0])


def raw_poses(instance: SynthInstance) -> list[UnitDualQuaternion]:
    """Ground-truth poses before gauge alignment."""
    if instance.anchor is None:
        raise ValueError("instance carries no gauge anchor")
    return [UnitDualQuaternion.of(dq_mul(instance.anchor, udq_from_motion(x))) for x in instance.ground_truth]


def motion_distance(a: Motion, b: Motion) -> float:
    """Infinity-norm distance between the canonical motions of ``a`` and ``b``."""
    ca = motion_from_udq(udq_from_motion(a)).as_array()
    cb = motion_from_udq(udq_from_motion(b)).as_array()
    return float(np.max(np.abs(ca - cb)))
