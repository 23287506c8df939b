"""Residual maps for hand-eye calibration and pose-graph SLAM.

Every problem maps a motion vector of unknowns to a stack of residual
motions ``z`` and is minimized through ``objective = 0.5 * ||z||^2``.
Residuals take the shape ``M(prediction * measurement^{-1})``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .dualquat import DQ_ONE, UnitDualQuaternion, dq_conjugate, dq_mul, is_unit
from .motion import (
    DEFAULT_WEIGHTS,
    MetricWeights,
    Motion,
    MotionVector,
    flatten,
    motion_from_udq,
    motion_vector_norm,
    udq_from_motion,
    unflatten,
)

DATA_UNIT_TOL = 1e-9


class ProblemError(ValueError):
    """Invalid dataset, graph, or motion-vector dimension."""


def _mul3(a, b, c) -> UnitDualQuaternion:
    return UnitDualQuaternion.of(dq_mul(dq_mul(a, b), c))


def _check_unit(q, what: str) -> UnitDualQuaternion:
    if not is_unit(q, DATA_UNIT_TOL):
        raise ProblemError(f"{what} is not a unit dual quaternion")
    return UnitDualQuaternion.of(q)


@dataclass(frozen=True)
class HandEyeDataset:
    """Measurement pairs ``(a_i, b_i)``."""

    pairs: tuple[tuple[UnitDualQuaternion, UnitDualQuaternion], ...]

    def __post_init__(self):
        pairs = tuple((_check_unit(a, f"a[{i}]"), _check_unit(b, f"b[{i}]")) for i, (a, b) in enumerate(self.pairs))
        if not pairs:
            raise ProblemError("hand-eye dataset needs at least one measurement pair")
        object.__setattr__(self, "pairs", pairs)

    @property
    def m(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class Edge:
    i: int
    j: int
    q: UnitDualQuaternion


@dataclass(frozen=True)
class PoseGraph:
    """Directed pose graph on vertices ``0 .. n-1``; edge ``(i, j)`` measures
    ``p_i^* p_j``."""

    n: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        edges = tuple(self.edges)
        if self.n < 1:
            raise ProblemError("pose graph needs at least one vertex")
        if not edges:
            raise ProblemError("pose graph needs at least one edge")
        for k, e in enumerate(edges):
            if not (0 <= e.i < self.n and 0 <= e.j < self.n):
                raise ProblemError(f"edge {k} ({e.i}, {e.j}) references a vertex outside 0..{self.n - 1}")
            if e.i == e.j:
                raise ProblemError(f"edge {k} is a self-loop on vertex {e.i}")
            _check_unit(e.q, f"edge {k} measurement")
        object.__setattr__(self, "edges", edges)

    @property
    def m(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class ResidualProblem:
    """``z: M^n -> M^m`` over the free unknowns.

    ``gauge`` pins components of the full motion vector (full index ->
    motion); pinned components are not part of the unknowns and are
    re-inserted before evaluation.
    """

    n: int
    m: int
    evaluator: Callable[[MotionVector], MotionVector]
    weights: MetricWeights = DEFAULT_WEIGHTS
    gauge: Mapping[int, Motion] = field(default_factory=dict)
    name: str = ""

    @property
    def n_total(self) -> int:
        return self.n + len(self.gauge)

    def residuals(self, x: MotionVector) -> MotionVector:
        if len(x) != self.n:
            raise ProblemError(f"expected {self.n} motion components, got {len(x)}")
        z = self.evaluator(x)
        if len(z) != self.m:
            raise ProblemError(f"evaluator returned {len(z)} residuals, expected {self.m}")
        return z

    def row_scale(self) -> np.ndarray:
        """Per-row factors turning flattened residuals into a Euclidean vector
        whose squared 2-norm is the weighted motion norm squared."""
        block = np.array([1.0, 1.0, 1.0] + [np.sqrt(self.weights.sigma)] * 3)
        return np.tile(block, self.m)

    def residual_vector(self, x_flat: np.ndarray) -> np.ndarray:
        z = self.residuals(unflatten(x_flat, self.n))
        return flatten(z) * self.row_scale()

    def expand(self, free: MotionVector) -> MotionVector:
        """Full motion vector with pinned components re-inserted."""
        if not self.gauge:
            return free
        it = iter(free.components)
        return MotionVector(tuple(self.gauge[k] if k in self.gauge else next(it) for k in range(self.n_total)))

    def reduce(self, full: MotionVector) -> MotionVector:
        """Drop pinned components from a full motion vector."""
        if not self.gauge:
            return full
        if len(full) != self.n_total:
            raise ProblemError(f"expected {self.n_total} motion components, got {len(full)}")
        return MotionVector(tuple(x for k, x in enumerate(full.components) if k not in self.gauge))


def objective(problem: ResidualProblem, x: MotionVector) -> float:
    return 0.5 * motion_vector_norm(problem.residuals(x), problem.weights) ** 2


def handeye_one_unknown(dataset: HandEyeDataset, weights: MetricWeights = DEFAULT_WEIGHTS) -> ResidualProblem:
    """``a_i q = q b_i`` with ``q = U(x)``; ``z_i = M(a_i q (q b_i)^{-1})``."""
    pairs = dataset.pairs
    b_conj = [dq_conjugate(b) for _, b in pairs]

    def evaluate(x: MotionVector) -> MotionVector:
        q = udq_from_motion(x[0])
        qc = dq_conjugate(q)
        out = []
        for (a, _), bc in zip(pairs, b_conj):
            out.append(motion_from_udq(_mul3(dq_mul(a, q), bc, qc)))
        return MotionVector(tuple(out))

    return ResidualProblem(1, len(pairs), evaluate, weights, name="handeye1")


def handeye_two_unknown(dataset: HandEyeDataset, weights: MetricWeights = DEFAULT_WEIGHTS) -> ResidualProblem:
    """``a_i q = p b_i`` with ``q = U(x1)``, ``p = U(x2)``;
    ``z_i = M(a_i q (p b_i)^{-1})``."""
    pairs = dataset.pairs
    b_conj = [dq_conjugate(b) for _, b in pairs]

    def evaluate(x: MotionVector) -> MotionVector:
        q = udq_from_motion(x[0])
        pc = dq_conjugate(udq_from_motion(x[1]))
        out = []
        for (a, _), bc in zip(pairs, b_conj):
            out.append(motion_from_udq(_mul3(dq_mul(a, q), bc, pc)))
        return MotionVector(tuple(out))

    return ResidualProblem(2, len(pairs), evaluate, weights, name="handeye2")


def slam_residuals(graph: PoseGraph, poses: Sequence[UnitDualQuaternion]) -> MotionVector:
    """``z_ij = M(p_i^* p_j q_ij^{-1})`` in edge order."""
    conj = [dq_conjugate(p) for p in poses]
    return MotionVector(
        tuple(motion_from_udq(_mul3(conj[e.i], poses[e.j], dq_conjugate(e.q))) for e in graph.edges)
    )


def slam_problem(graph: PoseGraph, gauge_fix: bool = True, weights: MetricWeights = DEFAULT_WEIGHTS) -> ResidualProblem:
    """Pose-graph problem; with ``gauge_fix`` vertex 0 is pinned to identity."""
    gauge = {0: Motion()} if gauge_fix else {}
    n_free = graph.n - len(gauge)
    if n_free < 1:
        raise ProblemError("gauge-fixed pose graph needs at least two vertices")

    problem: ResidualProblem

    def evaluate(x: MotionVector) -> MotionVector:
        full = problem.expand(x)
        return slam_residuals(graph, [udq_from_motion(m) for m in full])

    problem = ResidualProblem(n_free, graph.m, evaluate, weights, gauge, name="slam")
    return problem


def spanning_tree_poses(graph: PoseGraph, root: int = 0) -> list[UnitDualQuaternion]:
    """Compose measurements along a BFS tree from ``root`` (pinned to identity).

    Edges are traversed in either direction; vertices unreachable from
    ``root`` stay at identity.
    """
    adj: list[list[tuple[int, UnitDualQuaternion]]] = [[] for _ in range(graph.n)]
    for e in graph.edges:
        adj[e.i].append((e.j, e.q))
        adj[e.j].append((e.i, dq_conjugate(e.q)))
    poses: list[UnitDualQuaternion | None] = [None] * graph.n
    poses[root] = DQ_ONE
    queue = deque([root])
    while queue:
        i = queue.popleft()
        for j, q in adj[i]:
            if poses[j] is None:
                poses[j] = UnitDualQuaternion.of(dq_mul(poses[i], q))
                queue.append(j)
    return [p if p is not None else DQ_ONE for p in poses]


def gauge_align(poses: Sequence[UnitDualQuaternion], anchor: int = 0) -> list[UnitDualQuaternion]:
    """Left-compose every pose by ``p_anchor^{-1}`` so the anchor becomes identity."""
    g = dq_conjugate(poses[anchor])
    return [UnitDualQuaternion.of(dq_mul(g, p)) for p in poses]


def poses_to_motions(poses: Sequence[UnitDualQuaternion]) -> MotionVector:
    return MotionVector(tuple(motion_from_udq(p) for p in poses))
