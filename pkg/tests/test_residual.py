import numpy as np
import pytest

from motionopt.dualquat import DQ_ONE, UnitDualQuaternion, dq_mul
from motionopt.motion import MetricWeights, Motion, MotionVector, flatten, motion_from_udq, motion_magnitude, udq_from_motion
from motionopt.residual import (
    Edge,
    HandEyeDataset,
    PoseGraph,
    ProblemError,
    ResidualProblem,
    gauge_align,
    handeye_one_unknown,
    handeye_two_unknown,
    objective,
    slam_problem,
    slam_residuals,
    spanning_tree_poses,
)
from motionopt.selfcheck import random_udq
from motionopt.solver import levenberg_marquardt
from motionopt.synth import NoiseSpec, gen_handeye, gen_pose_graph, raw_poses


def const_problem(z: MotionVector, sigma=1.0):
    return ResidualProblem(1, len(z), lambda x: z, MetricWeights(sigma))


class TestObjective:
    def test_zero(self):
        assert objective(const_problem(MotionVector.zeros(3)), MotionVector.zeros(1)) == 0

    def test_single_residual(self):
        z = MotionVector((Motion((0, 2, 0)),))
        assert objective(const_problem(z), MotionVector.zeros(1)) == 2.0

    def test_matches_sum_of_halves(self, rng):
        inst = gen_handeye(rng, 6)
        pb = handeye_one_unknown(inst.data, MetricWeights(2.5))
        for _ in range(20):
            x = MotionVector((Motion.from_array(rng.uniform(-1, 1, 6)),))
            z = pb.residuals(x)
            direct = sum(0.5 * motion_magnitude(zi, pb.weights) ** 2 for zi in z)
            assert abs(objective(pb, x) - direct) <= 1e-12 * max(1.0, direct)
            r = pb.residual_vector(flatten(x))
            assert abs(0.5 * r @ r - direct) <= 1e-12 * max(1.0, direct)

    def test_dimension_mismatch(self):
        with pytest.raises(ProblemError):
            objective(const_problem(MotionVector.zeros(1)), MotionVector.zeros(2))


class TestHandEye:
    @pytest.mark.parametrize("seed", range(10))
    def test_truth_is_zero(self, seed):
        inst = gen_handeye(np.random.default_rng(seed), 10)
        assert objective(handeye_one_unknown(inst.data), inst.ground_truth) <= 1e-20

    def test_degenerate_dataset(self, rng):
        pb = handeye_one_unknown(HandEyeDataset(((DQ_ONE, DQ_ONE),)))
        for _ in range(20):
            x = MotionVector((Motion.from_array(rng.uniform(-2, 2, 6)),))
            assert objective(pb, x) <= 1e-28

    def test_perturbed_positive(self, rng):
        inst = gen_handeye(rng, 4)
        x = MotionVector((inst.ground_truth[0] + Motion((0.01, 0, 0), (0, 0.01, 0)),))
        assert objective(handeye_one_unknown(inst.data), x) > 1e-8

    def test_empty_rejected(self):
        with pytest.raises(ProblemError):
            HandEyeDataset(())

    def test_two_unknown_truth(self, rng):
        inst = gen_handeye(rng, 10, "two_unknown")
        pb = handeye_two_unknown(inst.data)
        assert pb.n == 2
        assert objective(pb, inst.ground_truth) <= 1e-20
        wrong = MotionVector((inst.ground_truth[0], inst.ground_truth[1] + Motion((0.2, 0, 0))))
        assert objective(pb, wrong) > 1e-4

    def test_two_unknown_reduces_to_one(self, rng):
        data = gen_handeye(rng, 5).data
        one, two = handeye_one_unknown(data), handeye_two_unknown(data)
        for _ in range(10):
            x = Motion.from_array(rng.uniform(-1, 1, 6))
            assert one.residuals(MotionVector((x,))) == two.residuals(MotionVector((x, x)))

    def test_measurement_sign_invariance(self, rng):
        inst = gen_handeye(rng, 5, "two_unknown", NoiseSpec(0.05, 0.05))
        flipped = HandEyeDataset(tuple((-a, b) if k % 2 else (a, -b) for k, (a, b) in enumerate(inst.data.pairs)))
        x = MotionVector(tuple(Motion.from_array(rng.uniform(-1, 1, 6)) for _ in range(2)))
        z1 = handeye_two_unknown(inst.data).residuals(x)
        z2 = handeye_two_unknown(flipped).residuals(x)
        assert np.max(np.abs(flatten(z1) - flatten(z2))) <= 1e-12

    def test_deterministic(self, rng):
        pb = handeye_one_unknown(gen_handeye(rng, 5, noise=NoiseSpec(0.1, 0.1)).data)
        x = MotionVector((Motion.from_array(rng.uniform(-1, 1, 6)),))
        assert np.array_equal(flatten(pb.residuals(x)), flatten(pb.residuals(x)))


class TestSlam:
    @pytest.mark.parametrize("topology", ["chain", "cycle", "grid"])
    def test_truth_is_zero(self, rng, topology):
        inst = gen_pose_graph(rng, 9, topology, 2)
        pb = slam_problem(inst.data)
        assert objective(pb, pb.reduce(inst.ground_truth)) <= 1e-20
        free = slam_problem(inst.data, gauge_fix=False)
        assert objective(free, inst.ground_truth) <= 1e-20

    def test_identity_graph(self):
        g = PoseGraph(3, (Edge(0, 1, DQ_ONE), Edge(1, 2, DQ_ONE), Edge(2, 0, DQ_ONE)))
        assert objective(slam_problem(g), MotionVector.zeros(2)) == 0

    def test_single_edge_minimizer(self, rng):
        q = random_udq(rng)
        pb = slam_problem(PoseGraph(2, (Edge(0, 1, q),)))
        expected = motion_from_udq(q)
        assert objective(pb, MotionVector((expected,))) <= 1e-28
        rep = levenberg_marquardt(pb)
        assert rep.final_objective <= 1e-16
        got = motion_from_udq(udq_from_motion(rep.final_x[0]))
        assert np.max(np.abs(got.as_array() - expected.as_array())) <= 1e-7

    def test_bad_edges(self):
        with pytest.raises(ProblemError):
            PoseGraph(2, (Edge(0, 2, DQ_ONE),))
        with pytest.raises(ProblemError):
            PoseGraph(2, (Edge(1, 1, DQ_ONE),))
        with pytest.raises(ProblemError):
            PoseGraph(2, ())

    def test_gauge_expand_reduce(self, rng):
        inst = gen_pose_graph(rng, 5, "chain")
        pb = slam_problem(inst.data)
        assert pb.n == 4 and pb.n_total == 5
        full = inst.ground_truth
        assert pb.expand(pb.reduce(full))[1:] == full[1:]
        assert pb.expand(pb.reduce(full))[0] == Motion()

    def test_gauge_invariance(self, rng):
        inst = gen_pose_graph(rng, 8, "cycle", 3, NoiseSpec(0.05, 0.05))
        poses = [udq_from_motion(Motion.from_array(rng.uniform(-2, 2, 6))) for _ in range(8)]
        g = random_udq(rng, 3.0)
        moved = [UnitDualQuaternion.of(dq_mul(g, p)) for p in poses]
        z1 = flatten(slam_residuals(inst.data, poses))
        z2 = flatten(slam_residuals(inst.data, moved))
        assert np.max(np.abs(z1 - z2)) <= 1e-10

    def test_measurement_sign_invariance(self, rng):
        inst = gen_pose_graph(rng, 6, "cycle", 1, NoiseSpec(0.05, 0.05))
        flipped = PoseGraph(6, tuple(Edge(e.i, e.j, -e.q) for e in inst.data.edges))
        poses = [udq_from_motion(Motion.from_array(rng.uniform(-2, 2, 6))) for _ in range(6)]
        z1 = flatten(slam_residuals(inst.data, poses))
        z2 = flatten(slam_residuals(flipped, poses))
        assert np.max(np.abs(z1 - z2)) <= 1e-12

    def test_spanning_tree_recovers_noiseless_poses(self, rng):
        inst = gen_pose_graph(rng, 12, "grid", 3)
        tree = spanning_tree_poses(inst.data)
        truth = gauge_align(raw_poses(inst))
        for a, b in zip(tree, truth):
            assert np.max(np.abs(motion_from_udq(a).as_array() - motion_from_udq(b).as_array())) <= 1e-10
        assert tree[0] == DQ_ONE

    def test_spanning_tree_traverses_reverse_edges(self, rng):
        q = random_udq(rng)
        g = PoseGraph(2, (Edge(1, 0, q),))
        p = spanning_tree_poses(g)
        assert objective(slam_problem(g), MotionVector((motion_from_udq(p[1]),))) <= 1e-28
