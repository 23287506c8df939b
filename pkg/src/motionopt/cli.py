"""Command-line entry point: ``motionopt gen|solve|check``.

Exit codes: 0 success or convergence, 1 input error, 2 solver hit max_iter
(or stalled without meeting a tolerance).
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import graphio
from .motion import MetricWeights, MotionVector
from .residual import (
    ProblemError,
    handeye_one_unknown,
    handeye_two_unknown,
    objective,
    poses_to_motions,
    slam_problem,
    spanning_tree_poses,
)
from .selfcheck import run_checks
from .solver import EvaluationError, SolverOptions, levenberg_marquardt
from .synth import NoiseSpec, gen_handeye, gen_pose_graph

EXIT_OK, EXIT_INPUT, EXIT_MAX_ITER = 0, 1, 2

log = logging.getLogger("motionopt")


class InputError(Exception):
    pass


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _nonneg_float(s: str) -> float:
    v = float(s)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {s}")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {s}")
    return v


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{path}: no such file")
    try:
        return p.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not valid UTF-8 ({exc})") from None


def _check_out_dir(path: str | None):
    if path is not None and not Path(path).resolve().parent.is_dir():
        raise InputError(f"{path}: parent directory does not exist")


def _emit(lines: list[tuple[str, object]], fmt: str, out=None):
    out = out or sys.stdout
    for k, v in lines:
        print(f"{k}={v}" if fmt == "kv" else f"{k:>18}: {v}", file=out)


def _motion_str(m) -> str:
    return ",".join(format(v, ".17g") for v in m.r + m.t)


def cmd_gen(args) -> int:
    _check_out_dir(args.out)
    _check_out_dir(args.truth)
    rng = np.random.default_rng(args.seed)
    noise = NoiseSpec(args.rot_noise, args.trans_noise)
    if args.problem == "handeye":
        model = "one_unknown" if args.model == 1 else "two_unknown"
        inst = gen_handeye(rng, args.m, model, noise, max_angle=args.max_angle, max_trans=args.max_trans, seed=args.seed)
        text = graphio.write_handeye(inst.data)
    else:
        inst = gen_pose_graph(
            rng, args.n, args.topology, args.loops, noise, max_angle=args.max_angle, max_trans=args.max_trans, seed=args.seed
        )
        text = graphio.write_pose_graph(inst.data)
    Path(args.out).write_text(text, encoding="utf-8")
    if args.truth:
        Path(args.truth).write_text(graphio.write_motions(inst.ground_truth), encoding="utf-8")
    print(f"config: command=gen problem={args.problem} seed={args.seed} rot_noise={args.rot_noise} "
          f"trans_noise={args.trans_noise} max_angle={args.max_angle} max_trans={args.max_trans}")
    print(f"wrote {args.out}" + (f" and {args.truth}" if args.truth else ""))
    return EXIT_OK


def _build_problem(args):
    text = _read(args.input)
    weights = MetricWeights(args.sigma)
    guess = None
    if args.problem == "handeye":
        dataset = graphio.parse_handeye(text)
        problem = handeye_one_unknown(dataset, weights) if args.model == 1 else handeye_two_unknown(dataset, weights)
        tree = None
    else:
        graph, guess = graphio.parse_pose_graph(text)
        if graphio.has_information_blocks(text):
            print("note: edge information matrices are ignored (sigma is the only weight)", file=sys.stderr)
        problem = slam_problem(graph, gauge_fix=not args.no_gauge_fix, weights=weights)
        tree = graph
    return problem, guess, tree


def _initial_guess(args, problem, guess, graph) -> MotionVector:
    if args.x0 == "zero":
        return MotionVector.zeros(problem.n)
    if args.x0 == "file":
        if not args.x0_file:
            raise InputError("--x0 file requires --x0-file PATH")
        x = graphio.parse_motions(_read(args.x0_file))
    elif args.x0 == "vertices":
        if guess is None:
            raise InputError("--x0 vertices requires VERTEX lines for every vertex")
        x = guess
    else:
        if graph is None:
            raise InputError("--x0 spanning-tree applies to slam problems only")
        x = poses_to_motions(spanning_tree_poses(graph))
    if len(x) == problem.n_total and problem.gauge:
        return problem.reduce(x)
    if len(x) != problem.n:
        raise InputError(f"initial guess has {len(x)} motions, problem expects {problem.n}")
    return x


def cmd_solve(args) -> int:
    _check_out_dir(args.report)
    _check_out_dir(args.out_x)
    opts = SolverOptions(
        max_iterations=args.max_iter,
        grad_tol=args.grad_tol,
        step_tol=args.step_tol,
        objective_tol=args.objective_tol,
        lambda_init=args.lambda_init,
        fd_step=args.fd_step,
        seed=args.seed,
    )
    problem, guess, graph = _build_problem(args)
    x0 = _initial_guess(args, problem, guess, graph)
    variant = f"model={args.model}" if args.problem == "handeye" else f"gauge_fix={not args.no_gauge_fix}"
    config = (f"config: command=solve problem={args.problem} {variant} sigma={args.sigma} "
              f"x0={args.x0} seed={args.seed} max_iter={opts.max_iterations} "
              f"grad_tol={opts.grad_tol} step_tol={opts.step_tol} objective_tol={opts.objective_tol} "
              f"lambda_init={opts.lambda_init} fd_step={opts.fd_step}")
    print(config)
    t0 = time.perf_counter()
    if args.eval_only:
        f = objective(problem, x0)
        lines = [("objective", format(f, ".17g")), ("n", problem.n), ("m", problem.m), ("sigma", args.sigma)]
        code = EXIT_OK
        final_x = x0
    else:
        rep = levenberg_marquardt(problem, x0, opts)
        wall = time.perf_counter() - t0
        lines = [
            ("final_objective", format(rep.final_objective, ".17g")),
            ("initial_objective", format(rep.initial_objective, ".17g")),
            ("iterations", rep.iterations),
            ("converged", rep.converged),
            ("wall_time", f"{wall:.6f}"),
            ("sigma", args.sigma),
        ]
        code = EXIT_OK if rep.success else EXIT_MAX_ITER
        final_x = rep.final_x
    full = problem.expand(final_x)
    motion_lines = [(f"x{k}", _motion_str(m)) for k, m in enumerate(full)]
    _emit(lines + (motion_lines if args.format == "kv" else []), args.format)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            print(config, file=fh)
            _emit(lines + motion_lines, "kv", fh)
    if args.out_x:
        Path(args.out_x).write_text(graphio.write_motions(full), encoding="utf-8")
    return code


def cmd_check(args) -> int:
    print(f"config: command=check samples={args.samples} seed={args.seed}")
    results = run_checks(args.samples, args.seed)
    for r in results:
        status = "ok" if r.ok else "FAIL"
        if args.format == "kv":
            print(f"{r.name}={r.max_error:.3e} tol={r.tol:g} {status}")
        else:
            print(f"{status:>4}  max_err={r.max_error:.3e}  tol={r.tol:g}  {r.name}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="motionopt", description="Motion optimization over unit dual quaternions.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver iterations")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic instance")
    gsub = gen.add_subparsers(dest="problem", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, required=True)
    common.add_argument("--rot-noise", type=_nonneg_float, default=0.0)
    common.add_argument("--trans-noise", type=_nonneg_float, default=0.0)
    common.add_argument("--max-angle", type=_nonneg_float, default=np.pi - 0.1)
    common.add_argument("--max-trans", type=_nonneg_float, default=1.0)
    common.add_argument("--out", required=True)
    common.add_argument("--truth")
    he = gsub.add_parser("handeye", parents=[common])
    he.add_argument("--model", type=int, choices=(1, 2), default=1)
    he.add_argument("--m", type=_positive_int, required=True)
    sl = gsub.add_parser("slam", parents=[common])
    sl.add_argument("--n", type=_positive_int, required=True)
    sl.add_argument("--topology", choices=("chain", "cycle", "grid"), default="chain")
    sl.add_argument("--loops", type=int, default=0)
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="solve or evaluate a problem instance")
    solve.add_argument("problem", choices=("handeye", "slam"))
    solve.add_argument("--in", dest="input", required=True)
    solve.add_argument("--model", type=int, choices=(1, 2), default=1, help="hand-eye model (1: AX=XB, 2: AX=ZB)")
    solve.add_argument("--sigma", type=_positive_float, default=1.0)
    solve.add_argument("--x0", choices=("zero", "file", "spanning-tree", "vertices"), default="zero")
    solve.add_argument("--x0-file")
    solve.add_argument("--no-gauge-fix", action="store_true")
    solve.add_argument("--max-iter", type=int, default=200)
    solve.add_argument("--grad-tol", type=_positive_float, default=1e-10)
    solve.add_argument("--step-tol", type=_positive_float, default=1e-12)
    solve.add_argument("--objective-tol", type=_positive_float, default=1e-16)
    solve.add_argument("--lambda-init", type=_positive_float, default=1e-3)
    solve.add_argument("--fd-step", type=_positive_float, default=1e-6)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--eval-only", action="store_true")
    solve.add_argument("--report")
    solve.add_argument("--out-x", help="write the final motion vector here")
    solve.add_argument("--format", choices=("human", "kv"), default="human")
    solve.set_defaults(func=cmd_solve)

    check = sub.add_parser("check", help="run the operator invariant suite")
    check.add_argument("--samples", type=_positive_int, default=1000)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--format", choices=("human", "kv"), default="human")
    check.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, graphio.ParseError, ProblemError, EvaluationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
