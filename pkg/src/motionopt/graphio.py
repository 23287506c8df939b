"""Text formats for pose graphs and hand-eye datasets.

Pose graphs use g2o-style lines::

    VERTEX_SE3:QUAT id tx ty tz qx qy qz qw
    EDGE_SE3:QUAT i j tx ty tz qx qy qz qw [21 information values, ignored]

Hand-eye datasets alternate ``A``/``B`` lines of ``tx ty tz qx qy qz qw``.
Quaternions are scalar-last in files and scalar-first in memory; a record
``(t, q)`` becomes ``q + (1/2) q [0, t] eps``.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

from .dualquat import UnitDualQuaternion, translation_quat, udq_from_parts
from .motion import Motion, MotionVector, canonicalize_udq, motion_from_udq, udq_from_motion
from .quat import Quaternion, QuaternionError, UnitQuaternion, magnitude
from .residual import Edge, HandEyeDataset, PoseGraph, ProblemError

INGEST_TOL = 1e-3
VERTEX_TAG = "VERTEX_SE3:QUAT"
EDGE_TAG = "EDGE_SE3:QUAT"
N_INFO = 21


class ParseError(ValueError):
    def __init__(self, lineno: int | None, message: str):
        self.lineno = lineno
        self.message = message
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)


def _floats(tokens: Sequence[str], lineno: int) -> list[float]:
    out = []
    for tok in tokens:
        try:
            v = float(tok)
        except ValueError:
            raise ParseError(lineno, f"non-numeric field {tok!r}") from None
        if not math.isfinite(v):
            raise ParseError(lineno, f"non-finite field {tok!r}")
        out.append(v)
    return out


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(lineno, f"expected an integer id, got {tok!r}") from None


def record_to_udq(vals: Sequence[float], lineno: int) -> UnitDualQuaternion:
    """``tx ty tz qx qy qz qw`` -> unit dual quaternion."""
    tx, ty, tz, qx, qy, qz, qw = vals
    q = Quaternion(qw, qx, qy, qz)
    n = magnitude(q)
    if abs(n - 1.0) > INGEST_TOL:
        raise ParseError(lineno, f"quaternion magnitude {n:.6g} is off unit by more than {INGEST_TOL}")
    try:
        return udq_from_parts(UnitQuaternion.normalize(q, tol=INGEST_TOL), (tx, ty, tz))
    except (QuaternionError, ValueError) as exc:
        raise ParseError(lineno, str(exc)) from None


def udq_to_record(q: UnitDualQuaternion) -> list[float]:
    t = translation_quat(q).imag
    s = q.std
    return [t[0], t[1], t[2], s.q1, s.q2, s.q3, s.q0]


def _fmt(values: Iterable[float]) -> str:
    return " ".join(format(float(v), ".17g") for v in values)


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_pose_graph(text: str) -> tuple[PoseGraph, MotionVector | None]:
    """Parse a pose graph; returns the graph and, if every vertex has a
    ``VERTEX`` line, the initial guess as motions (vertex order ``0..n-1``).

    File ids are remapped to ``0..n-1`` in order of first appearance.
    """
    ids: dict[int, int] = {}
    guesses: dict[int, UnitDualQuaternion] = {}
    raw_edges: list[tuple[int, int, UnitDualQuaternion, int]] = []
    seen: dict[tuple[int, int], int] = {}

    def index(file_id: int) -> int:
        if file_id not in ids:
            ids[file_id] = len(ids)
        return ids[file_id]

    for lineno, tok in _lines(text):
        tag = tok[0]
        if tag == VERTEX_TAG:
            if len(tok) != 9:
                raise ParseError(lineno, f"{VERTEX_TAG} expects 8 fields, got {len(tok) - 1}")
            v = index(_int(tok[1], lineno))
            if v in guesses:
                raise ParseError(lineno, f"duplicate vertex id {tok[1]}")
            guesses[v] = record_to_udq(_floats(tok[2:], lineno), lineno)
        elif tag == EDGE_TAG:
            if len(tok) not in (10, 10 + N_INFO):
                raise ParseError(lineno, f"{EDGE_TAG} expects 9 or {9 + N_INFO} fields, got {len(tok) - 1}")
            fi, fj = _int(tok[1], lineno), _int(tok[2], lineno)
            vals = _floats(tok[3:], lineno)
            if fi == fj:
                raise ParseError(lineno, f"self-loop edge on vertex {fi}")
            if (fi, fj) in seen:
                raise ParseError(lineno, f"duplicate edge ({fi}, {fj}), first on line {seen[(fi, fj)]}")
            seen[(fi, fj)] = lineno
            raw_edges.append((index(fi), index(fj), record_to_udq(vals[:7], lineno), lineno))
        else:
            raise ParseError(lineno, f"unknown tag {tag!r}")

    if not raw_edges:
        raise ParseError(None, "pose graph contains no edges")
    edges = tuple(Edge(i, j, q) for i, j, q, _ in raw_edges)
    try:
        graph = PoseGraph(len(ids), edges)
    except ProblemError as exc:
        raise ParseError(None, str(exc)) from None
    guess = None
    if len(guesses) == graph.n:
        guess = MotionVector(tuple(motion_from_udq(guesses[v]) for v in range(graph.n)))
    return graph, guess


def write_pose_graph(graph: PoseGraph, poses: MotionVector | None = None) -> str:
    """Vertices (identity when ``poses`` is None) then edges, ids ``0..n-1``."""
    if poses is not None and len(poses) != graph.n:
        raise ValueError(f"expected {graph.n} poses, got {len(poses)}")
    out = []
    for v in range(graph.n):
        rec = udq_to_record(canonicalize_udq(udq_from_motion(poses[v]))) if poses is not None else [0, 0, 0, 0, 0, 0, 1]
        out.append(f"{VERTEX_TAG} {v} {_fmt(rec)}")
    for e in graph.edges:
        out.append(f"{EDGE_TAG} {e.i} {e.j} {_fmt(udq_to_record(e.q))}")
    return "\n".join(out) + "\n"


def parse_handeye(text: str) -> HandEyeDataset:
    a_list: list[tuple[UnitDualQuaternion, int]] = []
    b_list: list[UnitDualQuaternion] = []
    for lineno, tok in _lines(text):
        tag = tok[0]
        if tag not in ("A", "B"):
            raise ParseError(lineno, f"unknown tag {tag!r}")
        if len(tok) != 8:
            raise ParseError(lineno, f"{tag} expects 7 fields, got {len(tok) - 1}")
        q = record_to_udq(_floats(tok[1:], lineno), lineno)
        if tag == "A":
            a_list.append((q, lineno))
        else:
            if len(b_list) >= len(a_list):
                raise ParseError(lineno, "B without a preceding A")
            b_list.append(q)
    if len(a_list) > len(b_list):
        raise ParseError(a_list[len(b_list)][1], "A without a matching B")
    if not a_list:
        raise ParseError(None, "hand-eye dataset contains no measurement pairs")
    return HandEyeDataset(tuple((a, b) for (a, _), b in zip(a_list, b_list)))


def write_handeye(dataset: HandEyeDataset) -> str:
    out = []
    for a, b in dataset.pairs:
        out.append(f"A {_fmt(udq_to_record(a))}")
        out.append(f"B {_fmt(udq_to_record(b))}")
    return "\n".join(out) + "\n"


def parse_motions(text: str) -> MotionVector:
    """One motion per line: ``r1 r2 r3 t1 t2 t3``."""
    comps = []
    for lineno, tok in _lines(text):
        if len(tok) != 6:
            raise ParseError(lineno, f"a motion line has 6 fields, got {len(tok)}")
        comps.append(Motion.from_array(_floats(tok, lineno)))
    if not comps:
        raise ParseError(None, "no motions found")
    return MotionVector(tuple(comps))


def write_motions(v: MotionVector) -> str:
    return "".join(_fmt(m.r + m.t) + "\n" for m in v)


def has_information_blocks(text: str) -> bool:
    """True if any edge line carries the (ignored) information matrix."""
    return any(tok[0] == EDGE_TAG and len(tok) == 10 + N_INFO for _, tok in _lines(text))
