"""2-2-2 no-signaling behaviors.

A behavior is stored as a 4x4 array ``p`` with ``p[2*x + y, 2*a + b] = p(ab|xy)``.
Rows run over the setting pairs 00, 01, 10, 11 and columns over the outcome
pairs in the same order.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .exceptions import (
    InvalidBehavior,
    NotInSimplex,
    SchemaError,
    UnknownName,
    WeightError,
)

STRUCT_TOL = 1e-12
DECOMP_RESIDUAL_TOL = 1e-9
DECOMP_NEG_TOL = 1e-10
HARDY_TOL = 1e-9

SCHEMA = "nsbox/behavior-v1"
ROW_ORDER = "xy:00,01,10,11"
COL_ORDER = "ab:00,01,10,11"


@dataclass(frozen=True)
class Violation:
    """One failed invariant. ``location`` names the worst offending indices."""

    invariant: str
    location: dict
    magnitude: float

    def __str__(self):
        loc = ", ".join(f"{k}={v}" for k, v in self.location.items())
        return f"{self.invariant}({loc}, magnitude={self.magnitude:.3g})"


def validate(table, tol: float = STRUCT_TOL) -> list[Violation]:
    """Check a 4x4 table against the behavior invariants.

    Returns an empty list when the table is a valid no-signaling behavior.
    Each violated invariant is reported once, at its worst offender.
    """
    p = np.asarray(table, dtype=float)
    if p.shape != (4, 4):
        return [Violation("ShapeViolation", {"shape": p.shape}, math.inf)]
    if not np.all(np.isfinite(p)):
        return [Violation("FiniteViolation", {}, math.inf)]
    report = []

    low = -p
    high = p - 1.0
    worst = np.maximum(low, high)
    i, j = np.unravel_index(np.argmax(worst), worst.shape)
    if worst[i, j] > tol:
        report.append(Violation("RangeViolation", {"row": int(i), "col": int(j)}, float(worst[i, j])))

    deficit = 1.0 - p.sum(axis=1)
    row = int(np.argmax(np.abs(deficit)))
    if abs(deficit[row]) > tol:
        report.append(Violation("NormalizationViolation", {"row": row, "deficit": float(deficit[row])},
                                float(abs(deficit[row]))))

    t = p.reshape(2, 2, 2, 2)  # x, y, a, b
    alice = t.sum(axis=3)  # p(a|x) computed at each y: [x, y, a]
    gap_a = np.abs(alice[:, 0, :] - alice[:, 1, :])
    bob = t.sum(axis=2)  # [x, y, b]
    gap_b = np.abs(bob[0, :, :] - bob[1, :, :])
    for party, gap, other in (("A", gap_a, "x"), ("B", gap_b, "y")):
        k, o = np.unravel_index(np.argmax(gap), gap.shape)
        if gap[k, o] > tol:
            report.append(Violation("NoSignalingViolation",
                                    {"party": party, other: int(k), "outcome": int(o)}, float(gap[k, o])))
    return report


@dataclass(frozen=True, eq=False)
class Behavior:
    """Immutable no-signaling behavior. Construction validates the table."""

    p: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        arr = np.array(self.p, dtype=float)
        if self.check:
            problems = validate(arr)
            if problems:
                raise InvalidBehavior(problems)
        arr.setflags(write=False)
        object.__setattr__(self, "p", arr)

    def __getitem__(self, idx):
        return self.p[idx]

    def prob(self, a: int, b: int, x: int, y: int) -> float:
        return float(self.p[2 * x + y, 2 * a + b])

    def allclose(self, other: "Behavior", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.p, _table(other), rtol=0.0, atol=atol))


def _table(b) -> np.ndarray:
    return b.p if isinstance(b, Behavior) else np.asarray(b, dtype=float)


# vertices -----------------------------------------------------------------

@dataclass(frozen=True, order=True)
class VertexId:
    """``kind`` is ``"PR"`` with bits (alpha, beta, gamma) or ``"L"`` with
    bits (alpha1, alpha2, beta1, beta2)."""

    kind: str
    bits: tuple

    def __post_init__(self):
        n = {"PR": 3, "L": 4}.get(self.kind)
        if n is None or len(self.bits) != n or any(v not in (0, 1) for v in self.bits):
            raise ValueError(f"bad vertex id {self.kind}{self.bits}")

    @property
    def name(self) -> str:
        return f"{self.kind}_{''.join(map(str, self.bits))}"


def all_vertex_ids() -> list[VertexId]:
    prs = [VertexId("PR", bits) for bits in itertools.product((0, 1), repeat=3)]
    locs = [VertexId("L", bits) for bits in itertools.product((0, 1), repeat=4)]
    return prs + locs


def vertex(vid: VertexId) -> Behavior:
    p = np.zeros((4, 4))
    for x, y in itertools.product((0, 1), repeat=2):
        if vid.kind == "PR":
            al, be, ga = vid.bits
            parity = (x * y) ^ (al * x) ^ (be * y) ^ ga
            for a in (0, 1):
                p[2 * x + y, 2 * a + (a ^ parity)] = 0.5
        else:
            a1, a2, b1, b2 = vid.bits
            a = (a1 * x) ^ a2
            b = (b1 * y) ^ b2
            p[2 * x + y, 2 * a + b] = 1.0
    return Behavior(p)


# the 9-vertex simplex of boxes with CHSH value >= 2 in the chosen symmetry
SIMPLEX_IDS = (
    VertexId("PR", (1, 1, 0)),
    VertexId("L", (0, 0, 0, 1)),
    VertexId("L", (0, 1, 0, 0)),
    VertexId("L", (0, 1, 1, 1)),
    VertexId("L", (1, 1, 0, 1)),
    VertexId("L", (1, 1, 1, 1)),
    VertexId("L", (1, 0, 0, 0)),
    VertexId("L", (0, 0, 1, 0)),
    VertexId("L", (1, 0, 1, 0)),
)
SIMPLEX_NAMES = ("P_NL",) + tuple(f"P_L{i}" for i in range(1, 9))


@lru_cache(maxsize=None)
def _simplex_matrix() -> np.ndarray:
    cols = [vertex(v).p.ravel() for v in SIMPLEX_IDS]
    m = np.column_stack(cols)
    m.setflags(write=False)
    return m


def mix(weights: Sequence[float], boxes: Sequence) -> Behavior:
    """Convex combination ``sum_i w_i * boxes[i]``."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or len(w) != len(boxes) or len(w) == 0:
        raise WeightError("weights and boxes must be nonempty lists of equal length")
    if np.any(w < 0) or abs(w.sum() - 1.0) > STRUCT_TOL:
        raise WeightError(f"weights must be nonnegative and sum to 1, got sum {w.sum()!r}")
    tables = np.stack([_table(b) for b in boxes])
    return Behavior(np.tensordot(w, tables, axes=1))


def simplex_mix(c: Sequence[float]) -> Behavior:
    """Behavior with weights ``c`` over (P_NL, P_L1..P_L8); shorter ``c`` is zero padded."""
    c = np.asarray(c, dtype=float)
    if len(c) > 9:
        raise WeightError("at most 9 simplex weights")
    c = np.concatenate([c, np.zeros(9 - len(c))])
    return mix(c, [vertex(v) for v in SIMPLEX_IDS])


# measures -----------------------------------------------------------------

_SIGNS = np.array([1.0, -1.0, -1.0, 1.0])
CHSH_COEFFS = np.array([1.0, -1.0, -1.0, -1.0])


def correlators(b) -> np.ndarray:
    """All four correlators <xy> in row order 00, 01, 10, 11."""
    return _table(b) @ _SIGNS


def correlator(b, x: int, y: int) -> float:
    return float(correlators(b)[2 * x + y])


def chsh(b) -> float:
    """<00> - <01> - <10> - <11>."""
    return float(CHSH_COEFFS @ correlators(b))


# relabelings --------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Relabeling:
    """Local reversible relabeling of inputs and outputs.

    The relabeled box, on inputs (x, y), feeds ``x ^ flip_input_A`` and
    ``y ^ flip_input_B`` to the original (party-swapped if ``swap_parties``)
    box and XORs the returned outputs with ``flip_output_A[x]`` and
    ``flip_output_B[y]``. Field order is the lexicographic encoding.
    """

    swap_parties: int = 0
    flip_input_A: int = 0
    flip_input_B: int = 0
    flip_output_A: tuple = (0, 0)
    flip_output_B: tuple = (0, 0)

    @property
    def encoding(self) -> tuple:
        return (self.swap_parties, self.flip_input_A, self.flip_input_B,
                *self.flip_output_A, *self.flip_output_B)

    def permutation(self) -> np.ndarray:
        return _permutation(self)

    def inverse(self) -> "Relabeling":
        return _by_permutation()[tuple(np.argsort(self.permutation()))]

    def __str__(self):
        return "".join(map(str, self.encoding))


@lru_cache(maxsize=None)
def _permutation(r: Relabeling) -> np.ndarray:
    perm = np.empty(16, dtype=int)
    for x, y, a, b in itertools.product((0, 1), repeat=4):
        x1, y1 = x ^ r.flip_input_A, y ^ r.flip_input_B
        a1, b1 = a ^ r.flip_output_A[x], b ^ r.flip_output_B[y]
        if r.swap_parties:
            x1, y1, a1, b1 = y1, x1, b1, a1
        perm[4 * (2 * x + y) + 2 * a + b] = 4 * (2 * x1 + y1) + 2 * a1 + b1
    perm.setflags(write=False)
    return perm


@lru_cache(maxsize=None)
def all_relabelings() -> tuple:
    """The 128 relabelings in lexicographic order of their encoding."""
    out = []
    for bits in itertools.product((0, 1), repeat=7):
        out.append(Relabeling(bits[0], bits[1], bits[2], bits[3:5], bits[5:7]))
    return tuple(out)


@lru_cache(maxsize=None)
def _by_permutation() -> dict:
    return {tuple(r.permutation()): r for r in all_relabelings()}


IDENTITY = Relabeling()
SWAP_PARTIES = Relabeling(swap_parties=1)


def apply_relabeling(b, r: Relabeling) -> Behavior:
    p = _table(b).ravel()[r.permutation()].reshape(4, 4)
    return Behavior(p, check=False)


def canonicalize(b) -> tuple[Behavior, Relabeling, float]:
    """Relabeled behavior with the largest CHSH value.

    Ties (within 1e-12) go to the lexicographically smallest relabeling, so
    the identity wins whenever it is optimal.
    """
    flat = _table(b).ravel()
    values = np.array([chsh(flat[r.permutation()].reshape(4, 4)) for r in all_relabelings()])
    best = values.max()
    k = int(np.flatnonzero(values >= best - STRUCT_TOL)[0])
    r = all_relabelings()[k]
    return apply_relabeling(b, r), r, float(values[k])


# simplex decomposition ----------------------------------------------------

@dataclass(frozen=True)
class SimplexDecomposition:
    """Weights c0..c8 over (P_NL, P_L1, ..., P_L8)."""

    c: tuple
    residual: float = 0.0

    def __getitem__(self, i):
        return self.c[i]

    def __len__(self):
        return len(self.c)

    def behavior(self) -> Behavior:
        return simplex_mix(self.c)


def decompose_simplex(b, residual_tol: float = DECOMP_RESIDUAL_TOL) -> SimplexDecomposition:
    """Affine coordinates of ``b`` in the 9-vertex simplex.

    Raises NotInSimplex if the least-squares fit leaves a residual above
    ``residual_tol`` or any weight is below -1e-10.
    """
    m = _simplex_matrix()
    target = _table(b).ravel()
    c, *_ = np.linalg.lstsq(m, target, rcond=None)
    residual = float(np.max(np.abs(m @ c - target)))
    if residual > residual_tol:
        raise NotInSimplex(f"residual {residual:.3g} exceeds {residual_tol:.3g}")
    k = int(np.argmin(c))
    if c[k] < -DECOMP_NEG_TOL:
        raise NotInSimplex(f"weight c{k} = {c[k]:.6g} is negative")
    c = np.clip(c, 0.0, None)
    return SimplexDecomposition(tuple(float(v) for v in c), residual)


# Hardy test ---------------------------------------------------------------

@dataclass(frozen=True)
class HardyCertificate:
    success: float
    zero_residuals: tuple
    is_hardy: bool


def hardy_test(b, tol: float = HARDY_TOL) -> HardyCertificate:
    p = _table(b)
    success = float(p[0, 0])
    zeros = (float(p[1, 0]), float(p[2, 0]), float(p[3, 3]))
    ok = success > tol and all(abs(z) <= tol for z in zeros)
    return HardyCertificate(success, zeros, ok)


# catalog ------------------------------------------------------------------

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)
HARDY_QUANTUM_MAX = (5 * SQRT5 - 11) / 2

H_Q_MAX_WEIGHTS = (5 * SQRT5 - 11,) + ((7 - 3 * SQRT5) / 2,) * 4 + (SQRT5 - 2,)
B_Q_MAX_WEIGHTS = (SQRT2 - 1,) + (0.25 * (1 - 1 / SQRT2),) * 8
H_NS_WEIGHTS = (0.1, 0.85, 0.01, 0.01, 0.02, 0.01)

_H_NS_PRIME = (
    (0.0773, 0.0256, 0.5599, 0.3372),
    (0.0, 0.1029, 0.7804, 0.1167),
    (0.0, 0.3374, 0.6372, 0.0254),
    (0.1178, 0.2196, 0.6626, 0.0),
)


def _catalog() -> dict:
    cat = {}
    for vid in all_vertex_ids():
        cat[vid.name] = lambda vid=vid: vertex(vid)
    for name, vid in zip(SIMPLEX_NAMES, SIMPLEX_IDS):
        cat[name] = lambda vid=vid: vertex(vid)
    cat["H_Q_max"] = lambda: simplex_mix(H_Q_MAX_WEIGHTS)
    cat["B_Q_max"] = lambda: simplex_mix(B_Q_MAX_WEIGHTS)
    cat["H_NS"] = lambda: simplex_mix(H_NS_WEIGHTS)
    cat["H_NS_prime"] = lambda: Behavior(_H_NS_PRIME)
    return cat


_CATALOG = _catalog()
CATALOG_NAMES = tuple(_CATALOG)


def named_box(name: str) -> Behavior:
    try:
        return _CATALOG[name]()
    except KeyError:
        raise UnknownName(f"unknown box {name!r}; known: {', '.join(CATALOG_NAMES)}") from None


# JSON ---------------------------------------------------------------------

def behavior_to_json(b) -> dict:
    return {"schema": SCHEMA, "row_order": ROW_ORDER, "col_order": COL_ORDER,
            "p": [[float(v) for v in row] for row in _table(b)]}


def table_from_json(doc: dict) -> np.ndarray:
    """Parse a behavior document without validating the probabilities."""
    if not isinstance(doc, dict):
        raise SchemaError("behavior document must be a JSON object")
    if doc.get("schema") != SCHEMA:
        raise SchemaError(f"unsupported schema {doc.get('schema')!r}")
    if doc.get("row_order", ROW_ORDER) != ROW_ORDER or doc.get("col_order", COL_ORDER) != COL_ORDER:
        raise SchemaError("unsupported row/col order")
    try:
        p = np.array(doc["p"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad probability table: {exc}") from None
    if p.shape != (4, 4):
        raise SchemaError(f"probability table must be 4x4, got {p.shape}")
    return p


def behavior_from_json(doc: dict) -> Behavior:
    return Behavior(table_from_json(doc))


def save_behavior(b, path) -> None:
    Path(path).write_text(json.dumps(behavior_to_json(b), indent=2) + "\n")


def load_table(path) -> np.ndarray:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not JSON ({exc})") from None
    return table_from_json(doc)


def load_behavior(path) -> Behavior:
    return Behavior(load_table(path))


def uniform_box() -> Behavior:
    return Behavior(np.full((4, 4), 0.25))

