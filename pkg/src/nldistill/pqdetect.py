"""Post-quantum detectors.

Each detector returns a :class:`DetectionVerdict`. Only non-membership in
the quantum set is ever certified; a negative verdict proves nothing.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .exceptions import InvalidBehavior
from .nsbox import (
    HARDY_QUANTUM_MAX,
    HARDY_TOL,
    _table,
    all_relabelings,
    apply_relabeling,
    canonicalize,
    correlators,
    hardy_test,
    validate,
)
from .wiring import wire_n_closed

MARGIN = 1e-9
NTCC_THRESHOLD = 4 * math.sqrt(2 / 3)
IC_THRESHOLD = 1.0


@dataclass(frozen=True)
class DetectionVerdict:
    detector: str
    quantity: float
    threshold: float
    positive: bool
    witness: Optional[int] = None
    caveat: Optional[str] = None

    def to_json(self) -> dict:
        return asdict(self)


def hardy_frames(b, tol: float = HARDY_TOL):
    """Relabelings under which ``b`` passes the Hardy test, with the relabeled boxes."""
    for r in all_relabelings():
        q = apply_relabeling(b, r)
        if hardy_test(q, tol).is_hardy:
            yield r, q


def hardy_bound_detector(b, max_copies: int) -> DetectionVerdict:
    """Wire 1..max_copies copies and compare the Hardy success with the quantum maximum.

    The search runs over every relabeled frame in which ``b`` is a Hardy box
    (OR-AND preserves the three zeros, so each child stays Hardy).
    """
    problems = validate(_table(b))
    if problems:
        raise InvalidBehavior(problems)
    if max_copies < 1:
        raise ValueError("max_copies must be >= 1")
    best = 0.0
    witness = None
    best_frame = None
    for r, q in hardy_frames(b):
        for n in range(1, max_copies + 1):
            cert = hardy_test(wire_n_closed(q, n))
            if not cert.is_hardy:
                continue
            if cert.success > best:
                best, best_frame = cert.success, r
            if cert.success > HARDY_QUANTUM_MAX + MARGIN and (witness is None or n < witness):
                witness = n
    caveat = None
    if best_frame is None:
        caveat = "no relabeled frame satisfies the Hardy zero constraints"
    elif best_frame.encoding != (0,) * 7:
        caveat = f"best success found in relabeled frame {best_frame}"
    return DetectionVerdict("hardy_bound", best, HARDY_QUANTUM_MAX, witness is not None, witness, caveat)


def ntcc_check(b) -> DetectionVerdict:
    _, _, value = canonicalize(b)
    return DetectionVerdict(
        "ntcc", value, NTCC_THRESHOLD, bool(value > NTCC_THRESHOLD + MARGIN), None,
        "threshold is proven for isotropic boxes; applied here as a screen",
    )


def ic_quantity(b) -> float:
    p = _table(b)
    even = p[:, 0] + p[:, 3]  # p(a xor b = 0 | xy)
    odd = 1.0 - even
    p1 = 0.5 * (even[0] + odd[2])
    p2 = 0.5 * (odd[1] + odd[3])
    return float((2 * p1 - 1) ** 2 + (2 * p2 - 1) ** 2)


def ic_check(b) -> DetectionVerdict:
    """Sufficient information-causality violation E1^2 + E2^2 > 1."""
    value = ic_quantity(b)
    return DetectionVerdict("ic", value, IC_THRESHOLD, bool(value > IC_THRESHOLD + 1e-12))


def arcsine_boundary_value(b) -> float:
    """max over (x*, y*) of |sum_xy arcsin<xy> - 2 arcsin<x*y*>|."""
    s = np.arcsin(np.clip(correlators(b), -1.0, 1.0))
    return float(np.max(np.abs(s.sum() - 2 * s)))


def quantum_boundary_check(b) -> DetectionVerdict:
    """Arcsine criterion for the correlators; beyond pi means no quantum model."""
    value = arcsine_boundary_value(b)
    return DetectionVerdict(
        "quantum_boundary", value, math.pi, bool(value > math.pi + MARGIN), None,
        "uses correlators only; certifies non-membership, never membership",
    )


def detect_all(b, max_copies: int) -> list[DetectionVerdict]:
    canon, _, _ = canonicalize(b)
    return [
        hardy_bound_detector(b, max_copies),
        ntcc_check(b),
        ic_check(canon),
        quantum_boundary_check(b),
    ]
