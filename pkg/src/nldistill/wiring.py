"""OR-AND wiring of 2-2-2 boxes.

Every parent receives the same inputs (x, y). Alice outputs the OR of her
parents' outputs and Bob the AND of his.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DomainError, EmptyList, InvalidBehavior, ShapeError, WeightError
from .nsbox import (
    STRUCT_TOL,
    Behavior,
    SimplexDecomposition,
    _table,
    validate,
)

# _COMBINE[i, j, k] = 1 when parent outcomes i=(a1,b1), j=(a2,b2) give child k=(a1|a2, b1&b2)
_COMBINE = np.zeros((4, 4, 4))
for _i in range(4):
    for _j in range(4):
        _a = (_i >> 1) | (_j >> 1)
        _b = (_i & 1) & (_j & 1)
        _COMBINE[_i, _j, 2 * _a + _b] = 1.0


@dataclass(frozen=True)
class WiringResult:
    child: Behavior
    parents_count: int
    method: str


def _finish(q: np.ndarray, tol: float = STRUCT_TOL) -> Behavior:
    problems = validate(q, tol=tol)
    if problems:
        raise InvalidBehavior(problems)
    return Behavior(np.clip(q, 0.0, 1.0), check=False)


def wire_pair(b1, b2) -> Behavior:
    p1, p2 = _table(b1), _table(b2)
    q = np.einsum("si,sj,ijk->sk", p1, p2, _COMBINE)
    return _finish(q)


def wire_n_closed(b, n: int) -> Behavior:
    """Child of ``n`` identical parents, from the closed form per setting."""
    if int(n) != n or n < 1:
        raise DomainError(f"copy count must be a positive integer, got {n!r}")
    n = int(n)
    p = _table(b)
    p00, p01, p11 = p[:, 0], p[:, 1], p[:, 3]
    q = np.empty_like(p)
    q01 = p01 ** n
    q[:, 0] = (p00 + p01) ** n - q01
    q[:, 1] = q01
    q[:, 3] = (p11 + p01) ** n - q01
    q[:, 2] = 1.0 - q[:, 0] - q[:, 1] - q[:, 3]
    # marginal roundoff in the parent is amplified n-fold by the powers
    return _finish(q, tol=STRUCT_TOL * n)


def wire_chain(bs: Sequence) -> Behavior:
    """Left fold of :func:`wire_pair`."""
    bs = list(bs)
    if not bs:
        raise EmptyList("wire_chain needs at least one behavior")
    child = bs[0] if isinstance(bs[0], Behavior) else Behavior(bs[0])
    for b in bs[1:]:
        child = wire_pair(child, b)
    return child


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Empirical child frequencies. ``p`` need not be exactly no-signaling."""

    p: np.ndarray
    stderr: np.ndarray
    rounds: int

    def zscores(self, reference) -> np.ndarray:
        ref = _table(reference)
        se = np.where(self.stderr > 0, self.stderr, np.inf)
        z = np.abs(self.p - ref) / se
        # a zero-variance cell must match exactly
        return np.where((self.stderr == 0) & (self.p != ref), np.inf, z)


MC_CHUNK = 1 << 16


def _chunk_rng(seed: int, setting: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(setting, chunk))
    return np.random.Generator(np.random.Philox(ss))


def monte_carlo_wire(bs: Sequence, rounds: int, seed: int = 0) -> MonteCarloEstimate:
    """Sample the OR-AND wiring round by round.

    Each (setting, chunk of MC_CHUNK rounds) draws from its own counter-based
    stream, so results depend only on ``seed`` and ``rounds``.
    """
    if rounds < 1:
        raise DomainError("rounds must be >= 1")
    tables = [_table(b) for b in bs]
    if not tables:
        raise EmptyList("monte_carlo_wire needs at least one behavior")
    counts = np.zeros((4, 4), dtype=np.int64)
    for s in range(4):
        cdfs = [np.cumsum(t[s]) for t in tables]
        done = 0
        chunk = 0
        while done < rounds:
            m = min(MC_CHUNK, rounds - done)
            rng = _chunk_rng(seed, s, chunk)
            a = np.zeros(m, dtype=np.int64)
            b = np.ones(m, dtype=np.int64)
            for cdf in cdfs:
                u = rng.random(m)
                k = np.minimum(np.searchsorted(cdf, u, side="right"), 3)
                a |= k >> 1
                b &= k & 1
            counts[s] += np.bincount(2 * a + b, minlength=4)
            done += m
            chunk += 1
    freq = counts / rounds
    stderr = np.sqrt(freq * (1.0 - freq) / rounds)
    return MonteCarloEstimate(freq, stderr, rounds)


# Hardy-form and simplex coefficient maps ----------------------------------

def _weights(c) -> np.ndarray:
    w = np.asarray(c.c if isinstance(c, SimplexDecomposition) else c, dtype=float)
    if w.ndim != 1 or len(w) > 9:
        raise WeightError("expected at most 9 simplex weights")
    return np.concatenate([w, np.zeros(9 - len(w))])


def two_copy_hardy_coeffs(c) -> SimplexDecomposition:
    """Simplex weights of the 2-copy child of a Hardy-form box.

    ``c`` holds weights over (P_NL, P_L1..P_L5); P_L6..P_L8 must be absent.
    """
    w = _weights(c)
    if np.any(np.abs(w[6:]) > STRUCT_TOL):
        raise ShapeError("Hardy-form weights must have c6 = c7 = c8 = 0")
    c0, c1, c2, c3, c4, c5 = w[:6]
    child = (
        2 * ((c0 / 2 + c1) ** 2 - c1 ** 2),
        c1 ** 2,
        c0 * (1 - c0 / 2) + 2 * c2 * (1 - c2 / 2) - c0 * (c1 + c2),
        c3 * (2 - c0 - c3 - 2 * c2),
        c4 * (c0 + 2 * c1 + c4),
        c5 * (c0 + 2 * c1 + 2 * c4 + c5),
        0.0, 0.0, 0.0,
    )
    return SimplexDecomposition(tuple(float(v) for v in child), 0.0)


def chsh_after_two_copy(c) -> float:
    """CHSH value of the 2-copy child, as a polynomial in the simplex weights."""
    w = _weights(c)
    if np.any(w < -1e-10) or abs(w.sum() - 1.0) > 1e-10:
        raise WeightError("simplex weights must be nonnegative and sum to 1")
    c0, c1, c2, c3, c4, c5, c6, c7, _ = w
    return float(2 + c0 ** 2 + 4 * c0 * (c1 + 2 * c4)
                 + 8 * c4 * (c1 + c2 + c3 + c5 + c6 - 1) + 8 * c4 ** 2 - 8 * c5 * c7)


def wire(bs: Sequence, copies: int = 1, method: str = "closed",
         rounds: int = 100_000, seed: int = 0) -> WiringResult:
    """Front end used by the command line.

    One parent with ``copies > 1`` is wired with itself; several parents are
    folded left. ``method`` is ``closed``, ``chain`` or ``mc`` (the latter
    returns the empirical table without no-signaling validation).
    """
    bs = list(bs)
    if not bs:
        raise EmptyList("no parents")
    parents = bs * copies if len(bs) == 1 else bs
    if method == "mc":
        est = monte_carlo_wire(parents, rounds, seed)
        return WiringResult(Behavior(est.p, check=False), len(parents), "sampled")
    if method == "closed" and len(bs) == 1:
        return WiringResult(wire_n_closed(bs[0], copies), copies, "closed-form")
    if method in ("closed", "chain"):
        return WiringResult(wire_chain(parents), len(parents), "chained")
    raise ValueError(f"unknown method {method!r}")
