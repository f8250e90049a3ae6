"""Distillation analytics for the OR-AND wiring.

Hardy success under n copies, the optimal copy count, the quantum Hardy
(r, s) family, CHSH growth for mixtures with P_L1, and grid sweeps.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .exceptions import DomainError, GridError
from .nsbox import H_Q_MAX_WEIGHTS, SQRT2, Behavior, decompose_simplex

SMALL_LAMBDA = 1e-5


# Hardy success ------------------------------------------------------------

def _check_hardy_weights(c0, c1):
    if not (c0 > 0 and c1 >= 0 and c0 + c1 <= 1 + 1e-12):
        raise DomainError(f"need c0 > 0, c1 >= 0, c0 + c1 <= 1; got c0={c0!r}, c1={c1!r}")


def hardy_success_n(c0: float, c1: float, n):
    """(c0/2 + c1)**n - c1**n. ``n`` may be an integer array."""
    _check_hardy_weights(c0, c1)
    n_arr = np.asarray(n)
    if np.any(n_arr < 1) or np.any(n_arr != np.floor(n_arr)):
        raise DomainError("copy count must be a positive integer")
    u = c0 / 2 + c1
    out = np.power(u, n_arr, dtype=float) - np.power(c1, n_arr, dtype=float)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CopyOptimum:
    n_star: float
    n_opt: int
    value_opt: float


def optimal_copies(c0: float, c1: float) -> CopyOptimum:
    """Copy count maximizing the distilled Hardy success.

    The continuous relaxation (c0/2+c1)**x - c1**x has a single critical
    point x*; the best integer is floor(x*) or floor(x*)+1.
    """
    _check_hardy_weights(c0, c1)
    if c1 >= 1:
        raise DomainError("c1 must be < 1")
    if c1 == 0:
        return CopyOptimum(math.nan, 1, hardy_success_n(c0, c1, 1))
    u = c0 / 2 + c1
    x_star = math.log(math.log(c1) / math.log(u)) / math.log(u / c1)
    lo = math.floor(x_star)
    candidates = sorted({max(1, lo), max(1, lo + 1)})
    values = [hardy_success_n(c0, c1, k) for k in candidates]
    k = int(np.argmax(values))
    return CopyOptimum(x_star, candidates[k], values[k])


def tsirelson_gain(b_parent: float, b_child: float) -> float:
    """CHSH improvement as a percentage of the gap between 2 and 2*sqrt(2)."""
    return (b_child - b_parent) / (2 * (SQRT2 - 1)) * 100.0


# quantum Hardy family -----------------------------------------------------

def hardy_family_table(r: float, s: float) -> np.ndarray:
    d = 1 - r * s
    return np.array([
        [(1 - r) * r * (1 - s) * s / d, (1 - r) ** 2 * s / d, (1 - r) * (1 - s), r],
        [0.0, (1 - r) * s, (1 - s) / d, (1 - r) * r * s * s / d],
        [0.0, s, (1 - r) * (1 - s) / d, r * (1 - s) ** 2 / d],
        [r * (1 - s) * s / d, (1 - r) * s / d, 1 - s, 0.0],
    ])


def hardy_family(r: float, s: float) -> Behavior:
    """Two-parameter family of quantum Hardy boxes, r, s in [0, 1] with rs < 1."""
    if not (0 <= r <= 1 and 0 <= s <= 1):
        raise DomainError(f"r and s must lie in [0, 1]; got ({r!r}, {s!r})")
    if r * s >= 1:
        raise DomainError("r*s = 1 is singular")
    return Behavior(hardy_family_table(r, s))


def region_value(r, s):
    return r ** 2 * (s + s ** 2) - r * (s ** 2 + 2 * s) + (2 * s - 1)


def distillable_region(r: float, s: float) -> bool:
    """True when two OR-AND copies of hardy_family(r, s) beat one."""
    return bool(region_value(r, s) > 0)


def distillation_gap(r: float, s: float) -> tuple[float, int]:
    """(best distilled Hardy success minus parent success, copy count)."""
    if not (0 < r < 1 and 0 < s < 1):
        raise DomainError("r and s must lie in the open unit interval")
    c = decompose_simplex(hardy_family(r, s))
    opt = optimal_copies(c[0], c[1])
    if opt.n_opt == 1:
        return 0.0, 1
    return opt.value_opt - c[0] / 2, opt.n_opt


def limit_distilled_hardy(r: float, s: float) -> float:
    """Optimal distilled Hardy success of lam*hardy_family(r,s) + (1-lam)*P_L1 as lam -> 0."""
    if not (0 < r < 1 and 0 < s < 1):
        raise DomainError("r and s must lie in the open unit interval")
    q = (1 - r) * r * s
    num = 1 - s + q
    den = 1 - s + q * s
    exponent = 1 - 1 / q - 1 / (1 - s)
    return float((1 - r) * r * (1 - s) * s * (num / den) ** exponent / num)


def hardy_lambda_weights(lam: float, base=None) -> tuple[float, float]:
    """(c0, c1) of lam*H + (1-lam)*P_L1 where H has Hardy weights ``base`` (default H_Q^max)."""
    b0, b1 = (H_Q_MAX_WEIGHTS[0], H_Q_MAX_WEIGHTS[1]) if base is None else base
    return lam * b0, lam * b1 + (1 - lam)


def limit_constant_hqmax() -> float:
    """Closed-form lam -> 0 limit for the H_Q^max mixture."""
    r5 = math.sqrt(5.0)
    return 4 ** (2 + r5) * 5 ** (-2.5 - r5) * (r5 - 2)


# CHSH of lam*B_Q^max + (1-lam)*P_L1 under n copies ---------------------------

_RATES = (0.5, (6 - SQRT2) / 8, (6 + SQRT2) / 8)
_AMPS = (-8.0, 12.0, -4.0)


def _check_lambda(lam, open_left=False):
    if not (0 <= lam <= 1) or (open_left and lam == 0):
        raise DomainError(f"lambda out of range: {lam!r}")


def chsh_n_lambda(lam: float, n):
    """CHSH value after n copies; evaluated in log space so n ~ 1e7 is exact enough."""
    _check_lambda(lam)
    n_arr = np.asarray(n, dtype=float)
    if np.any(n_arr < 1):
        raise DomainError("copy count must be >= 1")
    out = 2.0 + sum(a * np.exp(n_arr * math.log1p(-k * lam)) for a, k in zip(_AMPS, _RATES))
    return float(out) if np.ndim(out) == 0 else out


def peak_ansatz_alpha() -> float:
    """alpha such that n = alpha/lam maximizes the CHSH value as lam -> 0."""
    def deriv(t):
        return sum(-a * k * math.exp(-k * t) for a, k in zip(_AMPS, _RATES))
    return brentq(deriv, 0.1, 5.0, xtol=1e-14)


def limit_peak_chsh() -> float:
    """Peak CHSH value in the lam -> 0 limit, where (1 - k lam)**(t/lam) -> exp(-k t)."""
    t = peak_ansatz_alpha()
    return 2.0 + sum(a * math.exp(-k * t) for a, k in zip(_AMPS, _RATES))


@dataclass(frozen=True)
class ChshPeak:
    n_opt: int
    value: float


def peak_chsh_lambda(lam: float) -> ChshPeak:
    """Integer copy count maximizing chsh_n_lambda(lam, n)."""
    _check_lambda(lam, open_left=True)
    if lam < SMALL_LAMBDA:
        alpha = peak_ansatz_alpha()
        centre = alpha / lam
        res = minimize_scalar(lambda n: -chsh_n_lambda(lam, n), method="golden",
                              bracket=(0.5 * centre, centre, 2 * centre),
                              options={"xtol": 1e-12})
        x = res.x
        cands = sorted({max(1, math.floor(x)), max(1, math.floor(x) + 1)})
    else:
        cands = np.arange(1, math.ceil(10 / lam) + 1)
    values = np.atleast_1d(chsh_n_lambda(lam, np.asarray(cands)))
    k = int(np.argmax(values))
    return ChshPeak(int(cands[k]), float(values[k]))


def two_copy_chsh_threshold() -> float:
    """Largest lam for which 2 copies of lam*B_Q^max + (1-lam)*P_L1 beat one."""
    return 8 / 167 * (13 - SQRT2)


def two_copy_ball_radius(c0: float) -> float:
    """Sufficient bound on lam for 2-copy distillation of lam*C + (1-lam)*P_L1."""
    if not 0 <= c0 <= 1:
        raise DomainError("c0 must lie in [0, 1]")
    return 2 * c0 / 3


# sweeps -------------------------------------------------------------------

@dataclass(frozen=True)
class Axis:
    """``count`` interior points of [lo, hi], offset half a step from each end."""

    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if not (self.lo < self.hi) or self.count < 2:
            raise GridError(f"bad axis {self.lo}:{self.hi}:{self.count}")

    def points(self) -> np.ndarray:
        step = (self.hi - self.lo) / self.count
        return self.lo + (np.arange(self.count) + 0.5) * step

    @classmethod
    def parse(cls, text: str) -> "Axis":
        try:
            lo, hi, count = text.split(":")
            return cls(float(lo), float(hi), int(count))
        except ValueError:
            raise GridError(f"axis must look like min:max:count, got {text!r}") from None


def _axis_points(axis) -> Optional[np.ndarray]:
    if axis is None:
        return None
    if isinstance(axis, Axis):
        return axis.points()
    if isinstance(axis, (int, float)):
        return np.array([float(axis)])
    arr = np.asarray(axis, dtype=float).ravel()
    if arr.size == 0:
        raise GridError("empty axis")
    return arr


@dataclass(frozen=True)
class SweepRecord:
    r: Optional[float]
    s: Optional[float]
    lam: Optional[float]
    n_opt: Optional[int]
    parent_value: float
    distilled_value: float
    gap: float


CSV_HEADER = ("r", "s", "lambda", "n_opt", "parent_value", "distilled_value", "gap")

QUANTITIES = ("gap", "limit", "chsh-n", "chsh-peak")


def _eval_cell(args) -> SweepRecord:
    quantity, r, s, lam, n = args
    if quantity == "gap":
        parent = float(hardy_family_table(r, s)[0, 0])
        gap, n_opt = distillation_gap(r, s)
        return SweepRecord(r, s, None, n_opt, parent, parent + gap, gap)
    if quantity == "limit":
        parent = float(hardy_family_table(r, s)[0, 0])
        value = limit_distilled_hardy(r, s)
        return SweepRecord(r, s, None, None, parent, value, value - parent)
    if quantity == "chsh-n":
        parent = chsh_n_lambda(lam, 1)
        value = chsh_n_lambda(lam, n)
        return SweepRecord(None, None, lam, int(n), parent, value, value - parent)
    if quantity == "chsh-peak":
        parent = chsh_n_lambda(lam, 1)
        peak = peak_chsh_lambda(lam)
        return SweepRecord(None, None, lam, peak.n_opt, parent, peak.value, peak.value - parent)
    raise GridError(f"unknown quantity {quantity!r}")


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("NLDISTILL_WORKERS", "1")))
    except ValueError:
        return 1


def sweep(quantity: str, r=None, s=None, lam=None, n=None, workers: Optional[int] = None) -> list[SweepRecord]:
    """Evaluate ``quantity`` on a grid; records come back in row-major order.

    Each axis is an :class:`Axis`, a scalar (single point) or explicit values.
    ``gap`` and ``limit`` use the (r, s) axes; ``chsh-n`` uses lam and n;
    ``chsh-peak`` uses lam.
    """
    if quantity not in QUANTITIES:
        raise GridError(f"unknown quantity {quantity!r}; choose from {QUANTITIES}")
    rp, sp, lp, np_ = (_axis_points(a) for a in (r, s, lam, n))
    if quantity in ("gap", "limit"):
        if rp is None or sp is None:
            raise GridError(f"{quantity} needs r and s axes")
        cells = [(quantity, float(a), float(b), None, None) for a in rp for b in sp]
    elif quantity == "chsh-n":
        if lp is None or np_ is None:
            raise GridError("chsh-n needs lambda and n axes")
        cells = [(quantity, None, None, float(a), int(round(b))) for a in lp for b in np_]
    else:
        if lp is None:
            raise GridError("chsh-peak needs a lambda axis")
        cells = [(quantity, None, None, float(a), None) for a in lp]

    workers = default_workers() if workers is None else workers
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_eval_cell, cells, chunksize=max(1, len(cells) // (8 * workers))))
    return [_eval_cell(c) for c in cells]


def n_axis_around_peak(lam: float, count: int = 200) -> np.ndarray:
    """Copy counts spanning [1, 3 n_opt] that include the exact peak."""
    peak = peak_chsh_lambda(lam).n_opt
    grid = np.unique(np.round(np.linspace(1, 3 * peak, count)).astype(np.int64))
    return np.union1d(grid, [peak])


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(records, fh=None) -> str:
    """Write records with the fixed header; returns the text when ``fh`` is None."""
    out = io.StringIO() if fh is None else fh
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rec in records:
        w.writerow([_fmt(rec.r), _fmt(rec.s), _fmt(rec.lam), _fmt(rec.n_opt),
                    _fmt(rec.parent_value), _fmt(rec.distilled_value), _fmt(rec.gap)])
    return out.getvalue() if fh is None else ""
