"""Reproduction targets: each key recomputes reference values and compares."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distill, nsbox, pqdetect, wiring


@dataclass(frozen=True)
class Check:
    key: str
    label: str
    observed: float
    expected: float
    tol: float

    @property
    def passed(self) -> bool:
        return abs(self.observed - self.expected) <= self.tol


def _thm1_hardy():
    hq = nsbox.named_box("H_Q_max")
    c0, c1 = distill.hardy_lambda_weights(1e-6)
    yield Check("thm1-hardy", "max quantum Hardy success", nsbox.hardy_test(hq).success,
                nsbox.HARDY_QUANTUM_MAX, 1e-12)
    yield Check("thm1-hardy", "lam=1e-6 distilled Hardy success", distill.optimal_copies(c0, c1).value_opt,
                0.0410237, 1e-3)
    phi = (1 + math.sqrt(5)) / 2
    ok = []
    for lam, want in ((1 / phi - 1e-6, True), (1 / phi + 1e-6, False)):
        a, b = distill.hardy_lambda_weights(lam)
        ok.append((distill.hardy_success_n(a, b, 2) > distill.hardy_success_n(a, b, 1)) == want)
    yield Check("thm1-hardy", "golden-ratio 2-copy threshold holds", float(all(ok)), 1.0, 0.0)


def _prop1():
    opt = distill.optimal_copies(0.1, 0.85)
    yield Check("prop1-copies", "floor(x*) for H_NS", math.floor(opt.n_star), 7, 0)
    yield Check("prop1-copies", "optimal copies for H_NS", opt.n_opt, 8, 0)
    yield Check("prop1-copies", "optimal Hardy success for H_NS", opt.value_opt, 0.157977, 1e-6)


def _thm2():
    peak = distill.peak_chsh_lambda(1e-7)
    parent = distill.chsh_n_lambda(1e-7, 1)
    yield Check("thm2-gain", "peak CHSH at lam=1e-7", peak.value, 2.32928, 1e-4)
    yield Check("thm2-gain", "Tsirelson gain %", distill.tsirelson_gain(parent, peak.value), 39.748, 0.01)
    t = distill.two_copy_chsh_threshold()
    ok = []
    for lam, want in ((t - 1e-6, True), (t + 1e-6, False)):
        ok.append((distill.chsh_n_lambda(lam, 2) > distill.chsh_n_lambda(lam, 1)) == want)
    yield Check("thm2-gain", "2-copy threshold 8/167(13-sqrt2) holds", float(all(ok)), 1.0, 0.0)


def _figd1():
    peak = distill.peak_chsh_lambda(1e-7)
    yield Check("figD1", "peak CHSH at lam=1e-7", peak.value, 2.32928, 1e-4)
    yield Check("figD1", "peak copy count / 1.04739e7", peak.n_opt / 1.04739e7, 1.0, 0.01)


def _thm3(samples: int = 200, seed: int = 3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    pl1 = nsbox.named_box("P_L1")
    for _ in range(samples):
        c = rng.dirichlet(np.ones(9))
        box = nsbox.simplex_mix(c)
        worst = max(worst, abs(wiring.chsh_after_two_copy(c) - nsbox.chsh(wiring.wire_n_closed(box, 2))))
        lam = rng.uniform(0, distill.two_copy_ball_radius(c[0]))
        mixed = nsbox.mix([lam, 1 - lam], [box, pl1])
        if not nsbox.chsh(wiring.wire_n_closed(mixed, 2)) > nsbox.chsh(mixed):
            failures += 1
    yield Check("thm3-ball", "max |K2 polynomial - direct|", worst, 0.0, 1e-10)
    yield Check("thm3-ball", "ball-radius distillation failures", failures, 0, 0)


def _figa1():
    recs = distill.sweep("gap", r=distill.Axis(0, 1, 200), s=distill.Axis(0, 1, 200))
    best = max(recs, key=lambda rec: rec.gap)
    yield Check("figA1", "max distillation gap", best.gap, 0.0101896, 1e-4)
    yield Check("figA1", "r at max", best.r, 0.1241, 0.005)
    yield Check("figA1", "s at max", best.s, 0.8896, 0.005)
    yield Check("figA1", "copies at max", best.n_opt, 4, 0)


def _figa2():
    yield Check("figA2", "limit at (1/2, 2/3)", distill.limit_distilled_hardy(0.5, 2 / 3), 0.0433049, 1e-5)
    recs = distill.sweep("limit", r=distill.Axis(0, 1, 200), s=distill.Axis(0, 1, 200))
    best = max(recs, key=lambda rec: rec.distilled_value)
    yield Check("figA2", "r at max", best.r, 0.5, 0.005)
    yield Check("figA2", "s at max", best.s, 2 / 3, 0.005)


def _appe():
    h = nsbox.named_box("H_NS")
    h8 = wiring.wire_n_closed(h, 8)
    hp = nsbox.named_box("H_NS_prime")
    yield Check("appE-postquantum", "CHSH of H_NS", nsbox.chsh(h), 2.2, 1e-12)
    yield Check("appE-postquantum", "CHSH of 8-copy H_NS", nsbox.chsh(h8), 2.63088, 1e-5)
    yield Check("appE-postquantum", "IC quantity of H_NS", pqdetect.ic_quantity(h), 0.9578, 1e-4)
    yield Check("appE-postquantum", "IC quantity of 8-copy H_NS", pqdetect.ic_quantity(h8), 0.9565, 1e-4)
    v = pqdetect.detect_all(h, 8)
    yield Check("appE-postquantum", "H_NS verdicts hardy/ntcc/ic",
                float((v[0].positive, v[1].positive, v[2].positive) == (True, False, False)), 1.0, 0.0)
    vp = pqdetect.detect_all(hp, 2)
    yield Check("appE-postquantum", "2-copy Hardy success of H'_NS", vp[0].quantity, 0.0925, 1e-4)
    yield Check("appE-postquantum", "H'_NS verdicts hardy/ntcc/ic",
                float((vp[0].positive, vp[1].positive, vp[2].positive) == (True, False, False)), 1.0, 0.0)


TARGETS = {
    "thm1-hardy": _thm1_hardy,
    "thm2-gain": _thm2,
    "thm3-ball": _thm3,
    "prop1-copies": _prop1,
    "figA1": _figa1,
    "figA2": _figa2,
    "figD1": _figd1,
    "appE-postquantum": _appe,
}


def run(key: str) -> list[Check]:
    keys = list(TARGETS) if key == "all" else [key]
    out = []
    for k in keys:
        out.extend(TARGETS[k]())
    return out
