# # Distilling Hardy success with OR-AND wiring
#
# Alice outputs the OR of her parents, Bob the AND. Hardy zeros survive the
# wiring, so only the success p(00|00) moves.

# %%
import numpy as np

from nldistill import distill, nsbox, wiring

# %%
h = nsbox.named_box("H_NS")
for n in range(1, 13):
    child = wiring.wire_n_closed(h, n)
    mark = " <- beyond the quantum maximum" if child.p[0, 0] > nsbox.HARDY_QUANTUM_MAX else ""
    print(f"n={n:2d}  success={child.p[0, 0]:.6f}{mark}")

# %%
# The continuous optimum lands between 7 and 8; the integer optimum is 8.
opt = distill.optimal_copies(0.1, 0.85)
print(opt)

# %%
# Quantum Hardy family: where do two copies help, and by how much at best?
r = s = np.linspace(0.005, 0.995, 100)
gap = np.array([[distill.distillation_gap(a, b)[0] for b in s] for a in r])
i, j = np.unravel_index(gap.argmax(), gap.shape)
print(f"largest gap {gap[i, j]:.7f} at r={r[i]:.4f}, s={s[j]:.4f}")
print("fraction of the square that distills:", np.mean(gap > 0))

# %%
# Mixing with P_L1 and letting the weight vanish leaves a finite distilled success.
for lam in (1e-2, 1e-4, 1e-6):
    c0, c1 = distill.hardy_lambda_weights(lam)
    o = distill.optimal_copies(c0, c1)
    print(f"lam={lam:g}: n_opt={o.n_opt}, success={o.value_opt:.7f}")
print("limit:", distill.limit_constant_hqmax())
