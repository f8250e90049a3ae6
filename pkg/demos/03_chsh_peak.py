# # CHSH under many copies of a nearly local box
#
# lam * B_Q_max + (1 - lam) * P_L1 is barely nonlocal for small lam, yet
# roughly 1/lam copies push CHSH close to 2.33.

# %%
import numpy as np

from nldistill import distill, nsbox, wiring

# %%
lam = 1e-3
ns = np.arange(1, 5000)
values = distill.chsh_n_lambda(lam, ns)
k = values.argmax()
print(f"lam={lam}: best n={ns[k]}, chsh={values[k]:.6f}")

# %%
# The closed form agrees with wiring the mixed box directly.
b = nsbox.mix([lam, 1 - lam], [nsbox.named_box("B_Q_max"), nsbox.named_box("P_L1")])
print(nsbox.chsh(wiring.wire_n_closed(b, 1000)), distill.chsh_n_lambda(lam, 1000))

# %%
for lam in (1e-3, 1e-5, 1e-7):
    pk = distill.peak_chsh_lambda(lam)
    gain = distill.tsirelson_gain(distill.chsh_n_lambda(lam, 1), pk.value)
    print(f"lam={lam:g}: n_opt={pk.n_opt}, n_opt*lam={pk.n_opt * lam:.5f}, peak={pk.value:.6f}, gain={gain:.3f}%")
print("alpha =", distill.peak_ansatz_alpha(), " limiting peak =", distill.limit_peak_chsh())

# %%
# Two copies beat one only below this weight.
t = distill.two_copy_chsh_threshold()
for x in (t - 1e-3, t + 1e-3):
    print(f"lam={x:.5f}: B2-B1 = {distill.chsh_n_lambda(x, 2) - distill.chsh_n_lambda(x, 1):+.2e}")
