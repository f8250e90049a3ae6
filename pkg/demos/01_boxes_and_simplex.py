# # Boxes, vertices and the CHSH simplex
#
# A 2-2-2 box is stored as a 4x4 table: row 2x+y, column 2a+b.

# %%
import numpy as np

from nldistill import nsbox
from nldistill.exceptions import NotInSimplex

np.set_printoptions(precision=5, suppress=True)

# %%
# One PR box reaches CHSH 4 for this functional; eight deterministic boxes sit at 2.
for name in nsbox.SIMPLEX_NAMES:
    b = nsbox.named_box(name)
    print(f"{name:5s} chsh={nsbox.chsh(b):.0f}")

# %%
# Every box in the simplex has CHSH 2 + 2*c0.
c = np.random.default_rng(0).dirichlet(np.ones(9))
b = nsbox.simplex_mix(c)
print("c0 =", c[0], " chsh =", nsbox.chsh(b), " 2+2c0 =", 2 + 2 * c[0])
print("recovered weights:", np.array(nsbox.decompose_simplex(b).c))

# %%
# The uniform box has all correlators 0, so it lies outside the simplex.
try:
    nsbox.decompose_simplex(nsbox.uniform_box())
except NotInSimplex as e:
    print("uniform box:", e)

# %%
# Relabelings: canonicalize picks the frame with the largest CHSH value.
canon, r, value = nsbox.canonicalize(nsbox.named_box("PR_000"))
print("PR_000 ->", value, "via relabeling", r)
print(canon.p)

# %%
# The quantum Hardy box and its weights.
hq = nsbox.named_box("H_Q_max")
print(hq.p)
print("Hardy success", nsbox.hardy_test(hq).success, "=", nsbox.HARDY_QUANTUM_MAX)
