# # Certifying post-quantum boxes by distillation
#
# A box whose wired children beat the quantum Hardy maximum cannot be quantum,
# even when the usual CHSH and information-causality screens stay silent.

# %%
from nldistill import nsbox, pqdetect, quantum, wiring

# %%
def report(name, max_copies):
    print(f"--- {name}")
    for v in pqdetect.detect_all(nsbox.named_box(name), max_copies):
        flag = "POSITIVE" if v.positive else "negative"
        extra = f" witness={v.witness}" if v.witness else ""
        print(f"{v.detector:17s} {v.quantity:.6f} vs {v.threshold:.6f}  {flag}{extra}")


report("H_NS", 8)
report("H_NS_prime", 2)
report("B_Q_max", 20)

# %%
# H_NS after eight copies: still well below the NTCC threshold.
h8 = wiring.wire_n_closed(nsbox.named_box("H_NS"), 8)
print("chsh", nsbox.chsh(h8), "IC", pqdetect.ic_quantity(h8))

# %%
# Quantum Hardy boxes never trip the detector.
re = quantum.realization_from_rs(0.3, 0.8)
b = quantum.born_behavior(re)
print(pqdetect.hardy_bound_detector(b, 30))
