"""No-signaling boxes, OR-AND nonlocality distillation and post-quantum detectors."""

from .nsbox import Behavior, chsh, hardy_test, named_box
from .wiring import wire_chain, wire_n_closed, wire_pair

__version__ = "0.1.0"
