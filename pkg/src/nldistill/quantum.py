"""Two-qubit realization of the quantum Hardy family.

Alice measures x=0 in the computational basis and x=1 in {|u0>, |u1>}; Bob
likewise with {|v0>, |v1>}. The shared state is

    (|u0 v0> + W_a |u1 v0> + W_b |u0 v1>) / sqrt(1 + W_a**2 + W_b**2)

with W_z = cot(z/2). The three Hardy zeros hold by construction: the state
has no |u1 v1> component and its overlap with |0 v0> and |u0 0> cancels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateAngle, DomainError
from .nsbox import Behavior

TOL = 1e-12


def _basis(angle: float, phase: float) -> tuple[np.ndarray, np.ndarray]:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    e = np.exp(1j * phase)
    return np.array([c, e * s]), np.array([-s, e * c])


def _projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


@dataclass(frozen=True, eq=False)
class QuantumRealization:
    alpha: float
    beta: float
    phi: float
    xi: float
    state: np.ndarray
    projA: tuple  # projA[x][a]
    projB: tuple  # projB[y][b]


def realization_from_angles(alpha: float, beta: float, phi: float = 0.0, xi: float = 0.0) -> QuantumRealization:
    if not (0 <= alpha <= math.pi and 0 <= beta <= math.pi):
        raise DomainError("alpha and beta must lie in [0, pi]")
    sa, sb = math.sin(alpha / 2), math.sin(beta / 2)
    if sa * sb == 0:
        raise DegenerateAngle("cot(z/2) diverges at alpha = 0 or beta = 0")
    wa, wb = math.cos(alpha / 2) / sa, math.cos(beta / 2) / sb
    u0, u1 = _basis(alpha, phi)
    v0, v1 = _basis(beta, xi)
    psi = np.kron(u0, v0) + wa * np.kron(u1, v0) + wb * np.kron(u0, v1)
    psi = psi / math.sqrt(1 + wa ** 2 + wb ** 2)
    e0, e1 = np.array([1.0 + 0j, 0]), np.array([0j, 1.0])
    projA = ((_projector(e0), _projector(e1)), (_projector(u0), _projector(u1)))
    projB = ((_projector(e0), _projector(e1)), (_projector(v0), _projector(v1)))
    return QuantumRealization(alpha, beta, phi % (2 * math.pi), xi % (2 * math.pi), psi, projA, projB)


def rs_of(re: QuantumRealization) -> tuple[float, float]:
    """Hardy-family parameters of a realization.

    r = 1 - cos^2(alpha/2) cos^2(beta/2) and s = sin^2(alpha/2) / r; these make
    the Born table equal hardy_family(r, s).
    """
    ca2 = math.cos(re.alpha / 2) ** 2
    cb2 = math.cos(re.beta / 2) ** 2
    r = 1 - ca2 * cb2
    return r, math.sin(re.alpha / 2) ** 2 / r


def realization_from_rs(r: float, s: float) -> QuantumRealization:
    """Inverse of :func:`rs_of` with both phases fixed to 0 (the table does not depend on them)."""
    if not (0 < r < 1 and 0 < s < 1):
        raise DomainError("r and s must lie in the open unit interval")
    alpha = 2 * math.asin(math.sqrt(r * s))
    beta = 2 * math.acos(math.sqrt((1 - r) / (1 - r * s)))
    return realization_from_angles(alpha, beta)


def born_behavior(re: QuantumRealization) -> Behavior:
    p = np.empty((4, 4))
    psi = re.state
    for x in (0, 1):
        for y in (0, 1):
            for a in (0, 1):
                for b in (0, 1):
                    op = np.kron(re.projA[x][a], re.projB[y][b])
                    p[2 * x + y, 2 * a + b] = np.vdot(psi, op @ psi).real
    return Behavior(p)


def check_realization(re: QuantumRealization, tol: float = TOL) -> list[str]:
    """Names of violated realization invariants (empty when all hold)."""
    problems = []
    if abs(np.linalg.norm(re.state) - 1) > tol:
        problems.append("state norm")
    eye = np.eye(2)
    for party, projs in (("A", re.projA), ("B", re.projB)):
        for k, (p0, p1) in enumerate(projs):
            if np.abs(p0 + p1 - eye).max() > tol:
                problems.append(f"{party}{k} completeness")
            for P in (p0, p1):
                if np.abs(P @ P - P).max() > tol or np.abs(P - P.conj().T).max() > tol:
                    problems.append(f"{party}{k} projector")
    return problems
