"""SU(2) as unit quaternions ``a + b i + c j + d k``.

Array helpers (``qmul``, ``qexp``, ``qlog``, ``adjoint`` ...) act on the last axis
of shape ``(..., 4)`` arrays and are what the solver uses; ``SU2Element`` is the
scalar value type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .presentation import GroupRingElement, Word

COMMUTE_TOL = 1e-8


class SU2Error(ValueError):
    pass


# -- batched quaternion arithmetic ---------------------------------------------


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def qinv(q: np.ndarray) -> np.ndarray:
    """Inverse of a unit quaternion (the conjugate)."""
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qexp(v: np.ndarray) -> np.ndarray:
    """exp of the pure quaternion with vector part ``v``: cos|v| + sin|v| v/|v|."""
    v = np.asarray(v, dtype=float)
    t = np.linalg.norm(v, axis=-1, keepdims=True)
    sinc = np.where(t > 1e-12, np.sin(t) / np.where(t > 1e-12, t, 1.0), 1.0 - t * t / 6.0)
    return np.concatenate([np.cos(t), sinc * v], axis=-1)


def qlog(q: np.ndarray) -> np.ndarray:
    """Vector part of the principal logarithm, inverse of ``qexp`` for |v| < pi."""
    v = q[..., 1:]
    s = np.linalg.norm(v, axis=-1, keepdims=True)
    t = np.arctan2(s, q[..., :1])
    scale = np.where(s > 1e-15, t / np.where(s > 1e-15, s, 1.0), 1.0)
    return scale * v


def adjoint(q: np.ndarray) -> np.ndarray:
    """3x3 rotation ``R`` with ``R v = q v q^-1`` on pure quaternions."""
    a, b, c, d = np.moveaxis(np.asarray(q, dtype=float), -1, 0)
    return np.stack(
        [
            np.stack([a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)], -1),
            np.stack([2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)], -1),
            np.stack([2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d], -1),
        ],
        axis=-2,
    )


def qnormalize(q: np.ndarray) -> np.ndarray:
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def random_su2(rng: np.random.Generator, size: tuple[int, ...] = ()) -> np.ndarray:
    """Uniform axis on S^2 times uniform half-angle in [0, pi]."""
    axis = rng.normal(size=size + (3,))
    axis /= np.linalg.norm(axis, axis=-1, keepdims=True)
    phi = rng.uniform(0.0, math.pi, size=size + (1,))
    return np.concatenate([np.cos(phi), np.sin(phi) * axis], axis=-1)


def eval_word_array(assign: np.ndarray, w: Word) -> np.ndarray:
    """Evaluate ``w`` on a batch of assignments of shape ``(..., g, 4)``."""
    out = np.zeros(assign.shape[:-2] + (4,))
    out[..., 0] = 1.0
    for g, s in w:
        x = assign[..., g, :]
        out = qmul(out, x if s == 1 else qinv(x))
    return out


# -- value type ------------------------------------------------------------------


@dataclass(frozen=True)
class SU2Element:
    a: float = 1.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    @classmethod
    def from_array(cls, q) -> "SU2Element":
        a, b, c, d = (float(v) for v in q)
        return cls(a, b, c, d)

    @classmethod
    def identity(cls) -> "SU2Element":
        return cls()

    @classmethod
    def from_axis_angle(cls, axis, theta: float) -> "SU2Element":
        axis = np.asarray(axis, dtype=float)
        if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
            raise SU2Error(f"axis {axis} is not a unit vector")
        s = math.sin(theta / 2)
        return cls(math.cos(theta / 2), s * axis[0], s * axis[1], s * axis[2])

    @classmethod
    def diagonal(cls, angle: float) -> "SU2Element":
        """diag(e^{i angle}, e^{-i angle}) = cos(angle) + i sin(angle)."""
        return cls(math.cos(angle), math.sin(angle), 0.0, 0.0)

    def array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    def __mul__(self, other: "SU2Element") -> "SU2Element":
        return SU2Element.from_array(qmul(self.array(), other.array()))

    def __neg__(self) -> "SU2Element":
        return SU2Element(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "SU2Element":
        return SU2Element(self.a, -self.b, -self.c, -self.d)

    def __pow__(self, k: int) -> "SU2Element":
        out, base = SU2Element(), self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out * base
        return out

    def trace(self) -> float:
        return 2.0 * self.a

    def norm(self) -> float:
        return float(np.linalg.norm(self.array()))

    def normalize(self) -> "SU2Element":
        n = self.norm()
        if n == 0.0:
            raise SU2Error("cannot normalize the zero quaternion")
        return SU2Element.from_array(self.array() / n)

    def adjoint(self) -> np.ndarray:
        return adjoint(self.array())

    def axis(self) -> np.ndarray | None:
        v = self.array()[1:]
        n = np.linalg.norm(v)
        return None if n < 1e-12 else v / n

    def distance(self, other: "SU2Element") -> float:
        """Operator norm of the difference of the 2x2 matrices."""
        return float(np.linalg.norm(self.array() - other.array()))

    def is_central(self, tol: float = 1e-12) -> bool:
        return float(np.linalg.norm(self.array()[1:])) < tol


def _lookup(assignment, g: int) -> np.ndarray:
    try:
        x = assignment[g]
    except (KeyError, IndexError) as exc:
        raise SU2Error(f"generator {g} is not assigned") from exc
    return x.array() if isinstance(x, SU2Element) else np.asarray(x, dtype=float)


def evaluate_word(assignment: Sequence[SU2Element] | Mapping[int, SU2Element], w: Word) -> SU2Element:
    out = np.array([1.0, 0.0, 0.0, 0.0])
    for g, s in w:
        x = _lookup(assignment, g)
        out = qmul(out, x if s == 1 else qinv(x))
    return SU2Element.from_array(out)


def adjoint_of_group_ring(assignment, e: GroupRingElement) -> np.ndarray:
    """Sum of coefficient * Ad(rho(word)) over the terms of ``e``."""
    out = np.zeros((3, 3))
    for w, c in e.terms:
        out += c * evaluate_word(assignment, w).adjoint()
    return out


def diagonalize_commuting_pair(g: SU2Element, h: SU2Element, tol: float = COMMUTE_TOL) -> tuple[float, float]:
    """Angles (alpha, beta) in [0, 2pi) with g ~ e^{i alpha}, h ~ e^{i beta} on a common axis.

    Central elements carry no axis; their angle is read from the trace (0 for +1,
    pi for -1) and the axis is taken from the other element, or (1, 0, 0).
    """
    gv, hv = g.array(), h.array()
    comm = np.linalg.norm(qmul(gv, hv) - qmul(hv, gv))
    if comm > tol:
        raise SU2Error(f"elements do not commute (|gh - hg| = {comm:.3e})")
    ng, nh = np.linalg.norm(gv[1:]), np.linalg.norm(hv[1:])
    if max(ng, nh) < 1e-12:
        axis = np.array([1.0, 0.0, 0.0])
    elif ng >= nh:
        axis = gv[1:] / ng
    else:
        axis = hv[1:] / nh
    alpha = math.atan2(float(gv[1:] @ axis), float(gv[0])) % (2 * math.pi)
    beta = math.atan2(float(hv[1:] @ axis), float(hv[0])) % (2 * math.pi)
    return alpha, beta
