"""Bijection plus strictly filtration-decreasing part: exact invertibility.

``C = P_J + N`` where ``P_J e_j = e_{J(j)}``, ``J`` preserves the filtration and
``N[i][j] != 0`` only when ``filtration[i] < filtration[j]``. Then
``M = P_J^T N`` is strictly decreasing as well, hence nilpotent, and
``C^-1 = sum_k (-M)^k P_J^T`` is a finite sum.

Arithmetic is exact: rationals are put over a common denominator and the
matrix products run on numpy object arrays of Python ints.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np


class StructureError(ValueError):
    pass


def _frac_matrix(rows) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


@dataclass(frozen=True)
class FilteredMap:
    filtration: tuple[Fraction, ...]
    J: tuple[int, ...]
    C: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.filtration)
        if len(self.J) != n or len(self.C) != n or any(len(r) != n for r in self.C):
            raise StructureError("filtration, J and C must share the dimension")
        if sorted(self.J) != list(range(n)):
            raise StructureError("J must be a bijection of 0..n-1")

    @classmethod
    def build(cls, filtration: Sequence, J: Sequence[int], C) -> "FilteredMap":
        return cls(tuple(Fraction(f) for f in filtration), tuple(J), _frac_matrix(C))

    @property
    def n(self) -> int:
        return len(self.J)

    def j_matrix(self) -> list[list[int]]:
        P = [[0] * self.n for _ in range(self.n)]
        for j, i in enumerate(self.J):
            P[i][j] = 1
        return P

    def n_matrix(self) -> list[list[Fraction]]:
        P = self.j_matrix()
        return [[self.C[i][j] - P[i][j] for j in range(self.n)] for i in range(self.n)]


@dataclass(frozen=True)
class StructureCheck:
    passed: bool
    kind: str = ""  # "J" (J moves a filtration level) or "N" (non-strict entry)
    witness: tuple[int, int] | None = None

    def __str__(self) -> str:
        if self.passed:
            return "PASS"
        return f"FAIL {self.kind} witness={self.witness}"


def verify_structure(m: FilteredMap) -> StructureCheck:
    f = m.filtration
    for j, i in enumerate(m.J):
        if f[i] != f[j]:
            return StructureCheck(False, "J", (i, j))
    N = m.n_matrix()
    for i in range(m.n):
        for j in range(m.n):
            if N[i][j] != 0 and not f[i] < f[j]:
                return StructureCheck(False, "N", (i, j))
    return StructureCheck(True)


# -- exact integer kernels ---------------------------------------------------------------------


def _scale(rows) -> tuple[np.ndarray, int]:
    """Integer object matrix A and denominator D with rows == A / D."""
    D = 1
    for r in rows:
        for v in r:
            D = math.lcm(D, Fraction(v).denominator)
    A = np.array([[int(Fraction(v) * D) for v in r] for r in rows], dtype=object)
    return A, D


def _is_zero(A: np.ndarray) -> bool:
    return not any(v != 0 for v in A.flat)


def nilpotency_degree(rows) -> int:
    """Smallest d with rows^d = 0 (raises if none up to the dimension)."""
    A, _ = _scale(rows)
    n = A.shape[0]
    P = A
    for d in range(1, n + 2):
        if _is_zero(P):
            return d
        P = P.dot(A)
    raise StructureError("matrix is not nilpotent")


@dataclass(frozen=True)
class InverseResult:
    invertible: bool
    inverse: tuple[tuple[Fraction, ...], ...]
    terms: int  # number of nonzero Neumann terms


def is_isomorphism(m: FilteredMap) -> InverseResult:
    check = verify_structure(m)
    if not check.passed:
        raise StructureError(f"precondition violated: {check}")
    n = m.n
    if n == 0:
        return InverseResult(True, (), 0)
    Pt = np.zeros((n, n), dtype=object)
    for j, i in enumerate(m.J):
        Pt[j, i] = 1
    B, D = _scale(m.n_matrix())
    neg = -Pt.dot(B)  # -M = neg / D
    powers = [np.identity(n, dtype=object)]  # powers[k] = neg^k
    while True:
        nxt = powers[-1].dot(neg)
        if _is_zero(nxt):
            break
        powers.append(nxt)
        if len(powers) > n:
            raise StructureError("N is not nilpotent")
    # (I + M)^-1 = sum_k neg^k / D^k, put over D^(K-1)
    K = len(powers)
    total = np.zeros((n, n), dtype=object)
    for k, Pk in enumerate(powers):
        total = total + Pk * D ** (K - 1 - k)
    inv_num = total.dot(Pt)
    den = D ** (K - 1)
    inv = tuple(tuple(Fraction(int(v), den) for v in row) for row in inv_num)
    return InverseResult(True, inv, K)


def bareiss_det(rows) -> Fraction:
    """Fraction-free elimination on the integer-scaled matrix."""
    A, D = _scale(rows)
    n = A.shape[0]
    M = [[int(v) for v in r] for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k] != 0:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    det = sign * M[n - 1][n - 1] if n else 1
    return Fraction(det, D ** n)


def permutation_sign(p: Sequence[int]) -> int:
    seen, sign = [False] * len(p), 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j, length = p[j], length + 1
        if length % 2 == 0:
            sign = -sign
    return sign


def matmul_exact(A, B) -> list[list[Fraction]]:
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    return [[sum((A[i][k] * B[k][j] for k in range(m)), Fraction(0)) for j in range(p)] for i in range(n)]


def is_identity(A) -> bool:
    return all(A[i][j] == (1 if i == j else 0) for i in range(len(A)) for j in range(len(A)))


# -- instances -------------------------------------------------------------------------------


def random_instance(rng: random.Random, max_n: int = 20, density: float = 0.4) -> FilteredMap:
    """Random structure-passing map: tied levels, J permuting within levels, rational strict N."""
    n = rng.randint(1, max_n)
    levels = rng.randint(1, n)
    filtration = [Fraction(rng.randrange(levels)) for _ in range(n)]
    J = list(range(n))
    for lv in sorted(set(filtration)):
        idx = [i for i in range(n) if filtration[i] == lv]
        perm = idx[:]
        rng.shuffle(perm)
        for a, b in zip(idx, perm):
            J[a] = b
    C = [[Fraction(0)] * n for _ in range(n)]
    for j, i in enumerate(J):
        C[i][j] = Fraction(1)
    for i in range(n):
        for j in range(n):
            if filtration[i] < filtration[j] and rng.random() < density:
                C[i][j] += Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return FilteredMap(tuple(filtration), tuple(J), _frac_matrix(C))


def tie_violation_instance() -> tuple[FilteredMap, tuple[int, int]]:
    """Indices 1 and 2 share a level and N[1][2] = 1; the expected witness is (1, 2)."""
    filtration = (0, 1, 1, 2)
    C = [[1, 0, 3, 0], [0, 1, 1, 2], [0, 0, 1, 0], [0, 0, 0, 1]]
    return FilteredMap.build(filtration, (0, 1, 2, 3), C), (1, 2)


def parse_filtered(text: str) -> FilteredMap:
    """Lines ``filtration: ...``, ``J: ...`` and one ``row: ...`` per matrix row (``p/q`` allowed)."""
    filtration, J, rows = None, None, []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        vals = rest.split()
        if key == "filtration":
            filtration = [Fraction(v) for v in vals]
        elif key == "J":
            J = [int(v) for v in vals]
        elif key == "row":
            rows.append([Fraction(v) for v in vals])
        else:
            raise StructureError(f"unknown line {line!r}")
    if filtration is None or J is None:
        raise StructureError("need 'filtration:' and 'J:' lines")
    return FilteredMap.build(filtration, J, rows)


def load_filtered(path: str | Path) -> FilteredMap:
    return parse_filtered(Path(path).read_text())


@dataclass(frozen=True)
class PropertyRun:
    instances: int
    invertible: int
    inverse_exact: int
    det_matches: int
    nilpotency_ok: int
    max_n: int

    @property
    def passed(self) -> bool:
        return self.instances == self.invertible == self.inverse_exact == self.det_matches == self.nilpotency_ok


def property_run(count: int = 1000, seed: int = 0, max_n: int = 20) -> PropertyRun:
    rng = random.Random(seed)
    inv_ok = exact = det_ok = nil_ok = 0
    for _ in range(count):
        m = random_instance(rng, max_n)
        res = is_isomorphism(m)
        inv_ok += res.invertible
        exact += is_identity(matmul_exact(res.inverse, m.C))
        det_ok += bareiss_det(m.C) == permutation_sign(m.J)
        nil_ok += nilpotency_degree(m.n_matrix()) <= len(set(m.filtration))
    return PropertyRun(count, inv_ok, exact, det_ok, nil_ok, max_n)
