"""Integer symmetric forms with a cyclic (signed) permutation symmetry.

The isotypic piece for the character ``m`` is the image of the projector
``(1/k) sum_t w^{-mt} sigma^t`` with ``w = exp(2 pi i / k)``; the form restricted
there is Hermitian and its eigenvalue signs are counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

SIGN_RTOL = 1e-10


class FormError(ValueError):
    pass


@dataclass(frozen=True)
class EquivariantForm:
    Q: tuple[tuple[int, ...], ...]
    sigma: tuple[int, ...]
    signs: tuple[int, ...] | None = None  # basis i -> signs[i] * e_sigma(i)

    def __post_init__(self):
        n = len(self.Q)
        if any(len(row) != n for row in self.Q):
            raise FormError("Q must be square")
        if sorted(self.sigma) != list(range(n)):
            raise FormError("sigma must be a permutation of 0..n-1")
        for i in range(n):
            for j in range(n):
                if self.Q[i][j] != self.Q[j][i]:
                    raise FormError(f"Q not symmetric at ({i}, {j})")
        s = self.sign_vector
        for i in range(n):
            for j in range(n):
                if s[i] * s[j] * self.Q[self.sigma[i]][self.sigma[j]] != self.Q[i][j]:
                    raise FormError(f"Q not invariant under sigma at ({i}, {j})")

    @property
    def n(self) -> int:
        return len(self.Q)

    @property
    def sign_vector(self) -> tuple[int, ...]:
        return self.signs if self.signs is not None else (1,) * self.n

    @property
    def order(self) -> int:
        M = self.action_matrix().astype(np.int64)
        P, k = M.copy(), 1
        while not np.array_equal(P, np.eye(self.n, dtype=np.int64)):
            P, k = M @ P, k + 1
            if k > 4 * math.factorial(min(self.n, 10)) + 4:
                raise FormError("action has no finite order")
        return k

    def matrix(self) -> np.ndarray:
        return np.array(self.Q, dtype=float)

    def action_matrix(self) -> np.ndarray:
        """Matrix with column i equal to signs[i] * e_{sigma(i)}."""
        M = np.zeros((self.n, self.n))
        for i, (j, s) in enumerate(zip(self.sigma, self.sign_vector)):
            M[j, i] = s
        return M

    def square(self, v: Sequence[int]) -> int:
        """v^T Q v in exact integer arithmetic."""
        return sum(v[i] * self.Q[i][j] * v[j] for i in range(self.n) for j in range(self.n))


def circulant(first_row: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    n = len(first_row)
    return tuple(tuple(first_row[(j - i) % n] for j in range(n)) for i in range(n))


def cyclic_shift(n: int) -> tuple[int, ...]:
    return tuple((i + 1) % n for i in range(n))


def section5_fixture() -> EquivariantForm:
    """The circulant(-1, 1, 0, 0, 1) form with the cyclic shift of order 5."""
    return EquivariantForm(circulant((-1, 1, 0, 0, 1)), cyclic_shift(5))


@dataclass(frozen=True)
class SignCounts:
    positive: int
    negative: int
    zero: int
    ambiguous: bool = False

    def as_tuple(self) -> tuple[int, int, int]:
        return self.positive, self.negative, self.zero


@dataclass(frozen=True)
class IsotypicPiece:
    m: int
    dimension: int
    counts: SignCounts
    eigenvalues: tuple[float, ...]


@dataclass(frozen=True)
class IsotypicReport:
    k: int
    pieces: tuple[IsotypicPiece, ...]

    def piece(self, m: int) -> IsotypicPiece:
        return self.pieces[m % self.k]

    @property
    def total_dimension(self) -> int:
        return sum(p.dimension for p in self.pieces)


def _count(eigs: np.ndarray, scale: float) -> SignCounts:
    thr = SIGN_RTOL * max(scale, 1.0)
    pos = int(np.sum(eigs > thr))
    neg = int(np.sum(eigs < -thr))
    amb = bool(np.any((np.abs(eigs) > thr / 10) & (np.abs(eigs) < thr * 10)))
    return SignCounts(pos, neg, len(eigs) - pos - neg, amb)


def _image_basis(P: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the column space of a projector."""
    u, s, _ = np.linalg.svd(P)
    r = int(np.sum(s > 1e-9))
    return u[:, :r]


def isotypic_decomposition(form: EquivariantForm) -> IsotypicReport:
    k = form.order
    Q = form.matrix()
    M = form.action_matrix()
    powers = [np.linalg.matrix_power(M, t) for t in range(k)]
    scale = float(np.linalg.norm(Q, 2))
    pieces = []
    for m in range(k):
        P = sum(np.exp(-2j * math.pi * m * t / k) * powers[t] for t in range(k)) / k
        B = _image_basis(P)
        H = B.conj().T @ Q @ B
        eigs = np.linalg.eigvalsh((H + H.conj().T) / 2) if B.shape[1] else np.zeros(0)
        pieces.append(IsotypicPiece(m, B.shape[1], _count(eigs, scale), tuple(float(e) for e in eigs)))
    return IsotypicReport(k, tuple(pieces))


def signature(form: EquivariantForm) -> SignCounts:
    """Sign counts of Q itself; equals the sum over isotypic pieces."""
    Q = form.matrix()
    return _count(np.linalg.eigvalsh(Q), float(np.linalg.norm(Q, 2)))


def rotation(j: int, k: int) -> np.ndarray:
    t = 2 * math.pi * j / k
    return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])


@dataclass(frozen=True)
class CoinvariantForm:
    j: int
    dimension: int
    counts: SignCounts
    eigenvalues: tuple[float, ...]


def coinvariants_form(form: EquivariantForm, j: int) -> CoinvariantForm:
    """Induced form on H (x)_{R[Z/k]} S_j, S_j = R^2 with the generator rotating by 2 pi j / k.

    The coinvariants of the diagonal action are identified with its invariants
    (averaging); the form is Q (x) (standard inner product on S_j).
    """
    k = form.order
    if not 0 <= j < k:
        raise FormError(f"rotation weight must satisfy 0 <= j < {k}")
    M = np.kron(form.action_matrix(), rotation(j, k))
    avg = sum(np.linalg.matrix_power(M, t) for t in range(k)) / k
    B = _image_basis(avg).real
    G = np.kron(form.matrix(), np.eye(2))
    H = B.T @ G @ B
    eigs = np.linalg.eigvalsh((H + H.T) / 2) if B.shape[1] else np.zeros(0)
    scale = float(np.linalg.norm(form.matrix(), 2))
    return CoinvariantForm(j, B.shape[1], _count(eigs, scale), tuple(float(e) for e in eigs))


def invariant_vectors(form: EquivariantForm) -> list[tuple[int, ...]]:
    """Integer orbit sums spanning the invariants (unsigned permutations only)."""
    if any(s != 1 for s in form.sign_vector):
        return []
    seen, out = set(), []
    for i in range(form.n):
        if i in seen:
            continue
        orbit, j = [], i
        while j not in orbit:
            orbit.append(j)
            j = form.sigma[j]
        seen.update(orbit)
        out.append(tuple(1 if t in orbit else 0 for t in range(form.n)))
    return out


@dataclass(frozen=True)
class IndexVerdict:
    verdict: str
    contributions: tuple[str, ...]
    invariant_witness: tuple[int, ...] | None
    witness_square: int | None
    twisted: tuple[CoinvariantForm, ...]
    isotypic: IsotypicReport
    discrepancy: str


def index_verdict(form: EquivariantForm, adjoint_weights: Sequence[int], baseline_positive: int = 0) -> IndexVerdict:
    """NONZERO iff the trivial-weight piece has positive part beyond ``baseline_positive``
    or some twisted weight piece has a positive part.

    Weight 0 is the real line summand (the m = 0 isotypic piece); a weight w != 0
    mod k is the rotation module S_w and is evaluated with ``coinvariants_form``.
    """
    iso = isotypic_decomposition(form)
    k = iso.k
    contributions = []
    witness, wsq = None, None
    twisted = []
    for w in adjoint_weights:
        if w % k == 0:
            pos = iso.piece(0).counts.positive
            if pos > baseline_positive:
                contributions.append(f"weight 0: invariant piece has positive part of dimension {pos}")
                for v in invariant_vectors(form):
                    sq = form.square(v)
                    if sq > 0:
                        witness, wsq = v, sq
                        break
        else:
            cf = coinvariants_form(form, w % k)
            twisted.append(cf)
            if cf.counts.positive > 0:
                contributions.append(f"weight {w}: twisted piece has positive part of dimension {cf.counts.positive}")
    verdict = "NONZERO" if contributions else "ZERO"
    notes = []
    for cf in twisted:
        if cf.counts.positive == 0:
            notes.append(
                f"twisted weight {cf.j} piece has signs {cf.counts.as_tuple()} (no positive part); "
                "the rotation module has no nonzero invariant vector, so an invariant vector tensored "
                "with it does not give a positive element there; the sum of the k-th roots of unity "
                "in S_j is the zero vector, so v (x) w = 0"
            )
    if witness is not None and twisted and all(cf.counts.positive == 0 for cf in twisted):
        notes.append("nonvanishing is carried by the weight-0 piece only")
    return IndexVerdict(verdict, tuple(contributions), witness, wsq, tuple(twisted), iso, "; ".join(notes) or "none")


def parse_form(text: str) -> EquivariantForm:
    """Matrix rows of integers, then one line ``perm: s0 s1 ...`` (optional ``signs: ...``)."""
    rows, sigma, signs = [], None, None
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("perm:"):
            sigma = tuple(int(v) for v in line[5:].split())
        elif line.startswith("signs:"):
            signs = tuple(int(v) for v in line[6:].split())
        else:
            rows.append(tuple(int(v) for v in line.split()))
    if sigma is None:
        raise FormError("missing 'perm:' line")
    return EquivariantForm(tuple(rows), sigma, signs)


def load_form(path: str | Path) -> EquivariantForm:
    return parse_form(Path(path).read_text())


def format_index_report(form: EquivariantForm, verdict: IndexVerdict, weights) -> str:
    iso = verdict.isotypic
    lines = [f"form: n={form.n} k={iso.k}", f"adjoint_weights: {list(weights)}", "isotypic:"]
    for p in iso.pieces:
        eig = ", ".join(f"{e:.12f}" for e in p.eigenvalues)
        lines.append(f"  m={p.m}: dim={p.dimension} signs(+,-,0)={p.counts.as_tuple()} eigenvalues=[{eig}]")
    lines.append("twisted_pieces:")
    for cf in verdict.twisted:
        lines.append(f"  weight={cf.j}: dim={cf.dimension} signs(+,-,0)={cf.counts.as_tuple()}")
    lines.append(f"invariant_witness: {verdict.invariant_witness} square={verdict.witness_square}")
    lines.append(f"verdict: {verdict.verdict}")
    for c in verdict.contributions:
        lines.append(f"  contribution: {c}")
    lines.append(f"twisted_attribution_check: {verdict.discrepancy}")
    return "\n".join(lines) + "\n"
