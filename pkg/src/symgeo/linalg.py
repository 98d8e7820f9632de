"""Exact integer matrix algebra.

Everything here works on Python ints, so there is no overflow no matter
how large intermediate entries get during pivoting.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_rows(self) -> list[list[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols,
                         tuple(a - b for a, b in zip(self.entries, other.entries)))


@dataclass(frozen=True)
class SmithForm:
    invariant_factors: tuple[int, ...]
    source_dims: tuple[int, int]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


@dataclass(frozen=True)
class AbelianInvariants:
    """A finitely generated abelian group Z^rank + Z/t1 + ... + Z/tk."""

    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        for t in self.torsion:
            if t < 2:
                raise ValueError(f"torsion factors must be >= 2, got {t}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {self.torsion} violates the divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def is_cyclic(self) -> bool:
        return self.rank + len(self.torsion) <= 1

    @property
    def summands(self) -> int:
        return self.rank + len(self.torsion)

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "1"

    def to_dict(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


def _sparse_rows(A: IntMatrix) -> list[dict[int, int]]:
    out = []
    for i in range(A.rows):
        row = {j: A[i, j] for j in range(A.cols) if A[i, j]}
        if row:
            out.append(row)
    return out


def _eliminate_unit_pivots(rows: list[dict[int, int]]) -> int:
    """Clear every row/column pair that can be pivoted on an entry of +-1.

    Each such pivot contributes an invariant factor 1, and the remaining
    block is unimodularly equivalent to what is left in ``rows`` (modified in
    place). Relation matrices coming from presentations are sparse and almost
    entirely eliminated here.
    """
    live = dict(enumerate(rows))
    by_col: dict[int, set[int]] = {}
    for ri, row in live.items():
        for c in row:
            by_col.setdefault(c, set()).add(ri)
    ones = 0
    progress = True
    while progress:
        progress = False
        # sparse rows first keeps fill-in low
        for ri in sorted(live, key=lambda k: (len(live[k]), k)):
            pivot = live.get(ri)
            if pivot is None:
                continue
            c = next((c for c, v in sorted(pivot.items()) if v in (1, -1)), None)
            if c is None:
                continue
            del live[ri]
            for k in pivot:
                by_col[k].discard(ri)
            pv = pivot[c]
            for rj in sorted(by_col.get(c, ())):
                row = live[rj]
                f = row[c] * pv  # pv is its own inverse
                for k, v in pivot.items():
                    nv = row.get(k, 0) - f * v
                    if nv:
                        if k not in row:
                            by_col.setdefault(k, set()).add(rj)
                        row[k] = nv
                    elif k in row:
                        del row[k]
                        by_col[k].discard(rj)
                if not row:
                    del live[rj]
            ones += 1
            progress = True
    rows[:] = [live[k] for k in sorted(live)]
    return ones


def _dense_smith(M: list[list[int]]) -> list[int]:
    """Diagonal entries of the Smith form of a dense matrix (no zeros returned)."""
    m = len(M)
    n = len(M[0]) if m else 0
    factors = []
    t = 0
    while t < min(m, n):
        nonzero = [(abs(M[i][j]), i, j) for i in range(t, m) for j in range(t, n) if M[i][j]]
        if not nonzero:
            break
        _, pi, pj = min(nonzero)
        M[t], M[pi] = M[pi], M[t]
        for row in M:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = M[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = M[i][t] // p
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[t])]
                if M[i][t]:
                    dirty = True
            for j in range(t + 1, n):
                q = M[t][j] // p
                if q:
                    for row in M:
                        row[j] -= q * row[t]
                if M[t][j]:
                    dirty = True
            if dirty:
                # a remainder smaller than the pivot is left somewhere; move it in
                cands = [(abs(M[i][t]), i, t) for i in range(t + 1, m) if M[i][t]]
                cands += [(abs(M[t][j]), t, j) for j in range(t + 1, n) if M[t][j]]
                _, ri, cj = min(cands)
                M[t], M[ri] = M[ri], M[t]
                for row in M:
                    row[t], row[cj] = row[cj], row[t]
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if M[i][j] % p), None)
            if bad is None:
                break
            M[t] = [a + b for a, b in zip(M[t], M[bad[0]])]
        factors.append(abs(M[t][t]))
        t += 1
    return factors


def smith_normal_form(A: IntMatrix) -> SmithForm:
    return SmithForm(_sparse_invariant_factors(_sparse_rows(A)), (A.rows, A.cols))


def _sparse_invariant_factors(rows: list[dict[int, int]]) -> tuple[int, ...]:
    ones = _eliminate_unit_pivots(rows)
    cols = sorted({c for r in rows for c in r})
    index = {c: k for k, c in enumerate(cols)}
    dense = []
    for r in rows:
        line = [0] * len(cols)
        for c, v in r.items():
            line[index[c]] = v
        dense.append(line)
    rest = _dense_smith(dense) if dense else []
    return (1,) * ones + tuple(rest)


def cokernel_invariants(A: IntMatrix) -> AbelianInvariants:
    """Abelian group Z^cols / (row span of A)."""
    snf = smith_normal_form(A)
    return AbelianInvariants(A.cols - snf.rank, tuple(d for d in snf.invariant_factors if d > 1))


def sparse_cokernel_invariants(rows: Iterable[dict[int, int]], cols: int) -> AbelianInvariants:
    """Same as :func:`cokernel_invariants` for rows given as {column: entry}."""
    rows = [{c: v for c, v in r.items() if v} for r in rows]
    for r in rows:
        if any(not 0 <= c < cols for c in r):
            raise ValueError("column index out of range")
    factors = _sparse_invariant_factors([r for r in rows if r])
    return AbelianInvariants(cols - len(factors), tuple(d for d in factors if d > 1))


def abelian_from_orders(orders: Iterable[int]) -> AbelianInvariants:
    """Normal form of a direct sum of cyclic groups; order 0 means Z."""
    orders = list(orders)
    diag = IntMatrix.from_rows(
        [[o if i == j else 0 for j in range(len(orders))] for i, o in enumerate(orders)],
        cols=len(orders))
    return cokernel_invariants(diag)


# -- independent oracle ---------------------------------------------------

def _bareiss_det(M: list[list[int]]) -> int:
    n = len(M)
    if n == 0:
        return 1
    M = [row[:] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def determinant_divisors(A: IntMatrix, k: int) -> int:
    """gcd of all k x k minors of ``A`` (brute force; small matrices only).

    The empty minor (k = 0) is 1 by convention.
    """
    if not 0 <= k <= min(A.rows, A.cols):
        raise ValueError(f"k={k} out of range for a {A.rows}x{A.cols} matrix")
    rows = A.to_rows()
    g = 0
    for ri in combinations(range(A.rows), k):
        for ci in combinations(range(A.cols), k):
            g = gcd(g, _bareiss_det([[rows[i][j] for j in ci] for i in ri]))
            if g == 1:
                return 1
    return g


def invariant_factors_from_divisors(A: IntMatrix) -> tuple[int, ...]:
    """Invariant factors recovered as ratios d_k / d_{k-1} of determinant divisors."""
    out = []
    prev = 1
    for k in range(1, min(A.rows, A.cols) + 1):
        d = determinant_divisors(A, k)
        if d == 0:
            break
        out.append(d // prev)
        prev = d
    return tuple(out)
