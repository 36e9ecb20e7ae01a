"""Sparse exact linear algebra over Q and modular rank with numpy."""

import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import sympy

# Set up logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

SparseVector = Dict[int, Fraction]

# products of two residues stay below 2^52 and sums of a few thousand fit in int64
MODULUS = int(sympy.prevprime(1 << 26))
DENSE_LIMIT = 64


class ModulusError(ArithmeticError):
    """A denominator vanishes modulo the chosen prime."""


def axpy(target: SparseVector, v: SparseVector, scale=1) -> SparseVector:
    """target += scale * v, in place; zero entries are removed."""
    for k, c in v.items():
        value = target.get(k, 0) + scale * c
        if value:
            target[k] = value
        else:
            target.pop(k, None)
    return target


def vec_sub(u: SparseVector, v: SparseVector) -> SparseVector:
    return axpy(dict(u), v, -1)


def fraction_str(c: Fraction) -> str:
    return str(Fraction(c))


class SparseMatrix:
    """Square matrix stored as a list of sparse rows; vectors multiply from the left."""

    __slots__ = ("rows",)

    def __init__(self, rows: List[SparseVector]):
        self.rows = [{k: Fraction(c) for k, c in row.items() if c} for row in rows]

    @property
    def size(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls([{i: Fraction(1)} for i in range(n)])

    @classmethod
    def from_triplets(cls, n: int, triplets: Iterable[Sequence]) -> "SparseMatrix":
        rows: List[SparseVector] = [{} for _ in range(n)]
        for i, j, value in triplets:
            rows[int(i)][int(j)] = Fraction(value)
        return cls(rows)

    def triplets(self) -> List[List]:
        return [[i, j, fraction_str(c)] for i, row in enumerate(self.rows) for j, c in sorted(row.items())]

    def vecmul(self, v: SparseVector) -> SparseVector:
        out: SparseVector = {}
        for i, c in v.items():
            axpy(out, self.rows[i], c)
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        return SparseMatrix([other.vecmul(row) for row in self.rows])

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        return SparseMatrix([axpy(dict(a), b) for a, b in zip(self.rows, other.rows)])

    def scale(self, c) -> "SparseMatrix":
        return SparseMatrix([{k: c * v for k, v in row.items()} for row in self.rows])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.rows == other.rows

    def is_zero(self) -> bool:
        return not any(self.rows)

    def nnz(self) -> int:
        return sum(len(row) for row in self.rows)

    def dense(self) -> np.ndarray:
        """numpy object array of Fractions; meant for small matrices."""
        n = self.size
        out = np.full((n, n), Fraction(0), dtype=object)
        for i, row in enumerate(self.rows):
            for j, c in row.items():
                out[i, j] = c
        return out

    @classmethod
    def from_dense(cls, array: np.ndarray) -> "SparseMatrix":
        return cls([{j: Fraction(c) for j, c in enumerate(row) if c} for row in array])

    def mod_p(self, p: int = MODULUS) -> np.ndarray:
        n = self.size
        out = np.zeros((n, n), dtype=np.int64)
        for i, row in enumerate(self.rows):
            for j, c in row.items():
                out[i, j] = to_residue(c, p)
        return out


def to_residue(c: Fraction, p: int = MODULUS) -> int:
    c = Fraction(c)
    if c.denominator % p == 0:
        raise ModulusError(f"denominator of {c} vanishes mod {p}")
    return (c.numerator % p) * pow(c.denominator % p, p - 2, p) % p


def mod_p_rank(rows: List[SparseVector], ncols: int, p: int = MODULUS) -> Tuple[int, List[int]]:
    """
    Rank of the rows modulo p and the greedy independent subset in listed order.

    Elimination runs on the transpose, so pivot columns are the first rows
    that are independent of the rows before them.
    """
    m = len(rows)
    a = np.zeros((ncols, m), dtype=np.int64)
    for j, row in enumerate(rows):
        for i, c in row.items():
            a[i, j] = to_residue(c, p)
    pivots: List[int] = []
    r = 0
    for j in range(m):
        if r == ncols:
            break
        nonzero = np.nonzero(a[r:, j])[0]
        if nonzero.size == 0:
            continue
        k = r + int(nonzero[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, j]), p - 2, p)
        a[r] = (a[r] * inv) % p
        below = a[r + 1:, j].copy()
        rows_to_fix = np.nonzero(below)[0]
        if rows_to_fix.size:
            idx = rows_to_fix + r + 1
            a[idx] = (a[idx] - np.outer(below[rows_to_fix], a[r]) % p) % p
        pivots.append(j)
        r += 1
    return r, pivots


def exact_rank(rows: List[SparseVector]) -> Tuple[int, List[int], Optional[int]]:
    """
    Rank over Q by incremental echelon reduction.

    Returns (rank, independent row indices in listed order, first dependent
    row index or None).
    """
    echelon: Dict[int, SparseVector] = {}
    independent: List[int] = []
    first_dependent: Optional[int] = None
    for index, row in enumerate(rows):
        v = {k: Fraction(c) for k, c in row.items() if c}
        while v:
            pivot = min(v)
            if pivot not in echelon:
                lead = v[pivot]
                echelon[pivot] = {k: c / lead for k, c in v.items()}
                independent.append(index)
                break
            axpy(v, echelon[pivot], -v[pivot])
        else:
            if first_dependent is None:
                first_dependent = index
    return len(independent), independent, first_dependent
