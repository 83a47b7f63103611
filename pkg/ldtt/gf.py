"""Exact linear algebra over the prime field GF(p).

Matrices are immutable wrappers around ``numpy`` int64 arrays whose
entries are kept reduced to ``[0, p)``. Everything here is exact; there
is no floating point anywhere in the package.
"""
from functools import lru_cache
from itertools import product
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ldtt.errors import DimMismatch, ModulusMismatch


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)):
        raise TypeError(f"modulus must be an int, got {type(p)}.")
    if not is_prime(int(p)):
        raise ValueError(f"modulus {p} is not prime.")
    return int(p)


class Mat:
    """A ``rows x cols`` matrix over GF(p).

    Parameters
    ----------
    data : array-like
      Anything ``numpy.asarray`` accepts; reduced mod ``p`` on
      construction. A 1-d input is read as a column vector.

    p : int
      Prime modulus.

    """
    __slots__ = ("_array", "p")

    def __init__(self, data, p: int) -> None:
        arr = np.array(data, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2:
            raise DimMismatch(f"expected a 2-d array, got shape {arr.shape}")
        arr = np.mod(arr, p)
        arr.setflags(write=False)
        self._array = arr
        self.p = int(p)

    @property
    def rows(self) -> int:
        return self._array.shape[0]

    @property
    def cols(self) -> int:
        return self._array.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self._array.shape

    @property
    def entries(self) -> Tuple[int, ...]:
        """Row-major residues."""
        return tuple(int(x) for x in self._array.ravel())

    def to_array(self) -> np.ndarray:
        return self._array.copy()

    def __getitem__(self, key):
        return self._array[key]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return (self.p == other.p and self.shape == other.shape
                and bool(np.array_equal(self._array, other._array)))

    def __hash__(self) -> int:
        return hash((self.p, self.shape, self._array.tobytes()))

    def __matmul__(self, other: "Mat") -> "Mat":
        return matmul(self, other)

    def __repr__(self) -> str:
        return f"Mat({self._array.tolist()}, p={self.p})"

    @property
    def T(self) -> "Mat":
        return Mat(self._array.T, self.p)

    def is_zero(self) -> bool:
        return not self._array.any()


def _same_modulus(*mats: Mat) -> int:
    moduli = {m.p for m in mats}
    if len(moduli) > 1:
        raise ModulusMismatch(f"matrices over different fields: {moduli}")
    return moduli.pop()


def zeros(rows: int, cols: int, p: int) -> Mat:
    return Mat(np.zeros((rows, cols), dtype=np.int64), p)


def idmat(n: int, p: int) -> Mat:
    return Mat(np.eye(n, dtype=np.int64), p)


def matmul(a: Mat, b: Mat) -> Mat:
    p = _same_modulus(a, b)
    if a.cols != b.rows:
        raise DimMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return Mat(a[:, :] @ b[:, :], p)


def kron(a: Mat, b: Mat) -> Mat:
    """Kronecker product in left-major order."""
    p = _same_modulus(a, b)
    return Mat(np.kron(a[:, :], b[:, :]), p)


def dsum(a: Mat, b: Mat) -> Mat:
    """Block-diagonal sum."""
    p = _same_modulus(a, b)
    out = np.zeros((a.rows + b.rows, a.cols + b.cols), dtype=np.int64)
    out[:a.rows, :a.cols] = a[:, :]
    out[a.rows:, a.cols:] = b[:, :]
    return Mat(out, p)


def hstack(mats: Sequence[Mat], rows: Optional[int] = None,
           p: Optional[int] = None) -> Mat:
    if not mats:
        return zeros(rows or 0, 0, p)
    p = _same_modulus(*mats)
    if len({m.rows for m in mats}) > 1:
        raise DimMismatch("hstack of matrices with different row counts")
    return Mat(np.hstack([m[:, :] for m in mats]), p)


def vstack(mats: Sequence[Mat], cols: Optional[int] = None,
           p: Optional[int] = None) -> Mat:
    if not mats:
        return zeros(0, cols or 0, p)
    p = _same_modulus(*mats)
    if len({m.cols for m in mats}) > 1:
        raise DimMismatch("vstack of matrices with different column counts")
    return Mat(np.vstack([m[:, :] for m in mats]), p)


def block_diag(mats: Sequence[Mat], p: int) -> Mat:
    out = zeros(0, 0, p)
    for m in mats:
        out = dsum(out, m)
    return out


def _rref_array(arr: np.ndarray, p: int,
                ncols: Optional[int] = None) -> Tuple[np.ndarray, List[int]]:
    a = np.mod(arr.astype(np.int64), p)
    rows = a.shape[0]
    ncols = a.shape[1] if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nonzero = np.nonzero(a[r:, c])[0]
        if nonzero.size == 0:
            continue
        k = r + int(nonzero[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = np.mod(a[r] * pow(int(a[r, c]), -1, p), p)
        col = a[:, c].copy()
        col[r] = 0
        a = np.mod(a - np.outer(col, a[r]), p)
        pivots.append(c)
        r += 1
    return a, pivots


def rref(m: Mat) -> Tuple[Mat, int, List[int]]:
    """Reduced row echelon form, rank and pivot columns."""
    arr, pivots = _rref_array(m[:, :], m.p)
    return Mat(arr, m.p), len(pivots), pivots


def rank(m: Mat) -> int:
    return rref(m)[1]


def kernel_basis(m: Mat) -> Mat:
    """Columns spanning the right kernel of ``m`` (``cols x nullity``)."""
    reduced, _, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    out = np.zeros((m.cols, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        out[f, j] = 1
        for i, pc in enumerate(pivots):
            out[pc, j] = -reduced[i, f]
    return Mat(out, m.p)


def cokernel(m: Mat) -> Tuple[Mat, int]:
    """Surjection ``proj`` with ``proj @ m == 0`` onto ``F^rows / im m``.

    The rows of ``proj`` span the left kernel of ``m``.
    """
    proj = kernel_basis(m.T).T
    return proj, proj.rows


def solve(m: Mat, v: Mat) -> Optional[Mat]:
    """Some ``x`` with ``m @ x == v``, or None when there is none."""
    p = _same_modulus(m, v)
    if m.rows != v.rows:
        raise DimMismatch(f"cannot solve {m.shape} against {v.shape}")
    aug = np.hstack([m[:, :], v[:, :]])
    reduced, pivots = _rref_array(aug, p, ncols=m.cols)
    for i in range(len(pivots), m.rows):
        if reduced[i, m.cols:].any():
            return None
    out = np.zeros((m.cols, v.cols), dtype=np.int64)
    for i, pc in enumerate(pivots):
        out[pc] = reduced[i, m.cols:]
    return Mat(out, p)


def inverse(m: Mat) -> Optional[Mat]:
    if m.rows != m.cols or rank(m) != m.rows:
        return None
    return solve(m, idmat(m.rows, m.p))


def is_invertible(m: Mat) -> bool:
    return m.rows == m.cols and rank(m) == m.rows


def vectors(dim: int, p: int) -> Iterator[Tuple[int, ...]]:
    """All ``p**dim`` coordinate tuples in lexicographic order."""
    return product(range(p), repeat=dim)


def enumerate_mats(rows: int, cols: int, p: int) -> Iterator[Mat]:
    for entries in product(range(p), repeat=rows * cols):
        yield Mat(np.array(entries, dtype=np.int64).reshape(rows, cols), p)


@lru_cache(maxsize=None)
def invertible_mats(n: int, p: int) -> Tuple[Mat, ...]:
    """GL_n(F_p) in lexicographic order of entries."""
    return tuple(m for m in enumerate_mats(n, n, p) if is_invertible(m))


def random_mat(rng: np.random.Generator, rows: int, cols: int,
               p: int) -> Mat:
    return Mat(rng.integers(0, p, size=(rows, cols)), p)


def random_invertible(rng: np.random.Generator, n: int, p: int) -> Mat:
    while True:
        m = random_mat(rng, n, n, p)
        if is_invertible(m):
            return m
