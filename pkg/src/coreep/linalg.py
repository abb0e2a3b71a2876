"""Dense complex kernels: SVD, numerical rank, spectral norm, ordered
complex Schur form and the matrix exponential.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``;
:func:`as_matrix` is the single validating constructor.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import FactorizationFailure, OverflowFailure

EPS = np.finfo(np.float64).eps

__all__ = [
    "EPS",
    "SvdResult",
    "OrderedSchurResult",
    "as_matrix",
    "ctranspose",
    "matrix_powers",
    "svd",
    "numerical_rank",
    "spectral_norm",
    "ordered_schur",
    "matrix_exponential",
]


def as_matrix(a, square: bool = False) -> np.ndarray:
    """Return ``a`` as a finite 2-D ``complex128`` array.

    Raises ``ValueError`` for non-2-D input, non-finite entries, or a
    non-square matrix when ``square`` is set.
    """
    m = np.array(a, dtype=np.complex128, copy=True)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def ctranspose(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def matrix_powers(a: np.ndarray, kmax: int) -> list[np.ndarray]:
    """``[A^0, A^1, ..., A^kmax]`` by repeated multiplication."""
    n = a.shape[0]
    out = [np.eye(n, dtype=np.complex128)]
    for _ in range(kmax):
        out.append(out[-1] @ a)
    return out


@dataclass(frozen=True)
class SvdResult:
    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        m, n = self.U.shape[0], self.V.shape[0]
        sigma = np.zeros((m, n), dtype=np.complex128)
        r = self.singular_values.size
        sigma[:r, :r] = np.diag(self.singular_values)
        return self.U @ sigma @ ctranspose(self.V)


@dataclass(frozen=True)
class OrderedSchurResult:
    """``A = Q R Q*`` with the ``split`` large eigenvalues leading on diag(R)."""

    Q: np.ndarray
    R: np.ndarray
    split: int
    tol: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.diag(self.R).copy()


def svd(a) -> SvdResult:
    """Full SVD ``A = U diag(s) V*`` with ``s`` nonincreasing."""
    a = as_matrix(a)
    m, n = a.shape
    if m == 0 or n == 0:
        return SvdResult(np.eye(m, dtype=complex), np.zeros(0), np.eye(n, dtype=complex))
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailure(f"SVD did not converge: {exc}") from exc
    return SvdResult(u, s, ctranspose(vh))


def _singular_values(a: np.ndarray) -> np.ndarray:
    if a.size == 0:
        return np.zeros(0)
    try:
        return np.linalg.svd(a, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailure(f"SVD did not converge: {exc}") from exc


def auto_rank_tol(a: np.ndarray, s: Optional[np.ndarray] = None) -> float:
    """``max(m, n) * sigma_1 * eps``."""
    if s is None:
        s = _singular_values(a)
    if s.size == 0:
        return 0.0
    return max(a.shape) * s[0] * EPS


def numerical_rank(a, tol: Optional[float] = None) -> int:
    """Number of singular values strictly above ``tol``.

    ``tol=None`` selects the AUTO threshold ``max(m, n) * sigma_1 * eps``.
    An explicit ``tol`` is absolute.
    """
    a = as_matrix(a)
    s = _singular_values(a)
    tau = auto_rank_tol(a, s) if tol is None else float(tol)
    return int(np.count_nonzero(s > tau))


def spectral_norm(a) -> float:
    s = _singular_values(np.asarray(a, dtype=np.complex128))
    return float(s[0]) if s.size else 0.0


def _swap_adjacent(r: np.ndarray, q: np.ndarray, i: int) -> None:
    # Unitary rotation exchanging diagonal entries i and i+1 of triangular r.
    a, b, d = r[i, i], r[i, i + 1], r[i + 1, i + 1]
    x = np.array([b, d - a])
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        return
    c, s = x / nrm
    g = np.array([[c, -np.conj(s)], [s, np.conj(c)]])
    r[i:i + 2, :] = ctranspose(g) @ r[i:i + 2, :]
    r[:, i:i + 2] = r[:, i:i + 2] @ g
    q[:, i:i + 2] = q[:, i:i + 2] @ g
    r[i + 1, i] = 0.0


def ordered_schur(a, tol: Optional[float] = None) -> OrderedSchurResult:
    """Complex Schur form with eigenvalues of modulus ``> tol`` moved first.

    Reordering is done by adjacent unitary swaps (a stable bubble pass), so
    the relative order within each group is preserved. ``tol=None`` uses
    ``n * ||A|| * eps``.
    """
    a = as_matrix(a, square=True)
    n = a.shape[0]
    tau = n * spectral_norm(a) * EPS if tol is None else float(tol)
    if n == 0:
        return OrderedSchurResult(a.copy(), a.copy(), 0, tau)
    try:
        r, q = scipy.linalg.schur(a, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise FactorizationFailure(f"Schur iteration failed: {exc}") from exc
    r = np.triu(r)

    large = [abs(r[i, i]) > tau for i in range(n)]
    # Bubble each large eigenvalue upward past the small ones.
    pos = 0
    for i in range(n):
        if not large[i]:
            continue
        for j in range(i, pos, -1):
            _swap_adjacent(r, q, j - 1)
            large[j - 1], large[j] = large[j], large[j - 1]
        pos += 1
    r = np.triu(r)
    split = int(sum(abs(r[i, i]) > tau for i in range(n)))
    return OrderedSchurResult(q, r, split, tau)


# Pade(13) numerator coefficients.
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)


def matrix_exponential(a) -> np.ndarray:
    """``exp(A)`` by scaling and squaring with the [13/13] Pade approximant.

    The scaling exponent ``s`` is the smallest with ``||A / 2^s|| <= 0.5``.
    """
    a = as_matrix(a, square=True)
    n = a.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    if n == 0:
        return ident
    nrm = spectral_norm(a)
    if nrm == 0.0:
        return ident
    s = max(0, int(np.ceil(np.log2(nrm / 0.5))))
    if s > 1100:
        raise OverflowFailure(f"norm {nrm:.3e} too large for exp")
    x = a / 2.0**s

    b = _PADE13
    x2 = x @ x
    x4 = x2 @ x2
    x6 = x2 @ x4
    u = x @ (x6 @ (b[13] * x6 + b[11] * x4 + b[9] * x2)
             + b[7] * x6 + b[5] * x4 + b[3] * x2 + b[1] * ident)
    v = (x6 @ (b[12] * x6 + b[10] * x4 + b[8] * x2)
         + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * ident)
    f = np.linalg.solve(v - u, v + u)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            f = f @ f
    if not np.all(np.isfinite(f)):
        raise OverflowFailure("exp(A) overflowed during squaring")
    return f
