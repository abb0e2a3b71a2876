"""Index, Moore-Penrose, Drazin, core and core-EP inverses.

Every inverse comes back as an :class:`InverseResult` carrying the spectral
norms of the defects of its defining equations, recomputed from ``X`` and
``A``.

Tolerances in this module are *relative*: a power ``A^j`` is given the
absolute rank threshold ``tol * ||A||**j``. ``tol=None`` means
``n * eps``. Scaling by ``||A||**j`` rather than by ``sigma_1(A^j)``
keeps a numerically-zero power (nilpotent part) from being read as full
rank.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DecompositionInconsistency, IndexTooLarge, RouteDisagreement
from .linalg import (
    EPS,
    as_matrix,
    ctranspose,
    ordered_schur,
    spectral_norm,
)

__all__ = [
    "InverseResult",
    "CoreEPDecomposition",
    "PowerLadder",
    "index_of",
    "moore_penrose",
    "core_ep_decompose",
    "core_ep_inverse",
    "drazin_inverse",
    "core_inverse",
    "verify_core_ep",
    "lemma11_check",
    "truncated_pinv",
]

ROUTE_TOL = 1e-8


def _norm(a: np.ndarray) -> float:
    return spectral_norm(a)


def truncated_pinv(m: np.ndarray, rank: int) -> np.ndarray:
    """Pseudoinverse keeping exactly the ``rank`` largest singular values."""
    rows, cols = m.shape
    if rank <= 0 or m.size == 0:
        return np.zeros((cols, rows), dtype=np.complex128)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return (ctranspose(vh[:rank]) / s[:rank]) @ ctranspose(u[:, :rank])


class PowerLadder:
    """Cached powers ``A^j`` and their numerical ranks."""

    def __init__(self, a, tol: Optional[float] = None):
        self.a = as_matrix(a, square=True)
        self.n = self.a.shape[0]
        self.norm = _norm(self.a)
        self.rel_tol = self.n * EPS if tol is None else float(tol)
        self._powers = [np.eye(self.n, dtype=np.complex128)]
        self._ranks: dict[int, int] = {}
        self._index: Optional[int] = None

    def power(self, j: int) -> np.ndarray:
        while len(self._powers) <= j:
            self._powers.append(self._powers[-1] @ self.a)
        return self._powers[j]

    def threshold(self, j: int) -> float:
        return self.rel_tol * self.norm**j

    def rank(self, j: int) -> int:
        if j not in self._ranks:
            if j == 0:
                self._ranks[j] = self.n
            else:
                p = self.power(j)
                s = np.linalg.svd(p, compute_uv=False) if p.size else np.zeros(0)
                self._ranks[j] = int(np.count_nonzero(s > self.threshold(j)))
        return self._ranks[j]

    @property
    def index(self) -> int:
        if self._index is None:
            k = 0
            while k < self.n and self.rank(k) != self.rank(k + 1):
                k += 1
            self._index = k
        return self._index

    @property
    def core_rank(self) -> int:
        """``rank(A^k)`` at ``k = ind(A)``."""
        return self.rank(self.index)

    def pinv(self, j: int) -> np.ndarray:
        # For j >= ind(A) every power has the core rank.
        r = self.core_rank if j >= self.index else self.rank(j)
        return truncated_pinv(self.power(j), r)


def index_of(a, tol: Optional[float] = None) -> int:
    """Smallest ``k >= 0`` with ``rank(A^k) == rank(A^(k+1))``."""
    return PowerLadder(a, tol).index


@dataclass
class InverseResult:
    X: np.ndarray
    residuals: dict[str, float]
    tol: float
    k: Optional[int] = None
    kind: str = ""
    notes: list[str] = field(default_factory=list)

    def residual_scale(self, a) -> float:
        """``(1 + ||A||)^(k+1) * (1 + ||X||)^2``."""
        k = self.k or 0
        return (1 + _norm(np.asarray(a))) ** (k + 1) * (1 + _norm(self.X)) ** 2

    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def to_dict(self) -> dict:
        from .matio import matrix_to_obj

        return {
            "kind": self.kind,
            "X": matrix_to_obj(self.X),
            "residuals": dict(self.residuals),
            "k": self.k,
            "tol": self.tol,
            "notes": list(self.notes),
        }


def _penrose_residuals(a: np.ndarray, x: np.ndarray) -> dict[str, float]:
    ax, xa = a @ x, x @ a
    return {
        "AXA=A": _norm(ax @ a - a),
        "XAX=X": _norm(x @ ax - x),
        "(AX)*=AX": _norm(ax - ctranspose(ax)),
        "(XA)*=XA": _norm(xa - ctranspose(xa)),
    }


def moore_penrose(a, tol: Optional[float] = None) -> InverseResult:
    """Moore-Penrose inverse by truncated SVD.

    Singular values ``<= tol * sigma_1`` are dropped; ``tol=None`` gives
    ``max(m, n) * eps``. Works for rectangular ``A``.
    """
    a = as_matrix(a)
    rel = max(a.shape, default=0) * EPS if tol is None else float(tol)
    if a.size == 0:
        x = np.zeros(a.shape[::-1], dtype=np.complex128)
    else:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
        r = int(np.count_nonzero(s > rel * s[0])) if s[0] > 0 else 0
        x = (ctranspose(vh[:r]) / s[:r]) @ ctranspose(u[:, :r])
    return InverseResult(x, _penrose_residuals(a, x), rel, None, "pinv")


@dataclass
class CoreEPDecomposition:
    """``A = U [[T, S], [0, N]] U*`` with ``T`` nonsingular upper triangular
    and ``N`` nilpotent."""

    U: np.ndarray
    T: np.ndarray
    S: np.ndarray
    N: np.ndarray
    k: int

    @property
    def p(self) -> int:
        return self.T.shape[0]

    def block(self) -> np.ndarray:
        n, p = self.U.shape[0], self.p
        m = np.zeros((n, n), dtype=np.complex128)
        m[:p, :p] = self.T
        m[:p, p:] = self.S
        m[p:, p:] = self.N
        return m

    def reconstruct(self) -> np.ndarray:
        return self.U @ self.block() @ ctranspose(self.U)

    def core_ep_inverse(self) -> np.ndarray:
        """``U [[T^-1, 0], [0, 0]] U*``."""
        p = self.p
        u1 = self.U[:, :p]
        if p == 0:
            return np.zeros_like(self.U)
        tinv = np.linalg.solve(self.T, np.eye(p, dtype=np.complex128))
        return u1 @ tinv @ ctranspose(u1)


def _eigen_split_tol(ladder: PowerLadder) -> float:
    # Eigenvalues of an index-k nilpotent part are smeared to radius
    # ~ (eps * ||A||^k)^(1/k) by rounding, hence the 1/k root.
    k = max(ladder.index, 1)
    return ladder.norm * (100.0 * ladder.rel_tol) ** (1.0 / k)


def _decompose(ladder: PowerLadder) -> CoreEPDecomposition:
    a, n, k = ladder.a, ladder.n, ladder.index
    p = ladder.core_rank
    if ladder.norm == 0.0:
        z = np.zeros((0, 0), dtype=np.complex128)
        return CoreEPDecomposition(np.eye(n, dtype=np.complex128), z,
                                   np.zeros((0, n), dtype=np.complex128), a.copy(), k)
    sch = ordered_schur(a, _eigen_split_tol(ladder))
    if sch.split != p:
        raise DecompositionInconsistency(
            f"Schur split {sch.split} != rank(A^{k}) = {p}; tolerance conflict"
        )
    r = sch.R
    return CoreEPDecomposition(sch.Q, r[:p, :p].copy(), r[:p, p:].copy(), r[p:, p:].copy(), k)


def core_ep_decompose(a, tol: Optional[float] = None) -> CoreEPDecomposition:
    """Core-EP decomposition from an ordered complex Schur form.

    The Schur form is split at the nonzero/zero eigenvalue boundary; the
    number of leading eigenvalues must equal ``rank(A^k)``, otherwise
    :class:`DecompositionInconsistency` is raised.
    """
    return _decompose(PowerLadder(a, tol))


def _core_ep_residuals(ladder: PowerLadder, x: np.ndarray) -> dict[str, float]:
    a, k = ladder.a, ladder.index
    ax = a @ x
    return {
        "XA^(k+1)=A^k": _norm(x @ ladder.power(k + 1) - ladder.power(k)),
        "AX^2=X": _norm(ax @ x - x),
        "(AX)*=AX": _norm(ax - ctranspose(ax)),
    }


def _core_ep_formula(ladder: PowerLadder) -> np.ndarray:
    k = ladder.index
    return ladder.power(k) @ ladder.pinv(k + 1)


def core_ep_inverse(a, tol: Optional[float] = None, cross_check: bool = True) -> InverseResult:
    """Core-EP inverse ``A^k (A^(k+1))^+`` with ``k = ind(A)``.

    With ``cross_check`` the result is compared against the decomposition
    route ``U [[T^-1, 0], [0, 0]] U*``; a relative gap above ``1e-8``
    raises :class:`RouteDisagreement`.
    """
    ladder = PowerLadder(a, tol)
    x = _core_ep_formula(ladder)
    notes = []
    if cross_check and ladder.n:
        y = _decompose(ladder).core_ep_inverse()
        gap = _norm(x - y)
        xn = _norm(x)
        if gap > ROUTE_TOL * max(xn, np.finfo(float).tiny):
            raise RouteDisagreement(
                f"formula and decomposition routes differ by {gap:.3e} (||X|| = {xn:.3e})"
            )
        notes.append(f"route gap {gap:.3e}")
    return InverseResult(x, _core_ep_residuals(ladder, x), ladder.rel_tol,
                         ladder.index, "coreep", notes)


def _drazin_residuals(ladder: PowerLadder, x: np.ndarray) -> dict[str, float]:
    a, k = ladder.a, ladder.index
    ak = ladder.power(k)
    ax, xa = a @ x, x @ a
    return {
        "AXA^k=A^k": _norm(ax @ ak - ak),
        "XAX=X": _norm(x @ ax - x),
        "AX=XA": _norm(ax - xa),
    }


def drazin_inverse(a, tol: Optional[float] = None) -> InverseResult:
    """Drazin inverse as ``(A^coreEP)^(k+1) A^k``."""
    ladder = PowerLadder(a, tol)
    k = ladder.index
    c = _core_ep_formula(ladder)
    x = np.linalg.matrix_power(c, k + 1) @ ladder.power(k) if ladder.n else c
    return InverseResult(x, _drazin_residuals(ladder, x), ladder.rel_tol, k, "drazin")


def core_inverse(a, tol: Optional[float] = None) -> InverseResult:
    """Core inverse; only defined when ``ind(A) <= 1``."""
    ladder = PowerLadder(a, tol)
    if ladder.index > 1:
        raise IndexTooLarge(f"core inverse needs ind(A) <= 1, got {ladder.index}")
    res = core_ep_inverse(ladder.a, tol)
    res.kind = "core"
    return res


def verify_core_ep(a, x, tol: Optional[float] = None) -> dict[str, float]:
    """Defects of the three core-EP equations for a candidate ``X``."""
    ladder = PowerLadder(a, tol)
    x = as_matrix(x)
    if x.shape != ladder.a.shape:
        raise ValueError(f"shape mismatch: A {ladder.a.shape}, X {x.shape}")
    return _core_ep_residuals(ladder, x)


def lemma11_check(a, tol: Optional[float] = None) -> dict[str, float]:
    """Residuals of the identities linking core-EP, Drazin and Moore-Penrose.

    The Drazin inverse used here is computed independently of the core-EP
    inverse, as ``A^k (A^(2k+1))^+ A^k``.
    """
    ladder = PowerLadder(a, tol)
    k = ladder.index
    ak = ladder.power(k)
    x = _core_ep_formula(ladder)
    d = ak @ ladder.pinv(2 * k + 1) @ ak

    proj = {j: ladder.power(j) @ ladder.pinv(j) for j in (k, k + 1, k + 2)}
    via_k = d @ proj[k]
    via_k1 = d @ proj[k + 1]
    out = {
        "coreEP = D A^k (A^k)+": _norm(x - via_k),
        "A^k (A^k)+ = A^(k+1) (A^(k+1))+": _norm(proj[k] - proj[k + 1]),
        "A^k (A^k)+ = A^(k+2) (A^(k+2))+": _norm(proj[k] - proj[k + 2]),
        "D = coreEP^(k+1) A^k": _norm(d - np.linalg.matrix_power(x, k + 1) @ ak),
        "D A^k (A^k)+ = D A^(k+1) (A^(k+1))+": _norm(via_k - via_k1),
        "D A^(k+1) (A^(k+1))+ = A^k (A^(k+1))+": _norm(via_k1 - x),
        "D A^k (A^k)+ = A^k (A^(k+1))+": _norm(via_k - x),
    }
    if ladder.n:
        y = _decompose(ladder).core_ep_inverse()
        out["decomposition = A^k (A^(k+1))+"] = _norm(y - x)
    return out
