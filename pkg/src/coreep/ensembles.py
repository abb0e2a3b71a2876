"""Random matrices with known core-EP structure.

All constructions work in a core-EP basis: ``A = U [[T, S], [0, N]] U*``
with a random unitary ``U``, a well-conditioned upper-triangular ``T``
and a strictly upper-triangular ``N`` of prescribed nilpotency index.
The closed form ``U [[T^-1, 0], [0, 0]] U*`` is then a ground-truth
core-EP inverse independent of any numerical rank decision.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import ctranspose, matrix_exponential, spectral_norm

__all__ = [
    "Constructed",
    "random_unitary",
    "random_index_matrix",
    "case1_pair",
    "case2_pair",
    "case3_path",
    "case3_pair",
    "rank_jump_pair",
    "semistable_matrix",
    "stable_matrix",
]


def _cnormal(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(_cnormal(rng, n, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def _nilpotent(rng: np.random.Generator, size: int, k: int) -> np.ndarray:
    """Strictly upper-triangular Jordan-like block of index exactly ``k``."""
    n = np.zeros((size, size), dtype=np.complex128)
    if size == 0 or k <= 1:
        return n
    sizes, rem = [k], size - k
    while rem > 0:
        s = int(rng.integers(1, min(k, rem) + 1))
        sizes.append(s)
        rem -= s
    i = 0
    for s in sizes:
        for j in range(s - 1):
            n[i + j, i + j + 1] = rng.uniform(0.5, 1.5)
        i += s
    return n


def _core_block(rng, p, spectrum=None):
    t = np.triu(_cnormal(rng, p, p)) * 0.3
    if spectrum is None:
        spectrum = rng.uniform(1.0, 2.0, p) * np.exp(2j * np.pi * rng.uniform(size=p))
    t[np.diag_indices(p)] = spectrum
    return t


@dataclass
class Constructed:
    A: np.ndarray
    U: np.ndarray
    T: np.ndarray
    S: np.ndarray
    N: np.ndarray
    k: int

    @property
    def p(self) -> int:
        return self.T.shape[0]

    @property
    def core_ep(self) -> np.ndarray:
        u1 = self.U[:, : self.p]
        return u1 @ np.linalg.inv(self.T) @ ctranspose(u1) if self.p else np.zeros_like(self.A)

    def lift(self, block: np.ndarray) -> np.ndarray:
        return self.U @ block @ ctranspose(self.U)


def _assemble(u, t, s, nblk):
    p, m = t.shape[0], nblk.shape[0]
    blk = np.zeros((p + m, p + m), dtype=np.complex128)
    blk[:p, :p], blk[:p, p:], blk[p:, p:] = t, s, nblk
    return u @ blk @ ctranspose(u)


def random_index_matrix(
    rng: np.random.Generator, n: int, k: int, nil_size: Optional[int] = None, spectrum=None
) -> Constructed:
    """``n x n`` matrix of index exactly ``k``.

    ``k == 0`` gives a nonsingular matrix. ``k == 1`` may use a zero
    nilpotent block of any size. ``nil_size`` defaults to a random size in
    ``[k, n - 1]`` (``[1, n-1]`` for ``k == 1``), leaving a nonempty core.
    """
    if k > n:
        raise ValueError("index cannot exceed n")
    if nil_size is None:
        if k == 0:
            nil_size = 0
        else:
            nil_size = int(rng.integers(k, n)) if k < n else n
    p = n - nil_size
    u = random_unitary(rng, n)
    t = _core_block(rng, p, spectrum)
    s = _cnormal(rng, p, nil_size)
    nblk = _nilpotent(rng, nil_size, k)
    return Constructed(_assemble(u, t, s, nblk), u, t, s, nblk, k)


def _scale_to(block: np.ndarray, target: float) -> np.ndarray:
    nb = spectral_norm(block)
    return block if nb == 0 else block * (target / nb)


def case1_pair(rng, n: int, k: int, strength: float = 0.5):
    """``(A, E)`` with ``E = A^coreEP A E = E A A^coreEP`` and
    ``||A^coreEP E|| = strength``."""
    c = random_index_matrix(rng, n, k)
    p = c.p
    e1 = _cnormal(rng, p, p)
    blk = np.zeros((n, n), dtype=np.complex128)
    blk[:p, :p] = e1
    e = c.lift(blk)
    return c, e * (strength / spectral_norm(c.core_ep @ e))


def case2_pair(rng, n: int, k: int, strength: float = 0.3):
    """``(A, E)`` keeping both core-EP projectors: ``T -> T + E1``,
    ``S -> (T + E1) T^-1 S``, ``N -> N + E4`` with ``E4`` strictly upper
    triangular. ``||A^coreEP E||`` is kept at ``strength``."""
    c = random_index_matrix(rng, n, k)
    p, m = c.p, n - c.p
    e1 = _scale_to(_cnormal(rng, p, p), 1.0)
    e4 = np.triu(_cnormal(rng, m, m), 1)
    e4 = _scale_to(e4, 0.5) if m > 1 else np.zeros((m, m), dtype=np.complex128)
    tinv_s = np.linalg.solve(c.T, c.S)

    def build(scale):
        blk = np.zeros((n, n), dtype=np.complex128)
        blk[:p, :p] = scale * e1
        blk[:p, p:] = scale * e1 @ tinv_s
        blk[p:, p:] = e4
        return c.lift(blk)

    unit = spectral_norm(c.core_ep @ build(1.0))
    e = build(strength / unit if unit > 0 else 0.0)
    return c, e


def case3_path(rng, n: int, k: int):
    """``(c, build)`` where ``build(s)`` returns a rank-preserving ``E``.

    ``A + build(s)`` is ``A`` rebuilt in a basis rotated by ``exp(s H)``
    (``H`` skew-Hermitian) with blocks ``T + s dT``, ``S + s dS`` and
    ``N + s dN`` (``dN`` strictly upper triangular). The core rank is
    preserved for every ``s`` while neither projector is.
    """
    c = random_index_matrix(rng, n, k)
    p, m = c.p, n - c.p
    h = _cnormal(rng, n, n)
    h = (h - ctranspose(h)) / 2
    dt = _cnormal(rng, p, p)
    ds = _cnormal(rng, p, m)
    dn = np.triu(_cnormal(rng, m, m), 1)

    def build(scale: float) -> np.ndarray:
        v = c.U @ matrix_exponential(scale * h)
        return _assemble(v, c.T + scale * dt, c.S + scale * ds, c.N + scale * dn) - c.A

    return c, build


def case3_pair(rng, n: int, k: int, size: float = 1e-2):
    """Rank-preserving pair from :func:`case3_path` with ``||E|| / ||A|| = size``."""
    c, build = case3_path(rng, n, k)
    unit = spectral_norm(build(1e-6)) / 1e-6
    return c, build(size * spectral_norm(c.A) / unit)


def rank_jump_pair(rng, n: int, k: int, delta: float = 1e-3):
    """``(A, E)`` where ``E`` lifts one zero eigenvalue of the nilpotent part
    to ``delta``, so ``rank((A+E)^m) > rank(A^m)``."""
    c = random_index_matrix(rng, n, k, nil_size=int(rng.integers(max(k, 1), n + 1)))
    p, m = c.p, n - c.p
    blk = np.zeros((n, n), dtype=np.complex128)
    j = p + int(rng.integers(0, m))
    blk[j, j] = delta * np.exp(2j * np.pi * rng.uniform())
    return c, c.lift(blk)


def semistable_matrix(rng, n: int, p: Optional[int] = None) -> Constructed:
    """Index-1 matrix (zero nilpotent block) whose core has Re(lambda) < 0."""
    if p is None:
        p = int(rng.integers(1, n))
    eigs = -rng.uniform(0.5, 2.0, p) + 1j * rng.uniform(-2.0, 2.0, p)
    return random_index_matrix(rng, n, 1 if p < n else 0, nil_size=n - p, spectrum=eigs)


def stable_matrix(rng, n: int) -> Constructed:
    return semistable_matrix(rng, n, p=n)
