"""Semistability and integral representations of inverses.

For a stable ``M`` (all eigenvalues in the open left half-plane)
``M^-1 = -int_0^inf exp(tM) dt``. For semistable ``A`` and a perturbation
``E`` confined to the core part (``E = E A A^c = A^c A E``) the same
integral, taken against the projector ``A A^c``, gives ``(A+E)^c``.

The integral is truncated at ``t_max`` and evaluated by composite
Gauss-Legendre quadrature, with panel doubling until two successive
results agree. Since ``int_T^inf exp(tM) P dt = exp(TM) P M^#`` the
relative truncation error is estimated by ``q / (1 - q)`` with
``q = ||exp(T M) P||``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import (
    Case1Violated,
    NotSemistable,
    NotStable,
    PerturbedCoreUnstable,
    TruncationInsufficient,
)
from .geninv import PowerLadder, _core_ep_formula, _decompose, _eigen_split_tol
from .linalg import as_matrix, matrix_exponential, ordered_schur, spectral_norm
from .perturbation import EQ_TOL

__all__ = [
    "QuadratureConfig",
    "StabilityVerdict",
    "QuadratureResult",
    "classify_stability",
    "integral_inverse_stable",
    "integral_core_ep_perturbed",
]

# Safety factor on the truncation horizon ln(1/target) / |alpha|.
HORIZON_MARGIN = 1.5
MAX_PANELS = 1 << 14


@dataclass
class QuadratureConfig:
    """``t_max`` / ``panels`` of ``None`` mean "choose automatically"."""

    t_max: Optional[float] = None
    panels: Optional[int] = None
    gl_order: int = 8
    target_rel_error: float = 1e-10

    def __post_init__(self):
        if self.t_max is not None and not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.panels is not None and self.panels < 1:
            raise ValueError("panels must be >= 1")
        if self.gl_order < 1:
            raise ValueError("gl_order must be >= 1")
        if not 0 < self.target_rel_error < 1:
            raise ValueError("target_rel_error must lie in (0, 1)")

    @classmethod
    def from_obj(cls, obj: dict) -> "QuadratureConfig":
        def auto(v):
            return None if v in (None, "auto") else v

        return cls(
            t_max=None if auto(obj.get("t_max")) is None else float(obj["t_max"]),
            panels=None if auto(obj.get("panels")) is None else int(obj["panels"]),
            gl_order=int(obj.get("gl_order", 8)),
            target_rel_error=float(obj.get("target_rel_error", 1e-10)),
        )

    def to_dict(self) -> dict:
        return {
            "t_max": "auto" if self.t_max is None else self.t_max,
            "panels": "auto" if self.panels is None else self.panels,
            "gl_order": self.gl_order,
            "target_rel_error": self.target_rel_error,
        }


@dataclass
class StabilityVerdict:
    is_stable: bool
    is_semistable: bool
    spectral_abscissa_nonzero: Optional[float]
    index: int
    eigenvalues: np.ndarray

    def to_dict(self) -> dict:
        return {
            "is_stable": self.is_stable,
            "is_semistable": self.is_semistable,
            "spectral_abscissa_nonzero": self.spectral_abscissa_nonzero,
            "index": self.index,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
        }


@dataclass
class QuadratureResult:
    value: np.ndarray
    t_max: float
    panels: int
    tail_estimate: float
    change_estimate: float

    def to_dict(self) -> dict:
        from .matio import matrix_to_obj

        return {
            "value": matrix_to_obj(self.value),
            "t_max": self.t_max,
            "panels": self.panels,
            "tail_estimate": self.tail_estimate,
            "change_estimate": self.change_estimate,
        }


def _verdict(ladder: PowerLadder) -> StabilityVerdict:
    if ladder.n == 0 or ladder.norm == 0.0:
        lam = np.zeros(ladder.n, dtype=np.complex128)
        k = ladder.index
        return StabilityVerdict(ladder.n == 0, True, None, k, lam)
    sch = ordered_schur(ladder.a, _eigen_split_tol(ladder))
    lam = sch.eigenvalues
    nonzero = lam[: sch.split]
    k = ladder.index
    alpha = float(np.max(nonzero.real)) if nonzero.size else None
    semi = k <= 1 and (alpha is None or alpha < 0.0)
    return StabilityVerdict(semi and k == 0, semi, alpha, k, lam)


def classify_stability(a, tol: Optional[float] = None) -> StabilityVerdict:
    """Stable / semistable classification from the Schur diagonal.

    Eigenvalues with modulus at or below the split threshold used by the
    core-EP decomposition count as zero.
    """
    return _verdict(PowerLadder(a, tol))


def _fsum_matrices(parts: list[np.ndarray]) -> np.ndarray:
    stack = np.stack(parts)
    flat_re = stack.real.reshape(len(parts), -1)
    flat_im = stack.imag.reshape(len(parts), -1)
    re = np.array([math.fsum(col) for col in flat_re.T])
    im = np.array([math.fsum(col) for col in flat_im.T])
    return (re + 1j * im).reshape(stack.shape[1:])


def _gauss_legendre(m: np.ndarray, proj: np.ndarray, t_max: float, panels: int, order: int) -> np.ndarray:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    h = t_max / panels
    parts = []
    for i in range(panels):
        mid = (i + 0.5) * h
        for x, w in zip(nodes, weights):
            t = mid + 0.5 * h * x
            parts.append((0.5 * h * w) * (matrix_exponential(t * m) @ proj))
    return _fsum_matrices(parts)


def _integrate(m: np.ndarray, proj: np.ndarray, alpha: float, cfg: QuadratureConfig) -> QuadratureResult:
    """``-int_0^t_max exp(tM) P dt`` with truncation and panel control."""
    target = cfg.target_rel_error
    auto_t = cfg.t_max is None
    t_max = cfg.t_max if not auto_t else HORIZON_MARGIN * math.log(1.0 / target) / abs(alpha)

    while True:
        q = spectral_norm(matrix_exponential(t_max * m) @ proj)
        tail = q / (1.0 - q) if q < 1.0 else math.inf
        if tail <= target:
            break
        if not auto_t:
            raise TruncationInsufficient(
                f"tail estimate {tail:.3e} exceeds target {target:.1e} at t_max = {t_max:g}"
            )
        t_max *= 2.0

    order = cfg.gl_order
    if cfg.panels is not None:
        val = -_gauss_legendre(m, proj, t_max, cfg.panels, order)
        return QuadratureResult(val, t_max, cfg.panels, tail, math.nan)

    # Start with panels short enough that ||M|| * h stays moderate.
    panels = max(2, int(math.ceil(t_max * spectral_norm(m) / 4.0)))
    prev = -_gauss_legendre(m, proj, t_max, panels, order)
    while True:
        panels *= 2
        if panels > MAX_PANELS:
            raise TruncationInsufficient("panel doubling did not converge")
        cur = -_gauss_legendre(m, proj, t_max, panels, order)
        scale = max(spectral_norm(cur), np.finfo(float).tiny)
        change = spectral_norm(cur - prev) / scale
        if change <= target:
            return QuadratureResult(cur, t_max, panels, tail, change)
        prev = cur


def integral_inverse_stable(a, cfg: Optional[QuadratureConfig] = None, tol: Optional[float] = None) -> QuadratureResult:
    """``A^-1`` as ``-int_0^t_max exp(tA) dt`` for stable ``A``."""
    cfg = cfg or QuadratureConfig()
    ladder = PowerLadder(a, tol)
    v = _verdict(ladder)
    if not v.is_stable:
        raise NotStable("matrix is not stable")
    n = ladder.n
    return _integrate(ladder.a, np.eye(n, dtype=np.complex128), v.spectral_abscissa_nonzero, cfg)


def integral_core_ep_perturbed(
    a, e, cfg: Optional[QuadratureConfig] = None, tol: Optional[float] = None
) -> QuadratureResult:
    """``(A+E)^c`` as ``-int_0^t_max exp(t(A+E)) A A^c dt``.

    Requires ``A`` semistable, ``E = E A A^c = A^c A E`` and a stable core
    block in the core-EP decomposition of ``A + E`` of the same size as
    that of ``A``.
    """
    cfg = cfg or QuadratureConfig()
    la = PowerLadder(a, tol)
    e = as_matrix(e)
    if e.shape != la.a.shape:
        raise ValueError(f"A is {la.a.shape}, E is {e.shape}")
    if not _verdict(la).is_semistable:
        raise NotSemistable("A is not semistable")
    x = _core_ep_formula(la)
    a_ = la.a
    thr = EQ_TOL * (1.0 + spectral_norm(e))
    if spectral_norm(e - x @ a_ @ e) > thr or spectral_norm(e - e @ a_ @ x) > thr:
        raise Case1Violated("E is not confined to the core part of A")
    proj = a_ @ x
    lae = PowerLadder(a_ + e, tol)
    if lae.norm == 0.0 or la.core_rank == 0:
        return QuadratureResult(np.zeros_like(a_), 0.0, 0, 0.0, 0.0)
    dec = _decompose(lae)
    if dec.p != la.core_rank:
        raise PerturbedCoreUnstable(
            f"core of A+E has size {dec.p}, expected {la.core_rank}"
        )
    core_eigs = np.diag(dec.T)
    alpha = float(np.max(core_eigs.real))
    if not alpha < 0.0:
        raise PerturbedCoreUnstable(f"core block of A+E has spectral abscissa {alpha:.3g} >= 0")
    return _integrate(lae.a, proj, alpha, cfg)
