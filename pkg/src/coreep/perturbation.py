"""Perturbation regimes and error bounds for the core-EP inverse.

A pair ``(A, E)`` is classified against three regimes:

* case 1 -- ``E = A^c A E = E A A^c`` (range/null-space inclusion),
* case 2 -- both projectors ``A A^c`` and ``A^c A`` survive the perturbation,
* case 3 -- ``rank(A^k) == rank((A+E)^k)`` at ``k = max(ind A, ind(A+E))``,

where ``A^c`` denotes the core-EP inverse. Each regime has its own bounds
on ``||(A+E)^c - A^c|| / ||A^c||``; every bound function returns
:class:`BoundReport` objects and raises :class:`PremiseViolated` (with
the partial report attached) when its hypotheses fail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import NotARankJump, PremiseViolated, ShapeMismatch, ToleranceConflict
from .geninv import PowerLadder, _core_ep_formula
from .linalg import as_matrix, spectral_norm

__all__ = [
    "EQ_TOL",
    "ConditionProfile",
    "BoundReport",
    "PerturbationPair",
    "classify",
    "epsilon_poly",
    "bound_case1",
    "bound_case2",
    "bound_case3",
    "lower_bound_rank_jump",
    "exact_relative_error",
    "perturbation_report",
]

# Relative threshold for matrix-equality premises (scaled by 1 + ||E||).
EQ_TOL = 1e-8

KAPPA_FORM_NOTE = (
    "kappa-form uses kappa(A)*||E||/||A||; the printed variant with "
    "kappa(A)*||E||*||A|| does not majorise ||A^c E|| and is not used"
)


@dataclass
class ConditionProfile:
    case1: bool
    case2: bool
    case3: bool
    k_A: int
    k_AE: int
    k_max: int
    defects: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "case1": self.case1,
            "case2": self.case2,
            "case3": self.case3,
            "k_A": self.k_A,
            "k_AE": self.k_AE,
            "k_max": self.k_max,
            "defects": dict(self.defects),
        }


@dataclass
class BoundReport:
    name: str
    applicable: bool
    premises: dict[str, float] = field(default_factory=dict)
    value: Optional[float] = None
    exact: Optional[float] = None
    notes: list[str] = field(default_factory=list)
    extras: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "applicable": self.applicable,
            "premises": dict(self.premises),
            "value": self.value,
            "exact": self.exact,
            "notes": list(self.notes),
            "extras": dict(self.extras),
        }


def _eps_poly(norm_a: float, norm_e: float, h: int) -> float:
    return math.fsum(math.comb(h, i) * norm_a**i * norm_e ** (h - i) for i in range(h))


def epsilon_poly(a, e, h: int) -> float:
    """``sum_{i<h} C(h, i) ||A||^i ||E||^(h-i)``, a majorant of ``||(A+E)^h - A^h||``."""
    if h < 0:
        raise ValueError("h must be nonnegative")
    return _eps_poly(spectral_norm(a), spectral_norm(e), h)


class PerturbationPair:
    """Shared, lazily computed quantities for one ``(A, E)`` pair."""

    def __init__(self, a, e, tol: Optional[float] = None, eq_tol: float = EQ_TOL):
        self.a = as_matrix(a, square=True)
        self.e = as_matrix(e)
        if self.e.shape != self.a.shape:
            raise ShapeMismatch(f"A is {self.a.shape}, E is {self.e.shape}")
        self.tol = tol
        self.eq_tol = eq_tol
        self.la = PowerLadder(self.a, tol)
        self.lae = PowerLadder(self.a + self.e, tol)

    @cached_property
    def norm_a(self) -> float:
        return self.la.norm

    @cached_property
    def norm_e(self) -> float:
        return spectral_norm(self.e)

    @cached_property
    def x(self) -> np.ndarray:
        """``A^c``."""
        return _core_ep_formula(self.la)

    @cached_property
    def y(self) -> np.ndarray:
        """``(A+E)^c``."""
        return _core_ep_formula(self.lae)

    @cached_property
    def norm_x(self) -> float:
        return spectral_norm(self.x)

    @cached_property
    def k_max(self) -> int:
        return max(self.la.index, self.lae.index)

    @cached_property
    def norm_xe(self) -> float:
        return spectral_norm(self.x @ self.e)

    def eps(self, h: int) -> float:
        return _eps_poly(self.norm_a, self.norm_e, h)

    @cached_property
    def relative_error(self) -> float:
        diff = spectral_norm(self.y - self.x)
        if self.norm_x == 0.0:
            return 0.0 if diff == 0.0 else math.inf
        return diff / self.norm_x

    @cached_property
    def profile(self) -> ConditionProfile:
        a, e, x, y = self.a, self.e, self.x, self.y
        ae = a + e
        thr = self.eq_tol * (1.0 + self.norm_e)
        d = {
            "E - A^c A E": spectral_norm(e - x @ a @ e),
            "E - E A A^c": spectral_norm(e - e @ a @ x),
            "A A^c - (A+E)(A+E)^c": spectral_norm(a @ x - ae @ y),
            "A^c A - (A+E)^c (A+E)": spectral_norm(x @ a - y @ ae),
        }
        k = self.k_max
        ra, rae = self.la.rank(k), self.lae.rank(k)
        d["rank(A^k)"] = float(ra)
        d["rank((A+E)^k)"] = float(rae)
        prof = ConditionProfile(
            case1=d["E - A^c A E"] <= thr and d["E - E A A^c"] <= thr,
            case2=d["A A^c - (A+E)(A+E)^c"] <= thr and d["A^c A - (A+E)^c (A+E)"] <= thr,
            case3=ra == rae,
            k_A=self.la.index,
            k_AE=self.lae.index,
            k_max=k,
            defects=d,
        )
        if prof.case2 and not prof.case3:
            raise ToleranceConflict("case 2 holds but case 3 does not; tolerances are inconsistent")
        return prof


def _pair(a, e, tol) -> PerturbationPair:
    return a if isinstance(a, PerturbationPair) else PerturbationPair(a, e, tol)


def classify(a, e=None, tol: Optional[float] = None) -> ConditionProfile:
    return _pair(a, e, tol).profile


def _kappa_report(pp: PerturbationPair, name: str) -> BoundReport:
    kappa = pp.norm_a * pp.norm_x
    ratio = kappa * pp.norm_e / pp.norm_a if pp.norm_a > 0 else 0.0
    rep = BoundReport(name, ratio < 1.0, {"kappa": kappa, "kappa*||E||/||A||": ratio},
                      exact=pp.relative_error)
    if rep.applicable:
        rep.value = ratio / (1.0 - ratio)
    else:
        rep.notes.append("kappa*||E||/||A|| >= 1")
    return rep


def bound_case1(a, e=None, tol: Optional[float] = None) -> tuple[BoundReport, BoundReport]:
    """Bounds under case 1: ``||A^c E|| / (1 - ||A^c E||)`` and its
    condition-number form.

    Also checks the closed form ``(A+E)^c = (I + A^c E)^-1 A^c`` against a
    direct computation; the defect is stored in ``extras``.
    """
    pp = _pair(a, e, tol)
    g = pp.norm_xe
    rep = BoundReport("bound_3_2", False, {"||A^c E||": g}, exact=pp.relative_error)
    if not pp.profile.case1:
        rep.notes.append("case 1 does not hold")
        raise PremiseViolated("case 1 conditions do not hold", rep)
    if g >= 1.0:
        rep.notes.append("||A^c E|| >= 1")
        raise PremiseViolated(f"||A^c E|| = {g:.6g} >= 1", rep)
    n = pp.a.shape[0]
    closed = np.linalg.solve(np.eye(n) + pp.x @ pp.e, pp.x)
    rep.applicable = True
    rep.value = g / (1.0 - g)
    rep.extras["closed_form_defect"] = spectral_norm(closed - pp.y)
    kap = _kappa_report(pp, "bound_3_3")
    kap.notes.append(KAPPA_FORM_NOTE)
    return rep, kap


def bound_case2(
    a, e=None, tol: Optional[float] = None, check_premise: bool = True
) -> tuple[BoundReport, BoundReport]:
    """Bounds under case 2.

    The first report bounds the relative error by
    ``||A^c E|| / (1 - ||A^c E||)`` and carries the norm bound
    ``||A^c|| / (1 - ||A^c E||)`` on ``||(A+E)^c||`` in ``extras``. With
    ``check_premise=False`` the projector conditions are recorded but not
    enforced (only ``||A^c E|| < 1`` is).
    """
    pp = _pair(a, e, tol)
    g = pp.norm_xe
    rep = BoundReport("bound_3_5", False, {"||A^c E||": g}, exact=pp.relative_error)
    if not pp.profile.case2:
        if check_premise:
            rep.notes.append("case 2 does not hold")
            raise PremiseViolated("case 2 conditions do not hold", rep)
        rep.notes.append("case 2 projector conditions do not hold; evaluated without them")
    if g >= 1.0:
        rep.notes.append("||A^c E|| >= 1")
        raise PremiseViolated(f"||A^c E|| = {g:.6g} >= 1", rep)
    rep.applicable = True
    rep.value = g / (1.0 - g)
    rep.extras["norm_bound"] = pp.norm_x / (1.0 - g)
    rep.extras["||(A+E)^c||"] = spectral_norm(pp.y)
    kap = _kappa_report(pp, "bound_3_6")
    return rep, kap


def _norm_bound_at_own_index(pp: PerturbationPair) -> BoundReport:
    # k is the index of A + E here, not the larger index.
    k = pp.lae.index
    rep = BoundReport("bound_3_7", False, {"k": float(k)}, exact=spectral_norm(pp.y))
    rep.notes.append("bounds ||(A+E)^c||, not the relative error")
    ranks_k = (pp.la.rank(k), pp.lae.rank(k))
    ranks_k1 = (pp.la.rank(k + 1), pp.lae.rank(k + 1))
    pinv_norm = spectral_norm(pp.la.pinv(k + 1))
    series = pinv_norm * pp.eps(k + 1)
    rep.premises.update({
        "rank(A^k)": float(ranks_k[0]),
        "rank((A+E)^k)": float(ranks_k[1]),
        "||(A^(k+1))^+|| * eps(A^(k+1))": series,
    })
    if ranks_k[0] != ranks_k[1]:
        rep.notes.append("rank((A+E)^k) != rank(A^k) at k = ind(A+E)")
    elif ranks_k1[0] != ranks_k1[1]:
        rep.notes.append("rank((A+E)^(k+1)) != rank(A^(k+1)); pseudoinverse bound not available")
    elif series >= 1.0:
        rep.notes.append("||(A^(k+1))^+|| * eps(A^(k+1)) >= 1")
    else:
        ak = spectral_norm(pp.la.power(k))
        rep.applicable = True
        rep.value = (ak + pp.eps(k)) * pinv_norm / (1.0 - series)
    return rep


def _c_of_a(norm_a: float, norm_x: float, k: int) -> float:
    s = math.fsum(norm_a**i * norm_x ** (i + 1) * (1.0 + norm_a * norm_x) for i in range(k))
    return (2.0 * s + norm_x) * norm_a


def bound_case3(a, e=None, tol: Optional[float] = None) -> tuple[BoundReport, BoundReport]:
    """Bounds under case 3 (rank preservation).

    Returns the norm bound on ``||(A+E)^c||`` (index of ``A + E``) and the
    first-order relative-error bound ``C(A) ||E|| / ||A||``; the
    ``o(||E||^2)`` remainder of the latter is only flagged.
    """
    pp = _pair(a, e, tol)
    k = pp.k_max
    pinv_norm = spectral_norm(pp.la.pinv(k + 1))
    series = pinv_norm * pp.eps(k + 1)
    c = _c_of_a(pp.norm_a, pp.norm_x, k)
    first = BoundReport(
        "bound_3_12", False,
        {"k": float(k), "||(A^(k+1))^+|| * eps(A^(k+1))": series, "C(A)": c},
        exact=pp.relative_error,
    )
    if not pp.profile.case3:
        first.notes.append("rank((A+E)^k) != rank(A^k) at the larger index")
        raise PremiseViolated("rank condition fails", first)
    if series >= 1.0:
        first.notes.append("||(A^(k+1))^+|| * eps(A^(k+1)) >= 1")
        raise PremiseViolated(f"series premise fails ({series:.6g} >= 1)", first)
    first.applicable = True
    first.value = c * pp.norm_e / pp.norm_a if pp.norm_a > 0 else 0.0
    first.notes.append("leading term only; o(||E||^2) remainder not quantified")
    return _norm_bound_at_own_index(pp), first


def lower_bound_rank_jump(a, e=None, tol: Optional[float] = None) -> BoundReport:
    """Lower bound ``eps(A^k)^(-1/k)`` on ``||(A+E)^c||`` when the rank of
    ``(A+E)^k`` exceeds that of ``A^k``."""
    pp = _pair(a, e, tol)
    k = pp.k_max
    ra, rae = pp.la.rank(k), pp.lae.rank(k)
    if not rae > ra:
        raise NotARankJump(f"rank((A+E)^{k}) = {rae} is not above rank(A^{k}) = {ra}")
    eps_k = pp.eps(k)
    value = eps_k ** (-1.0 / k)
    exact = spectral_norm(pp.y)
    rep = BoundReport("lower_3_8", True,
                      {"k": float(k), "eps(A^k)": eps_k, "rank(A^k)": float(ra),
                       "rank((A+E)^k)": float(rae)},
                      value=value, exact=exact)
    rep.notes.append("lower bound on ||(A+E)^c||")
    if exact < value * (1 - 1e-10) - 1e-10:
        raise ToleranceConflict(f"||(A+E)^c|| = {exact:.6g} below lower bound {value:.6g}")
    return rep


def exact_relative_error(a, e=None, tol: Optional[float] = None) -> float:
    """``||(A+E)^c - A^c|| / ||A^c||``; ``inf`` when ``A^c = 0 != (A+E)^c``."""
    return _pair(a, e, tol).relative_error


def perturbation_report(a, e, tol: Optional[float] = None) -> dict:
    """Profile, every bound (applicable or not) and the exact error."""
    pp = PerturbationPair(a, e, tol)
    bounds: list[BoundReport] = []
    for fn, names in ((bound_case1, ("bound_3_2", "bound_3_3")),
                      (bound_case2, ("bound_3_5", "bound_3_6")),
                      (bound_case3, ("bound_3_7", "bound_3_12"))):
        try:
            bounds.extend(fn(pp))
        except PremiseViolated as exc:
            for name in names:
                if exc.report is not None and exc.report.name == name:
                    bounds.append(exc.report)
                else:
                    bounds.append(BoundReport(name, False, notes=[str(exc)]))
    try:
        bounds.append(lower_bound_rank_jump(pp))
    except NotARankJump as exc:
        bounds.append(BoundReport("lower_3_8", False, notes=[str(exc)]))
    return {
        "profile": pp.profile.to_dict(),
        "bounds": [b.to_dict() for b in bounds],
        "exact_relative_error": pp.relative_error,
        "norms": {"||A||": pp.norm_a, "||E||": pp.norm_e, "||A^c||": pp.norm_x},
    }
