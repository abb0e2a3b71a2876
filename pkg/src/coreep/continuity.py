"""Continuity experiments for the core-EP inverse over matrix sequences.

Two finite-sample tests are provided:

* :func:`rank_criterion` predicts convergence of ``A_j^c -> A^c`` from
  ``rank(A_j^ind(A_j)) == rank(A^ind(A))`` over the sampled ``j`` and
  records the observed distances alongside;
* :func:`residual_certificate` watches the three defining-equation
  residuals of a candidate sequence ``X_j``.

"Converges" is decided from finitely many samples by
:func:`empirical_convergence`.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ParseError, ToleranceConflict
from .geninv import PowerLadder, _core_ep_formula, _core_ep_residuals
from .linalg import as_matrix, spectral_norm
from .matio import matrix_from_obj
from .perturbation import _eps_poly

__all__ = [
    "DEFAULT_J_VALUES",
    "MatrixSequence",
    "ContinuityVerdict",
    "ResidualCertificate",
    "empirical_convergence",
    "rank_criterion",
    "index_monotonicity_check",
    "residual_certificate",
    "sequence_from_config",
]

DEFAULT_J_VALUES = tuple(2**i for i in range(1, 11))
CONV_TOL = 1e-6
# Minimum log-log decay rate accepted as convergence when the last
# distance is still above CONV_TOL.
MIN_DECAY_RATE = 0.5


@dataclass
class MatrixSequence:
    generator: Callable[[int], np.ndarray]
    limit: np.ndarray
    j_values: Sequence[int] = DEFAULT_J_VALUES
    name: str = ""

    def __post_init__(self):
        self.limit = as_matrix(self.limit, square=True)
        self.j_values = tuple(sorted(int(j) for j in self.j_values))
        if not self.j_values or self.j_values[0] < 1:
            raise ValueError("j_values must be a nonempty list of positive integers")

    def term(self, j: int) -> np.ndarray:
        a = as_matrix(self.generator(j), square=True)
        if a.shape != self.limit.shape:
            raise ValueError(f"term {j} has shape {a.shape}, limit has {self.limit.shape}")
        return a

    @classmethod
    def from_terms(cls, limit, terms: dict[int, np.ndarray], name: str = "") -> "MatrixSequence":
        terms = {int(j): as_matrix(m) for j, m in terms.items()}
        return cls(terms.__getitem__, limit, tuple(terms), name)


def empirical_convergence(
    distances: Sequence[float], j_values: Sequence[int], tol: float = CONV_TOL
) -> bool:
    """Finite-sample convergence decision.

    Converged when the last distance is ``<= tol``, or when the tail half
    of the samples is nonincreasing and decays at least like
    ``j^-MIN_DECAY_RATE`` on a log-log fit.
    """
    d = np.asarray(distances, dtype=float)
    j = np.asarray(j_values, dtype=float)
    if d.size == 0:
        return False
    if d[-1] <= tol:
        return True
    if d.size < 3 or not np.all(np.isfinite(d)):
        return False
    tail = slice(d.size // 2, None)
    dt, jt = d[tail], j[tail]
    if np.any(np.diff(dt) > 1e-12 * dt[:-1] + 1e-300):
        return False
    if np.any(dt <= 0):
        return True
    slope = np.polyfit(np.log(jt), np.log(dt), 1)[0]
    return bool(slope <= -MIN_DECAY_RATE)


@dataclass
class ContinuityVerdict:
    j_values: list[int]
    limit_index: int
    limit_rank: int
    rank_matches: list[bool]
    j0: Optional[int]
    rank_criterion_holds: bool
    predicted_convergent: bool
    empirical_distances: list[float]
    empirical_convergent: bool
    index_monotonicity: list[tuple[int, int]]
    core_ep_norms: list[float]
    drazin_distances: list[float]
    pinv_distances: list[float]
    lower_bounds: list[Optional[float]]
    criterion4_matches: list[bool] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.predicted_convergent == self.empirical_convergent

    def to_dict(self) -> dict:
        return {
            "j_values": list(self.j_values),
            "limit_index": self.limit_index,
            "limit_rank": self.limit_rank,
            "rank_matches": list(self.rank_matches),
            "j0": self.j0,
            "rank_criterion_holds": self.rank_criterion_holds,
            "predicted_convergent": self.predicted_convergent,
            "empirical_convergent": self.empirical_convergent,
            "empirical_distances": list(self.empirical_distances),
            "index_monotonicity": [list(p) for p in self.index_monotonicity],
            "core_ep_norms": list(self.core_ep_norms),
            "drazin_distances": list(self.drazin_distances),
            "pinv_distances": list(self.pinv_distances),
            "lower_bounds": list(self.lower_bounds),
            "criterion4_matches": list(self.criterion4_matches),
        }


def _drazin(ladder: PowerLadder, core: np.ndarray) -> np.ndarray:
    k = ladder.index
    return np.linalg.matrix_power(core, k + 1) @ ladder.power(k)


def _first_stable(matches: Sequence[bool], j_values: Sequence[int]) -> Optional[int]:
    j0 = None
    for j, ok in zip(reversed(j_values), reversed(matches)):
        if not ok:
            break
        j0 = j
    return j0


def rank_criterion(
    seq: MatrixSequence,
    tol: Optional[float] = None,
    conv_tol: float = CONV_TOL,
    workers: int = 1,
) -> ContinuityVerdict:
    """Rank test for ``A_j^c -> A^c`` plus the observed behaviour.

    The prediction holds when ``rank(A_j^ind(A_j)) == rank(A^ind(A))`` for
    every sampled ``j`` from some ``j0`` on. Per ``j`` the verdict also
    records ``||A_j^c - A^c||``, the matching Drazin and Moore-Penrose
    distances, the index pair and, on rank jumps, the lower bound on
    ``||A_j^c||``.
    """
    lim = PowerLadder(seq.limit, tol)
    k_lim, r_lim = lim.index, lim.core_rank
    lim_core = _core_ep_formula(lim)
    lim_drazin = _drazin(lim, lim_core)

    def one(j: int):
        a = seq.term(j)
        lad = PowerLadder(a, tol)
        kj = lad.index
        core = _core_ep_formula(lad)
        m = max(k_lim, kj)
        lb = None
        if m > 0 and lad.rank(m) > lim.rank(m):
            lb = _eps_poly(lim.norm, spectral_norm(a - seq.limit), m) ** (-1.0 / m)
        return (
            lad.rank(kj) == r_lim,
            lim.rank(kj) == r_lim,
            spectral_norm(core - lim_core),
            (k_lim, kj),
            spectral_norm(core),
            spectral_norm(_drazin(lad, core) - lim_drazin),
            spectral_norm(lad.pinv(kj) - lim.pinv(kj)),
            lb,
        )

    js = list(seq.j_values)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, js))
    else:
        rows = [one(j) for j in js]
    matches, crit4, dist, pairs, norms, ddist, pdist, lbs = map(list, zip(*rows))
    j0 = _first_stable(matches, js)
    holds = j0 is not None
    return ContinuityVerdict(
        j_values=js,
        limit_index=k_lim,
        limit_rank=r_lim,
        rank_matches=matches,
        j0=j0,
        rank_criterion_holds=holds,
        predicted_convergent=holds,
        empirical_distances=dist,
        empirical_convergent=empirical_convergence(dist, js, conv_tol),
        index_monotonicity=pairs,
        core_ep_norms=norms,
        drazin_distances=ddist,
        pinv_distances=pdist,
        lower_bounds=lbs,
        criterion4_matches=[a and b for a, b in zip(matches, crit4)],
    )


def index_monotonicity_check(
    seq: MatrixSequence,
    tol: Optional[float] = None,
    verdict: Optional[ContinuityVerdict] = None,
) -> Optional[list[tuple[int, int]]]:
    """``(ind A, ind A_j)`` for sampled ``j >= j0``; ``None`` when no
    empirical convergence was observed.

    Raises :class:`ToleranceConflict` if ``ind A > ind A_j`` past ``j0``.
    """
    v = verdict if verdict is not None else rank_criterion(seq, tol)
    if not v.empirical_convergent:
        return None
    start = v.j0 if v.j0 is not None else v.j_values[-1]
    pairs = [p for j, p in zip(v.j_values, v.index_monotonicity) if j >= start]
    for k_lim, kj in pairs:
        if k_lim > kj:
            raise ToleranceConflict(f"ind(A) = {k_lim} exceeds ind(A_j) = {kj} after convergence")
    return pairs


@dataclass
class ResidualCertificate:
    converges: bool
    j_values: list[int]
    residuals: list[dict[str, float]]
    residual_max: list[float]
    distances: list[float]

    @property
    def verdict(self) -> str:
        return "CONVERGES_TO_COREEP" if self.converges else "NOT_CERTIFIED"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "j_values": list(self.j_values),
            "residuals": [dict(r) for r in self.residuals],
            "residual_max": list(self.residual_max),
            "distances": list(self.distances),
        }


def residual_certificate(
    a,
    x_seq: Sequence[np.ndarray],
    tol: Optional[float] = None,
    j_values: Optional[Sequence[int]] = None,
    conv_tol: float = CONV_TOL,
) -> ResidualCertificate:
    """Track the defining-equation residuals of ``X_j`` and ``||X_j - A^c||``.

    Certifies convergence when both series pass
    :func:`empirical_convergence`.
    """
    if not x_seq:
        raise ValueError("x_seq must be nonempty")
    ladder = PowerLadder(a, tol)
    js = list(j_values) if j_values is not None else list(range(1, len(x_seq) + 1))
    if len(js) != len(x_seq):
        raise ValueError("j_values and x_seq differ in length")
    core = _core_ep_formula(ladder)
    res = [_core_ep_residuals(ladder, as_matrix(x)) for x in x_seq]
    rmax = [max(r.values()) for r in res]
    dist = [spectral_norm(as_matrix(x) - core) for x in x_seq]
    ok = empirical_convergence(rmax, js, conv_tol) and empirical_convergence(dist, js, conv_tol)
    return ResidualCertificate(ok, js, res, rmax, dist)


_SYMBOL = "1/j"


def _template_entry(v, where: str) -> tuple[complex, complex]:
    """``(constant, coefficient of 1/j)`` for one template entry."""
    if v == _SYMBOL:
        return 0j, 1 + 0j
    if isinstance(v, (list, tuple)) and len(v) == 2 and _SYMBOL in v:
        re, im = v
        const = complex(0 if re == _SYMBOL else float(re), 0 if im == _SYMBOL else float(im))
        coef = complex(1 if re == _SYMBOL else 0, 1 if im == _SYMBOL else 0)
        return const, coef
    m = matrix_from_obj({"rows": 1, "cols": 1, "data": [v]})
    return complex(m[0, 0]), 0j


def sequence_from_config(obj: dict) -> MatrixSequence:
    """Build a :class:`MatrixSequence` from its JSON config.

    Either ``{"limit": M, "terms": [{"j": int, "matrix": M}, ...]}`` or
    ``{"limit": M, "template": T, "symbol_value": "1/j", "j_values": [...]}``
    where entries of ``T`` may be the string ``"1/j"``.
    """
    if not isinstance(obj, dict) or "limit" not in obj:
        raise ParseError("sequence config needs a 'limit' matrix")
    limit = matrix_from_obj(obj["limit"])
    name = str(obj.get("name", ""))
    if "terms" in obj:
        try:
            terms = {int(t["j"]): matrix_from_obj(t["matrix"]) for t in obj["terms"]}
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad 'terms' entry: {exc}") from exc
        if not terms:
            raise ParseError("'terms' is empty")
        return MatrixSequence.from_terms(limit, terms, name)
    if "template" not in obj:
        raise ParseError("sequence config needs 'terms' or 'template'")
    if obj.get("symbol_value", _SYMBOL) != _SYMBOL:
        raise ParseError("only symbol_value '1/j' is supported")
    tpl = obj["template"]
    try:
        rows, cols, data = tpl["rows"], tpl["cols"], tpl["data"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad template: {exc}") from exc
    if len(data) != rows * cols:
        raise ParseError("template data length != rows*cols")
    parts = [_template_entry(v, f"template[{i}]") for i, v in enumerate(data)]
    const = np.array([p[0] for p in parts]).reshape(rows, cols)
    coef = np.array([p[1] for p in parts]).reshape(rows, cols)
    js = obj.get("j_values", DEFAULT_J_VALUES)
    try:
        return MatrixSequence(lambda j: const + coef / j, limit, js, name)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
